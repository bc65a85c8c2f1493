//! Homogeneous noncommutative polynomials.

use std::collections::BTreeMap;
use std::fmt;

use super::word::{Alphabet, Word};
use crate::exactla::Scalar;

/// A homogeneous element of a free algebra.
///
/// Terms are kept in increasing word order; the leading term is the last one.
/// The zero polynomial still carries a degree tag.
#[derive(Clone, Debug)]
pub struct NcPoly {
    terms: BTreeMap<Word, Scalar>,
    degree: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("image of generator {generator} has degree {found}, expected {expected}")]
pub struct DegreeMismatch {
    pub generator: usize,
    pub expected: u32,
    pub found: u32,
}

impl NcPoly {
    pub fn zero(degree: u32) -> Self {
        NcPoly { terms: BTreeMap::new(), degree }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(Word::empty(), c, 0)
    }

    pub fn monomial(w: Word, c: Scalar, degree: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        NcPoly { terms, degree }
    }

    pub fn word(w: Word, alphabet: &Alphabet) -> Self {
        let d = alphabet.word_degree(&w);
        Self::monomial(w, Scalar::one(), d)
    }

    pub fn generator(i: usize, alphabet: &Alphabet) -> Self {
        Self::monomial(Word::letter(i), Scalar::one(), alphabet.degree(i))
    }

    /// Build from (word, coefficient) pairs of the given degree; repeats are summed.
    pub fn from_terms(degree: u32, terms: impl IntoIterator<Item = (Word, Scalar)>) -> Self {
        let mut p = NcPoly::zero(degree);
        for (w, c) in terms {
            p.add_term(w, &c);
        }
        p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Same polynomial with a new degree tag; only meaningful for zero or when consistent.
    pub fn with_degree(mut self, degree: u32) -> Self {
        debug_assert!(self.is_zero() || self.degree == degree);
        self.degree = degree;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Scalar)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Word, Scalar)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Largest word and its coefficient.
    pub fn leading(&self) -> Option<(&Word, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Remove and return the leading term.
    pub fn pop_leading(&mut self) -> Option<(Word, Scalar)> {
        self.terms.pop_last()
    }

    /// Coefficient of the empty word.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Word::empty())
    }

    pub fn add_term(&mut self, w: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_degree(&self, other: &NcPoly) -> u32 {
        if self.is_zero() {
            other.degree
        } else {
            assert!(other.is_zero() || other.degree == self.degree, "adding polynomials of degrees {} and {}", self.degree, other.degree);
            self.degree
        }
    }

    /// `self += c · other`
    pub fn add_scaled(&mut self, other: &NcPoly, c: &Scalar) {
        self.degree = self.check_degree(other);
        for (w, a) in &other.terms {
            self.add_term(w.clone(), &(a * c));
        }
    }

    pub fn add(&self, other: &NcPoly) -> NcPoly {
        let mut p = self.clone();
        p.add_scaled(other, &Scalar::one());
        p
    }

    pub fn sub(&self, other: &NcPoly) -> NcPoly {
        let mut p = self.clone();
        p.add_scaled(other, &-Scalar::one());
        p
    }

    pub fn neg(&self) -> NcPoly {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, c: &Scalar) -> NcPoly {
        if c.is_zero() {
            return NcPoly::zero(self.degree);
        }
        NcPoly { terms: self.terms.iter().map(|(w, a)| (w.clone(), a * c)).collect(), degree: self.degree }
    }

    pub fn mul(&self, other: &NcPoly) -> NcPoly {
        let mut out = NcPoly::zero(self.degree + other.degree);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), &(a * b));
            }
        }
        out
    }

    /// `u · self · v` for words `u`, `v` of the given degrees.
    pub fn sandwich(&self, u: &Word, du: u32, v: &Word, dv: u32) -> NcPoly {
        NcPoly {
            terms: self.terms.iter().map(|(w, a)| (u.concat(w).concat(v), a.clone())).collect(),
            degree: self.degree + du + dv,
        }
    }

    /// The algebra map sending generator `i` to `images[i]`, applied to `self`.
    pub fn apply_generator_map(&self, images: &[NcPoly], alphabet: &Alphabet) -> Result<NcPoly, DegreeMismatch> {
        for (i, img) in images.iter().enumerate() {
            if !img.is_zero() && img.degree != alphabet.degree(i) {
                return Err(DegreeMismatch { generator: i, expected: alphabet.degree(i), found: img.degree });
            }
        }
        let mut out = NcPoly::zero(self.degree);
        for (w, c) in &self.terms {
            let mut acc = NcPoly::constant(c.clone());
            for &l in w.iter() {
                acc = acc.mul(&images[l as usize]);
                if acc.is_zero() {
                    break;
                }
            }
            out.add_scaled(&acc.with_degree(self.degree), &Scalar::one());
        }
        Ok(out)
    }

    /// Re-letter every word through `map`.
    pub fn relabel(&self, map: &[usize]) -> NcPoly {
        NcPoly {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (Word::from_letters(&w.iter().map(|&l| map[l as usize]).collect::<Vec<_>>()), c.clone()))
                .collect(),
            degree: self.degree,
        }
    }

    pub fn in_field(&self, modulus: Option<u64>) -> NcPoly {
        let mut out = NcPoly::zero(self.degree);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), &c.in_field(modulus));
        }
        out
    }

    /// Text form accepted by the expression parser, leading term first.
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, alphabet }
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        self.display(alphabet).to_string()
    }
}

impl PartialEq for NcPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for NcPoly {}

struct PolyDisplay<'a> {
    poly: &'a NcPoly,
    alphabet: &'a Alphabet,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.poly.terms.iter().rev().enumerate() {
            let negative = c.signum() < 0;
            let mag = if negative { -c } else { c.clone() };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if w.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", w.display(self.alphabet))?;
            } else {
                write!(f, "{mag}*{}", w.display(self.alphabet))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::linear(&["x1", "x2"]).unwrap()
    }

    #[test]
    fn product_examples() {
        let a = ab();
        let x1 = NcPoly::generator(0, &a);
        let x2 = NcPoly::generator(1, &a);
        let p = x1.mul(&x2);
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&Word::from_letters(&[0, 1])), Scalar::one());
        let q = x1.add(&x2).mul(&x1.sub(&x2));
        assert_eq!(q.to_text(&a), "-x2*x2 + x2*x1 - x1*x2 + x1*x1");
        assert!(p.mul(&NcPoly::zero(3)).is_zero());
        assert_eq!(p.mul(&NcPoly::zero(3)).degree(), 5);
    }

    #[test]
    fn generator_map_examples() {
        let a = ab();
        let x1 = NcPoly::generator(0, &a);
        let x2 = NcPoly::generator(1, &a);
        let neg = vec![x1.neg(), x2.neg()];
        let p = x1.mul(&x2);
        assert_eq!(p.apply_generator_map(&neg, &a).unwrap(), p);
        let f1 = x1.mul(&x1).mul(&x2).sub(&x2.mul(&x1).mul(&x1));
        assert_eq!(f1.apply_generator_map(&neg, &a).unwrap(), f1.neg());
        let id = vec![x1.clone(), x2.clone()];
        assert_eq!(f1.apply_generator_map(&id, &a).unwrap(), f1);
        assert!(f1.apply_generator_map(&[x1.mul(&x1), x2.clone()], &a).is_err());
    }
}
