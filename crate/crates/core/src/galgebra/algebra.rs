//! Truncated connected graded algebras.

use std::collections::HashMap;

use crate::exactla::{Accumulator, Scalar, SparseVec};
use crate::freealg::{Alphabet, NcPoly, Word};
use crate::gbasis::{truncated_groebner, GbError, TruncatedGB};

/// A connected graded algebra known through degree `bound`.
///
/// Elements of `A_d` are coordinate vectors over the irreducible words of degree `d`.
/// Left multiplication by each generator is tabulated once.
#[derive(Debug)]
pub struct GradedAlgebra {
    gb: TruncatedGB,
    bases: Vec<Vec<Word>>,
    index: Vec<HashMap<Word, usize>>,
    /// `left[x][d][k]` = coordinates of `x · basis_d[k]` in degree `d + deg x`
    left: Vec<Vec<Vec<SparseVec>>>,
}

impl GradedAlgebra {
    pub fn new(alphabet: &Alphabet, relations: &[NcPoly], bound: u32) -> Result<Self, GbError> {
        Ok(Self::from_gb(truncated_groebner(alphabet, relations, bound)?))
    }

    pub fn from_gb(gb: TruncatedGB) -> Self {
        let bound = gb.bound();
        let bases: Vec<Vec<Word>> = (0..=bound).map(|d| gb.monomial_basis(d).unwrap().to_vec()).collect();
        let index: Vec<HashMap<Word, usize>> =
            bases.iter().map(|b| b.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect()).collect();
        let alphabet = gb.alphabet().clone();
        let mut left = Vec::with_capacity(alphabet.len());
        for x in 0..alphabet.len() {
            let dx = alphabet.degree(x);
            let mut per_degree = Vec::new();
            for d in 0..=bound {
                if d + dx > bound {
                    per_degree.push(Vec::new());
                    continue;
                }
                let target = &index[(d + dx) as usize];
                let cols = bases[d as usize]
                    .iter()
                    .map(|w| {
                        let mut xw = Word::letter(x);
                        xw.extend(w);
                        let nf = gb.normal_form(&NcPoly::monomial(xw, Scalar::one(), d + dx)).unwrap();
                        SparseVec::from_pairs(nf.into_terms().map(|(v, c)| (target[&v], c)).collect())
                    })
                    .collect();
                per_degree.push(cols);
            }
            left.push(per_degree);
        }
        GradedAlgebra { gb, bases, index, left }
    }

    pub fn gb(&self) -> &TruncatedGB {
        &self.gb
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.gb.alphabet()
    }

    pub fn relations(&self) -> &[NcPoly] {
        self.gb.relations()
    }

    pub fn bound(&self) -> u32 {
        self.gb.bound()
    }

    pub fn ngens(&self) -> usize {
        self.alphabet().len()
    }

    /// `dim A_d`, zero outside `0..=bound`.
    pub fn dim(&self, d: i64) -> usize {
        if d < 0 || d > self.bound() as i64 {
            0
        } else {
            self.bases[d as usize].len()
        }
    }

    pub fn basis(&self, d: u32) -> &[Word] {
        &self.bases[d as usize]
    }

    pub fn word_index(&self, d: u32, w: &Word) -> Option<usize> {
        self.index.get(d as usize)?.get(w).copied()
    }

    pub fn hilbert_function(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.len()).collect()
    }

    /// Left multiplication by generator `x` on `v ∈ A_d`.
    pub fn left_letter(&self, x: usize, d: u32, v: &SparseVec) -> SparseVec {
        let cols = &self.left[x][d as usize];
        let target = self.dim((d + self.alphabet().degree(x)) as i64);
        let mut acc = Accumulator::new(target);
        for (k, c) in v.iter() {
            acc.add_scaled(&cols[*k], c);
        }
        acc.drain()
    }

    /// Left multiplication by the word `w` on `v ∈ A_d`.
    pub fn left_word(&self, w: &Word, d: u32, v: &SparseVec) -> SparseVec {
        let mut cur = v.clone();
        let mut deg = d;
        for &x in w.iter().rev() {
            cur = self.left_letter(x as usize, deg, &cur);
            deg += self.alphabet().degree(x as usize);
        }
        cur
    }

    /// The unit `1 ∈ A_0`.
    pub fn unit(&self) -> SparseVec {
        SparseVec::unit(0)
    }

    /// Coordinates of a polynomial's image in `A`.
    pub fn coords(&self, p: &NcPoly) -> SparseVec {
        assert!(p.is_zero() || p.degree() <= self.bound(), "degree {} beyond bound {}", p.degree(), self.bound());
        let mut acc = Accumulator::new(self.dim(p.degree() as i64).max(1));
        for (w, c) in p.terms() {
            acc.add_scaled(&self.left_word(w, 0, &self.unit()), c);
        }
        acc.drain()
    }

    /// Polynomial with the given coordinates in degree `d`.
    pub fn poly(&self, d: u32, v: &SparseVec) -> NcPoly {
        NcPoly::from_terms(d, v.iter().map(|(k, c)| (self.bases[d as usize][*k].clone(), c.clone())))
    }

    pub fn normal_form(&self, p: &NcPoly) -> NcPoly {
        self.poly(p.degree(), &self.coords(p))
    }

    pub fn is_zero(&self, p: &NcPoly) -> bool {
        self.coords(p).is_zero()
    }

    /// `a · b` for `a ∈ A_p`, `b ∈ A_q`.
    pub fn mul(&self, p: u32, a: &SparseVec, q: u32, b: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(self.dim((p + q) as i64).max(1));
        for (k, c) in a.iter() {
            acc.add_scaled(&self.left_word(&self.bases[p as usize][*k], q, b), c);
        }
        acc.drain()
    }

    /// Product of polynomials, in normal form.
    pub fn mul_poly(&self, a: &NcPoly, b: &NcPoly) -> NcPoly {
        let v = self.mul(a.degree(), &self.coords(a), b.degree(), &self.coords(b));
        self.poly(a.degree() + b.degree(), &v)
    }

    pub fn generator(&self, i: usize) -> NcPoly {
        NcPoly::generator(i, self.alphabet())
    }

    /// Constant term of an element of degree `d`.
    pub fn augmentation(&self, d: u32, v: &SparseVec) -> Scalar {
        if d == 0 {
            v.get(0)
        } else {
            Scalar::zero()
        }
    }

    /// Degree-`d` component of the ideal generated by the relations, as a dimension.
    pub fn relation_span_dim(&self, d: u32) -> usize {
        self.alphabet().words_of_degree(d).len() - self.dim(d as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::parse_expr;
    use proptest::prelude::*;

    pub(crate) fn example_a(d: u32) -> GradedAlgebra {
        let a = Alphabet::linear(&["x1", "x2"]).unwrap();
        let rels: Vec<NcPoly> =
            ["x1*x1*x2 - x2*x1*x1", "x1*x2*x2 - x2*x2*x1"].iter().map(|r| parse_expr(r, &a).unwrap()).collect();
        GradedAlgebra::new(&a, &rels, d).unwrap()
    }

    #[test]
    fn coordinates_roundtrip() {
        let a = example_a(6);
        let p = parse_expr("x2*x1*x1 + 3*x2*x2*x1", a.alphabet()).unwrap();
        let nf = a.normal_form(&p);
        assert_eq!(nf, a.gb().normal_form(&p).unwrap());
        assert!(a.is_zero(&parse_expr("x1*x1*x2 - x2*x1*x1", a.alphabet()).unwrap()));
    }

    proptest! {
        #[test]
        fn table_product_matches_rewriting(c1 in proptest::collection::vec(-2i64..3, 4), c2 in proptest::collection::vec(-2i64..3, 6)) {
            let a = example_a(6);
            let p = NcPoly::from_terms(2, a.alphabet().words_of_degree(2).into_iter().zip(c1).map(|(w, c)| (w, Scalar::from_i64(c))));
            let q = NcPoly::from_terms(3, a.alphabet().words_of_degree(3).into_iter().zip(c2).map(|(w, c)| (w, Scalar::from_i64(c))));
            prop_assert_eq!(a.mul_poly(&p, &q), a.gb().normal_form(&p.mul(&q)).unwrap());
        }
    }
}
