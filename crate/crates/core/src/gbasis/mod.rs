//! Degree-truncated Gröbner bases of homogeneous two-sided ideals.
//!
//! Words are ordered degree-lexicographically with the alphabet order. Completion
//! runs degree by degree: at degree `d` the input relations of degree `d` and all
//! overlap ambiguities of degree `d` are reduced against the current basis, and
//! the survivors are made monic and inter-reduced. Work done at degree `d` is
//! final for every degree up to `d`.

use std::collections::HashMap;

use crate::freealg::{Alphabet, NcPoly, Word};

/// Name of the monomial order, as recorded in reports.
pub const MONOMIAL_ORDER: &str = "deglex";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GbError {
    #[error("relation {index} has degree {degree}; relations must have degree at least 2")]
    LowDegreeRelation { index: usize, degree: u32 },
    #[error("degree {degree} exceeds the truncation bound {bound}")]
    DegreeExceedsBound { degree: u32, bound: u32 },
}

/// A Gröbner basis complete up to degree `bound`.
#[derive(Clone, Debug)]
pub struct TruncatedGB {
    alphabet: Alphabet,
    relations: Vec<NcPoly>,
    bound: u32,
    basis: Vec<NcPoly>,
    leads: HashMap<Word, usize>,
    max_lead_len: usize,
    monomials: Vec<Vec<Word>>,
}

impl TruncatedGB {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relations(&self) -> &[NcPoly] {
        &self.relations
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// Monic, inter-reduced basis elements in the order they were found.
    pub fn basis(&self) -> &[NcPoly] {
        &self.basis
    }

    pub fn order(&self) -> &'static str {
        MONOMIAL_ORDER
    }

    /// Leftmost occurrence of a leading word inside `w`: (basis index, position).
    fn find_divisor(&self, w: &Word) -> Option<(usize, usize)> {
        let s = w.as_slice();
        for start in 0..s.len() {
            let mut best: Option<usize> = None;
            for end in start + 1..=s.len().min(start + self.max_lead_len) {
                if let Some(&i) = self.leads.get(&Word::from_slice(&s[start..end])) {
                    best = Some(best.map_or(i, |b: usize| b.min(i)));
                }
            }
            if let Some(i) = best {
                return Some((i, start));
            }
        }
        None
    }

    fn reduce(&self, p: &NcPoly) -> NcPoly {
        let mut rest = p.clone();
        let mut out = NcPoly::zero(p.degree());
        while let Some((w, c)) = rest.pop_leading() {
            match self.find_divisor(&w) {
                Some((i, pos)) => {
                    let g = &self.basis[i];
                    let lead_len = g.leading().unwrap().0.len();
                    let left = w.sub(0, pos);
                    let right = w.sub(pos + lead_len, w.len());
                    // g is monic; its leading term cancels the popped one
                    for (v, e) in g.terms().rev().skip(1) {
                        rest.add_term(left.concat(v).concat(&right), &-(&c * e));
                    }
                }
                None => out.add_term(w, &c),
            }
        }
        out
    }

    fn insert(&mut self, g: NcPoly) {
        let lead = g.leading().expect("nonzero basis element").0.clone();
        self.max_lead_len = self.max_lead_len.max(lead.len());
        self.leads.insert(lead, self.basis.len());
        self.basis.push(g);
    }

    /// Overlap S-polynomials of the current basis whose ambiguity has degree `d`.
    fn overlaps(&self, d: u32) -> Vec<NcPoly> {
        let mut out = Vec::new();
        for f in &self.basis {
            let u = f.leading().unwrap().0;
            for g in &self.basis {
                let v = g.leading().unwrap().0;
                for k in 1..u.len().min(v.len()) {
                    if u.as_slice()[u.len() - k..] != v.as_slice()[..k] {
                        continue;
                    }
                    let left = u.sub(0, u.len() - k);
                    let right = v.sub(k, v.len());
                    let (dl, dr) = (self.alphabet.word_degree(&left), self.alphabet.word_degree(&right));
                    if f.degree() + dr != d {
                        continue;
                    }
                    let s = f.sandwich(&Word::empty(), 0, &right, dr).sub(&g.sandwich(&left, dl, &Word::empty(), 0));
                    out.push(s);
                }
            }
        }
        out
    }

    /// Degree-`d` irreducible words, from those of lower degree.
    fn extend_monomials(&mut self, d: u32) {
        let mut words = Vec::new();
        for x in 0..self.alphabet.len() {
            let g = self.alphabet.degree(x);
            if g > d {
                continue;
            }
            for w in &self.monomials[(d - g) as usize] {
                let mut c = w.clone();
                c.push(x);
                let s = c.as_slice();
                let reducible = (1..=s.len().min(self.max_lead_len))
                    .any(|k| self.leads.contains_key(&Word::from_slice(&s[s.len() - k..])));
                if !reducible {
                    words.push(c);
                }
            }
        }
        words.sort();
        self.monomials.push(words);
    }

    /// Normal form; `p` must have degree at most the bound.
    pub fn normal_form(&self, p: &NcPoly) -> Result<NcPoly, GbError> {
        if p.degree() > self.bound && !p.is_zero() {
            return Err(GbError::DegreeExceedsBound { degree: p.degree(), bound: self.bound });
        }
        Ok(self.reduce(p))
    }

    pub fn is_reducible(&self, w: &Word) -> bool {
        self.find_divisor(w).is_some()
    }

    /// Irreducible words of degree `d`, increasing.
    pub fn monomial_basis(&self, d: u32) -> Result<&[Word], GbError> {
        self.monomials
            .get(d as usize)
            .map(|v| v.as_slice())
            .ok_or(GbError::DegreeExceedsBound { degree: d, bound: self.bound })
    }

    /// `dim A_d` for `d = 0..=bound`.
    pub fn hilbert_function(&self) -> Vec<usize> {
        self.monomials.iter().map(|m| m.len()).collect()
    }
}

/// Compute a Gröbner basis of the two-sided ideal generated by `relations`, complete to degree `bound`.
pub fn truncated_groebner(alphabet: &Alphabet, relations: &[NcPoly], bound: u32) -> Result<TruncatedGB, GbError> {
    for (index, r) in relations.iter().enumerate() {
        if !r.is_zero() && r.degree() < 2 {
            return Err(GbError::LowDegreeRelation { index, degree: r.degree() });
        }
    }
    let mut gb = TruncatedGB {
        alphabet: alphabet.clone(),
        relations: relations.to_vec(),
        bound,
        basis: Vec::new(),
        leads: HashMap::new(),
        max_lead_len: 0,
        monomials: vec![vec![Word::empty()]],
    };
    for d in 1..=bound {
        let mut candidates: Vec<NcPoly> = relations.iter().filter(|r| !r.is_zero() && r.degree() == d).cloned().collect();
        candidates.extend(gb.overlaps(d));
        let first_new = gb.basis.len();
        for c in candidates {
            let r = gb.reduce(&c);
            if let Some((_, lc)) = r.leading() {
                let inv = lc.inv().expect("nonzero leading coefficient");
                gb.insert(r.scale(&inv));
            }
        }
        // inter-reduce the tails of this degree's new elements
        for i in first_new..gb.basis.len() {
            let mut g = gb.basis[i].clone();
            let (lead, c) = g.pop_leading().unwrap();
            let mut tail = gb.reduce(&g);
            tail.add_term(lead, &c);
            gb.basis[i] = tail;
        }
        gb.extend_monomials(d);
    }
    Ok(gb)
}
