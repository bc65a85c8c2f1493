//! Graded free modules and their maps.

use std::sync::{Arc, OnceLock};

use super::algebra::GradedAlgebra;
use crate::exactla::{Accumulator, Scalar, ScalarMatrix, SparseVec};
use crate::freealg::{NcPoly, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModuleError {
    #[error("matrix shape {found:?} does not match modules ({expected:?})")]
    Shape { expected: (usize, usize), found: (usize, usize) },
    #[error("entry ({row},{col}) has degree {found}, expected {expected}")]
    EntryDegree { row: usize, col: usize, expected: i64, found: u32 },
    #[error("degree {degree} beyond bound {bound}")]
    DegreeOutOfBound { degree: u32, bound: u32 },
    #[error("composition of incompatible maps")]
    Incompatible,
}

/// `⊕_j A(−s_j)`: generator `j` sits in degree `s_j`.
#[derive(Clone, Debug)]
pub struct FreeModule {
    algebra: Arc<GradedAlgebra>,
    shifts: Vec<u32>,
}

impl PartialEq for FreeModule {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) && self.shifts == other.shifts
    }
}

impl FreeModule {
    pub fn new(algebra: Arc<GradedAlgebra>, shifts: Vec<u32>) -> Self {
        FreeModule { algebra, shifts }
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra> {
        &self.algebra
    }

    pub fn shifts(&self) -> &[u32] {
        &self.shifts
    }

    pub fn shift(&self, j: usize) -> u32 {
        self.shifts[j]
    }

    pub fn rank(&self) -> usize {
        self.shifts.len()
    }

    /// Block dimension of generator `j` in degree `t`.
    pub fn block_dim(&self, j: usize, t: u32) -> usize {
        self.algebra.dim(t as i64 - self.shifts[j] as i64)
    }

    pub fn dim(&self, t: u32) -> usize {
        (0..self.rank()).map(|j| self.block_dim(j, t)).sum()
    }

    /// Start of each generator block in degree `t`, plus the total at the end.
    pub fn offsets(&self, t: u32) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.rank() + 1);
        let mut acc = 0;
        for j in 0..self.rank() {
            out.push(acc);
            acc += self.block_dim(j, t);
        }
        out.push(acc);
        out
    }

    /// Generator and basis word of a flat coordinate in degree `t`.
    pub fn locate(&self, t: u32, flat: usize) -> (usize, &Word) {
        let off = self.offsets(t);
        let j = (0..self.rank()).rev().find(|&j| off[j] <= flat && off[j + 1] > flat).expect("coordinate in range");
        (j, &self.algebra.basis(t - self.shifts[j])[flat - off[j]])
    }

    /// Generator `j` as an element of degree `s_j`.
    pub fn generator(&self, j: usize) -> SparseVec {
        let off = self.offsets(self.shifts[j]);
        SparseVec::unit(off[j])
    }

    /// Element `Σ_j p_j e_j` in degree `t`; `p_j` must have degree `t − s_j`.
    pub fn element(&self, t: u32, parts: &[NcPoly]) -> SparseVec {
        let off = self.offsets(t);
        let mut pairs = Vec::new();
        for (j, p) in parts.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            assert_eq!(p.degree() as i64, t as i64 - self.shifts[j] as i64, "component degree mismatch");
            for (k, c) in self.algebra.coords(p).iter() {
                pairs.push((off[j] + k, c.clone()));
            }
        }
        SparseVec::from_sorted_pairs(pairs)
    }

    /// Components of an element of degree `t`.
    pub fn parts(&self, t: u32, v: &SparseVec) -> Vec<NcPoly> {
        let off = self.offsets(t);
        (0..self.rank())
            .map(|j| {
                let d = t as i64 - self.shifts[j] as i64;
                if d < 0 {
                    return NcPoly::zero(0);
                }
                let block = SparseVec::from_sorted_pairs(
                    v.iter().filter(|(i, _)| *i >= off[j] && *i < off[j + 1]).map(|(i, c)| (i - off[j], c.clone())).collect(),
                );
                self.algebra.poly(d as u32, &block)
            })
            .collect()
    }

    /// Coordinates of block `j` of an element of degree `t`.
    pub fn block(&self, t: u32, v: &SparseVec, j: usize) -> SparseVec {
        let off = self.offsets(t);
        SparseVec::from_sorted_pairs(
            v.iter().filter(|(i, _)| *i >= off[j] && *i < off[j + 1]).map(|(i, c)| (i - off[j], c.clone())).collect(),
        )
    }

    /// Left multiplication by generator `x` on an element of degree `t`.
    pub fn left_letter(&self, x: usize, t: u32, v: &SparseVec) -> SparseVec {
        let dx = self.algebra.alphabet().degree(x);
        let src = self.offsets(t);
        let dst = self.offsets(t + dx);
        let mut pairs = Vec::new();
        for j in 0..self.rank() {
            if t < self.shifts[j] || src[j] == src[j + 1] {
                continue;
            }
            let block = SparseVec::from_sorted_pairs(
                v.iter().filter(|(i, _)| *i >= src[j] && *i < src[j + 1]).map(|(i, c)| (i - src[j], c.clone())).collect(),
            );
            if block.is_zero() {
                continue;
            }
            let img = self.algebra.left_letter(x, t - self.shifts[j], &block);
            pairs.extend(img.iter().map(|(i, c)| (dst[j] + i, c.clone())));
        }
        SparseVec::from_sorted_pairs(pairs)
    }

    pub fn left_word(&self, w: &Word, t: u32, v: &SparseVec) -> SparseVec {
        let mut cur = v.clone();
        let mut deg = t;
        for &x in w.iter().rev() {
            cur = self.left_letter(x as usize, deg, &cur);
            deg += self.algebra.alphabet().degree(x as usize);
        }
        cur
    }

    /// `a · v` for `a ∈ A_p` in coordinates and `v` of degree `t`.
    pub fn left_mul(&self, p: u32, a: &SparseVec, t: u32, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(self.dim(t + p).max(1));
        for (k, c) in a.iter() {
            acc.add_scaled(&self.left_word(&self.algebra.basis(p)[*k], t, v), c);
        }
        acc.drain()
    }

    /// Direct sum with another module over the same algebra.
    pub fn direct_sum(&self, other: &FreeModule) -> FreeModule {
        let mut shifts = self.shifts.clone();
        shifts.extend_from_slice(&other.shifts);
        FreeModule::new(self.algebra.clone(), shifts)
    }
}

/// A degree-preserving left-linear map between free modules.
///
/// `entries[i][j]` is the coefficient of target generator `i` in the image of
/// source generator `j`, so `f(e_j) = Σ_i entries[i][j] e'_i`.
#[derive(Debug)]
pub struct ModuleMap {
    source: FreeModule,
    target: FreeModule,
    entries: Vec<Vec<NcPoly>>,
    columns: Vec<OnceLock<Arc<Vec<SparseVec>>>>,
}

impl Clone for ModuleMap {
    fn clone(&self) -> Self {
        ModuleMap::build(self.source.clone(), self.target.clone(), self.entries.clone())
    }
}

impl ModuleMap {
    fn build(source: FreeModule, target: FreeModule, entries: Vec<Vec<NcPoly>>) -> Self {
        let n = source.algebra().bound() as usize + 1;
        ModuleMap { source, target, entries, columns: (0..n).map(|_| OnceLock::new()).collect() }
    }

    /// Validate shapes and degrees and reduce entries to normal form.
    pub fn new(source: FreeModule, target: FreeModule, entries: Vec<Vec<NcPoly>>) -> Result<Self, ModuleError> {
        let found = (entries.len(), entries.first().map_or(source.rank(), |r| r.len()));
        if found != (target.rank(), source.rank()) || entries.iter().any(|r| r.len() != source.rank()) {
            return Err(ModuleError::Shape { expected: (target.rank(), source.rank()), found });
        }
        let alg = source.algebra().clone();
        let mut normalized = Vec::with_capacity(entries.len());
        for (i, row) in entries.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (j, p) in row.into_iter().enumerate() {
                let expected = source.shift(j) as i64 - target.shift(i) as i64;
                if p.is_zero() {
                    out.push(NcPoly::zero(expected.max(0) as u32));
                    continue;
                }
                if p.degree() as i64 != expected {
                    return Err(ModuleError::EntryDegree { row: i, col: j, expected, found: p.degree() });
                }
                out.push(alg.normal_form(&p));
            }
            normalized.push(out);
        }
        Ok(Self::build(source, target, normalized))
    }

    /// Map determined by the images of the source generators (elements of the target).
    pub fn from_images(source: FreeModule, target: FreeModule, images: &[SparseVec]) -> Self {
        assert_eq!(images.len(), source.rank());
        let mut entries = vec![Vec::with_capacity(source.rank()); target.rank()];
        for (j, img) in images.iter().enumerate() {
            let parts = target.parts(source.shift(j), img);
            for (i, p) in parts.into_iter().enumerate() {
                let d = (source.shift(j) as i64 - target.shift(i) as i64).max(0) as u32;
                entries[i].push(if p.is_zero() { NcPoly::zero(d) } else { p });
            }
        }
        Self::build(source, target, entries)
    }

    pub fn zero(source: FreeModule, target: FreeModule) -> Self {
        let entries = (0..target.rank())
            .map(|i| {
                (0..source.rank())
                    .map(|j| NcPoly::zero((source.shift(j) as i64 - target.shift(i) as i64).max(0) as u32))
                    .collect()
            })
            .collect();
        Self::build(source, target, entries)
    }

    pub fn identity(module: FreeModule) -> Self {
        let images: Vec<SparseVec> = (0..module.rank()).map(|j| module.generator(j)).collect();
        Self::from_images(module.clone(), module, &images)
    }

    pub fn source(&self) -> &FreeModule {
        &self.source
    }

    pub fn target(&self) -> &FreeModule {
        &self.target
    }

    pub fn entries(&self) -> &[Vec<NcPoly>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &NcPoly {
        &self.entries[i][j]
    }

    /// Image of source generator `j`, an element of the target in degree `s_j`.
    pub fn image_of_generator(&self, j: usize) -> SparseVec {
        let t = self.source.shift(j);
        if t > self.source.algebra().bound() {
            return SparseVec::new();
        }
        let parts: Vec<NcPoly> = (0..self.target.rank())
            .map(|i| if (t as i64) < self.target.shift(i) as i64 { NcPoly::zero(0) } else { self.entries[i][j].clone() })
            .collect();
        self.target.element(t, &parts)
    }

    /// Images of the degree-`t` basis of the source, in source coordinate order.
    pub fn columns(&self, t: u32) -> Arc<Vec<SparseVec>> {
        let bound = self.source.algebra().bound();
        assert!(t <= bound, "degree {t} beyond bound {bound}");
        self.columns[t as usize]
            .get_or_init(|| {
                let alg = self.source.algebra();
                let mut cols = Vec::with_capacity(self.source.dim(t));
                for j in 0..self.source.rank() {
                    let s = self.source.shift(j);
                    if t < s {
                        continue;
                    }
                    for w in alg.basis(t - s) {
                        if w.is_empty() {
                            cols.push(self.image_of_generator(j));
                            continue;
                        }
                        let x = w.first().unwrap();
                        let dx = alg.alphabet().degree(x);
                        let rest = w.sub(1, w.len());
                        let prev = self.columns(t - dx);
                        let k = alg.word_index(t - dx - s, &rest).expect("suffix of an irreducible word is irreducible");
                        let idx = self.source.offsets(t - dx)[j] + k;
                        cols.push(self.target.left_letter(x, t - dx, &prev[idx]));
                    }
                }
                Arc::new(cols)
            })
            .clone()
    }

    /// Degree-`t` component in the fixed monomial bases.
    pub fn degree_matrix(&self, t: u32) -> Result<ScalarMatrix, ModuleError> {
        let bound = self.source.algebra().bound();
        if t > bound {
            return Err(ModuleError::DegreeOutOfBound { degree: t, bound });
        }
        Ok(ScalarMatrix::from_sparse_cols(self.target.dim(t), &self.columns(t)))
    }

    /// Apply to an element of degree `t`.
    pub fn apply(&self, t: u32, v: &SparseVec) -> SparseVec {
        let cols = self.columns(t);
        let mut acc = Accumulator::new(self.target.dim(t).max(1));
        for (k, c) in v.iter() {
            acc.add_scaled(&cols[*k], c);
        }
        acc.drain()
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &ModuleMap) -> Result<ModuleMap, ModuleError> {
        if g.target != self.source {
            return Err(ModuleError::Incompatible);
        }
        let images: Vec<SparseVec> = (0..g.source.rank())
            .map(|j| {
                let t = g.source.shift(j);
                if t > g.source.algebra().bound() {
                    SparseVec::new()
                } else {
                    self.apply(t, &g.image_of_generator(j))
                }
            })
            .collect();
        Ok(ModuleMap::from_images(g.source.clone(), self.target.clone(), &images))
    }

    pub fn scale(&self, c: &Scalar) -> ModuleMap {
        let entries = self.entries.iter().map(|r| r.iter().map(|p| p.scale(c)).collect()).collect();
        Self::build(self.source.clone(), self.target.clone(), entries)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(|p| p.is_zero()))
    }

    /// Every entry lies in the augmentation ideal.
    pub fn is_minimal(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(|p| p.constant_term().is_zero()))
    }
}

impl PartialEq for ModuleMap {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.entries == other.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::{parse_expr, Alphabet};
    use proptest::prelude::*;

    fn example_a(d: u32) -> Arc<GradedAlgebra> {
        let a = Alphabet::linear(&["x1", "x2"]).unwrap();
        let rels: Vec<NcPoly> =
            ["x1*x1*x2 - x2*x1*x1", "x1*x2*x2 - x2*x2*x1"].iter().map(|r| parse_expr(r, &a).unwrap()).collect();
        Arc::new(GradedAlgebra::new(&a, &rels, d).unwrap())
    }

    fn p(a: &GradedAlgebra, s: &str) -> NcPoly {
        parse_expr(s, a.alphabet()).unwrap()
    }

    /// The printed resolution of the example algebra.
    fn printed_differentials(a: &Arc<GradedAlgebra>) -> (ModuleMap, ModuleMap, ModuleMap) {
        let p0 = FreeModule::new(a.clone(), vec![0]);
        let p1 = FreeModule::new(a.clone(), vec![1, 1]);
        let p2 = FreeModule::new(a.clone(), vec![3, 3]);
        let p3 = FreeModule::new(a.clone(), vec![4]);
        // rows of the printed matrices act on row vectors; as columns: d(e_j) = Σ_i M[j][i] e'_i
        let d1 = ModuleMap::new(p1.clone(), p0.clone(), vec![vec![p(a, "x1"), p(a, "x2")]]).unwrap();
        let d2 = ModuleMap::new(
            p2.clone(),
            p1.clone(),
            vec![vec![p(a, "-x2*x1"), p(a, "-x2*x2")], vec![p(a, "x1*x1"), p(a, "x1*x2")]],
        )
        .unwrap();
        let d3 = ModuleMap::new(p3, p2, vec![vec![p(a, "-x2")], vec![p(a, "x1")]]).unwrap();
        (d1, d2, d3)
    }

    #[test]
    fn first_differential_in_degree_one() {
        let a = example_a(5);
        let (d1, _, _) = printed_differentials(&a);
        let m = d1.degree_matrix(1).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.rank(), 2);
        assert!(m.kernel_basis().is_empty());
    }

    #[test]
    fn printed_resolution_is_a_complex() {
        let a = example_a(6);
        let (d1, d2, d3) = printed_differentials(&a);
        assert!(d2.compose(&d3).unwrap().is_zero());
        assert!(d1.compose(&d2).unwrap().is_zero());
        assert!(d1.compose(&d3).is_err());
    }

    #[test]
    fn identity_and_zero() {
        let a = example_a(5);
        let (d1, d2, _) = printed_differentials(&a);
        let id1 = ModuleMap::identity(d1.source().clone());
        assert_eq!(d1.compose(&id1).unwrap(), d1);
        assert_eq!(id1.compose(&d2).unwrap(), d2);
        let f = FreeModule::new(a.clone(), vec![0]);
        for t in 0..=5 {
            assert!(ModuleMap::identity(f.clone()).degree_matrix(t).unwrap().is_identity());
            assert!(ModuleMap::zero(f.clone(), f.clone()).degree_matrix(t).unwrap().is_zero());
        }
        assert!(d1.degree_matrix(6).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn degree_matrices_are_functorial(c in proptest::collection::vec(-2i64..3, 8), t in 3u32..7) {
            let a = example_a(6);
            let m1 = FreeModule::new(a.clone(), vec![1, 2]);
            let m2 = FreeModule::new(a.clone(), vec![0, 1]);
            let m3 = FreeModule::new(a.clone(), vec![0]);
            let lin = |u: i64, v: i64| p(&a, &format!("{u}*x1 + {v}*x2"));
            let g = ModuleMap::new(m1.clone(), m2.clone(), vec![
                vec![lin(c[0], c[1]), a.mul_poly(&lin(c[2], c[3]), &lin(1, 1))],
                vec![NcPoly::constant(Scalar::from_i64(c[4])), lin(c[5], 1)],
            ]).unwrap();
            let f = ModuleMap::new(m2, m3, vec![vec![NcPoly::zero(0), lin(c[6], c[7])]]).unwrap();
            let fg = f.compose(&g).unwrap();
            prop_assert_eq!(fg.degree_matrix(t).unwrap(), f.degree_matrix(t).unwrap().mul(&g.degree_matrix(t).unwrap()));
        }
    }
}
