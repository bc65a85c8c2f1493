//! Incremental column echelon form.
//!
//! Columns are fed one at a time. Each column is reduced against the pivots
//! collected so far; a nonzero remainder becomes a new pivot, a zero remainder
//! yields a kernel vector `e_j - Σ α_p e_p`. The kernel vectors produced this
//! way are exactly the RREF kernel basis of the matrix whose columns were fed,
//! and [`ColumnEchelon::solve`] returns the particular solution with every free
//! variable set to zero.

use super::scalar::Scalar;
use super::sparse::{Accumulator, SparseVec};

#[derive(Clone, Debug)]
struct Pivot {
    row: usize,
    /// normalized so that `vec[row] = 1`
    vec: SparseVec,
    /// column combination whose image is `vec`
    pre: SparseVec,
}

/// Outcome of [`ColumnEchelon::push`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pushed {
    /// the column enlarged the span
    Independent,
    /// the column was dependent; this kernel vector (over column indices) records the relation
    Dependent(SparseVec),
}

#[derive(Clone, Debug)]
pub struct ColumnEchelon {
    dim: usize,
    ncols: usize,
    pivots: Vec<Pivot>,
    kernel: Vec<SparseVec>,
    free_cols: Vec<usize>,
}

impl ColumnEchelon {
    /// Empty echelon for columns living in a space of dimension `dim`.
    pub fn new(dim: usize) -> Self {
        ColumnEchelon { dim, ncols: 0, pivots: Vec::new(), kernel: Vec::new(), free_cols: Vec::new() }
    }

    /// Echelon of all columns of the given list.
    pub fn from_columns(dim: usize, cols: &[SparseVec]) -> Self {
        let mut e = Self::new(dim);
        for c in cols {
            e.push(c);
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn columns(&self) -> usize {
        self.ncols
    }

    /// Kernel basis of the columns fed so far, in column order of the free variables.
    pub fn kernel(&self) -> &[SparseVec] {
        &self.kernel
    }

    /// Column indices that were dependent on earlier columns.
    pub fn free_columns(&self) -> &[usize] {
        &self.free_cols
    }

    /// Reduce `v` against the pivots: returns the remainder and the column combination
    /// `x` with `v = remainder + M·x`.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut acc = Accumulator::new(self.dim);
        acc.add_scaled(v, &Scalar::one());
        let mut combo = Accumulator::new(self.ncols.max(1));
        for p in &self.pivots {
            let c = acc.get(p.row).clone();
            if !c.is_zero() {
                acc.add_scaled(&p.vec, &-c.clone());
                combo.add_scaled(&p.pre, &c);
            }
        }
        (acc.drain(), combo.drain())
    }

    /// Whether `v` lies in the column span.
    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Feed the next column.
    pub fn push(&mut self, col: &SparseVec) -> Pushed {
        assert!(col.max_index().is_none_or(|m| m < self.dim), "column exceeds ambient dimension");
        let j = self.ncols;
        self.ncols += 1;
        let (rem, combo) = self.reduce(col);
        // col − M·combo = rem, so e_j − combo maps to rem
        let mut pre = combo.negated();
        pre.push_back(j, Scalar::one());
        match rem.first() {
            None => {
                self.kernel.push(pre.clone());
                self.free_cols.push(j);
                Pushed::Dependent(pre)
            }
            Some((row, lead)) => {
                let inv = lead.inv().expect("nonzero lead");
                let row = *row;
                self.pivots.push(Pivot { row, vec: rem.scaled(&inv), pre: pre.scaled(&inv) });
                Pushed::Independent
            }
        }
    }

    /// Particular solution of `M·x = b` with all free variables zero.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        let (rem, combo) = self.reduce(b);
        rem.is_zero().then_some(combo)
    }

    /// Solution with every free variable set to one instead of zero.
    pub fn solve_perturbed(&self, b: &SparseVec) -> Option<SparseVec> {
        let mut x = self.solve(b)?;
        for k in &self.kernel {
            x.add_scaled(k, &Scalar::one());
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::ScalarMatrix;
    use proptest::prelude::*;

    fn sv(v: &[i64]) -> SparseVec {
        SparseVec::from_dense(&v.iter().map(|&x| Scalar::from_i64(x)).collect::<Vec<_>>())
    }

    #[test]
    fn kernel_matches_rref_kernel() {
        let m = ScalarMatrix::from_i64_rows(&[&[1, 2, 3, 1], &[2, 4, 1, 0], &[3, 6, 4, 1]]);
        let e = ColumnEchelon::from_columns(3, &m.sparse_cols());
        let ours: Vec<Vec<Scalar>> = e.kernel().iter().map(|k| k.to_dense(4)).collect();
        assert_eq!(ours, m.kernel_basis());
    }

    #[test]
    fn solve_and_reject() {
        let e = ColumnEchelon::from_columns(2, &[sv(&[1, 1]), sv(&[2, 2])]);
        assert_eq!(e.solve(&sv(&[3, 3])).unwrap().to_dense(2), vec![Scalar::from_i64(3), Scalar::zero()]);
        assert!(e.solve(&sv(&[1, 0])).is_none());
        let p = e.solve_perturbed(&sv(&[3, 3])).unwrap().to_dense(2);
        assert_eq!(p, vec![Scalar::from_i64(1), Scalar::one()]);
    }

    proptest! {
        #[test]
        fn agrees_with_dense_routines(v in proptest::collection::vec(-2i64..3, 12), b in proptest::collection::vec(-2i64..3, 3)) {
            let m = ScalarMatrix::from_rows(v.chunks(4).map(|r| r.iter().map(|&x| Scalar::from_i64(x)).collect()).collect());
            let e = ColumnEchelon::from_columns(3, &m.sparse_cols());
            prop_assert_eq!(e.rank(), m.rref().rank);
            let ours: Vec<Vec<Scalar>> = e.kernel().iter().map(|k| k.to_dense(4)).collect();
            prop_assert_eq!(ours, m.kernel_basis());
            let bv: Vec<Scalar> = b.iter().map(|&x| Scalar::from_i64(x)).collect();
            match (e.solve(&SparseVec::from_dense(&bv)), m.solve(&bv).unwrap()) {
                (Some(x), Some(s)) => prop_assert_eq!(x.to_dense(4), s.particular),
                (None, None) => {}
                _ => prop_assert!(false, "consistency disagrees"),
            }
        }
    }
}
