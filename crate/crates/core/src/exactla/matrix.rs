//! Scalar matrices and reduced row echelon form.

use std::fmt;

use super::scalar::Scalar;
use super::sparse::SparseVec;

/// Fraction of nonzero entries below which a matrix is stored sparsely.
const SPARSE_DENSITY: f64 = 0.25;

#[derive(Clone, Debug)]
enum Storage {
    Dense(Vec<Scalar>),
    /// one sorted sparse vector per row
    Sparse(Vec<SparseVec>),
}

/// An exact matrix over a field.
#[derive(Clone, Debug)]
pub struct ScalarMatrix {
    rows: usize,
    cols: usize,
    storage: Storage,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

/// Result of [`ScalarMatrix::rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub reduced: ScalarMatrix,
}

/// A consistent linear system's solution set.
#[derive(Clone, Debug)]
pub struct Solution {
    pub particular: Vec<Scalar>,
    pub nullspace: Vec<Vec<Scalar>>,
}

impl ScalarMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ScalarMatrix { rows, cols, storage: Storage::Sparse(vec![SparseVec::new(); rows]) }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(SparseVec::unit).collect();
        ScalarMatrix { rows: n, cols: n, storage: Storage::Sparse(rows) }.normalized()
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        let rows = entries
            .iter()
            .enumerate()
            .map(|(i, s)| SparseVec::from_pairs(vec![(i, s.clone())]))
            .collect();
        ScalarMatrix { rows: entries.len(), cols: entries.len(), storage: Storage::Sparse(rows) }
            .normalized()
    }

    /// Build from dense rows; panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        let data = rows.into_iter().flatten().collect();
        ScalarMatrix { rows: r, cols: c, storage: Storage::Dense(data) }.normalized()
    }

    /// Build from sparse rows of the given column count.
    pub fn from_sparse_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.max_index().is_none_or(|m| m < cols)));
        ScalarMatrix { rows: rows.len(), cols, storage: Storage::Sparse(rows) }.normalized()
    }

    /// Build from sparse columns of the given row count.
    pub fn from_sparse_cols(rows: usize, cols: &[SparseVec]) -> Self {
        let mut out = vec![Vec::new(); rows];
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter() {
                out[*i].push((j, v.clone()));
            }
        }
        let rows_v = out.into_iter().map(SparseVec::from_sorted_pairs).collect();
        Self::from_sparse_rows(cols.len(), rows_v)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Scalar::from_i64(v)).collect()).collect())
    }

    fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(d) => d.iter().filter(|s| !s.is_zero()).count(),
            Storage::Sparse(rows) => rows.iter().map(|r| r.len()).sum(),
        }
    }

    /// Pick storage by density.
    fn normalized(self) -> Self {
        let total = self.rows * self.cols;
        let want_sparse = total == 0 || (self.nnz() as f64) < SPARSE_DENSITY * total as f64;
        match (&self.storage, want_sparse) {
            (Storage::Dense(_), true) => {
                let rows = self.sparse_rows();
                ScalarMatrix { rows: self.rows, cols: self.cols, storage: Storage::Sparse(rows) }
            }
            (Storage::Sparse(_), false) => {
                let data = self.dense_data();
                ScalarMatrix { rows: self.rows, cols: self.cols, storage: Storage::Dense(data) }
            }
            _ => self,
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        assert!(i < self.rows && j < self.cols, "index out of range");
        match &self.storage {
            Storage::Dense(d) => d[i * self.cols + j].clone(),
            Storage::Sparse(rows) => rows[i].get(j),
        }
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        match &self.storage {
            Storage::Dense(d) => d[i * self.cols..(i + 1) * self.cols].to_vec(),
            Storage::Sparse(rows) => rows[i].to_dense(self.cols),
        }
    }

    pub fn sparse_row(&self, i: usize) -> SparseVec {
        match &self.storage {
            Storage::Dense(d) => SparseVec::from_dense(&d[i * self.cols..(i + 1) * self.cols]),
            Storage::Sparse(rows) => rows[i].clone(),
        }
    }

    pub fn sparse_rows(&self) -> Vec<SparseVec> {
        (0..self.rows).map(|i| self.sparse_row(i)).collect()
    }

    pub fn sparse_cols(&self) -> Vec<SparseVec> {
        self.transpose().sparse_rows()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    fn dense_data(&self) -> Vec<Scalar> {
        match &self.storage {
            Storage::Dense(d) => d.clone(),
            Storage::Sparse(rows) => rows.iter().flat_map(|r| r.to_dense(self.cols)).collect(),
        }
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut out = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            for (j, v) in self.sparse_row(i).iter() {
                out[*j].push((i, v.clone()));
            }
        }
        let rows = out.into_iter().map(SparseVec::from_sorted_pairs).collect();
        Self::from_sparse_rows(self.rows, rows)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let rows = self.sparse_rows().into_iter().map(|r| r.scaled(c)).collect();
        Self::from_sparse_rows(self.cols, rows)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let rows = (0..self.rows)
            .map(|i| {
                let mut r = self.sparse_row(i);
                r.add_scaled(&other.sparse_row(i), &Scalar::one());
                r
            })
            .collect();
        Self::from_sparse_rows(self.cols, rows)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let rhs = other.sparse_rows();
        let rows = (0..self.rows)
            .map(|i| {
                let mut acc = SparseVec::new();
                for (k, v) in self.sparse_row(i).iter() {
                    acc.add_scaled(&rhs[*k], v);
                }
                acc
            })
            .collect();
        Self::from_sparse_rows(other.cols, rows)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "shape mismatch in product");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (j, a) in self.sparse_row(i).iter() {
                    acc += &(a * &v[*j]);
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form by Gauss-Jordan elimination.
    pub fn rref(&self) -> Rref {
        let mut rows = self.sparse_rows();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| !rows[i].get(c).is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = rows[r].get(c).inv().expect("nonzero pivot");
            rows[r] = rows[r].scaled(&inv);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r {
                    let f = row.get(c);
                    if !f.is_zero() {
                        row.add_scaled(&pivot_row, &-f);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { rank: pivots.len(), pivots, reduced: Self::from_sparse_rows(self.cols, rows) }
    }

    pub fn rank(&self) -> usize {
        if self.rows <= self.cols {
            self.rref().rank
        } else {
            self.transpose().rref().rank
        }
    }

    /// Basis of the right null space, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let Rref { pivots, reduced, .. } = self.rref();
        let mut is_pivot = vec![None; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(r);
        }
        (0..self.cols)
            .filter(|&f| is_pivot[f].is_none())
            .map(|f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = -reduced.get(r, f);
                }
                v
            })
            .collect()
    }

    /// Solve `self · x = b`; the particular solution sets every free variable to zero.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Solution>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.rows, found: b.len() });
        }
        let augmented_rows = (0..self.rows)
            .map(|i| {
                let mut r = self.sparse_row(i);
                if !b[i].is_zero() {
                    r.push_back(self.cols, b[i].clone());
                }
                r
            })
            .collect();
        let aug = Self::from_sparse_rows(self.cols + 1, augmented_rows);
        let Rref { pivots, reduced, .. } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut particular = vec![Scalar::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            particular[c] = reduced.get(r, self.cols);
        }
        Ok(Some(Solution { particular, nullspace: self.kernel_basis() }))
    }

    /// Two-sided inverse, or `None` when singular.
    pub fn invert(&self) -> Result<Option<Self>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let rows = (0..n)
            .map(|i| {
                let mut r = self.sparse_row(i);
                r.push_back(n + i, Scalar::one());
                r
            })
            .collect();
        let Rref { rank, pivots, reduced } = Self::from_sparse_rows(2 * n, rows).rref();
        if rank < n || pivots[n - 1] >= n {
            return Ok(None);
        }
        let inv_rows = (0..n)
            .map(|i| {
                let pairs = reduced.sparse_row(i).iter().filter(|(j, _)| *j >= n).map(|(j, v)| (j - n, v.clone())).collect();
                SparseVec::from_sorted_pairs(pairs)
            })
            .collect();
        Ok(Some(Self::from_sparse_rows(n, inv_rows)))
    }

    pub fn determinant(&self) -> Scalar {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut rows = self.to_rows();
        let n = self.rows;
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !rows[i][c].is_zero()) else {
                return Scalar::zero();
            };
            if p != c {
                rows.swap(p, c);
                det = -det;
            }
            let piv = rows[c][c].clone();
            det = &det * &piv;
            let inv = piv.inv().expect("nonzero pivot");
            for i in c + 1..n {
                let f = &rows[i][c] * &inv;
                if !f.is_zero() {
                    for j in c..n {
                        let t = &f * &rows[c][j];
                        rows[i][j] -= &t;
                    }
                }
            }
        }
        det
    }

    /// Row-major exact strings.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.to_rows().into_iter().map(|r| r.into_iter().map(|s| s.to_string()).collect()).collect()
    }
}

impl PartialEq for ScalarMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && (0..self.rows).all(|i| self.sparse_row(i) == other.sparse_row(i))
    }
}

impl Eq for ScalarMatrix {}

impl fmt::Display for ScalarMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_strings().into_iter().map(|r| r.join(", ")).collect();
        write!(f, "[{}]", rows.iter().map(|r| format!("[{r}]")).collect::<Vec<_>>().join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> ScalarMatrix {
        ScalarMatrix::from_i64_rows(rows)
    }

    #[test]
    fn rref_examples() {
        let r = m(&[&[1, 2], &[2, 4]]).rref();
        assert_eq!((r.rank, r.pivots), (1, vec![0]));
        let r = ScalarMatrix::identity(3).rref();
        assert_eq!(r.rank, 3);
        assert_eq!(r.reduced, ScalarMatrix::identity(3));
        let r = m(&[&[0, 1], &[1, 0]]).rref();
        assert_eq!(r.rank, 2);
        assert_eq!(r.reduced, ScalarMatrix::identity(2));
    }

    #[test]
    fn kernel_examples() {
        let k = m(&[&[1, 1]]).kernel_basis();
        assert_eq!(k, vec![vec![Scalar::from_i64(-1), Scalar::one()]]);
        // (−1,1) spans the same line as (1,−1)
        assert!(ScalarMatrix::identity(2).kernel_basis().is_empty());
        assert_eq!(ScalarMatrix::zero(2, 3).kernel_basis().len(), 3);
    }

    #[test]
    fn solve_examples() {
        let s = m(&[&[2]]).solve(&[Scalar::from_i64(4)]).unwrap().unwrap();
        assert_eq!(s.particular, vec![Scalar::from_i64(2)]);
        assert!(s.nullspace.is_empty());
        let s = m(&[&[1, 1]]).solve(&[Scalar::zero()]).unwrap().unwrap();
        assert_eq!(s.particular, vec![Scalar::zero(), Scalar::zero()]);
        assert_eq!(s.nullspace.len(), 1);
        assert!(m(&[&[0]]).solve(&[Scalar::one()]).unwrap().is_none());
        assert!(m(&[&[0]]).solve(&[]).is_err());
    }

    #[test]
    fn invert_examples() {
        let inv = m(&[&[4, 0], &[0, 4]]).invert().unwrap().unwrap();
        assert_eq!(inv, ScalarMatrix::diagonal(&[Scalar::ratio(1, 4), Scalar::ratio(1, 4)]));
        assert_eq!(ScalarMatrix::identity(2).invert().unwrap().unwrap(), ScalarMatrix::identity(2));
        assert!(m(&[&[1, 1], &[1, 1]]).invert().unwrap().is_none());
        assert!(m(&[&[1, 1]]).invert().is_err());
    }

    #[test]
    fn storage_follows_density() {
        assert!(ScalarMatrix::identity(8).is_sparse());
        assert!(!m(&[&[1, 2], &[3, 4]]).is_sparse());
    }

    fn small_matrix() -> impl Strategy<Value = ScalarMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c).prop_map(move |v| {
                ScalarMatrix::from_rows(v.chunks(c).map(|row| row.iter().map(|&x| Scalar::from_i64(x)).collect()).collect())
            })
        })
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(a in small_matrix()) {
            let r = a.rref();
            prop_assert_eq!(r.reduced.rref().reduced, r.reduced.clone());
        }

        #[test]
        fn kernel_vectors_vanish(a in small_matrix()) {
            let k = a.kernel_basis();
            prop_assert_eq!(k.len(), a.cols() - a.rref().rank);
            for v in k {
                prop_assert!(a.mul_vec(&v).iter().all(|s| s.is_zero()));
            }
        }

        #[test]
        fn solve_reproduces_rhs(a in small_matrix(), seed in proptest::collection::vec(-3i64..4, 5)) {
            let x: Vec<Scalar> = (0..a.cols()).map(|i| Scalar::from_i64(seed[i])).collect();
            let b = a.mul_vec(&x);
            let s = a.solve(&b).unwrap().expect("consistent by construction");
            prop_assert_eq!(a.mul_vec(&s.particular), b);
            for v in s.nullspace {
                prop_assert!(a.mul_vec(&v).iter().all(|s| s.is_zero()));
            }
        }

        #[test]
        fn inverse_is_two_sided(a in small_matrix()) {
            if a.is_square() {
                if let Some(inv) = a.invert().unwrap() {
                    prop_assert!(a.mul(&inv).is_identity());
                    prop_assert!(inv.mul(&a).is_identity());
                } else {
                    prop_assert!(a.determinant().is_zero());
                }
            }
        }
    }
}
