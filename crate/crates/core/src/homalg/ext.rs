use std::sync::{Arc, OnceLock};

use super::HomalgError;
use crate::exactla::{Scalar, ScalarMatrix};
use crate::resolution::{lift_map, ChainMap, FreeResolution, LiftChoice, ResolutionError};

type LiftCell = OnceLock<Result<ChainMap, ResolutionError>>;

/// `E(A) = ⊕ Ext^i(k, k)` with basis dual to the generators of the minimal resolution.
///
/// The Yoneda product is `x·y = x ∘ ỹ_i` where `ỹ: P → P[j]` lifts `y ∈ E^j`.
#[derive(Debug)]
pub struct ExtAlgebra {
    res: Arc<FreeResolution>,
    minimal: Vec<Vec<LiftCell>>,
    perturbed: Vec<Vec<LiftCell>>,
}

fn cells(res: &FreeResolution) -> Vec<Vec<LiftCell>> {
    res.modules().iter().map(|m| (0..m.rank()).map(|_| OnceLock::new()).collect()).collect()
}

impl ExtAlgebra {
    pub fn new(res: Arc<FreeResolution>) -> Self {
        let minimal = cells(&res);
        let perturbed = cells(&res);
        ExtAlgebra { res, minimal, perturbed }
    }

    pub fn resolution(&self) -> &Arc<FreeResolution> {
        &self.res
    }

    /// Highest computed homological degree.
    pub fn top(&self) -> usize {
        self.res.top()
    }

    /// `dim E^i`.
    pub fn dim(&self, i: usize) -> usize {
        self.res.shifts(i).len()
    }

    /// `dim E^i_{−j}`.
    pub fn bidegree_dim(&self, i: usize, j: u32) -> usize {
        self.res.betti_number(i, j)
    }

    /// Internal degree `j` of basis element `a` of `E^i` (it lives in `E^i_{−j}`).
    pub fn shift(&self, i: usize, a: usize) -> u32 {
        self.res.shifts(i)[a]
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.top()).map(|i| self.dim(i)).collect()
    }

    /// The chain lift of the basis element `b ∈ E^j`.
    pub fn lift(&self, j: usize, b: usize, choice: LiftChoice) -> Result<&ChainMap, ResolutionError> {
        let cells = match choice {
            LiftChoice::Minimal => &self.minimal,
            LiftChoice::Perturbed => &self.perturbed,
        };
        let cell = cells.get(j).and_then(|c| c.get(b)).ok_or(ResolutionError::Exhausted { position: j })?;
        cell.get_or_init(|| {
            let mut values = vec![Scalar::zero(); self.dim(j)];
            values[b] = Scalar::one();
            lift_map(&self.res, &self.res, j, self.shift(j, b), &values, self.top() - j, choice)
        })
        .as_ref()
        .map_err(Clone::clone)
    }

    /// `e_a · e_b` for `e_a ∈ E^i`, `e_b ∈ E^j`, as coordinates in `E^{i+j}`.
    pub fn product_basis(&self, i: usize, a: usize, j: usize, b: usize, choice: LiftChoice) -> Result<Vec<Scalar>, ResolutionError> {
        if i + j > self.top() {
            if self.res.terminated() {
                return Ok(Vec::new());
            }
            return Err(ResolutionError::Exhausted { position: i + j });
        }
        let lift = self.lift(j, b, choice)?;
        let target = &self.res.shifts(i + j);
        Ok((0..target.len()).map(|g| lift.constant_coefficient(&self.res, i, g, target[g], a)).collect())
    }

    /// Product of arbitrary elements given by coordinates.
    pub fn product(&self, i: usize, x: &[Scalar], j: usize, y: &[Scalar]) -> Result<Vec<Scalar>, ResolutionError> {
        let mut out = vec![Scalar::zero(); if i + j <= self.top() { self.dim(i + j) } else { 0 }];
        for (a, xa) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (b, yb) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let p = self.product_basis(i, a, j, b, LiftChoice::Minimal)?;
                let c = xa * yb;
                for (o, v) in out.iter_mut().zip(p) {
                    *o += &(&c * &v);
                }
            }
        }
        Ok(out)
    }

    /// `(ab)c = a(bc)` on every basis triple of total degree at most the top.
    /// Returns the number of triples checked, or the first failing one.
    pub fn check_associativity(&self) -> Result<usize, (usize, usize, usize, usize, usize, usize)> {
        let h = self.top();
        let mut count = 0;
        let unit = |i: usize, a: usize| -> Vec<Scalar> {
            let mut v = vec![Scalar::zero(); self.dim(i)];
            v[a] = Scalar::one();
            v
        };
        for i in 0..=h {
            for j in 0..=h - i {
                for k in 0..=h - i - j {
                    for a in 0..self.dim(i) {
                        for b in 0..self.dim(j) {
                            let ab = self.product(i, &unit(i, a), j, &unit(j, b)).map_err(|_| (i, a, j, b, k, 0))?;
                            for c in 0..self.dim(k) {
                                let bc = self.product(j, &unit(j, b), k, &unit(k, c)).map_err(|_| (i, a, j, b, k, c))?;
                                let left = self.product(i + j, &ab, k, &unit(k, c)).map_err(|_| (i, a, j, b, k, c))?;
                                let right = self.product(i, &unit(i, a), j + k, &bc).map_err(|_| (i, a, j, b, k, c))?;
                                if left != right {
                                    return Err((i, a, j, b, k, c));
                                }
                                count += 1;
                            }
                        }
                    }
                }
            }
        }
        Ok(count)
    }

    /// Every structure constant agrees between the minimal and perturbed lift choices.
    pub fn check_choice_independence(&self) -> Result<usize, (usize, usize, usize, usize)> {
        let h = self.top();
        let mut count = 0;
        for i in 0..=h {
            for j in 0..=h - i {
                for a in 0..self.dim(i) {
                    for b in 0..self.dim(j) {
                        let m = self.product_basis(i, a, j, b, LiftChoice::Minimal);
                        let p = self.product_basis(i, a, j, b, LiftChoice::Perturbed);
                        match (m, p) {
                            (Ok(m), Ok(p)) if m == p => count += 1,
                            _ => return Err((i, a, j, b)),
                        }
                    }
                }
            }
        }
        Ok(count)
    }
}

/// The pairing `⟨a, b⟩ = coefficient of a·b on the top class` and the Nakayama
/// automorphism of `E`, defined by `⟨a, b⟩ = (−1)^{i(h−i)} ⟨μ(b), a⟩` for `a ∈ E^i`.
#[derive(Debug)]
pub struct FrobeniusData {
    ext: ExtAlgebra,
    h: usize,
    l: u32,
    /// `forms[i][a][b] = ⟨e_a, e_b⟩`, `e_a ∈ E^i`, `e_b ∈ E^{h−i}`
    forms: Vec<ScalarMatrix>,
    /// `nakayama[k]`: `μ(e_b) = Σ_c U[c][b] e_c` on `E^k`
    nakayama: Vec<ScalarMatrix>,
}

fn sign(e: usize) -> Scalar {
    if e.is_multiple_of(2) {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

pub fn frobenius_data(ext: ExtAlgebra) -> Result<FrobeniusData, HomalgError> {
    let res = ext.resolution().clone();
    if !res.terminated() {
        return Err(HomalgError::NotRegular("the resolution does not terminate within bounds".into()));
    }
    let h = ext.top();
    if ext.dim(h) != 1 {
        return Err(HomalgError::NotRegular(format!("dim E^{h} = {}", ext.dim(h))));
    }
    let l = ext.shift(h, 0);
    let mut forms = Vec::with_capacity(h + 1);
    for i in 0..=h {
        if ext.dim(i) != ext.dim(h - i) {
            return Err(HomalgError::Degenerate { position: i });
        }
        let mut rows = vec![vec![Scalar::zero(); ext.dim(h - i)]; ext.dim(i)];
        for (a, row) in rows.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                let p = ext.product_basis(i, a, h - i, b, LiftChoice::Minimal)?;
                *entry = p[0].clone();
            }
        }
        forms.push(ScalarMatrix::from_rows(rows));
    }
    let mut nakayama = Vec::with_capacity(h + 1);
    for k in 0..=h {
        let inv = forms[k]
            .transpose()
            .invert()
            .map_err(|e| HomalgError::Shape(e.to_string()))?
            .ok_or(HomalgError::Degenerate { position: k })?;
        nakayama.push(inv.mul(&forms[h - k]).scale(&sign(k * (h - k))));
    }
    Ok(FrobeniusData { ext, h, l, forms, nakayama })
}

impl FrobeniusData {
    pub fn ext(&self) -> &ExtAlgebra {
        &self.ext
    }

    /// `(h, l)`: top homological degree and the internal degree of the top class.
    pub fn top(&self) -> (usize, u32) {
        (self.h, self.l)
    }

    pub fn form(&self, i: usize) -> &ScalarMatrix {
        &self.forms[i]
    }

    pub fn pairing(&self, i: usize, a: usize, b: usize) -> Scalar {
        self.forms[i].get(a, b)
    }

    /// Matrix of `μ_E` on `E^k`, columns are images of basis elements.
    pub fn nakayama(&self, k: usize) -> &ScalarMatrix {
        &self.nakayama[k]
    }

    /// Verify `⟨a, b⟩ = (−1)^{i(h−i)} ⟨μ(b), a⟩` on all basis pairs.
    pub fn check_relation(&self) -> Result<usize, (usize, usize, usize)> {
        let h = self.h;
        let mut count = 0;
        for i in 0..=h {
            let s = sign(i * (h - i));
            let u = &self.nakayama[h - i];
            for a in 0..self.ext.dim(i) {
                for b in 0..self.ext.dim(h - i) {
                    let mut rhs = Scalar::zero();
                    for c in 0..self.ext.dim(h - i) {
                        rhs += &(&u.get(c, b) * &self.forms[h - i].get(c, a));
                    }
                    if self.forms[i].get(a, b) != &s * &rhs {
                        return Err((i, a, b));
                    }
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// `μ_E` preserves internal degree: `U[c][b] = 0` unless both have the same shift.
    pub fn is_bigraded(&self) -> bool {
        (0..=self.h).all(|k| {
            let u = &self.nakayama[k];
            (0..u.rows()).all(|c| (0..u.cols()).all(|b| u.get(c, b).is_zero() || self.ext.shift(k, c) == self.ext.shift(k, b)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galgebra::GradedAlgebra;
    use crate::freealg::{parse_expr, Alphabet, NcPoly};
    use crate::resolution::minimal_resolution;

    fn ext_of(names: &[&str], rels: &[&str], d: u32, h: usize) -> ExtAlgebra {
        let a = Alphabet::linear(names).unwrap();
        let rels: Vec<NcPoly> = rels.iter().map(|r| parse_expr(r, &a).unwrap()).collect();
        let alg = Arc::new(GradedAlgebra::new(&a, &rels, d).unwrap());
        ExtAlgebra::new(Arc::new(minimal_resolution(alg, h).unwrap()))
    }

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::from_i64(x)).collect()
    }

    #[test]
    fn polynomial_plane_has_exterior_ext() {
        let e = ext_of(&["x", "y"], &["y*x - x*y"], 5, 3);
        assert_eq!(e.dims(), vec![1, 2, 1]);
        let x = v(&[1, 0]);
        let y = v(&[0, 1]);
        assert_eq!(e.product(1, &x, 1, &x).unwrap(), v(&[0]));
        assert_eq!(e.product(1, &y, 1, &y).unwrap(), v(&[0]));
        let xy = e.product(1, &x, 1, &y).unwrap();
        let yx = e.product(1, &y, 1, &x).unwrap();
        assert!(!xy[0].is_zero());
        assert_eq!(xy[0], -yx[0].clone());
        let f = frobenius_data(e).unwrap();
        assert!(f.nakayama(1).is_identity());
        assert_eq!(f.check_relation(), Ok(6));
    }

    #[test]
    fn polynomial_line() {
        let e = ext_of(&["x"], &[], 4, 3);
        assert_eq!(e.dims(), vec![1, 1]);
        assert_eq!(e.product(1, &v(&[1]), 1, &v(&[1])).unwrap(), Vec::<Scalar>::new());
        let f = frobenius_data(e).unwrap();
        assert!(f.nakayama(1).is_identity() && f.nakayama(0).is_identity());
    }

    #[test]
    fn example_algebra_ext() {
        let e = ext_of(&["x1", "x2"], &["x1*x1*x2 - x2*x1*x1", "x1*x2*x2 - x2*x2*x1"], 6, 4);
        assert_eq!(e.dims(), vec![1, 2, 2, 1]);
        assert!(e.check_associativity().is_ok());
        assert!(e.check_choice_independence().is_ok());
        let f = frobenius_data(e).unwrap();
        assert_eq!(f.top(), (3, 4));
        assert_eq!(f.nakayama(1), &ScalarMatrix::identity(2).scale(&Scalar::from_i64(-1)));
        assert!(f.check_relation().is_ok());
        assert!(f.is_bigraded());
    }
}
