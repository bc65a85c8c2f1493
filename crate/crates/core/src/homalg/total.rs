use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ext::ExtAlgebra;
use super::tower::PhiTower;
use super::HomalgError;
use crate::exactla::{Accumulator, Scalar, ScalarMatrix};
use crate::galgebra::{FreeModule, ModuleMap};
use crate::resolution::FreeResolution;

/// `F_φ ⊗_A P`, a free resolution of `_C k` over `C = A ⊗^{τ̄} B`.
///
/// Generators are `e_j ⊗ v` with `e_j ∈ W_p`, `v ∈ V_q`, and
/// `d(e_j ⊗ v) = d_F(e_j) ⊗ v + (−1)^p (e_j * a) ⊗ v'` for `d_P(v) = Σ a v'`.
#[derive(Debug)]
pub struct TotalComplex {
    res: Arc<FreeResolution>,
    /// `labels[n][g] = (p, j, q, v)`
    labels: Vec<Vec<(usize, usize, usize, usize)>>,
    index: Vec<HashMap<(usize, usize, usize, usize), usize>>,
}

impl TotalComplex {
    pub fn resolution(&self) -> &Arc<FreeResolution> {
        &self.res
    }

    pub fn label(&self, n: usize, g: usize) -> (usize, usize, usize, usize) {
        self.labels[n][g]
    }

    /// Generator index of `e_j ⊗ v` with `e_j ∈ W_p`, `v ∈ V_q`.
    pub fn index(&self, p: usize, j: usize, q: usize, v: usize) -> Option<usize> {
        self.index.get(p + q)?.get(&(p, j, q, v)).copied()
    }
}

pub fn total_complex(tower: &PhiTower, pres: &FreeResolution) -> TotalComplex {
    let c = tower.algebra();
    let calg = c.algebra().clone();
    let f = tower.complex();
    let hf = f.top();
    let hp = pres.top();
    let mut labels = Vec::new();
    let mut index = Vec::new();
    let mut modules = Vec::new();
    for n in 0..=hf + hp {
        let mut lab = Vec::new();
        let mut shifts = Vec::new();
        for p in 0..=n.min(hf) {
            let q = n - p;
            if q > hp {
                continue;
            }
            for j in 0..f.shifts(p).len() {
                for v in 0..pres.shifts(q).len() {
                    lab.push((p, j, q, v));
                    shifts.push(f.shifts(p)[j] + pres.shifts(q)[v]);
                }
            }
        }
        index.push(lab.iter().enumerate().map(|(g, l)| (*l, g)).collect::<HashMap<_, _>>());
        labels.push(lab);
        modules.push(FreeModule::new(calg.clone(), shifts));
    }
    let mut differentials = Vec::new();
    for n in 1..modules.len() {
        let src = &modules[n];
        let tgt = &modules[n - 1];
        let mut images = Vec::with_capacity(src.rank());
        for (g, &(p, j, q, v)) in labels[n].iter().enumerate() {
            let s = src.shift(g);
            let off = tgt.offsets(s);
            let mut acc = Accumulator::new(tgt.dim(s).max(1));
            if p >= 1 {
                let d = f.differential(p).unwrap();
                let fp = f.module(p - 1).unwrap();
                let img = d.image_of_generator(j);
                for k in 0..fp.rank() {
                    let t = index[n - 1][&(p - 1, k, q, v)];
                    let coeff = fp.block(f.shifts(p)[j], &img, k);
                    acc.add_scaled(&coeff.map_indices(|i| i + off[t]), &Scalar::one());
                }
            }
            if q >= 1 {
                let sign = if p % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                let d = pres.differential(q).unwrap();
                let pq = pres.module(q - 1).unwrap();
                let img = d.image_of_generator(v);
                let phi = tower.phi(p);
                for vp in 0..pq.rank() {
                    let deg = pres.shifts(q)[v] - pq.shift(vp);
                    let av = pq.block(pres.shifts(q)[v], &img, vp);
                    if av.is_zero() {
                        continue;
                    }
                    let m = phi.apply(deg, &av);
                    for (t, entry) in m[j].iter().enumerate() {
                        if entry.is_zero() {
                            continue;
                        }
                        let target = index[n - 1][&(p, t, q - 1, vp)];
                        acc.add_scaled(&c.iota_a(deg, entry).map_indices(|i| i + off[target]), &sign);
                    }
                }
            }
            images.push(acc.drain());
        }
        differentials.push(ModuleMap::from_images(src.clone(), tgt.clone(), &images));
    }
    let terminated = f.terminated() && pres.terminated();
    let res = FreeResolution::from_parts(calg, modules, differentials, hf + hp, terminated);
    TotalComplex { res: Arc::new(res), labels, index }
}

/// Outcome of the factorization and restriction checks for `E(C) ≅ E(B) ⊗^{τ_E} E(A)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauEReport {
    /// `(n, j, dim E^n(C)_{−j}, convolution)` wherever they differ
    pub factorization_mismatches: Vec<(usize, u32, usize, usize)>,
    pub factorization_checked: usize,
    /// `(g ⊗ 1)(1 ⊗ f) = (−1)^{ij} g ⊗ f`; failures as `(i, g, j, f)` with `g ∈ E^i(B)`
    pub sign_law_failures: Vec<(usize, usize, usize, usize)>,
    pub sign_law_checked: usize,
    /// `(1 ⊗ f)(g ⊗ 1) = g ⊗ (f ∘ det σ|_{A_1})` for `f ∈ E^1(A)`, `g` top in `E(B)`
    pub det_formula_failures: Vec<usize>,
    /// `(1 ⊗ ω)(y_i^* ⊗ 1) = Σ_j hdet_ij y_j^* ⊗ ω`
    pub hdet_formula_failures: Vec<usize>,
    pub boundary_checked: usize,
    /// whether `F_φ ⊗ P` passed the `d∘d`, minimality and exactness checks
    pub total_complex_ok: bool,
}

impl TauEReport {
    pub fn passed(&self) -> bool {
        self.factorization_mismatches.is_empty()
            && self.sign_law_failures.is_empty()
            && self.det_formula_failures.is_empty()
            && self.hdet_formula_failures.is_empty()
            && self.total_complex_ok
    }
}

fn unit(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[i] = Scalar::one();
    v
}

/// Checks, for `E(C)`, `E(A)`, `E(B)` and the invariants `det σ`, `hdet σ`:
/// (i) `E(C)` has the bigraded dimensions of `E(B) ⊗ E(A)`, using a minimal
/// resolution of `C` computed independently; (ii) the sign law between the images of
/// `E(B)` and `E(A)`; (iii) the two boundary formulas, both inside `E(F_φ ⊗ P)`.
///
/// `det_a1` is the degree-one matrix of `det σ` (columns are images), `hdet` is row-indexed.
pub fn tau_e_restrictions(
    ext_c: &ExtAlgebra,
    tower: &PhiTower,
    pres: &FreeResolution,
    det_a1: Option<&ScalarMatrix>,
    hdet: Option<&ScalarMatrix>,
) -> Result<TauEReport, HomalgError> {
    let qres = tower.b_resolution();
    let mut report = TauEReport {
        factorization_mismatches: Vec::new(),
        factorization_checked: 0,
        sign_law_failures: Vec::new(),
        sign_law_checked: 0,
        det_formula_failures: Vec::new(),
        hdet_formula_failures: Vec::new(),
        boundary_checked: 0,
        total_complex_ok: false,
    };
    let bound = ext_c.resolution().bound();
    for n in 0..=ext_c.top() {
        for j in 0..=bound {
            let mut conv = 0;
            for p in 0..=n {
                for jb in 0..=j {
                    conv += qres.betti_number(p, jb) * pres.betti_number(n - p, j - jb);
                }
            }
            let dim = ext_c.bidegree_dim(n, j);
            report.factorization_checked += 1;
            if dim != conv {
                report.factorization_mismatches.push((n, j, dim, conv));
            }
        }
    }

    let t = total_complex(tower, pres);
    let tres = t.resolution();
    report.total_complex_ok = tres.is_complex() && tres.is_minimal() && tres.exactness().failures.is_empty();
    let e = ExtAlgebra::new(tres.clone());
    let hb = qres.top();
    let ha = pres.top();
    for i in 0..=hb {
        for g in 0..qres.shifts(i).len() {
            for j in 0..=ha {
                for f in 0..pres.shifts(j).len() {
                    let x = unit(e.dim(i), t.index(i, g, 0, 0).unwrap());
                    let y = unit(e.dim(j), t.index(0, 0, j, f).unwrap());
                    let prod = e.product(i, &x, j, &y)?;
                    let mut want = vec![Scalar::zero(); e.dim(i + j)];
                    want[t.index(i, g, j, f).unwrap()] = if (i * j) % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                    report.sign_law_checked += 1;
                    if prod != want {
                        report.sign_law_failures.push((i, g, j, f));
                    }
                }
            }
        }
    }

    let b_regular = qres.terminated() && qres.shifts(hb).len() == 1;
    let a_regular = pres.terminated() && pres.shifts(ha).len() == 1;
    if let (Some(det), true) = (det_a1, b_regular && ha >= 1) {
        // (1 ⊗ f_a)(g ⊗ 1) = Σ_c det[a][c] g ⊗ f_c, with u_c = d_1(v_c) = x_c
        for a in 0..pres.shifts(1).len() {
            let x = unit(e.dim(1), t.index(0, 0, 1, a).unwrap());
            let y = unit(e.dim(hb), t.index(hb, 0, 0, 0).unwrap());
            let prod = e.product(1, &x, hb, &y)?;
            let mut want = vec![Scalar::zero(); e.dim(hb + 1)];
            for c in 0..pres.shifts(1).len() {
                want[t.index(hb, 0, 1, c).unwrap()] = det.get(a, c);
            }
            report.boundary_checked += 1;
            if prod != want {
                report.det_formula_failures.push(a);
            }
        }
    }
    if let (Some(h), true) = (hdet, a_regular && hb >= 1) {
        for i in 0..qres.shifts(1).len() {
            let x = unit(e.dim(ha), t.index(0, 0, ha, 0).unwrap());
            let y = unit(e.dim(1), t.index(1, i, 0, 0).unwrap());
            let prod = e.product(ha, &x, 1, &y)?;
            let mut want = vec![Scalar::zero(); e.dim(ha + 1)];
            for j in 0..qres.shifts(1).len() {
                want[t.index(1, j, ha, 0).unwrap()] = h.get(i, j);
            }
            report.boundary_checked += 1;
            if prod != want {
                report.hdet_formula_failures.push(i);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::{build_phi_tower, det_sigma, hdet};
    use crate::resolution::minimal_resolution;
    use crate::twist::{build_twisted_tensor, example53};

    #[test]
    fn example53_tau_e() {
        let data = example53(8, 1);
        let q = Arc::new(minimal_resolution(data.b().clone(), 6).unwrap());
        let pres = minimal_resolution(data.a().clone(), 6).unwrap();
        let tower = build_phi_tower(&data, q, 8).unwrap();
        let det = det_sigma(&tower).unwrap().degree_one_matrix();
        let h = hdet(data.sigma(), &pres).unwrap();
        let c = build_twisted_tensor(&data, 8).unwrap();
        let ext_c = ExtAlgebra::new(Arc::new(minimal_resolution(c.algebra().clone(), 6).unwrap()));
        assert_eq!(ext_c.dims(), vec![1, 4, 8, 10, 8, 4, 1]);
        let r = tau_e_restrictions(&ext_c, &tower, &pres, Some(&det), Some(&h)).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
