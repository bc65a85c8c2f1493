use std::sync::Arc;

use super::HomalgError;
use crate::exactla::{Accumulator, ColumnEchelon, Scalar, ScalarMatrix, SparseVec};
use crate::galgebra::{FreeModule, ModuleMap};
use crate::nakayama::GradedAutomorphism;
use crate::resolution::{lift_twisted_projection, FreeResolution};
use crate::twist::{build_twisted_tensor, MatrixAlgebraHom, TwistData, TwistedRightAction, TwistedTensorAlgebra};

/// The resolution `F_φ` of `_C A_A`: terms `(C ⊗ W_i)^{φ_i}` with `W_i` from the
/// resolution of `_B k`, and matrix homomorphisms `φ_0 = id`, `φ_1 = σ`, `φ_2`, ….
///
/// All of it lives over the associated algebra `A ⊗^{τ̄} B`, `τ̄ = (σ, 0)`.
#[derive(Debug)]
pub struct PhiTower {
    c: Arc<TwistedTensorAlgebra>,
    qres: Arc<FreeResolution>,
    phis: Vec<Arc<MatrixAlgebraHom>>,
    unique: Vec<bool>,
    complex: FreeResolution,
}

/// Solve `d_F(e_j * x) = d_F(e_j) * x` for `φ_i`, position by position.
pub fn build_phi_tower(data: &TwistData, qres: Arc<FreeResolution>, bound: u32) -> Result<PhiTower, HomalgError> {
    let purity = qres.is_pure();
    if let Some(position) = purity.witness {
        return Err(HomalgError::NotPure { position });
    }
    let a = data.a().clone();
    let b = data.b().clone();
    let c = Arc::new(build_twisted_tensor(&data.associated(), bound)?);
    let calg = c.algebra().clone();
    let m = b.ngens();
    if qres.top() >= 1 {
        let d1 = qres.differential(1).unwrap();
        let ok = d1.source().rank() == m
            && (0..m).all(|j| d1.entry(0, j) == &b.generator(j) && d1.source().shift(j) == b.alphabet().degree(j));
        if !ok {
            return Err(HomalgError::FirstDifferential);
        }
    }
    let mut phis = vec![Arc::new(MatrixAlgebraHom::diagonal(a.clone(), 1))];
    let mut unique = vec![true];
    if qres.top() >= 1 {
        phis.push(data.sigma().clone());
        unique.push(true);
    }
    for i in 2..=qres.top() {
        let d = qres.differential(i).unwrap();
        let wi = qres.module(i).unwrap();
        let wprev = qres.module(i - 1).unwrap();
        let e = wi.shift(0) - wprev.shift(0);
        let prev = phis[i - 1].clone();
        // b_pq as coordinates in B_e
        let bq: Vec<Vec<SparseVec>> = (0..wi.rank()).map(|p| (0..wprev.rank()).map(|q| b.coords(d.entry(q, p))).collect()).collect();
        let mut images = Vec::with_capacity(a.ngens());
        let mut all_unique = true;
        for x in 0..a.ngens() {
            let dx = a.alphabet().degree(x);
            if dx + e > bound {
                return Err(HomalgError::Shape(format!("bound {bound} is too small for φ_{i}")));
            }
            let na = a.dim(dx as i64);
            let nc = calg.dim((dx + e) as i64);
            let nq = wprev.rank();
            let mut ech = ColumnEchelon::new(nq * nc);
            for bp in &bq {
                for ka in 0..na {
                    let mut col = Accumulator::new(nq * nc);
                    for (q, bpq) in bp.iter().enumerate() {
                        col.add_scaled(&c.tensor(dx, &SparseVec::unit(ka), e, bpq).map_indices(|r| r + q * nc), &Scalar::one());
                    }
                    ech.push(&col.drain());
                }
            }
            all_unique &= ech.kernel().is_empty();
            let prev_x = prev.image_coords(x);
            let mut rows = Vec::with_capacity(wi.rank());
            for bj in &bq {
                let mut rhs = Accumulator::new(nq * nc);
                for q in 0..nq {
                    for (k, bjk) in bj.iter().enumerate() {
                        let phi = &prev_x[k][q];
                        if bjk.is_zero() || phi.is_zero() {
                            continue;
                        }
                        let prod = calg.mul(e, &c.iota_b(e, bjk), dx, &c.iota_a(dx, phi));
                        rhs.add_scaled(&prod.map_indices(|r| r + q * nc), &Scalar::one());
                    }
                }
                let sol = ech.solve(&rhs.drain()).ok_or(HomalgError::Inconsistent { position: i, generator: x })?;
                let row = (0..wi.rank())
                    .map(|p| {
                        let coords = SparseVec::from_pairs(
                            sol.iter().filter(|(r, _)| r / na == p).map(|(r, v)| (r % na, v.clone())).collect(),
                        );
                        a.poly(dx, &coords)
                    })
                    .collect();
                rows.push(row);
            }
            images.push(rows);
        }
        let phi = MatrixAlgebraHom::new(a.clone(), images)?;
        phi.validate().map_err(|v| HomalgError::Twist(v.into()))?;
        phis.push(Arc::new(phi));
        unique.push(all_unique);
    }
    let complex = f_complex(&c, &qres);
    Ok(PhiTower { c, qres, phis, unique, complex })
}

/// `C ⊗ W_•` with the differential of the resolution of `_B k` pushed into `C`.
fn f_complex(c: &TwistedTensorAlgebra, qres: &FreeResolution) -> FreeResolution {
    let calg = c.algebra().clone();
    let b = c.data().b();
    let modules: Vec<FreeModule> = qres.modules().iter().map(|w| FreeModule::new(calg.clone(), w.shifts().to_vec())).collect();
    let mut differentials = Vec::new();
    for i in 1..modules.len() {
        let d = qres.differential(i).unwrap();
        let entries = (0..modules[i - 1].rank())
            .map(|q| {
                (0..modules[i].rank())
                    .map(|p| {
                        let e = d.entry(q, p);
                        calg.poly(e.degree(), &c.iota_b(e.degree(), &b.coords(e)))
                    })
                    .collect()
            })
            .collect();
        differentials.push(ModuleMap::new(modules[i].clone(), modules[i - 1].clone(), entries).expect("homogeneous entries"));
    }
    FreeResolution::from_parts(calg, modules, differentials, qres.h_bound(), qres.terminated())
}

impl PhiTower {
    /// The associated algebra `A ⊗^{τ̄} B` the tower lives over.
    pub fn algebra(&self) -> &Arc<TwistedTensorAlgebra> {
        &self.c
    }

    pub fn b_resolution(&self) -> &Arc<FreeResolution> {
        &self.qres
    }

    pub fn phi(&self, i: usize) -> &Arc<MatrixAlgebraHom> {
        &self.phis[i]
    }

    pub fn phis(&self) -> &[Arc<MatrixAlgebraHom>] {
        &self.phis
    }

    pub fn len(&self) -> usize {
        self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phis.is_empty()
    }

    /// Sizes `s_i` of the `φ_i`.
    pub fn sizes(&self) -> Vec<usize> {
        self.phis.iter().map(|p| p.size()).collect()
    }

    /// Whether the linear system for `φ_i` had a unique solution.
    pub fn unique(&self, i: usize) -> bool {
        self.unique[i]
    }

    /// `F_φ` as a complex of free left modules.
    pub fn complex(&self) -> &FreeResolution {
        &self.complex
    }

    pub fn action(&self, i: usize) -> TwistedRightAction {
        TwistedRightAction::new(self.complex.module(i).unwrap().clone(), self.phis[i].clone()).expect("matching ranks")
    }

    /// `d(e_g * x) = d(e_g) * x` for every generator `e_g` of every term and every generator `x` of `A`.
    pub fn check_right_linearity(&self) -> Result<usize, (usize, usize, usize)> {
        let a = self.c.data().a();
        let mut count = 0;
        for i in 1..self.phis.len() {
            let here = self.action(i);
            let there = self.action(i - 1);
            let d = self.complex.differential(i).unwrap();
            let module = self.complex.module(i).unwrap();
            for g in 0..module.rank() {
                let s = module.shift(g);
                let eg = module.generator(g);
                let deg = d.image_of_generator(g);
                for x in 0..a.ngens() {
                    let dx = a.alphabet().degree(x);
                    if s + dx > self.c.bound() {
                        continue;
                    }
                    let xc = a.coords(&a.generator(x));
                    let left = d.apply(s + dx, &here.act(s, &eg, dx, &xc));
                    let right = there.act(s, &deg, dx, &xc);
                    if left != right {
                        return Err((i, g, x));
                    }
                    count += 1;
                }
            }
        }
        Ok(count)
    }
}

/// `det σ = φ_{h_B}` as an automorphism of `A`.
pub fn det_sigma(tower: &PhiTower) -> Result<GradedAutomorphism, HomalgError> {
    let q = tower.b_resolution();
    if !q.terminated() || q.shifts(q.top()).len() != 1 {
        return Err(HomalgError::NotRegular(format!("B has top Betti number {} at position {}", q.shifts(q.top()).len(), q.top())));
    }
    let top = tower.phi(q.top());
    let images = top.images().iter().map(|m| m[0][0].clone()).collect();
    GradedAutomorphism::new(top.source().clone(), images).map_err(|e| HomalgError::NotRegular(e.to_string()))
}

/// `hdet σ`, row `i` read off the lift of the `i`-th coordinate projection
/// `^φ(P ⊗ U) → P` at the top of the resolution of `_A k`.
pub fn hdet(sigma: &MatrixAlgebraHom, pres: &FreeResolution) -> Result<ScalarMatrix, HomalgError> {
    if !pres.terminated() || pres.shifts(pres.top()).len() != 1 {
        return Err(HomalgError::NotRegular("the resolution of A does not end in rank one within bounds".into()));
    }
    let h = pres.top();
    let l = pres.shifts(h)[0];
    let top = pres.module(h).unwrap();
    let m = sigma.size();
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let theta = lift_twisted_projection(pres, sigma, i, h)?;
        rows.push((0..m).map(|j| top.block(l, &theta.components[h][j], 0).get(0)).collect());
    }
    let mat = ScalarMatrix::from_rows(rows);
    if mat.determinant().is_zero() {
        return Err(HomalgError::NotRegular("hdet is singular".into()));
    }
    Ok(mat)
}
