//! Free modules with a right action twisted by a matrix-valued homomorphism.

use std::sync::Arc;

use super::hom::MatrixAlgebraHom;
use super::TwistError;
use crate::exactla::{Accumulator, Scalar, SparseVec};
use crate::galgebra::FreeModule;

/// `M = ⊕_j R(−s) e_j` with `(r e_j) * a = Σ_t r·φ_jt(a) e_t`.
///
/// The ring `R` of the module must contain `A` on its first generators, with the
/// relations of `A` among its own (true for `A` itself and for `A ⊗^τ B`).
#[derive(Clone, Debug)]
pub struct TwistedRightAction {
    module: FreeModule,
    phi: Arc<MatrixAlgebraHom>,
}

impl TwistedRightAction {
    pub fn new(module: FreeModule, phi: Arc<MatrixAlgebraHom>) -> Result<Self, TwistError> {
        if module.rank() != phi.size() {
            return Err(TwistError::Shape(format!("module of rank {} with a {}×{} twist", module.rank(), phi.size(), phi.size())));
        }
        if module.shifts().windows(2).any(|w| w[0] != w[1]) {
            return Err(TwistError::Shape("twisted modules need equal shifts".into()));
        }
        let r = module.algebra().alphabet();
        let a = phi.source().alphabet();
        if a.len() > r.len() || (0..a.len()).any(|i| a.name(i) != r.name(i) || a.degree(i) != r.degree(i)) {
            return Err(TwistError::Shape("the module ring does not extend A".into()));
        }
        Ok(TwistedRightAction { module, phi })
    }

    pub fn module(&self) -> &FreeModule {
        &self.module
    }

    pub fn phi(&self) -> &Arc<MatrixAlgebraHom> {
        &self.phi
    }

    /// `v * a` for `v` of degree `t` and `a ∈ A_d`.
    pub fn act(&self, t: u32, v: &SparseVec, d: u32, a: &SparseVec) -> SparseVec {
        let r = self.module.algebra();
        let alg_a = self.phi.source();
        let phi_a = self.phi.apply(d, a);
        let embedded: Vec<Vec<SparseVec>> =
            phi_a.iter().map(|row| row.iter().map(|e| r.coords(&alg_a.poly(d, e))).collect()).collect();
        let s = self.module.shifts().first().copied().unwrap_or(0);
        let mut parts: Vec<Accumulator> = (0..self.module.rank()).map(|_| Accumulator::new(r.dim((t + d) as i64 - s as i64).max(1))).collect();
        if t < s {
            return SparseVec::new();
        }
        for j in 0..self.module.rank() {
            let coeff = self.module.block(t, v, j);
            if coeff.is_zero() {
                continue;
            }
            for (k, e) in embedded[j].iter().enumerate() {
                if !e.is_zero() {
                    parts[k].add_scaled(&r.mul(t - s, &coeff, d, e), &Scalar::one());
                }
            }
        }
        let polys: Vec<_> = parts.iter_mut().map(|p| r.poly(t + d - s, &p.drain())).collect();
        self.module.element(t + d, &polys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::ScalarMatrix;
    use crate::freealg::{parse_expr, Alphabet, NcPoly};
    use crate::galgebra::GradedAlgebra;
    use proptest::prelude::*;

    fn setup() -> TwistedRightAction {
        let alph = Alphabet::linear(&["x1", "x2"]).unwrap();
        let rels: Vec<NcPoly> =
            ["x1*x1*x2 - x2*x1*x1", "x1*x2*x2 - x2*x2*x1"].iter().map(|r| parse_expr(r, &alph).unwrap()).collect();
        let a = Arc::new(GradedAlgebra::new(&alph, &rels, 6).unwrap());
        let m = ScalarMatrix::from_i64_rows(&[&[1, 1], &[1, -1]]);
        let g = |i: usize| a.generator(i);
        let img = |p: NcPoly| (0..2).map(|j| (0..2).map(|t| p.scale(&m.get(j, t))).collect()).collect();
        let phi = Arc::new(MatrixAlgebraHom::new(a.clone(), vec![img(g(1)), img(g(0))]).unwrap());
        TwistedRightAction::new(FreeModule::new(a, vec![1, 1]), phi).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn action_is_associative(v in proptest::collection::vec(-2i64..3, 4), a in proptest::collection::vec(-2i64..3, 2), b in proptest::collection::vec(-2i64..3, 4)) {
            let act = setup();
            let alg = act.module().algebra().clone();
            let v = SparseVec::from_dense(&v.into_iter().map(Scalar::from_i64).collect::<Vec<_>>());
            let a = SparseVec::from_dense(&a.into_iter().map(Scalar::from_i64).collect::<Vec<_>>());
            let b = SparseVec::from_dense(&b.into_iter().map(Scalar::from_i64).collect::<Vec<_>>());
            let lhs = act.act(3, &act.act(2, &v, 1, &a), 2, &b);
            let rhs = act.act(2, &v, 3, &alg.mul(1, &a, 2, &b));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
