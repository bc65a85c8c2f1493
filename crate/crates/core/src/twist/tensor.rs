//! The presented algebra `C = A ⊗^τ B` and the inverse twist.

use std::collections::HashMap;
use std::sync::Arc;

use super::hom::{invert_sigma, MatrixAlgebraHom, SigmaDerivation};
use super::TwistError;
use crate::exactla::{Accumulator, Scalar, SparseVec};
use crate::freealg::{Alphabet, NcPoly, Word};
use crate::galgebra::GradedAlgebra;

/// Twisting data `τ = (σ, δ)` with `τ(y_j ⊗ a) = Σ_t σ_jt(a) ⊗ y_t + δ_j(a) ⊗ 1`.
#[derive(Clone, Debug)]
pub struct TwistData {
    a: Arc<GradedAlgebra>,
    b: Arc<GradedAlgebra>,
    sigma: Arc<MatrixAlgebraHom>,
    delta: Option<Arc<SigmaDerivation>>,
}

impl TwistData {
    pub fn new(
        a: Arc<GradedAlgebra>,
        b: Arc<GradedAlgebra>,
        sigma: Arc<MatrixAlgebraHom>,
        delta: Option<Arc<SigmaDerivation>>,
    ) -> Result<Self, TwistError> {
        if !Arc::ptr_eq(sigma.source(), &a) {
            return Err(TwistError::Shape("σ is not defined on A".into()));
        }
        if sigma.size() != b.ngens() {
            return Err(TwistError::Shape(format!("σ has size {} but B has {} generators", sigma.size(), b.ngens())));
        }
        for x in 0..a.ngens() {
            for j in 0..b.ngens() {
                for t in 0..b.ngens() {
                    if !sigma.image(x)[j][t].is_zero() && b.alphabet().degree(j) != b.alphabet().degree(t) {
                        return Err(TwistError::Shape(format!("σ_({j},{t}) links generators of B of different degrees")));
                    }
                }
            }
        }
        let delta = delta.filter(|d| !d.is_zero());
        if let Some(d) = &delta {
            if !Arc::ptr_eq(d.sigma(), &sigma) || d.shifts() != b.alphabet().degrees() {
                return Err(TwistError::Shape("δ does not match σ and the generator degrees of B".into()));
            }
        }
        Ok(TwistData { a, b, sigma, delta })
    }

    pub fn a(&self) -> &Arc<GradedAlgebra> {
        &self.a
    }

    pub fn b(&self) -> &Arc<GradedAlgebra> {
        &self.b
    }

    pub fn sigma(&self) -> &Arc<MatrixAlgebraHom> {
        &self.sigma
    }

    pub fn delta(&self) -> Option<&Arc<SigmaDerivation>> {
        self.delta.as_ref()
    }

    pub fn has_delta(&self) -> bool {
        self.delta.is_some()
    }

    /// `τ̄ = (σ, 0)`.
    pub fn associated(&self) -> TwistData {
        TwistData { delta: None, ..self.clone() }
    }

    /// Generators `X ∪ Y` and relations `G_A ∪ G_B ∪ {y_j x_i − Σ_t σ_jt(x_i) y_t − δ_j(x_i)}`.
    pub fn presentation(&self) -> Result<(Alphabet, Vec<NcPoly>), TwistError> {
        let n = self.a.ngens();
        let alph = self.a.alphabet().concat(self.b.alphabet()).map_err(TwistError::Alphabet)?;
        let shift: Vec<usize> = (0..self.b.ngens()).map(|j| n + j).collect();
        let mut rels: Vec<NcPoly> = self.a.relations().to_vec();
        rels.extend(self.b.relations().iter().map(|g| g.relabel(&shift)));
        for j in 0..self.b.ngens() {
            let dy = self.b.alphabet().degree(j);
            for i in 0..n {
                let dx = self.a.alphabet().degree(i);
                let mut g = NcPoly::monomial(Word::from_letters(&[n + j, i]), Scalar::one(), dx + dy);
                for t in 0..self.b.ngens() {
                    let s = &self.sigma.image(i)[j][t];
                    if !s.is_zero() {
                        g = g.sub(&s.mul(&NcPoly::monomial(Word::letter(n + t), Scalar::one(), dy)));
                    }
                }
                if let Some(d) = &self.delta {
                    g = g.sub(&d.images()[i][j]);
                }
                rels.push(g);
            }
        }
        Ok((alph, rels))
    }
}

/// `C = A ⊗^τ B` with its bigraded basis `{a·b}`.
#[derive(Debug)]
pub struct TwistedTensorAlgebra {
    data: TwistData,
    c: Arc<GradedAlgebra>,
    /// per degree of `C`: basis index ↦ (deg of A part, A index, B index)
    split: Vec<Vec<(u32, usize, usize)>>,
    join: Vec<HashMap<(u32, usize, usize), usize>>,
}

/// `Σ_{p+q=d} dim A_p · dim B_q`.
pub fn convolution(a: &[usize], b: &[usize], bound: u32) -> Vec<usize> {
    (0..=bound as usize)
        .map(|d| (0..=d).map(|p| a.get(p).copied().unwrap_or(0) * b.get(d - p).copied().unwrap_or(0)).sum())
        .collect()
}

/// Build `C` through degree `bound` and certify the twisting property by Hilbert-series
/// factorization and basis transport.
pub fn build_twisted_tensor(data: &TwistData, bound: u32) -> Result<TwistedTensorAlgebra, TwistError> {
    for alg in [&data.a, &data.b] {
        if alg.bound() < bound {
            return Err(TwistError::Bound { needed: bound, bound: alg.bound() });
        }
    }
    let (alph, rels) = data.presentation()?;
    let c = Arc::new(GradedAlgebra::new(&alph, &rels, bound).map_err(TwistError::Gb)?);
    let expected = convolution(&data.a.hilbert_function(), &data.b.hilbert_function(), bound);
    let actual = c.hilbert_function();
    for d in 0..=bound as usize {
        if expected[d] != actual[d] {
            return Err(TwistError::NotTwisting { degree: d as u32, defect: expected[d] as i64 - actual[d] as i64 });
        }
    }
    let n = data.a.ngens();
    let shift: Vec<usize> = (0..data.b.ngens()).map(|j| n + j).collect();
    let mut split = vec![Vec::new(); bound as usize + 1];
    let mut join = vec![HashMap::new(); bound as usize + 1];
    for d in 0..=bound {
        let mut s = vec![(0, 0, 0); c.dim(d as i64)];
        for p in 0..=d {
            for (ka, u) in data.a.basis(p).iter().enumerate() {
                for (kb, v) in data.b.basis(d - p).iter().enumerate() {
                    let w = u.concat(&Word::from_letters(&v.iter().map(|&l| shift[l as usize]).collect::<Vec<_>>()));
                    let Some(idx) = c.word_index(d, &w) else {
                        return Err(TwistError::NotTwisting { degree: d, defect: 0 });
                    };
                    s[idx] = (p, ka, kb);
                    join[d as usize].insert((p, ka, kb), idx);
                }
            }
        }
        split[d as usize] = s;
    }
    Ok(TwistedTensorAlgebra { data: data.clone(), c, split, join })
}

impl TwistedTensorAlgebra {
    pub fn data(&self) -> &TwistData {
        &self.data
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra> {
        &self.c
    }

    pub fn n(&self) -> usize {
        self.data.a.ngens()
    }

    pub fn m(&self) -> usize {
        self.data.b.ngens()
    }

    pub fn bound(&self) -> u32 {
        self.c.bound()
    }

    /// Letter of `y_j` in `C`.
    pub fn y_letter(&self, j: usize) -> usize {
        self.n() + j
    }

    /// Index in `C_{p+q}` of `basis_p(A)[ka] · basis_q(B)[kb]`.
    pub fn tensor_index(&self, p: u32, ka: usize, q: u32, kb: usize) -> usize {
        self.join[(p + q) as usize][&(p, ka, kb)]
    }

    /// Inverse of [`Self::tensor_index`] for a basis index of `C_d`.
    pub fn split_index(&self, d: u32, idx: usize) -> (u32, usize, usize) {
        self.split[d as usize][idx]
    }

    /// `a ⊗ b` for `a ∈ A_p`, `b ∈ B_q`.
    pub fn tensor(&self, p: u32, a: &SparseVec, q: u32, b: &SparseVec) -> SparseVec {
        let mut pairs = Vec::new();
        for (ka, x) in a.iter() {
            for (kb, y) in b.iter() {
                pairs.push((self.tensor_index(p, *ka, q, *kb), x * y));
            }
        }
        SparseVec::from_pairs(pairs)
    }

    pub fn iota_a(&self, p: u32, a: &SparseVec) -> SparseVec {
        self.tensor(p, a, 0, &SparseVec::unit(0))
    }

    pub fn iota_b(&self, q: u32, b: &SparseVec) -> SparseVec {
        self.tensor(0, &SparseVec::unit(0), q, b)
    }

    /// `a ⊗ b ↦ a ε(b)`.
    pub fn pi_a(&self, d: u32, v: &SparseVec) -> SparseVec {
        SparseVec::from_pairs(
            v.iter().filter_map(|(k, c)| {
                let (p, ka, _) = self.split[d as usize][*k];
                (p == d).then(|| (ka, c.clone()))
            })
            .collect(),
        )
    }

    /// `a ⊗ b ↦ ε(a) b`.
    pub fn pi_b(&self, d: u32, v: &SparseVec) -> SparseVec {
        SparseVec::from_pairs(
            v.iter().filter_map(|(k, c)| {
                let (p, _, kb) = self.split[d as usize][*k];
                (p == 0).then(|| (kb, c.clone()))
            })
            .collect(),
        )
    }

    /// Component of `v ∈ C_d` in `A_p ⊗ B_{d−p}`, as pairs `((ka, kb), c)`.
    pub fn bigraded_part(&self, d: u32, p: u32, v: &SparseVec) -> Vec<((usize, usize), Scalar)> {
        v.iter()
            .filter_map(|(k, c)| {
                let (pp, ka, kb) = self.split[d as usize][*k];
                (pp == p).then(|| ((ka, kb), c.clone()))
            })
            .collect()
    }

    /// The algebra `A ⊗^{τ̄} B` with `τ̄ = (σ, 0)`, or a clone when `δ = 0`.
    pub fn associated(&self) -> Result<TwistedTensorAlgebra, TwistError> {
        build_twisted_tensor(&self.data.associated(), self.bound())
    }
}

/// `τ⁻¹(a ⊗ y_i) = Σ_s y_s ⊗ φ_si(a) + 1 ⊗ δ'_i(a)` with `φ = σ⁻¹` and
/// `δ'_i = −Σ_j δ_j ∘ φ_ji`, presenting `B ⊗^{τ⁻¹} A` on generators `Y ∪ X`.
#[derive(Clone, Debug)]
pub struct InverseTwist {
    data: TwistData,
    phi: Arc<MatrixAlgebraHom>,
}

pub fn invert_twist(data: &TwistData) -> Result<InverseTwist, TwistError> {
    let phi = invert_sigma(data.sigma()).ok_or(TwistError::NotInvertible)?;
    Ok(InverseTwist { data: data.clone(), phi: Arc::new(phi) })
}

impl InverseTwist {
    pub fn phi(&self) -> &Arc<MatrixAlgebraHom> {
        &self.phi
    }

    pub fn original(&self) -> &TwistData {
        &self.data
    }

    /// `δ'_i(v)` for `v ∈ A_d`.
    pub fn delta_prime(&self, d: u32, v: &SparseVec) -> Vec<SparseVec> {
        let a = &self.data.a;
        let m = self.phi.size();
        let Some(delta) = &self.data.delta else {
            return (0..m).map(|_| SparseVec::new()).collect();
        };
        let shifts = delta.shifts();
        let phi_v = self.phi.apply(d, v);
        (0..m)
            .map(|i| {
                let mut acc = Accumulator::new(a.dim((d + shifts[i]) as i64).max(1));
                for j in 0..m {
                    let dj = delta.apply(d, &phi_v[j][i]);
                    acc.add_scaled(&dj[j], &-Scalar::one());
                }
                acc.drain()
            })
            .collect()
    }

    /// Generators `Y ∪ X` and relations `G_B ∪ G_A ∪ {x_k y_i − Σ_s y_s φ_si(x_k) − δ'_i(x_k)}`.
    pub fn presentation(&self) -> Result<(Alphabet, Vec<NcPoly>), TwistError> {
        let (a, b) = (&self.data.a, &self.data.b);
        let m = b.ngens();
        let alph = b.alphabet().concat(a.alphabet()).map_err(TwistError::Alphabet)?;
        let shift: Vec<usize> = (0..a.ngens()).map(|k| m + k).collect();
        let mut rels: Vec<NcPoly> = b.relations().to_vec();
        rels.extend(a.relations().iter().map(|g| g.relabel(&shift)));
        for k in 0..a.ngens() {
            let dx = a.alphabet().degree(k);
            let xk = a.coords(&a.generator(k));
            let dp = self.delta_prime(dx, &xk);
            for i in 0..m {
                let dy = b.alphabet().degree(i);
                let mut g = NcPoly::monomial(Word::from_letters(&[m + k, i]), Scalar::one(), dx + dy);
                for s in 0..m {
                    let f = &self.phi.image(k)[s][i];
                    if !f.is_zero() {
                        g = g.sub(&NcPoly::monomial(Word::letter(s), Scalar::one(), dy).mul(&f.relabel(&shift)));
                    }
                }
                if !dp[i].is_zero() {
                    g = g.sub(&a.poly(dx + dy, &dp[i]).relabel(&shift));
                }
                rels.push(g);
            }
        }
        Ok((alph, rels))
    }

    /// The presented algebra `B ⊗^{τ⁻¹} A` through degree `bound`.
    pub fn build(&self, bound: u32) -> Result<Arc<GradedAlgebra>, TwistError> {
        let (alph, rels) = self.presentation()?;
        Ok(Arc::new(GradedAlgebra::new(&alph, &rels, bound).map_err(TwistError::Gb)?))
    }

    /// Invert again: `σ = φ⁻¹` and `δ_j = −Σ_t δ'_t ∘ σ_jt` on generators.
    pub fn invert(&self) -> Result<TwistData, TwistError> {
        let a = self.data.a.clone();
        let sigma = Arc::new(invert_sigma(&self.phi).ok_or(TwistError::NotInvertible)?);
        let delta = match &self.data.delta {
            None => None,
            Some(old) => {
                let m = sigma.size();
                let shifts = old.shifts().to_vec();
                let images = (0..a.ngens())
                    .map(|x| {
                        let dx = a.alphabet().degree(x);
                        let sx = sigma.image_coords(x);
                        (0..m)
                            .map(|j| {
                                let mut acc = Accumulator::new(a.dim((dx + shifts[j]) as i64).max(1));
                                for t in 0..m {
                                    let dp = self.delta_prime(dx, &sx[j][t]);
                                    acc.add_scaled(&dp[t], &-Scalar::one());
                                }
                                a.poly(dx + shifts[j], &acc.drain())
                            })
                            .collect()
                    })
                    .collect();
                Some(Arc::new(SigmaDerivation::new(sigma.clone(), shifts, images)?))
            }
        };
        TwistData::new(a, self.data.b.clone(), sigma, delta)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exactla::ScalarMatrix;
    use crate::freealg::parse_expr;

    fn alg(names: &[&str], rels: &[&str], d: u32) -> Arc<GradedAlgebra> {
        let a = Alphabet::linear(names).unwrap();
        let rels: Vec<NcPoly> = rels.iter().map(|r| parse_expr(r, &a).unwrap()).collect();
        Arc::new(GradedAlgebra::new(&a, &rels, d).unwrap())
    }

    pub(crate) fn example53(d: u32, p: i64) -> TwistData {
        let a = alg(&["x1", "x2"], &["x1*x1*x2 - x2*x1*x1", "x1*x2*x2 - x2*x2*x1"], d);
        let b = alg(&["y1", "y2"], &["y1*y1*y2 - y2*y1*y1", "y1*y2*y2 - y2*y2*y1"], d);
        let m = ScalarMatrix::from_i64_rows(&[&[p, p], &[p, -p]]);
        let x = |s: &str| parse_expr(s, a.alphabet()).unwrap();
        let img = |g: NcPoly| (0..2).map(|j| (0..2).map(|t| g.scale(&m.get(j, t))).collect()).collect();
        let sigma = MatrixAlgebraHom::new(a.clone(), vec![img(x("x2")), img(x("x1"))]).unwrap();
        TwistData::new(a, b, Arc::new(sigma), None).unwrap()
    }

    #[test]
    fn example53_is_certified() {
        let data = example53(5, 1);
        let c = build_twisted_tensor(&data, 5).unwrap();
        // series oracle for A: (1−t)^{-2}(1−t²)^{-1}... checked in gbasis; here only the convolution
        let ha = [1usize, 2, 4, 6, 9, 12];
        let want: Vec<usize> = (0..6).map(|d| (0..=d).map(|p| ha[p] * ha[d - p]).sum()).collect();
        assert_eq!(c.algebra().hilbert_function(), want);
        assert_eq!(c.algebra().dim(2), 12);
        let (alph, rels) = data.presentation().unwrap();
        assert!(rels.iter().any(|g| g.to_text(&alph) == "y1*x1 - x2*y2 - x2*y1"));
    }

    #[test]
    fn projections_split_embeddings() {
        let data = example53(4, 1);
        let c = build_twisted_tensor(&data, 4).unwrap();
        for d in 0..=4 {
            for k in 0..data.a().dim(d as i64) {
                let v = SparseVec::unit(k);
                assert_eq!(c.pi_a(d, &c.iota_a(d, &v)), v);
            }
            for k in 0..data.b().dim(d as i64) {
                let v = SparseVec::unit(k);
                assert_eq!(c.pi_b(d, &c.iota_b(d, &v)), v);
            }
        }
    }

    #[test]
    fn flip_gives_polynomial_ring() {
        let a = alg(&["x"], &[], 6);
        let b = alg(&["y"], &[], 6);
        let sigma = Arc::new(MatrixAlgebraHom::diagonal(a.clone(), 1));
        let data = TwistData::new(a, b, sigma, None).unwrap();
        let c = build_twisted_tensor(&data, 6).unwrap();
        assert_eq!(c.algebra().hilbert_function(), vec![1, 2, 3, 4, 5, 6, 7]);
        let inv = invert_twist(&data).unwrap();
        assert!(inv.phi().is_diagonal_embedding());
        assert_eq!(inv.build(6).unwrap().hilbert_function(), c.algebra().hilbert_function());
    }

    #[test]
    fn antidiagonal_over_quantum_plane_is_not_twisting() {
        let a = alg(&["x"], &[], 5);
        let b = alg(&["y1", "y2"], &["y2*y1 - 2*y1*y2"], 5);
        let sigma = MatrixAlgebraHom::scalar_multiples(a.clone(), &[ScalarMatrix::from_i64_rows(&[&[0, 1], &[1, 0]])]).unwrap();
        let data = TwistData::new(a, b, Arc::new(sigma), None).unwrap();
        match build_twisted_tensor(&data, 5) {
            Err(TwistError::NotTwisting { degree, defect }) => {
                assert_eq!(degree, 3);
                assert!(defect > 0);
            }
            other => panic!("expected NotTwisting, got {other:?}"),
        }
    }

    #[test]
    fn ore_inverse_and_double_inversion() {
        let a = alg(&["x"], &[], 6);
        let b = alg(&["z"], &[], 6);
        let sigma = Arc::new(MatrixAlgebraHom::scalar_multiples(a.clone(), &[ScalarMatrix::from_i64_rows(&[&[3]])]).unwrap());
        let xx = parse_expr("x*x", a.alphabet()).unwrap();
        let delta = Arc::new(SigmaDerivation::new(sigma.clone(), vec![1], vec![vec![xx]]).unwrap());
        let data = TwistData::new(a.clone(), b, sigma, Some(delta)).unwrap();
        let c = build_twisted_tensor(&data, 6).unwrap();
        let inv = invert_twist(&data).unwrap();
        let (alph, rels) = inv.presentation().unwrap();
        // δ' = −δ∘σ⁻¹: δ'(x) = −δ(x/3) = −x²/3
        assert_eq!(rels.last().unwrap().to_text(&alph), "1/3*x*x + x*z - 1/3*z*x");
        assert_eq!(inv.build(6).unwrap().hilbert_function(), c.algebra().hilbert_function());
        let back = inv.invert().unwrap();
        assert_eq!(back.presentation().unwrap().1, data.presentation().unwrap().1);
    }

    #[test]
    fn example53_inverse_twist_has_same_hilbert_function() {
        let data = example53(5, 1);
        let c = build_twisted_tensor(&data, 5).unwrap();
        let inv = invert_twist(&data).unwrap();
        assert_eq!(inv.build(5).unwrap().hilbert_function(), c.algebra().hilbert_function());
        let back = inv.invert().unwrap();
        assert_eq!(back.sigma().images(), data.sigma().images());
    }
}
