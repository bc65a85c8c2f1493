//! Minimal graded free resolutions of the trivial module and chain-map lifting.

use std::sync::{Arc, OnceLock};

use crate::exactla::{Accumulator, ColumnEchelon, Pushed, Scalar, SparseVec};
use crate::galgebra::{FreeModule, GradedAlgebra, ModuleMap};
use crate::twist::MatrixAlgebraHom;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolutionError {
    #[error("internal bound {bound} is below the relation degree {needed}")]
    BoundTooSmall { needed: u32, bound: u32 },
    #[error("lifting has no solution at position {position}, generator {generator}")]
    Inconsistent { position: usize, generator: usize },
    #[error("position {position} is beyond the computed resolution")]
    Exhausted { position: usize },
}

/// How underdetermined lifting systems are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftChoice {
    /// every free variable zero
    Minimal,
    /// every free variable one
    Perturbed,
}

/// `… → P_2 → P_1 → P_0 = A → k`, exact and minimal for internal degrees up to the bound.
#[derive(Debug)]
pub struct FreeResolution {
    algebra: Arc<GradedAlgebra>,
    modules: Vec<FreeModule>,
    /// `differentials[n − 1] = d_n: P_n → P_{n−1}`
    differentials: Vec<ModuleMap>,
    h_bound: usize,
    terminated: bool,
    echelons: Vec<Vec<OnceLock<ColumnEchelon>>>,
}

/// Whether every `V_i` sits in a single degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Purity {
    pub pure: bool,
    /// first position with more than one distinct shift
    pub witness: Option<usize>,
}

/// Rank comparison `rank d_i + rank d_{i+1} = dim (P_i)_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactnessReport {
    pub checked: usize,
    /// `(position, degree)` pairs where exactness fails
    pub failures: Vec<(usize, u32)>,
    /// positions whose exactness is not determined at this bound
    pub undetermined: Vec<usize>,
}

impl FreeResolution {
    /// Assemble from terms and differentials; `terminated` records that the next term is zero.
    pub fn from_parts(
        algebra: Arc<GradedAlgebra>,
        modules: Vec<FreeModule>,
        differentials: Vec<ModuleMap>,
        h_bound: usize,
        terminated: bool,
    ) -> Self {
        assert_eq!(modules.len(), differentials.len() + 1);
        let n = algebra.bound() as usize + 1;
        let echelons = (0..differentials.len()).map(|_| (0..n).map(|_| OnceLock::new()).collect()).collect();
        FreeResolution { algebra, modules, differentials, h_bound, terminated, echelons }
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra> {
        &self.algebra
    }

    pub fn bound(&self) -> u32 {
        self.algebra.bound()
    }

    pub fn h_bound(&self) -> usize {
        self.h_bound
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    /// The last nonzero term is followed by zero within the bounds.
    pub fn terminated(&self) -> bool {
        self.terminated
    }

    pub fn module(&self, n: usize) -> Option<&FreeModule> {
        self.modules.get(n)
    }

    pub fn modules(&self) -> &[FreeModule] {
        &self.modules
    }

    /// `d_n: P_n → P_{n−1}` for `n ≥ 1`.
    pub fn differential(&self, n: usize) -> Option<&ModuleMap> {
        if n == 0 {
            None
        } else {
            self.differentials.get(n - 1)
        }
    }

    pub fn differentials(&self) -> &[ModuleMap] {
        &self.differentials
    }

    /// Shifts of `V_n`, empty beyond the computed range.
    pub fn shifts(&self, n: usize) -> &[u32] {
        self.modules.get(n).map_or(&[], |m| m.shifts())
    }

    /// Betti data: the shift multiset of every term.
    pub fn betti(&self) -> Vec<Vec<u32>> {
        self.modules.iter().map(|m| m.shifts().to_vec()).collect()
    }

    /// `β_{n,j}` for `j ≤ bound`.
    pub fn betti_number(&self, n: usize, j: u32) -> usize {
        self.shifts(n).iter().filter(|&&s| s == j).count()
    }

    /// Position of the last nonzero term.
    pub fn top(&self) -> usize {
        self.modules.len() - 1
    }

    /// Column echelon of `d_n` in degree `t`.
    pub fn echelon(&self, n: usize, t: u32) -> &ColumnEchelon {
        self.echelons[n - 1][t as usize].get_or_init(|| {
            let d = &self.differentials[n - 1];
            ColumnEchelon::from_columns(d.target().dim(t), &d.columns(t))
        })
    }

    /// A solution `z ∈ (P_n)_t` of `d_n z = rhs`.
    pub fn solve_boundary(&self, n: usize, t: u32, rhs: &SparseVec, choice: LiftChoice) -> Option<SparseVec> {
        if n >= self.modules.len() {
            return rhs.is_zero().then(SparseVec::new);
        }
        let e = self.echelon(n, t);
        match choice {
            LiftChoice::Minimal => e.solve(rhs),
            LiftChoice::Perturbed => e.solve_perturbed(rhs),
        }
    }

    pub fn is_pure(&self) -> Purity {
        for (n, m) in self.modules.iter().enumerate() {
            if m.shifts().windows(2).any(|w| w[0] != w[1]) {
                return Purity { pure: false, witness: Some(n) };
            }
        }
        Purity { pure: true, witness: None }
    }

    /// `d_{n−1} ∘ d_n = 0` for every `n`.
    pub fn is_complex(&self) -> bool {
        self.differentials.windows(2).all(|w| w[0].compose(&w[1]).map(|c| c.is_zero()).unwrap_or(false))
    }

    /// Every differential entry lies in `A_{≥1}`.
    pub fn is_minimal(&self) -> bool {
        self.differentials.iter().all(|d| d.is_minimal())
    }

    /// Exactness by ranks, independently of the echelons used during construction.
    pub fn exactness(&self) -> ExactnessReport {
        let mut report = ExactnessReport { checked: 0, failures: Vec::new(), undetermined: Vec::new() };
        let rank = |n: usize, t: u32| -> usize {
            match self.differential(n) {
                Some(d) => d.degree_matrix(t).unwrap().rank(),
                None => 0,
            }
        };
        for n in 0..self.modules.len() {
            if n + 1 >= self.modules.len() && !self.terminated {
                report.undetermined.push(n);
                continue;
            }
            for t in 0..=self.bound() {
                let dim = self.modules[n].dim(t);
                let incoming = rank(n + 1, t);
                let outgoing = if n == 0 { usize::from(t == 0) } else { rank(n, t) };
                report.checked += 1;
                if incoming + outgoing != dim {
                    report.failures.push((n, t));
                }
            }
        }
        report
    }

    /// Degree through which `Σ_i (−1)^i P_i(t) H_A(t)` is fully determined.
    pub fn euler_range(&self) -> u32 {
        if self.terminated {
            return self.bound();
        }
        let last = self.modules.last().unwrap();
        let lowest = last.shifts().iter().copied().min().unwrap_or(self.bound());
        lowest.min(self.bound())
    }

    /// `Σ_i (−1)^i Σ_s t^s · H_A(t) ≡ 1` through [`Self::euler_range`].
    pub fn euler_characteristic_holds(&self) -> bool {
        let h = self.algebra.hilbert_function();
        let top = self.euler_range() as usize;
        let mut series = vec![0i64; top + 1];
        for (n, m) in self.modules.iter().enumerate() {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            for &s in m.shifts() {
                for d in s as usize..=top {
                    series[d] += sign * h[d - s as usize] as i64;
                }
            }
        }
        series.iter().enumerate().all(|(d, &c)| c == i64::from(d == 0))
    }
}

/// Images of `w · g` for every basis word `w`, built degree by degree.
struct GeneratorOrbit {
    shift: u32,
    by_degree: Vec<Vec<SparseVec>>,
}

impl GeneratorOrbit {
    fn images(&mut self, target: &FreeModule, t: u32) -> &[SparseVec] {
        let alg = target.algebra().clone();
        while (self.by_degree.len() as u32) + self.shift <= t {
            let d = self.by_degree.len() as u32;
            let imgs = alg
                .basis(d)
                .iter()
                .map(|w| {
                    let x = w.first().unwrap();
                    let dx = alg.alphabet().degree(x);
                    let rest = w.sub(1, w.len());
                    let k = alg.word_index(d - dx, &rest).unwrap();
                    target.left_letter(x, self.shift + d - dx, &self.by_degree[(d - dx) as usize][k])
                })
                .collect();
            self.by_degree.push(imgs);
        }
        &self.by_degree[(t - self.shift) as usize]
    }
}

/// Minimal resolution of `_A k` through homological degree `h` and the algebra's bound.
///
/// At each position and degree, the kernel of the previous differential is reduced
/// against the span of the `A`-multiples of the generators found so far; kernel basis
/// vectors independent of that span become new generators, in echelon order.
pub fn minimal_resolution(algebra: Arc<GradedAlgebra>, h: usize) -> Result<FreeResolution, ResolutionError> {
    let bound = algebra.bound();
    if let Some(g) = algebra.relations().iter().map(|g| g.degree()).max() {
        if g > bound {
            return Err(ResolutionError::BoundTooSmall { needed: g, bound });
        }
    }
    let mut modules = vec![FreeModule::new(algebra.clone(), vec![0])];
    let mut differentials: Vec<ModuleMap> = Vec::new();
    let mut kernels: Vec<Vec<SparseVec>> = (0..=bound).map(|t| (0..algebra.dim(t as i64)).map(SparseVec::unit).filter(|_| t > 0).collect()).collect();
    let mut terminated = false;
    for _ in 1..=h {
        let target = modules.last().unwrap().clone();
        let mut orbits: Vec<GeneratorOrbit> = Vec::new();
        let mut shifts = Vec::new();
        let mut images = Vec::new();
        for t in 1..=bound {
            if kernels[t as usize].is_empty() {
                continue;
            }
            let mut span = ColumnEchelon::new(target.dim(t));
            for o in orbits.iter_mut() {
                if o.shift < t {
                    for v in o.images(&target, t) {
                        span.push(v);
                    }
                }
            }
            for k in &kernels[t as usize] {
                if span.push(k) == Pushed::Independent {
                    shifts.push(t);
                    images.push(k.clone());
                    orbits.push(GeneratorOrbit { shift: t, by_degree: vec![vec![k.clone()]] });
                }
            }
        }
        if shifts.is_empty() {
            terminated = true;
            break;
        }
        let source = FreeModule::new(algebra.clone(), shifts);
        let d = ModuleMap::from_images(source.clone(), target, &images);
        kernels = (0..=bound)
            .map(|t| ColumnEchelon::from_columns(d.target().dim(t), &d.columns(t)).kernel().to_vec())
            .collect();
        modules.push(source);
        differentials.push(d);
    }
    if !terminated && kernels.iter().all(|k| k.is_empty()) {
        terminated = true;
    }
    Ok(FreeResolution::from_parts(algebra, modules, differentials, h, terminated))
}

/// Components `f_n: P_{n+hom} → P_n` of a chain map lowering internal degree by `int`.
///
/// `components[n][g]` is the image of generator `g` of the source term `n + hom`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMap {
    pub hom_shift: usize,
    pub int_shift: u32,
    pub components: Vec<Vec<SparseVec>>,
}

impl ChainMap {
    /// Coefficient of generator `target_gen` (with trivial coefficient word) in the image of
    /// source generator `g` at component `n`.
    pub fn constant_coefficient(&self, tgt: &FreeResolution, n: usize, g: usize, src_shift: u32, target_gen: usize) -> Scalar {
        let Some(m) = tgt.module(n) else { return Scalar::zero() };
        let t = src_shift as i64 - self.int_shift as i64;
        if t < 0 || t as u32 != m.shift(target_gen) {
            return Scalar::zero();
        }
        match self.components.get(n).and_then(|c| c.get(g)) {
            Some(v) => m.block(t as u32, v, target_gen).get(0),
            None => Scalar::zero(),
        }
    }
}

/// `f` applied to an element `v` of `src` in degree `t`, with generator images in `tgt`
/// lowered by `int`.
fn apply_images(src: &FreeModule, tgt: &FreeModule, int: u32, images: &[SparseVec], t: u32, v: &SparseVec) -> SparseVec {
    let out_deg = t as i64 - int as i64;
    if out_deg < 0 {
        return SparseVec::new();
    }
    let mut acc = Accumulator::new(tgt.dim(out_deg as u32).max(1));
    for (flat, c) in v.iter() {
        let (j, w) = src.locate(t, *flat);
        let img_deg = src.shift(j) as i64 - int as i64;
        if img_deg < 0 || images[j].is_zero() {
            continue;
        }
        acc.add_scaled(&tgt.left_word(w, img_deg as u32, &images[j]), c);
    }
    acc.drain()
}

/// Lift `f: V_hom → k` (values on the generators of `src` term `hom`, of internal degree
/// `int`) to a chain map `src → tgt` with `d ∘ f_n = (−1)^hom f_{n−1} ∘ d`, through
/// target position `upto`.
pub fn lift_map(
    src: &FreeResolution,
    tgt: &FreeResolution,
    hom: usize,
    int: u32,
    values: &[Scalar],
    upto: usize,
    choice: LiftChoice,
) -> Result<ChainMap, ResolutionError> {
    let Some(start) = src.module(hom) else {
        return Ok(ChainMap { hom_shift: hom, int_shift: int, components: Vec::new() });
    };
    let sign = if hom.is_multiple_of(2) { Scalar::one() } else { -Scalar::one() };
    let first: Vec<SparseVec> = start
        .shifts()
        .iter()
        .zip(values)
        .map(|(&s, c)| if s == int && !c.is_zero() { SparseVec::unit(0).scaled(c) } else { SparseVec::new() })
        .collect();
    let mut components = vec![first];
    for n in 1..=upto {
        let Some(source) = src.module(n + hom) else { break };
        let prev_src = src.module(n + hom - 1).unwrap();
        let Some(prev_tgt) = tgt.module(n - 1) else { break };
        let d = src.differential(n + hom).unwrap();
        let mut imgs = Vec::with_capacity(source.rank());
        for g in 0..source.rank() {
            let s = source.shift(g);
            if s < int || s > src.bound() {
                imgs.push(SparseVec::new());
                continue;
            }
            let rhs = apply_images(prev_src, prev_tgt, int, &components[n - 1], s, &d.image_of_generator(g)).scaled(&sign);
            let z = tgt.solve_boundary(n, s - int, &rhs, choice).ok_or(ResolutionError::Inconsistent { position: n, generator: g })?;
            imgs.push(z);
        }
        components.push(imgs);
    }
    Ok(ChainMap { hom_shift: hom, int_shift: int, components })
}

/// Lift of the `row`-th coordinate projection `^φ(P ⊗ U) → P` for `φ = σ⁻¹`.
///
/// On the source, `w·g ⊗ u_t = Σ_k σ_tk(w) * (g ⊗ u_k)`, so the lift is determined by
/// its values on `g ⊗ u_k`, stored at index `g·m + k`.
pub fn lift_twisted_projection(res: &FreeResolution, sigma: &MatrixAlgebraHom, row: usize, upto: usize) -> Result<ChainMap, ResolutionError> {
    let m = sigma.size();
    let first: Vec<SparseVec> = (0..m).map(|k| if k == row { SparseVec::unit(0) } else { SparseVec::new() }).collect();
    let mut components = vec![first];
    for n in 1..=upto.min(res.top()) {
        let source = res.module(n).unwrap();
        let prev = res.module(n - 1).unwrap();
        let d = res.differential(n).unwrap();
        let mut imgs = Vec::with_capacity(source.rank() * m);
        for g in 0..source.rank() {
            let s = source.shift(g);
            let dg = d.image_of_generator(g);
            for k in 0..m {
                let mut acc = Accumulator::new(prev.dim(s).max(1));
                for gp in 0..prev.rank() {
                    let sp = prev.shift(gp);
                    if sp > s {
                        continue;
                    }
                    let a = prev.block(s, &dg, gp);
                    if a.is_zero() {
                        continue;
                    }
                    for kp in 0..m {
                        let b = sigma.apply_entry(k, kp, s - sp, &a);
                        let tk = &components[n - 1][gp * m + kp];
                        if b.is_zero() || tk.is_zero() {
                            continue;
                        }
                        acc.add_scaled(&prev.left_mul(s - sp, &b, sp, tk), &Scalar::one());
                    }
                }
                let rhs = acc.drain();
                let z = res
                    .solve_boundary(n, s, &rhs, LiftChoice::Minimal)
                    .ok_or(ResolutionError::Inconsistent { position: n, generator: g })?;
                imgs.push(z);
            }
        }
        components.push(imgs);
    }
    Ok(ChainMap { hom_shift: 0, int_shift: 0, components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::ScalarMatrix;
    use crate::freealg::{parse_expr, Alphabet, NcPoly};

    pub(crate) fn alg(names: &[&str], rels: &[&str], d: u32) -> Arc<GradedAlgebra> {
        let a = Alphabet::linear(names).unwrap();
        let rels: Vec<NcPoly> = rels.iter().map(|r| parse_expr(r, &a).unwrap()).collect();
        Arc::new(GradedAlgebra::new(&a, &rels, d).unwrap())
    }

    fn example_a(d: u32) -> Arc<GradedAlgebra> {
        alg(&["x1", "x2"], &["x1*x1*x2 - x2*x1*x1", "x1*x2*x2 - x2*x2*x1"], d)
    }

    /// `dim Tor_i(k,k)_j` from the reduced bar complex `(A_+)^{⊗i}`.
    fn bar_betti(a: &GradedAlgebra, i: usize, j: u32) -> usize {
        // basis of (A_+)^{⊗n} in degree j: sequences of (degree, index) with positive degrees
        fn basis(a: &GradedAlgebra, n: usize, j: u32) -> Vec<Vec<(u32, usize)>> {
            if n == 0 {
                return if j == 0 { vec![vec![]] } else { vec![] };
            }
            let mut out = Vec::new();
            for d in 1..=j {
                for k in 0..a.dim(d as i64) {
                    for mut rest in basis(a, n - 1, j - d) {
                        rest.insert(0, (d, k));
                        out.push(rest);
                    }
                }
            }
            out
        }
        let boundary = |n: usize| -> ScalarMatrix {
            // b: (A_+)^{⊗n} → (A_+)^{⊗(n−1)}
            let src = basis(a, n, j);
            let tgt = basis(a, n - 1, j);
            let index: std::collections::HashMap<Vec<(u32, usize)>, usize> = tgt.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
            let mut cols = Vec::new();
            for s in &src {
                let mut acc = Accumulator::new(tgt.len().max(1));
                for k in 0..n - 1 {
                    let (p, u) = s[k];
                    let (q, v) = s[k + 1];
                    let prod = a.mul(p, &SparseVec::unit(u), q, &SparseVec::unit(v));
                    let sign = if k % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                    for (r, c) in prod.iter() {
                        let mut key = s[..k].to_vec();
                        key.push((p + q, *r));
                        key.extend_from_slice(&s[k + 2..]);
                        acc.add(index[&key], &(c * &sign));
                    }
                }
                cols.push(acc.drain());
            }
            ScalarMatrix::from_sparse_cols(tgt.len(), &cols)
        };
        let dim = basis(a, i, j).len();
        let out_rank = if i == 0 { 0 } else { boundary(i).rank() };
        let in_rank = boundary(i + 1).rank();
        dim - out_rank - in_rank
    }

    #[test]
    fn example_a_resolution_shape() {
        let a = example_a(6);
        let r = minimal_resolution(a, 3).unwrap();
        assert_eq!(r.betti(), vec![vec![0], vec![1, 1], vec![3, 3], vec![4]]);
        assert!(r.is_pure().pure);
        assert!(r.is_complex());
        assert!(r.is_minimal());
        assert!(r.exactness().failures.is_empty());
        assert!(r.euler_characteristic_holds());
        let d2 = r.differential(2).unwrap();
        let alph = r.algebra().alphabet().clone();
        let text: Vec<Vec<String>> = d2.entries().iter().map(|row| row.iter().map(|p| p.to_text(&alph)).collect()).collect();
        assert_eq!(text, vec![vec!["-x2*x1", "-x2*x2"], vec!["x1*x1", "x1*x2"]]);
    }

    #[test]
    fn small_resolutions() {
        let kx = alg(&["x"], &[], 5);
        let r = minimal_resolution(kx, 2).unwrap();
        assert_eq!(r.betti(), vec![vec![0], vec![1]]);
        assert!(r.terminated());
        let q = alg(&["y1", "y2"], &["y2*y1 - 3*y1*y2"], 4);
        let r = minimal_resolution(q, 2).unwrap();
        assert_eq!(r.betti(), vec![vec![0], vec![1, 1], vec![2]]);
    }

    #[test]
    fn impure_resolution_has_witness() {
        let a = alg(&["x", "y"], &["x*x", "x*y*y - y*y*x"], 6);
        let r = minimal_resolution(a, 3).unwrap();
        let p = r.is_pure();
        assert!(!p.pure);
        assert_eq!(p.witness, Some(2));
    }

    #[test]
    fn bound_below_relations_is_rejected() {
        let a = alg(&["x", "y"], &["x*x*y - y*x*x"], 2);
        assert!(matches!(minimal_resolution(a, 2), Err(ResolutionError::BoundTooSmall { .. })));
    }

    #[test]
    fn betti_numbers_match_bar_complex() {
        let algebras = vec![
            example_a(5),
            alg(&["x", "y"], &["y*x - x*y"], 5),
            alg(&["y1", "y2"], &["y2*y1 - 2*y1*y2"], 5),
            alg(&["x", "y"], &["x*x", "x*y*y - y*y*x"], 5),
            alg(&["x"], &[], 5),
            alg(&["x", "y"], &["x*y"], 5),
        ];
        for a in algebras {
            let r = minimal_resolution(a.clone(), 3).unwrap();
            for i in 0..=3 {
                for j in 0..=5 {
                    assert_eq!(r.betti_number(i, j), bar_betti(&a, i, j), "β_({i},{j})");
                }
            }
        }
    }

    #[test]
    fn identity_lifts_to_identity() {
        let a = example_a(6);
        let r = minimal_resolution(a, 3).unwrap();
        let f = lift_map(&r, &r, 0, 0, &[Scalar::one()], 3, LiftChoice::Minimal).unwrap();
        for n in 0..=3 {
            let m = r.module(n).unwrap();
            for g in 0..m.rank() {
                assert_eq!(f.components[n][g], m.generator(g));
            }
        }
    }

    #[test]
    fn twisted_projection_of_scaling() {
        let kx = alg(&["x"], &[], 4);
        let r = minimal_resolution(kx.clone(), 2).unwrap();
        let sigma = MatrixAlgebraHom::scalar_multiples(kx, &[ScalarMatrix::from_i64_rows(&[&[5]])]).unwrap();
        let th = lift_twisted_projection(&r, &sigma, 0, 1).unwrap();
        assert_eq!(th.components[1][0], SparseVec::unit(0).scaled(&Scalar::from_i64(5)));
    }
}
