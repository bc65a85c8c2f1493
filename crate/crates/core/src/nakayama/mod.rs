//! Nakayama automorphisms of base algebras, of twisted tensor products, and an
//! oracle computed from the Ext-algebra of the product alone.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::exactla::{Accumulator, ColumnEchelon, Scalar, ScalarMatrix, SparseVec};
use crate::freealg::{NcPoly, Word};
use crate::galgebra::GradedAlgebra;
use crate::homalg::{build_phi_tower, det_sigma, frobenius_data, hdet, ExtAlgebra, FrobeniusData, HomalgError, PhiTower};
use crate::resolution::{minimal_resolution, FreeResolution};
use crate::twist::{TwistData, TwistedTensorAlgebra};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NakayamaError {
    #[error("image of generator {generator} is not homogeneous of its degree")]
    NotGraded { generator: usize },
    #[error("relation {relation} is not killed: {text}")]
    RelationNotKilled { relation: usize, text: String },
    #[error("the degree-one matrix is singular")]
    Singular,
    #[error("the algebra is not generated in degree one")]
    NotDegreeOne,
    #[error("no automorphism of the predicted shape exists (tail system inconsistent)")]
    TailsInconsistent,
    #[error("the tail system has a {dimension}-dimensional solution space and no oracle decides it")]
    TailsUnderdetermined { dimension: usize },
    #[error("the oracle does not lie in the predicted family")]
    OracleOutsideFamily,
    #[error(transparent)]
    Homalg(#[from] HomalgError),
}

/// A graded algebra automorphism given by generator images.
#[derive(Debug, Clone)]
pub struct GradedAutomorphism {
    algebra: Arc<GradedAlgebra>,
    images: Vec<NcPoly>,
    coords: Vec<SparseVec>,
}

impl PartialEq for GradedAutomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && self.algebra.alphabet() == other.algebra.alphabet()
    }
}

impl GradedAutomorphism {
    /// Validated: images are homogeneous of the generator degrees, every relation is
    /// killed, and the degree-one matrix is invertible.
    pub fn new(algebra: Arc<GradedAlgebra>, images: Vec<NcPoly>) -> Result<Self, NakayamaError> {
        let f = Self::unchecked(algebra, images)?;
        f.validate()?;
        Ok(f)
    }

    fn unchecked(algebra: Arc<GradedAlgebra>, images: Vec<NcPoly>) -> Result<Self, NakayamaError> {
        let mut normalized = Vec::with_capacity(images.len());
        let mut coords = Vec::with_capacity(images.len());
        for (x, p) in images.into_iter().enumerate() {
            let d = algebra.alphabet().degree(x);
            if !p.is_zero() && p.degree() != d {
                return Err(NakayamaError::NotGraded { generator: x });
            }
            let c = algebra.coords(&p);
            normalized.push(algebra.poly(d, &c));
            coords.push(c);
        }
        Ok(GradedAutomorphism { algebra, images: normalized, coords })
    }

    /// `x_k ↦ Σ_r N[r][k] x_r` on an algebra generated in degree one.
    pub fn from_linear(algebra: Arc<GradedAlgebra>, n: &ScalarMatrix) -> Result<Self, NakayamaError> {
        if algebra.alphabet().degrees().iter().any(|&d| d != 1) {
            return Err(NakayamaError::NotDegreeOne);
        }
        let images = (0..algebra.ngens()).map(|k| algebra.poly(1, &SparseVec::from_dense(&n.column(k)))).collect();
        Self::new(algebra, images)
    }

    pub fn identity(algebra: Arc<GradedAlgebra>) -> Self {
        let images = (0..algebra.ngens()).map(|x| algebra.generator(x)).collect();
        Self::unchecked(algebra, images).expect("generators are homogeneous")
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra> {
        &self.algebra
    }

    pub fn images(&self) -> &[NcPoly] {
        &self.images
    }

    pub fn image(&self, x: usize) -> &NcPoly {
        &self.images[x]
    }

    pub fn image_texts(&self) -> Vec<String> {
        self.images.iter().map(|p| p.to_text(self.algebra.alphabet())).collect()
    }

    /// Image of a word, as coordinates in its degree.
    pub fn eval_word(&self, w: &Word) -> SparseVec {
        let alph = self.algebra.alphabet();
        let mut cur = self.algebra.unit();
        let mut deg = 0;
        for &x in w.iter().rev() {
            let dx = alph.degree(x as usize);
            cur = self.algebra.mul(dx, &self.coords[x as usize], deg, &cur);
            deg += dx;
        }
        cur
    }

    pub fn apply_coords(&self, p: &NcPoly) -> SparseVec {
        let mut acc = Accumulator::new(self.algebra.dim(p.degree() as i64).max(1));
        for (w, c) in p.terms() {
            acc.add_scaled(&self.eval_word(w), c);
        }
        acc.drain()
    }

    pub fn apply(&self, p: &NcPoly) -> NcPoly {
        self.algebra.poly(p.degree(), &self.apply_coords(p))
    }

    /// Matrix on the degree-one generators, columns are images.
    pub fn degree_one_matrix(&self) -> ScalarMatrix {
        let ones: Vec<usize> = (0..self.algebra.ngens()).filter(|&x| self.algebra.alphabet().degree(x) == 1).collect();
        let cols: Vec<SparseVec> = ones.iter().map(|&x| self.coords[x].clone()).collect();
        ScalarMatrix::from_sparse_cols(self.algebra.dim(1), &cols)
    }

    pub fn validate(&self) -> Result<(), NakayamaError> {
        for (i, r) in self.algebra.relations().iter().enumerate() {
            let v = self.apply_coords(r);
            if !v.is_zero() {
                return Err(NakayamaError::RelationNotKilled { relation: i, text: self.algebra.poly(r.degree(), &v).to_text(self.algebra.alphabet()) });
            }
        }
        let m = self.degree_one_matrix();
        if !m.is_square() || m.determinant().is_zero() {
            return Err(NakayamaError::Singular);
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedAutomorphism) -> GradedAutomorphism {
        let images = other.images.iter().map(|p| self.apply(p)).collect();
        Self::unchecked(self.algebra.clone(), images).expect("composition is graded")
    }

    /// Equality of generator images after normal form.
    pub fn same_as(&self, other: &GradedAutomorphism) -> bool {
        self == other
    }
}

/// `μ_A` on degree one as the dual of `μ_E` on `E^1`.
///
/// With `u_a = d_1(g_a)` and `μ_E(e_b) = Σ_c U[c][b] e_c`, one gets `μ_A(u_a) = Σ_b U[a][b] u_b`.
pub fn nakayama_of_base(a: &Arc<GradedAlgebra>, frob: &FrobeniusData) -> Result<GradedAutomorphism, NakayamaError> {
    if a.alphabet().degrees().iter().any(|&d| d != 1) {
        return Err(NakayamaError::NotDegreeOne);
    }
    let res = frob.ext().resolution();
    let n = a.dim(1);
    if res.top() < 1 || res.shifts(1).len() != n || res.shifts(1).iter().any(|&s| s != 1) {
        return Err(NakayamaError::NotDegreeOne);
    }
    let d1 = res.differential(1).unwrap();
    let cols: Vec<SparseVec> = (0..n).map(|g| a.coords(d1.entry(0, g))).collect();
    let dmat = ScalarMatrix::from_sparse_cols(n, &cols);
    let dinv = dmat.invert().ok().flatten().ok_or(NakayamaError::Singular)?;
    let u = frob.nakayama(1);
    let nmat = dmat.mul(&u.transpose()).mul(&dinv);
    GradedAutomorphism::from_linear(a.clone(), &nmat)
}

/// `μ_C` from the Frobenius structure of `E(C)`, independently of any twisting data.
pub fn nakayama_oracle(c: &Arc<GradedAlgebra>, h: usize) -> Result<(GradedAutomorphism, FrobeniusData), NakayamaError> {
    let res = minimal_resolution(c.clone(), h).map_err(HomalgError::from)?;
    let frob = frobenius_data(ExtAlgebra::new(Arc::new(res)))?;
    Ok((nakayama_of_base(c, &frob)?, frob))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// fully determined by the twisted-tensor formulas and the relations of `C`
    Theorem,
    /// tails picked out of a positive-dimensional family by the oracle
    TheoremWithOracle,
}

/// `μ_C` with its pieces: `μ_C|_A`, the `y`-block of `hdet σ ∘ μ_B`, and tails in `A`.
#[derive(Debug, Clone)]
pub struct NakayamaResult {
    pub mu: GradedAutomorphism,
    pub restriction_a: GradedAutomorphism,
    /// `μ_C(y_i) = Σ_j y_block[i][j] y_j + tails[i]`
    pub y_block: ScalarMatrix,
    pub tails: Vec<NcPoly>,
    /// dimension of the solution space of the tail system
    pub tail_freedom: usize,
    pub provenance: Provenance,
}

/// Inputs to the twisted-tensor formulas.
pub struct TwistedInvariants<'a> {
    pub mu_a: &'a GradedAutomorphism,
    pub mu_b: &'a GradedAutomorphism,
    pub det: &'a GradedAutomorphism,
    pub hdet: &'a ScalarMatrix,
}

/// `μ_C|_A = (det σ)⁻¹ ∘ μ_A` and `μ_C(y) = (hdet σ ∘ μ_B)(y) + a`, with the tails `a_i ∈ A_1`
/// solved from the requirement that `μ_C` kills the relations of `C` mixing `A` and `B`.
pub fn nakayama_of_twisted(
    c: &TwistedTensorAlgebra,
    inv: &TwistedInvariants,
    oracle: Option<&GradedAutomorphism>,
) -> Result<NakayamaResult, NakayamaError> {
    let a = c.data().a();
    let b = c.data().b();
    let calg = c.algebra();
    if a.alphabet().degrees().iter().chain(b.alphabet().degrees()).any(|&d| d != 1) {
        return Err(NakayamaError::NotDegreeOne);
    }
    let det_inv = inv.det.degree_one_matrix().invert().ok().flatten().ok_or(NakayamaError::Singular)?;
    let restriction = det_inv.mul(&inv.mu_a.degree_one_matrix());
    let restriction_a = GradedAutomorphism::from_linear(a.clone(), &restriction)?;
    // hdet is row-indexed on E^1(B); dualizing to B_1 transposes it, so on B_1 it acts by
    // columns: y_block = (hdet · N_B)^T with N_B the column matrix of μ_B
    let y_block = inv.hdet.mul(&inv.mu_b.degree_one_matrix()).transpose();
    let n = a.ngens();
    let m = b.ngens();
    let na = a.dim(1);
    // base images in C coordinates, tails zero
    let mut base: Vec<SparseVec> = (0..n).map(|x| c.iota_a(1, &SparseVec::from_dense(&restriction.column(x)))).collect();
    for i in 0..m {
        base.push(c.iota_b(1, &SparseVec::from_dense(&y_block.row(i))));
    }
    let tail_unit = |e: usize| c.iota_a(1, &SparseVec::unit(e));
    // linear system over relations with at most one y per monomial
    let mut columns: Vec<SparseVec> = vec![SparseVec::new(); m * na];
    let mut rhs = SparseVec::new();
    let mut total = 0;
    for r in calg.relations() {
        let linear = r.terms().all(|(w, _)| w.iter().filter(|&&l| (l as usize) >= n).count() <= 1);
        if !linear {
            continue;
        }
        let size = calg.dim(r.degree() as i64);
        let mut cols: Vec<Accumulator> = (0..m * na).map(|_| Accumulator::new(size.max(1))).collect();
        let mut value = Accumulator::new(size.max(1));
        for (w, coef) in r.terms() {
            let letters: Vec<usize> = w.iter().map(|&l| l as usize).collect();
            let product = |subst: Option<(usize, &SparseVec)>| -> SparseVec {
                let mut cur = calg.unit();
                for (pos, &x) in letters.iter().enumerate().rev() {
                    let f = match subst {
                        Some((p, v)) if p == pos => v,
                        _ => &base[x],
                    };
                    cur = calg.mul(1, f, (letters.len() - 1 - pos) as u32, &cur);
                }
                cur
            };
            value.add_scaled(&product(None), &-coef.clone());
            if let Some(pos) = letters.iter().position(|&x| x >= n) {
                let i = letters[pos] - n;
                for e in 0..na {
                    cols[i * na + e].add_scaled(&product(Some((pos, &tail_unit(e)))), coef);
                }
            }
        }
        let offset = total;
        total += size;
        rhs.add_scaled(&value.drain().map_indices(|k| k + offset), &Scalar::one());
        for (column, col) in columns.iter_mut().zip(cols.iter_mut()) {
            column.add_scaled(&col.drain().map_indices(|k| k + offset), &Scalar::one());
        }
    }
    let mut ech = ColumnEchelon::new(total);
    for col in &columns {
        ech.push(col);
    }
    let particular = ech.solve(&rhs).ok_or(NakayamaError::TailsInconsistent)?;
    let freedom = ech.kernel().len();
    let (tail_coords, provenance) = if freedom == 0 {
        (particular, Provenance::Theorem)
    } else {
        let Some(o) = oracle else {
            return Err(NakayamaError::TailsUnderdetermined { dimension: freedom });
        };
        // read the oracle's tails and confirm they solve the system
        let mut t = Vec::new();
        for i in 0..m {
            let img = calg.coords(o.image(n + i));
            let expected_y = &base[n + i];
            let mut diff = img.clone();
            diff.add_scaled(expected_y, &-Scalar::one());
            let tail = c.pi_a(1, &diff);
            let mut back = c.iota_a(1, &tail);
            back.add_scaled(&diff, &-Scalar::one());
            if !back.is_zero() {
                return Err(NakayamaError::OracleOutsideFamily);
            }
            t.extend(tail.iter().map(|(k, v)| (i * na + k, v.clone())));
        }
        let t = SparseVec::from_pairs(t);
        let mut check = Accumulator::new(total.max(1));
        for (u, v) in t.iter() {
            check.add_scaled(&columns[*u], v);
        }
        if check.drain() != rhs {
            return Err(NakayamaError::OracleOutsideFamily);
        }
        (t, Provenance::TheoremWithOracle)
    };
    let tails: Vec<NcPoly> = (0..m)
        .map(|i| {
            let v = SparseVec::from_pairs(tail_coords.iter().filter(|(u, _)| u / na == i).map(|(u, v)| (u % na, v.clone())).collect());
            a.poly(1, &v)
        })
        .collect();
    let mut images: Vec<NcPoly> = (0..n).map(|x| calg.poly(1, &base[x])).collect();
    for (i, tail) in tails.iter().enumerate() {
        let mut v = base[n + i].clone();
        v.add_scaled(&c.iota_a(1, &a.coords(tail)), &Scalar::one());
        images.push(calg.poly(1, &v));
    }
    let mu = GradedAutomorphism::new(calg.clone(), images)?;
    Ok(NakayamaResult { mu, restriction_a, y_block, tails, tail_freedom: freedom, provenance })
}

/// Every invariant the twisted-tensor formulas consume, computed from `data`.
#[derive(Debug)]
pub struct TheoremInputs {
    pub tower: PhiTower,
    pub a_resolution: Arc<FreeResolution>,
    pub mu_a: GradedAutomorphism,
    pub mu_b: GradedAutomorphism,
    pub det: GradedAutomorphism,
    pub hdet: ScalarMatrix,
}

/// Resolve `A` and `B`, build the `φ` tower over the associated algebra, and read off
/// `μ_A`, `μ_B`, `det σ` and `hdet σ`.
pub fn theorem_inputs(data: &TwistData, bound: u32, h: usize) -> Result<TheoremInputs, NakayamaError> {
    let pres = Arc::new(minimal_resolution(data.a().clone(), h).map_err(HomalgError::from)?);
    let qres = Arc::new(minimal_resolution(data.b().clone(), h).map_err(HomalgError::from)?);
    let fa = frobenius_data(ExtAlgebra::new(pres.clone()))?;
    let fb = frobenius_data(ExtAlgebra::new(qres.clone()))?;
    let mu_a = nakayama_of_base(data.a(), &fa)?;
    let mu_b = nakayama_of_base(data.b(), &fb)?;
    let tower = build_phi_tower(data, qres, bound)?;
    let det = det_sigma(&tower)?;
    let hdet = hdet(data.sigma(), &pres)?;
    Ok(TheoremInputs { tower, a_resolution: pres, mu_a, mu_b, det, hdet })
}

impl TheoremInputs {
    pub fn invariants(&self) -> TwistedInvariants<'_> {
        TwistedInvariants { mu_a: &self.mu_a, mu_b: &self.mu_b, det: &self.det, hdet: &self.hdet }
    }
}
