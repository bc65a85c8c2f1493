//! Matrix-valued algebra maps `σ: A → M_m(A)` and σ-derivations.

use std::sync::{Arc, OnceLock};

use super::TwistError;
use crate::exactla::{Accumulator, Scalar, ScalarMatrix, SparseVec};
use crate::freealg::{NcPoly, Word};
use crate::galgebra::GradedAlgebra;

/// An `m × m` matrix of elements of one graded component, stored as coordinates.
pub type EntryMatrix = Vec<Vec<SparseVec>>;

fn zero_matrix(m: usize) -> EntryMatrix {
    vec![vec![SparseVec::new(); m]; m]
}

fn identity_matrix(m: usize) -> EntryMatrix {
    let mut out = zero_matrix(m);
    for (j, row) in out.iter_mut().enumerate() {
        row[j] = SparseVec::unit(0);
    }
    out
}

/// `L · R` with `L` in degree `p` and `R` in degree `q`.
pub(crate) fn matrix_product(alg: &GradedAlgebra, p: u32, l: &EntryMatrix, q: u32, r: &EntryMatrix) -> EntryMatrix {
    let m = l.len();
    let mut out = zero_matrix(m);
    for (j, row) in out.iter_mut().enumerate() {
        for (t, slot) in row.iter_mut().enumerate() {
            let mut acc = Accumulator::new(alg.dim((p + q) as i64).max(1));
            for s in 0..m {
                if l[j][s].is_zero() || r[s][t].is_zero() {
                    continue;
                }
                acc.add_scaled(&alg.mul(p, &l[j][s], q, &r[s][t]), &Scalar::one());
            }
            *slot = acc.drain();
        }
    }
    out
}

/// A graded algebra homomorphism `A → M_m(A)` given by generator images.
///
/// `image(x)[j][t]` is the entry `σ_{jt}(x)`, of the same degree as `x`.
#[derive(Debug)]
pub struct MatrixAlgebraHom {
    source: Arc<GradedAlgebra>,
    size: usize,
    images: Vec<Vec<Vec<NcPoly>>>,
    coords: Vec<EntryMatrix>,
    tables: Vec<OnceLock<Vec<EntryMatrix>>>,
}

/// A relation of `A` whose matrix evaluation is not zero.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("relation {relation} (`{text}`) evaluates to `{entry}` at entry ({row},{col})")]
pub struct SigmaViolation {
    pub relation: usize,
    pub text: String,
    pub row: usize,
    pub col: usize,
    pub entry: String,
}

/// Evidence that every relation was checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaCertificate {
    pub relations_checked: usize,
    pub size: usize,
}

impl MatrixAlgebraHom {
    pub fn new(source: Arc<GradedAlgebra>, images: Vec<Vec<Vec<NcPoly>>>) -> Result<Self, TwistError> {
        let n = source.ngens();
        if images.len() != n {
            return Err(TwistError::Shape(format!("{} generator images for {} generators", images.len(), n)));
        }
        let size = images.first().map_or(0, |m| m.len());
        let mut normalized = Vec::with_capacity(n);
        let mut coords = Vec::with_capacity(n);
        for (x, mat) in images.into_iter().enumerate() {
            let dx = source.alphabet().degree(x);
            if mat.len() != size || mat.iter().any(|r| r.len() != size) {
                return Err(TwistError::Shape(format!("image of generator {x} is not {size}×{size}")));
            }
            let mut nrow = Vec::with_capacity(size);
            let mut crow = Vec::with_capacity(size);
            for (j, row) in mat.into_iter().enumerate() {
                let mut np = Vec::with_capacity(size);
                let mut cp = Vec::with_capacity(size);
                for (t, p) in row.into_iter().enumerate() {
                    if !p.is_zero() && p.degree() != dx {
                        return Err(TwistError::Degree { what: format!("entry ({j},{t}) of generator {x}"), expected: dx, found: p.degree() });
                    }
                    let c = source.coords(&p.with_degree(dx));
                    np.push(source.poly(dx, &c));
                    cp.push(c);
                }
                nrow.push(np);
                crow.push(cp);
            }
            normalized.push(nrow);
            coords.push(crow);
        }
        let tables = (0..=source.bound()).map(|_| OnceLock::new()).collect();
        Ok(MatrixAlgebraHom { source, size, images: normalized, coords, tables })
    }

    /// `a ↦ diag(a, …, a)`.
    pub fn diagonal(source: Arc<GradedAlgebra>, m: usize) -> Self {
        let images = (0..source.ngens())
            .map(|x| {
                let dx = source.alphabet().degree(x);
                (0..m)
                    .map(|j| (0..m).map(|t| if j == t { source.generator(x) } else { NcPoly::zero(dx) }).collect())
                    .collect()
            })
            .collect();
        Self::new(source, images).expect("diagonal images are well formed")
    }

    /// `x ↦ M_x · x` for a scalar matrix per generator.
    pub fn scalar_multiples(source: Arc<GradedAlgebra>, mats: &[ScalarMatrix]) -> Result<Self, TwistError> {
        let images = mats
            .iter()
            .enumerate()
            .map(|(x, mat)| {
                let g = source.generator(x);
                (0..mat.rows()).map(|j| (0..mat.cols()).map(|t| g.scale(&mat.get(j, t))).collect()).collect()
            })
            .collect();
        Self::new(source, images)
    }

    pub fn source(&self) -> &Arc<GradedAlgebra> {
        &self.source
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn images(&self) -> &[Vec<Vec<NcPoly>>] {
        &self.images
    }

    pub fn image(&self, x: usize) -> &[Vec<NcPoly>] {
        &self.images[x]
    }

    /// Coordinates of `σ(x)` for generator `x`.
    pub fn image_coords(&self, x: usize) -> &EntryMatrix {
        &self.coords[x]
    }

    /// `σ(w)` for an arbitrary word.
    pub fn eval_word(&self, w: &Word) -> EntryMatrix {
        let alg = &self.source;
        let mut cur = identity_matrix(self.size);
        let mut deg = 0;
        for &l in w.iter().rev() {
            let x = l as usize;
            let dx = alg.alphabet().degree(x);
            if deg + dx > alg.bound() {
                panic!("word of degree beyond bound {}", alg.bound());
            }
            cur = matrix_product(alg, dx, &self.coords[x], deg, &cur);
            deg += dx;
        }
        cur
    }

    /// `σ(p)` for a polynomial in the free algebra.
    pub fn eval_poly(&self, p: &NcPoly) -> EntryMatrix {
        let mut out: Vec<Vec<Accumulator>> = (0..self.size)
            .map(|_| (0..self.size).map(|_| Accumulator::new(self.source.dim(p.degree() as i64).max(1))).collect())
            .collect();
        for (w, c) in p.terms() {
            let m = self.eval_word(w);
            for j in 0..self.size {
                for t in 0..self.size {
                    out[j][t].add_scaled(&m[j][t], c);
                }
            }
        }
        out.into_iter().map(|r| r.into_iter().map(|mut a| a.drain()).collect()).collect()
    }

    /// `σ` of every monomial basis element of `A_d`.
    pub fn table(&self, d: u32) -> &[EntryMatrix] {
        self.tables[d as usize].get_or_init(|| {
            let alg = &self.source;
            alg.basis(d)
                .iter()
                .map(|w| {
                    if w.is_empty() {
                        return identity_matrix(self.size);
                    }
                    let x = w.first().unwrap();
                    let dx = alg.alphabet().degree(x);
                    let rest = w.sub(1, w.len());
                    let k = alg.word_index(d - dx, &rest).expect("suffix of a normal word is normal");
                    matrix_product(alg, dx, &self.coords[x], d - dx, &self.table(d - dx)[k])
                })
                .collect()
        })
    }

    /// `σ(v)` for `v ∈ A_d`.
    pub fn apply(&self, d: u32, v: &SparseVec) -> EntryMatrix {
        let table = self.table(d);
        let n = self.source.dim(d as i64).max(1);
        let mut out = Vec::with_capacity(self.size);
        for j in 0..self.size {
            let mut row = Vec::with_capacity(self.size);
            for t in 0..self.size {
                let mut acc = Accumulator::new(n);
                for (k, c) in v.iter() {
                    acc.add_scaled(&table[*k][j][t], c);
                }
                row.push(acc.drain());
            }
            out.push(row);
        }
        out
    }

    /// `σ_{jt}(v)` for `v ∈ A_d`.
    pub fn apply_entry(&self, j: usize, t: usize, d: u32, v: &SparseVec) -> SparseVec {
        let table = self.table(d);
        let mut acc = Accumulator::new(self.source.dim(d as i64).max(1));
        for (k, c) in v.iter() {
            acc.add_scaled(&table[*k][j][t], c);
        }
        acc.drain()
    }

    /// For a degree-1 generated algebra with `m = 1`: the matrix of `σ` on `A_1`,
    /// column `b` holding the coordinates of `σ(basis_b)`.
    pub fn component_matrix(&self, d: u32) -> Option<ScalarMatrix> {
        if self.size != 1 {
            return None;
        }
        let n = self.source.dim(d as i64);
        let cols: Vec<SparseVec> = self.table(d).iter().map(|m| m[0][0].clone()).collect();
        Some(ScalarMatrix::from_sparse_cols(n, &cols))
    }

    pub fn is_diagonal_embedding(&self) -> bool {
        (0..self.source.ngens()).all(|x| {
            let g = self.source.generator(x);
            (0..self.size).all(|j| (0..self.size).all(|t| if j == t { self.images[x][j][t] == g } else { self.images[x][j][t].is_zero() }))
        })
    }

    /// Check that every defining relation of `A` is sent to the zero matrix.
    pub fn validate(&self) -> Result<SigmaCertificate, SigmaViolation> {
        let alg = &self.source;
        for (r, g) in alg.relations().iter().enumerate() {
            let m = self.eval_poly(g);
            for (j, row) in m.iter().enumerate() {
                for (t, e) in row.iter().enumerate() {
                    if !e.is_zero() {
                        return Err(SigmaViolation {
                            relation: r,
                            text: g.to_text(alg.alphabet()),
                            row: j,
                            col: t,
                            entry: alg.poly(g.degree(), e).to_text(alg.alphabet()),
                        });
                    }
                }
            }
        }
        Ok(SigmaCertificate { relations_checked: alg.relations().len(), size: self.size })
    }

    /// Entries as polynomials, for reports.
    pub fn image_texts(&self) -> Vec<Vec<Vec<String>>> {
        let a = self.source.alphabet();
        self.images.iter().map(|m| m.iter().map(|r| r.iter().map(|p| p.to_text(a)).collect()).collect()).collect()
    }
}

impl PartialEq for MatrixAlgebraHom {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.source, &other.source) && self.images == other.images
    }
}

pub fn validate_sigma(sigma: &MatrixAlgebraHom) -> Result<SigmaCertificate, SigmaViolation> {
    sigma.validate()
}

/// Images of generators of degree `d` under the inverse, solved linearly from the
/// two composition identities. `known` holds the images already found in lower degrees.
fn solve_degree(sigma: &MatrixAlgebraHom, d: u32, known: &[Option<EntryMatrix>]) -> Option<Vec<(usize, EntryMatrix)>> {
    let alg = &sigma.source;
    let m = sigma.size;
    let gens: Vec<usize> = (0..alg.ngens()).filter(|&x| alg.alphabet().degree(x) == d).collect();
    if gens.is_empty() {
        return Some(Vec::new());
    }
    let nb = alg.dim(d as i64);
    let var = |z: usize, j: usize, k: usize, b: usize| ((z * m + j) * m + k) * nb + b;
    let nvars = gens.len() * m * m * nb;
    let slot: Vec<Option<usize>> = (0..alg.ngens()).map(|x| gens.iter().position(|&g| g == x)).collect();
    let mut rows: Vec<SparseVec> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    let push_block = |rows: &mut Vec<SparseVec>, rhs: &mut Vec<Scalar>, coeffs: Vec<Accumulator>, constant: SparseVec, target: SparseVec| {
        // Σ coeffs·u + constant = target, one row per basis coordinate
        let mut coeffs = coeffs;
        for (b, acc) in coeffs.iter_mut().enumerate() {
            rows.push(acc.drain());
            rhs.push(target.get(b) - constant.get(b));
        }
    };
    for (zi, &x) in gens.iter().enumerate() {
        let sx = &sigma.coords[x];
        let xc = alg.coords(&alg.generator(x));
        for i in 0..m {
            for j in 0..m {
                let target = if i == j { xc.clone() } else { SparseVec::new() };
                // Σ_k φ_jk(σ_ik(x)) = δ_ij x
                let mut coeffs: Vec<Accumulator> = (0..nb).map(|_| Accumulator::new(nvars.max(1))).collect();
                let mut constant = Accumulator::new(nb.max(1));
                for k in 0..m {
                    for (wi, c) in sx[i][k].iter() {
                        let w = &alg.basis(d)[*wi];
                        if w.len() == 1 {
                            let z = slot[w.first().unwrap()].unwrap();
                            for b in 0..nb {
                                coeffs[b].add(var(z, j, k, b), c);
                            }
                        } else {
                            let mut cur = identity_matrix(m);
                            let mut deg = 0;
                            for &l in w.iter().rev() {
                                let l = l as usize;
                                let dl = alg.alphabet().degree(l);
                                cur = matrix_product(alg, dl, known[l].as_ref().expect("lower degree image"), deg, &cur);
                                deg += dl;
                            }
                            constant.add_scaled(&cur[j][k], c);
                        }
                    }
                }
                push_block(&mut rows, &mut rhs, coeffs, constant.drain(), target.clone());
                // Σ_k σ_kj(φ_ki(x)) = δ_ij x
                let mut coeffs: Vec<Accumulator> = (0..nb).map(|_| Accumulator::new(nvars.max(1))).collect();
                for k in 0..m {
                    for b in 0..nb {
                        let img = &sigma.table(d)[b][k][j];
                        for (r, c) in img.iter() {
                            coeffs[*r].add(var(zi, k, i, b), c);
                        }
                    }
                }
                push_block(&mut rows, &mut rhs, coeffs, SparseVec::new(), target);
            }
        }
    }
    let mat = ScalarMatrix::from_sparse_rows(nvars, rows);
    let sol = mat.solve(&rhs).ok()??;
    let u = sol.particular;
    Some(
        gens.iter()
            .enumerate()
            .map(|(zi, &x)| {
                let mat = (0..m)
                    .map(|j| (0..m).map(|k| SparseVec::from_dense(&(0..nb).map(|b| u[var(zi, j, k, b)].clone()).collect::<Vec<_>>())).collect())
                    .collect();
                (x, mat)
            })
            .collect(),
    )
}

/// The inverse `φ` of `σ`: `Σ_k φ_jk∘σ_ik = δ_ij id` and `Σ_k σ_kj∘φ_ki = δ_ij id`,
/// both verified on the monomial bases up to the bound.
pub fn invert_sigma(sigma: &MatrixAlgebraHom) -> Option<MatrixAlgebraHom> {
    let alg = sigma.source.clone();
    let mut known: Vec<Option<EntryMatrix>> = vec![None; alg.ngens()];
    let mut degrees: Vec<u32> = alg.alphabet().degrees().to_vec();
    degrees.sort_unstable();
    degrees.dedup();
    for d in degrees {
        for (x, mat) in solve_degree(sigma, d, &known)? {
            known[x] = Some(mat);
        }
    }
    let images = known
        .into_iter()
        .enumerate()
        .map(|(x, mat)| {
            let dx = alg.alphabet().degree(x);
            mat.unwrap().iter().map(|r| r.iter().map(|v| alg.poly(dx, v)).collect()).collect()
        })
        .collect();
    let phi = MatrixAlgebraHom::new(alg, images).ok()?;
    phi.validate().ok()?;
    is_inverse_pair(sigma, &phi).then_some(phi)
}

/// Both composition identities on every basis element up to the bound.
pub fn is_inverse_pair(sigma: &MatrixAlgebraHom, phi: &MatrixAlgebraHom) -> bool {
    let alg = &sigma.source;
    let m = sigma.size;
    if phi.size != m {
        return false;
    }
    for d in 0..=alg.bound() {
        for b in 0..alg.dim(d as i64) {
            let s = &sigma.table(d)[b];
            let p = &phi.table(d)[b];
            for i in 0..m {
                for j in 0..m {
                    let mut first = Accumulator::new(alg.dim(d as i64));
                    let mut second = Accumulator::new(alg.dim(d as i64));
                    for k in 0..m {
                        first.add_scaled(&phi.apply_entry(j, k, d, &s[i][k]), &Scalar::one());
                        second.add_scaled(&sigma.apply_entry(k, j, d, &p[k][i]), &Scalar::one());
                    }
                    let expect = if i == j { SparseVec::unit(b) } else { SparseVec::new() };
                    if first.drain() != expect || second.drain() != expect {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// A σ-derivation `δ: A → A^{⊕m}`, extended from generators by
/// `δ(ab)_j = Σ_t σ_jt(a) δ_t(b) + δ_j(a) b`.
///
/// `δ_j` raises degree by `shift[j]` (the degree of `y_j`).
#[derive(Debug)]
pub struct SigmaDerivation {
    sigma: Arc<MatrixAlgebraHom>,
    shifts: Vec<u32>,
    images: Vec<Vec<NcPoly>>,
    coords: Vec<Vec<SparseVec>>,
    tables: Vec<OnceLock<Vec<Vec<SparseVec>>>>,
}

/// A relation of `A` not annihilated by `δ`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("relation {relation} (`{text}`) has nonzero δ_{component} = `{entry}`")]
pub struct DerivationViolation {
    pub relation: usize,
    pub text: String,
    pub component: usize,
    pub entry: String,
}

impl SigmaDerivation {
    pub fn new(sigma: Arc<MatrixAlgebraHom>, shifts: Vec<u32>, images: Vec<Vec<NcPoly>>) -> Result<Self, TwistError> {
        let alg = sigma.source.clone();
        let m = sigma.size;
        if shifts.len() != m || images.len() != alg.ngens() || images.iter().any(|v| v.len() != m) {
            return Err(TwistError::Shape(format!("δ must have {} generator images of length {m}", alg.ngens())));
        }
        let mut coords = Vec::new();
        let mut normalized = Vec::new();
        for (x, v) in images.into_iter().enumerate() {
            let dx = alg.alphabet().degree(x);
            let mut cs = Vec::new();
            let mut ps = Vec::new();
            for (j, p) in v.into_iter().enumerate() {
                let e = dx + shifts[j];
                if !p.is_zero() && p.degree() != e {
                    return Err(TwistError::Degree { what: format!("δ_{j}(generator {x})"), expected: e, found: p.degree() });
                }
                if e > alg.bound() {
                    return Err(TwistError::Bound { needed: e, bound: alg.bound() });
                }
                let c = alg.coords(&p.with_degree(e));
                ps.push(alg.poly(e, &c));
                cs.push(c);
            }
            coords.push(cs);
            normalized.push(ps);
        }
        let tables = (0..=alg.bound()).map(|_| OnceLock::new()).collect();
        Ok(SigmaDerivation { sigma, shifts, images: normalized, coords, tables })
    }

    pub fn zero(sigma: Arc<MatrixAlgebraHom>, shifts: Vec<u32>) -> Self {
        let alg = sigma.source.clone();
        let images = (0..alg.ngens())
            .map(|x| shifts.iter().map(|s| NcPoly::zero(alg.alphabet().degree(x) + s)).collect())
            .collect();
        let tables = (0..=alg.bound()).map(|_| OnceLock::new()).collect();
        let coords = (0..alg.ngens()).map(|_| vec![SparseVec::new(); shifts.len()]).collect();
        SigmaDerivation { sigma, shifts, images, coords, tables }
    }

    pub fn sigma(&self) -> &Arc<MatrixAlgebraHom> {
        &self.sigma
    }

    pub fn shifts(&self) -> &[u32] {
        &self.shifts
    }

    pub fn images(&self) -> &[Vec<NcPoly>] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|v| v.iter().all(|c| c.is_zero()))
    }

    fn max_shift(&self) -> u32 {
        self.shifts.iter().copied().max().unwrap_or(0)
    }

    /// `δ(x·rest)` from `δ(rest)` and the coordinates of `rest ∈ A_d`.
    fn step(&self, x: usize, d: u32, rest: &SparseVec, drest: &[SparseVec]) -> Vec<SparseVec> {
        let alg = &self.sigma.source;
        let dx = alg.alphabet().degree(x);
        let sx = &self.sigma.coords[x];
        (0..self.shifts.len())
            .map(|j| {
                let mut acc = Accumulator::new(alg.dim((dx + d + self.shifts[j]) as i64).max(1));
                for (t, dt) in drest.iter().enumerate() {
                    if !sx[j][t].is_zero() && !dt.is_zero() {
                        acc.add_scaled(&alg.mul(dx, &sx[j][t], d + self.shifts[t], dt), &Scalar::one());
                    }
                }
                if !self.coords[x][j].is_zero() && !rest.is_zero() {
                    acc.add_scaled(&alg.mul(dx + self.shifts[j], &self.coords[x][j], d, rest), &Scalar::one());
                }
                acc.drain()
            })
            .collect()
    }

    /// `δ(w)` for an arbitrary word, or `None` when it leaves the bound.
    pub fn eval_word(&self, w: &Word) -> Option<Vec<SparseVec>> {
        let alg = &self.sigma.source;
        if alg.alphabet().word_degree(w) + self.max_shift() > alg.bound() {
            return None;
        }
        let mut cur = alg.unit();
        let mut dcur = vec![SparseVec::new(); self.shifts.len()];
        let mut deg = 0;
        for &l in w.iter().rev() {
            let x = l as usize;
            dcur = self.step(x, deg, &cur, &dcur);
            cur = alg.left_letter(x, deg, &cur);
            deg += alg.alphabet().degree(x);
        }
        Some(dcur)
    }

    /// `δ` of each basis element of `A_d`; requires `d + max shift ≤ bound`.
    pub fn table(&self, d: u32) -> &[Vec<SparseVec>] {
        self.tables[d as usize].get_or_init(|| {
            let alg = &self.sigma.source;
            assert!(d + self.max_shift() <= alg.bound(), "δ of degree {d} leaves the bound");
            alg.basis(d)
                .iter()
                .map(|w| {
                    if w.is_empty() {
                        return vec![SparseVec::new(); self.shifts.len()];
                    }
                    let x = w.first().unwrap();
                    let dx = alg.alphabet().degree(x);
                    let rest = w.sub(1, w.len());
                    let k = alg.word_index(d - dx, &rest).unwrap();
                    self.step(x, d - dx, &SparseVec::unit(k), &self.table(d - dx)[k])
                })
                .collect()
        })
    }

    /// `δ(v)` for `v ∈ A_d`.
    pub fn apply(&self, d: u32, v: &SparseVec) -> Vec<SparseVec> {
        let alg = &self.sigma.source;
        let table = self.table(d);
        (0..self.shifts.len())
            .map(|j| {
                let mut acc = Accumulator::new(alg.dim((d + self.shifts[j]) as i64).max(1));
                for (k, c) in v.iter() {
                    acc.add_scaled(&table[*k][j], c);
                }
                acc.drain()
            })
            .collect()
    }

    /// Every relation of `A` must be sent to zero.
    pub fn validate(&self) -> Result<(), TwistError> {
        let alg = &self.sigma.source;
        for (r, g) in alg.relations().iter().enumerate() {
            let mut total: Vec<Accumulator> =
                self.shifts.iter().map(|s| Accumulator::new(alg.dim((g.degree() + s) as i64).max(1))).collect();
            for (w, c) in g.terms() {
                let v = self.eval_word(w).ok_or(TwistError::Bound { needed: g.degree() + self.max_shift(), bound: alg.bound() })?;
                for (j, e) in v.iter().enumerate() {
                    total[j].add_scaled(e, c);
                }
            }
            for (j, acc) in total.iter_mut().enumerate() {
                let e = acc.drain();
                if !e.is_zero() {
                    return Err(TwistError::Derivation(DerivationViolation {
                        relation: r,
                        text: g.to_text(alg.alphabet()),
                        component: j,
                        entry: alg.poly(g.degree() + self.shifts[j], &e).to_text(alg.alphabet()),
                    }));
                }
            }
        }
        Ok(())
    }
}
