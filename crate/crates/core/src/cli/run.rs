use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::problem::Problem;
use super::report::*;
use crate::exactla::ScalarMatrix;
use crate::galgebra::GradedAlgebra;
use crate::homalg::{
    as_regular_report, build_phi_tower, det_sigma, frobenius_data, hdet, tau_e_restrictions, AsRegularity, ExtAlgebra,
    HomalgError, PhiTower,
};
use crate::nakayama::{nakayama_of_base, nakayama_of_twisted, nakayama_oracle, GradedAutomorphism, NakayamaError, TwistedInvariants};
use crate::resolution::{minimal_resolution, FreeResolution, ResolutionError};
use crate::twist::{build_twisted_tensor, convolution, invert_sigma, TwistError, TwistedTensorAlgebra};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Hilbert,
    CheckTwist,
    Resolve,
    Ext,
    Hdet,
    Det,
    Nakayama,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Hilbert => "hilbert",
            Command::CheckTwist => "check-twist",
            Command::Resolve => "resolve",
            Command::Ext => "ext",
            Command::Hdet => "hdet",
            Command::Det => "det",
            Command::Nakayama => "nakayama",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub oracle: bool,
    pub assert_noetherian: bool,
    pub assert_koszul: bool,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_UNDETERMINED: i32 = 3;
pub const EXIT_PARSE: i32 = 4;

impl Report {
    pub fn exit_code(&self) -> i32 {
        if !self.failures.is_empty() {
            EXIT_VERIFICATION
        } else if !self.undetermined.is_empty() {
            EXIT_UNDETERMINED
        } else {
            EXIT_OK
        }
    }
}

/// Failures caused by the truncation rather than by the data.
fn is_bound_error(e: &HomalgError) -> bool {
    matches!(
        e,
        HomalgError::Resolution(ResolutionError::BoundTooSmall { .. })
            | HomalgError::Twist(TwistError::Bound { .. })
            | HomalgError::NotRegular(_)
    )
}

fn nakayama_bound_error(e: &NakayamaError) -> bool {
    matches!(e, NakayamaError::Homalg(h) if is_bound_error(h))
}

struct Pipeline<'a> {
    p: &'a Problem,
    opts: RunOptions,
    report: Report,
    c: OnceCell<Result<Arc<TwistedTensorAlgebra>, String>>,
    res: BTreeMap<&'static str, Arc<FreeResolution>>,
    tower: OnceCell<Result<Arc<PhiTower>, HomalgError>>,
}

fn hyp(name: &str, status: HypothesisStatus, detail: impl Into<String>) -> Hypothesis {
    Hypothesis { name: name.into(), status, detail: detail.into() }
}

fn regularity_hyp(name: &str, res: &FreeResolution) -> Hypothesis {
    match as_regular_report(res).status {
        AsRegularity::Regular { h, l } => hyp(name, HypothesisStatus::Verified, format!("type ({h}, {l}) within bounds")),
        AsRegularity::NotRegular { reason } => hyp(name, HypothesisStatus::Failed, reason),
        AsRegularity::Undetermined { reason } => hyp(name, HypothesisStatus::Undetermined, reason),
    }
}

fn strings(m: &ScalarMatrix) -> Vec<Vec<String>> {
    m.to_strings()
}

impl<'a> Pipeline<'a> {
    fn new(command: Command, p: &'a Problem, opts: RunOptions) -> Self {
        let report = Report {
            command: command.name().into(),
            problem: p.name.clone(),
            field: p.modulus.map_or_else(|| "rational".to_string(), |m| m.to_string()),
            parameters: p.parameters.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            bounds: Bounds { max_degree: p.max_degree, max_homological: p.max_homological },
            assertions: Assertions {
                noetherian: opts.assert_noetherian,
                koszul: opts.assert_koszul,
                applies_to: "associated twisted tensor product".into(),
            },
            hilbert: None,
            twist: None,
            resolutions: BTreeMap::new(),
            ext: BTreeMap::new(),
            hdet: None,
            det: None,
            nakayama: None,
            tau_e: None,
            caveats: vec![format!(
                "all homological statements hold within degree {} and homological degree {}",
                p.max_degree, p.max_homological
            )],
            failures: Vec::new(),
            undetermined: Vec::new(),
        };
        Pipeline { p, opts, report, c: OnceCell::new(), res: BTreeMap::new(), tower: OnceCell::new() }
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.report.failures.push(msg.into());
    }

    fn undetermined(&mut self, msg: impl Into<String>) {
        self.report.undetermined.push(msg.into());
    }

    fn note_hypotheses(&mut self, what: &str, hs: &[Hypothesis]) {
        for h in hs {
            match h.status {
                HypothesisStatus::Failed => self.fail(format!("{what}: hypothesis `{}` fails", h.name)),
                HypothesisStatus::Undetermined => self.undetermined(format!("{what}: hypothesis `{}` undetermined", h.name)),
                _ => {}
            }
        }
    }

    fn c(&self) -> Result<Arc<TwistedTensorAlgebra>, String> {
        self.c
            .get_or_init(|| build_twisted_tensor(&self.p.data, self.p.max_degree).map(Arc::new).map_err(|e| e.to_string()))
            .clone()
    }

    fn algebra(&self, key: &str) -> Option<Arc<GradedAlgebra>> {
        match key {
            "A" => Some(self.p.data.a().clone()),
            "B" => Some(self.p.data.b().clone()),
            _ => self.c().ok().map(|c| c.algebra().clone()),
        }
    }

    fn resolution(&mut self, key: &'static str) -> Option<Arc<FreeResolution>> {
        if let Some(r) = self.res.get(key) {
            return Some(r.clone());
        }
        let alg = self.algebra(key)?;
        match minimal_resolution(alg, self.p.max_homological) {
            Ok(r) => {
                let r = Arc::new(r);
                self.res.insert(key, r.clone());
                Some(r)
            }
            Err(e) => {
                self.undetermined(format!("resolution of {key}: {e}"));
                None
            }
        }
    }

    fn tower(&mut self) -> Result<Arc<PhiTower>, HomalgError> {
        if self.tower.get().is_none() {
            let t = match self.resolution("B") {
                Some(q) => build_phi_tower(&self.p.data, q, self.p.max_degree).map(Arc::new),
                None => Err(HomalgError::Resolution(ResolutionError::Exhausted { position: 0 })),
            };
            let _ = self.tower.set(t);
        }
        self.tower.get().unwrap().clone()
    }

    fn hilbert(&mut self) {
        let a = self.p.data.a().hilbert_function();
        let b = self.p.data.b().hilbert_function();
        let conv = convolution(&a, &b, self.p.max_degree);
        let c = match self.c() {
            Ok(c) => Some(c.algebra().hilbert_function()),
            Err(e) => {
                self.fail(format!("C: {e}"));
                None
            }
        };
        self.report.hilbert = Some(HilbertTables { a, b, c, convolution: conv });
    }

    fn check_twist(&mut self) {
        let sigma = self.p.data.sigma().clone();
        let mut detail = Vec::new();
        let sigma_checks = match sigma.validate() {
            Ok(cert) => Some(cert.relations_checked),
            Err(v) => {
                detail.push(format!("σ is not an algebra map: {v}"));
                None
            }
        };
        let delta = self.p.data.delta().map(|d| match d.validate() {
            Ok(()) => true,
            Err(e) => {
                detail.push(format!("δ is not a σ-derivation: {e}"));
                false
            }
        });
        let sigma_invertible = invert_sigma(&sigma).is_some();
        if !sigma_invertible {
            detail.push("σ is not invertible".into());
        }
        let built = self.c();
        if let Err(e) = &built {
            detail.push(e.clone());
        }
        let certified = sigma_checks.is_some() && delta != Some(false) && sigma_invertible && built.is_ok();
        if certified {
            detail.push(format!("Hilbert function of C equals the convolution through degree {}", self.p.max_degree));
        } else {
            self.fail(format!("twist not certified: {}", detail.join("; ")));
        }
        self.report.twist = Some(TwistCertificate { certified, sigma_checks, delta, sigma_invertible, detail: detail.join("; ") });
    }

    fn resolve(&mut self) {
        for key in ["A", "B", "C"] {
            if key == "C" && self.c().is_err() {
                self.undetermined("resolution of C: C is not available");
                continue;
            }
            let Some(r) = self.resolution(key) else { continue };
            let purity = r.is_pure();
            let ex = r.exactness();
            let summary = ResolutionSummary {
                betti: (0..r.len()).map(|n| r.shifts(n).to_vec()).collect(),
                terminated: r.terminated(),
                pure: purity.pure,
                purity_witness: purity.witness,
                complex: r.is_complex(),
                minimal: r.is_minimal(),
                exactness_checked: ex.checked,
                exactness_failures: ex.failures.clone(),
                euler_characteristic: r.euler_characteristic_holds(),
                as_regular: as_regular_report(&r),
            };
            if !summary.complex || !summary.minimal || !summary.exactness_failures.is_empty() || !summary.euler_characteristic {
                self.fail(format!("resolution of {key} fails a self-check"));
            }
            self.report.resolutions.insert(key.into(), summary);
        }
    }

    fn ext(&mut self) {
        for key in ["A", "B", "C"] {
            if key == "C" && self.c().is_err() {
                continue;
            }
            let Some(r) = self.resolution(key) else { continue };
            let e = ExtAlgebra::new(r.clone());
            let maxj = (0..=e.top()).flat_map(|n| r.shifts(n).iter().copied()).max().unwrap_or(0);
            let bigraded = (0..=e.top()).map(|n| (0..=maxj).map(|j| e.bidegree_dim(n, j)).collect()).collect();
            let mut failure = None;
            let assoc = match e.check_associativity() {
                Ok(n) => Some(n),
                Err(t) => {
                    failure = Some(format!("associativity fails at {t:?}"));
                    None
                }
            };
            let choice = match e.check_choice_independence() {
                Ok(n) => Some(n),
                Err(t) => {
                    failure = Some(format!("lifting choice changes the product at {t:?}"));
                    None
                }
            };
            let dims = e.dims();
            let frob = if r.terminated() && r.shifts(r.top()).len() == 1 {
                match frobenius_data(e) {
                    Ok(f) => match f.check_relation() {
                        Ok(n) => Some(n),
                        Err(t) => {
                            failure = Some(format!("Frobenius relation fails at {t:?}"));
                            None
                        }
                    },
                    Err(err) => {
                        failure = Some(err.to_string());
                        None
                    }
                }
            } else {
                None
            };
            if let Some(f) = &failure {
                self.fail(format!("Ext of {key}: {f}"));
            }
            self.report.ext.insert(
                key.into(),
                ExtSummary {
                    dims,
                    bigraded,
                    associativity_checked: assoc,
                    choice_independence_checked: choice,
                    frobenius_relation_checked: frob,
                    spot_check_failure: failure,
                },
            );
        }
    }

    fn hdet(&mut self) -> Option<ScalarMatrix> {
        let pres = self.resolution("A")?;
        let hs = vec![regularity_hyp("A is AS-regular", &pres)];
        self.note_hypotheses("hdet", &hs);
        match hdet(self.p.data.sigma(), &pres) {
            Ok(m) => {
                self.report.hdet = Some(HdetReport { hypotheses: hs, matrix: strings(&m), determinant: m.determinant().to_string() });
                Some(m)
            }
            Err(e) => {
                if is_bound_error(&e) {
                    self.undetermined(format!("hdet: {e}"));
                } else {
                    self.fail(format!("hdet: {e}"));
                }
                None
            }
        }
    }

    fn b_hypotheses(&mut self) -> Vec<Hypothesis> {
        let Some(q) = self.resolution("B") else {
            return vec![hyp("B is AS-regular", HypothesisStatus::Undetermined, "no resolution")];
        };
        let pure = q.is_pure();
        vec![
            regularity_hyp("B is AS-regular", &q),
            hyp(
                "the resolution of B is pure",
                if pure.pure { HypothesisStatus::Verified } else { HypothesisStatus::Failed },
                pure.witness.map_or(String::new(), |w| format!("first impure position {w}")),
            ),
        ]
    }

    fn det(&mut self) -> Option<GradedAutomorphism> {
        let hs = self.b_hypotheses();
        self.note_hypotheses("det", &hs);
        if self.p.data.has_delta() {
            self.report.caveats.push("the φ tower and det σ are computed over the associated algebra (δ dropped)".into());
        }
        let tower = match self.tower() {
            Ok(t) => t,
            Err(e) => {
                if is_bound_error(&e) {
                    self.undetermined(format!("φ tower: {e}"));
                } else {
                    self.fail(format!("φ tower: {e}"));
                }
                return None;
            }
        };
        let alph = self.p.data.a().alphabet().clone();
        let phi = (0..tower.len())
            .map(|i| {
                let texts = tower.phi(i).image_texts();
                PhiEntry {
                    position: i,
                    size: tower.phi(i).size(),
                    unique: tower.unique(i),
                    images: texts.into_iter().enumerate().map(|(x, m)| (alph.name(x).to_string(), m)).collect(),
                }
            })
            .collect();
        let linear = match tower.check_right_linearity() {
            Ok(n) => n,
            Err(t) => {
                self.fail(format!("φ tower is not right linear at {t:?}"));
                0
            }
        };
        match det_sigma(&tower) {
            Ok(d) => {
                self.report.det = Some(DetReport {
                    hypotheses: hs,
                    phi,
                    right_linearity_checked: linear,
                    images: d.image_texts(),
                    matrix: strings(&d.degree_one_matrix()),
                });
                Some(d)
            }
            Err(e) => {
                if is_bound_error(&e) {
                    self.undetermined(format!("det σ: {e}"));
                } else {
                    self.fail(format!("det σ: {e}"));
                }
                None
            }
        }
    }

    fn base_nakayama(&mut self, key: &'static str) -> Option<GradedAutomorphism> {
        let r = self.resolution(key)?;
        let alg = self.algebra(key)?;
        let out = frobenius_data(ExtAlgebra::new(r)).map_err(NakayamaError::from).and_then(|f| nakayama_of_base(&alg, &f));
        match out {
            Ok(mu) => Some(mu),
            Err(e) => {
                if nakayama_bound_error(&e) {
                    self.undetermined(format!("μ_{key}: {e}"));
                } else {
                    self.fail(format!("μ_{key}: {e}"));
                }
                None
            }
        }
    }

    fn nakayama(&mut self) {
        let data = self.p.data.clone();
        let mut hs = Vec::new();
        let degree_one = data.a().alphabet().generated_in_degree_one() && data.b().alphabet().generated_in_degree_one();
        hs.push(hyp(
            "A and B are generated in degree one",
            if degree_one { HypothesisStatus::Verified } else { HypothesisStatus::Failed },
            "",
        ));
        if let Some(pres) = self.resolution("A") {
            hs.push(regularity_hyp("A is AS-regular", &pres));
        }
        hs.extend(self.b_hypotheses());
        hs.push(hyp(
            "σ is invertible",
            if invert_sigma(data.sigma()).is_some() { HypothesisStatus::Verified } else { HypothesisStatus::Failed },
            "",
        ));
        let c = self.c();
        hs.push(hyp(
            "τ is a twisting map",
            if c.is_ok() { HypothesisStatus::Verified } else { HypothesisStatus::Failed },
            c.as_ref().err().cloned().unwrap_or_default(),
        ));
        let assertion = if self.opts.assert_noetherian {
            hyp("the associated twisted tensor product is noetherian", HypothesisStatus::Asserted, "")
        } else if self.opts.assert_koszul {
            hyp("the associated twisted tensor product is Koszul", HypothesisStatus::Asserted, "")
        } else {
            self.report.caveats.push("neither noetherian nor Koszul was asserted; the formula is reported unconditionally".into());
            hyp("the associated twisted tensor product is noetherian or Koszul", HypothesisStatus::NotAsserted, "")
        };
        hs.push(assertion);
        self.note_hypotheses("nakayama", &hs);
        let Ok(c) = c else { return };
        let mu_a = self.base_nakayama("A");
        let mu_b = self.base_nakayama("B");
        let det = self.det();
        let h = self.hdet();
        let (Some(mu_a), Some(mu_b), Some(det), Some(h)) = (mu_a, mu_b, det, h) else { return };
        let inv = TwistedInvariants { mu_a: &mu_a, mu_b: &mu_b, det: &det, hdet: &h };
        let mut oracle = None;
        if self.opts.oracle {
            oracle = self.oracle(&c);
        }
        let mut result = nakayama_of_twisted(&c, &inv, oracle.as_ref());
        if matches!(result, Err(NakayamaError::TailsUnderdetermined { .. })) && oracle.is_none() {
            self.report.caveats.push("the tail system is underdetermined; the oracle was consulted".into());
            oracle = self.oracle(&c);
            result = nakayama_of_twisted(&c, &inv, oracle.as_ref());
        }
        let r = match result {
            Ok(r) => r,
            Err(e) => {
                if nakayama_bound_error(&e) || matches!(e, NakayamaError::TailsUnderdetermined { .. }) {
                    self.undetermined(format!("μ_C: {e}"));
                } else {
                    self.fail(format!("μ_C: {e}"));
                }
                return;
            }
        };
        let agreement = oracle.as_ref().map(|o| o.same_as(&r.mu));
        if agreement == Some(false) {
            self.fail("theorem and oracle routes disagree on μ_C");
        }
        let a_alph = data.a().alphabet();
        self.report.nakayama = Some(NakayamaReport {
            hypotheses: hs,
            mu_a: mu_a.image_texts(),
            mu_b: mu_b.image_texts(),
            det: det.image_texts(),
            hdet: strings(&h),
            restriction_a: r.restriction_a.image_texts(),
            y_block: strings(&r.y_block),
            tails: r.tails.iter().map(|t| t.to_text(a_alph)).collect(),
            tail_freedom: r.tail_freedom,
            provenance: r.provenance,
            mu_c: r.mu.image_texts(),
            oracle: oracle.map(|o| o.image_texts()),
            agreement,
        });
    }

    fn oracle(&mut self, c: &TwistedTensorAlgebra) -> Option<GradedAutomorphism> {
        match nakayama_oracle(c.algebra(), self.p.max_homological) {
            Ok((mu, _)) => Some(mu),
            Err(e) => {
                if nakayama_bound_error(&e) {
                    self.undetermined(format!("oracle: {e}"));
                } else {
                    self.fail(format!("oracle: {e}"));
                }
                None
            }
        }
    }

    fn tau_e(&mut self) {
        if self.c().is_err() {
            return;
        }
        let (Some(pres), Some(cres)) = (self.resolution("A"), self.resolution("C")) else { return };
        let Ok(tower) = self.tower() else { return };
        let det = det_sigma(&tower).ok().map(|d| d.degree_one_matrix());
        let h = hdet(self.p.data.sigma(), &pres).ok();
        match tau_e_restrictions(&ExtAlgebra::new(cres), &tower, &pres, det.as_ref(), h.as_ref()) {
            Ok(t) => {
                if !t.passed() {
                    self.fail("the τ_E restriction checks fail");
                }
                self.report.tau_e = Some(t);
            }
            Err(e) => self.undetermined(format!("τ_E checks: {e}")),
        }
    }
}

/// Run one command against a built problem.
pub fn run(command: Command, problem: &Problem, opts: RunOptions) -> Report {
    let mut p = Pipeline::new(command, problem, opts);
    match command {
        Command::Hilbert => p.hilbert(),
        Command::CheckTwist => {
            p.check_twist();
            if let Ok(c) = p.c() {
                let conv = convolution(&problem.data.a().hilbert_function(), &problem.data.b().hilbert_function(), problem.max_degree);
                p.report.hilbert = Some(HilbertTables {
                    a: problem.data.a().hilbert_function(),
                    b: problem.data.b().hilbert_function(),
                    c: Some(c.algebra().hilbert_function()),
                    convolution: conv,
                });
            }
        }
        Command::Resolve => p.resolve(),
        Command::Ext => p.ext(),
        Command::Hdet => {
            p.hdet();
        }
        Command::Det => {
            p.det();
        }
        Command::Nakayama => p.nakayama(),
        Command::All => {
            p.hilbert();
            p.check_twist();
            p.resolve();
            p.ext();
            p.nakayama();
            if p.report.hdet.is_none() {
                p.hdet();
            }
            if p.report.det.is_none() {
                p.det();
            }
            p.tau_e();
        }
    }
    p.report.failures.dedup();
    p.report.undetermined.dedup();
    p.report.caveats.dedup();
    p.report
}
