use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::homalg::{AsRegularReport, AsRegularity, TauEReport};
use crate::nakayama::Provenance;

/// Everything a command computed, in a fixed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub problem: String,
    pub field: String,
    pub parameters: BTreeMap<String, String>,
    pub bounds: Bounds,
    pub assertions: Assertions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hilbert: Option<HilbertTables>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<TwistCertificate>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub resolutions: BTreeMap<String, ResolutionSummary>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ext: BTreeMap<String, ExtSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hdet: Option<HdetReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub det: Option<DetReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nakayama: Option<NakayamaReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_e: Option<TauEReport>,
    pub caveats: Vec<String>,
    pub failures: Vec<String>,
    pub undetermined: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_degree: u32,
    pub max_homological: usize,
}

/// User assertions, never computed. Both attach to the associated algebra `A ⊗^τ̄ B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertions {
    pub noetherian: bool,
    pub koszul: bool,
    pub applies_to: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    /// checked on every bidegree the bounds determine
    Verified,
    Asserted,
    NotAsserted,
    Undetermined,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub status: HypothesisStatus,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertTables {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// `None` when `C` could not be built
    pub c: Option<Vec<usize>>,
    pub convolution: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistCertificate {
    pub certified: bool,
    /// number of `(generator, relation)` checks behind `σ` being an algebra map
    pub sigma_checks: Option<usize>,
    pub delta: Option<bool>,
    pub sigma_invertible: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionSummary {
    /// degree shifts of `V_n`
    pub betti: Vec<Vec<u32>>,
    pub terminated: bool,
    pub pure: bool,
    pub purity_witness: Option<usize>,
    pub complex: bool,
    pub minimal: bool,
    pub exactness_checked: usize,
    pub exactness_failures: Vec<(usize, u32)>,
    pub euler_characteristic: bool,
    pub as_regular: AsRegularReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtSummary {
    pub dims: Vec<usize>,
    /// `bigraded[n][j] = dim E^n_{-j}`
    pub bigraded: Vec<Vec<usize>>,
    pub associativity_checked: Option<usize>,
    pub choice_independence_checked: Option<usize>,
    pub frobenius_relation_checked: Option<usize>,
    pub spot_check_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HdetReport {
    pub hypotheses: Vec<Hypothesis>,
    pub matrix: Vec<Vec<String>>,
    pub determinant: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiEntry {
    pub position: usize,
    pub size: usize,
    pub unique: bool,
    /// per generator of `A`, the matrix `φ_i(x)`
    pub images: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetReport {
    pub hypotheses: Vec<Hypothesis>,
    pub phi: Vec<PhiEntry>,
    pub right_linearity_checked: usize,
    pub images: Vec<String>,
    /// degree-one matrix, columns are images
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NakayamaReport {
    pub hypotheses: Vec<Hypothesis>,
    pub mu_a: Vec<String>,
    pub mu_b: Vec<String>,
    pub det: Vec<String>,
    pub hdet: Vec<Vec<String>>,
    pub restriction_a: Vec<String>,
    pub y_block: Vec<Vec<String>>,
    pub tails: Vec<String>,
    pub tail_freedom: usize,
    pub provenance: Provenance,
    pub mu_c: Vec<String>,
    pub oracle: Option<Vec<String>>,
    pub agreement: Option<bool>,
}

fn matrix_text(out: &mut String, indent: &str, m: &[Vec<String>]) {
    for row in m {
        let _ = writeln!(out, "{indent}[{}]", row.join(", "));
    }
}

fn hypotheses_text(out: &mut String, hs: &[Hypothesis]) {
    for h in hs {
        let status = serde_json::to_value(h.status).unwrap();
        let _ = write!(out, "    {}: {}", h.name, status.as_str().unwrap());
        if !h.detail.is_empty() {
            let _ = write!(out, " ({})", h.detail);
        }
        out.push('\n');
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.command, self.problem);
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(
            out,
            "field {}; parameters [{}]; D={} H={}",
            self.field,
            params.join(", "),
            self.bounds.max_degree,
            self.bounds.max_homological
        );
        let _ = writeln!(
            out,
            "asserted: noetherian={} koszul={} (for {})",
            self.assertions.noetherian, self.assertions.koszul, self.assertions.applies_to
        );
        if let Some(h) = &self.hilbert {
            let _ = writeln!(out, "hilbert");
            let _ = writeln!(out, "  A: {}", join(&h.a));
            let _ = writeln!(out, "  B: {}", join(&h.b));
            match &h.c {
                Some(c) => {
                    let _ = writeln!(out, "  C: {}", join(c));
                }
                None => {
                    let _ = writeln!(out, "  C: unavailable");
                }
            }
            let _ = writeln!(out, "  A*B: {}", join(&h.convolution));
        }
        if let Some(t) = &self.twist {
            let _ = writeln!(out, "twist: {} ({})", if t.certified { "certified" } else { "not certified" }, t.detail);
            let _ = writeln!(out, "  sigma invertible: {}", t.sigma_invertible);
        }
        for (name, r) in &self.resolutions {
            let _ = writeln!(out, "resolution of {name}");
            for (n, s) in r.betti.iter().enumerate() {
                let _ = writeln!(out, "  V_{n}: {{{}}}", join(s));
            }
            let _ = writeln!(
                out,
                "  terminated={} pure={} complex={} minimal={} exact={} euler={}",
                r.terminated,
                r.pure,
                r.complex,
                r.minimal,
                r.exactness_failures.is_empty(),
                r.euler_characteristic
            );
            let status = match &r.as_regular.status {
                AsRegularity::Regular { h, l } => format!("AS-regular of type ({h}, {l}) within bounds"),
                AsRegularity::NotRegular { reason } => format!("not AS-regular: {reason}"),
                AsRegularity::Undetermined { reason } => format!("undetermined: {reason}"),
            };
            let _ = writeln!(out, "  {status}");
        }
        for (name, e) in &self.ext {
            let _ = writeln!(out, "Ext of {name}: {}", join(&e.dims));
            if let Some(n) = e.associativity_checked {
                let _ = writeln!(out, "  associativity: {n} triples");
            }
            if let Some(n) = e.choice_independence_checked {
                let _ = writeln!(out, "  lifting-choice independence: {n} products");
            }
            if let Some(n) = e.frobenius_relation_checked {
                let _ = writeln!(out, "  Frobenius relation: {n} pairs");
            }
            if let Some(f) = &e.spot_check_failure {
                let _ = writeln!(out, "  FAILED: {f}");
            }
        }
        if let Some(h) = &self.hdet {
            let _ = writeln!(out, "hdet (determinant {})", h.determinant);
            matrix_text(&mut out, "  ", &h.matrix);
            hypotheses_text(&mut out, &h.hypotheses);
        }
        if let Some(d) = &self.det {
            let _ = writeln!(out, "det sigma: {}", d.images.join(", "));
            for p in &d.phi {
                let _ = writeln!(out, "  phi_{} ({}x{}, unique={})", p.position, p.size, p.size, p.unique);
                for (x, m) in &p.images {
                    let _ = writeln!(out, "    {x}:");
                    matrix_text(&mut out, "      ", m);
                }
            }
            hypotheses_text(&mut out, &d.hypotheses);
        }
        if let Some(n) = &self.nakayama {
            let _ = writeln!(out, "nakayama");
            let _ = writeln!(out, "  mu_A: {}", n.mu_a.join(", "));
            let _ = writeln!(out, "  mu_B: {}", n.mu_b.join(", "));
            let _ = writeln!(out, "  det: {}", n.det.join(", "));
            let _ = writeln!(out, "  mu_C: {}", n.mu_c.join(", "));
            let _ = writeln!(out, "  tails: {} (freedom {})", n.tails.join(", "), n.tail_freedom);
            if let Some(o) = &n.oracle {
                let _ = writeln!(out, "  oracle: {}", o.join(", "));
            }
            if let Some(a) = n.agreement {
                let _ = writeln!(out, "  agreement: {a}");
            }
            hypotheses_text(&mut out, &n.hypotheses);
        }
        if let Some(t) = &self.tau_e {
            let _ = writeln!(
                out,
                "tau_E: {} (factorization {} bidegrees, sign law {} pairs, boundary {} pairs)",
                if t.passed() { "passed" } else { "FAILED" },
                t.factorization_checked,
                t.sign_law_checked,
                t.boundary_checked
            );
        }
        for c in &self.caveats {
            let _ = writeln!(out, "note: {c}");
        }
        for u in &self.undetermined {
            let _ = writeln!(out, "undetermined: {u}");
        }
        for f in &self.failures {
            let _ = writeln!(out, "FAILURE: {f}");
        }
        out
    }
}
