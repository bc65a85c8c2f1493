use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::exactla::Scalar;
use crate::freealg::{parse_expr_of_degree, parse_expr_with, Alphabet, NcPoly};
use crate::galgebra::GradedAlgebra;
use crate::twist::{MatrixAlgebraHom, SigmaDerivation, TwistData};

/// A problem file: two presented algebras and twisting data, as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub name: String,
    /// `"rational"` or a prime
    #[serde(default = "default_field")]
    pub field: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
    pub a: AlgebraSpec,
    pub b: AlgebraSpec,
    /// per generator of `A`, the `m × m` matrix `σ(x)`
    pub sigma: BTreeMap<String, Vec<Vec<String>>>,
    /// per generator of `A`, the vector `δ(x)`
    #[serde(default)]
    pub delta: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub bounds: Option<BoundsSpec>,
    #[serde(default)]
    pub assertions: AssertionSpec,
}

fn default_field() -> String {
    "rational".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub generators: Vec<String>,
    #[serde(default)]
    pub degrees: Option<Vec<u32>>,
    #[serde(default)]
    pub relations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    pub max_degree: Option<u32>,
    pub max_homological: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertionSpec {
    #[serde(default)]
    pub noetherian: bool,
    #[serde(default)]
    pub koszul: bool,
}

/// A parse or validation error, with a location inside the file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{location}: {message}")]
pub struct ProblemError {
    pub location: String,
    pub message: String,
}

fn err(location: impl Into<String>, message: impl ToString) -> ProblemError {
    ProblemError { location: location.into(), message: message.to_string() }
}

/// The field as a prime modulus, `None` for the rationals.
pub fn parse_field(text: &str) -> Result<Option<u64>, ProblemError> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("rational") || t.eq_ignore_ascii_case("q") {
        return Ok(None);
    }
    let p: u64 = t.parse().map_err(|_| err("field", format!("expected `rational` or a prime, found `{t}`")))?;
    let prime = p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
    if !prime {
        return Err(err("field", format!("{p} is not prime")));
    }
    Ok(Some(p))
}

/// The algebras and twisting data built from a problem file.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub modulus: Option<u64>,
    pub parameters: BTreeMap<String, Scalar>,
    pub max_degree: u32,
    pub max_homological: usize,
    pub data: TwistData,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        serde_json::from_str(text).map_err(|e| err(format!("line {}, column {}", e.line(), e.column()), e))
    }

    /// Substitute parameters, parse every expression and build the algebras through `max_degree`.
    pub fn build(
        &self,
        overrides: &BTreeMap<String, String>,
        field: Option<&str>,
        max_degree: Option<u32>,
        max_homological: Option<usize>,
    ) -> Result<Problem, ProblemError> {
        let modulus = parse_field(field.unwrap_or(&self.field))?;
        let mut raw = self.parameters.clone();
        raw.extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
        let mut parameters = BTreeMap::new();
        for (k, v) in &raw {
            let s: Scalar = v.parse().map_err(|e| err(format!("parameters.{k}"), e))?;
            parameters.insert(k.clone(), s.in_field(modulus));
        }
        let bounds = self.bounds.unwrap_or(BoundsSpec { max_degree: None, max_homological: None });
        let d = max_degree.or(bounds.max_degree).unwrap_or(8);
        let h = max_homological.or(bounds.max_homological).unwrap_or(6);
        let a = build_algebra("a", &self.a, &parameters, modulus, d)?;
        let b = build_algebra("b", &self.b, &parameters, modulus, d)?;
        let m = b.ngens();
        let mut images = Vec::with_capacity(a.ngens());
        for x in 0..a.ngens() {
            let name = a.alphabet().name(x);
            let loc = format!("sigma.{name}");
            let rows = self.sigma.get(name).ok_or_else(|| err(&loc, "missing matrix for this generator"))?;
            if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                return Err(err(&loc, format!("expected a {m}×{m} matrix")));
            }
            let dx = a.alphabet().degree(x);
            let mut mat = Vec::with_capacity(m);
            for (j, row) in rows.iter().enumerate() {
                let mut out = Vec::with_capacity(m);
                for (t, text) in row.iter().enumerate() {
                    let p = parse_expr_of_degree(text, a.alphabet(), &parameters, dx).map_err(|e| err(format!("{loc}[{j}][{t}]"), e))?;
                    out.push(p.in_field(modulus));
                }
                mat.push(out);
            }
            images.push(mat);
        }
        for key in self.sigma.keys() {
            if a.alphabet().index_of(key).is_none() {
                return Err(err(format!("sigma.{key}"), "not a generator of A"));
            }
        }
        let sigma = Arc::new(MatrixAlgebraHom::new(a.clone(), images).map_err(|e| err("sigma", e))?);
        let delta = match &self.delta {
            None => None,
            Some(map) => {
                let mut imgs = Vec::with_capacity(a.ngens());
                for x in 0..a.ngens() {
                    let name = a.alphabet().name(x);
                    let loc = format!("delta.{name}");
                    let dx = a.alphabet().degree(x);
                    let row = match map.get(name) {
                        Some(r) => r.clone(),
                        None => vec!["0".to_string(); m],
                    };
                    if row.len() != m {
                        return Err(err(&loc, format!("expected {m} entries")));
                    }
                    let mut out = Vec::with_capacity(m);
                    for (j, text) in row.iter().enumerate() {
                        let deg = dx + b.alphabet().degree(j);
                        let p = parse_expr_of_degree(text, a.alphabet(), &parameters, deg).map_err(|e| err(format!("{loc}[{j}]"), e))?;
                        out.push(p.in_field(modulus));
                    }
                    imgs.push(out);
                }
                for key in map.keys() {
                    if a.alphabet().index_of(key).is_none() {
                        return Err(err(format!("delta.{key}"), "not a generator of A"));
                    }
                }
                let shifts = b.alphabet().degrees().to_vec();
                Some(Arc::new(SigmaDerivation::new(sigma.clone(), shifts, imgs).map_err(|e| err("delta", e))?))
            }
        };
        let data = TwistData::new(a, b, sigma, delta).map_err(|e| err("sigma", e))?;
        Ok(Problem { name: self.name.clone(), modulus, parameters, max_degree: d, max_homological: h, data })
    }
}

fn build_algebra(
    key: &str,
    spec: &AlgebraSpec,
    params: &BTreeMap<String, Scalar>,
    modulus: Option<u64>,
    bound: u32,
) -> Result<Arc<GradedAlgebra>, ProblemError> {
    let degrees = spec.degrees.clone().unwrap_or_else(|| vec![1; spec.generators.len()]);
    if degrees.len() != spec.generators.len() {
        return Err(err(format!("{key}.degrees"), "one degree per generator expected"));
    }
    let alph = Alphabet::new(spec.generators.clone(), degrees).map_err(|e| err(format!("{key}.generators"), e))?;
    let mut rels: Vec<NcPoly> = Vec::with_capacity(spec.relations.len());
    for (i, text) in spec.relations.iter().enumerate() {
        let p = parse_expr_with(text, &alph, params).map_err(|e| err(format!("{key}.relations[{i}]"), e))?;
        rels.push(p.in_field(modulus));
    }
    let alg = GradedAlgebra::new(&alph, &rels, bound).map_err(|e| err(format!("{key}.relations"), e))?;
    Ok(Arc::new(alg))
}
