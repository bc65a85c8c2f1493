//! File-driven front end: problem files in, reports out.

mod problem;
mod report;
mod run;

pub use problem::{parse_field, AlgebraSpec, AssertionSpec, BoundsSpec, Problem, ProblemError, ProblemFile};
pub use report::{
    Assertions, Bounds, DetReport, ExtSummary, HdetReport, HilbertTables, Hypothesis, HypothesisStatus, NakayamaReport,
    PhiEntry, Report, ResolutionSummary, TwistCertificate,
};
pub use run::{run, Command, RunOptions, EXIT_OK, EXIT_PARSE, EXIT_UNDETERMINED, EXIT_VERIFICATION};

/// Split `k=v`.
pub fn parse_param(text: &str) -> Result<(String, String), String> {
    let (k, v) = text.split_once('=').ok_or_else(|| format!("expected k=v, found `{text}`"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(format!("empty parameter name in `{text}`"));
    }
    Ok((k.to_string(), v.trim().to_string()))
}
