use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command as Proc;

use gforge::cli::{run, Command, HypothesisStatus, Problem, ProblemFile, Report, RunOptions};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(name: &str, params: &[(&str, &str)]) -> Problem {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    let overrides: BTreeMap<String, String> = params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    ProblemFile::from_json(&text).unwrap().build(&overrides, None, None, None).unwrap()
}

#[test]
fn every_fixture_loads() {
    for name in ["example53.json", "ore.json", "ore_delta.json", "double_ore.json", "classical.json", "flip.json"] {
        let p = load(name, &[]);
        assert!(p.max_degree >= 6, "{name}");
    }
}

#[test]
fn report_round_trips_and_is_deterministic() {
    let p = load("example53.json", &[("p", "1")]);
    let opts = RunOptions { oracle: true, ..Default::default() };
    let r = run(Command::Nakayama, &p, opts);
    let text = r.to_json();
    assert_eq!(Report::from_json(&text).unwrap(), r);
    let again = run(Command::Nakayama, &load("example53.json", &[("p", "1")]), opts).to_json();
    assert_eq!(text, again);
}

#[test]
fn nakayama_example53_with_oracle() {
    let p = load("example53.json", &[("p", "1")]);
    let r = run(Command::Nakayama, &p, RunOptions { oracle: true, ..Default::default() });
    let n = r.nakayama.as_ref().unwrap();
    assert_eq!(n.mu_c[0], "-1/4*x1");
    assert_eq!(n.agreement, Some(true));
    assert_eq!(r.exit_code(), 0);
    // theorem-derived fields name what they consumed
    assert!(n.hypotheses.iter().any(|h| h.name.contains("noetherian") && h.status == HypothesisStatus::NotAsserted));
    assert!(n.hypotheses.iter().any(|h| h.name == "B is AS-regular" && h.status == HypothesisStatus::Verified));
}

#[test]
fn assertions_are_recorded() {
    let p = load("ore.json", &[]);
    let r = run(Command::Nakayama, &p, RunOptions { assert_koszul: true, ..Default::default() });
    assert!(r.assertions.koszul && !r.assertions.noetherian);
    let n = r.nakayama.unwrap();
    assert!(n.hypotheses.iter().any(|h| h.name.contains("Koszul") && h.status == HypothesisStatus::Asserted));
}

#[test]
fn check_twist_flip() {
    let r = run(Command::CheckTwist, &load("flip.json", &[]), RunOptions::default());
    assert!(r.twist.as_ref().unwrap().certified);
    let h = r.hilbert.unwrap();
    assert_eq!(h.c.unwrap(), h.convolution);
}

#[test]
fn hdet_ore_q3() {
    let r = run(Command::Hdet, &load("ore.json", &[("q", "3")]), RunOptions::default());
    assert_eq!(r.hdet.unwrap().matrix, vec![vec!["3".to_string()]]);
}

#[test]
fn non_twisting_data_fails_verification() {
    let text = r#"{
        "a": { "generators": ["x"] },
        "b": { "generators": ["y1", "y2"], "relations": ["y2*y1 - 2*y1*y2"] },
        "sigma": { "x": [["x", "x"], ["0", "x"]] },
        "bounds": { "max_degree": 4, "max_homological": 3 }
    }"#;
    let p = ProblemFile::from_json(text).unwrap().build(&BTreeMap::new(), None, None, None).unwrap();
    let r = run(Command::CheckTwist, &p, RunOptions::default());
    assert!(!r.twist.as_ref().unwrap().certified);
    assert_eq!(r.exit_code(), 2);
}

#[test]
fn truncation_is_undetermined() {
    let text = std::fs::read_to_string(fixture("example53.json")).unwrap();
    let p = ProblemFile::from_json(&text).unwrap().build(&BTreeMap::new(), None, None, Some(2)).unwrap();
    let r = run(Command::Hdet, &p, RunOptions::default());
    assert!(r.hdet.is_none());
    assert_eq!(r.exit_code(), 3);
}

#[test]
fn parse_errors_carry_locations() {
    let text = std::fs::read_to_string(fixture("example53.json")).unwrap().replace("\"-p*x2\"", "\"-p*x2 +\"");
    let e = ProblemFile::from_json(&text).unwrap().build(&BTreeMap::new(), None, None, None).unwrap_err();
    assert_eq!(e.location, "sigma.x1[1][1]");
    let e = ProblemFile::from_json("{\"a\": ").unwrap_err();
    assert!(e.location.starts_with("line 1"));
    let extra = std::fs::read_to_string(fixture("ore.json")).unwrap().replace("\"sigma\": {", "\"sigma\": { \"w\": [[\"0\"]],");
    let e = ProblemFile::from_json(&extra).unwrap().build(&BTreeMap::new(), None, None, None).unwrap_err();
    assert_eq!(e.location, "sigma.w");
    let bad_field = ProblemFile::from_json(&std::fs::read_to_string(fixture("ore.json")).unwrap()).unwrap().build(&BTreeMap::new(), Some("6"), None, None);
    assert_eq!(bad_field.unwrap_err().location, "field");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_gforge");
    let out = Proc::new(bin).args(["hdet", fixture("ore.json").to_str().unwrap(), "--param", "q=3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(r.hdet.unwrap().matrix, vec![vec!["3".to_string()]]);
    let out = Proc::new(bin).args(["hdet", fixture("ore.json").to_str().unwrap(), "--param", "q=oops"]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
    let out = Proc::new(bin)
        .args(["resolve", fixture("flip.json").to_str().unwrap(), "--assert-noetherian", "--assert-koszul"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "conflicting assertions are a usage error");
}
