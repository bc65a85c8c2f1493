//! Acceptance criteria, one line each. Every comparison is exact.

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use gforge::cli::{run, Command, Problem, ProblemFile, Report, RunOptions};
use gforge::exactla::{Accumulator, ColumnEchelon, Scalar, ScalarMatrix, SparseVec};
use gforge::freealg::NcPoly;
use gforge::galgebra::GradedAlgebra;
use gforge::nakayama::nakayama_oracle;
use gforge::resolution::minimal_resolution;
use gforge::twist::build_twisted_tensor;

type Outcome = Result<(), Vec<String>>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn problem(name: &str, params: &[(&str, String)], d: Option<u32>, h: Option<usize>) -> Problem {
    let text = std::fs::read_to_string(fixture(name)).expect("fixture exists");
    let overrides: BTreeMap<String, String> = params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    ProblemFile::from_json(&text).expect("fixture parses").build(&overrides, None, d, h).expect("fixture builds")
}

fn all(p: &Problem) -> Report {
    run(Command::All, p, RunOptions { oracle: true, ..Default::default() })
}

struct Errors(Vec<String>);

impl Errors {
    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, got: T, want: T) {
        if got != want {
            self.0.push(format!("{what}: got {got:?}, want {want:?}"));
        }
    }

    fn ok(&mut self, what: &str, cond: bool) {
        if !cond {
            self.0.push(what.to_string());
        }
    }

    fn done(self) -> Outcome {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(self.0)
        }
    }
}

fn s(v: &[&str]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// Fixture runs shared by several criteria.
struct Runs {
    down_up: Vec<(i64, Report)>,
    ore: Vec<(i64, bool, Report)>,
    double_ore: Vec<((Scalar, Scalar), Report)>,
    classical: Vec<([i64; 4], Report)>,
}

impl Runs {
    fn reports(&self) -> Vec<(String, &Report)> {
        let mut out = Vec::new();
        for (p, r) in &self.down_up {
            out.push((format!("down-up p={p}"), r));
        }
        for (q, d, r) in &self.ore {
            out.push((format!("ore q={q} delta={d}"), r));
        }
        for ((a, b), r) in &self.double_ore {
            out.push((format!("double ore sigma=diag({a},{b})"), r));
        }
        for (m, r) in &self.classical {
            out.push((format!("classical {m:?}"), r));
        }
        out
    }
}

fn classical_matrices() -> Vec<[i64; 4]> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    while out.len() < 5 {
        let m: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-5..=5));
        if m[0] * m[3] - m[1] * m[2] != 0 {
            out.push(m);
        }
    }
    out
}

fn compute_runs() -> Runs {
    let down_up = [1, 2].into_iter().map(|p| (p, all(&problem("example53", &[("p", p.to_string())], None, None)))).collect();
    let mut ore = Vec::new();
    for q in [2, 3] {
        ore.push((q, false, all(&problem("ore", &[("q", q.to_string())], None, None))));
        ore.push((q, true, all(&problem("ore_delta", &[("q", q.to_string())], None, None))));
    }
    let double_ore = [(3, 1, 5, 1), (2, 1, -1, 1), (1, 2, 7, 1)]
        .into_iter()
        .map(|(a, b, c, d)| {
            let (s1, s2) = (Scalar::ratio(a, b), Scalar::ratio(c, d));
            let r = all(&problem("double_ore", &[("s1", s1.to_string()), ("s2", s2.to_string())], None, None));
            ((s1, s2), r)
        })
        .collect();
    let classical = classical_matrices()
        .into_iter()
        .map(|m| {
            let params: Vec<(&str, String)> = ["a", "b", "c", "d"].into_iter().zip(m.iter().map(|v| v.to_string())).collect();
            (m, all(&problem("classical", &params, None, None)))
        })
        .collect();
    Runs { down_up, ore, double_ore, classical }
}

// 1
fn down_up_end_to_end(runs: &Runs) -> Outcome {
    let mut e = Errors(Vec::new());
    // Euler characteristic of the printed resolution: H_A(t) (1 − 2t + 2t³ − t⁴) = 1
    let mut series = [0i64; 9];
    for n in 0..9 {
        let at = |k: usize| if n >= k { series[n - k] } else { 0 };
        series[n] = i64::from(n == 0) + 2 * at(1) - 2 * at(3) + at(4);
    }
    let printed = vec![1usize, 2, 4, 6, 9, 12, 16, 20, 25];
    e.eq("Euler-series oracle vs printed Hilbert function", series.iter().map(|&v| v as usize).collect::<Vec<_>>(), printed.clone());
    for (p, r) in &runs.down_up {
        let c = 4 * p.pow(4);
        let tag = |x: &str| format!("p={p}: {x}");
        e.eq(&tag("Hilbert function of A"), r.hilbert.as_ref().map(|h| h.a.clone()), Some(printed.clone()));
        e.eq(&tag("Betti shifts of A"), r.resolutions.get("A").map(|x| x.betti.clone()), Some(vec![vec![0], vec![1, 1], vec![3, 3], vec![4]]));
        if *p == 1 {
            let phi2 = r.det.as_ref().and_then(|d| d.phi.get(2)).and_then(|f| f.images.get("x1").cloned());
            let want = vec![s(&["-2*x2", "-2*x2"]), s(&["-2*x2", "2*x2"])];
            e.eq(&tag("φ₂(x1)"), phi2, Some(want));
        }
        e.eq(&tag("det σ"), r.det.as_ref().map(|d| d.images.clone()), Some(vec![format!("{c}*x1"), format!("{c}*x2")]));
        let hd = r.hdet.as_ref();
        e.eq(&tag("hdet σ"), hd.map(|h| h.matrix.clone()), Some(vec![vec![c.to_string(), "0".into()], vec!["0".into(), c.to_string()]]));
        e.eq(&tag("det hdet σ"), hd.map(|h| h.determinant.clone()), Some((c * c).to_string()));
        let n = r.nakayama.as_ref();
        e.eq(&tag("μ_A"), n.map(|n| n.mu_a.clone()), Some(s(&["-x1", "-x2"])));
        let want_mu = vec![format!("-1/{c}*x1"), format!("-1/{c}*x2"), format!("-{c}*y1"), format!("-{c}*y2")];
        e.eq(&tag("μ_C"), n.map(|n| n.mu_c.clone()), Some(want_mu.clone()));
        e.eq(&tag("tails"), n.map(|n| n.tails.clone()), Some(s(&["0", "0"])));
        e.eq(&tag("oracle"), n.and_then(|n| n.oracle.clone()), Some(want_mu));
        e.eq(&tag("agreement"), n.and_then(|n| n.agreement), Some(true));
        e.eq(&tag("exit code"), r.exit_code(), 0);
    }
    e.done()
}

// 2
fn ore_extensions(runs: &Runs) -> Outcome {
    let mut e = Errors(Vec::new());
    for (q, delta, r) in &runs.ore {
        let tag = |x: &str| format!("q={q} δ={}: {x}", if *delta { "x²" } else { "0" });
        e.eq(&tag("det σ"), r.det.as_ref().map(|d| d.images.clone()), Some(vec![format!("{q}*x")]));
        e.eq(&tag("hdet σ"), r.hdet.as_ref().map(|h| h.matrix.clone()), Some(vec![vec![q.to_string()]]));
        let Some(n) = r.nakayama.as_ref() else {
            e.0.push(tag("no Nakayama report"));
            continue;
        };
        e.eq(&tag("μ(x)"), n.mu_c[0].clone(), format!("1/{q}*x"));
        e.eq(&tag("y-block"), n.y_block.clone(), vec![vec![q.to_string()]]);
        if *delta {
            e.ok(&tag("μ(z) has leading term qz"), n.mu_c[1].starts_with(&format!("{q}*z")));
            e.eq(&tag("tail solved uniquely"), n.tail_freedom, 0);
        } else {
            e.eq(&tag("μ(z)"), n.mu_c[1].clone(), format!("{q}*z"));
            e.eq(&tag("tail"), n.tails.clone(), s(&["0"]));
        }
        e.eq(&tag("oracle agreement"), n.agreement, Some(true));
    }
    e.done()
}

// 3
fn double_ore(runs: &Runs) -> Outcome {
    let mut e = Errors(Vec::new());
    let p = problem("double_ore", &[], None, None);
    let (mu_b, _) = nakayama_oracle(p.data.b(), p.max_homological).map_err(|x| vec![x.to_string()])?;
    let want = ScalarMatrix::diagonal(&[Scalar::ratio(1, 2), Scalar::from_i64(2)]);
    e.eq("μ_B matrix", mu_b.degree_one_matrix(), want);
    let (p11, p12) = (Scalar::zero(), Scalar::from_i64(2));
    for ((s1, s2), r) in &runs.double_ore {
        let (s11, s12, s21, s22) = (s1.clone(), Scalar::zero(), Scalar::zero(), s2.clone());
        let formula = &(&(-&(&p11 * &s12) * &s11) + &(&s22 * &s11)) - &(&(&p12 * &s12) * &s21);
        e.eq(
            &format!("σ=diag({s1},{s2}): det σ against the closed formula"),
            r.det.as_ref().map(|d| d.matrix.clone()),
            Some(vec![vec![formula.to_string()]]),
        );
        e.eq(&format!("σ=diag({s1},{s2}): μ_B"), r.nakayama.as_ref().map(|n| n.mu_b.clone()), Some(s(&["1/2*y1", "2*y2"])));
    }
    e.done()
}

// 4
fn classical_determinant(runs: &Runs) -> Outcome {
    let mut e = Errors(Vec::new());
    e.eq("five matrices", runs.classical.len(), 5);
    for (m, r) in &runs.classical {
        let det = m[0] * m[3] - m[1] * m[2];
        e.eq(&format!("{m:?}"), r.det.as_ref().map(|d| d.matrix.clone()), Some(vec![vec![det.to_string()]]));
    }
    e.done()
}

// 5
fn factorization_and_tau_e(runs: &Runs) -> Outcome {
    let mut e = Errors(Vec::new());
    for (name, r) in runs.reports() {
        let Some(t) = r.tau_e.as_ref() else {
            e.0.push(format!("{name}: no τ_E report"));
            continue;
        };
        e.ok(&format!("{name}: {t:?}"), t.passed());
        e.ok(&format!("{name}: nothing checked"), t.factorization_checked > 0 && t.sign_law_checked > 0 && t.boundary_checked > 0);
    }
    e.done()
}

fn random_poly(rng: &mut StdRng, a: &GradedAlgebra, d: u32) -> NcPoly {
    let words = a.alphabet().words_of_degree(d);
    let terms = rng.gen_range(1..=6);
    NcPoly::from_terms(d, (0..terms).map(|_| (words[rng.gen_range(0..words.len())].clone(), Scalar::from_i64(rng.gen_range(-3..=3)))))
}

// 6
fn property_suites(runs: &Runs) -> Outcome {
    let mut e = Errors(Vec::new());
    let mut rng = StdRng::seed_from_u64(6);
    for name in ["example53", "ore", "ore_delta", "double_ore", "classical", "flip"] {
        let p = problem(name, &[], None, None);
        let c = build_twisted_tensor(&p.data, p.max_degree).map_err(|x| vec![x.to_string()])?;
        for (key, alg) in [("A", p.data.a().clone()), ("B", p.data.b().clone()), ("C", c.algebra().clone())] {
            let bound = alg.bound();
            for _ in 0..200 {
                let d1 = rng.gen_range(0..=bound / 2);
                let d2 = rng.gen_range(0..=bound - d1);
                let (f, g) = (random_poly(&mut rng, &alg, d1), random_poly(&mut rng, &alg, d2));
                let nf = alg.normal_form(&f);
                if alg.normal_form(&nf) != nf {
                    e.0.push(format!("{name}/{key}: normal form not idempotent"));
                    break;
                }
                if alg.normal_form(&f.mul(&g)) != alg.normal_form(&nf.mul(&alg.normal_form(&g))) {
                    e.0.push(format!("{name}/{key}: normal form not multiplicative"));
                    break;
                }
            }
        }
    }
    for (name, r) in runs.reports() {
        for (key, res) in &r.resolutions {
            e.ok(&format!("{name}/{key}: d∘d = 0"), res.complex);
            e.ok(&format!("{name}/{key}: minimal"), res.minimal);
            e.ok(&format!("{name}/{key}: exact in range"), res.exactness_failures.is_empty() && res.exactness_checked > 0);
        }
        e.eq(&format!("{name}: resolutions"), r.resolutions.len(), 3);
        for (key, x) in &r.ext {
            e.ok(&format!("{name}/{key}: associativity"), x.associativity_checked.is_some_and(|n| n > 0));
            e.ok(&format!("{name}/{key}: Frobenius relation"), x.frobenius_relation_checked.is_some_and(|n| n > 0));
            e.ok(&format!("{name}/{key}: lifting-choice independence"), x.choice_independence_checked.is_some_and(|n| n > 0));
        }
        e.eq(&format!("{name}: Ext algebras"), r.ext.len(), 3);
        e.ok(&format!("{name}: hdet invertible"), r.hdet.as_ref().is_some_and(|h| h.determinant != "0"));
        e.eq(&format!("{name}: failures"), r.failures.clone(), Vec::new());
    }
    e.done()
}

/// `dim Tor_i(k, k)_j` as homology of the reduced bar complex `(A_+)^{⊗i}`.
fn bar_betti(a: &GradedAlgebra, i: usize, j: u32, cache: &mut HashMap<(usize, u32), usize>) -> usize {
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
    let mut rank = |n: usize| -> usize {
        if n == 0 {
            return 0;
        }
        *cache.entry((n, j)).or_insert_with(|| {
            let src = basis(a, n, j);
            let tgt = basis(a, n - 1, j);
            let index: HashMap<&Vec<(u32, usize)>, usize> = tgt.iter().enumerate().map(|(i, v)| (v, i)).collect();
            let mut cols = Vec::with_capacity(src.len());
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
            ColumnEchelon::from_columns(tgt.len(), &cols).rank()
        })
    };
    let dim = basis(a, i, j).len();
    dim - rank(i) - rank(i + 1)
}

// 7
fn bar_oracle() -> Outcome {
    let mut e = Errors(Vec::new());
    for name in ["example53", "ore", "ore_delta", "double_ore", "classical", "flip"] {
        let p = problem(name, &[], Some(5), Some(3));
        let c = build_twisted_tensor(&p.data, 5).map_err(|x| vec![x.to_string()])?;
        let algebras: [(&str, Arc<GradedAlgebra>); 3] = [("A", p.data.a().clone()), ("B", p.data.b().clone()), ("C", c.algebra().clone())];
        for (key, alg) in algebras {
            let res = minimal_resolution(alg.clone(), 3).map_err(|x| vec![x.to_string()])?;
            let mut cache = HashMap::new();
            for i in 0..=3 {
                for j in 0..=5 {
                    let bar = bar_betti(&alg, i, j, &mut cache);
                    if res.betti_number(i, j) != bar {
                        e.0.push(format!("{name}/{key}: β_({i},{j}) = {} but bar homology gives {bar}", res.betti_number(i, j)));
                    }
                }
            }
        }
    }
    e.done()
}

fn main() -> ExitCode {
    let runs = catch_unwind(compute_runs).ok();
    type Check<'a> = Box<dyn Fn(&Runs) -> Outcome + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("down-up twist end to end at p=1 and p=2", Box::new(down_up_end_to_end)),
        ("Ore extensions, q in {2,3}, with and without derivation", Box::new(ore_extensions)),
        ("double Ore: μ_B and the det formula", Box::new(double_ore)),
        ("classical determinant for five random matrices", Box::new(classical_determinant)),
        ("Ext factorization, sign law and τ_E boundary formulas", Box::new(factorization_and_tau_e)),
        ("property suites", Box::new(property_suites)),
        ("Betti numbers against bar-complex homology", Box::new(|_: &Runs| bar_oracle())),
    ];
    let mut failed = 0;
    for (k, (label, check)) in criteria.iter().enumerate() {
        let outcome = match &runs {
            Some(r) => catch_unwind(AssertUnwindSafe(|| check(r))).unwrap_or_else(|_| Err(vec!["panicked".into()])),
            None => Err(vec!["fixture runs panicked".into()]),
        };
        match outcome {
            Ok(()) => println!("PASS criterion {}: {label}", k + 1),
            Err(msgs) => {
                failed += 1;
                println!("FAIL criterion {}: {label}", k + 1);
                for m in msgs {
                    println!("    {m}");
                }
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
