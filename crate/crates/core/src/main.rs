use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};

use gforge::cli::{parse_param, run, Command, ProblemFile, RunOptions, EXIT_PARSE};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Text,
}

/// Twisted tensor products of connected graded algebras: Hilbert series, resolutions,
/// Ext-algebras, hdet, det and Nakayama automorphisms.
#[derive(Debug, Parser)]
#[command(name = "gforge", version)]
#[command(group(ArgGroup::new("assertion").args(["assert_noetherian", "assert_koszul"])))]
struct Args {
    command: Command,
    file: PathBuf,
    /// substitute a rational for a parameter symbol, `k=v`
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, String)>,
    #[arg(long)]
    max_degree: Option<u32>,
    #[arg(long)]
    max_homological: Option<usize>,
    /// `rational` or a prime
    #[arg(long)]
    field: Option<String>,
    /// the associated twisted tensor product is noetherian
    #[arg(long)]
    assert_noetherian: bool,
    /// the associated twisted tensor product is Koszul
    #[arg(long)]
    assert_koszul: bool,
    /// cross-check against the Ext-algebra of C
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum, default_value = "json")]
    output: Output,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE as u8 } else { 0 });
        }
    };
    let text = match std::fs::read_to_string(&args.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", args.file.display());
            return ExitCode::from(EXIT_PARSE as u8);
        }
    };
    let file = match ProblemFile::from_json(&text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{}: {e}", args.file.display());
            return ExitCode::from(EXIT_PARSE as u8);
        }
    };
    let overrides: BTreeMap<String, String> = args.params.into_iter().collect();
    let problem = match file.build(&overrides, args.field.as_deref(), args.max_degree, args.max_homological) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}: {e}", args.file.display());
            return ExitCode::from(EXIT_PARSE as u8);
        }
    };
    let opts = RunOptions {
        oracle: args.oracle,
        assert_noetherian: args.assert_noetherian || file.assertions.noetherian,
        assert_koszul: args.assert_koszul || file.assertions.koszul,
    };
    let report = run(args.command, &problem, opts);
    let text = match args.output {
        Output::Json => report.to_json() + "\n",
        Output::Text => report.to_text(),
    };
    // a closed pipe is not an error of the computation
    let _ = std::io::stdout().write_all(text.as_bytes());
    ExitCode::from(report.exit_code() as u8)
}
