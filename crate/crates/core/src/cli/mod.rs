//! Command-line front end: batch scenarios in, deterministic reports out.
//!
//! Exit status is 0 when every scenario succeeds, 1 when at least one
//! scenario fails, and 2 when the command line or an input file is rejected.

pub mod exec;
pub mod render;
pub mod schema;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::selftest;
use schema::Kind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SCENARIO_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "divpos", version, about = "Exact positivity of divisors on projective bundles over curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Scenario file (JSON, or TOML with a .toml extension).
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Nef / pseudo-effective / big / ample verdicts for a class on P(E).
    Classify(InputArgs),
    /// Harder-Narasimhan data, symmetric powers and sections over P^1.
    Hn(InputArgs),
    /// Smallest Frobenius power after which the HN filtration splits.
    Frobsplit(InputArgs),
    /// Nef-cone membership and ray rationality in a Neron-Severi lattice.
    Cone(InputArgs),
    /// Rational multipliers for an effective real presentation.
    Rationalize(InputArgs),
    /// Nef class with an irrational ray on an abelian surface.
    Counterexample(InputArgs),
    /// Built-in equivalence and cone property suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Maps `DIVPOS_LOG` (quiet, info, debug) to a stderr logger.
pub fn init_logging() {
    let level = match std::env::var("DIVPOS_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Off,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .format_timestamp(None)
        .try_init();
}

fn kind_of(command: &Command) -> Option<(Kind, &PathBuf)> {
    match command {
        Command::Classify(a) => Some((Kind::Classify, &a.input)),
        Command::Hn(a) => Some((Kind::Hn, &a.input)),
        Command::Frobsplit(a) => Some((Kind::Frobsplit, &a.input)),
        Command::Cone(a) => Some((Kind::Cone, &a.input)),
        Command::Rationalize(a) => Some((Kind::Rationalize, &a.input)),
        Command::Counterexample(a) => Some((Kind::Counterexample, &a.input)),
        Command::Selftest { .. } => None,
    }
}

/// Runs one invocation; diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
        }
    };
    let (doc, status) = match kind_of(&cli.command) {
        Some((kind, input)) => match batch(kind, input) {
            Ok(pair) => pair,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_BAD_INPUT;
            }
        },
        None => {
            let Command::Selftest { seed } = cli.command else {
                unreachable!()
            };
            let report = selftest::run(seed);
            let status = if report.passed() { EXIT_OK } else { EXIT_SCENARIO_FAILED };
            (selftest_document(&report), status)
        }
    };
    let rendered = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => render::text(&doc),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, rendered.as_bytes()),
        None => std::io::stdout().lock().write_all(rendered.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return EXIT_BAD_INPUT;
    }
    status
}

fn batch(kind: Kind, input: &Path) -> Result<(Value, i32), schema::SchemaError> {
    let doc = schema::load_document(input)?;
    let scenarios = schema::parse_scenarios(&doc, kind)?;
    log::info!("{} scenario(s) of kind {kind}", scenarios.len());
    let outcomes = exec::run_all(&scenarios);
    let failed = outcomes.iter().filter(|o| o.result.is_err()).count();
    let entries: Vec<Value> = outcomes
        .into_iter()
        .map(|o| match o.result {
            Ok(result) => json!({"id": o.id, "kind": o.kind, "status": "ok", "result": result}),
            Err(error) => json!({"id": o.id, "kind": o.kind, "status": "error", "error": error}),
        })
        .collect();
    let total = entries.len();
    let doc = json!({
        "command": kind.name(),
        "scenarios": entries,
        "summary": {"total": total, "ok": total - failed, "failed": failed},
    });
    Ok((doc, if failed == 0 { EXIT_OK } else { EXIT_SCENARIO_FAILED }))
}

fn selftest_document(report: &selftest::Report) -> Value {
    json!({
        "command": "selftest",
        "seed": report.seed,
        "suites": report.suites.iter().map(|s| json!({
            "name": s.name,
            "cases": s.cases,
            "failures": s.failures,
            "examples": s.examples,
        })).collect::<Vec<_>>(),
        "passed": report.passed(),
    })
}
