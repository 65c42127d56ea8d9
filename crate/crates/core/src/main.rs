use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{ArgGroup, Parser, Subcommand};
use serde_json::Value;

use relacheck::domain::{Instance, Problem, RejectionPattern, TestSuite, FUNCTIONAL};
use relacheck::harness::{
    self, build_suites, check_implementation, classify_against, find_mutant, mutant_corpus,
    Candidate, ExternalCommand,
};
use relacheck::report::{self, Format};
use relacheck::{matching, sort, toposort, Error, Result};

#[derive(Parser)]
#[command(
    name = "relacheck",
    version,
    about = "Grade validity predicates for relational problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify candidate predicates by the suites that reject them.
    #[command(group(ArgGroup::new("who").required(true).args(["candidate", "mutant", "reference", "all_mutants"])))]
    Grade {
        #[arg(long)]
        problem: Problem,
        /// External program speaking the validator protocol.
        #[arg(long)]
        candidate: Option<String>,
        /// A built-in mutant by name.
        #[arg(long)]
        mutant: Option<String>,
        #[arg(long)]
        reference: bool,
        #[arg(long)]
        all_mutants: bool,
        /// Comma-separated suite names, or `all`. FUNCTIONAL always runs.
        #[arg(long, default_value = "all")]
        suites: String,
        #[arg(long, default_value_t = 2000)]
        timeout_ms: u64,
        /// Accepted for interface parity; the grading suites are fixed.
        #[arg(long, env = "RELACHECK_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write every suite of a problem as a JSON fixture.
    Suites {
        #[arg(long)]
        problem: Problem,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print every valid output for an instance's input, one JSON per line.
    Enumerate {
        #[arg(long)]
        problem: Problem,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Print a generated input.
    Gen {
        #[arg(long)]
        problem: Problem,
        #[arg(long)]
        size: usize,
        #[arg(long, env = "RELACHECK_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = toposort::DEFAULT_EDGE_PROBABILITY)]
        edge_prob: f64,
    },
    /// Check an implementation's outputs on generated and hand-picked inputs.
    Check {
        #[arg(long)]
        problem: Problem,
        #[arg(long = "impl")]
        implementation: String,
        #[arg(long, value_delimiter = ',', default_value = "0,1,5,20")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, env = "RELACHECK_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        timeout_ms: u64,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Aggregate rejection patterns (one JSON object per line).
    Report {
        #[arg(long)]
        patterns: PathBuf,
        #[arg(long, default_value = "json")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relacheck: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(error: &Error) -> u8 {
    match error {
        Error::Launch { .. } => 2,
        Error::Invariant(_) | Error::NotFound { .. } => 3,
        _ => 1,
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Grade {
            problem,
            candidate,
            mutant,
            reference,
            all_mutants,
            suites,
            timeout_ms,
            seed: _,
            format,
            out,
        } => {
            let timeout = Duration::from_millis(timeout_ms);
            let candidates: Vec<Candidate> = if reference {
                vec![Candidate::reference()]
            } else if let Some(command) = candidate {
                vec![Candidate::external(&command)?]
            } else if let Some(name) = mutant {
                let spec = find_mutant(problem, &name).ok_or_else(|| Error::Unknown {
                    kind: "mutant",
                    name: name.clone(),
                })?;
                vec![Candidate::mutant(spec)]
            } else {
                debug_assert!(all_mutants);
                mutant_corpus(problem)
                    .into_iter()
                    .map(Candidate::mutant)
                    .collect()
            };
            let selected = select_suites(build_suites(problem)?, &suites)?;
            harness::audit_suites(&selected)?;

            let patterns = candidates
                .iter()
                .map(|c| classify_against(&c.clone().with_timeout(timeout), problem, &selected))
                .collect::<Result<Vec<_>>>()?;
            emit(out.as_deref(), &render_patterns(&patterns, format)?)
        }
        Command::Suites { problem, out } => {
            let suites = build_suites(problem)?;
            harness::audit_suites(&suites)?;
            fs::create_dir_all(&out)?;
            for suite in &suites {
                let path = out.join(format!("{}.json", suite.name));
                fs::write(path, serde_json::to_string_pretty(suite)? + "\n")?;
            }
            Ok(())
        }
        Command::Enumerate { problem, instance } => {
            let raw: Value = serde_json::from_str(&fs::read_to_string(&instance)?)?;
            let mut out = String::new();
            for output in enumerate(problem, raw)? {
                out.push_str(&serde_json::to_string(&output)?);
                out.push('\n');
            }
            emit(None, &out)
        }
        Command::Gen {
            problem,
            size,
            seed,
            edge_prob,
        } => {
            let input = match problem {
                Problem::Sort => serde_json::to_value(sort::generate_sort_input(size, seed))?,
                Problem::Match => serde_json::to_value(matching::generate_match_input(size, seed))?,
                Problem::Toposort => {
                    serde_json::to_value(toposort::generate_dag(size, seed, edge_prob)?)?
                }
            };
            emit(None, &(serde_json::to_string(&input)? + "\n"))
        }
        Command::Check {
            problem,
            implementation,
            sizes,
            trials,
            seed,
            timeout_ms,
            format,
        } => {
            let command = ExternalCommand::parse(&implementation)?;
            let report = check_implementation(
                &command,
                problem,
                &sizes,
                trials,
                seed,
                Duration::from_millis(timeout_ms),
            )?;
            let text = match format {
                Format::Json => serde_json::to_string(&report)? + "\n",
                Format::Text => {
                    let mut s = String::new();
                    for t in &report.trials {
                        let status = if t.passed { "pass" } else { "FAIL" };
                        s.push_str(&format!("{status}  {}", t.label));
                        if let Some(d) = &t.diagnostic {
                            s.push_str(&format!("  ({d})"));
                        }
                        s.push('\n');
                    }
                    let overall = if report.passed { "pass" } else { "fail" };
                    s + &format!("overall: {overall}\n")
                }
            };
            emit(None, &text)
        }
        Command::Report { patterns, format } => {
            let patterns = fs::read_to_string(&patterns)?
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(serde_json::from_str)
                .collect::<serde_json::Result<Vec<RejectionPattern>>>()?;
            let report = report::aggregate(&patterns)?;
            let mut text = report::render(&report, format)?;
            if format == Format::Json {
                text.push('\n');
            }
            emit(None, &text)
        }
    }
}

fn select_suites(all: Vec<TestSuite>, spec: &str) -> Result<Vec<TestSuite>> {
    if spec == "all" {
        return Ok(all);
    }
    let wanted: Vec<&str> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if let Some(unknown) = wanted.iter().find(|w| !all.iter().any(|s| s.name == **w)) {
        return Err(Error::Unknown {
            kind: "suite",
            name: unknown.to_string(),
        });
    }
    Ok(all
        .into_iter()
        .filter(|s| s.name == FUNCTIONAL || wanted.contains(&s.name.as_str()))
        .collect())
}

fn render_patterns(patterns: &[RejectionPattern], format: Format) -> Result<String> {
    let mut out = String::new();
    match format {
        Format::Json => {
            for p in patterns {
                out.push_str(&serde_json::to_string(p)?);
                out.push('\n');
            }
        }
        Format::Text => {
            let width = patterns
                .iter()
                .map(|p| p.candidate_id.len())
                .max()
                .unwrap_or(0);
            for p in patterns {
                out.push_str(&format!(
                    "{:<width$}  {}\n",
                    p.candidate_id,
                    report::attribution(p)
                ));
            }
            if patterns.len() > 1 {
                out.push('\n');
                out.push_str(&report::render(
                    &report::aggregate(patterns)?,
                    Format::Text,
                )?);
            }
        }
    }
    Ok(out)
}

/// Valid outputs for the INPUT half of an instance file. The OUTPUT half,
/// if present, is ignored.
fn enumerate(problem: Problem, raw: Value) -> Result<Vec<Value>> {
    let input = match problem {
        Problem::Sort => raw.get("lst").cloned().unwrap_or(raw),
        _ => raw,
    };
    let outputs = match Instance::from_parts(problem, input, Value::Array(vec![]))? {
        Instance::Sort(s) => sort::enumerate_valid_sorts(&s.lst)?
            .into_iter()
            .map(serde_json::to_value)
            .collect::<serde_json::Result<Vec<_>>>()?,
        Instance::Match(m) => matching::enumerate_stable_matchings(&m.prefs)?
            .into_iter()
            .map(serde_json::to_value)
            .collect::<serde_json::Result<Vec<_>>>()?,
        Instance::Toposort(t) => toposort::enumerate_topological_orders(&t.dag)?
            .into_iter()
            .map(serde_json::to_value)
            .collect::<serde_json::Result<Vec<_>>>()?,
    };
    Ok(outputs)
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
