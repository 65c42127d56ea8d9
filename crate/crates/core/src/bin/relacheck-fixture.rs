//! Test fixture speaking the candidate wire protocol.
//!
//! `relacheck-fixture <mode>` where mode is one of:
//!
//! * `validator`: the reference predicates, in validator mode
//! * `crash`: exits immediately with status 1
//! * `hang`: reads requests and never answers, even after stdin closes
//! * `garbage`: answers every request with a line that is not JSON
//! * `solver`: reference implementations, in implementation mode
//! * `identity`: echoes the input back (sorted vertex list for toposort,
//!   `i -> i` for matching)
//! * `duplicate`: the reference output with its first element repeated

use std::io::{self, BufRead};
use std::process::ExitCode;

use serde_json::{json, Value};

use relacheck::domain::{Dag, Person, Preferences, Problem};
use relacheck::harness::wire::{serve, ImplementationRequest, ValidatorRequest};
use relacheck::{matching, sort, toposort};

fn validate(line: &str) -> String {
    let verdict = serde_json::from_str::<ValidatorRequest>(line)
        .map_err(|e| e.to_string())
        .and_then(|r| r.to_instance().map_err(|e| e.to_string()))
        .and_then(|i| i.is_valid().map_err(|e| e.to_string()));
    match verdict {
        Ok(valid) => json!({ "valid": valid }).to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn solve(problem: Problem, input: Value) -> Result<Value, String> {
    let err = |e: serde_json::Error| e.to_string();
    Ok(match problem {
        Problem::Sort => {
            let lst: Vec<Person> = serde_json::from_value(input).map_err(err)?;
            json!(sort::reference_sort(&lst))
        }
        Problem::Match => {
            let prefs: Preferences = serde_json::from_value(input).map_err(err)?;
            json!(matching::gale_shapley(&prefs).map_err(|e| e.to_string())?)
        }
        Problem::Toposort => {
            let dag: Dag = serde_json::from_value(input).map_err(err)?;
            json!(toposort::kahn_order(&dag).map_err(|e| e.to_string())?)
        }
    })
}

fn identity(problem: Problem, input: Value) -> Result<Value, String> {
    Ok(match problem {
        Problem::Sort => input,
        Problem::Match => {
            let n = input["candidate_prefs"].as_array().map_or(0, Vec::len);
            json!((0..n).map(|i| [i, i]).collect::<Vec<_>>())
        }
        Problem::Toposort => input["vertices"].clone(),
    })
}

fn duplicate(problem: Problem, input: Value) -> Result<Value, String> {
    let mut output = solve(problem, input)?;
    if let Some(items) = output.as_array_mut() {
        if let Some(first) = items.first().cloned() {
            items.insert(0, first);
        }
    }
    Ok(output)
}

fn implement(line: &str, f: fn(Problem, Value) -> Result<Value, String>) -> String {
    let result = serde_json::from_str::<ImplementationRequest>(line)
        .map_err(|e| e.to_string())
        .and_then(|r| f(r.problem, r.input));
    match result {
        Ok(output) => json!({ "output": output }).to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn main() -> ExitCode {
    let mode = std::env::args().nth(1).unwrap_or_default();
    let stdin = io::stdin().lock();
    let stdout = io::stdout().lock();
    let served = match mode.as_str() {
        "validator" => serve(stdin, stdout, validate),
        "crash" => return ExitCode::FAILURE,
        "hang" => {
            for _ in stdin.lines() {}
            loop {
                std::thread::park();
            }
        }
        "garbage" => serve(stdin, stdout, |_| "definitely not json".to_owned()),
        "solver" => serve(stdin, stdout, |l| implement(l, solve)),
        "identity" => serve(stdin, stdout, |l| implement(l, identity)),
        "duplicate" => serve(stdin, stdout, |l| implement(l, duplicate)),
        other => {
            eprintln!("unknown mode `{other}`");
            return ExitCode::from(1);
        }
    };
    match served {
        Ok(()) => ExitCode::SUCCESS,
        Err(_) => ExitCode::FAILURE,
    }
}
