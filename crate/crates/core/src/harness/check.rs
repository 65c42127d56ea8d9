//! Judging a purported implementation by validating its outputs on
//! generated and hand-picked inputs.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::{Dag, Instance, Person, Preferences, Problem};
use crate::error::Result;
use crate::harness::wire::{ExternalCommand, ImplementationRequest, ImplementationResponse, Reply};
use crate::rng::derive_seed;
use crate::{matching, sort, toposort};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialReport {
    /// `handcrafted:<i>` or `size:<n>/trial:<t>`.
    pub label: String,
    pub size: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub problem: Problem,
    pub passed: bool,
    pub trials: Vec<TrialReport>,
}

/// Small fixed inputs tried before any generated ones, starting with the
/// empty input.
pub fn handcrafted_inputs(problem: Problem) -> Vec<Value> {
    match problem {
        Problem::Sort => vec![
            serde_json::json!(Vec::<Person>::new()),
            serde_json::json!([Person::new("Solo", 40)]),
            serde_json::json!([
                Person::new("B", 3),
                Person::new("A", 3),
                Person::new("C", 1)
            ]),
        ],
        Problem::Match => vec![
            serde_json::json!(Preferences::default()),
            serde_json::json!(matching::uniform_profile(1)),
            serde_json::json!(matching::two_stable_profile()),
        ],
        Problem::Toposort => vec![
            serde_json::json!(Dag::default()),
            serde_json::json!(Dag::new(["a"], [])),
            serde_json::json!(toposort::fan()),
        ],
    }
}

fn generate(problem: Problem, size: usize, seed: u64) -> Result<Value> {
    Ok(match problem {
        Problem::Sort => serde_json::json!(sort::generate_sort_input(size, seed)),
        Problem::Match => serde_json::json!(matching::generate_match_input(size, seed)),
        Problem::Toposort => serde_json::json!(toposort::generate_dag(
            size,
            seed,
            toposort::DEFAULT_EDGE_PROBABILITY
        )?),
    })
}

fn input_size(problem: Problem, input: &Value) -> usize {
    let field = match problem {
        Problem::Sort => return input.as_array().map_or(0, Vec::len),
        Problem::Match => "candidate_prefs",
        Problem::Toposort => "vertices",
    };
    input[field].as_array().map_or(0, Vec::len)
}

fn judge(problem: Problem, input: &Value, reply: Reply) -> Option<String> {
    let line = match reply {
        Reply::Line(line) => line,
        Reply::Failed(reason) => return Some(reason),
        Reply::TimedOut => return Some("timed out".into()),
    };
    let response: ImplementationResponse = match serde_json::from_str(&line) {
        Ok(r) => r,
        Err(e) => return Some(format!("malformed response: {e}")),
    };
    let instance = match Instance::from_parts(problem, input.clone(), response.output) {
        Ok(i) => i,
        Err(e) => return Some(format!("malformed output: {e}")),
    };
    match instance.violated_sub_properties() {
        Ok(v) if v.is_empty() => None,
        Ok(v) => Some(format!(
            "invalid output, violates {}",
            v.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(", ")
        )),
        Err(e) => Some(e.to_string()),
    }
}

/// Feeds hand-picked inputs, then `trials` generated inputs per size, to
/// an implementation speaking the implementation-mode protocol, and checks
/// each output with the reference predicate.
pub fn check_implementation(
    command: &ExternalCommand,
    problem: Problem,
    sizes: &[usize],
    trials: usize,
    seed: u64,
    timeout: Duration,
) -> Result<CheckReport> {
    let mut labelled: Vec<(String, Value)> = handcrafted_inputs(problem)
        .into_iter()
        .enumerate()
        .map(|(i, input)| (format!("handcrafted:{i}"), input))
        .collect();
    for &size in sizes {
        for trial in 0..trials {
            let trial_seed = derive_seed(derive_seed(seed, size as u64), trial as u64);
            labelled.push((
                format!("size:{size}/trial:{trial}"),
                generate(problem, size, trial_seed)?,
            ));
        }
    }

    let requests = labelled
        .iter()
        .map(|(_, input)| {
            serde_json::to_string(&ImplementationRequest {
                problem,
                input: input.clone(),
            })
        })
        .collect::<serde_json::Result<Vec<_>>>()?;
    let replies = command.run_batch(&requests, timeout)?;

    let trials: Vec<TrialReport> = labelled
        .into_iter()
        .zip(replies)
        .map(|((label, input), reply)| {
            let diagnostic = judge(problem, &input, reply);
            TrialReport {
                label,
                size: input_size(problem, &input),
                passed: diagnostic.is_none(),
                diagnostic,
            }
        })
        .collect();
    Ok(CheckReport {
        problem,
        passed: trials.iter().all(|t| t.passed),
        trials,
    })
}
