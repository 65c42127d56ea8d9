//! Grading candidate validity predicates against the problem suites.

mod check;
pub mod mutants;
pub mod wire;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

use crate::domain::{
    isolates, Instance, Outcome, Problem, RejectionPattern, TestSuite, Verdict, FUNCTIONAL,
};
use crate::error::{Error, Result};
use crate::{matching, sort, toposort};

pub use check::{check_implementation, handcrafted_inputs, CheckReport, TrialReport};
pub use mutants::{find_mutant, mutant_corpus, MutantSpec};
pub use wire::ExternalCommand;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_millis(2000);

/// Checks the suites' own guarantees: every ENFORCE-X case breaks X alone,
/// and every case of the must-accept suites is valid.
pub fn audit_suites(suites: &[TestSuite]) -> Result<()> {
    for suite in suites {
        for (i, case) in suite.cases.iter().enumerate() {
            let violated = case.instance.violated_sub_properties()?;
            let sound = match suite.enforced() {
                Some(target) => !case.expected && isolates(target, &violated),
                None if suite.name == FUNCTIONAL => case.expected == violated.is_empty(),
                None => case.expected && violated.is_empty(),
            };
            if !sound {
                return Err(Error::Invariant(format!(
                    "{} case {i} (expected {}) violates {:?}",
                    suite.name, case.expected, violated
                )));
            }
        }
    }
    Ok(())
}

/// The fixed suites for `problem`, FUNCTIONAL first.
pub fn build_suites(problem: Problem) -> Result<Vec<TestSuite>> {
    match problem {
        Problem::Sort => Ok(sort::build_sort_suites()),
        Problem::Match => matching::build_match_suites(),
        Problem::Toposort => Ok(toposort::build_toposort_suites()),
    }
}

#[derive(Debug, Clone)]
pub enum CandidateKind {
    Reference,
    Mutant(MutantSpec),
    External(ExternalCommand),
}

/// A validity predicate under assessment.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub id: String,
    pub kind: CandidateKind,
    /// Per-case budget; only external candidates can exceed it.
    pub timeout: Duration,
}

impl Candidate {
    pub fn reference() -> Self {
        Candidate {
            id: "reference".into(),
            kind: CandidateKind::Reference,
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn mutant(spec: MutantSpec) -> Self {
        Candidate {
            id: format!("mutant:{}", spec.name),
            kind: CandidateKind::Mutant(spec),
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn external(command: &str) -> Result<Self> {
        let command = ExternalCommand::parse(command)?;
        Ok(Candidate {
            id: command.display(),
            kind: CandidateKind::External(command),
            timeout: DEFAULT_TIMEOUT,
        })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    fn judge_in_process(&self, instance: &Instance) -> Outcome {
        let result = match &self.kind {
            CandidateKind::Reference => instance.is_valid().map_err(|e| e.to_string()),
            CandidateKind::Mutant(spec) => spec.judge(instance),
            CandidateKind::External(_) => unreachable!("external candidates run in batch"),
        };
        result.map_or(Outcome::Error, Outcome::from)
    }
}

/// Verdicts of one candidate on one suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteRun {
    pub verdicts: Vec<Verdict>,
    /// Every verdict matched its case's expected boolean.
    pub accepted: bool,
}

/// Runs every case of `suite` through `candidate`.
///
/// Fails only if an external candidate cannot be launched; a candidate that
/// crashes or answers garbage gets ERROR verdicts instead.
pub fn run_suite(candidate: &Candidate, suite: &TestSuite) -> Result<SuiteRun> {
    let outcomes: Vec<Outcome> = match &candidate.kind {
        CandidateKind::External(command) => {
            let requests: Vec<String> = suite
                .cases
                .iter()
                .map(|case| {
                    serde_json::to_string(&wire::ValidatorRequest::for_instance(&case.instance))
                })
                .collect::<serde_json::Result<_>>()?;
            command
                .run_batch(&requests, candidate.timeout)?
                .into_iter()
                .map(|reply| match reply {
                    wire::Reply::Line(line) => {
                        serde_json::from_str::<wire::ValidatorResponse>(&line)
                            .map_or(Outcome::Error, |r| r.valid.into())
                    }
                    wire::Reply::Failed(_) => Outcome::Error,
                    wire::Reply::TimedOut => Outcome::Timeout,
                })
                .collect()
        }
        _ => suite
            .cases
            .iter()
            .map(|case| candidate.judge_in_process(&case.instance))
            .collect(),
    };
    let accepted = outcomes
        .iter()
        .zip(&suite.cases)
        .all(|(outcome, case)| outcome.matches(case.expected));
    Ok(SuiteRun {
        verdicts: outcomes
            .into_iter()
            .enumerate()
            .map(|(case, outcome)| Verdict { case, outcome })
            .collect(),
        accepted,
    })
}

/// Builds `problem`'s suites and classifies `candidate` against all of them.
pub fn classify(candidate: &Candidate, problem: Problem) -> Result<RejectionPattern> {
    classify_against(candidate, problem, &build_suites(problem)?)
}

/// Runs FUNCTIONAL first, then every other suite regardless of the outcome.
/// Whether to trust sub-property rejections of a candidate that failed
/// FUNCTIONAL is left to the reporting layer.
pub fn classify_against(
    candidate: &Candidate,
    problem: Problem,
    suites: &[TestSuite],
) -> Result<RejectionPattern> {
    let ordered = suites
        .iter()
        .filter(|s| s.name == FUNCTIONAL)
        .chain(suites.iter().filter(|s| s.name != FUNCTIONAL));

    let mut functional_accepted = true;
    let mut rejected_by = BTreeSet::new();
    let mut verdicts = BTreeMap::new();
    for suite in ordered {
        let run = run_suite(candidate, suite)?;
        if !run.accepted {
            if suite.name == FUNCTIONAL {
                functional_accepted = false;
            }
            rejected_by.insert(suite.name.clone());
        }
        verdicts.insert(suite.name.clone(), run.verdicts);
    }
    Ok(RejectionPattern {
        candidate_id: candidate.id.clone(),
        problem,
        functional_accepted,
        rejected_by,
        verdicts,
    })
}
