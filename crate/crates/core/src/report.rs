//! Aggregating rejection patterns into region counts.
//!
//! A region is the exact set of suites that rejected a candidate. Candidates
//! that fail FUNCTIONAL are counted separately and never contribute to a
//! region, since their sub-property rejections say nothing specific.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::domain::{Problem, RejectionPattern};
use crate::error::{Error, Result};

/// Separator between suite names in a region key.
pub const REGION_SEPARATOR: &str = ",";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VennReport {
    pub universe: usize,
    pub not_functional: usize,
    /// Region key (sorted suite names joined by `,`; `""` for candidates no
    /// suite rejected) to the number of candidates in that region.
    pub regions: BTreeMap<String, usize>,
}

/// The canonical key for a rejecting set.
pub fn region_key<'a>(suites: impl IntoIterator<Item = &'a String>) -> String {
    let sorted: BTreeSet<&String> = suites.into_iter().collect();
    sorted
        .into_iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .join(REGION_SEPARATOR)
}

/// Short label for where a pattern lands: its region, or `NOT-FUNCTIONAL`.
pub fn attribution(pattern: &RejectionPattern) -> String {
    if pattern.functional_accepted {
        format!(
            "{{{}}}",
            region_key(&pattern.rejected_by).replace(REGION_SEPARATOR, ", ")
        )
    } else {
        "NOT-FUNCTIONAL".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(Error::Unknown {
                kind: "format",
                name: other.to_owned(),
            }),
        }
    }
}

pub fn aggregate(patterns: &[RejectionPattern]) -> Result<VennReport> {
    let mut problem: Option<Problem> = None;
    let mut report = VennReport::default();
    for pattern in patterns {
        match problem {
            Some(p) if p != pattern.problem => {
                return Err(Error::MixedProblems {
                    first: p.to_string(),
                    second: pattern.problem.to_string(),
                })
            }
            _ => problem = Some(pattern.problem),
        }
        report.universe += 1;
        if pattern.functional_accepted {
            *report
                .regions
                .entry(region_key(&pattern.rejected_by))
                .or_insert(0) += 1;
        } else {
            report.not_functional += 1;
        }
    }
    Ok(report)
}

pub fn render(report: &VennReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string(report)?),
        Format::Text => Ok(render_text(report)),
    }
}

pub fn parse(json: &str) -> Result<VennReport> {
    Ok(serde_json::from_str(json)?)
}

fn render_text(report: &VennReport) -> String {
    let mut rows: Vec<(String, usize)> = report
        .regions
        .iter()
        .map(|(key, &count)| {
            let label = if key.is_empty() {
                "{} (rejected by no suite)".to_owned()
            } else {
                format!("{{{}}}", key.replace(REGION_SEPARATOR, ", "))
            };
            (label, count)
        })
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(6);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  count", "region");
    for (label, count) in rows {
        let _ = writeln!(out, "{label:<width$}  {count:>5}");
    }
    let _ = writeln!(out, "not_functional: {}", report.not_functional);
    let _ = writeln!(out, "universe: {}", report.universe);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(problem: Problem, functional: bool, rejected: &[&str]) -> RejectionPattern {
        RejectionPattern {
            candidate_id: "c".into(),
            problem,
            functional_accepted: functional,
            rejected_by: rejected.iter().map(|s| s.to_string()).collect(),
            verdicts: BTreeMap::new(),
        }
    }

    #[test]
    fn empty_report() {
        let report = aggregate(&[]).unwrap();
        assert_eq!(
            render(&report, Format::Json).unwrap(),
            r#"{"universe":0,"not_functional":0,"regions":{}}"#
        );
    }

    #[test]
    fn reference_copies_share_the_empty_region() {
        let p = pattern(Problem::Sort, true, &[]);
        let report = aggregate(&[p.clone(), p.clone(), p]).unwrap();
        assert_eq!(report.regions[""], 3);
        assert_eq!(report.universe, 3);
    }

    #[test]
    fn not_functional_is_excluded_from_regions() {
        let report = aggregate(&[
            pattern(Problem::Sort, false, &["FUNCTIONAL", "RELATIONAL"]),
            pattern(Problem::Sort, true, &["RELATIONAL"]),
            pattern(Problem::Sort, true, &["ENFORCE-ORDERED", "RELATIONAL"]),
        ])
        .unwrap();
        assert_eq!(report.not_functional, 1);
        assert_eq!(report.regions["RELATIONAL"], 1);
        assert_eq!(report.regions["ENFORCE-ORDERED,RELATIONAL"], 1);
        assert_eq!(report.regions.values().sum::<usize>() + 1, report.universe);
    }

    #[test]
    fn mixed_problems_are_rejected() {
        let err = aggregate(&[
            pattern(Problem::Sort, true, &[]),
            pattern(Problem::Match, true, &[]),
        ]);
        assert!(matches!(err, Err(Error::MixedProblems { .. })));
    }

    #[test]
    fn text_lists_regions_by_count() {
        let report = aggregate(&[
            pattern(Problem::Match, true, &["ENFORCE-STABLE"]),
            pattern(Problem::Match, true, &[]),
            pattern(Problem::Match, true, &[]),
        ])
        .unwrap();
        let text = render(&report, Format::Text).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[1].starts_with("{} (rejected by no suite)"));
        assert!(lines[2].starts_with("{ENFORCE-STABLE}"));
        assert_eq!(lines[3], "not_functional: 0");
        assert_eq!(lines[4], "universe: 3");
    }

    #[test]
    fn attribution_marks_gate_failures() {
        assert_eq!(
            attribution(&pattern(Problem::Sort, false, &["FUNCTIONAL"])),
            "NOT-FUNCTIONAL"
        );
        assert_eq!(
            attribution(&pattern(Problem::Sort, true, &["RELATIONAL", "EDGE"])),
            "{EDGE, RELATIONAL}"
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        const NAMES: [&str; 5] = [
            "EDGE",
            "ENFORCE-ORDERED",
            "ENFORCE-SAME-SIZE",
            "FUNCTIONAL",
            "RELATIONAL",
        ];

        fn arb_pattern() -> impl Strategy<Value = RejectionPattern> {
            (
                any::<bool>(),
                prop::collection::btree_set(prop::sample::select(NAMES.to_vec()), 0..4),
            )
                .prop_map(|(functional, rejected)| {
                    let names: Vec<&str> = rejected.into_iter().collect();
                    pattern(Problem::Toposort, functional, &names)
                })
        }

        proptest! {
            #[test]
            fn aggregate_is_order_independent_and_partitions(
                patterns in prop::collection::vec(arb_pattern(), 0..20),
                seed in any::<u64>(),
            ) {
                use rand::seq::SliceRandom;
                let report = aggregate(&patterns).unwrap();
                prop_assert_eq!(
                    report.regions.values().sum::<usize>() + report.not_functional,
                    report.universe
                );
                let mut shuffled = patterns.clone();
                shuffled.shuffle(&mut crate::rng::seeded(seed));
                prop_assert_eq!(aggregate(&shuffled).unwrap(), report.clone());

                let json = render(&report, Format::Json).unwrap();
                let back = parse(&json).unwrap();
                prop_assert_eq!(&back, &report);
                prop_assert_eq!(render(&back, Format::Json).unwrap(), json);
            }
        }
    }
}
