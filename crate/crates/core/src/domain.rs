//! Shared data model: problem instances, sub-properties, suites and verdicts.
//!
//! Every problem pairs an INPUT with a purported OUTPUT. The JSON encodings
//! defined here are used both by suite fixtures on disk and by the candidate
//! wire protocol.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{matching, sort, toposort};

/// The three relational problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Sort,
    Match,
    Toposort,
}

impl Problem {
    pub const ALL: [Problem; 3] = [Problem::Sort, Problem::Match, Problem::Toposort];

    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Sort => "sort",
            Problem::Match => "match",
            Problem::Toposort => "toposort",
        }
    }

    /// Top-level conjuncts of the problem's validity relation.
    pub fn sub_properties(self) -> &'static [SubProperty] {
        use SubProperty::*;
        match self {
            Problem::Sort => &[SameSize, SameElements, Ordered],
            Problem::Match => &[Stable, Unique, Complete],
            Problem::Toposort => &[SameElements, Ordered, NoDups],
        }
    }

    /// Finer-grained conjuncts that decompose a top-level sub-property.
    pub fn refinements(self) -> &'static [SubProperty] {
        use SubProperty::*;
        match self {
            Problem::Sort | Problem::Toposort => &[Retain, NoNew, NotDisjoint],
            Problem::Match => &[],
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sort" => Ok(Problem::Sort),
            "match" => Ok(Problem::Match),
            "toposort" => Ok(Problem::Toposort),
            other => Err(Error::Unknown {
                kind: "problem",
                name: other.to_owned(),
            }),
        }
    }
}

/// One conjunct of a problem's validity relation.
///
/// `Retain`, `NoNew` and `NotDisjoint` refine `SameElements`: the former two
/// are the two containment directions, and a `NotDisjoint` violation (no
/// shared element at all) always violates both directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SubProperty {
    #[serde(rename = "SAME-SIZE")]
    SameSize,
    #[serde(rename = "SAME-ELEMENTS")]
    SameElements,
    #[serde(rename = "RETAIN")]
    Retain,
    #[serde(rename = "NO-NEW")]
    NoNew,
    #[serde(rename = "NOT-DISJOINT")]
    NotDisjoint,
    #[serde(rename = "ORDERED")]
    Ordered,
    #[serde(rename = "STABLE")]
    Stable,
    #[serde(rename = "UNIQUE")]
    Unique,
    #[serde(rename = "COMPLETE")]
    Complete,
    #[serde(rename = "NO-DUPS")]
    NoDups,
}

impl SubProperty {
    pub fn as_str(self) -> &'static str {
        match self {
            SubProperty::SameSize => "SAME-SIZE",
            SubProperty::SameElements => "SAME-ELEMENTS",
            SubProperty::Retain => "RETAIN",
            SubProperty::NoNew => "NO-NEW",
            SubProperty::NotDisjoint => "NOT-DISJOINT",
            SubProperty::Ordered => "ORDERED",
            SubProperty::Stable => "STABLE",
            SubProperty::Unique => "UNIQUE",
            SubProperty::Complete => "COMPLETE",
            SubProperty::NoDups => "NO-DUPS",
        }
    }

    pub fn is_refinement(self) -> bool {
        matches!(
            self,
            SubProperty::Retain | SubProperty::NoNew | SubProperty::NotDisjoint
        )
    }

    /// The top-level sub-property this one belongs to (itself if top-level).
    pub fn top_level(self) -> SubProperty {
        if self.is_refinement() {
            SubProperty::SameElements
        } else {
            self
        }
    }

    /// Refinements that are necessarily violated alongside this one.
    fn implied_refinements(self) -> &'static [SubProperty] {
        use SubProperty::*;
        match self {
            Retain => &[Retain],
            NoNew => &[NoNew],
            NotDisjoint => &[Retain, NoNew, NotDisjoint],
            _ => &[],
        }
    }

    /// Name of the suite that enforces this sub-property.
    pub fn enforce_suite(self) -> String {
        format!("ENFORCE-{}", self.as_str())
    }
}

impl fmt::Display for SubProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SubProperty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use SubProperty::*;
        [
            SameSize,
            SameElements,
            Retain,
            NoNew,
            NotDisjoint,
            Ordered,
            Stable,
            Unique,
            Complete,
            NoDups,
        ]
        .into_iter()
        .find(|p| p.as_str() == s)
        .ok_or_else(|| Error::Unknown {
            kind: "sub-property",
            name: s.to_owned(),
        })
    }
}

/// Whether a violation set isolates `target`: the only top-level violation
/// is `target`'s parent and, for a refinement target, the violated
/// refinements are exactly the ones `target` entails.
pub fn isolates(target: SubProperty, violated: &BTreeSet<SubProperty>) -> bool {
    let top: BTreeSet<_> = violated.iter().filter(|p| !p.is_refinement()).collect();
    if top.len() != 1 || !top.contains(&target.top_level()) {
        return false;
    }
    if target.is_refinement() {
        let refined: BTreeSet<_> = violated
            .iter()
            .copied()
            .filter(|p| p.is_refinement())
            .collect();
        refined == target.implied_refinements().iter().copied().collect()
    } else {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Person {
    pub name: String,
    pub age: i64,
}

impl Person {
    pub fn new(name: impl Into<String>, age: i64) -> Self {
        Person {
            name: name.into(),
            age,
        }
    }
}

impl fmt::Display for Person {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.name, self.age)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SortInstance {
    pub lst: Vec<Person>,
    pub srt: Vec<Person>,
}

impl SortInstance {
    pub fn new(lst: Vec<Person>, srt: Vec<Person>) -> Self {
        SortInstance { lst, srt }
    }
}

/// Ranked preferences of both sides of a matching market. Row `i` of
/// `candidate_prefs` lists company indices from most to least preferred.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Preferences {
    pub candidate_prefs: Vec<Vec<usize>>,
    pub company_prefs: Vec<Vec<usize>>,
}

/// A set of (candidate, company) pairs.
pub type Matching = BTreeSet<(usize, usize)>;

impl Preferences {
    pub fn new(candidate_prefs: Vec<Vec<usize>>, company_prefs: Vec<Vec<usize>>) -> Self {
        Preferences {
            candidate_prefs,
            company_prefs,
        }
    }

    /// Number of members on each side.
    pub fn size(&self) -> usize {
        self.candidate_prefs.len()
    }

    /// Checks both matrices are `n x n` with every row a permutation of `0..n`.
    pub fn validate(&self) -> Result<()> {
        let n = self.candidate_prefs.len();
        if self.company_prefs.len() != n {
            return Err(Error::validation(
                "company_prefs",
                format_args!(
                    "has {} rows but candidate_prefs has {n}",
                    self.company_prefs.len()
                ),
            ));
        }
        for (field, matrix) in [
            ("candidate_prefs", &self.candidate_prefs),
            ("company_prefs", &self.company_prefs),
        ] {
            for (i, row) in matrix.iter().enumerate() {
                let mut seen = vec![false; n];
                let is_perm = row.len() == n
                    && row
                        .iter()
                        .all(|&j| j < n && !std::mem::replace(&mut seen[j], true));
                if !is_perm {
                    return Err(Error::validation(
                        format!("{field}[{i}]"),
                        format_args!("is not a permutation of 0..{n}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `rank[i][j]` is the position of `j` in row `i`.
    pub(crate) fn ranks(matrix: &[Vec<usize>]) -> Vec<Vec<usize>> {
        matrix
            .iter()
            .map(|row| {
                let mut rank = vec![0; row.len()];
                for (pos, &j) in row.iter().enumerate() {
                    rank[j] = pos;
                }
                rank
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchInstance {
    #[serde(flatten)]
    pub prefs: Preferences,
    #[serde(rename = "match")]
    pub matching: Matching,
}

impl MatchInstance {
    pub fn new(prefs: Preferences, matching: Matching) -> Self {
        MatchInstance { prefs, matching }
    }

    pub fn validate(&self) -> Result<()> {
        self.prefs.validate()?;
        let n = self.prefs.size();
        if let Some(&(c, k)) = self.matching.iter().find(|&&(c, k)| c >= n || k >= n) {
            return Err(Error::validation(
                "match",
                format_args!("pair ({c}, {k}) is out of range for n = {n}"),
            ));
        }
        Ok(())
    }
}

/// A directed graph with an explicit vertex set, so isolated vertices are
/// representable. When `vertices` is missing from JSON it defaults to the
/// set of edge endpoints.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawDag")]
pub struct Dag {
    pub vertices: BTreeSet<String>,
    pub edges: Vec<(String, String)>,
}

#[derive(Deserialize)]
struct RawDag {
    #[serde(default)]
    vertices: Option<BTreeSet<String>>,
    #[serde(default)]
    edges: Vec<(String, String)>,
}

impl From<RawDag> for Dag {
    fn from(raw: RawDag) -> Self {
        let vertices = raw.vertices.unwrap_or_else(|| {
            raw.edges
                .iter()
                .flat_map(|(u, v)| [u.clone(), v.clone()])
                .collect()
        });
        Dag {
            vertices,
            edges: raw.edges,
        }
    }
}

impl Dag {
    pub fn new<V, E>(vertices: V, edges: E) -> Self
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (V::Item, V::Item)>,
    {
        Dag {
            vertices: vertices.into_iter().map(Into::into).collect(),
            edges: edges
                .into_iter()
                .map(|(u, v)| (u.into(), v.into()))
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, (u, v)) in self.edges.iter().enumerate() {
            for endpoint in [u, v] {
                if !self.vertices.contains(endpoint) {
                    return Err(Error::validation(
                        format!("edges[{i}]"),
                        format_args!("references `{endpoint}`, which is not in vertices"),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ToposortInstance {
    #[serde(flatten)]
    pub dag: Dag,
    pub srt: Vec<String>,
}

impl ToposortInstance {
    pub fn new(dag: Dag, srt: Vec<String>) -> Self {
        ToposortInstance { dag, srt }
    }
}

/// An INPUT-OUTPUT pair for any of the three problems.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Instance {
    Sort(SortInstance),
    Match(MatchInstance),
    Toposort(ToposortInstance),
}

impl Instance {
    pub fn problem(&self) -> Problem {
        match self {
            Instance::Sort(_) => Problem::Sort,
            Instance::Match(_) => Problem::Match,
            Instance::Toposort(_) => Problem::Toposort,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Instance::Sort(_) => Ok(()),
            Instance::Match(m) => m.validate(),
            Instance::Toposort(t) => t.dag.validate(),
        }
    }

    /// Sub-properties (including refinements) that the reference predicates
    /// reject on this instance. Empty iff the instance is valid.
    pub fn violated_sub_properties(&self) -> Result<BTreeSet<SubProperty>> {
        match self {
            Instance::Sort(s) => Ok(sort::violated_sub_properties(&s.lst, &s.srt)),
            Instance::Match(m) => matching::violated_sub_properties(&m.prefs, &m.matching),
            Instance::Toposort(t) => toposort::violated_sub_properties(&t.dag, &t.srt),
        }
    }

    /// The reference validity predicate.
    pub fn is_valid(&self) -> Result<bool> {
        match self {
            Instance::Sort(s) => Ok(sort::sort_is_valid(&s.lst, &s.srt)),
            Instance::Match(m) => matching::match_is_valid(&m.prefs, &m.matching),
            Instance::Toposort(t) => toposort::toposort_is_valid(&t.dag, &t.srt),
        }
    }

    /// JSON encoding of the INPUT half, as sent over the wire.
    pub fn input_json(&self) -> serde_json::Value {
        match self {
            Instance::Sort(s) => serde_json::json!(s.lst),
            Instance::Match(m) => serde_json::json!(m.prefs),
            Instance::Toposort(t) => serde_json::json!(t.dag),
        }
    }

    /// JSON encoding of the OUTPUT half, as sent over the wire.
    pub fn output_json(&self) -> serde_json::Value {
        match self {
            Instance::Sort(s) => serde_json::json!(s.srt),
            Instance::Match(m) => serde_json::json!(m.matching),
            Instance::Toposort(t) => serde_json::json!(t.srt),
        }
    }

    /// Reassembles an instance from its wire-level halves.
    pub fn from_parts(
        problem: Problem,
        input: serde_json::Value,
        output: serde_json::Value,
    ) -> Result<Instance> {
        Ok(match problem {
            Problem::Sort => Instance::Sort(SortInstance {
                lst: serde_json::from_value(input)?,
                srt: serde_json::from_value(output)?,
            }),
            Problem::Match => Instance::Match(MatchInstance {
                prefs: serde_json::from_value(input)?,
                matching: serde_json::from_value(output)?,
            }),
            Problem::Toposort => Instance::Toposort(ToposortInstance {
                dag: serde_json::from_value(input)?,
                srt: serde_json::from_value(output)?,
            }),
        })
    }
}

impl From<SortInstance> for Instance {
    fn from(s: SortInstance) -> Self {
        Instance::Sort(s)
    }
}

impl From<MatchInstance> for Instance {
    fn from(m: MatchInstance) -> Self {
        Instance::Match(m)
    }
}

impl From<ToposortInstance> for Instance {
    fn from(t: ToposortInstance) -> Self {
        Instance::Toposort(t)
    }
}

pub const FUNCTIONAL: &str = "FUNCTIONAL";
pub const RELATIONAL: &str = "RELATIONAL";
pub const EDGE: &str = "EDGE";
pub const OVERREACH_NEGATIVE_AGE: &str = "OVERREACH-NEGATIVE-AGE";
pub const OVERREACH_OLD_AGE: &str = "OVERREACH-OLD-AGE";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub instance: Instance,
    pub expected: bool,
}

/// A named list of cases. ENFORCE suites hold invalid instances that each
/// break a single sub-property; RELATIONAL, EDGE and OVERREACH suites hold
/// valid instances only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSuite {
    pub name: String,
    pub cases: Vec<Case>,
}

impl TestSuite {
    pub fn new(name: impl Into<String>) -> Self {
        TestSuite {
            name: name.into(),
            cases: Vec::new(),
        }
    }

    pub fn with_cases<I>(name: impl Into<String>, expected: bool, instances: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<Instance>,
    {
        TestSuite {
            name: name.into(),
            cases: instances
                .into_iter()
                .map(|instance| Case {
                    instance: instance.into(),
                    expected,
                })
                .collect(),
        }
    }

    pub fn push(&mut self, instance: impl Into<Instance>, expected: bool) {
        self.cases.push(Case {
            instance: instance.into(),
            expected,
        });
    }

    /// The sub-property an `ENFORCE-X` suite targets.
    pub fn enforced(&self) -> Option<SubProperty> {
        self.name.strip_prefix("ENFORCE-")?.parse().ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Outcome {
    True,
    False,
    Error,
    Timeout,
}

impl Outcome {
    /// ERROR and TIMEOUT match nothing.
    pub fn matches(self, expected: bool) -> bool {
        match self {
            Outcome::True => expected,
            Outcome::False => !expected,
            Outcome::Error | Outcome::Timeout => false,
        }
    }
}

impl From<bool> for Outcome {
    fn from(b: bool) -> Self {
        if b {
            Outcome::True
        } else {
            Outcome::False
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub case: usize,
    pub outcome: Outcome,
}

/// How one candidate fared against a problem's suites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionPattern {
    pub candidate_id: String,
    pub problem: Problem,
    pub functional_accepted: bool,
    pub rejected_by: BTreeSet<String>,
    pub verdicts: BTreeMap<String, Vec<Verdict>>,
}
