//! Deliberately flawed validity predicates, one per documented failure mode.
//!
//! Each mutant carries the exact set of suites expected to reject it. The
//! corpus doubles as a self-test of the suites: if a suite stops isolating
//! its sub-property, some signature stops matching.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::domain::{
    Dag, Instance, MatchInstance, Person, Problem, SortInstance, SubProperty, ToposortInstance,
    EDGE, FUNCTIONAL, OVERREACH_NEGATIVE_AGE, OVERREACH_OLD_AGE, RELATIONAL,
};
use crate::{matching, sort, toposort};

type Judge = fn(&Instance) -> Result<bool, String>;

#[derive(Debug, Clone, Serialize)]
pub struct MutantSpec {
    pub name: &'static str,
    pub problem: Problem,
    pub description: &'static str,
    pub expected_rejected_by: BTreeSet<String>,
    #[serde(skip)]
    judge: Judge,
}

impl MutantSpec {
    /// Runs the flawed predicate. `Err` models a candidate that throws.
    pub fn judge(&self, instance: &Instance) -> Result<bool, String> {
        (self.judge)(instance)
    }
}

fn spec(
    name: &'static str,
    problem: Problem,
    description: &'static str,
    rejected_by: &[&str],
    judge: Judge,
) -> MutantSpec {
    MutantSpec {
        name,
        problem,
        description,
        expected_rejected_by: rejected_by.iter().map(|s| s.to_string()).collect(),
        judge,
    }
}

/// All registered mutants for `problem`.
pub fn mutant_corpus(problem: Problem) -> Vec<MutantSpec> {
    match problem {
        Problem::Sort => sort_mutants(),
        Problem::Match => match_mutants(),
        Problem::Toposort => toposort_mutants(),
    }
}

pub fn find_mutant(problem: Problem, name: &str) -> Option<MutantSpec> {
    mutant_corpus(problem).into_iter().find(|m| m.name == name)
}

fn wrong_problem(instance: &Instance) -> String {
    format!("unexpected {} instance", instance.problem())
}

fn as_sort(instance: &Instance) -> Result<&SortInstance, String> {
    match instance {
        Instance::Sort(s) => Ok(s),
        other => Err(wrong_problem(other)),
    }
}

fn as_match(instance: &Instance) -> Result<&MatchInstance, String> {
    match instance {
        Instance::Match(m) => Ok(m),
        other => Err(wrong_problem(other)),
    }
}

fn as_toposort(instance: &Instance) -> Result<&ToposortInstance, String> {
    match instance {
        Instance::Toposort(t) => Ok(t),
        other => Err(wrong_problem(other)),
    }
}

fn reference(instance: &Instance) -> Result<bool, String> {
    instance.is_valid().map_err(|e| e.to_string())
}

fn enforce(p: SubProperty) -> String {
    p.enforce_suite()
}

// ---- sort ---------------------------------------------------------------

fn ages_ascend(srt: &[Person]) -> bool {
    srt.windows(2).all(|w| w[0].age <= w[1].age)
}

fn person_set(people: &[Person]) -> BTreeSet<&Person> {
    people.iter().collect()
}

fn sorted_people(people: &[Person]) -> Vec<&Person> {
    let mut v: Vec<&Person> = people.iter().collect();
    v.sort();
    v
}

fn sort_mutants() -> Vec<MutantSpec> {
    use SubProperty::*;
    let p = Problem::Sort;
    let same_elements = [SameElements, Retain, NoNew, NotDisjoint].map(enforce);
    let every_enforce = [SameSize, SameElements, Retain, NoNew, NotDisjoint, Ordered].map(enforce);
    let mut always_true_sig: Vec<&str> = every_enforce.iter().map(String::as_str).collect();
    always_true_sig.push(FUNCTIONAL);

    vec![
        spec(
            "exact-reference-equality",
            p,
            "compares srt against the output of a stable reference sort",
            &[RELATIONAL],
            |i| {
                let s = as_sort(i)?;
                Ok(sort::reference_sort(&s.lst) == s.srt)
            },
        ),
        spec(
            "always-true",
            p,
            "accepts everything",
            &always_true_sig,
            |i| as_sort(i).map(|_| true),
        ),
        spec(
            "always-false",
            p,
            "rejects everything",
            &[
                FUNCTIONAL,
                RELATIONAL,
                EDGE,
                OVERREACH_NEGATIVE_AGE,
                OVERREACH_OLD_AGE,
            ],
            |i| as_sort(i).map(|_| false),
        ),
        spec(
            "one-sided-retain",
            p,
            "checks that srt adds nobody, never that lst is retained",
            &[&enforce(Retain), &enforce(SameElements)],
            |i| {
                let s = as_sort(i)?;
                Ok(s.lst.len() == s.srt.len()
                    && ages_ascend(&s.srt)
                    && s.srt.iter().all(|x| s.lst.contains(x)))
            },
        ),
        spec(
            "one-sided-no-new",
            p,
            "checks that everyone in lst is kept, never that srt adds nobody",
            &[&enforce(NoNew), &enforce(SameElements)],
            |i| {
                let s = as_sort(i)?;
                Ok(s.lst.len() == s.srt.len()
                    && ages_ascend(&s.srt)
                    && s.lst.iter().all(|x| s.srt.contains(x)))
            },
        ),
        spec(
            "length-only-elements",
            p,
            "uses equal lengths as a stand-in for equal members",
            &same_elements.iter().map(String::as_str).collect::<Vec<_>>(),
            |i| {
                let s = as_sort(i)?;
                Ok(s.lst.len() == s.srt.len() && ages_ascend(&s.srt))
            },
        ),
        spec(
            "set-semantics-elements",
            p,
            "compares members as sets, ignoring how often each occurs",
            &[&enforce(SameElements)],
            |i| {
                let s = as_sort(i)?;
                Ok(s.lst.len() == s.srt.len()
                    && ages_ascend(&s.srt)
                    && person_set(&s.lst) == person_set(&s.srt))
            },
        ),
        spec(
            "ignore-size",
            p,
            "compares member sets and ordering but not lengths",
            &[&enforce(SameSize), &enforce(SameElements)],
            |i| {
                let s = as_sort(i)?;
                Ok(ages_ascend(&s.srt) && person_set(&s.lst) == person_set(&s.srt))
            },
        ),
        spec(
            "ignore-order",
            p,
            "checks srt is a rearrangement of lst but not that ages ascend",
            &[&enforce(Ordered)],
            |i| {
                let s = as_sort(i)?;
                Ok(sorted_people(&s.lst) == sorted_people(&s.srt))
            },
        ),
        spec(
            "negative-age-rejector",
            p,
            "starts the ordering scan from an assumed minimum age of -1",
            &[OVERREACH_NEGATIVE_AGE],
            |i| {
                let s = as_sort(i)?;
                let mut previous = -1;
                for person in &s.srt {
                    if person.age < previous {
                        return Ok(false);
                    }
                    previous = person.age;
                }
                Ok(sorted_people(&s.lst) == sorted_people(&s.srt))
            },
        ),
        spec(
            "max-age-shortcut",
            p,
            "scans srt backwards from an assumed maximum age of 1000",
            &[OVERREACH_OLD_AGE],
            |i| {
                let s = as_sort(i)?;
                let mut next = 1000;
                for person in s.srt.iter().rev() {
                    if person.age > next {
                        return Ok(false);
                    }
                    next = person.age;
                }
                Ok(sorted_people(&s.lst) == sorted_people(&s.srt))
            },
        ),
        spec(
            "empty-input-crasher",
            p,
            "takes the first element of each list without checking for emptiness",
            &[EDGE],
            |i| {
                let s = as_sort(i)?;
                if s.lst.is_empty() || s.srt.is_empty() {
                    return Err("index out of range: first of empty list".into());
                }
                reference(i)
            },
        ),
    ]
}

// ---- match --------------------------------------------------------------

fn match_mutants() -> Vec<MutantSpec> {
    use SubProperty::*;
    let p = Problem::Match;
    vec![
        spec(
            "exact-reference-equality",
            p,
            "compares the match against the provided deferred-acceptance solver",
            &[RELATIONAL],
            |i| {
                let m = as_match(i)?;
                Ok(matching::gale_shapley(&m.prefs).map_err(|e| e.to_string())? == m.matching)
            },
        ),
        spec(
            "always-true",
            p,
            "accepts everything",
            &[
                FUNCTIONAL,
                &enforce(Stable),
                &enforce(Unique),
                &enforce(Complete),
            ],
            |i| as_match(i).map(|_| true),
        ),
        spec(
            "always-false",
            p,
            "rejects everything",
            &[FUNCTIONAL, RELATIONAL, EDGE],
            |i| as_match(i).map(|_| false),
        ),
        spec(
            "ignore-stability",
            p,
            "checks the match is one-to-one and complete, never looks for blocking pairs",
            &[&enforce(Stable)],
            |i| {
                let m = as_match(i)?;
                Ok(matching::is_unique(&m.matching)
                    && matching::is_complete(&m.prefs, &m.matching).map_err(|e| e.to_string())?)
            },
        ),
        spec(
            "ignore-uniqueness",
            p,
            "checks stability and completeness, never that pairs are disjoint",
            &[&enforce(Unique)],
            |i| {
                let m = as_match(i)?;
                let stable =
                    matching::is_stable(&m.prefs, &m.matching).map_err(|e| e.to_string())?;
                let complete =
                    matching::is_complete(&m.prefs, &m.matching).map_err(|e| e.to_string())?;
                Ok(stable && complete)
            },
        ),
        spec(
            "ignore-completeness",
            p,
            "checks stability and uniqueness, never that everybody is matched",
            &[&enforce(Complete)],
            |i| {
                let m = as_match(i)?;
                Ok(matching::is_unique(&m.matching)
                    && matching::is_stable(&m.prefs, &m.matching).map_err(|e| e.to_string())?)
            },
        ),
        spec(
            "empty-input-crasher",
            p,
            "reads the first preference row and first pair unconditionally",
            &[EDGE],
            |i| {
                let m = as_match(i)?;
                if m.prefs.size() == 0 || m.matching.is_empty() {
                    return Err("index out of range: no first element".into());
                }
                reference(i)
            },
        ),
    ]
}

// ---- toposort -----------------------------------------------------------

fn first_positions_respect_edges(dag: &Dag, srt: &[String]) -> bool {
    let position = |x: &String| srt.iter().position(|y| y == x);
    dag.edges
        .iter()
        .all(|(u, v)| match (position(u), position(v)) {
            (Some(pu), Some(pv)) => pu < pv,
            _ => true,
        })
}

fn no_repeats(srt: &[String]) -> bool {
    srt.iter().collect::<BTreeSet<_>>().len() == srt.len()
}

fn listed(srt: &[String]) -> BTreeSet<&String> {
    srt.iter().collect()
}

fn vertex_refs(dag: &Dag) -> BTreeSet<&String> {
    dag.vertices.iter().collect()
}

fn toposort_mutants() -> Vec<MutantSpec> {
    use SubProperty::*;
    let p = Problem::Toposort;
    let every_enforce = [SameElements, Retain, NoNew, NotDisjoint, Ordered, NoDups].map(enforce);
    let mut always_true_sig: Vec<&str> = every_enforce.iter().map(String::as_str).collect();
    always_true_sig.push(FUNCTIONAL);

    vec![
        spec(
            "exact-reference-equality",
            p,
            "compares srt against the provided topological sorter's output",
            &[RELATIONAL],
            |i| {
                let t = as_toposort(i)?;
                Ok(toposort::kahn_order(&t.dag).map_err(|e| e.to_string())? == t.srt)
            },
        ),
        spec(
            "always-true",
            p,
            "accepts everything",
            &always_true_sig,
            |i| as_toposort(i).map(|_| true),
        ),
        spec(
            "always-false",
            p,
            "rejects everything",
            &[FUNCTIONAL, RELATIONAL, EDGE],
            |i| as_toposort(i).map(|_| false),
        ),
        spec(
            "one-sided-retain",
            p,
            "checks srt lists only graph vertices, never that all of them appear",
            &[&enforce(Retain), &enforce(SameElements)],
            |i| {
                let t = as_toposort(i)?;
                Ok(listed(&t.srt).is_subset(&vertex_refs(&t.dag))
                    && first_positions_respect_edges(&t.dag, &t.srt)
                    && no_repeats(&t.srt))
            },
        ),
        spec(
            "one-sided-no-new",
            p,
            "checks every graph vertex appears, never that srt adds nothing",
            &[&enforce(NoNew), &enforce(SameElements)],
            |i| {
                let t = as_toposort(i)?;
                Ok(vertex_refs(&t.dag).is_subset(&listed(&t.srt))
                    && first_positions_respect_edges(&t.dag, &t.srt)
                    && no_repeats(&t.srt))
            },
        ),
        spec(
            "length-only-elements",
            p,
            "compares the vertex count against the length of srt instead of identities",
            &[&enforce(NotDisjoint), &enforce(SameElements)],
            |i| {
                let t = as_toposort(i)?;
                Ok(t.srt.len() == t.dag.vertices.len()
                    && first_positions_respect_edges(&t.dag, &t.srt)
                    && no_repeats(&t.srt))
            },
        ),
        spec(
            "no-dup-blind",
            p,
            "compares vertex sets and edge order but never looks for repeats",
            &[&enforce(NoDups)],
            |i| {
                let t = as_toposort(i)?;
                Ok(listed(&t.srt) == vertex_refs(&t.dag)
                    && first_positions_respect_edges(&t.dag, &t.srt))
            },
        ),
        spec(
            "ignore-order",
            p,
            "checks srt lists each vertex once but ignores the edges",
            &[&enforce(Ordered)],
            |i| {
                let t = as_toposort(i)?;
                Ok(listed(&t.srt) == vertex_refs(&t.dag) && no_repeats(&t.srt))
            },
        ),
        spec(
            "empty-input-crasher",
            p,
            "pops the first vertex without checking for an empty graph",
            &[EDGE],
            |i| {
                let t = as_toposort(i)?;
                if t.dag.vertices.is_empty() || t.srt.is_empty() {
                    return Err("pop from empty list".into());
                }
                reference(i)
            },
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_per_problem() {
        for problem in Problem::ALL {
            let corpus = mutant_corpus(problem);
            let names: BTreeSet<_> = corpus.iter().map(|m| m.name).collect();
            assert_eq!(names.len(), corpus.len());
            assert!(!names.contains("reference"));
            assert!(corpus.iter().all(|m| m.problem == problem));
        }
    }

    #[test]
    fn exact_equality_is_registered_for_sort() {
        assert!(find_mutant(Problem::Sort, "exact-reference-equality").is_some());
        assert!(find_mutant(Problem::Sort, "no-dup-blind").is_none());
    }

    #[test]
    fn mutants_refuse_foreign_instances() {
        let foreign = Instance::Toposort(ToposortInstance::new(Dag::default(), vec![]));
        let m = find_mutant(Problem::Sort, "always-true").unwrap();
        assert!(m.judge(&foreign).is_err());
    }
}
