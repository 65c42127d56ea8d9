//! Topological sorting of a directed acyclic graph.
//!
//! `srt` is valid for a graph when it lists exactly the graph's vertices
//! (SAME-ELEMENTS, compared as sets), respects every edge (ORDERED) and
//! repeats nothing (NO-DUPS).

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::domain::{Dag, SubProperty, TestSuite, ToposortInstance, EDGE, FUNCTIONAL, RELATIONAL};
use crate::error::{Error, Result};
use crate::rng::seeded;

/// Largest graph `enumerate_topological_orders` accepts by default.
pub const DEFAULT_ENUMERATION_BOUND: usize = 7;

pub const DEFAULT_EDGE_PROBABILITY: f64 = 0.3;

/// Every occurrence of `u` must precede every occurrence of `v`; a self-loop
/// can never be satisfied by a vertex that is present.
fn edge_respected(srt: &[String], u: &str, v: &str) -> bool {
    if u == v {
        return !srt.iter().any(|x| x == u);
    }
    let last_u = srt.iter().rposition(|x| x == u);
    let first_v = srt.iter().position(|x| x == v);
    match (last_u, first_v) {
        (Some(last_u), Some(first_v)) => last_u < first_v,
        _ => true,
    }
}

pub fn violated_sub_properties(dag: &Dag, srt: &[String]) -> Result<BTreeSet<SubProperty>> {
    dag.validate()?;
    let listed: BTreeSet<&String> = srt.iter().collect();
    let vertices: BTreeSet<&String> = dag.vertices.iter().collect();

    let mut violated = BTreeSet::new();
    if !vertices.is_subset(&listed) {
        violated.insert(SubProperty::Retain);
    }
    if !listed.is_subset(&vertices) {
        violated.insert(SubProperty::NoNew);
    }
    if !vertices.is_empty() && !listed.is_empty() && vertices.is_disjoint(&listed) {
        violated.insert(SubProperty::NotDisjoint);
    }
    if listed != vertices {
        violated.insert(SubProperty::SameElements);
    }
    if !dag.edges.iter().all(|(u, v)| edge_respected(srt, u, v)) {
        violated.insert(SubProperty::Ordered);
    }
    if listed.len() != srt.len() {
        violated.insert(SubProperty::NoDups);
    }
    Ok(violated)
}

/// The reference validity predicate. Defined for cyclic graphs too, where
/// it rejects every `srt` that lists a vertex of the cycle.
pub fn toposort_is_valid(dag: &Dag, srt: &[String]) -> Result<bool> {
    Ok(violated_sub_properties(dag, srt)?.is_empty())
}

struct Adjacency<'a> {
    successors: BTreeMap<&'a str, Vec<&'a str>>,
    in_degree: BTreeMap<&'a str, usize>,
}

impl<'a> Adjacency<'a> {
    fn new(dag: &'a Dag) -> Self {
        let mut successors: BTreeMap<&str, Vec<&str>> = dag
            .vertices
            .iter()
            .map(|v| (v.as_str(), Vec::new()))
            .collect();
        let mut in_degree: BTreeMap<&str, usize> =
            dag.vertices.iter().map(|v| (v.as_str(), 0)).collect();
        for (u, v) in &dag.edges {
            successors.get_mut(u.as_str()).expect("validated").push(v);
            *in_degree.get_mut(v.as_str()).expect("validated") += 1;
        }
        Adjacency {
            successors,
            in_degree,
        }
    }
}

/// Some cycle of `dag`, if it has one, listed from its first vertex back to
/// that same vertex.
pub fn find_cycle(dag: &Dag) -> Result<Option<Vec<String>>> {
    dag.validate()?;
    let adjacency = Adjacency::new(dag);
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        OnStack,
        Done,
    }
    let mut marks: BTreeMap<&str, Mark> = adjacency
        .in_degree
        .keys()
        .map(|&v| (v, Mark::Fresh))
        .collect();

    for &root in adjacency.in_degree.keys() {
        if marks[root] != Mark::Fresh {
            continue;
        }
        // Iterative DFS: (vertex, index of next successor to visit).
        let mut stack: Vec<(&str, usize)> = vec![(root, 0)];
        marks.insert(root, Mark::OnStack);
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let succ = &adjacency.successors[v];
            if *next == succ.len() {
                marks.insert(v, Mark::Done);
                stack.pop();
                continue;
            }
            let w = succ[*next];
            *next += 1;
            match marks[w] {
                Mark::Fresh => {
                    marks.insert(w, Mark::OnStack);
                    stack.push((w, 0));
                }
                Mark::OnStack => {
                    let start = stack.iter().position(|&(x, _)| x == w).expect("on stack");
                    let mut cycle: Vec<String> =
                        stack[start..].iter().map(|&(x, _)| x.to_owned()).collect();
                    cycle.push(w.to_owned());
                    return Ok(Some(cycle));
                }
                Mark::Done => {}
            }
        }
    }
    Ok(None)
}

fn ensure_acyclic(dag: &Dag) -> Result<()> {
    match find_cycle(dag)? {
        Some(cycle) => Err(Error::Cycle { cycle }),
        None => Ok(()),
    }
}

/// Every linear extension of `dag`, up to [`DEFAULT_ENUMERATION_BOUND`]
/// vertices.
pub fn enumerate_topological_orders(dag: &Dag) -> Result<BTreeSet<Vec<String>>> {
    enumerate_topological_orders_within(dag, DEFAULT_ENUMERATION_BOUND)
}

/// Backtracks over the set of vertices with no remaining predecessors.
pub fn enumerate_topological_orders_within(
    dag: &Dag,
    bound: usize,
) -> Result<BTreeSet<Vec<String>>> {
    ensure_acyclic(dag)?;
    if dag.vertices.len() > bound {
        return Err(Error::SizeLimit {
            what: "vertex set",
            size: dag.vertices.len(),
            bound,
        });
    }
    let Adjacency {
        successors,
        mut in_degree,
    } = Adjacency::new(dag);
    let frontier: BTreeSet<&str> = in_degree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&v, _)| v)
        .collect();

    fn extend<'a>(
        successors: &BTreeMap<&'a str, Vec<&'a str>>,
        in_degree: &mut BTreeMap<&'a str, usize>,
        frontier: BTreeSet<&'a str>,
        prefix: &mut Vec<&'a str>,
        total: usize,
        out: &mut BTreeSet<Vec<String>>,
    ) {
        if prefix.len() == total {
            out.insert(prefix.iter().map(|&v| v.to_owned()).collect());
            return;
        }
        for &v in &frontier {
            let mut next = frontier.clone();
            next.remove(v);
            for &w in &successors[v] {
                let d = in_degree.get_mut(w).expect("known vertex");
                *d -= 1;
                if *d == 0 {
                    next.insert(w);
                }
            }
            prefix.push(v);
            extend(successors, in_degree, next, prefix, total, out);
            prefix.pop();
            for &w in &successors[v] {
                *in_degree.get_mut(w).expect("known vertex") += 1;
            }
        }
    }

    let mut out = BTreeSet::new();
    extend(
        &successors,
        &mut in_degree,
        frontier,
        &mut Vec::with_capacity(dag.vertices.len()),
        dag.vertices.len(),
        &mut out,
    );
    Ok(out)
}

/// Kahn's algorithm, always taking the lexicographically smallest ready
/// vertex. Only used as the subject of implementation checks and of the
/// exact-equality mutant.
pub fn kahn_order(dag: &Dag) -> Result<Vec<String>> {
    ensure_acyclic(dag)?;
    let Adjacency {
        successors,
        mut in_degree,
    } = Adjacency::new(dag);
    let mut ready: BTreeSet<&str> = in_degree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&v, _)| v)
        .collect();
    let mut order = Vec::with_capacity(dag.vertices.len());
    while let Some(v) = ready.pop_first() {
        order.push(v.to_owned());
        for &w in &successors[v] {
            let d = in_degree.get_mut(w).expect("known vertex");
            *d -= 1;
            if *d == 0 {
                ready.insert(w);
            }
        }
    }
    Ok(order)
}

/// A random DAG on `n` vertices named `v0 .. v{n-1}`.
///
/// The vertices are shuffled into a random order and each forward pair in
/// that order becomes an edge with probability `edge_probability`. Every
/// edge points forward, so the shuffled order is itself a topological order.
pub fn generate_dag(n: usize, seed: u64, edge_probability: f64) -> Result<Dag> {
    if !(0.0..=1.0).contains(&edge_probability) {
        return Err(Error::InvalidArgument(format!(
            "edge probability must lie in [0, 1], got {edge_probability}"
        )));
    }
    let mut rng = seeded(seed);
    let mut order: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_probability) {
                edges.push((order[i].clone(), order[j].clone()));
            }
        }
    }
    Ok(Dag {
        vertices: order.into_iter().collect(),
        edges,
    })
}

fn order(vertices: &[&str]) -> Vec<String> {
    vertices.iter().map(|&v| v.to_owned()).collect()
}

fn case(dag: &Dag, srt: &[&str]) -> ToposortInstance {
    ToposortInstance::new(dag.clone(), order(srt))
}

/// The graph `a -> b`, `a -> c`, which has two topological orders.
pub fn fan() -> Dag {
    Dag::new(["a", "b", "c"], [("a", "b"), ("a", "c")])
}

/// The fixed grading suites for the topological sorting problem.
pub fn build_toposort_suites() -> Vec<TestSuite> {
    let diamond = Dag::new(
        ["a", "b", "c", "d"],
        [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
    );
    let chain3 = Dag::new(["x", "y", "z"], [("x", "y"), ("y", "z")]);
    let sparse = Dag::new(["p", "q", "r"], [("p", "q")]);
    let chain5 = Dag::new(
        ["a", "b", "c", "d", "e"],
        [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")],
    );

    // Dropping or adding a vertex always changes the length, since
    // duplicates belong to NO-DUPS.
    let retain = TestSuite::with_cases(
        SubProperty::Retain.enforce_suite(),
        false,
        [
            case(&diamond, &["a", "b", "d"]),
            case(&chain3, &["x", "z"]),
            case(&sparse, &["p", "q"]),
        ],
    );
    let no_new = TestSuite::with_cases(
        SubProperty::NoNew.enforce_suite(),
        false,
        [
            case(&diamond, &["a", "b", "c", "d", "e"]),
            case(&sparse, &["p", "z", "q", "r"]),
        ],
    );
    let not_disjoint = TestSuite::with_cases(
        SubProperty::NotDisjoint.enforce_suite(),
        false,
        [
            case(&diamond, &["w", "x", "y", "z"]),
            case(&sparse, &["s", "t", "u"]),
        ],
    );
    let mut same_elements = TestSuite::new(SubProperty::SameElements.enforce_suite());
    for refinement in [&retain, &no_new, &not_disjoint] {
        same_elements.cases.extend(refinement.cases.iter().cloned());
    }
    // one vertex substituted for another
    same_elements.push(case(&diamond, &["a", "b", "e", "d"]), false);

    let ordered = TestSuite::with_cases(
        SubProperty::Ordered.enforce_suite(),
        false,
        [
            case(&diamond, &["a", "d", "b", "c"]),
            case(&chain3, &["y", "x", "z"]),
            case(&fan(), &["b", "a", "c"]),
        ],
    );
    let no_dups = TestSuite::with_cases(
        SubProperty::NoDups.enforce_suite(),
        false,
        [
            case(&diamond, &["a", "b", "c", "d", "d"]),
            case(&chain3, &["x", "x", "y", "z"]),
            case(&sparse, &["p", "r", "q", "r"]),
        ],
    );

    let relational_dag = fan();
    let relational = TestSuite::with_cases(
        RELATIONAL,
        true,
        enumerate_topological_orders(&relational_dag)
            .expect("fan is acyclic and small")
            .into_iter()
            .map(|srt| ToposortInstance::new(relational_dag.clone(), srt)),
    );

    let mut functional = TestSuite::new(FUNCTIONAL);
    functional.push(case(&chain5, &["a", "b", "c", "d", "e"]), true);
    functional.push(case(&chain5, &["e", "d", "z", "d"]), false);

    let edge = TestSuite::with_cases(
        EDGE,
        true,
        [
            case(&Dag::default(), &[]),
            case(&Dag::new(["a"], []), &["a"]),
        ],
    );

    vec![
        functional,
        same_elements,
        retain,
        no_new,
        not_disjoint,
        ordered,
        no_dups,
        relational,
        edge,
    ]
}
