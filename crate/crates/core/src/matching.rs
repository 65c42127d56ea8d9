//! Stable matching between candidates and companies.
//!
//! Validity is split into three sub-properties:
//!
//! * STABLE: no candidate and company, both represented in the match and not
//!   paired with each other, prefer each other to every partner they
//!   currently have.
//! * UNIQUE: nobody appears in more than one pair.
//! * COMPLETE: everybody appears in some pair.
//!
//! Stability only looks at represented members. That is what lets a match
//! be incomplete without automatically being unstable, so each property can
//! be violated on its own.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rand::seq::SliceRandom;

use crate::domain::{
    MatchInstance, Matching, Preferences, SubProperty, TestSuite, EDGE, FUNCTIONAL, RELATIONAL,
};
use crate::error::{Error, Result};
use crate::rng::seeded;

/// Largest market `enumerate_stable_matchings` accepts by default.
pub const DEFAULT_ENUMERATION_BOUND: usize = 6;

/// Partners of each member that appears in `matching`.
fn partners(matching: &Matching) -> (BTreeMap<usize, Vec<usize>>, BTreeMap<usize, Vec<usize>>) {
    let mut of_candidate: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut of_company: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(c, k) in matching {
        of_candidate.entry(c).or_default().push(k);
        of_company.entry(k).or_default().push(c);
    }
    (of_candidate, of_company)
}

/// Stability over already validated preferences.
fn stable_unchecked(
    candidate_rank: &[Vec<usize>],
    company_rank: &[Vec<usize>],
    matching: &Matching,
) -> bool {
    let (of_candidate, of_company) = partners(matching);
    for (&c, current_companies) in &of_candidate {
        for (&k, current_candidates) in &of_company {
            if matching.contains(&(c, k)) {
                continue;
            }
            let c_prefers_k = current_companies
                .iter()
                .all(|&k2| candidate_rank[c][k] < candidate_rank[c][k2]);
            let k_prefers_c = current_candidates
                .iter()
                .all(|&c2| company_rank[k][c] < company_rank[k][c2]);
            if c_prefers_k && k_prefers_c {
                return false;
            }
        }
    }
    true
}

fn complete_unchecked(n: usize, matching: &Matching) -> bool {
    let (of_candidate, of_company) = partners(matching);
    (0..n).all(|i| of_candidate.contains_key(&i) && of_company.contains_key(&i))
}

fn check(prefs: &Preferences, matching: &Matching) -> Result<()> {
    MatchInstance::new(prefs.clone(), matching.clone()).validate()
}

/// True iff no represented candidate and company would both rather be
/// paired with each other.
pub fn is_stable(prefs: &Preferences, matching: &Matching) -> Result<bool> {
    check(prefs, matching)?;
    Ok(stable_unchecked(
        &Preferences::ranks(&prefs.candidate_prefs),
        &Preferences::ranks(&prefs.company_prefs),
        matching,
    ))
}

/// True iff no member occurs in more than one pair.
pub fn is_unique(matching: &Matching) -> bool {
    let (of_candidate, of_company) = partners(matching);
    of_candidate.values().all(|ks| ks.len() == 1) && of_company.values().all(|cs| cs.len() == 1)
}

/// True iff every candidate and every company occurs in some pair.
pub fn is_complete(prefs: &Preferences, matching: &Matching) -> Result<bool> {
    check(prefs, matching)?;
    Ok(complete_unchecked(prefs.size(), matching))
}

/// The reference validity predicate: STABLE, UNIQUE and COMPLETE.
pub fn match_is_valid(prefs: &Preferences, matching: &Matching) -> Result<bool> {
    Ok(violated_sub_properties(prefs, matching)?.is_empty())
}

pub fn violated_sub_properties(
    prefs: &Preferences,
    matching: &Matching,
) -> Result<BTreeSet<SubProperty>> {
    check(prefs, matching)?;
    Ok(violations_unchecked(
        prefs.size(),
        &Preferences::ranks(&prefs.candidate_prefs),
        &Preferences::ranks(&prefs.company_prefs),
        matching,
    ))
}

fn violations_unchecked(
    n: usize,
    candidate_rank: &[Vec<usize>],
    company_rank: &[Vec<usize>],
    matching: &Matching,
) -> BTreeSet<SubProperty> {
    let mut violated = BTreeSet::new();
    if !stable_unchecked(candidate_rank, company_rank, matching) {
        violated.insert(SubProperty::Stable);
    }
    if !is_unique(matching) {
        violated.insert(SubProperty::Unique);
    }
    if !complete_unchecked(n, matching) {
        violated.insert(SubProperty::Complete);
    }
    violated
}

/// Every stable perfect matching, by exhausting all `n!` bijections.
pub fn enumerate_stable_matchings(prefs: &Preferences) -> Result<BTreeSet<Matching>> {
    enumerate_stable_matchings_within(prefs, DEFAULT_ENUMERATION_BOUND)
}

pub fn enumerate_stable_matchings_within(
    prefs: &Preferences,
    bound: usize,
) -> Result<BTreeSet<Matching>> {
    prefs.validate()?;
    let n = prefs.size();
    if n > bound {
        return Err(Error::SizeLimit {
            what: "preference profile",
            size: n,
            bound,
        });
    }
    let candidate_rank = Preferences::ranks(&prefs.candidate_prefs);
    let company_rank = Preferences::ranks(&prefs.company_prefs);

    let mut found = BTreeSet::new();
    let mut assignment = Vec::with_capacity(n);
    let mut taken = vec![false; n];
    assign_next(
        n,
        &mut assignment,
        &mut taken,
        &mut |companies: &[usize]| {
            let matching: Matching = companies.iter().copied().enumerate().collect();
            if stable_unchecked(&candidate_rank, &company_rank, &matching) {
                found.insert(matching);
            }
        },
    );
    Ok(found)
}

/// Visits every bijection `candidate i -> assignment[i]`.
fn assign_next(
    n: usize,
    assignment: &mut Vec<usize>,
    taken: &mut [bool],
    visit: &mut impl FnMut(&[usize]),
) {
    if assignment.len() == n {
        visit(assignment);
        return;
    }
    for k in 0..n {
        if !taken[k] {
            taken[k] = true;
            assignment.push(k);
            assign_next(n, assignment, taken, visit);
            assignment.pop();
            taken[k] = false;
        }
    }
}

/// Candidate-proposing deferred acceptance. Only used as the subject of
/// implementation checks and of the exact-equality mutant.
pub fn gale_shapley(prefs: &Preferences) -> Result<Matching> {
    prefs.validate()?;
    let n = prefs.size();
    let company_rank = Preferences::ranks(&prefs.company_prefs);
    let mut next_proposal = vec![0; n];
    let mut held_by: Vec<Option<usize>> = vec![None; n];
    let mut free: Vec<usize> = (0..n).rev().collect();
    while let Some(c) = free.pop() {
        let k = prefs.candidate_prefs[c][next_proposal[c]];
        next_proposal[c] += 1;
        match held_by[k] {
            None => held_by[k] = Some(c),
            Some(rival) if company_rank[k][c] < company_rank[k][rival] => {
                held_by[k] = Some(c);
                free.push(rival);
            }
            Some(_) => free.push(c),
        }
    }
    Ok(held_by
        .into_iter()
        .enumerate()
        .filter_map(|(k, c)| c.map(|c| (c, k)))
        .collect())
}

/// Independent uniform random permutations for every row.
pub fn generate_match_input(n: usize, seed: u64) -> Preferences {
    let mut rng = seeded(seed);
    let mut row = || {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        perm
    };
    let candidate_prefs = (0..n).map(|_| row()).collect();
    let company_prefs = (0..n).map(|_| row()).collect();
    Preferences::new(candidate_prefs, company_prefs)
}

/// Searches for an instance whose violated sub-properties are exactly
/// `{target}`.
pub fn find_instance_violating_exactly(target: SubProperty, n: usize) -> Result<MatchInstance> {
    if !matches!(
        target,
        SubProperty::Stable | SubProperty::Unique | SubProperty::Complete
    ) {
        return Err(Error::InvalidArgument(format!(
            "{target} is not a matching sub-property"
        )));
    }
    find_instance_violating(&BTreeSet::from([target]), n)
}

/// Bounded exhaustive search for an instance of size `n` (2 to 4) whose
/// violated sub-properties equal `targets`.
///
/// Companies are relabeled so that candidate 0 ranks them `0, 1, .., n-1`;
/// every profile is equivalent to one of that form. Profiles are visited in
/// lexicographic order and, for each, non-empty pair sets of size at most
/// `n + 1` by increasing size. The first hit is returned, so the result is
/// deterministic.
pub fn find_instance_violating(targets: &BTreeSet<SubProperty>, n: usize) -> Result<MatchInstance> {
    if !(2..=4).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "witness search supports 2 <= n <= 4, got {n}"
        )));
    }
    let identity: Vec<usize> = (0..n).collect();
    let perms: Vec<Vec<usize>> = identity.iter().copied().permutations(n).collect();
    let pairs: Vec<(usize, usize)> = (0..n).cartesian_product(0..n).collect();
    let pair_sets: Vec<Matching> = (1..=n + 1)
        .flat_map(|size| pairs.iter().copied().combinations(size))
        .map(|pairs| pairs.into_iter().collect())
        .collect();

    for rest in std::iter::repeat_n(perms.iter(), 2 * n - 1).multi_cartesian_product() {
        let candidate_prefs: Vec<Vec<usize>> = std::iter::once(&identity)
            .chain(rest[..n - 1].iter().copied())
            .cloned()
            .collect();
        let company_prefs: Vec<Vec<usize>> = rest[n - 1..].iter().map(|&r| r.clone()).collect();
        let candidate_rank = Preferences::ranks(&candidate_prefs);
        let company_rank = Preferences::ranks(&company_prefs);
        if let Some(matching) = pair_sets
            .iter()
            .find(|m| &violations_unchecked(n, &candidate_rank, &company_rank, m) == targets)
        {
            return Ok(MatchInstance::new(
                Preferences::new(candidate_prefs, company_prefs),
                matching.clone(),
            ));
        }
    }
    Err(Error::NotFound {
        target: targets.iter().join("+"),
        n,
    })
}

/// Two candidates and two companies whose first choices point in opposite
/// directions, so both perfect matchings are stable.
pub fn two_stable_profile() -> Preferences {
    Preferences::new(vec![vec![0, 1], vec![1, 0]], vec![vec![1, 0], vec![0, 1]])
}

/// Everyone ranks the other side `0, 1, .., n-1`; the only stable matching
/// pairs `i` with `i`.
pub fn uniform_profile(n: usize) -> Preferences {
    let row: Vec<usize> = (0..n).collect();
    Preferences::new(vec![row.clone(); n], vec![row; n])
}

/// The fixed grading suites for the matching problem.
pub fn build_match_suites() -> Result<Vec<TestSuite>> {
    let mut suites = Vec::new();

    let mut functional = TestSuite::new(FUNCTIONAL);
    functional.push(
        MatchInstance::new(uniform_profile(3), (0..3).map(|i| (i, i)).collect()),
        true,
    );
    functional.push(
        find_instance_violating(
            &BTreeSet::from([
                SubProperty::Stable,
                SubProperty::Unique,
                SubProperty::Complete,
            ]),
            3,
        )?,
        false,
    );
    suites.push(functional);

    for target in [
        SubProperty::Stable,
        SubProperty::Unique,
        SubProperty::Complete,
    ] {
        let witnesses = [2, 3]
            .into_iter()
            .map(|n| find_instance_violating_exactly(target, n))
            .collect::<Result<Vec<_>>>()?;
        suites.push(TestSuite::with_cases(
            target.enforce_suite(),
            false,
            witnesses,
        ));
    }

    let prefs = two_stable_profile();
    suites.push(TestSuite::with_cases(
        RELATIONAL,
        true,
        enumerate_stable_matchings(&prefs)?
            .into_iter()
            .map(|m| MatchInstance::new(prefs.clone(), m)),
    ));

    suites.push(TestSuite::with_cases(
        EDGE,
        true,
        [
            MatchInstance::new(Preferences::default(), Matching::new()),
            MatchInstance::new(uniform_profile(1), Matching::from([(0, 0)])),
        ],
    ));
    Ok(suites)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(pairs: &[(usize, usize)]) -> Matching {
        pairs.iter().copied().collect()
    }

    /// Classical blocking-pair test for perfect matchings, written
    /// independently of `stable_unchecked`.
    fn brute_force(prefs: &Preferences) -> BTreeSet<Matching> {
        let n = prefs.size();
        let rank = |row: &[usize], x: usize| row.iter().position(|&y| y == x).unwrap();
        (0..n)
            .permutations(n)
            .filter(|sigma| {
                let inverse: Vec<usize> = (0..n)
                    .map(|k| sigma.iter().position(|&x| x == k).unwrap())
                    .collect();
                !(0..n).cartesian_product(0..n).any(|(c, k)| {
                    sigma[c] != k
                        && rank(&prefs.candidate_prefs[c], k)
                            < rank(&prefs.candidate_prefs[c], sigma[c])
                        && rank(&prefs.company_prefs[k], c)
                            < rank(&prefs.company_prefs[k], inverse[k])
                })
            })
            .map(|sigma| sigma.into_iter().enumerate().collect())
            .collect()
    }

    #[test]
    fn two_stable_profile_has_two_stable_matchings() {
        let prefs = two_stable_profile();
        assert!(match_is_valid(&prefs, &m(&[(0, 0), (1, 1)])).unwrap());
        assert!(match_is_valid(&prefs, &m(&[(0, 1), (1, 0)])).unwrap());
        let expected = BTreeSet::from([m(&[(0, 0), (1, 1)]), m(&[(0, 1), (1, 0)])]);
        assert_eq!(brute_force(&prefs), expected);
        assert_eq!(enumerate_stable_matchings(&prefs).unwrap(), expected);
    }

    #[test]
    fn uniform_preferences_block_the_swap() {
        let prefs = uniform_profile(2);
        let swapped = m(&[(0, 1), (1, 0)]);
        assert!(!match_is_valid(&prefs, &swapped).unwrap());
        assert!(!is_stable(&prefs, &swapped).unwrap());
        assert_eq!(
            enumerate_stable_matchings(&prefs).unwrap(),
            BTreeSet::from([m(&[(0, 0), (1, 1)])])
        );
    }

    #[test]
    fn sub_predicate_examples() {
        let prefs = two_stable_profile();
        assert!(is_stable(&prefs, &Matching::new()).unwrap());
        assert!(is_stable(&prefs, &m(&[(0, 0), (1, 1)])).unwrap());
        assert!(is_unique(&Matching::new()));
        assert!(!is_unique(&m(&[(0, 0), (1, 0)])));
        assert!(is_unique(&m(&[(0, 0), (1, 1)])));
        assert!(is_complete(&prefs, &m(&[(0, 0), (1, 1)])).unwrap());
        assert!(!is_complete(&prefs, &m(&[(0, 0)])).unwrap());
        assert!(is_complete(&Preferences::default(), &Matching::new()).unwrap());
    }

    #[test]
    fn single_member_market() {
        assert_eq!(
            enumerate_stable_matchings(&uniform_profile(1)).unwrap(),
            BTreeSet::from([m(&[(0, 0)])])
        );
    }

    #[test]
    fn out_of_range_pair_is_rejected() {
        let err = is_stable(&uniform_profile(2), &m(&[(0, 2)])).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "match"));
    }

    #[test]
    fn witness_examples() {
        let stable = find_instance_violating_exactly(SubProperty::Stable, 2).unwrap();
        assert_eq!(stable.prefs, uniform_profile(2));
        assert_eq!(stable.matching, m(&[(0, 1), (1, 0)]));

        let complete = find_instance_violating_exactly(SubProperty::Complete, 2).unwrap();
        assert_eq!(complete.matching, m(&[(0, 0)]));

        let unique = find_instance_violating_exactly(SubProperty::Unique, 2).unwrap();
        assert!(complete_unchecked(2, &unique.matching));
        assert!(!is_unique(&unique.matching));
    }

    #[test]
    fn witness_search_rejects_out_of_range_sizes() {
        assert!(find_instance_violating_exactly(SubProperty::Stable, 1).is_err());
        assert!(find_instance_violating_exactly(SubProperty::Stable, 5).is_err());
        assert!(find_instance_violating_exactly(SubProperty::Ordered, 2).is_err());
    }

    #[test]
    fn gale_shapley_is_stable() {
        for seed in 0..30 {
            let prefs = generate_match_input(seed as usize % 7, seed);
            let matching = gale_shapley(&prefs).unwrap();
            assert!(match_is_valid(&prefs, &matching).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn generator_contract() {
        assert_eq!(generate_match_input(0, 5), Preferences::default());
        assert_eq!(generate_match_input(4, 5), generate_match_input(4, 5));
        let prefs = generate_match_input(6, 11);
        prefs.validate().unwrap();
    }

    #[test]
    fn functional_false_case_breaks_everything() {
        let suites = build_match_suites().unwrap();
        let functional = &suites[0];
        let bad = functional.cases.iter().find(|c| !c.expected).unwrap();
        assert_eq!(
            bad.instance.violated_sub_properties().unwrap(),
            BTreeSet::from([
                SubProperty::Stable,
                SubProperty::Unique,
                SubProperty::Complete
            ])
        );
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for seed in 0..50 {
            let prefs = generate_match_input(seed as usize % 6, seed);
            assert_eq!(
                enumerate_stable_matchings(&prefs).unwrap(),
                brute_force(&prefs),
                "seed {seed}"
            );
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn validity_is_the_conjunction(
                n in 0usize..4,
                seed in any::<u64>(),
                raw_pairs in prop::collection::vec((0usize..4, 0usize..4), 0..6),
            ) {
                let prefs = generate_match_input(n, seed);
                let matching: Matching = raw_pairs
                    .into_iter()
                    .filter(|&(c, k)| c < n && k < n)
                    .collect();
                let conjunction = is_stable(&prefs, &matching).unwrap()
                    && is_unique(&matching)
                    && is_complete(&prefs, &matching).unwrap();
                prop_assert_eq!(match_is_valid(&prefs, &matching).unwrap(), conjunction);
            }

            #[test]
            fn enumerated_matchings_are_valid_and_include_gale_shapley(n in 0usize..5, seed in any::<u64>()) {
                let prefs = generate_match_input(n, seed);
                let all = enumerate_stable_matchings(&prefs).unwrap();
                prop_assert!(!all.is_empty());
                prop_assert!(all.contains(&gale_shapley(&prefs).unwrap()));
                for matching in all {
                    prop_assert!(match_is_valid(&prefs, &matching).unwrap());
                    prop_assert!(is_unique(&matching));
                    prop_assert!(is_complete(&prefs, &matching).unwrap());
                }
            }
        }
    }
}
