//! Sorting a list of people by age.
//!
//! A valid `srt` is any rearrangement of `lst` whose ages ascend
//! (non-strictly). People with equal ages may appear in any relative order,
//! so a list with repeated ages has several valid outputs.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::domain::{
    Person, SortInstance, SubProperty, TestSuite, EDGE, FUNCTIONAL, OVERREACH_NEGATIVE_AGE,
    OVERREACH_OLD_AGE, RELATIONAL,
};
use crate::error::{Error, Result};
use crate::rng::seeded;

/// Largest list `enumerate_valid_sorts` accepts by default.
pub const DEFAULT_ENUMERATION_BOUND: usize = 6;

fn counts(people: &[Person]) -> BTreeMap<&Person, usize> {
    let mut counts = BTreeMap::new();
    for p in people {
        *counts.entry(p).or_insert(0) += 1;
    }
    counts
}

fn is_ordered(srt: &[Person]) -> bool {
    srt.windows(2).all(|w| w[0].age <= w[1].age)
}

/// The reference validity predicate: `srt` is a permutation of `lst` with
/// non-decreasing ages.
pub fn sort_is_valid(lst: &[Person], srt: &[Person]) -> bool {
    lst.len() == srt.len() && counts(lst) == counts(srt) && is_ordered(srt)
}

/// Which sub-properties `(lst, srt)` breaks.
///
/// Membership is compared as sets, so `[a; 4]` and `[a; 7]` hold the same
/// elements and differ only in size. When both lists have the same length
/// and the same members, multiplicities must agree as well; a mismatch
/// there violates both containment directions. Together with SAME-SIZE this
/// makes SAME-ELEMENTS equivalent to multiset equality.
pub fn violated_sub_properties(lst: &[Person], srt: &[Person]) -> BTreeSet<SubProperty> {
    let lst_set: BTreeSet<&Person> = lst.iter().collect();
    let srt_set: BTreeSet<&Person> = srt.iter().collect();
    let same_size = lst.len() == srt.len();
    let multiplicities_agree = !(same_size && lst_set == srt_set) || counts(lst) == counts(srt);

    let mut violated = BTreeSet::new();
    if !same_size {
        violated.insert(SubProperty::SameSize);
    }
    if !(lst_set.is_subset(&srt_set) && multiplicities_agree) {
        violated.insert(SubProperty::Retain);
    }
    if !(srt_set.is_subset(&lst_set) && multiplicities_agree) {
        violated.insert(SubProperty::NoNew);
    }
    if !lst.is_empty() && !srt.is_empty() && lst_set.is_disjoint(&srt_set) {
        violated.insert(SubProperty::NotDisjoint);
    }
    if violated.contains(&SubProperty::Retain) || violated.contains(&SubProperty::NoNew) {
        violated.insert(SubProperty::SameElements);
    }
    if !is_ordered(srt) {
        violated.insert(SubProperty::Ordered);
    }
    violated
}

/// A stable sort by age; the canonical answer a naive predicate compares against.
pub fn reference_sort(lst: &[Person]) -> Vec<Person> {
    let mut sorted = lst.to_vec();
    sorted.sort_by_key(|p| p.age);
    sorted
}

/// Every valid `srt` for `lst`, up to [`DEFAULT_ENUMERATION_BOUND`] people.
pub fn enumerate_valid_sorts(lst: &[Person]) -> Result<BTreeSet<Vec<Person>>> {
    enumerate_valid_sorts_within(lst, DEFAULT_ENUMERATION_BOUND)
}

/// Every valid `srt` for `lst`, obtained by permuting people within each
/// block of equal ages.
pub fn enumerate_valid_sorts_within(lst: &[Person], bound: usize) -> Result<BTreeSet<Vec<Person>>> {
    if lst.len() > bound {
        return Err(Error::SizeLimit {
            what: "person list",
            size: lst.len(),
            bound,
        });
    }
    let sorted = reference_sort(lst);
    let blocks: Vec<Vec<Vec<Person>>> = sorted
        .chunk_by(|a, b| a.age == b.age)
        .map(|block| {
            let mut block = block.to_vec();
            block.sort();
            distinct_permutations(block)
        })
        .collect();

    let mut orders = vec![Vec::with_capacity(lst.len())];
    for block in &blocks {
        orders = orders
            .iter()
            .flat_map(|prefix| {
                block.iter().map(move |perm| {
                    let mut next = prefix.clone();
                    next.extend_from_slice(perm);
                    next
                })
            })
            .collect();
    }
    Ok(orders.into_iter().collect())
}

/// All distinct orderings of a sorted slice, in lexicographic order.
fn distinct_permutations<T: Ord + Clone>(mut items: Vec<T>) -> Vec<Vec<T>> {
    let mut out = vec![items.clone()];
    while next_permutation(&mut items) {
        out.push(items.clone());
    }
    out
}

fn next_permutation<T: Ord>(items: &mut [T]) -> bool {
    let Some(pivot) = items.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let successor = items
        .iter()
        .rposition(|x| *x > items[pivot])
        .expect("a larger element exists right of the pivot");
    items.swap(pivot, successor);
    items[pivot + 1..].reverse();
    true
}

const NAMES: [&str; 12] = [
    "Ada", "Ben", "Cleo", "Dev", "Esi", "Finn", "Gia", "Hugo", "Iris", "Jon", "Kaya", "Luis",
];

/// `n` random people. Ages are drawn from a narrow band (18 to 30) so that
/// lists of four or more people often share an age.
pub fn generate_sort_input(n: usize, seed: u64) -> Vec<Person> {
    let mut rng = seeded(seed);
    (0..n)
        .map(|_| {
            let name = *NAMES.choose(&mut rng).expect("name list is non-empty");
            Person::new(name, rng.random_range(18..=30))
        })
        .collect()
}

fn people(spec: &[(&str, i64)]) -> Vec<Person> {
    spec.iter()
        .map(|&(name, age)| Person::new(name, age))
        .collect()
}

fn case(lst: &[(&str, i64)], srt: &[(&str, i64)]) -> SortInstance {
    SortInstance::new(people(lst), people(srt))
}

/// The fixed grading suites for the sorting problem.
pub fn build_sort_suites() -> Vec<TestSuite> {
    let a = ("A", 42);
    let len4 = [a; 4];
    let len7 = [a; 7];

    let same_size = TestSuite::with_cases(
        SubProperty::SameSize.enforce_suite(),
        false,
        [
            case(&len4, &len7),
            case(&len7, &len4),
            case(
                &[("Ann", 25), ("Bo", 31)],
                &[("Ann", 25), ("Ann", 25), ("Bo", 31)],
            ),
            case(
                &[("Bo", 31), ("Ann", 25), ("Bo", 31)],
                &[("Ann", 25), ("Bo", 31)],
            ),
        ],
    );

    // Equal lengths throughout: a dropped person is replaced by a duplicate.
    let retain = TestSuite::with_cases(
        SubProperty::Retain.enforce_suite(),
        false,
        [
            case(
                &[("Cy", 40), ("Ann", 25), ("Bo", 31)],
                &[("Ann", 25), ("Bo", 31), ("Bo", 31)],
            ),
            // same age, different name
            case(
                &[("Ann", 30), ("Bo", 30), ("Cy", 52)],
                &[("Ann", 30), ("Ann", 30), ("Cy", 52)],
            ),
        ],
    );

    let no_new = TestSuite::with_cases(
        SubProperty::NoNew.enforce_suite(),
        false,
        [
            case(
                &[("Bo", 31), ("Ann", 25), ("Ann", 25)],
                &[("Ann", 25), ("Bo", 31), ("Dee", 60)],
            ),
            // same name, different age
            case(
                &[("Eve", 33), ("Ann", 25), ("Eve", 33)],
                &[("Ann", 25), ("Eve", 33), ("Eve", 34)],
            ),
            // same age, different name
            case(
                &[("Gus", 47), ("Fay", 29), ("Gus", 47)],
                &[("Fay", 29), ("Gus", 47), ("Hal", 47)],
            ),
        ],
    );

    let not_disjoint = TestSuite::with_cases(
        SubProperty::NotDisjoint.enforce_suite(),
        false,
        [
            case(
                &[("Ann", 25), ("Bo", 31), ("Cy", 40)],
                &[("Ivy", 22), ("Jo", 35), ("Kai", 58)],
            ),
            case(&[("Bo", 31), ("Ann", 25)], &[("Ann", 26), ("Bo", 32)]),
            case(&[("Bo", 31), ("Ann", 25)], &[("Lu", 25), ("Max", 31)]),
        ],
    );

    let mut same_elements = TestSuite::new(SubProperty::SameElements.enforce_suite());
    for refinement in [&retain, &no_new, &not_disjoint] {
        same_elements.cases.extend(refinement.cases.iter().cloned());
    }
    for extra in [
        // one person changes age: dropped and added at once
        case(
            &[("Bo", 31), ("Ann", 25), ("Cy", 40)],
            &[("Ann", 25), ("Bo", 31), ("Cy", 41)],
        ),
        // one person changes name
        case(
            &[("Bo", 31), ("Ann", 25), ("Cy", 40)],
            &[("Ann", 25), ("Bo", 31), ("Dan", 40)],
        ),
        // same members, different multiplicities
        case(
            &[("Ann", 25), ("Ann", 25), ("Bo", 31)],
            &[("Ann", 25), ("Bo", 31), ("Bo", 31)],
        ),
    ] {
        same_elements.push(extra, false);
    }

    let ordered = TestSuite::with_cases(
        SubProperty::Ordered.enforce_suite(),
        false,
        [
            case(
                &[("Ann", 25), ("Bo", 31), ("Cy", 40)],
                &[("Bo", 31), ("Ann", 25), ("Cy", 40)],
            ),
            case(
                &[("Dee", 60), ("Eve", 33), ("Fay", 29), ("Gus", 47)],
                &[("Dee", 60), ("Gus", 47), ("Eve", 33), ("Fay", 29)],
            ),
            case(
                &[("Ann", 25), ("Cy", 40), ("Bo", 31), ("Bo", 31)],
                &[("Ann", 25), ("Bo", 31), ("Cy", 40), ("Bo", 31)],
            ),
        ],
    );

    let relational_input = people(&[
        ("Quinn", 34),
        ("Ava", 27),
        ("Noor", 34),
        ("Ben", 27),
        ("Cole", 50),
    ]);
    let relational = TestSuite::with_cases(
        RELATIONAL,
        true,
        enumerate_valid_sorts(&relational_input)
            .expect("relational input is within the enumeration bound")
            .into_iter()
            .map(|srt| SortInstance::new(relational_input.clone(), srt)),
    );

    let functional_input = [
        ("Mia", 44),
        ("Leo", 19),
        ("Zoe", 63),
        ("Ivan", 28),
        ("Kim", 35),
    ];
    let mut functional = TestSuite::new(FUNCTIONAL);
    functional.push(
        case(
            &functional_input,
            &[
                ("Leo", 19),
                ("Ivan", 28),
                ("Kim", 35),
                ("Mia", 44),
                ("Zoe", 63),
            ],
        ),
        true,
    );
    functional.push(
        case(&functional_input, &[("Tom", 70), ("Una", 12), ("Val", 50)]),
        false,
    );

    let edge = TestSuite::with_cases(
        EDGE,
        true,
        [case(&[], &[]), case(&[("Solo", 40)], &[("Solo", 40)])],
    );

    let negative = TestSuite::with_cases(
        OVERREACH_NEGATIVE_AGE,
        true,
        [
            case(
                &[("Quill", 7), ("Nyx", -3), ("Rho", 20)],
                &[("Nyx", -3), ("Quill", 7), ("Rho", 20)],
            ),
            case(&[("Yul", 12), ("Zed", -40)], &[("Zed", -40), ("Yul", 12)]),
        ],
    );

    let old = TestSuite::with_cases(
        OVERREACH_OLD_AGE,
        true,
        [
            case(
                &[("Old", 10_000_000_000), ("Yan", 20), ("Mo", 45)],
                &[("Yan", 20), ("Mo", 45), ("Old", 10_000_000_000)],
            ),
            case(&[("Sage", 1001), ("Kid", 8)], &[("Kid", 8), ("Sage", 1001)]),
        ],
    );

    vec![
        functional,
        same_size,
        same_elements,
        retain,
        no_new,
        not_disjoint,
        ordered,
        relational,
        edge,
        negative,
        old,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn p(name: &str, age: i64) -> Person {
        Person::new(name, age)
    }

    /// Permutation filter, independent of the block enumeration.
    fn brute_force(lst: &[Person]) -> BTreeSet<Vec<Person>> {
        lst.iter()
            .cloned()
            .permutations(lst.len())
            .filter(|perm| sort_is_valid(lst, perm))
            .collect()
    }

    #[test]
    fn len4_len7_only_breaks_size() {
        let a = p("A", 42);
        let len4 = vec![a.clone(); 4];
        let len7 = vec![a; 7];
        assert!(!sort_is_valid(&len4, &len7));
        assert!(!sort_is_valid(&len7, &len4));
        assert_eq!(
            violated_sub_properties(&len4, &len7),
            BTreeSet::from([SubProperty::SameSize])
        );
    }

    #[test]
    fn empty_lists_are_sorted() {
        assert!(sort_is_valid(&[], &[]));
        assert!(violated_sub_properties(&[], &[]).is_empty());
        assert_eq!(
            enumerate_valid_sorts(&[]).unwrap(),
            BTreeSet::from([vec![]])
        );
    }

    #[test]
    fn ties_may_be_reordered() {
        let lst = [p("C", 1), p("A", 3), p("B", 3)];
        assert!(sort_is_valid(&lst, &[p("C", 1), p("B", 3), p("A", 3)]));
        assert!(sort_is_valid(&lst, &[p("C", 1), p("A", 3), p("B", 3)]));
        let expected = BTreeSet::from([
            vec![p("C", 1), p("A", 3), p("B", 3)],
            vec![p("C", 1), p("B", 3), p("A", 3)],
        ]);
        assert_eq!(brute_force(&lst), expected);
        assert_eq!(enumerate_valid_sorts(&lst).unwrap(), expected);
    }

    #[test]
    fn distinct_ages_have_one_order() {
        let lst = [p("A", 1), p("B", 2)];
        assert_eq!(
            enumerate_valid_sorts(&lst).unwrap(),
            BTreeSet::from([vec![p("A", 1), p("B", 2)]])
        );
    }

    #[test]
    fn identical_people_are_not_double_counted() {
        let lst = [p("A", 1), p("A", 1), p("B", 1)];
        let got = enumerate_valid_sorts(&lst).unwrap();
        assert_eq!(got.len(), 3);
        assert_eq!(got, brute_force(&lst));
    }

    #[test]
    fn enumeration_bound_is_enforced() {
        let lst = generate_sort_input(7, 1);
        match enumerate_valid_sorts(&lst) {
            Err(Error::SizeLimit { bound, size, .. }) => assert_eq!((bound, size), (6, 7)),
            other => panic!("expected size limit, got {other:?}"),
        }
        assert!(enumerate_valid_sorts_within(&lst, 7).is_ok());
    }

    #[test]
    fn generator_contract() {
        assert!(generate_sort_input(0, 99).is_empty());
        assert_eq!(generate_sort_input(5, 7), generate_sort_input(5, 7));
        let differing = (0..100u64)
            .filter(|s| generate_sort_input(5, 2 * s) != generate_sort_input(5, 2 * s + 1))
            .count();
        assert!(
            differing >= 95,
            "only {differing} of 100 seed pairs differed"
        );
        let lst = generate_sort_input(200, 3);
        assert_eq!(lst.len(), 200);
        assert!(lst.iter().all(|p| p.age >= 0));
    }

    #[test]
    fn generator_reaches_relational_inputs() {
        let with_ties = (0..200u64)
            .filter(|&s| {
                let lst = generate_sort_input(4, s);
                let ages: BTreeSet<_> = lst.iter().map(|p| p.age).collect();
                ages.len() < lst.len()
            })
            .count();
        assert!(
            with_ties > 40,
            "only {with_ties} of 200 lists had a repeated age"
        );
    }

    #[test]
    fn refinements_partition_same_elements() {
        // a dropped element replaced by a duplicate
        let lst = [p("C", 40), p("A", 25), p("B", 31)];
        let srt = [p("A", 25), p("B", 31), p("B", 31)];
        assert_eq!(
            violated_sub_properties(&lst, &srt),
            BTreeSet::from([SubProperty::SameElements, SubProperty::Retain])
        );
        assert_eq!(
            violated_sub_properties(&srt, &lst),
            BTreeSet::from([
                SubProperty::SameElements,
                SubProperty::NoNew,
                SubProperty::Ordered
            ])
        );
    }

    #[test]
    fn suites_have_expected_shape() {
        let suites = build_sort_suites();
        let get = |name: &str| suites.iter().find(|s| s.name == name).unwrap();
        assert_eq!(suites[0].name, FUNCTIONAL);
        assert_eq!(get("ENFORCE-SAME-SIZE").cases.len(), 4);
        assert_eq!(get(RELATIONAL).cases.len(), 4);
        assert!(get(RELATIONAL).cases.iter().all(|c| c.expected));
    }

    mod props {
        use super::*;
        use crate::domain::Instance;
        use proptest::prelude::*;

        fn person() -> impl Strategy<Value = Person> {
            (prop::sample::select(vec!["A", "B", "C"]), 0i64..4).prop_map(|(n, a)| p(n, a))
        }

        proptest! {
            #[test]
            fn valid_iff_nothing_violated(
                lst in prop::collection::vec(person(), 0..5),
                srt in prop::collection::vec(person(), 0..5),
            ) {
                let violated = violated_sub_properties(&lst, &srt);
                prop_assert_eq!(violated.is_empty(), sort_is_valid(&lst, &srt));
                let refined = violated.contains(&SubProperty::Retain)
                    || violated.contains(&SubProperty::NoNew);
                prop_assert_eq!(violated.contains(&SubProperty::SameElements), refined);
                if violated.contains(&SubProperty::NotDisjoint) {
                    prop_assert!(violated.contains(&SubProperty::Retain));
                    prop_assert!(violated.contains(&SubProperty::NoNew));
                }
                let inst = Instance::Sort(SortInstance::new(lst, srt));
                prop_assert_eq!(inst.violated_sub_properties().unwrap(), violated);
            }

            #[test]
            fn size_and_elements_mean_multiset_equality(
                lst in prop::collection::vec(person(), 0..5),
                srt in prop::collection::vec(person(), 0..5),
            ) {
                let violated = violated_sub_properties(&lst, &srt);
                let both_hold = !violated.contains(&SubProperty::SameSize)
                    && !violated.contains(&SubProperty::SameElements);
                let (mut a, mut b) = (lst.clone(), srt.clone());
                a.sort();
                b.sort();
                prop_assert_eq!(both_hold, a == b);
            }

            #[test]
            fn valid_sort_survives_tie_shuffles(lst in prop::collection::vec(person(), 0..7), seed in any::<u64>()) {
                use rand::seq::SliceRandom;
                let mut srt = reference_sort(&lst);
                let mut rng = seeded(seed);
                for block in srt.chunk_by_mut(|a, b| a.age == b.age) {
                    block.shuffle(&mut rng);
                }
                prop_assert!(sort_is_valid(&lst, &srt));
            }

            #[test]
            fn enumeration_matches_permutation_filter(lst in prop::collection::vec(person(), 0..6)) {
                prop_assert_eq!(enumerate_valid_sorts(&lst).unwrap(), brute_force(&lst));
            }
        }
    }
}
