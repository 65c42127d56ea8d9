//! Reference validity predicates for three relational problems (sorting
//! people by age, stable matching, topological sorting) and a harness that
//! grades candidate predicates against suites that each isolate one
//! sub-property of the problem's specification.
//!
//! A relational problem admits several valid outputs for one input, so a
//! correct predicate cannot just compare against a reference solver. The
//! suites in this crate expose the usual ways candidate predicates go wrong:
//! missing a sub-property, demanding one canonical output, or assuming
//! constraints that the specification never states.
//!
//! ```
//! use relacheck::domain::{Person, Problem};
//! use relacheck::harness::{classify, find_mutant, Candidate};
//! use relacheck::sort::sort_is_valid;
//!
//! let lst = [Person::new("Ann", 30), Person::new("Bo", 30)];
//! let srt = [Person::new("Bo", 30), Person::new("Ann", 30)];
//! assert!(sort_is_valid(&lst, &srt));
//!
//! let exact = find_mutant(Problem::Sort, "exact-reference-equality").unwrap();
//! let pattern = classify(&Candidate::mutant(exact), Problem::Sort)?;
//! assert_eq!(pattern.rejected_by.into_iter().collect::<Vec<_>>(), ["RELATIONAL"]);
//! # Ok::<(), relacheck::Error>(())
//! ```

pub mod domain;
mod error;
pub mod harness;
pub mod matching;
pub mod report;
pub mod rng;
pub mod sort;
pub mod toposort;

pub use error::{Error, Result};

// The guide under book/ is compiled into doctests so its snippets stay in
// sync with the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sub-properties.md")]
    mod sub_properties {}
    #[doc = include_str!("../../../book/src/sorting.md")]
    mod sorting {}
    #[doc = include_str!("../../../book/src/matching.md")]
    mod matching {}
    #[doc = include_str!("../../../book/src/toposort.md")]
    mod toposort {}
    #[doc = include_str!("../../../book/src/grading.md")]
    mod grading {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
