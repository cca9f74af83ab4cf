//! Empirical checks of the structural properties of rough statistical
//! limit sets over a corpus of sequences, plus an exploration of limit-set
//! diameters.
//!
//! Every suite yields a [`SuiteReport`] with one case per corpus entry and
//! parameter combination. A case passes, fails, is inconclusive (some
//! density verdict was undecided) or does not apply; a suite passes when no
//! case fails.

mod corpus;
mod report;
mod suites;

pub use corpus::{Corpus, CorpusEntry};
pub use report::{CaseOutcome, CaseStatus, DiameterFindings, SuiteReport, Summary};
pub use suites::{
    check_boundedness_equivalence, check_cluster_distance, check_contiguity, check_decomposition,
    check_linearity, check_midpoint_strict_convexity, check_order_monotonicity, explore_diameter,
    run_suite, Budget, SuiteName, DEFAULT_ALPHA_PAIRS, DEFAULT_C_LIST, DEFAULT_EXPLORE_ALPHA,
    DEFAULT_EXPLORE_R, DEFAULT_R_SCHEDULE,
};

#[cfg(test)]
mod tests;
