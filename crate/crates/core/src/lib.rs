//! Cluster explanations from item tags.
//!
//! Given clusters whose items each carry a set of tags, this crate finds
//! small sets of tags that hit every item of a cluster (disjunctive
//! descriptors, i.e. hitting sets) and pairs of disjoint such sets
//! (two-clause CNF descriptors). Filters restrict the admissible tags so
//! descriptors stay informative, and the upstream pipeline (tag derivation,
//! k-means, elbow curves) plus a timing harness are included.

pub mod bench;
pub mod bitset;
pub mod error;
pub mod filter;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod solve;
pub mod table;
pub mod tagging;

pub use error::{Error, ErrorKind, Result};
pub use io::ClusterSet;
pub use model::{
    is_valid_descriptor, tag_coverage_percentages, tag_frequencies, CandidateMask, CnfDescriptor,
    DisjunctiveDescriptor, Item, TagStats, TagUniverse, TaggedCluster,
};
pub use solve::{
    brute_force_minimum_hitting_set, cnf_descriptor, exact_minimum_hitting_set, greedy_hitting_set,
    SolverConfig,
};
