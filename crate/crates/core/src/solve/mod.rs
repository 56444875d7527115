//! Descriptor solvers.
//!
//! * [`greedy_hitting_set`]: repeated max-frequency selection.
//! * [`exact_minimum_hitting_set`]: depth-first branch-and-bound with the
//!   optimum of the 0/1 covering program `min Σx` s.t. every item has a chosen tag.
//! * [`brute_force_minimum_hitting_set`]: exhaustive oracle for small universes.
//! * [`cnf_descriptor`]: two disjoint clauses, the second solved on the
//!   tag sets left after removing the first.

mod brute;
mod cnf;
mod exact;
mod greedy;

pub use brute::{brute_force_minimum_hitting_set, ORACLE_TAG_CAP};
pub use cnf::{cnf_descriptor, CnfResult, RemovalReason, RemovedItem};
pub use exact::{exact_minimum_hitting_set, exact_with_stats, ExactOutcome};
pub use greedy::greedy_hitting_set;

use std::fmt;
use std::str::FromStr;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::model::{CandidateMask, TaggedCluster};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClauseSolver {
    #[default]
    Greedy,
    Exact,
}

impl FromStr for ClauseSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(ClauseSolver::Greedy),
            "exact" => Ok(ClauseSolver::Exact),
            other => Err(Error::config(format!("unknown clause solver {other:?}"))),
        }
    }
}

impl fmt::Display for ClauseSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClauseSolver::Greedy => "greedy",
            ClauseSolver::Exact => "exact",
        })
    }
}

/// How [`cnf_descriptor`] treats items that make a two-clause descriptor impossible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CnfPreprocess {
    /// Fail on the first such item.
    #[default]
    Strict,
    /// Remove such items and report them.
    DropAndReport,
}

impl FromStr for CnfPreprocess {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(CnfPreprocess::Strict),
            "drop-and-report" => Ok(CnfPreprocess::DropAndReport),
            other => Err(Error::config(format!(
                "unknown CNF preprocessing mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub candidate_mask: Option<CandidateMask>,
    pub node_budget: u64,
    pub clause1: ClauseSolver,
    pub clause2: ClauseSolver,
    pub cnf_preprocess: CnfPreprocess,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            candidate_mask: None,
            node_budget: DEFAULT_NODE_BUDGET,
            clause1: ClauseSolver::Greedy,
            clause2: ClauseSolver::Greedy,
            cnf_preprocess: CnfPreprocess::Strict,
        }
    }
}

impl SolverConfig {
    pub fn with_mask(mut self, mask: CandidateMask) -> Self {
        self.candidate_mask = Some(mask);
        self
    }

    pub fn with_node_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn with_clause_solvers(mut self, clause1: ClauseSolver, clause2: ClauseSolver) -> Self {
        self.clause1 = clause1;
        self.clause2 = clause2;
        self
    }

    pub fn with_cnf_preprocess(mut self, mode: CnfPreprocess) -> Self {
        self.cnf_preprocess = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_budget == 0 {
            return Err(Error::config("node budget must be at least 1"));
        }
        Ok(())
    }

    pub(crate) fn mask_for(&self, cluster: &TaggedCluster) -> Result<CandidateMask> {
        let m = cluster.universe().len();
        match &self.candidate_mask {
            Some(mask) => {
                mask.check_universe(cluster.universe())?;
                Ok(mask.clone())
            }
            None => Ok(CandidateMask::all(m)),
        }
    }
}

/// Each item's tag set restricted to admissible tags.
///
/// Rejects untagged items and items left without any admissible tag.
pub(crate) fn admissible_sets(
    cluster: &TaggedCluster,
    mask: &CandidateMask,
) -> Result<Vec<BitSet>> {
    cluster.ensure_tagged()?;
    cluster
        .items()
        .iter()
        .map(|item| {
            let set = item.tags.intersection(mask.admissible());
            if set.is_empty() {
                Err(Error::InfeasibleUnderMask {
                    item: item.id.clone(),
                })
            } else {
                Ok(set)
            }
        })
        .collect()
}

/// For each tag, the set of items (by index) that carry it.
pub(crate) fn tag_item_sets(item_sets: &[BitSet], m: usize) -> Vec<BitSet> {
    let n = item_sets.len();
    let mut by_tag = vec![BitSet::new(n); m];
    for (i, set) in item_sets.iter().enumerate() {
        for t in set.iter() {
            by_tag[t].insert(i);
        }
    }
    by_tag
}
