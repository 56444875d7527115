use std::fmt;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::model::{CnfDescriptor, DisjunctiveDescriptor, TaggedCluster};

use super::exact::exact_on_sets;
use super::greedy::greedy_on_sets;
use super::{admissible_sets, ClauseSolver, CnfPreprocess, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemovalReason {
    /// Only one admissible tag, so no two disjoint clauses can both hit it.
    SingletonTagSet,
    /// Every admissible tag of the item went into the first clause.
    EmptiedAfterClause1,
}

impl RemovalReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RemovalReason::SingletonTagSet => "singleton-tag-set",
            RemovalReason::EmptiedAfterClause1 => "emptied-after-D1",
        }
    }
}

impl fmt::Display for RemovalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovedItem {
    pub id: String,
    pub reason: RemovalReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfResult {
    pub descriptor: CnfDescriptor,
    pub removed_items: Vec<RemovedItem>,
}

/// Two-clause CNF descriptor `D1 AND D2`.
///
/// `D1` is solved on the cluster, every tag of `D1` is then removed from
/// every tag set, and `D2` is solved on what remains, which makes the two
/// clauses disjoint. Items that cannot take part (a single admissible tag, or
/// nothing left after removing `D1`) either fail the call or are dropped and
/// reported, depending on [`SolverConfig::cnf_preprocess`].
pub fn cnf_descriptor(cluster: &TaggedCluster, config: &SolverConfig) -> Result<CnfResult> {
    if cluster.is_empty() {
        return Err(Error::EmptyCluster(cluster.id().to_string()));
    }
    config.validate()?;
    let mask = config.mask_for(cluster)?;
    let m = cluster.universe().len();
    let strict = config.cnf_preprocess == CnfPreprocess::Strict;
    let items = cluster.items();
    let mut removed = Vec::new();

    // Admissible tag sets, minus items with a single option.
    let mut kept: Vec<usize> = Vec::with_capacity(items.len());
    let mut sets: Vec<BitSet> = Vec::with_capacity(items.len());
    for (i, set) in admissible_sets(cluster, &mask)?.into_iter().enumerate() {
        if set.len() == 1 {
            if strict {
                return Err(Error::CnfInfeasible {
                    reason: format!("item {:?} has a single admissible tag", items[i].id),
                });
            }
            removed.push(RemovedItem {
                id: items[i].id.clone(),
                reason: RemovalReason::SingletonTagSet,
            });
        } else {
            kept.push(i);
            sets.push(set);
        }
    }
    nonempty(cluster, &sets)?;

    let clause1 = solve_clause(&sets, mask.admissible(), config, config.clause1)?;
    let d1 = clause1.to_bitset(m);

    let mut residual = Vec::with_capacity(sets.len());
    for (i, mut set) in kept.into_iter().zip(sets) {
        set.difference_with(&d1);
        if set.is_empty() {
            if strict {
                return Err(Error::CnfInfeasible {
                    reason: format!(
                        "item {:?} has no admissible tag outside the first clause",
                        items[i].id
                    ),
                });
            }
            removed.push(RemovedItem {
                id: items[i].id.clone(),
                reason: RemovalReason::EmptiedAfterClause1,
            });
        } else {
            residual.push(set);
        }
    }
    nonempty(cluster, &residual)?;
    let available = mask.admissible().difference(&d1);
    let clause2 = solve_clause(&residual, &available, config, config.clause2)?;

    let descriptor = CnfDescriptor { clause1, clause2 };
    debug_assert!(descriptor.is_disjoint());
    Ok(CnfResult {
        descriptor,
        removed_items: removed,
    })
}

fn nonempty(cluster: &TaggedCluster, sets: &[BitSet]) -> Result<()> {
    if sets.is_empty() {
        Err(Error::CnfInfeasible {
            reason: format!("every item of cluster {:?} was removed", cluster.id()),
        })
    } else {
        Ok(())
    }
}

fn solve_clause(
    sets: &[BitSet],
    available: &BitSet,
    config: &SolverConfig,
    solver: ClauseSolver,
) -> Result<DisjunctiveDescriptor> {
    match solver {
        ClauseSolver::Greedy => Ok(greedy_on_sets(sets, available.capacity())),
        ClauseSolver::Exact => {
            let out = exact_on_sets(sets, available, config.node_budget);
            if out.optimal {
                Ok(out.descriptor)
            } else {
                Err(Error::BudgetExceeded {
                    budget: config.node_budget,
                    incumbent: out.descriptor,
                })
            }
        }
    }
}
