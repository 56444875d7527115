use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::model::{DisjunctiveDescriptor, TaggedCluster};

use super::greedy::greedy_order;
use super::{admissible_sets, tag_item_sets, SolverConfig};

/// Result of a branch-and-bound run that may have stopped early.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOutcome {
    /// Best descriptor found, tags ascending. Always valid.
    pub descriptor: DisjunctiveDescriptor,
    /// True when the search space was exhausted within the node budget.
    pub optimal: bool,
    pub nodes: u64,
}

/// Minimum-cardinality descriptor over admissible tags.
///
/// Runs out of budget with [`Error::BudgetExceeded`], which carries the best
/// incumbent found so far.
pub fn exact_minimum_hitting_set(
    cluster: &TaggedCluster,
    config: &SolverConfig,
) -> Result<DisjunctiveDescriptor> {
    let outcome = exact_with_stats(cluster, config)?;
    if outcome.optimal {
        Ok(outcome.descriptor)
    } else {
        Err(Error::BudgetExceeded {
            budget: config.node_budget,
            incumbent: outcome.descriptor,
        })
    }
}

/// Like [`exact_minimum_hitting_set`] but reports budget exhaustion as
/// `optimal == false` instead of an error.
pub fn exact_with_stats(cluster: &TaggedCluster, config: &SolverConfig) -> Result<ExactOutcome> {
    config.validate()?;
    let mask = config.mask_for(cluster)?;
    let sets = admissible_sets(cluster, &mask)?;
    Ok(exact_on_sets(&sets, mask.admissible(), config.node_budget))
}

/// Branch-and-bound over non-empty item sets already restricted to `available`.
pub(crate) fn exact_on_sets(sets: &[BitSet], available: &BitSet, budget: u64) -> ExactOutcome {
    let by_tag = tag_item_sets(sets, available.capacity());
    let mut search = Search {
        sets,
        by_tag: &by_tag,
        incumbent: greedy_order(&by_tag, sets.len()),
        nodes: 0,
        budget,
    };
    let uncovered: Vec<u32> = (0..sets.len() as u32).collect();
    let mut chosen = Vec::new();
    let finished = search.descend(&mut chosen, &uncovered, available.clone());

    let mut best = search.incumbent;
    best.sort_unstable();
    ExactOutcome {
        descriptor: DisjunctiveDescriptor::new(best),
        optimal: finished,
        nodes: search.nodes,
    }
}

struct Search<'a> {
    sets: &'a [BitSet],
    by_tag: &'a [BitSet],
    incumbent: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// Explores the subtree below `chosen`. Tags outside `available` were
    /// already tried by an earlier sibling and may not be picked again.
    /// Returns false once the node budget is spent.
    fn descend(&mut self, chosen: &mut Vec<usize>, uncovered: &[u32], available: BitSet) -> bool {
        if self.nodes >= self.budget {
            return false;
        }
        self.nodes += 1;

        if uncovered.is_empty() {
            if chosen.len() < self.incumbent.len() {
                self.incumbent = chosen.clone();
            }
            return true;
        }
        if chosen.len() + 1 >= self.incumbent.len() {
            return true;
        }

        // Fail-first: the uncovered item with the fewest remaining options.
        let mut pivot = None;
        let mut pivot_width = usize::MAX;
        for &i in uncovered {
            let w = self.sets[i as usize].intersection_len(&available);
            if w < pivot_width {
                pivot_width = w;
                pivot = Some(i as usize);
                if w == 0 {
                    return true;
                }
            }
        }
        let pivot = pivot.expect("uncovered is non-empty");

        if chosen.len() + self.packing_bound(uncovered, &available) >= self.incumbent.len() {
            return true;
        }

        let options = self.sets[pivot].intersection(&available);
        let mut available = available;
        for t in options.iter() {
            available.remove(t);
            let rest: Vec<u32> = uncovered
                .iter()
                .copied()
                .filter(|&i| !self.by_tag[t].contains(i as usize))
                .collect();
            chosen.push(t);
            let finished = self.descend(chosen, &rest, available.clone());
            chosen.pop();
            if !finished {
                return false;
            }
            if chosen.len() + 1 >= self.incumbent.len() {
                break;
            }
        }
        true
    }

    /// Size of a greedily built family of uncovered items with pairwise
    /// disjoint option sets; each needs its own tag.
    fn packing_bound(&self, uncovered: &[u32], available: &BitSet) -> usize {
        let mut used = BitSet::new(available.capacity());
        let mut count = 0;
        for &i in uncovered {
            let options = self.sets[i as usize].intersection(available);
            if !options.intersects(&used) {
                used.union_with(&options);
                count += 1;
            }
        }
        count
    }
}
