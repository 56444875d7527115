use crate::bitset::BitSet;
use crate::error::Result;
use crate::model::{DisjunctiveDescriptor, TaggedCluster};

use super::{admissible_sets, tag_item_sets, SolverConfig};

/// Greedy hitting set: repeatedly take the admissible tag that hits the most
/// items not yet hit. Ties go to the lowest tag id.
///
/// The returned descriptor lists tags in selection order.
pub fn greedy_hitting_set(
    cluster: &TaggedCluster,
    config: &SolverConfig,
) -> Result<DisjunctiveDescriptor> {
    let mask = config.mask_for(cluster)?;
    let sets = admissible_sets(cluster, &mask)?;
    Ok(greedy_on_sets(&sets, cluster.universe().len()))
}

/// Greedy selection over non-empty item sets of width `m`.
pub(crate) fn greedy_on_sets(sets: &[BitSet], m: usize) -> DisjunctiveDescriptor {
    let by_tag = tag_item_sets(sets, m);
    DisjunctiveDescriptor::new(greedy_order(&by_tag, sets.len()))
}

/// Selection loop over per-tag item sets. Every admissible set is non-empty,
/// so each round finds a tag with positive frequency.
pub(crate) fn greedy_order(by_tag: &[BitSet], n: usize) -> Vec<usize> {
    let mut uncovered = BitSet::full(n);
    let mut chosen = Vec::new();
    let mut taken = vec![false; by_tag.len()];
    while !uncovered.is_empty() {
        let mut best: Option<(usize, usize)> = None;
        for (t, items) in by_tag.iter().enumerate() {
            if taken[t] {
                continue;
            }
            let f = items.intersection_len(&uncovered);
            if f > 0 && best.is_none_or(|(_, bf)| f > bf) {
                best = Some((t, f));
            }
        }
        let (t, _) = best.expect("every uncovered item has an admissible tag");
        taken[t] = true;
        chosen.push(t);
        uncovered.difference_with(&by_tag[t]);
    }
    chosen
}
