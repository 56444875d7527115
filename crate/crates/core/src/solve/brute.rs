use crate::error::{Error, Result};
use crate::model::{CandidateMask, DisjunctiveDescriptor, TaggedCluster};

use super::admissible_sets;

/// Largest number of admissible tags the oracle will enumerate.
pub const ORACLE_TAG_CAP: usize = 20;

/// Exhaustive minimum hitting set.
///
/// Subsets of the admissible tags are tried by increasing size, then in
/// lexicographic order of their ascending tag ids; the first valid one wins.
pub fn brute_force_minimum_hitting_set(
    cluster: &TaggedCluster,
    mask: &CandidateMask,
) -> Result<DisjunctiveDescriptor> {
    mask.check_universe(cluster.universe())?;
    let candidates: Vec<usize> = mask.admissible().iter().collect();
    let k = candidates.len();
    if k > ORACLE_TAG_CAP {
        return Err(Error::OracleCap {
            admissible: k,
            cap: ORACLE_TAG_CAP,
        });
    }
    let sets = admissible_sets(cluster, mask)?;

    // Each item as a bit mask over positions in `candidates`.
    let item_bits: Vec<u32> = sets
        .iter()
        .map(|s| {
            candidates
                .iter()
                .enumerate()
                .filter(|(_, &t)| s.contains(t))
                .fold(0u32, |acc, (pos, _)| acc | 1 << pos)
        })
        .collect();

    for size in 0..=k {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let bits = combo.iter().fold(0u32, |acc, &p| acc | 1 << p);
            if item_bits.iter().all(|&b| b & bits != 0) {
                return Ok(DisjunctiveDescriptor::new(
                    combo.iter().map(|&p| candidates[p]),
                ));
            }
            if !next_combination(&mut combo, k) {
                break;
            }
        }
    }
    // Every item has an admissible tag, so the full candidate set is valid.
    unreachable!("the full admissible set hits every item")
}

/// Advances `combo` to the next `combo.len()`-subset of `0..k` in lexicographic order.
fn next_combination(combo: &mut [usize], k: usize) -> bool {
    let r = combo.len();
    let Some(i) = (0..r).rev().find(|&i| combo[i] < k - r + i) else {
        return false;
    };
    combo[i] += 1;
    for j in i + 1..r {
        combo[j] = combo[j - 1] + 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::TagUniverse;

    fn cluster(m: usize, sets: &[&[usize]]) -> TaggedCluster {
        TaggedCluster::new(
            "c",
            Arc::new(TagUniverse::numbered(m)),
            sets.iter()
                .enumerate()
                .map(|(i, s)| (format!("A{}", i + 1), s.iter().map(|t| t - 1).collect())),
            false,
        )
        .unwrap()
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut c = vec![0, 1];
        let mut seen = vec![c.clone()];
        while next_combination(&mut c, 4) {
            seen.push(c.clone());
        }
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut empty: Vec<usize> = vec![];
        assert!(!next_combination(&mut empty, 3));
    }

    #[test]
    fn four_set_example() {
        // Size-2 candidates in lexicographic order: {t1,t2} misses A3,
        // {t1,t3} misses A3/A4, {t1,t4} misses A2, {t1,t5} misses A4,
        // {t1,t6} misses A2, {t2,t3} misses A3, {t2,t4} misses A1,
        // {t2,t5} misses A1, {t2,t6} misses A1, {t3,t4} hits all four.
        let c = cluster(6, &[&[1, 3], &[2, 3, 5], &[4, 5, 6], &[2, 4, 6]]);
        let d = brute_force_minimum_hitting_set(&c, &CandidateMask::all(6)).unwrap();
        assert_eq!(d.tags(), &[2, 3]);
    }

    #[test]
    fn single_item() {
        let c = cluster(8, &[&[7]]);
        let d = brute_force_minimum_hitting_set(&c, &CandidateMask::all(8)).unwrap();
        assert_eq!(d.tags(), &[6]);
    }

    #[test]
    fn infeasible_and_capped() {
        let c = cluster(3, &[&[1], &[2]]);
        let mut mask = CandidateMask::all(3);
        mask.exclude(1);
        assert!(matches!(
            brute_force_minimum_hitting_set(&c, &mask),
            Err(Error::InfeasibleUnderMask { .. })
        ));
        let c = cluster(21, &[&[1]]);
        assert!(matches!(
            brute_force_minimum_hitting_set(&c, &CandidateMask::all(21)),
            Err(Error::OracleCap {
                admissible: 21,
                cap: 20
            })
        ));
    }
}
