//! Tags, clusters and descriptors.
//!
//! Tags are dense indexes `0..m` into a [`TagUniverse`]; names only matter at
//! the reporting boundary. Item and tag order is always input order.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// The ordered catalog of tags. Tag `i` is the `i`-th name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagUniverse {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl TagUniverse {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(Error::config(format!("tag {i} has an empty name")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::config(format!("duplicate tag name {name:?}")));
            }
        }
        Ok(TagUniverse { names, index })
    }

    /// Universe `t1..tm`, the naming used throughout the worked examples.
    pub fn numbered(m: usize) -> Self {
        TagUniverse::new((1..=m).map(|i| format!("t{i}"))).expect("generated names are unique")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, tag: usize) -> &str {
        &self.names[tag]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require_id(&self, name: &str) -> Result<usize> {
        self.id(name)
            .ok_or_else(|| Error::config(format!("unknown tag {name:?}")))
    }

    pub fn check_tag(&self, tag: usize) -> Result<()> {
        if tag < self.len() {
            Ok(())
        } else {
            Err(Error::MalformedDescriptor {
                tag,
                universe: self.len(),
            })
        }
    }
}

/// One data item and the tags that describe it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub id: String,
    pub tags: BitSet,
}

/// A cluster of items, each carrying a subset of the universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedCluster {
    id: String,
    universe: Arc<TagUniverse>,
    items: Vec<Item>,
}

impl TaggedCluster {
    /// Builds a cluster from `(item_id, tag ids)` pairs.
    ///
    /// Empty tag sets are rejected unless `allow_untagged` is set; solvers
    /// still refuse such clusters later.
    pub fn new(
        id: impl Into<String>,
        universe: Arc<TagUniverse>,
        items: impl IntoIterator<Item = (String, Vec<usize>)>,
        allow_untagged: bool,
    ) -> Result<Self> {
        let m = universe.len();
        let mut built = Vec::new();
        for (item_id, tags) in items {
            let mut set = BitSet::new(m);
            for t in tags {
                if t >= m {
                    return Err(Error::config(format!(
                        "item {item_id:?} references tag id {t}, universe has {m} tags"
                    )));
                }
                set.insert(t);
            }
            built.push(Item {
                id: item_id,
                tags: set,
            });
        }
        Self::from_items(id, universe, built, allow_untagged)
    }

    pub fn from_items(
        id: impl Into<String>,
        universe: Arc<TagUniverse>,
        items: Vec<Item>,
        allow_untagged: bool,
    ) -> Result<Self> {
        let id = id.into();
        let mut seen = BTreeSet::new();
        for item in &items {
            if item.tags.capacity() != universe.len() {
                return Err(Error::config(format!(
                    "item {:?} tag set width {} does not match universe size {}",
                    item.id,
                    item.tags.capacity(),
                    universe.len()
                )));
            }
            if !seen.insert(item.id.as_str()) {
                return Err(Error::config(format!(
                    "duplicate item id {:?} in cluster {id:?}",
                    item.id
                )));
            }
        }
        if !allow_untagged {
            let untagged: Vec<String> = items
                .iter()
                .filter(|i| i.tags.is_empty())
                .map(|i| i.id.clone())
                .collect();
            if !untagged.is_empty() {
                return Err(Error::UntaggedItems { items: untagged });
            }
        }
        Ok(TaggedCluster {
            id,
            universe,
            items,
        })
    }

    /// Builds a derived cluster that may contain untagged items; callers
    /// are responsible for the id-uniqueness invariant.
    pub(crate) fn derived(&self, items: Vec<Item>) -> Self {
        TaggedCluster {
            id: self.id.clone(),
            universe: Arc::clone(&self.universe),
            items,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn universe(&self) -> &Arc<TagUniverse> {
        &self.universe
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Fails with the ids of every item whose tag set is empty.
    pub fn ensure_tagged(&self) -> Result<()> {
        let untagged: Vec<String> = self
            .items
            .iter()
            .filter(|i| i.tags.is_empty())
            .map(|i| i.id.clone())
            .collect();
        if untagged.is_empty() {
            Ok(())
        } else {
            Err(Error::UntaggedItems { items: untagged })
        }
    }
}

/// A set of tags claimed to hit every item of a cluster.
///
/// `tags` keeps the order in which a solver produced them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DisjunctiveDescriptor {
    tags: Vec<usize>,
}

impl DisjunctiveDescriptor {
    /// Duplicates are dropped, first occurrence wins.
    pub fn new(tags: impl IntoIterator<Item = usize>) -> Self {
        let mut seen = BTreeSet::new();
        DisjunctiveDescriptor {
            tags: tags.into_iter().filter(|t| seen.insert(*t)).collect(),
        }
    }

    pub fn tags(&self) -> &[usize] {
        &self.tags
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.tags.clone();
        v.sort_unstable();
        v
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn contains(&self, tag: usize) -> bool {
        self.tags.contains(&tag)
    }

    pub fn to_bitset(&self, m: usize) -> BitSet {
        BitSet::from_indices(m, self.tags.iter().copied())
    }

    pub fn is_disjoint(&self, other: &DisjunctiveDescriptor) -> bool {
        self.tags.iter().all(|t| !other.contains(*t))
    }

    pub fn names<'u>(&self, universe: &'u TagUniverse) -> Vec<&'u str> {
        self.tags.iter().map(|&t| universe.name(t)).collect()
    }
}

/// `clause1 AND clause2`, two disjoint disjunctive descriptors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfDescriptor {
    pub clause1: DisjunctiveDescriptor,
    pub clause2: DisjunctiveDescriptor,
}

impl CnfDescriptor {
    pub fn size(&self) -> usize {
        self.clause1.len() + self.clause2.len()
    }

    pub fn is_disjoint(&self) -> bool {
        self.clause1.is_disjoint(&self.clause2)
    }
}

/// Per-tag admissibility flags handed from filters to solvers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateMask {
    admissible: BitSet,
}

impl CandidateMask {
    pub fn all(m: usize) -> Self {
        CandidateMask {
            admissible: BitSet::full(m),
        }
    }

    pub fn from_bitset(admissible: BitSet) -> Self {
        CandidateMask { admissible }
    }

    pub fn len(&self) -> usize {
        self.admissible.capacity()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_admissible(&self, tag: usize) -> bool {
        self.admissible.contains(tag)
    }

    pub fn exclude(&mut self, tag: usize) {
        self.admissible.remove(tag);
    }

    pub fn admissible(&self) -> &BitSet {
        &self.admissible
    }

    pub fn admissible_count(&self) -> usize {
        self.admissible.len()
    }

    /// Logical AND of two masks.
    pub fn and(&self, other: &CandidateMask) -> Result<CandidateMask> {
        if self.len() != other.len() {
            return Err(Error::config(format!(
                "cannot combine masks of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(CandidateMask {
            admissible: self.admissible.intersection(&other.admissible),
        })
    }

    pub fn check_universe(&self, universe: &TagUniverse) -> Result<()> {
        if self.len() == universe.len() {
            Ok(())
        } else {
            Err(Error::config(format!(
                "candidate mask has {} entries, universe has {} tags",
                self.len(),
                universe.len()
            )))
        }
    }
}

/// Per-tag item counts of one cluster and the derived coverage percentages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagStats {
    n: usize,
    counts: Vec<usize>,
}

impl TagStats {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, tag: usize) -> usize {
        self.counts[tag]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Unrounded `100 * count / n`.
    pub fn raw_percentage(&self, tag: usize) -> f64 {
        100.0 * self.counts[tag] as f64 / self.n as f64
    }

    /// Percentage in thousandths of a percent, rounded half up.
    pub fn percentage_milli(&self, tag: usize) -> u64 {
        round_half_up_ratio(self.counts[tag] as u64 * 100_000, self.n as u64)
    }

    /// Percentage rounded half up to three decimals.
    pub fn percentage(&self, tag: usize) -> f64 {
        self.percentage_milli(tag) as f64 / 1000.0
    }

    /// Fixed three-decimal rendering, e.g. `67.778` or `100.000`.
    pub fn format_percentage(&self, tag: usize) -> String {
        format_milli(self.percentage_milli(tag))
    }
}

fn round_half_up_ratio(num: u64, den: u64) -> u64 {
    (2 * num + den) / (2 * den)
}

pub(crate) fn format_milli(milli: u64) -> String {
    format!("{}.{:03}", milli / 1000, milli % 1000)
}

/// True iff every item's tag set intersects `d`.
pub fn is_valid_descriptor(cluster: &TaggedCluster, d: &DisjunctiveDescriptor) -> Result<bool> {
    let universe = cluster.universe();
    for &t in d.tags() {
        universe.check_tag(t)?;
    }
    let set = d.to_bitset(universe.len());
    Ok(cluster
        .items()
        .iter()
        .all(|item| item.tags.intersects(&set)))
}

/// Number of items (optionally restricted to `over`, by index) containing each tag.
pub fn tag_frequencies(cluster: &TaggedCluster, over: Option<&[usize]>) -> Result<Vec<usize>> {
    let m = cluster.universe().len();
    let mut counts = vec![0usize; m];
    let mut bump = |item: &Item| {
        for t in item.tags.iter() {
            counts[t] += 1;
        }
    };
    match over {
        None => cluster.items().iter().for_each(&mut bump),
        Some(indices) => {
            for &i in indices {
                let item = cluster.items().get(i).ok_or_else(|| {
                    Error::config(format!(
                        "item index {i} out of range for cluster of {} items",
                        cluster.len()
                    ))
                })?;
                bump(item);
            }
        }
    }
    Ok(counts)
}

pub fn tag_coverage_percentages(cluster: &TaggedCluster) -> Result<TagStats> {
    if cluster.is_empty() {
        return Err(Error::EmptyCluster(cluster.id().to_string()));
    }
    Ok(TagStats {
        n: cluster.len(),
        counts: tag_frequencies(cluster, None)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Builds a cluster over `t1..tm` from 1-based tag numbers.
    fn cluster(m: usize, sets: &[&[usize]]) -> TaggedCluster {
        TaggedCluster::new(
            "c",
            Arc::new(TagUniverse::numbered(m)),
            sets.iter()
                .enumerate()
                .map(|(i, s)| (format!("d{}", i + 1), s.iter().map(|t| t - 1).collect())),
            false,
        )
        .unwrap()
    }

    fn desc(tags: &[usize]) -> DisjunctiveDescriptor {
        DisjunctiveDescriptor::new(tags.iter().map(|t| t - 1))
    }

    #[test]
    fn validity_on_three_item_example() {
        let c = cluster(6, &[&[1, 2, 5], &[3, 4, 5], &[3, 4, 6]]);
        assert!(is_valid_descriptor(&c, &desc(&[1, 4, 6])).unwrap());
        assert!(!is_valid_descriptor(&c, &desc(&[1, 5])).unwrap());
        assert!(is_valid_descriptor(&c, &desc(&[2, 3])).unwrap());
        assert!(is_valid_descriptor(&c, &desc(&[1, 2, 3, 4, 5, 6])).unwrap());
    }

    #[test]
    fn out_of_range_descriptor_is_malformed() {
        let c = cluster(6, &[&[1]]);
        let err = is_valid_descriptor(&c, &DisjunctiveDescriptor::new([6])).unwrap_err();
        assert!(matches!(
            err,
            Error::MalformedDescriptor {
                tag: 6,
                universe: 6
            }
        ));
    }

    #[test]
    fn frequencies_of_four_set_example() {
        let c = cluster(6, &[&[1, 3], &[2, 3, 5], &[4, 5, 6], &[2, 4, 6]]);
        assert_eq!(tag_frequencies(&c, None).unwrap(), vec![1, 2, 2, 2, 2, 2]);
        assert_eq!(tag_frequencies(&c, Some(&[])).unwrap(), vec![0; 6]);
        assert_eq!(
            tag_frequencies(&c, Some(&[0, 2])).unwrap(),
            vec![1, 0, 1, 1, 1, 1]
        );
        assert!(tag_frequencies(&c, Some(&[4])).is_err());
    }

    #[test]
    fn single_item_frequencies() {
        let c = cluster(3, &[&[1]]);
        assert_eq!(tag_frequencies(&c, None).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn percentages_round_half_up() {
        // 61 of 90 items carry t1, all carry t2, none carry t3.
        let sets: Vec<Vec<usize>> = (0..90)
            .map(|i| if i < 61 { vec![1, 2] } else { vec![2] })
            .collect();
        let refs: Vec<&[usize]> = sets.iter().map(|s| s.as_slice()).collect();
        let stats = tag_coverage_percentages(&cluster(3, &refs)).unwrap();
        assert_eq!(stats.format_percentage(0), "67.778");
        assert_eq!(stats.percentage(0), 67.778);
        assert_eq!(stats.percentage(1), 100.0);
        assert_eq!(stats.format_percentage(1), "100.000");
        assert_eq!(stats.percentage(2), 0.0);
        // 1/8 = 12.5 exactly; 1/16 = 6.25; 1/1600 = 0.0625 -> 0.063
        assert_eq!(round_half_up_ratio(100_000, 1600), 63);
    }

    #[test]
    fn empty_cluster_has_no_percentages() {
        let c = TaggedCluster::new("e", Arc::new(TagUniverse::numbered(2)), vec![], false).unwrap();
        assert!(matches!(
            tag_coverage_percentages(&c),
            Err(Error::EmptyCluster(_))
        ));
    }

    #[test]
    fn loader_rejects_untagged_unless_allowed() {
        let u = Arc::new(TagUniverse::numbered(2));
        let items = vec![("a".to_string(), vec![0]), ("b".to_string(), vec![])];
        match TaggedCluster::new("c", u.clone(), items.clone(), false) {
            Err(Error::UntaggedItems { items }) => assert_eq!(items, vec!["b"]),
            other => panic!("unexpected {other:?}"),
        }
        let c = TaggedCluster::new("c", u, items, true).unwrap();
        assert!(c.ensure_tagged().is_err());
    }

    #[test]
    fn universe_and_cluster_invariants() {
        assert!(TagUniverse::new(["a", "a"]).is_err());
        assert!(TagUniverse::new(["a", " "]).is_err());
        let u = Arc::new(TagUniverse::numbered(2));
        let dup = vec![("x".to_string(), vec![0]), ("x".to_string(), vec![1])];
        assert!(TaggedCluster::new("c", u.clone(), dup, false).is_err());
        assert!(TaggedCluster::new("c", u, vec![("x".into(), vec![2])], false).is_err());
    }

    #[test]
    fn mask_combination() {
        let mut a = CandidateMask::all(4);
        a.exclude(1);
        let mut b = CandidateMask::all(4);
        b.exclude(3);
        let c = a.and(&b).unwrap();
        assert_eq!(c.admissible().iter().collect::<Vec<_>>(), vec![0, 2]);
        assert!(a.and(&CandidateMask::all(3)).is_err());
    }
}
