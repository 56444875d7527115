//! Tag-admissibility filters.
//!
//! Both filters only produce [`CandidateMask`]s; combine several with
//! [`CandidateMask::and`] before handing one to a solver.

use std::io::Read;

use crate::error::{Error, Result};
use crate::model::{tag_coverage_percentages, CandidateMask, TagUniverse, TaggedCluster};

/// Declared pairs of complementary tags (e.g. below/above median of one feature).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComplementMap {
    pairs: Vec<(usize, usize)>,
}

impl ComplementMap {
    pub fn new(pairs: Vec<(usize, usize)>, universe: &TagUniverse) -> Result<Self> {
        let mut seen = vec![false; universe.len()];
        for &(a, b) in &pairs {
            if a == b {
                return Err(Error::config(format!(
                    "tag {:?} cannot complement itself",
                    name_or_id(universe, a)
                )));
            }
            for t in [a, b] {
                if t >= universe.len() {
                    return Err(Error::config(format!(
                        "complement pair references tag id {t}, universe has {} tags",
                        universe.len()
                    )));
                }
                if std::mem::replace(&mut seen[t], true) {
                    return Err(Error::config(format!(
                        "tag {:?} appears in more than one complement pair",
                        universe.name(t)
                    )));
                }
            }
        }
        Ok(ComplementMap { pairs })
    }

    pub fn from_names<S: AsRef<str>>(pairs: &[[S; 2]], universe: &TagUniverse) -> Result<Self> {
        let ids = pairs
            .iter()
            .map(|[a, b]| {
                Ok((
                    universe.require_id(a.as_ref())?,
                    universe.require_id(b.as_ref())?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        ComplementMap::new(ids, universe)
    }

    /// Reads a JSON array of two-element arrays of tag names.
    pub fn from_json<R: Read>(reader: R, universe: &TagUniverse) -> Result<Self> {
        let raw: Vec<Vec<String>> = serde_json::from_reader(reader)?;
        let pairs = raw
            .into_iter()
            .map(|p| match <[String; 2]>::try_from(p) {
                Ok(pair) => Ok(pair),
                Err(p) => Err(Error::config(format!(
                    "complement pair must have two tags, found {p:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        ComplementMap::from_names(&pairs, universe)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn name_or_id(universe: &TagUniverse, t: usize) -> String {
    if t < universe.len() {
        universe.name(t).to_string()
    } else {
        t.to_string()
    }
}

/// Of each complementary pair, keeps only the tag covering more of the
/// cluster. On a tie the lower tag id is kept.
pub fn non_complementarity_filter(
    cluster: &TaggedCluster,
    complements: &ComplementMap,
) -> Result<CandidateMask> {
    let universe = cluster.universe();
    // Revalidate: the map may have been built against another universe.
    let complements = ComplementMap::new(complements.pairs.clone(), universe)?;
    let stats = tag_coverage_percentages(cluster)?;
    let mut mask = CandidateMask::all(universe.len());
    for &(a, b) in complements.pairs() {
        let (ca, cb) = (stats.count(a), stats.count(b));
        let loser = if ca < cb {
            a
        } else if cb < ca {
            b
        } else {
            a.max(b)
        };
        mask.exclude(loser);
    }
    Ok(mask)
}

/// Excludes, from both clusters, every tag that covers more than
/// `threshold_percent` of each of them.
pub fn cross_cluster_filter(
    cluster_a: &TaggedCluster,
    cluster_b: &TaggedCluster,
    threshold_percent: f64,
) -> Result<(CandidateMask, CandidateMask)> {
    if cluster_a.universe() != cluster_b.universe() {
        return Err(Error::config(format!(
            "clusters {:?} and {:?} use different tag universes",
            cluster_a.id(),
            cluster_b.id()
        )));
    }
    if !(0.0..=100.0).contains(&threshold_percent) {
        return Err(Error::config(format!(
            "shared-percentage threshold must lie in [0, 100], got {threshold_percent}"
        )));
    }
    let sa = tag_coverage_percentages(cluster_a)?;
    let sb = tag_coverage_percentages(cluster_b)?;
    let above = |count: usize, n: usize| 100.0 * count as f64 > threshold_percent * n as f64;

    let m = cluster_a.universe().len();
    let mut mask = CandidateMask::all(m);
    for t in 0..m {
        if above(sa.count(t), sa.n()) && above(sb.count(t), sb.n()) {
            mask.exclude(t);
        }
    }
    Ok((mask.clone(), mask))
}
