//! Filters and solvers over a loaded cluster set.

use serde::{Deserialize, Serialize};
use tagdesc_core::filter::{cross_cluster_filter, non_complementarity_filter, ComplementMap};
use tagdesc_core::solve::{cnf_descriptor, exact_with_stats, ClauseSolver};
use tagdesc_core::{
    greedy_hitting_set, tag_coverage_percentages, CandidateMask, ClusterSet, Error, SolverConfig,
    TagUniverse, TaggedCluster,
};

use crate::report::{
    coverage, ClusterReport, DescriptorRecord, ExplainReport, FilterRecord, Method, RemovedRecord,
};
use crate::StageError;

#[derive(Debug, Clone, Default)]
pub struct FilterOptions {
    pub complements: Option<ComplementMap>,
    pub shared_threshold: Option<f64>,
    /// Cluster pairs for the cross-cluster filter. When empty and exactly
    /// two clusters are loaded, those two form the pair.
    pub pairs: Vec<(String, String)>,
}

impl FilterOptions {
    pub fn is_empty(&self) -> bool {
        self.complements.is_none() && self.shared_threshold.is_none()
    }
}

/// A cluster's excluded tags and the filters that excluded them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterMask {
    pub cluster_id: String,
    pub excluded: Vec<String>,
    pub filters: Vec<FilterRecord>,
}

/// Output of `tagdesc filter`, input of `tagdesc explain --masks`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MaskSet {
    pub clusters: Vec<ClusterMask>,
}

impl MaskSet {
    pub fn get(&self, cluster_id: &str) -> Option<&ClusterMask> {
        self.clusters.iter().find(|c| c.cluster_id == cluster_id)
    }

    /// Combines two mask sets cluster by cluster.
    pub fn merge(mut self, other: MaskSet) -> MaskSet {
        for m in other.clusters {
            match self
                .clusters
                .iter_mut()
                .find(|c| c.cluster_id == m.cluster_id)
            {
                Some(mine) => {
                    for t in m.excluded {
                        if !mine.excluded.contains(&t) {
                            mine.excluded.push(t);
                        }
                    }
                    mine.filters.extend(m.filters);
                }
                None => self.clusters.push(m),
            }
        }
        self
    }

    fn candidate_mask(&self, cluster: &TaggedCluster) -> Result<Option<CandidateMask>, StageError> {
        let Some(entry) = self.get(cluster.id()) else {
            return Ok(None);
        };
        let universe = cluster.universe();
        let mut mask = CandidateMask::all(universe.len());
        for name in &entry.excluded {
            let t = universe
                .require_id(name)
                .map_err(|e| StageError::new("filter", Some(cluster.id()), e))?;
            mask.exclude(t);
        }
        Ok(Some(mask))
    }
}

fn names(universe: &TagUniverse, mask: &CandidateMask) -> Vec<String> {
    (0..universe.len())
        .filter(|&t| !mask.is_admissible(t))
        .map(|t| universe.name(t).to_string())
        .collect()
}

/// Runs the configured filters. Each cross-cluster mask applies only to the
/// pair that produced it, so a cluster may appear in at most one pair.
pub fn compute_masks(set: &ClusterSet, options: &FilterOptions) -> Result<MaskSet, StageError> {
    let stage = |cluster: Option<&str>, e: Error| StageError::new("filter", cluster, e);
    let universe = &set.universe;
    let mut out = MaskSet::default();

    if let Some(map) = &options.complements {
        for c in &set.clusters {
            let mask = non_complementarity_filter(c, map).map_err(|e| stage(Some(c.id()), e))?;
            let excluded = names(universe, &mask);
            out = out.merge(MaskSet {
                clusters: vec![ClusterMask {
                    cluster_id: c.id().to_string(),
                    excluded: excluded.clone(),
                    filters: vec![FilterRecord::NonComplementarity { excluded }],
                }],
            });
        }
    }

    if let Some(threshold) = options.shared_threshold {
        let pairs = if options.pairs.is_empty() {
            match set.clusters.as_slice() {
                [a, b] => vec![(a.id().to_string(), b.id().to_string())],
                _ => {
                    return Err(stage(
                        None,
                        Error::config(
                            "--shared-threshold needs --filter-pair unless exactly two clusters are loaded",
                        ),
                    ))
                }
            }
        } else {
            options.pairs.clone()
        };
        let mut paired: Vec<&str> = Vec::new();
        for (a, b) in &pairs {
            for id in [a, b] {
                if paired.contains(&id.as_str()) {
                    return Err(stage(
                        Some(id),
                        Error::config(format!(
                            "cluster {id:?} appears in more than one filter pair"
                        )),
                    ));
                }
                paired.push(id);
            }
            let ca = set.require(a).map_err(|e| stage(Some(a), e))?;
            let cb = set.require(b).map_err(|e| stage(Some(b), e))?;
            let (ma, mb) =
                cross_cluster_filter(ca, cb, threshold).map_err(|e| stage(Some(a), e))?;
            for (id, partner, mask) in [(a, b, ma), (b, a, mb)] {
                let excluded = names(universe, &mask);
                out = out.merge(MaskSet {
                    clusters: vec![ClusterMask {
                        cluster_id: id.clone(),
                        excluded: excluded.clone(),
                        filters: vec![FilterRecord::CrossCluster {
                            partner: partner.clone(),
                            threshold,
                            excluded,
                        }],
                    }],
                });
            }
        }
    }

    // Report clusters in input order.
    out.clusters.sort_by_key(|m| {
        set.clusters
            .iter()
            .position(|c| c.id() == m.cluster_id)
            .unwrap_or(usize::MAX)
    });
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ExplainOptions {
    pub methods: Vec<Method>,
    /// Node budget, clause solvers and CNF preprocessing; any mask set here
    /// is ignored in favour of `masks`.
    pub solver: SolverConfig,
    pub masks: MaskSet,
}

impl Default for ExplainOptions {
    fn default() -> Self {
        ExplainOptions {
            methods: Method::ALL.to_vec(),
            solver: SolverConfig::default(),
            masks: MaskSet::default(),
        }
    }
}

/// Solves every cluster with every requested method.
///
/// An exact run that exhausts its node budget is reported with its
/// incumbent and `optimal: false`; every other solver error aborts.
pub fn run_explain(
    set: &ClusterSet,
    options: &ExplainOptions,
) -> Result<ExplainReport, StageError> {
    options
        .solver
        .validate()
        .map_err(|e| StageError::new("explain", None, e))?;
    let universe = &set.universe;
    let mut clusters = Vec::with_capacity(set.clusters.len());

    for cluster in &set.clusters {
        let id = cluster.id();
        let solve_err = |e: Error| StageError::new("solve", Some(id), e);
        let mut config = options.solver.clone();
        config.candidate_mask = options.masks.candidate_mask(cluster)?;

        let stats = tag_coverage_percentages(cluster)
            .map_err(|e| StageError::new("coverage", Some(id), e))?;
        let mut descriptors = Vec::with_capacity(options.methods.len());
        let mut removed: Vec<RemovedRecord> = Vec::new();

        for &method in &options.methods {
            let record = match method {
                Method::Greedy => {
                    let d = greedy_hitting_set(cluster, &config).map_err(solve_err)?;
                    disjunctive(id, method, d.names(universe), false)
                }
                Method::Exact => {
                    let out = exact_with_stats(cluster, &config).map_err(solve_err)?;
                    disjunctive(id, method, out.descriptor.names(universe), out.optimal)
                }
                Method::Cnf => {
                    let r = cnf_descriptor(cluster, &config).map_err(solve_err)?;
                    let c1: Vec<String> = own(r.descriptor.clause1.names(universe));
                    let c2: Vec<String> = own(r.descriptor.clause2.names(universe));
                    let removed_here: Vec<RemovedRecord> =
                        r.removed_items.iter().map(RemovedRecord::from).collect();
                    removed.extend(removed_here.iter().cloned());
                    DescriptorRecord {
                        cluster_id: id.to_string(),
                        method,
                        tags: c1.iter().chain(&c2).cloned().collect(),
                        size: r.descriptor.size(),
                        clauses: Some([c1, c2]),
                        optimal: config.clause1 == ClauseSolver::Exact
                            && config.clause2 == ClauseSolver::Exact,
                        removed_items: removed_here,
                    }
                }
            };
            descriptors.push(record);
        }

        clusters.push(ClusterReport {
            cluster_id: id.to_string(),
            size: cluster.len(),
            filters: options
                .masks
                .get(id)
                .map(|m| m.filters.clone())
                .unwrap_or_default(),
            descriptors,
            coverage: coverage(&stats, universe),
            removed_items: removed,
        });
    }

    Ok(ExplainReport {
        universe: universe.names().to_vec(),
        clusters,
    })
}

fn own(names: Vec<&str>) -> Vec<String> {
    names.into_iter().map(String::from).collect()
}

fn disjunctive(cluster: &str, method: Method, tags: Vec<&str>, optimal: bool) -> DescriptorRecord {
    DescriptorRecord {
        cluster_id: cluster.to_string(),
        method,
        size: tags.len(),
        tags: own(tags),
        clauses: None,
        optimal,
        removed_items: vec![],
    }
}
