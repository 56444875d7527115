//! Synthetic instances and solver timing.

use std::hint::black_box;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{is_valid_descriptor, TagUniverse, TaggedCluster};
use crate::solve::{
    cnf_descriptor, exact_with_stats, greedy_hitting_set, CnfPreprocess, SolverConfig,
};

/// Independent Bernoulli tag inclusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n_items: usize,
    pub n_tags: usize,
    pub density: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::config(format!(
                "density must lie in (0, 1], got {}",
                self.density
            )));
        }
        if self.n_items == 0 {
            return Err(Error::config("n_items must be at least 1"));
        }
        if self.n_tags < 2 {
            return Err(Error::config("n_tags must be at least 2"));
        }
        Ok(())
    }
}

/// Each item includes each tag with probability `density`; an item that
/// ends up with no tags gets one uniformly chosen tag.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<TaggedCluster> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let universe = Arc::new(TagUniverse::numbered(spec.n_tags));
    let items = (0..spec.n_items).map(|i| {
        let mut tags: Vec<usize> = (0..spec.n_tags)
            .filter(|_| rng.gen_bool(spec.density))
            .collect();
        if tags.is_empty() {
            tags.push(rng.gen_range(0..spec.n_tags));
        }
        (format!("i{i}"), tags)
    });
    let items: Vec<_> = items.collect();
    TaggedCluster::new(
        format!("synthetic-{}", spec.n_items),
        universe,
        items,
        false,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimedSolver {
    Greedy,
    Exact,
    CnfGreedy,
}

impl TimedSolver {
    pub const ALL: [TimedSolver; 3] = [
        TimedSolver::Greedy,
        TimedSolver::Exact,
        TimedSolver::CnfGreedy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TimedSolver::Greedy => "greedy",
            TimedSolver::Exact => "exact",
            TimedSolver::CnfGreedy => "cnf-greedy",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub n_tags: usize,
    pub density: f64,
    pub seed: u64,
    pub repeats: usize,
    /// Node budget for the exact solver; exhaustion is recorded, not fatal.
    pub node_budget: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub n_items: usize,
    pub solver: TimedSolver,
    pub mean_seconds: f64,
    pub std_seconds: f64,
    /// Share of runs whose result is proven minimum (always 0 for heuristics).
    pub optimal_fraction: f64,
}

fn instance_seed(base: u64, size: usize, repeat: usize) -> u64 {
    base ^ (size as u64).rotate_left(32) ^ (repeat as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs one solver once. Returns elapsed seconds and whether the result is
/// proven optimal; fails if the solver output is not a valid descriptor.
fn run_once(
    solver: TimedSolver,
    cluster: &TaggedCluster,
    config: &SolverConfig,
) -> Result<(f64, bool)> {
    match solver {
        TimedSolver::Greedy => {
            let start = Instant::now();
            let d = black_box(greedy_hitting_set(black_box(cluster), config)?);
            let secs = start.elapsed().as_secs_f64();
            check(cluster, &d)?;
            Ok((secs, false))
        }
        TimedSolver::Exact => {
            let start = Instant::now();
            let out = black_box(exact_with_stats(black_box(cluster), config)?);
            let secs = start.elapsed().as_secs_f64();
            check(cluster, &out.descriptor)?;
            Ok((secs, out.optimal))
        }
        TimedSolver::CnfGreedy => {
            let start = Instant::now();
            let r = black_box(cnf_descriptor(black_box(cluster), config)?);
            let secs = start.elapsed().as_secs_f64();
            let removed: Vec<&str> = r.removed_items.iter().map(|x| x.id.as_str()).collect();
            let kept = cluster.derived(
                cluster
                    .items()
                    .iter()
                    .filter(|i| !removed.contains(&i.id.as_str()))
                    .cloned()
                    .collect(),
            );
            check(&kept, &r.descriptor.clause1)?;
            check(&kept, &r.descriptor.clause2)?;
            Ok((secs, false))
        }
    }
}

fn check(cluster: &TaggedCluster, d: &crate::model::DisjunctiveDescriptor) -> Result<()> {
    if is_valid_descriptor(cluster, d)? {
        Ok(())
    } else {
        Err(Error::config(format!(
            "solver produced an invalid descriptor for {:?}",
            cluster.id()
        )))
    }
}

/// Mean and standard deviation of wall-clock time per (size, solver) over
/// `repeats` fresh instances, after one discarded warm-up run per size.
pub fn time_solvers(config: &BenchConfig) -> Result<Vec<TimingRow>> {
    if config.repeats == 0 {
        return Err(Error::config("repeats must be at least 1"));
    }
    let solver_config = SolverConfig::default()
        .with_node_budget(config.node_budget)
        .with_cnf_preprocess(CnfPreprocess::DropAndReport);
    solver_config.validate()?;

    let mut rows = Vec::new();
    for &size in &config.sizes {
        let spec = |seed| SyntheticSpec {
            n_items: size,
            n_tags: config.n_tags,
            density: config.density,
            seed,
        };
        let warm = generate_synthetic(&spec(instance_seed(config.seed, size, usize::MAX)))?;
        for solver in TimedSolver::ALL {
            run_once(solver, &warm, &solver_config)?;
        }

        let mut samples = vec![Vec::with_capacity(config.repeats); TimedSolver::ALL.len()];
        let mut optimal = [0usize; 3];
        for r in 0..config.repeats {
            let cluster = generate_synthetic(&spec(instance_seed(config.seed, size, r)))?;
            for (s, solver) in TimedSolver::ALL.into_iter().enumerate() {
                let (secs, proven) = run_once(solver, &cluster, &solver_config)?;
                samples[s].push(secs);
                optimal[s] += usize::from(proven);
            }
        }
        for (s, solver) in TimedSolver::ALL.into_iter().enumerate() {
            let (mean, std) = mean_std(&samples[s]);
            rows.push(TimingRow {
                n_items: size,
                solver,
                mean_seconds: mean,
                std_seconds: std,
                optimal_fraction: optimal[s] as f64 / config.repeats as f64,
            });
        }
    }
    Ok(rows)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn timings_csv(rows: &[TimingRow]) -> String {
    let mut out = String::from("n_items,solver,mean_seconds,std_seconds,optimal_fraction\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.9},{:.9},{:.3}\n",
            r.n_items,
            r.solver.name(),
            r.mean_seconds,
            r.std_seconds,
            r.optimal_fraction
        ));
    }
    out
}

/// Mean time of `solver` at `size`, if present.
pub fn mean_of(rows: &[TimingRow], size: usize, solver: TimedSolver) -> Option<f64> {
    rows.iter()
        .find(|r| r.n_items == size && r.solver == solver)
        .map(|r| r.mean_seconds)
}
