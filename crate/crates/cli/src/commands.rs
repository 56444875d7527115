//! Argument parsing and the subcommand bodies.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use tagdesc_core::bench::{time_solvers, timings_csv, BenchConfig};
use tagdesc_core::filter::ComplementMap;
use tagdesc_core::pipeline::{elbow_csv, elbow_curve, kmeans_best_of, standardize, NumericMatrix};
use tagdesc_core::solve::{ClauseSolver, CnfPreprocess, DEFAULT_NODE_BUDGET};
use tagdesc_core::table::Table;
use tagdesc_core::tagging::{apply_tags, TagSchema};
use tagdesc_core::{ClusterSet, Error, SolverConfig};

use crate::explain::{compute_masks, run_explain, ExplainOptions, FilterOptions, MaskSet};
use crate::report::{render_report, ExplainReport, Format, Method};
use crate::{load_clusters, load_err, read_file, write_output, StageError};

#[derive(Debug, Parser)]
#[command(
    name = "tagdesc",
    version,
    about = "Explain clusters with small sets of tags"
)]
pub struct Cli {
    /// Output format for reports: json, text-table or csv.
    #[arg(long, global = true, default_value = "json")]
    pub format: String,

    /// Seed for every randomized step. Required where randomness is used.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive tags from a data table and group rows into tagged clusters.
    Tag(TagArgs),
    /// Run k-means (and optionally an elbow sweep) on a data table.
    Cluster(ClusterArgs),
    /// Compute candidate masks from complement pairs and shared tags.
    Filter(FilterArgs),
    /// Compute descriptors for every cluster.
    Explain(ExplainArgs),
    /// Re-render a saved JSON report.
    Report(ReportArgs),
    /// Time the solvers on synthetic clusters.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct TagArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub schema: PathBuf,
    /// A CSV of cluster labels in row order (last column is used, or the
    /// column named by --labels-column), or the name of a column of --data.
    #[arg(long)]
    pub labels: String,
    #[arg(long)]
    pub labels_column: Option<String>,
    /// Column holding item ids; row indices are used otherwise.
    #[arg(long)]
    pub id_column: Option<String>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub k: Option<usize>,
    /// Inclusive k range for the elbow sweep, e.g. 1..8.
    #[arg(long)]
    pub elbow: Option<String>,
    /// Where the elbow CSV goes when labels are also written to --out.
    #[arg(long)]
    pub elbow_out: Option<PathBuf>,
    /// Numeric feature columns; all columns except --id-column and
    /// --one-hot columns when omitted.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    /// Categorical columns to expand into 0/1 dummy columns.
    #[arg(long, value_delimiter = ',')]
    pub one_hot: Vec<String>,
    #[arg(long)]
    pub id_column: Option<String>,
    /// Skip z-score scaling of the feature columns.
    #[arg(long)]
    pub no_standardize: bool,
    #[arg(long, default_value_t = 300)]
    pub max_iter: usize,
    /// Independent k-means runs per k; the lowest SSE wins.
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
}

#[derive(Debug, Args, Default)]
pub struct FilterFlags {
    /// JSON array of complementary tag-name pairs.
    #[arg(long)]
    pub complement_map: Option<PathBuf>,
    /// Exclude tags covering more than this percent of both clusters of a pair.
    #[arg(long)]
    pub shared_threshold: Option<f64>,
    /// Cluster pair for the shared-tag filter, as `A,B`. Repeatable.
    #[arg(long)]
    pub filter_pair: Vec<String>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Tagged clusters (.json, or a .csv 0/1 matrix).
    #[arg(long)]
    pub clusters: PathBuf,
    #[arg(long)]
    pub allow_untagged: bool,
    #[command(flatten)]
    pub filters: FilterFlags,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    /// Tagged clusters (.json, or a .csv 0/1 matrix).
    #[arg(long)]
    pub clusters: PathBuf,
    /// Admit items without tags; solving them then fails naming the items.
    #[arg(long)]
    pub allow_untagged: bool,
    #[arg(long, value_delimiter = ',', default_value = "greedy,exact,cnf")]
    pub methods: Vec<String>,
    #[arg(long, default_value = "greedy")]
    pub clause1_solver: String,
    #[arg(long, default_value = "greedy")]
    pub clause2_solver: String,
    /// strict or drop-and-report.
    #[arg(long, default_value = "strict")]
    pub cnf_preprocess: String,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    /// Mask file written by `tagdesc filter`.
    #[arg(long)]
    pub masks: Option<PathBuf>,
    #[command(flatten)]
    pub filters: FilterFlags,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// JSON report written by `tagdesc explain`.
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "200,2000,20000")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub tags: usize,
    #[arg(long, default_value_t = 0.2)]
    pub density: f64,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    /// Node budget for the exact solver; runs that exhaust it count as
    /// not optimal.
    #[arg(long, default_value_t = 2_000)]
    pub node_budget: u64,
}

fn config_err(stage: &'static str, e: Error) -> StageError {
    StageError::new(stage, None, e)
}

fn require_seed(seed: Option<u64>, stage: &'static str) -> Result<u64, StageError> {
    seed.ok_or_else(|| config_err(stage, Error::config("--seed is required for this command")))
}

fn load_table(path: &Path) -> Result<Table, StageError> {
    let bytes = read_file(path)?;
    Table::from_csv(bytes.as_slice()).map_err(|e| load_err(path, e))
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<(), StageError> {
    let format: Format = cli.format.parse().map_err(|e| config_err("args", e))?;
    let out = cli.out.as_deref();
    let bytes = match cli.command {
        Command::Tag(args) => tag(&args)?,
        Command::Cluster(args) => cluster(&args, cli.seed, out)?,
        Command::Filter(args) => filter(&args)?,
        Command::Explain(args) => {
            let report = explain(&args)?;
            render_report(&report, format).map_err(|e| config_err("render", e))?
        }
        Command::Report(args) => {
            let bytes = read_file(&args.report)?;
            let text = String::from_utf8_lossy(&bytes);
            let report = ExplainReport::from_json(&text).map_err(|e| load_err(&args.report, e))?;
            render_report(&report, format).map_err(|e| config_err("render", e))?
        }
        Command::Bench(args) => bench(&args, cli.seed)?,
    };
    write_output(out, &bytes)
}

fn tag(args: &TagArgs) -> Result<Vec<u8>, StageError> {
    let table = load_table(&args.data)?;
    let labels_path = Path::new(&args.labels);
    let labels = if labels_path.is_file() {
        let lt = load_table(labels_path)?;
        let column = match &args.labels_column {
            Some(c) => c.clone(),
            None => lt.headers().last().cloned().ok_or_else(|| {
                load_err(labels_path, Error::config("labels file has no columns"))
            })?,
        };
        lt.text_column(&column)
            .map_err(|e| load_err(labels_path, e))?
    } else {
        table
            .text_column(&args.labels)
            .map_err(|e| StageError::new("tag", Some(&args.labels), e))?
    };

    let schema_bytes = read_file(&args.schema)?;
    let schema =
        TagSchema::from_json(schema_bytes.as_slice()).map_err(|e| load_err(&args.schema, e))?;
    let schema_err = |e| StageError::new("tag", Some(&args.schema.display().to_string()), e);
    let rules = schema.resolve(&table).map_err(schema_err)?;
    let set = apply_tags(&table, &labels, &rules, args.id_column.as_deref()).map_err(schema_err)?;
    let mut json = tagdesc_core::io::to_json_string(&set).map_err(|e| config_err("tag", e))?;
    json.push('\n');
    Ok(json.into_bytes())
}

/// Parses `k1..k2` (also accepts `k1..=k2` and `k1-k2`).
pub fn parse_k_range(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::config(format!("invalid k range {s:?}, expected k1..k2"));
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .or_else(|| s.split_once('-'))
        .ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn cluster(
    args: &ClusterArgs,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<Vec<u8>, StageError> {
    let seed = require_seed(seed, "cluster")?;
    if args.k.is_none() && args.elbow.is_none() {
        return Err(config_err(
            "cluster",
            Error::config("give --k, --elbow, or both"),
        ));
    }
    let table = load_table(&args.data)?;
    let columns = if args.columns.is_empty() {
        table
            .headers()
            .iter()
            .filter(|h| Some(h.as_str()) != args.id_column.as_deref() && !args.one_hot.contains(h))
            .cloned()
            .collect()
    } else {
        args.columns.clone()
    };
    let stage = |e| StageError::new("cluster", Some(&args.data.display().to_string()), e);
    let mut data = NumericMatrix::from_table(&table, &columns, &args.one_hot).map_err(stage)?;
    if !args.no_standardize {
        data = standardize(&data).map_err(stage)?;
    }

    let elbow = match &args.elbow {
        Some(range) => {
            let (a, b) = parse_k_range(range).map_err(|e| config_err("cluster", e))?;
            let curve =
                elbow_curve(&data, a..=b, seed, args.max_iter, args.restarts).map_err(stage)?;
            Some(elbow_csv(&curve))
        }
        None => None,
    };
    let Some(k) = args.k else {
        return Ok(elbow.unwrap_or_default().into_bytes());
    };

    let result = kmeans_best_of(&data, k, seed, args.max_iter, args.restarts).map_err(stage)?;
    let ids: Vec<String> = match &args.id_column {
        Some(c) => table.text_column(c).map_err(stage)?,
        None => (0..table.len()).map(|i| i.to_string()).collect(),
    };
    let mut labels = String::from("id,cluster\n");
    for (id, label) in ids.iter().zip(&result.labels) {
        labels.push_str(&format!("{id},{label}\n"));
    }

    if let Some(curve) = elbow {
        match (&args.elbow_out, out) {
            (Some(path), _) => write_output(Some(path), curve.as_bytes())?,
            (None, None) => {
                return Err(config_err(
                    "cluster",
                    Error::config("--elbow with --k needs --elbow-out or --out"),
                ))
            }
            (None, Some(_)) => {
                return Err(config_err(
                    "cluster",
                    Error::config("--elbow with --k needs --elbow-out for the curve"),
                ))
            }
        }
    }
    Ok(labels.into_bytes())
}

fn filter_options(flags: &FilterFlags, set: &ClusterSet) -> Result<FilterOptions, StageError> {
    let complements = match &flags.complement_map {
        Some(path) => {
            let bytes = read_file(path)?;
            Some(
                ComplementMap::from_json(bytes.as_slice(), &set.universe)
                    .map_err(|e| load_err(path, e))?,
            )
        }
        None => None,
    };
    let pairs = flags
        .filter_pair
        .iter()
        .map(|p| match p.split_once(',') {
            Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
            _ => Err(config_err(
                "filter",
                Error::config(format!("--filter-pair expects A,B, got {p:?}")),
            )),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if !pairs.is_empty() && flags.shared_threshold.is_none() {
        return Err(config_err(
            "filter",
            Error::config("--filter-pair needs --shared-threshold"),
        ));
    }
    Ok(FilterOptions {
        complements,
        shared_threshold: flags.shared_threshold,
        pairs,
    })
}

fn filter(args: &FilterArgs) -> Result<Vec<u8>, StageError> {
    let set = load_clusters(&args.clusters, args.allow_untagged)?;
    let options = filter_options(&args.filters, &set)?;
    let masks = compute_masks(&set, &options)?;
    let mut out = serde_json::to_vec_pretty(&masks).map_err(|e| config_err("filter", e.into()))?;
    out.push(b'\n');
    Ok(out)
}

/// Builds the explain options from flags and runs the explain driver.
pub fn explain(args: &ExplainArgs) -> Result<ExplainReport, StageError> {
    let set = load_clusters(&args.clusters, args.allow_untagged)?;
    let arg_err = |e| config_err("args", e);

    let mut methods = Vec::new();
    for m in &args.methods {
        let m: Method = m.parse().map_err(arg_err)?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    let clause1: ClauseSolver = args.clause1_solver.parse().map_err(arg_err)?;
    let clause2: ClauseSolver = args.clause2_solver.parse().map_err(arg_err)?;
    let preprocess: CnfPreprocess = args.cnf_preprocess.parse().map_err(arg_err)?;
    let solver = SolverConfig::default()
        .with_node_budget(args.node_budget)
        .with_clause_solvers(clause1, clause2)
        .with_cnf_preprocess(preprocess);

    let mut masks = match &args.masks {
        Some(path) => {
            let bytes = read_file(path)?;
            serde_json::from_slice::<MaskSet>(&bytes).map_err(|e| load_err(path, e))?
        }
        None => MaskSet::default(),
    };
    let options = filter_options(&args.filters, &set)?;
    if !options.is_empty() {
        masks = masks.merge(compute_masks(&set, &options)?);
    }

    run_explain(
        &set,
        &ExplainOptions {
            methods,
            solver,
            masks,
        },
    )
}

fn bench(args: &BenchArgs, seed: Option<u64>) -> Result<Vec<u8>, StageError> {
    let seed = require_seed(seed, "bench")?;
    let rows = time_solvers(&BenchConfig {
        sizes: args.sizes.clone(),
        n_tags: args.tags,
        density: args.density,
        seed,
        repeats: args.repeats,
        node_budget: args.node_budget,
    })
    .map_err(|e| config_err("bench", e))?;
    Ok(timings_csv(&rows).into_bytes())
}
