use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tagdesc::report::{ExplainReport, Method};
use tagdesc::{render_report, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_IO};
use tagdesc_core::io::read_json;
use tagdesc_core::{exact_minimum_hitting_set, tag_coverage_percentages, SolverConfig};

const THREE_ITEMS: &str = r#"{
  "universe": ["t1", "t2", "t3", "t4", "t5", "t6"],
  "clusters": [
    {"cluster_id": "A", "items": [
      {"id": "d1", "tags": [0, 1, 4]},
      {"id": "d2", "tags": [2, 3, 4]},
      {"id": "d3", "tags": [2, 3, 5]}
    ]},
    {"cluster_id": "B", "items": [
      {"id": "e1", "tags": [0, 2]},
      {"id": "e2", "tags": [0, 5]}
    ]}
  ]
}"#;

fn tagdesc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tagdesc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_clusters(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("clusters.json");
    fs::write(&path, THREE_ITEMS).unwrap();
    path
}

fn explain_json(clusters: &Path, extra: &[&str]) -> ExplainReport {
    let mut args = vec!["explain", "--clusters", p(clusters)];
    args.extend_from_slice(extra);
    let out = tagdesc(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    ExplainReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap()
}

#[test]
fn three_item_cluster_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let clusters = write_clusters(dir.path());
    let report = explain_json(
        &clusters,
        &["--clause1-solver", "exact", "--clause2-solver", "exact"],
    );
    let a = report.cluster("A").unwrap();
    assert_eq!(a.descriptor(Method::Exact).unwrap().size, 2);
    assert!(a.descriptor(Method::Exact).unwrap().optimal);
    assert_eq!(a.descriptor(Method::Greedy).unwrap().size, 2);
    let cnf = a.descriptor(Method::Cnf).unwrap();
    assert_eq!(cnf.size, 4);
    let [c1, c2] = cnf.clauses.as_ref().unwrap();
    assert!(c1.iter().all(|t| !c2.contains(t)));
}

#[test]
fn report_numbers_match_core() {
    let dir = tempfile::tempdir().unwrap();
    let clusters = write_clusters(dir.path());
    let report = explain_json(&clusters, &[]);
    let set = read_json(THREE_ITEMS.as_bytes(), false).unwrap();
    for c in &set.clusters {
        let r = report.cluster(c.id()).unwrap();
        let stats = tag_coverage_percentages(c).unwrap();
        for (t, cov) in r.coverage.iter().enumerate() {
            assert_eq!(cov.count, stats.count(t));
            assert_eq!(format!("{:.3}", cov.percentage), stats.format_percentage(t));
        }
        let exact = exact_minimum_hitting_set(c, &SolverConfig::default()).unwrap();
        let names: Vec<&str> = exact.names(&set.universe);
        assert_eq!(r.descriptor(Method::Exact).unwrap().tags, names);
    }
}

#[test]
fn json_round_trip_and_renderings() {
    let dir = tempfile::tempdir().unwrap();
    let clusters = write_clusters(dir.path());
    let saved = dir.path().join("report.json");
    let out = tagdesc(&["explain", "--clusters", p(&clusters), "--out", p(&saved)]);
    assert!(out.status.success());
    let text = fs::read_to_string(&saved).unwrap();
    let report = ExplainReport::from_json(&text).unwrap();
    let again = render_report(&report, tagdesc::Format::Json).unwrap();
    assert_eq!(again, text.as_bytes());

    let table = tagdesc(&["report", "--report", p(&saved), "--format", "text-table"]);
    let table = String::from_utf8(table.stdout).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    // header, rule, three methods
    assert_eq!(lines.len(), 5);
    assert!(lines[0].contains("Cluster A: 3 items") && lines[0].contains("Cluster B: 2 items"));
    assert_eq!(lines[0].matches('|').count(), 4);
    assert!(lines[2].starts_with("| Disjunctive Heuristic"));
    assert!(lines[4].starts_with("| CNF"));

    let csv = tagdesc(&["report", "--report", p(&saved), "--format", "csv"]);
    let csv = String::from_utf8(csv.stdout).unwrap();
    assert!(csv.contains("A,percentage,t5,66.667\n"));
    assert!(csv.contains("B,percentage,t1,100.000\n"));
}

#[test]
fn missing_file_is_io_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = tagdesc(&[
        "explain",
        "--clusters",
        p(&dir.path().join("absent.json")),
        "--out",
        p(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_IO));
    assert!(!out_path.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn bad_flags_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let clusters = write_clusters(dir.path());
    let out = tagdesc(&["explain", "--clusters", p(&clusters), "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    let out = tagdesc(&["explain", "--clusters", p(&clusters), "--methods", "dnf"]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    let out = tagdesc(&["bench", "--sizes", "10", "--repeats", "1"]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG), "bench without --seed");
}

#[test]
fn strict_cnf_infeasibility_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("single.json");
    fs::write(
        &path,
        r#"{"universe": ["t1", "t2"], "clusters": [{"cluster_id": "c", "items": [
            {"id": "a", "tags": [0]}, {"id": "b", "tags": [0, 1]}]}]}"#,
    )
    .unwrap();
    let out = tagdesc(&["explain", "--clusters", p(&path)]);
    assert_eq!(out.status.code(), Some(EXIT_INFEASIBLE));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("solve (c)"), "{err}");

    let report = explain_json(&path, &["--cnf-preprocess", "drop-and-report"]);
    let c = report.cluster("c").unwrap();
    assert_eq!(c.removed_items.len(), 1);
    assert_eq!(c.removed_items[0].id, "a");
    assert_eq!(c.removed_items[0].reason, "singleton-tag-set");
}

#[test]
fn untagged_items_name_the_offenders() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("untagged.json");
    fs::write(
        &path,
        r#"{"universe": ["t1"], "clusters": [{"cluster_id": "c", "items": [
            {"id": "bare", "tags": []}, {"id": "b", "tags": [0]}]}]}"#,
    )
    .unwrap();
    // Rejected while loading by default, by the solvers when admitted.
    let out = tagdesc(&["explain", "--clusters", p(&path)]);
    assert_eq!(out.status.code(), Some(EXIT_INFEASIBLE));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.starts_with("tagdesc: load") && err.contains("bare"),
        "{err}"
    );
    let out = tagdesc(&["explain", "--clusters", p(&path), "--allow-untagged"]);
    assert_eq!(out.status.code(), Some(EXIT_INFEASIBLE));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.starts_with("tagdesc: coverage") || err.starts_with("tagdesc: solve"),
        "{err}"
    );
    assert!(err.contains("bare"), "{err}");
}

#[test]
fn filters_record_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let clusters = write_clusters(dir.path());
    let map = dir.path().join("complements.json");
    fs::write(&map, r#"[["t1", "t2"], ["t5", "t6"]]"#).unwrap();
    let masks = dir.path().join("masks.json");
    let out = tagdesc(&[
        "filter",
        "--clusters",
        p(&clusters),
        "--complement-map",
        p(&map),
        "--shared-threshold",
        "40",
        "--filter-pair",
        "A,B",
        "--out",
        p(&masks),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let report = explain_json(
        &clusters,
        &["--masks", p(&masks), "--methods", "greedy,exact"],
    );
    let a = report.cluster("A").unwrap();
    assert_eq!(a.filters.len(), 2);
    // t1 and t2 tie in A (one item each), so the higher id t2 goes; t6 is
    // rarer than t5. t3 covers 2/3 of A and 1/2 of B, above 40% in both;
    // t1 covers only 1/3 of A.
    let json = serde_json::to_string(&a.filters).unwrap();
    assert!(
        json.contains(r#""filter":"non-complementarity","excluded":["t2","t6"]"#),
        "{json}"
    );
    assert!(
        json.contains(
            r#""filter":"cross-cluster","partner":"B","threshold":40.0,"excluded":["t3"]"#
        ),
        "{json}"
    );
    for d in &a.descriptors {
        for banned in ["t2", "t3", "t6"] {
            assert!(!d.tags.iter().any(|t| t == banned));
        }
    }
}

#[test]
fn cluster_requires_seed_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("points.csv");
    fs::write(&data, "x,y\n0,0\n0,1\n1,0\n10,10\n10,11\n11,10\n").unwrap();
    let out = tagdesc(&["cluster", "--data", p(&data), "--k", "2"]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));

    let run = || tagdesc(&["cluster", "--data", p(&data), "--k", "2", "--seed", "3"]).stdout;
    let first = String::from_utf8(run()).unwrap();
    assert_eq!(first.into_bytes(), run());

    let elbow = tagdesc(&[
        "cluster",
        "--data",
        p(&data),
        "--elbow",
        "1..3",
        "--seed",
        "3",
    ]);
    let elbow = String::from_utf8(elbow.stdout).unwrap();
    assert!(elbow.starts_with("k,sse\n1,"));
    assert_eq!(elbow.lines().count(), 4);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("timings.csv");
    let out = tagdesc(&[
        "bench",
        "--sizes",
        "20,40",
        "--tags",
        "8",
        "--repeats",
        "2",
        "--seed",
        "1",
        "--out",
        p(&out_path),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "n_items,solver,mean_seconds,std_seconds,optimal_fraction"
    );
    assert_eq!(lines.len(), 7);
    assert!(lines[2].starts_with("20,exact,"));
}

#[test]
fn exhausted_budget_reports_incumbent() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cycle.json");
    fs::write(
        &path,
        r#"{"universe": ["t1", "t2", "t3", "t4", "t5"], "clusters": [{"cluster_id": "c", "items": [
            {"id": "a", "tags": [0, 1]}, {"id": "b", "tags": [1, 2]}, {"id": "c", "tags": [2, 3]},
            {"id": "d", "tags": [3, 4]}, {"id": "e", "tags": [4, 0]}]}]}"#,
    )
    .unwrap();
    let report = explain_json(&path, &["--methods", "exact", "--node-budget", "1"]);
    let d = report.cluster("c").unwrap().descriptor(Method::Exact).unwrap();
    assert!(!d.optimal);
    assert_eq!(d.size, 3);
    let full = explain_json(&path, &["--methods", "exact"]);
    assert!(full.cluster("c").unwrap().descriptor(Method::Exact).unwrap().optimal);
}
