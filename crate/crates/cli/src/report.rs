//! Explanation reports and their renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tagdesc_core::solve::RemovedItem;
use tagdesc_core::{Error, Result, TagStats, TagUniverse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Greedy,
    Exact,
    Cnf,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Greedy, Method::Exact, Method::Cnf];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Greedy => "greedy",
            Method::Exact => "exact",
            Method::Cnf => "cnf",
        }
    }

    /// Row label in the text table.
    pub fn title(&self) -> &'static str {
        match self {
            Method::Greedy => "Disjunctive Heuristic",
            Method::Exact => "Disjunctive Exact",
            Method::Cnf => "CNF",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Method::Greedy),
            "exact" => Ok(Method::Exact),
            "cnf" => Ok(Method::Cnf),
            other => Err(Error::config(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedRecord {
    pub id: String,
    pub reason: String,
}

impl From<&RemovedItem> for RemovedRecord {
    fn from(r: &RemovedItem) -> Self {
        RemovedRecord {
            id: r.id.clone(),
            reason: r.reason.as_str().to_string(),
        }
    }
}

/// One solver's answer for one cluster.
///
/// `tags` is in selection order for greedy and ascending for exact. For cnf
/// it lists both clauses back to back, and `clauses` keeps them apart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorRecord {
    pub cluster_id: String,
    pub method: Method,
    pub tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clauses: Option<[Vec<String>; 2]>,
    pub size: usize,
    /// Proven minimum. For cnf: both clauses were solved exactly.
    pub optimal: bool,
    pub removed_items: Vec<RemovedRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagCoverage {
    pub tag: String,
    pub count: usize,
    /// Percent of the cluster's items, rounded half-up to 3 decimals.
    pub percentage: f64,
}

/// Where a cluster's candidate mask came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "filter", rename_all = "kebab-case")]
pub enum FilterRecord {
    NonComplementarity {
        excluded: Vec<String>,
    },
    CrossCluster {
        partner: String,
        threshold: f64,
        excluded: Vec<String>,
    },
}

impl FilterRecord {
    pub fn excluded(&self) -> &[String] {
        match self {
            FilterRecord::NonComplementarity { excluded } => excluded,
            FilterRecord::CrossCluster { excluded, .. } => excluded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub cluster_id: String,
    pub size: usize,
    pub filters: Vec<FilterRecord>,
    pub descriptors: Vec<DescriptorRecord>,
    pub coverage: Vec<TagCoverage>,
    /// Items dropped by any method (currently only cnf drops items).
    pub removed_items: Vec<RemovedRecord>,
}

impl ClusterReport {
    pub fn descriptor(&self, method: Method) -> Option<&DescriptorRecord> {
        self.descriptors.iter().find(|d| d.method == method)
    }

    pub fn coverage_of(&self, tag: &str) -> Option<&TagCoverage> {
        self.coverage.iter().find(|c| c.tag == tag)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainReport {
    pub universe: Vec<String>,
    pub clusters: Vec<ClusterReport>,
}

impl ExplainReport {
    pub fn cluster(&self, id: &str) -> Option<&ClusterReport> {
        self.clusters.iter().find(|c| c.cluster_id == id)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub(crate) fn coverage(stats: &TagStats, universe: &TagUniverse) -> Vec<TagCoverage> {
    (0..universe.len())
        .map(|t| TagCoverage {
            tag: universe.name(t).to_string(),
            count: stats.count(t),
            percentage: stats.percentage(t),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    TextTable,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text-table" => Ok(Format::TextTable),
            "csv" => Ok(Format::Csv),
            other => Err(Error::config(format!(
                "unknown format {other:?} (expected json, text-table or csv)"
            ))),
        }
    }
}

pub fn render_report(report: &ExplainReport, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::TextTable => Ok(text_table(report).into_bytes()),
        Format::Csv => csv_rows(report),
    }
}

fn bracketed(tags: &[String]) -> String {
    format!("[{}]", tags.join(", "))
}

fn cell(d: &DescriptorRecord) -> String {
    match &d.clauses {
        Some([c1, c2]) => format!("({}, {})", bracketed(c1), bracketed(c2)),
        None => bracketed(&d.tags),
    }
}

/// Methods as rows, clusters as columns.
fn text_table(report: &ExplainReport) -> String {
    let methods: Vec<Method> = Method::ALL
        .into_iter()
        .filter(|m| report.clusters.iter().any(|c| c.descriptor(*m).is_some()))
        .collect();

    let mut rows: Vec<Vec<String>> = Vec::with_capacity(methods.len() + 1);
    let mut header = vec![String::new()];
    header.extend(
        report
            .clusters
            .iter()
            .map(|c| format!("Cluster {}: {} items", c.cluster_id, c.size)),
    );
    rows.push(header);
    for m in &methods {
        let mut row = vec![m.title().to_string()];
        row.extend(
            report
                .clusters
                .iter()
                .map(|c| c.descriptor(*m).map(cell).unwrap_or_else(|| "-".into())),
        );
        rows.push(row);
    }

    let cols = rows[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
        .collect();
    let line = |row: &[String]| {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        format!("| {} |\n", cells.join(" | "))
    };
    let rule = format!(
        "|{}|\n",
        widths
            .iter()
            .map(|w| "-".repeat(w + 2))
            .collect::<Vec<_>>()
            .join("|")
    );

    let mut out = line(&rows[0]);
    out.push_str(&rule);
    for row in &rows[1..] {
        out.push_str(&line(row));
    }
    out
}

/// Long format: `cluster_id,record,name,value`.
fn csv_rows(report: &ExplainReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["cluster_id", "record", "name", "value"])?;
    for c in &report.clusters {
        w.write_record([c.cluster_id.as_str(), "size", "", &c.size.to_string()])?;
        for d in &c.descriptors {
            w.write_record([
                c.cluster_id.as_str(),
                "descriptor",
                d.method.as_str(),
                &cell(d),
            ])?;
        }
        for r in &c.removed_items {
            w.write_record([c.cluster_id.as_str(), "removed", &r.id, &r.reason])?;
        }
        for cov in &c.coverage {
            let mut pct = String::new();
            write!(pct, "{:.3}", cov.percentage).expect("writing to a String");
            w.write_record([c.cluster_id.as_str(), "percentage", &cov.tag, &pct])?;
        }
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(cluster: &str, method: Method, tags: &[&str]) -> DescriptorRecord {
        DescriptorRecord {
            cluster_id: cluster.into(),
            method,
            tags: tags.iter().map(|t| t.to_string()).collect(),
            clauses: None,
            size: tags.len(),
            optimal: method == Method::Exact,
            removed_items: vec![],
        }
    }

    fn sample() -> ExplainReport {
        let mut cnf = record("1", Method::Cnf, &["t5", "t7"]);
        cnf.clauses = Some([vec!["t5".into()], vec!["t7".into()]]);
        ExplainReport {
            universe: vec!["t5".into(), "t7".into()],
            clusters: vec![ClusterReport {
                cluster_id: "1".into(),
                size: 90,
                filters: vec![],
                descriptors: vec![
                    record("1", Method::Greedy, &["t5"]),
                    record("1", Method::Exact, &["t5"]),
                    cnf,
                ],
                coverage: vec![
                    TagCoverage {
                        tag: "t5".into(),
                        count: 90,
                        percentage: 100.0,
                    },
                    TagCoverage {
                        tag: "t7".into(),
                        count: 61,
                        percentage: 67.778,
                    },
                ],
                removed_items: vec![],
            }],
        }
    }

    #[test]
    fn text_cells_follow_table_layout() {
        let out = String::from_utf8(render_report(&sample(), Format::TextTable).unwrap()).unwrap();
        assert!(out.contains("| Disjunctive Heuristic | [t5]"));
        assert!(out.contains("([t5], [t7])"));
        assert_eq!(out.lines().count(), 5);
    }

    #[test]
    fn csv_uses_three_decimals() {
        let out = String::from_utf8(render_report(&sample(), Format::Csv).unwrap()).unwrap();
        assert!(out.contains("1,percentage,t5,100.000\n"));
        assert!(out.contains("1,percentage,t7,67.778\n"));
    }

    #[test]
    fn unknown_format_is_config_error() {
        let err = "yaml".parse::<Format>().unwrap_err();
        assert_eq!(err.kind(), tagdesc_core::ErrorKind::Config);
    }
}
