//! Interchange formats for tagged clusters.
//!
//! JSON:
//!
//! ```json
//! { "universe": ["t1", "t2"],
//!   "clusters": [ { "cluster_id": "1", "items": [ { "id": "a", "tags": [0, 1] } ] } ] }
//! ```
//!
//! CSV: a binary matrix with a `cluster_id` column, an `item_id` column and one
//! `0`/`1` column per tag. Tag columns define the universe in header order.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{TagUniverse, TaggedCluster};

/// Every cluster of one clustering, over a shared universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSet {
    pub universe: Arc<TagUniverse>,
    pub clusters: Vec<TaggedCluster>,
}

impl ClusterSet {
    pub fn get(&self, cluster_id: &str) -> Option<&TaggedCluster> {
        self.clusters.iter().find(|c| c.id() == cluster_id)
    }

    pub fn require(&self, cluster_id: &str) -> Result<&TaggedCluster> {
        self.get(cluster_id)
            .ok_or_else(|| Error::config(format!("unknown cluster {cluster_id:?}")))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ClusterSetDoc {
    universe: Vec<String>,
    clusters: Vec<ClusterDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ClusterDoc {
    cluster_id: String,
    items: Vec<ItemDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ItemDoc {
    id: String,
    tags: Vec<usize>,
}

pub fn read_json<R: Read>(reader: R, allow_untagged: bool) -> Result<ClusterSet> {
    let doc: ClusterSetDoc = serde_json::from_reader(reader)?;
    let universe = Arc::new(TagUniverse::new(doc.universe)?);
    let mut clusters = Vec::with_capacity(doc.clusters.len());
    for c in doc.clusters {
        if clusters
            .iter()
            .any(|x: &TaggedCluster| x.id() == c.cluster_id)
        {
            return Err(Error::config(format!(
                "duplicate cluster id {:?}",
                c.cluster_id
            )));
        }
        clusters.push(TaggedCluster::new(
            c.cluster_id,
            Arc::clone(&universe),
            c.items.into_iter().map(|i| (i.id, i.tags)),
            allow_untagged,
        )?);
    }
    Ok(ClusterSet { universe, clusters })
}

pub fn write_json<W: Write>(set: &ClusterSet, writer: W) -> Result<()> {
    let doc = ClusterSetDoc {
        universe: set.universe.names().to_vec(),
        clusters: set
            .clusters
            .iter()
            .map(|c| ClusterDoc {
                cluster_id: c.id().to_string(),
                items: c
                    .items()
                    .iter()
                    .map(|i| ItemDoc {
                        id: i.id.clone(),
                        tags: i.tags.iter().collect(),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(writer, &doc)?;
    Ok(())
}

pub fn to_json_string(set: &ClusterSet) -> Result<String> {
    let mut buf = Vec::new();
    write_json(set, &mut buf)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Reads the binary-matrix CSV variant. Clusters appear in order of first
/// occurrence.
pub fn read_csv_matrix<R: Read>(reader: R, allow_untagged: bool) -> Result<ClusterSet> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::config(format!("CSV matrix is missing the {name:?} column")))
    };
    let cluster_col = col("cluster_id")?;
    let item_col = col("item_id")?;
    let tag_cols: Vec<usize> = (0..headers.len())
        .filter(|&i| i != cluster_col && i != item_col)
        .collect();
    let universe = Arc::new(TagUniverse::new(tag_cols.iter().map(|&i| &headers[i]))?);

    let mut groups: Vec<(String, Vec<(String, Vec<usize>)>)> = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let cluster_id = record[cluster_col].to_string();
        let item_id = record[item_col].to_string();
        let mut tags = Vec::new();
        for (tag, &c) in tag_cols.iter().enumerate() {
            match record[c].trim() {
                "1" => tags.push(tag),
                "0" => {}
                "" => {
                    return Err(Error::MissingValue {
                        row: row + 1,
                        column: headers[c].to_string(),
                    })
                }
                other => {
                    return Err(Error::config(format!(
                        "row {}: column {:?} must be 0 or 1, found {other:?}",
                        row + 1,
                        &headers[c]
                    )))
                }
            }
        }
        match groups.iter_mut().find(|(id, _)| *id == cluster_id) {
            Some((_, items)) => items.push((item_id, tags)),
            None => groups.push((cluster_id, vec![(item_id, tags)])),
        }
    }
    let clusters = groups
        .into_iter()
        .map(|(id, items)| TaggedCluster::new(id, Arc::clone(&universe), items, allow_untagged))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClusterSet { universe, clusters })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "universe": ["t1", "t2", "t3"],
        "clusters": [
            {"cluster_id": "b", "items": [{"id": "x", "tags": [2, 0]}, {"id": "y", "tags": [1]}]},
            {"cluster_id": "a", "items": [{"id": "z", "tags": [0]}]}
        ]
    }"#;

    #[test]
    fn json_round_trip_preserves_order() {
        let set = read_json(DOC.as_bytes(), false).unwrap();
        assert_eq!(set.clusters[0].id(), "b");
        assert_eq!(
            set.clusters[0].items()[0].tags.iter().collect::<Vec<_>>(),
            vec![0, 2]
        );
        let text = to_json_string(&set).unwrap();
        let back = read_json(text.as_bytes(), false).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn json_rejects_bad_tag_ids_and_duplicate_clusters() {
        let bad = r#"{"universe": ["t1"], "clusters": [{"cluster_id": "1", "items": [{"id": "a", "tags": [1]}]}]}"#;
        assert!(read_json(bad.as_bytes(), false).is_err());
        let dup = r#"{"universe": ["t1"], "clusters": [
            {"cluster_id": "1", "items": []}, {"cluster_id": "1", "items": []}]}"#;
        assert!(read_json(dup.as_bytes(), false).is_err());
    }

    #[test]
    fn csv_matrix_groups_by_cluster() {
        let csv = "item_id,low,high,cluster_id\nr1,1,0,2\nr2,0,1,1\nr3,1,1,2\n";
        let set = read_csv_matrix(csv.as_bytes(), false).unwrap();
        assert_eq!(set.universe.names(), &["low", "high"]);
        assert_eq!(set.clusters.len(), 2);
        assert_eq!(set.clusters[0].id(), "2");
        assert_eq!(set.clusters[0].len(), 2);
        assert_eq!(set.clusters[0].items()[1].tags.len(), 2);
    }

    #[test]
    fn csv_matrix_rejects_non_binary_and_untagged() {
        let csv = "cluster_id,item_id,a\n1,r1,2\n";
        assert!(read_csv_matrix(csv.as_bytes(), false).is_err());
        let csv = "cluster_id,item_id,a\n1,r1,0\n";
        assert!(matches!(
            read_csv_matrix(csv.as_bytes(), false),
            Err(Error::UntaggedItems { .. })
        ));
        assert!(read_csv_matrix(csv.as_bytes(), true).is_ok());
    }
}
