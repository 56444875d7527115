//! Deriving binary tags from raw feature columns.
//!
//! Numeric features become complementary threshold pairs: a "below" tag for
//! `value < threshold` and an "at or above" tag for `value >= threshold`,
//! so a value equal to the threshold always lands in the second tag.
//! Categorical features become one membership tag per group of labels.

use std::collections::BTreeSet;
use std::io::Read;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::ComplementMap;
use crate::io::ClusterSet;
use crate::model::{TagUniverse, TaggedCluster};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    ThresholdBelow,
    ThresholdAtOrAbove,
    CategoricalMember,
}

impl RuleKind {
    fn is_threshold(self) -> bool {
        !matches!(self, RuleKind::CategoricalMember)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    Median,
    Mean,
    #[default]
    Explicit,
}

/// One tag definition. Threshold rules carry a resolved `threshold`;
/// categorical rules carry the labels that make an item a member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagRule {
    pub name: String,
    pub kind: RuleKind,
    pub feature: String,
    #[serde(default)]
    pub basis: Basis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement_of: Option<String>,
}

impl TagRule {
    fn threshold_value(&self) -> Result<f64> {
        self.threshold
            .ok_or_else(|| Error::config(format!("rule {:?} has no resolved threshold", self.name)))
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Threshold of a numeric column by median (midpoint of the middle two for
/// even length) or arithmetic mean.
pub fn column_threshold(column: &[f64], basis: Basis) -> Result<f64> {
    if column.is_empty() {
        return Err(Error::config(
            "cannot derive a threshold from an empty column",
        ));
    }
    if let Some(v) = column.iter().find(|v| !v.is_finite()) {
        return Err(Error::config(format!(
            "column contains non-finite value {v}"
        )));
    }
    match basis {
        Basis::Median => {
            let mut sorted = column.to_vec();
            sorted.sort_by(f64::total_cmp);
            Ok(median(&sorted))
        }
        Basis::Mean => Ok(column.iter().sum::<f64>() / column.len() as f64),
        Basis::Explicit => Err(Error::config(
            "an explicit threshold cannot be derived from data",
        )),
    }
}

/// Complementary `(below, at-or-above)` rules splitting `feature` at its
/// median or mean.
pub fn derive_threshold_pair(
    feature: &str,
    column: &[f64],
    basis: Basis,
    names: (&str, &str),
) -> Result<(TagRule, TagRule)> {
    let threshold = column_threshold(column, basis)?;
    Ok(threshold_pair(feature, threshold, basis, names))
}

/// Complementary pair at a given threshold.
pub fn threshold_pair(
    feature: &str,
    threshold: f64,
    basis: Basis,
    (below, above): (&str, &str),
) -> (TagRule, TagRule) {
    let rule = |name: &str, kind, partner: &str| TagRule {
        name: name.to_string(),
        kind,
        feature: feature.to_string(),
        basis,
        threshold: Some(threshold),
        values: Vec::new(),
        complement_of: Some(partner.to_string()),
    };
    (
        rule(below, RuleKind::ThresholdBelow, above),
        rule(above, RuleKind::ThresholdAtOrAbove, below),
    )
}

/// One membership rule per group, in order of each group's first appearance
/// in `grouping` (pairs of `(label, group)`).
pub fn derive_categorical_rules(
    feature: &str,
    column: &[String],
    grouping: &[(String, String)],
) -> Result<Vec<TagRule>> {
    let mut labels = BTreeSet::new();
    let mut rules: Vec<TagRule> = Vec::new();
    for (label, group) in grouping {
        if !labels.insert(label.as_str()) {
            return Err(Error::config(format!(
                "label {label:?} of feature {feature:?} is mapped more than once"
            )));
        }
        match rules.iter_mut().find(|r| r.name == *group) {
            Some(rule) => rule.values.push(label.clone()),
            None => rules.push(TagRule {
                name: group.clone(),
                kind: RuleKind::CategoricalMember,
                feature: feature.to_string(),
                basis: Basis::Explicit,
                threshold: None,
                values: vec![label.clone()],
                complement_of: None,
            }),
        }
    }
    if let Some(unmapped) = column.iter().find(|v| !labels.contains(v.as_str())) {
        return Err(Error::config(format!(
            "label {unmapped:?} of feature {feature:?} has no group"
        )));
    }
    Ok(rules)
}

/// A declarative tag schema: rules in universe order. Threshold rules may
/// leave `threshold` unset when `basis` is median or mean; it is then
/// computed from the data by [`TagSchema::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TagSchema {
    pub rules: Vec<TagRule>,
}

impl TagSchema {
    pub fn from_json<R: Read>(reader: R) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }

    /// Fills in data-derived thresholds and checks the schema's structure:
    /// unique names, threshold rules in complementary pairs over one feature.
    pub fn resolve(&self, table: &Table) -> Result<Vec<TagRule>> {
        let mut names = BTreeSet::new();
        for r in &self.rules {
            if !names.insert(r.name.as_str()) {
                return Err(Error::config(format!("duplicate rule name {:?}", r.name)));
            }
            if r.kind == RuleKind::CategoricalMember && r.values.is_empty() {
                return Err(Error::config(format!(
                    "categorical rule {:?} has no values",
                    r.name
                )));
            }
        }
        let mut resolved = self.rules.clone();
        for rule in resolved.iter_mut().filter(|r| r.kind.is_threshold()) {
            match (rule.basis, rule.threshold) {
                (Basis::Explicit, None) => {
                    return Err(Error::config(format!(
                        "rule {:?} has an explicit basis but no threshold",
                        rule.name
                    )))
                }
                (Basis::Explicit, Some(_)) => {}
                (basis, _) => {
                    let column = table.numeric_column(&rule.feature)?;
                    rule.threshold = Some(column_threshold(&column, basis)?);
                }
            }
        }
        for rule in resolved.iter().filter(|r| r.kind.is_threshold()) {
            partner(&resolved, rule)?;
        }
        Ok(resolved)
    }

    /// Explicitly declared complement pairs (via `complement_of`), each once.
    pub fn complement_map(&self, universe: &TagUniverse) -> Result<ComplementMap> {
        let mut pairs = Vec::new();
        for (i, rule) in self.rules.iter().enumerate() {
            if let Some(other) = &rule.complement_of {
                let j = universe.require_id(other)?;
                let back = self.rules[j].complement_of.as_deref();
                if back.is_some_and(|b| b != rule.name) {
                    return Err(Error::config(format!(
                        "rule {:?} names {other:?} as complement, which names {:?}",
                        rule.name,
                        back.unwrap_or_default()
                    )));
                }
                if back.is_none() || i < j {
                    pairs.push((i, j));
                }
            }
        }
        ComplementMap::new(pairs, universe)
    }
}

fn partner<'a>(rules: &'a [TagRule], rule: &TagRule) -> Result<&'a TagRule> {
    let opposite = match rule.kind {
        RuleKind::ThresholdBelow => RuleKind::ThresholdAtOrAbove,
        RuleKind::ThresholdAtOrAbove => RuleKind::ThresholdBelow,
        RuleKind::CategoricalMember => unreachable!("only threshold rules pair"),
    };
    let found = match &rule.complement_of {
        Some(name) => rules.iter().find(|r| r.name == *name),
        None => rules
            .iter()
            .find(|r| r.kind == opposite && r.feature == rule.feature),
    };
    let Some(p) = found else {
        return Err(Error::config(format!(
            "threshold rule {:?} has no complementary rule on feature {:?}",
            rule.name, rule.feature
        )));
    };
    if p.kind != opposite || p.feature != rule.feature || p.threshold != rule.threshold {
        return Err(Error::config(format!(
            "rules {:?} and {:?} do not form a complementary threshold pair",
            rule.name, p.name
        )));
    }
    Ok(p)
}

/// Universe whose tag `i` is `rules[i]`.
pub fn universe_of(rules: &[TagRule]) -> Result<TagUniverse> {
    TagUniverse::new(rules.iter().map(|r| r.name.clone()))
}

/// Tags every row and groups rows into one cluster per distinct label.
///
/// Clusters are ordered by label (numerically when every label is an
/// integer). Item ids come from `id_column`, or are the 0-based row index.
pub fn apply_tags(
    table: &Table,
    cluster_labels: &[String],
    rules: &[TagRule],
    id_column: Option<&str>,
) -> Result<ClusterSet> {
    if cluster_labels.len() != table.len() {
        return Err(Error::config(format!(
            "{} cluster labels for {} rows",
            cluster_labels.len(),
            table.len()
        )));
    }
    let universe = Arc::new(universe_of(rules)?);
    let cols = rules
        .iter()
        .map(|r| table.column_index(&r.feature))
        .collect::<Result<Vec<_>>>()?;
    let id_col = id_column.map(|c| table.column_index(c)).transpose()?;

    // Categorical features whose groups must partition each row's label.
    let categorical: BTreeSet<&str> = rules
        .iter()
        .filter(|r| r.kind == RuleKind::CategoricalMember)
        .map(|r| r.feature.as_str())
        .collect();

    let mut labels: Vec<&String> = cluster_labels
        .iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if labels.iter().all(|l| l.parse::<i64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<i64>().expect("checked above"));
    }
    let mut groups: Vec<Vec<(String, Vec<usize>)>> = vec![Vec::new(); labels.len()];

    for row in 0..table.len() {
        let mut tags = Vec::new();
        for (t, (rule, &col)) in rules.iter().zip(&cols).enumerate() {
            let fires = match rule.kind {
                RuleKind::ThresholdBelow => table.number(row, col)? < rule.threshold_value()?,
                RuleKind::ThresholdAtOrAbove => {
                    table.number(row, col)? >= rule.threshold_value()?
                }
                RuleKind::CategoricalMember => {
                    let v = table.text(row, col)?;
                    rule.values.iter().any(|x| x == v)
                }
            };
            if fires {
                tags.push(t);
            }
        }
        for feature in &categorical {
            let hits = rules
                .iter()
                .enumerate()
                .filter(|(t, r)| {
                    r.kind == RuleKind::CategoricalMember
                        && r.feature == *feature
                        && tags.contains(t)
                })
                .count();
            if hits != 1 {
                let col = table.column_index(feature)?;
                return Err(Error::config(format!(
                    "row {}: value {:?} of feature {feature:?} matches {hits} groups, expected exactly one",
                    row + 1,
                    table.text(row, col)?
                )));
            }
        }
        let id = match id_col {
            Some(c) => table.text(row, c)?.to_string(),
            None => row.to_string(),
        };
        let slot = labels
            .iter()
            .position(|l| **l == cluster_labels[row])
            .expect("label collected above");
        groups[slot].push((id, tags));
    }

    let clusters = labels
        .into_iter()
        .zip(groups)
        .map(|(label, items)| TaggedCluster::new(label.clone(), Arc::clone(&universe), items, true))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClusterSet { universe, clusters })
}
