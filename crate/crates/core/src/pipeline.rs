//! Numeric preprocessing and k-means clustering ahead of tagging.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::table::Table;

/// Rectangular, finite, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericMatrix {
    columns: Vec<String>,
    values: Vec<f64>,
    rows: usize,
}

impl NumericMatrix {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = columns.len();
        let n = rows.len();
        let mut values = Vec::with_capacity(n * width);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(Error::config(format!(
                    "row {} has {} values, expected {width}",
                    i + 1,
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::config(format!(
                    "row {} has non-finite value {v}",
                    i + 1
                )));
            }
            values.extend(row);
        }
        Ok(NumericMatrix {
            columns,
            values,
            rows: n,
        })
    }

    /// Numeric columns as-is plus one 0/1 dummy column per observed label of
    /// each `one_hot` column (named `feature=label`, labels sorted).
    pub fn from_table(table: &Table, numeric: &[String], one_hot: &[String]) -> Result<Self> {
        let mut columns = Vec::new();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for name in numeric {
            columns.push(name.clone());
            cols.push(table.numeric_column(name)?);
        }
        for name in one_hot {
            let labels = table.text_column(name)?;
            let distinct: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
            for value in distinct {
                columns.push(format!("{name}={value}"));
                cols.push(
                    labels
                        .iter()
                        .map(|l| f64::from(u8::from(l == value)))
                        .collect(),
                );
            }
        }
        let rows = (0..table.len())
            .map(|r| cols.iter().map(|c| c[r]).collect())
            .collect();
        NumericMatrix::new(columns, rows)
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.width();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i)[j]).collect()
    }
}

/// Scales every column to mean 0 and (population) variance 1.
pub fn standardize(data: &NumericMatrix) -> Result<NumericMatrix> {
    let n = data.rows() as f64;
    let mut out = data.clone();
    for j in 0..data.width() {
        let col = data.column(j);
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        if !(var > 0.0) {
            return Err(Error::ZeroVariance {
                column: data.columns[j].clone(),
            });
        }
        let sd = var.sqrt();
        let w = data.width();
        for i in 0..data.rows() {
            out.values[i * w + j] = (col[i] - mean) / sd;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared distances to the assigned centroid.
    pub sse: f64,
    pub iterations: usize,
    /// SSE after each centroid update, in order.
    pub sse_history: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(point, centroid);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

fn sse(data: &NumericMatrix, labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    (0..data.rows())
        .map(|i| sq_dist(data.row(i), &centroids[labels[i]]))
        .sum()
}

fn means(data: &NumericMatrix, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; data.width()]; k];
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(data.row(i)) {
            *s += v;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        if c > 0 {
            s.iter_mut().for_each(|v| *v /= c as f64);
        }
    }
    sums
}

/// Gives every empty cluster the point farthest from its current centroid,
/// taken from a cluster that can spare it.
fn repair_empty(data: &NumericMatrix, labels: &mut [usize], centroids: &mut [Vec<f64>]) {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        labels.iter().for_each(|&l| counts[l] += 1);
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut far = None;
        let mut far_d = f64::NEG_INFINITY;
        for i in 0..data.rows() {
            if counts[labels[i]] < 2 {
                continue;
            }
            let d = sq_dist(data.row(i), &centroids[labels[i]]);
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        let far = far.expect("k <= rows leaves a cluster with two points");
        labels[far] = empty;
        centroids[empty] = data.row(far).to_vec();
    }
}

/// Lloyd's algorithm from `k` distinct rows sampled with `seed`.
/// Stops at an assignment fixpoint or after `max_iter` updates.
pub fn kmeans(data: &NumericMatrix, k: usize, seed: u64, max_iter: usize) -> Result<KMeansResult> {
    if data.rows() == 0 {
        return Err(Error::config("k-means needs at least one row"));
    }
    if k == 0 || k > data.rows() {
        return Err(Error::config(format!(
            "k must lie in 1..={}, got {k}",
            data.rows()
        )));
    }
    if max_iter == 0 {
        return Err(Error::config("max_iter must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Vec<f64>> = sample(&mut rng, data.rows(), k)
        .into_iter()
        .map(|i| data.row(i).to_vec())
        .collect();

    let assign = |centroids: &[Vec<f64>]| -> Vec<usize> {
        (0..data.rows())
            .map(|i| nearest(data.row(i), centroids))
            .collect()
    };
    let mut labels = assign(&centroids);
    let mut history = Vec::new();
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        repair_empty(data, &mut labels, &mut centroids);
        centroids = means(data, &labels, k);
        history.push(sse(data, &labels, &centroids));
        let next = assign(&centroids);
        if next == labels {
            break;
        }
        labels = next;
    }
    repair_empty(data, &mut labels, &mut centroids);
    centroids = means(data, &labels, k);
    let total = sse(data, &labels, &centroids);
    Ok(KMeansResult {
        labels,
        centroids,
        sse: total,
        iterations,
        sse_history: history,
    })
}

/// Best (lowest SSE) of `restarts` runs with seeds `seed, seed + 1, ...`.
pub fn kmeans_best_of(
    data: &NumericMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
    restarts: usize,
) -> Result<KMeansResult> {
    let mut best: Option<KMeansResult> = None;
    for r in 0..restarts.max(1) {
        let run = kmeans(data, k, seed.wrapping_add(r as u64), max_iter)?;
        if best.as_ref().is_none_or(|b| run.sse < b.sse) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// SSE for each `k` in `ks`.
pub fn elbow_curve(
    data: &NumericMatrix,
    ks: RangeInclusive<usize>,
    seed: u64,
    max_iter: usize,
    restarts: usize,
) -> Result<Vec<(usize, f64)>> {
    if ks.is_empty() || *ks.start() == 0 || *ks.end() > data.rows() {
        return Err(Error::config(format!(
            "elbow range {}..={} must lie within 1..={}",
            ks.start(),
            ks.end(),
            data.rows()
        )));
    }
    ks.map(|k| Ok((k, kmeans_best_of(data, k, seed, max_iter, restarts)?.sse)))
        .collect()
}

/// `k,sse` CSV for external plotting.
pub fn elbow_csv(curve: &[(usize, f64)]) -> String {
    let mut out = String::from("k,sse\n");
    for (k, s) in curve {
        out.push_str(&format!("{k},{s}\n"));
    }
    out
}
