//! Euclidean minimum spanning trees and the α-weighted persistence score.
//!
//! The finite bars of the 0-th persistence barcode of a Vietoris–Rips
//! filtration are exactly the MST edge lengths, so the score
//! `E⁰_α(X) = Σ |e|^α` over MST edges is the α-weighted sum of 0-dimensional
//! lifespans.

use serde::{Deserialize, Serialize};

use crate::cloud::{DistanceMatrix, PointCloud};
use crate::error::{Error, Result};

/// Edge lengths of a minimum spanning tree, in the order Prim added them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MstResult {
    pub edge_lengths: Vec<f64>,
    pub total_weight: f64,
}

impl MstResult {
    fn from_lengths(edge_lengths: Vec<f64>) -> Self {
        let total_weight = edge_lengths.iter().sum();
        Self {
            edge_lengths,
            total_weight,
        }
    }

    pub fn sorted_lengths(&self) -> Vec<f64> {
        let mut v = self.edge_lengths.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Dense Prim over `n` vertices. `dist(a, b)` must be symmetric and
/// nonnegative. O(n²) time, O(n) memory.
pub(crate) fn prim_lengths<F>(n: usize, mut dist: F) -> Vec<f64>
where
    F: FnMut(usize, usize) -> f64,
{
    if n < 2 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut lengths = Vec::with_capacity(n - 1);

    in_tree[0] = true;
    let mut last = 0;
    for _ in 1..n {
        let mut next = usize::MAX;
        let mut next_d = f64::INFINITY;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let d = dist(last, v);
            if d < best[v] {
                best[v] = d;
            }
            if best[v] < next_d || next == usize::MAX {
                next_d = best[v];
                next = v;
            }
        }
        in_tree[next] = true;
        lengths.push(next_d);
        last = next;
    }
    lengths
}

/// Exact Euclidean MST of the complete graph on the cloud's points.
pub fn euclidean_mst(cloud: &PointCloud) -> Result<MstResult> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::Size(format!(
            "minimum spanning tree needs at least 2 points, cloud has {n}"
        )));
    }
    Ok(MstResult::from_lengths(prim_lengths(n, |a, b| {
        cloud.dist(a, b)
    })))
}

/// MST edge lengths of the sub-cloud selected by `indices`, read from a
/// precomputed distance matrix.
pub(crate) fn subset_mst_lengths(matrix: &DistanceMatrix, indices: &[usize]) -> Vec<f64> {
    prim_lengths(indices.len(), |a, b| matrix.get(indices[a], indices[b]))
}

/// `Σ |e|^α` over the MST edges.
pub fn persistence_score(mst: &MstResult, alpha: f64) -> Result<f64> {
    score_lengths(&mst.edge_lengths, alpha)
}

pub(crate) fn score_lengths(lengths: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(if alpha == 1.0 {
        lengths.iter().sum()
    } else {
        lengths.iter().map(|l| l.powf(alpha)).sum()
    })
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Param(format!("alpha must be positive, got {alpha}")))
    }
}

/// Finite bar lengths of the 0-th persistence barcode, by sweeping the
/// Rips filtration: all edges in increasing length, recording a death
/// `(0, λ)` whenever an edge merges two components.
///
/// Quadratic memory; intended as a cross-check for [`euclidean_mst`].
pub fn zeroth_barcode(cloud: &PointCloud) -> Result<Vec<f64>> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::Size(format!(
            "barcode needs at least 2 points, cloud has {n}"
        )));
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((cloud.dist(i, j), i, j));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut components = Components::new(n);
    let mut bars = Vec::with_capacity(n - 1);
    for (len, i, j) in edges {
        if components.merge(i, j) {
            bars.push(len);
            if bars.len() == n - 1 {
                break;
            }
        }
    }
    Ok(bars)
}

struct Components {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Components {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn root(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn merge(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.root(a), self.root(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}
