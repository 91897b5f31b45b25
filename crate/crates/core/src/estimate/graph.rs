//! Symmetric k-NN graph with Euclidean edge weights and all-pairs shortest
//! paths (Dijkstra from every source, parallel across sources).

use crate::error::{Error, Result};
use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use std::collections::BinaryHeap;

/// Heap entry ordered by distance, smallest first.
#[derive(PartialEq)]
struct Visit {
    dist: f64,
    node: u32,
}

impl Eq for Visit {}

impl Ord for Visit {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reverse: BinaryHeap is a max-heap.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Visit {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn euclidean(points: ArrayView2<f64>, i: usize, j: usize) -> f64 {
    let (a, b) = (points.row(i), points.row(j));
    let mut s = 0.0;
    for c in 0..a.len() {
        let d = a[c] - b[c];
        s += d * d;
    }
    s.sqrt()
}

/// Symmetric k-NN adjacency list: `i ~ j` when `j` is among the k nearest of
/// `i` or vice versa.
pub fn knn_adjacency(points: ArrayView2<f64>, k: usize) -> Result<Vec<Vec<(u32, f64)>>> {
    let n = points.nrows();
    if k < 1 || k >= n {
        return Err(Error::domain(format!("need 1 <= k < n, got k={k}, n={n}")));
    }
    let neighbor_lists: Vec<Vec<(u32, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut dists: Vec<(u32, f64)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (j as u32, euclidean(points, i, j)))
                .collect();
            dists.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
            dists.truncate(k);
            dists
        })
        .collect();
    let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for (i, list) in neighbor_lists.iter().enumerate() {
        for &(j, d) in list {
            adj[i].push((j, d));
            adj[j as usize].push((i as u32, d));
        }
    }
    for list in adj.iter_mut() {
        list.sort_by(|a, b| a.0.cmp(&b.0));
        list.dedup_by(|a, b| a.0 == b.0);
    }
    Ok(adj)
}

fn count_components(adj: &[Vec<(u32, f64)>]) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        stack.push(start);
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w as usize);
                }
            }
        }
    }
    components
}

fn dijkstra(adj: &[Vec<(u32, f64)>], source: usize) -> Vec<f64> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Visit {
        dist: 0.0,
        node: source as u32,
    });
    while let Some(Visit { dist: d, node }) = heap.pop() {
        let u = node as usize;
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                heap.push(Visit { dist: nd, node: v });
            }
        }
    }
    dist
}

/// Graph-geodesic distance matrix: symmetric, zero diagonal, entries at least
/// the Euclidean distances, exact shortest-path metric on the k-NN graph.
/// Errors when the graph is disconnected.
pub fn knn_geodesic_matrix(points: ArrayView2<f64>, k: usize) -> Result<Array2<f64>> {
    let n = points.nrows();
    let adj = knn_adjacency(points, k)?;
    let components = count_components(&adj);
    if components > 1 {
        return Err(Error::DisconnectedGraph { components });
    }
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| dijkstra(&adj, s)).collect();
    let mut out = Array2::zeros((n, n));
    for (i, row) in rows.iter().enumerate() {
        for (j, &d) in row.iter().enumerate() {
            out[[i, j]] = d;
        }
    }
    // Dijkstra is exact, but symmetrize to kill last-bit asymmetry from
    // differing relaxation orders.
    for i in 0..n {
        for j in (i + 1)..n {
            let d = 0.5 * (out[[i, j]] + out[[j, i]]);
            out[[i, j]] = d;
            out[[j, i]] = d;
        }
    }
    Ok(out)
}
