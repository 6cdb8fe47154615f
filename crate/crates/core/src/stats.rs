//! Tree statistics: maximum degree, the balancedness statistic `H`,
//! anti-centrality, centroids and the ranked pendent subtrees of the centroid.
//!
//! Everything runs in `O(n)`. Most quantities are read off a single subtree-size
//! pass over the rooting at vertex 0, which is free for grown trees because
//! parents always precede children in arrival order. [`subtree_sizes`] and
//! [`anti_centrality`] instead traverse explicitly from an arbitrary root and
//! serve as an independent route.
//!
//! Ties are broken by arrival index throughout.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{GrowingTree, NO_PARENT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("({0}, {1}) is not an edge of the tree")]
    NotAnEdge(usize, usize),
}

/// The minimisers of anti-centrality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentroidResult {
    /// One or two vertices, ascending.
    pub vertices: Vec<usize>,
    /// Their common anti-centrality.
    pub psi: usize,
    /// The centroid with the smallest arrival index.
    pub canonical: usize,
}

/// A pendent subtree of the canonical centroid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedSubtree {
    /// 1-based rank by decreasing size.
    pub rank: usize,
    /// The neighbour of the centroid that roots this subtree.
    pub root: usize,
    pub size: usize,
}

pub fn max_degree(t: &GrowingTree) -> usize {
    t.degrees().max().unwrap_or(0)
}

/// Subtree sizes for the rooting at vertex 0.
pub(crate) fn rooted_sizes(t: &GrowingTree) -> Vec<u32> {
    let n = t.n();
    let parent = t.raw_parents();
    let mut sz = vec![1u32; n];
    let order: Vec<usize> = t.topological_order().collect();
    for &v in order.iter().rev() {
        let p = parent[v];
        if p != NO_PARENT {
            sz[p as usize] += sz[v];
        }
    }
    sz
}

/// `sz[u]` is the number of vertices whose path to `root` passes through `u`
/// (so `sz[root] == n`).
pub fn subtree_sizes(t: &GrowingTree, root: usize) -> Vec<usize> {
    let n = t.n();
    assert!(root < n, "root {root} out of range for a tree on {n} vertices");
    let adj = t.adjacency();
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![root];
    parent[root] = root;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &u in adj.neighbors(v) {
            let u = u as usize;
            if parent[u] == usize::MAX {
                parent[u] = v;
                stack.push(u);
            }
        }
    }
    let mut sz = vec![1usize; n];
    for &v in order.iter().rev() {
        if v != root {
            sz[parent[v]] += sz[v];
        }
    }
    sz
}

/// Size of the largest component of `T - v`.
pub fn anti_centrality(t: &GrowingTree, v: usize) -> usize {
    let sz = subtree_sizes(t, v);
    t.adjacency()
        .neighbors(v)
        .iter()
        .map(|&u| sz[u as usize])
        .max()
        .unwrap_or(0)
}

/// Anti-centrality of every vertex, by rerooting one subtree-size pass.
pub fn anti_centrality_all(t: &GrowingTree) -> Vec<usize> {
    let n = t.n();
    let sz = rooted_sizes(t);
    let parent = t.raw_parents();
    let mut largest_child = vec![0u32; n];
    for v in 0..n {
        let p = parent[v];
        if p != NO_PARENT {
            let slot = &mut largest_child[p as usize];
            *slot = (*slot).max(sz[v]);
        }
    }
    (0..n)
        .map(|v| (largest_child[v] as usize).max(n - sz[v] as usize))
        .collect()
}

pub fn centroid(t: &GrowingTree) -> CentroidResult {
    let psi_all = anti_centrality_all(t);
    let psi = psi_all.iter().copied().min().unwrap_or(0);
    let vertices: Vec<usize> = psi_all
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p == psi)
        .map(|(v, _)| v)
        .collect();
    debug_assert!(!vertices.is_empty() && vertices.len() <= 2);
    CentroidResult {
        canonical: vertices[0],
        vertices,
        psi,
    }
}

/// `|T'|^2 |T''|^2 / n^4` for the two sides of `edge`.
pub fn h_edge(t: &GrowingTree, edge: (usize, usize)) -> Result<f64, StatsError> {
    let (a, b) = edge;
    let n = t.n();
    if a >= n || b >= n {
        return Err(StatsError::NotAnEdge(a, b));
    }
    let child = if t.rooted_parent(a) == Some(b) {
        a
    } else if t.rooted_parent(b) == Some(a) {
        b
    } else {
        return Err(StatsError::NotAnEdge(a, b));
    };
    let sz = rooted_sizes(t);
    Ok(h_from_split(sz[child] as usize, n))
}

#[inline]
fn h_from_split(side: usize, n: usize) -> f64 {
    let prod = side as f64 * (n - side) as f64;
    let n2 = n as f64 * n as f64;
    (prod * prod) / (n2 * n2)
}

/// Balancedness `H(T)`: the sum of [`h_edge`] over all edges.
pub fn h_statistic(t: &GrowingTree) -> f64 {
    let n = t.n();
    let sz = rooted_sizes(t);
    let parent = t.raw_parents();
    (0..n)
        .filter(|&v| parent[v] != NO_PARENT)
        .map(|v| h_from_split(sz[v] as usize, n))
        .sum()
}

/// Pendent subtrees of the canonical centroid, largest first; equal sizes are
/// ordered by root index.
pub fn ranked_pendent_subtrees(t: &GrowingTree) -> Vec<RankedSubtree> {
    let n = t.n();
    if n < 2 {
        return Vec::new();
    }
    let c = centroid(t).canonical;
    let sz = rooted_sizes(t);
    let parent = t.raw_parents();
    let mut subtrees: Vec<(usize, usize)> = Vec::with_capacity(t.degree(c));
    if parent[c] != NO_PARENT {
        subtrees.push((parent[c] as usize, n - sz[c] as usize));
    }
    subtrees.extend(
        (0..n)
            .filter(|&v| parent[v] as usize == c)
            .map(|v| (v, sz[v] as usize)),
    );
    subtrees.sort_unstable_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    subtrees
        .into_iter()
        .enumerate()
        .map(|(i, (root, size))| RankedSubtree {
            rank: i + 1,
            root,
            size,
        })
        .collect()
}

/// Minimum anti-centrality normalised by `n`.
pub fn f_min_anticentrality(t: &GrowingTree) -> f64 {
    centroid(t).psi as f64 / t.n() as f64
}
