//! Single-source shortest paths under composite lengths, with detection of
//! non-unique shortest paths.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{EdgeId, Graph, Vertex};
use crate::length::CompositeLength;

pub(crate) const NO_VERTEX: u32 = u32::MAX;

/// Result of one run. `parent[source]` and `parent[unreached]` are `None`.
#[derive(Debug, Clone)]
pub(crate) struct SourceTree {
    pub dist: Vec<CompositeLength>,
    pub parent: Vec<Option<(Vertex, EdgeId)>>,
    /// A vertex with two distinct optimal predecessors, if any.
    pub tie_at: Option<Vertex>,
}

/// Dijkstra from `source` on `g` minus the edges flagged in `removed`.
pub(crate) fn dijkstra(g: &Graph, weights: &[CompositeLength], source: Vertex, removed: Option<&[bool]>) -> SourceTree {
    let n = g.vertex_count();
    let mut dist = vec![CompositeLength::UNREACHABLE; n];
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = CompositeLength::ZERO;
    heap.push(Reverse((CompositeLength::ZERO, source)));

    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(y, id) in g.neighbors(x) {
            if removed.is_some_and(|r| r[id]) {
                continue;
            }
            let cand = d + weights[id];
            if cand < dist[y] {
                dist[y] = cand;
                parent[y] = Some((x, id));
                heap.push(Reverse((cand, y)));
            }
        }
    }

    let tie_at = find_tie(g, weights, &dist, removed);
    SourceTree { dist, parent, tie_at }
}

/// A vertex `v` with two distinct neighbours `x ≠ y` such that both
/// `dist(x) + w(x,v)` and `dist(y) + w(y,v)` equal `dist(v)`.
fn find_tie(
    g: &Graph,
    weights: &[CompositeLength],
    dist: &[CompositeLength],
    removed: Option<&[bool]>,
) -> Option<Vertex> {
    (0..g.vertex_count()).find(|&v| {
        if dist[v].is_unreachable() || dist[v] == CompositeLength::ZERO {
            return false;
        }
        g.neighbors(v)
            .iter()
            .filter(|&&(x, id)| !removed.is_some_and(|r| r[id]) && dist[x] + weights[id] == dist[v])
            .nth(1)
            .is_some()
    })
}
