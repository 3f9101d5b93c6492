//! Brute-force ground truth and checkers.
//!
//! Everything here is deliberately naive and shares no shortest-path code
//! with the oracle: distances come from an O(n²) array-scan Dijkstra run on
//! `G − D` directly.

use crate::graph::{EdgeId, FailureSet, Graph, Vertex};
use crate::length::CompositeLength;

/// Shortest-path tree of one source in `G − D`.
#[derive(Debug, Clone)]
pub struct ReferenceTree {
    pub source: Vertex,
    pub dist: Vec<CompositeLength>,
    parent: Vec<Option<(Vertex, EdgeId)>>,
}

impl ReferenceTree {
    pub fn new(g: &Graph, weights: &[CompositeLength], removed: &FailureSet, source: Vertex) -> Self {
        let n = g.vertex_count();
        let mut dist = vec![CompositeLength::UNREACHABLE; n];
        let mut parent = vec![None; n];
        let mut settled = vec![false; n];
        dist[source] = CompositeLength::ZERO;
        loop {
            let next = (0..n)
                .filter(|&x| !settled[x] && dist[x].is_finite())
                .min_by_key(|&x| dist[x]);
            let Some(x) = next else { break };
            settled[x] = true;
            for &(y, e) in g.neighbors(x) {
                if removed.contains(e) {
                    continue;
                }
                let cand = dist[x] + weights[e];
                if cand < dist[y] {
                    dist[y] = cand;
                    parent[y] = Some((x, e));
                }
            }
        }
        ReferenceTree { source, dist, parent }
    }

    /// Path from the source to `target`, or `None` if unreachable.
    pub fn path_to(&self, target: Vertex) -> Option<ReplacementPath> {
        if self.dist[target].is_unreachable() {
            return None;
        }
        let mut vertices = vec![target];
        let mut edges = Vec::new();
        let mut x = target;
        while let Some((p, e)) = self.parent[x] {
            vertices.push(p);
            edges.push(e);
            x = p;
        }
        vertices.reverse();
        edges.reverse();
        Some(ReplacementPath {
            vertices,
            edges,
            length: self.dist[target],
        })
    }
}

/// All-sources reference distances in `G − D`.
#[derive(Debug, Clone)]
pub struct ReferenceApsp {
    trees: Vec<ReferenceTree>,
}

impl ReferenceApsp {
    pub fn new(g: &Graph, weights: &[CompositeLength], removed: &FailureSet) -> Self {
        ReferenceApsp {
            trees: (0..g.vertex_count())
                .map(|s| ReferenceTree::new(g, weights, removed, s))
                .collect(),
        }
    }

    pub fn dist(&self, u: Vertex, v: Vertex) -> CompositeLength {
        self.trees[u].dist[v]
    }

    pub fn path(&self, u: Vertex, v: Vertex) -> Option<ReplacementPath> {
        self.trees[u].path_to(v)
    }
}

/// A `u`–`v` path given by its vertices and the edges between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementPath {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
    pub length: CompositeLength,
}

impl ReplacementPath {
    pub fn contains(&self, w: Vertex) -> bool {
        self.vertices.contains(&w)
    }

    /// Composite length of `vertices[i..=j]`.
    fn segment_len(&self, weights: &[CompositeLength], i: usize, j: usize) -> CompositeLength {
        self.edges[i..j]
            .iter()
            .fold(CompositeLength::ZERO, |acc, &e| acc + weights[e])
    }

    /// The piece between positions `i` and `j` (inclusive).
    pub fn subpath(&self, weights: &[CompositeLength], i: usize, j: usize) -> ReplacementPath {
        ReplacementPath {
            vertices: self.vertices[i..=j].to_vec(),
            edges: self.edges[i..j].to_vec(),
            length: self.segment_len(weights, i, j),
        }
    }
}

/// Composite distance from `u` to `v` in `G − D`.
pub fn dist_avoiding(
    g: &Graph,
    weights: &[CompositeLength],
    removed: &FailureSet,
    u: Vertex,
    v: Vertex,
) -> CompositeLength {
    ReferenceTree::new(g, weights, removed, u).dist[v]
}

/// The unique shortest `u`–`v` path in `G − D`, or `None` if there is none.
pub fn replacement_path(
    g: &Graph,
    weights: &[CompositeLength],
    removed: &FailureSet,
    u: Vertex,
    v: Vertex,
) -> Option<ReplacementPath> {
    ReferenceTree::new(g, weights, removed, u).path_to(v)
}

/// Smallest `k` such that `path` splits into at most `k + 1` shortest paths
/// of the intact graph joined by at most `k` single edges. `base_dist` gives
/// intact composite distances; under unique shortest paths, a segment is the
/// shortest path exactly when its length equals the distance of its ends.
pub fn rank_of_path(
    path: &ReplacementPath,
    weights: &[CompositeLength],
    base_dist: impl Fn(Vertex, Vertex) -> CompositeLength,
) -> usize {
    let k = path.vertices.len();
    // prefix[i]: composite length of vertices[0..=i]
    let mut prefix = Vec::with_capacity(k);
    prefix.push(CompositeLength::ZERO);
    for &e in &path.edges {
        let last = *prefix.last().unwrap();
        prefix.push(last + weights[e]);
    }
    let is_shortest = |i: usize, j: usize| -> bool {
        let (ti, ki) = prefix[i].raw_parts();
        let (tj, kj) = prefix[j].raw_parts();
        let seg = CompositeLength::from_raw_parts(tj - ti, kj - ki);
        seg == base_dist(path.vertices[i], path.vertices[j])
    };

    // best[i]: fewest joining edges for a decomposition of vertices[0..=i]
    // whose last segment ends at i.
    let mut best = vec![usize::MAX; k];
    for i in 0..k {
        if is_shortest(0, i) {
            best[i] = 0;
            continue;
        }
        for j in 0..i {
            // edge (j, j+1) joins; segment j+1..=i must be shortest
            if best[j] != usize::MAX && is_shortest(j + 1, i) {
                best[i] = best[i].min(best[j] + 1);
            }
        }
    }
    best[k - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;
    use crate::tiebreak::{assign_tiebreakers, composite_weights};

    fn weights(g: &Graph) -> Vec<CompositeLength> {
        composite_weights(g, &assign_tiebreakers(g, 1))
    }

    fn fs(g: &Graph, ids: &[EdgeId]) -> FailureSet {
        FailureSet::new(g, ids.iter().copied()).unwrap()
    }

    #[test]
    fn g1_distances() {
        let g = fixtures::g1();
        let w = weights(&g);
        assert_eq!(dist_avoiding(&g, &w, &fs(&g, &[1]), 0, 2).true_len(), Some(6));
        assert!(dist_avoiding(&g, &w, &fs(&g, &[1, 2]), 0, 2).is_unreachable());
        assert_eq!(dist_avoiding(&g, &w, &FailureSet::empty(), 0, 2).true_len(), Some(3));
    }

    #[test]
    fn replacement_paths() {
        let g = fixtures::g1();
        let w = weights(&g);
        let p = replacement_path(&g, &w, &fs(&g, &[1]), 0, 2).unwrap();
        assert_eq!(p.vertices, vec![0, 3, 2]);
        assert!(replacement_path(&g, &w, &fs(&g, &[1, 2]), 0, 2).is_none());

        let g6 = fixtures::g6();
        let w6 = weights(&g6);
        let p = replacement_path(&g6, &w6, &fs(&g6, &[2]), 0, 4).unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2, 6, 3, 4]);
        assert_eq!(p.length.true_len(), Some(7));
    }

    #[test]
    fn ranks() {
        let g = fixtures::g1();
        let w = weights(&g);
        let base = ReferenceApsp::new(&g, &w, &FailureSet::empty());
        let p = replacement_path(&g, &w, &fs(&g, &[1]), 0, 2).unwrap();
        assert_eq!(rank_of_path(&p, &w, |a, b| base.dist(a, b)), 1);
        for u in 0..4 {
            for v in 0..4 {
                let intact = base.path(u, v).unwrap();
                assert_eq!(rank_of_path(&intact, &w, |a, b| base.dist(a, b)), 0);
            }
        }

        let g6 = fixtures::g6();
        let w6 = weights(&g6);
        let base6 = ReferenceApsp::new(&g6, &w6, &FailureSet::empty());
        let p = replacement_path(&g6, &w6, &fs(&g6, &[2]), 0, 4).unwrap();
        // 0-1-2 shortest, edge 2-6, 6-3-4 shortest
        assert_eq!(rank_of_path(&p, &w6, |a, b| base6.dist(a, b)), 1);
    }

    #[test]
    fn intact_reference_matches_plain_dijkstra_lengths() {
        // Brute force over all simple paths on G6.
        let g = fixtures::g6();
        let w = weights(&g);
        let apsp = ReferenceApsp::new(&g, &w, &FailureSet::empty());
        fn walk(g: &Graph, x: Vertex, t: Vertex, seen: &mut Vec<bool>, len: u64, best: &mut u64) {
            if x == t {
                *best = (*best).min(len);
                return;
            }
            for &(y, e) in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    walk(g, y, t, seen, len + g.edge(e).weight, best);
                    seen[y] = false;
                }
            }
        }
        for s in 0..7 {
            for t in 0..7 {
                let mut seen = vec![false; 7];
                seen[s] = true;
                let mut best = u64::MAX;
                walk(&g, s, t, &mut seen, 0, &mut best);
                assert_eq!(apsp.dist(s, t).true_len(), Some(best));
            }
        }
    }
}
