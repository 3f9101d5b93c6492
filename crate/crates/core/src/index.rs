//! All-roots shortest-path trees.
//!
//! For every root `r` the index keeps the tree `T_r` of unique shortest paths
//! (parent, parent edge, depth), an Euler-tour interval per vertex, and a
//! binary-lifting table for LCA. Ancestor tests are O(1) interval checks;
//! the failure-set predicates built on them cost O(|D|).

use thiserror::Error;

use crate::graph::{EdgeId, FailureSet, Graph, Vertex};
use crate::length::CompositeLength;
use crate::sssp::{dijkstra, NO_VERTEX};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndexError {
    #[error("shortest path from {root} to {vertex} is not unique")]
    Tie { root: Vertex, vertex: Vertex },
    #[error("inconsistent index data: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestPathIndex {
    n: usize,
    ends: Vec<(Vertex, Vertex)>,
    dist: Vec<CompositeLength>,
    parent: Vec<u32>,
    parent_edge: Vec<u32>,
    depth: Vec<u32>,
    tin: Vec<u32>,
    tout: Vec<u32>,
    // derived: vertex at each Euler position, and 2^k-th ancestors
    order: Vec<u32>,
    lift: Vec<u32>,
    levels: usize,
}

/// Raw per-root arrays, flattened as `root * n + vertex`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexParts {
    pub dist: Vec<CompositeLength>,
    pub parent: Vec<u32>,
    pub parent_edge: Vec<u32>,
    pub depth: Vec<u32>,
    pub tin: Vec<u32>,
    pub tout: Vec<u32>,
}

struct RootTree {
    dist: Vec<CompositeLength>,
    parent: Vec<u32>,
    parent_edge: Vec<u32>,
}

impl ShortestPathIndex {
    /// One composite Dijkstra per root. Fails on the first root whose tree is
    /// not unique, which is the signal to re-seed the tie keys.
    pub fn build(g: &Graph, weights: &[CompositeLength]) -> Result<Self, IndexError> {
        let n = g.vertex_count();
        let run = |r: Vertex| -> Result<RootTree, IndexError> {
            let t = dijkstra(g, weights, r, None);
            if let Some(vertex) = t.tie_at {
                return Err(IndexError::Tie { root: r, vertex });
            }
            let mut parent = vec![NO_VERTEX; n];
            let mut parent_edge = vec![NO_VERTEX; n];
            for (v, p) in t.parent.iter().enumerate() {
                if let Some((x, e)) = *p {
                    parent[v] = x as u32;
                    parent_edge[v] = e as u32;
                }
            }
            Ok(RootTree {
                dist: t.dist,
                parent,
                parent_edge,
            })
        };

        #[cfg(feature = "parallel")]
        let trees: Vec<Result<RootTree, IndexError>> = {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(run).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let trees: Vec<Result<RootTree, IndexError>> = (0..n).map(run).collect();

        let mut dist = Vec::with_capacity(n * n);
        let mut parent = Vec::with_capacity(n * n);
        let mut parent_edge = Vec::with_capacity(n * n);
        for t in trees {
            let t = t?;
            dist.extend(t.dist);
            parent.extend(t.parent);
            parent_edge.extend(t.parent_edge);
        }
        let ends = g.edges().iter().map(|e| (e.a, e.b)).collect();
        Ok(Self::assemble(n, ends, dist, parent, parent_edge))
    }

    fn assemble(
        n: usize,
        ends: Vec<(Vertex, Vertex)>,
        dist: Vec<CompositeLength>,
        parent: Vec<u32>,
        parent_edge: Vec<u32>,
    ) -> Self {
        let levels = (usize::BITS - n.leading_zeros()).max(1) as usize;
        let mut depth = vec![0u32; n * n];
        let mut tin = vec![0u32; n * n];
        let mut tout = vec![0u32; n * n];
        let mut order = vec![0u32; n * n];
        let mut lift = vec![NO_VERTEX; levels * n * n];

        let mut children: Vec<Vec<Vertex>> = vec![Vec::new(); n];
        for r in 0..n {
            let base = r * n;
            for list in &mut children {
                list.clear();
            }
            for v in 0..n {
                let p = parent[base + v];
                if p != NO_VERTEX {
                    children[p as usize].push(v);
                }
            }
            // Iterative DFS, children visited in ascending id order.
            let mut clock = 0u32;
            let mut stack: Vec<(Vertex, usize)> = vec![(r, 0)];
            tin[base + r] = 0;
            order[base] = r as u32;
            clock += 1;
            while let Some(&mut (x, ref mut next)) = stack.last_mut() {
                if let Some(&c) = children[x].get(*next) {
                    *next += 1;
                    depth[base + c] = depth[base + x] + 1;
                    tin[base + c] = clock;
                    order[base + clock as usize] = c as u32;
                    clock += 1;
                    stack.push((c, 0));
                } else {
                    tout[base + x] = clock - 1;
                    stack.pop();
                }
            }

            lift[base..base + n].copy_from_slice(&parent[base..base + n]);
            for k in 1..levels {
                for v in 0..n {
                    let mid = lift[(k - 1) * n * n + base + v];
                    lift[k * n * n + base + v] = if mid == NO_VERTEX {
                        NO_VERTEX
                    } else {
                        lift[(k - 1) * n * n + base + mid as usize]
                    };
                }
            }
        }

        ShortestPathIndex {
            n,
            ends,
            dist,
            parent,
            parent_edge,
            depth,
            tin,
            tout,
            order,
            lift,
            levels,
        }
    }

    /// Rebuild from persisted arrays, checking that the stored depths and
    /// intervals are the ones the parent arrays imply.
    pub fn from_parts(g: &Graph, parts: IndexParts) -> Result<Self, IndexError> {
        let n = g.vertex_count();
        let nn = n * n;
        for (name, len) in [
            ("dist", parts.dist.len()),
            ("parent", parts.parent.len()),
            ("parent_edge", parts.parent_edge.len()),
            ("depth", parts.depth.len()),
            ("tin", parts.tin.len()),
            ("tout", parts.tout.len()),
        ] {
            if len != nn {
                return Err(IndexError::Inconsistent(format!(
                    "{name} has {len} entries, expected {nn}"
                )));
            }
        }
        for r in 0..n {
            for v in 0..n {
                let (p, e) = (parts.parent[r * n + v], parts.parent_edge[r * n + v]);
                let ok = if v == r {
                    p == NO_VERTEX && e == NO_VERTEX
                } else {
                    (p as usize) < n
                        && (e as usize) < g.edge_count()
                        && g.edge_between(p as usize, v) == Some(e as usize)
                };
                if !ok {
                    return Err(IndexError::Inconsistent(format!(
                        "bad parent of {v} in tree rooted at {r}"
                    )));
                }
            }
        }
        let ends = g.edges().iter().map(|e| (e.a, e.b)).collect();
        let index = Self::assemble(n, ends, parts.dist, parts.parent, parts.parent_edge);
        if index.depth != parts.depth || index.tin != parts.tin || index.tout != parts.tout {
            return Err(IndexError::Inconsistent(
                "stored depths or intervals disagree with parent arrays".into(),
            ));
        }
        Ok(index)
    }

    pub fn to_parts(&self) -> IndexParts {
        IndexParts {
            dist: self.dist.clone(),
            parent: self.parent.clone(),
            parent_edge: self.parent_edge.clone(),
            depth: self.depth.clone(),
            tin: self.tin.clone(),
            tout: self.tout.clone(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    fn at(&self, r: Vertex, v: Vertex) -> usize {
        r * self.n + v
    }

    /// Composite distance in the intact graph.
    #[inline]
    pub fn dist(&self, u: Vertex, v: Vertex) -> CompositeLength {
        self.dist[self.at(u, v)]
    }

    pub fn parent(&self, r: Vertex, v: Vertex) -> Option<Vertex> {
        let p = self.parent[self.at(r, v)];
        (p != NO_VERTEX).then_some(p as Vertex)
    }

    pub fn parent_edge(&self, r: Vertex, v: Vertex) -> Option<EdgeId> {
        let e = self.parent_edge[self.at(r, v)];
        (e != NO_VERTEX).then_some(e as EdgeId)
    }

    pub fn depth(&self, r: Vertex, v: Vertex) -> usize {
        self.depth[self.at(r, v)] as usize
    }

    /// Euler-tour interval `[in, out]` of `v` in `T_r`.
    pub fn interval(&self, r: Vertex, v: Vertex) -> (usize, usize) {
        let i = self.at(r, v);
        (self.tin[i] as usize, self.tout[i] as usize)
    }

    /// Vertices of `T_r` in Euler (preorder) order.
    pub fn preorder(&self, r: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.order[r * self.n..(r + 1) * self.n].iter().map(|&v| v as Vertex)
    }

    /// `x` lies on π(r, y). Reflexive.
    #[inline]
    pub fn is_ancestor(&self, r: Vertex, x: Vertex, y: Vertex) -> bool {
        let (ix, iy) = (self.at(r, x), self.at(r, y));
        self.tin[ix] <= self.tin[iy] && self.tin[iy] <= self.tout[ix]
    }

    /// Lowest common ancestor of `x` and `y` in `T_r`, by binary lifting.
    pub fn lca(&self, r: Vertex, mut x: Vertex, mut y: Vertex) -> Vertex {
        if self.is_ancestor(r, x, y) {
            return x;
        }
        if self.is_ancestor(r, y, x) {
            return y;
        }
        if self.depth(r, x) < self.depth(r, y) {
            std::mem::swap(&mut x, &mut y);
        }
        let nn = self.n * self.n;
        for k in (0..self.levels).rev() {
            let up = self.lift[k * nn + self.at(r, x)];
            if up != NO_VERTEX && !self.is_ancestor(r, up as Vertex, y) {
                x = up as Vertex;
            }
        }
        self.parent(r, x).expect("non-root vertex below the LCA")
    }

    /// If edge `e` belongs to `T_r`, its child-side endpoint.
    #[inline]
    pub fn tree_child(&self, r: Vertex, e: EdgeId) -> Option<Vertex> {
        let (a, b) = self.ends[e];
        if self.parent_edge[self.at(r, b)] == e as u32 {
            Some(b)
        } else if self.parent_edge[self.at(r, a)] == e as u32 {
            Some(a)
        } else {
            None
        }
    }

    pub fn edge_ends(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.ends[e]
    }

    /// Some edge of `d` lies on π(u, x).
    #[inline]
    pub fn path_intersects(&self, u: Vertex, x: Vertex, d: &FailureSet) -> bool {
        d.ids()
            .iter()
            .any(|&e| self.tree_child(u, e).is_some_and(|child| self.is_ancestor(u, child, x)))
    }

    /// Some endpoint of an edge of `d` lies in the subtree `T_r(w)`.
    #[inline]
    pub fn subtree_touches(&self, r: Vertex, w: Vertex, d: &FailureSet) -> bool {
        d.ids().iter().any(|&e| {
            let (a, b) = self.ends[e];
            self.is_ancestor(r, w, a) || self.is_ancestor(r, w, b)
        })
    }

    /// `w` is clean with respect to root `r`: π(r, w) avoids `d` and no
    /// failure endpoint lies in `T_r(w)`. Covers both u-clean (`r = u`) and
    /// v-clean (`r = v`).
    #[inline]
    pub fn is_clean(&self, r: Vertex, w: Vertex, d: &FailureSet) -> bool {
        !self.path_intersects(r, w, d) && !self.subtree_touches(r, w, d)
    }

    /// π(r, v) as a vertex sequence from `r` to `v`.
    pub fn tree_path(&self, r: Vertex, v: Vertex) -> Vec<Vertex> {
        let mut path = vec![v];
        let mut x = v;
        while let Some(p) = self.parent(r, x) {
            path.push(p);
            x = p;
        }
        path.reverse();
        path
    }

    /// Edge ids of π(r, v), in order from `r`.
    pub fn tree_path_edges(&self, r: Vertex, v: Vertex) -> Vec<EdgeId> {
        let mut edges = Vec::new();
        let mut x = v;
        while let (Some(p), Some(e)) = (self.parent(r, x), self.parent_edge(r, x)) {
            edges.push(e);
            x = p;
        }
        edges.reverse();
        edges
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;
    use crate::tiebreak::{assign_tiebreakers, composite_weights};

    fn index_of(g: &Graph) -> ShortestPathIndex {
        let w = composite_weights(g, &assign_tiebreakers(g, 1));
        ShortestPathIndex::build(g, &w).unwrap()
    }

    fn fs(g: &Graph, ids: &[EdgeId]) -> FailureSet {
        FailureSet::new(g, ids.iter().copied()).unwrap()
    }

    #[test]
    fn g1_trees() {
        let g = fixtures::g1();
        let ix = index_of(&g);
        assert_eq!(ix.parent(0, 1), Some(0));
        assert_eq!(ix.parent(0, 2), Some(1));
        assert_eq!(ix.parent(0, 3), Some(2));
        assert_eq!(ix.parent(0, 0), None);
        assert_eq!(ix.dist(0, 3).true_len(), Some(4));
        assert_eq!(ix.dist(0, 2).true_len(), Some(3));
        assert_eq!(ix.tree_path(0, 3), vec![0, 1, 2, 3]);
    }

    #[test]
    fn g6_trees() {
        let g = fixtures::g6();
        let ix = index_of(&g);
        assert_eq!(ix.parent(0, 5), Some(1));
        assert_eq!(ix.parent(0, 6), Some(3));
        assert_eq!(ix.dist(0, 6).true_len(), Some(4));
    }

    #[test]
    fn ancestors_and_lca() {
        let g1 = fixtures::g1();
        let ix = index_of(&g1);
        assert!(ix.is_ancestor(0, 1, 3));
        assert!(!ix.is_ancestor(0, 3, 1));
        for r in 0..4 {
            for x in 0..4 {
                assert!(ix.is_ancestor(r, x, x));
                assert_eq!(ix.lca(r, x, x), x);
            }
        }
        assert_eq!(ix.lca(0, 2, 3), 2);

        let g6 = fixtures::g6();
        let ix6 = index_of(&g6);
        assert_eq!(ix6.lca(0, 5, 4), 1);
        assert_eq!(ix6.lca(0, 6, 4), 3);
        assert_eq!(ix6.lca(0, 5, 6), 1);
    }

    #[test]
    fn failure_predicates() {
        let g1 = fixtures::g1();
        let ix = index_of(&g1);
        assert!(ix.path_intersects(0, 3, &fs(&g1, &[1])));
        assert!(!ix.path_intersects(0, 1, &fs(&g1, &[1])));
        for u in 0..4 {
            assert!(!ix.path_intersects(u, u, &fs(&g1, &[0, 1, 2, 3])));
            assert!(ix.subtree_touches(u, u, &fs(&g1, &[2])));
        }
        assert!(!ix.subtree_touches(0, 3, &fs(&g1, &[0])));
        assert!(ix.subtree_touches(0, 1, &fs(&g1, &[2])));

        let g3 = fixtures::g3();
        let ix3 = index_of(&g3);
        assert!(ix3.is_clean(0, 1, &fs(&g3, &[2])));

        let g6 = fixtures::g6();
        let ix6 = index_of(&g6);
        assert!(ix6.is_clean(0, 5, &fs(&g6, &[2])));
        assert!(!ix6.is_clean(0, 1, &fs(&g6, &[2])));
    }

    #[test]
    fn path_intersects_matches_parent_walk() {
        for g in [fixtures::g1(), fixtures::g3(), fixtures::g6()] {
            let ix = index_of(&g);
            let m = g.edge_count();
            for mask in 0u32..(1 << m) {
                let d = fs(&g, &(0..m).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>());
                for u in 0..g.vertex_count() {
                    for x in 0..g.vertex_count() {
                        let walked = ix.tree_path_edges(u, x).iter().any(|&e| d.contains(e));
                        assert_eq!(ix.path_intersects(u, x, &d), walked, "u={u} x={x} D={d:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn subpath_property_and_symmetry() {
        let g = fixtures::g6();
        let ix = index_of(&g);
        let n = g.vertex_count();
        for u in 0..n {
            for v in 0..n {
                assert_eq!(ix.dist(u, v), ix.dist(v, u));
                for w in 0..n {
                    if ix.is_ancestor(u, w, v) {
                        assert_eq!(ix.dist(u, v), ix.dist(u, w) + ix.dist(w, v));
                    }
                }
            }
        }
    }

    #[test]
    fn parts_round_trip() {
        let g = fixtures::g6();
        let ix = index_of(&g);
        let back = ShortestPathIndex::from_parts(&g, ix.to_parts()).unwrap();
        assert_eq!(back, ix);
        let mut bad = ix.to_parts();
        bad.tin.swap(0, 1);
        assert!(ShortestPathIndex::from_parts(&g, bad).is_err());
    }
}
