//! The hitting-set procedure behind each query step.
//!
//! Given `(u, v, D)` it returns an upper bound `L` on the composite distance
//! in `G − D` and a vertex set `H` such that either `L` is exact or the
//! replacement path passes through some vertex of `H`, and every `w ∈ H` has
//! failures on both π(u, w) and π(w, v).
//!
//! The general case ([`HitSetEngine::case_three`]) enumerates pairs of edges
//! of the contracted key trees on both sides, reduces to the one-helper case
//! ([`HitSetEngine::case_two`]) for every clean helper it discovers, which in
//! turn reduces to the two-helper case ([`HitSetEngine::case_one`]). Every
//! table lookup is guarded: its key's constraint is satisfied by `D` itself,
//! so each stored length is a sound upper bound.

use crate::graph::{EdgeId, FailureSet, Vertex};
use crate::index::ShortestPathIndex;
use crate::length::CompositeLength;
use crate::tables::{constraint_holds, OracleTables, TableEntry, TableKey};

/// Default constant in the `|H| ≤ C·d⁶ + slack` bound.
pub const HIT_BOUND_FACTOR: u64 = 16;
pub const HIT_BOUND_SLACK: u64 = 16;

/// `C·d⁶ + slack`, the bound used for both `|H|` and per-query lookups.
pub fn sextic_bound(d: usize) -> u64 {
    HIT_BOUND_FACTOR * (d as u64).pow(6) + HIT_BOUND_SLACK
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitSetOutcome {
    pub bound: CompositeLength,
    /// Sorted, duplicate-free.
    pub hits: Vec<Vertex>,
}

impl HitSetOutcome {
    fn empty() -> Self {
        HitSetOutcome {
            bound: CompositeLength::UNREACHABLE,
            hits: Vec::new(),
        }
    }

    fn absorb(&mut self, other: HitSetOutcome) {
        self.bound = self.bound.min(other.bound);
        self.hits.extend(other.hits);
    }

    fn finish(mut self) -> Self {
        self.hits.sort_unstable();
        self.hits.dedup();
        self
    }
}

/// Parent end of a key-tree edge: the auxiliary root above `T_r`, or a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KeyParent {
    AuxRoot,
    Vertex(Vertex),
}

/// The subtree of `T_root` spanned by the failure endpoints and an auxiliary
/// root above `root`, contracted onto its key vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedKeyTree {
    pub root: Vertex,
    /// Key vertices other than the auxiliary root, in Euler order of `T_root`.
    pub key_vertices: Vec<Vertex>,
    /// `(parent, child)`; `child` is a real vertex and the edge stands for the
    /// tree path from `parent` down to `child`.
    pub edges: Vec<(KeyParent, Vertex)>,
}

impl InducedKeyTree {
    /// Built from the failure endpoints sorted in Euler order plus the LCAs
    /// of Euler-consecutive pairs. Each key vertex hangs from its nearest key
    /// ancestor, or from the auxiliary root if it has none.
    pub fn build(index: &ShortestPathIndex, root: Vertex, endpoints: &[Vertex]) -> Self {
        let by_euler = |vs: &mut Vec<Vertex>| {
            vs.sort_unstable_by_key(|&x| index.interval(root, x).0);
            vs.dedup();
        };
        let mut keys: Vec<Vertex> = endpoints.to_vec();
        by_euler(&mut keys);
        let lcas: Vec<Vertex> = keys.windows(2).map(|w| index.lca(root, w[0], w[1])).collect();
        keys.extend(lcas);
        by_euler(&mut keys);

        let mut edges = Vec::with_capacity(keys.len());
        let mut stack: Vec<Vertex> = Vec::new();
        for &x in &keys {
            while stack.last().is_some_and(|&top| !index.is_ancestor(root, top, x)) {
                stack.pop();
            }
            let parent = stack.last().map_or(KeyParent::AuxRoot, |&p| KeyParent::Vertex(p));
            edges.push((parent, x));
            stack.push(x);
        }
        InducedKeyTree {
            root,
            key_vertices: keys,
            edges,
        }
    }

    /// Edges of the uncontracted induced tree as `(parent, child)` vertex
    /// pairs of `T_root`, excluding the auxiliary edge above `root`.
    pub fn induced_edges(&self, index: &ShortestPathIndex) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for &(parent, child) in &self.edges {
            let stop = match parent {
                KeyParent::AuxRoot => None,
                KeyParent::Vertex(p) => Some(p),
            };
            let mut x = child;
            while Some(x) != stop {
                match index.parent(self.root, x) {
                    Some(p) => {
                        out.push((p, x));
                        x = p;
                    }
                    None => break,
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Which helper a [`HitSetEngine::case_two`] call already knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// The known helper is a v-clean `v'`; candidates `u'` are searched in `T_u`.
    Forward,
    /// The known helper is a u-clean `u'`; candidates `v'` are searched in `T_v`.
    Mirrored,
}

/// Per-engine counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HitSetCounters {
    pub lookups: u64,
    pub case_one_calls: u64,
    pub case_two_calls: u64,
    pub case_three_calls: u64,
}

/// HitSet evaluation for one failure set `D`.
pub struct HitSetEngine<'a> {
    index: &'a ShortestPathIndex,
    tables: &'a OracleTables,
    weights: &'a [CompositeLength],
    failures: &'a FailureSet,
    endpoints: Vec<Vertex>,
    pub counters: HitSetCounters,
}

impl<'a> HitSetEngine<'a> {
    pub fn new(
        index: &'a ShortestPathIndex,
        tables: &'a OracleTables,
        weights: &'a [CompositeLength],
        failures: &'a FailureSet,
    ) -> Self {
        let mut endpoints: Vec<Vertex> = failures
            .ids()
            .iter()
            .flat_map(|&e| {
                let (a, b) = index.edge_ends(e);
                [a, b]
            })
            .collect();
        endpoints.sort_unstable();
        endpoints.dedup();
        HitSetEngine {
            index,
            tables,
            weights,
            failures,
            endpoints,
            counters: HitSetCounters::default(),
        }
    }

    /// π(a, b) contains a failure. Paths are unique, so the tree of either
    /// endpoint gives the same answer; `a` is used as the root.
    #[inline]
    fn hit(&self, a: Vertex, b: Vertex) -> bool {
        self.index.path_intersects(a, b, self.failures)
    }

    #[inline]
    fn touches(&self, r: Vertex, w: Vertex) -> bool {
        self.index.subtree_touches(r, w, self.failures)
    }

    fn lookup(&mut self, key: TableKey) -> TableEntry<'a> {
        debug_assert!(
            constraint_holds(self.index, self.failures, &key),
            "unguarded lookup {key:?} for failures {:?}",
            self.failures.ids()
        );
        self.counters.lookups += 1;
        self.tables.lookup(&key).expect("key built from valid vertices")
    }

    /// Insert `w` only if both π(u, w) and π(w, v) contain failures.
    fn add_hit(&self, out: &mut HitSetOutcome, u: Vertex, v: Vertex, w: Vertex) {
        if self.hit(u, w) && self.hit(v, w) {
            out.hits.push(w);
        }
    }

    fn fresh_edges(&self, d_star: &FailureSet) -> impl Iterator<Item = (EdgeId, Vertex, Vertex)> + '_ {
        let failures = self.failures;
        let index = self.index;
        d_star
            .ids()
            .to_vec()
            .into_iter()
            .filter(move |&e| !failures.contains(e))
            .map(move |e| {
                let (x, y) = index.edge_ends(e);
                (e, x, y)
            })
    }

    pub fn key_tree(&self, root: Vertex) -> InducedKeyTree {
        InducedKeyTree::build(self.index, root, &self.endpoints)
    }

    /// Both helpers known: `u'` is u-clean and `v'` is v-clean.
    ///
    /// Panics if either helper is not clean.
    pub fn case_one(&mut self, u: Vertex, v: Vertex, u_helper: Vertex, v_helper: Vertex) -> HitSetOutcome {
        assert!(
            self.index.is_clean(u, u_helper, self.failures),
            "{u_helper} is not {u}-clean"
        );
        assert!(
            self.index.is_clean(v, v_helper, self.failures),
            "{v_helper} is not {v}-clean"
        );
        self.counters.case_one_calls += 1;
        let entry = self.lookup(TableKey::new(u, v, u_helper, v_helper, true, true));
        let mut out = HitSetOutcome {
            bound: entry.l_star,
            hits: Vec::new(),
        };
        for &e in entry.d_star.ids() {
            let (x, y) = self.index.edge_ends(e);
            self.add_hit(&mut out, u, v, x);
            self.add_hit(&mut out, u, v, y);
        }
        out.finish()
    }

    /// One helper known. `Forward`: `helper` is a v-clean `v'` and the
    /// missing u-side helper is searched in `T_u`. `Mirrored`: `helper` is a
    /// u-clean `u'` and the v-side is searched in `T_v`.
    ///
    /// Panics if `helper` is not clean on its side.
    pub fn case_two(&mut self, u: Vertex, v: Vertex, helper: Vertex, direction: Direction) -> HitSetOutcome {
        // `near` is the side being searched, `far` the side already pinned.
        let (near, far) = match direction {
            Direction::Forward => (u, v),
            Direction::Mirrored => (v, u),
        };
        assert!(
            self.index.is_clean(far, helper, self.failures),
            "{helper} is not {far}-clean"
        );
        self.counters.case_two_calls += 1;

        let mut out = HitSetOutcome::empty();
        let mut helpers: Vec<Vertex> = Vec::new();
        let tree = self.key_tree(near);
        for &(_, c) in &tree.edges {
            // Failures on π(near, c) rule this edge out for the last induced
            // edge of the replacement path.
            if self.hit(near, c) {
                continue;
            }
            let key = match direction {
                Direction::Forward => TableKey::new(u, v, c, helper, false, true),
                Direction::Mirrored => TableKey::new(u, v, helper, c, true, false),
            };
            let entry = self.lookup(key);
            out.bound = out.bound.min(entry.l_star);
            for (e, x, y) in self.fresh_edges(entry.d_star) {
                // (i) an endpoint with an intact path to the pinned side
                if !self.hit(far, x) || !self.hit(far, y) {
                    continue;
                }
                // (ii), (iii)
                if self.hit(near, x) {
                    self.add_hit(&mut out, u, v, x);
                    continue;
                }
                if self.hit(near, y) {
                    self.add_hit(&mut out, u, v, y);
                    continue;
                }
                // (iv) non-tree edges are never needed
                let Some(child) = self.index.tree_child(near, e) else {
                    continue;
                };
                // (v) clean child becomes a helper; (vi) otherwise discard
                if !self.touches(near, child) {
                    helpers.push(child);
                }
            }
        }

        helpers.sort_unstable();
        helpers.dedup();
        for h in helpers {
            let sub = match direction {
                Direction::Forward => self.case_one(u, v, h, helper),
                Direction::Mirrored => self.case_one(u, v, helper, h),
            };
            out.absorb(sub);
        }
        out.finish()
    }

    /// No helper known. Requires `D` to hit π(u, v).
    pub fn case_three(&mut self, u: Vertex, v: Vertex) -> HitSetOutcome {
        debug_assert!(self.hit(u, v), "case three needs a damaged π({u}, {v})");
        self.counters.case_three_calls += 1;

        let mut out = HitSetOutcome::empty();
        let mut u_helpers: Vec<Vertex> = Vec::new();
        let mut v_helpers: Vec<Vertex> = Vec::new();
        let u_tree = self.key_tree(u);
        let v_tree = self.key_tree(v);

        for &(_, cu) in &u_tree.edges {
            if self.hit(u, cu) {
                continue;
            }
            for &(_, cv) in &v_tree.edges {
                if self.hit(v, cv) {
                    continue;
                }
                let entry = self.lookup(TableKey::new(u, v, cu, cv, false, false));
                out.bound = out.bound.min(entry.l_star);
                for (e, a, b) in self.fresh_edges(entry.d_star) {
                    // Both traversal orders: x first, then y.
                    for (x, y) in [(a, b), (b, a)] {
                        let ux = self.hit(u, x);
                        let yv = self.hit(v, y);
                        match (ux, yv) {
                            // (i) intact on both sides: the detour is a real walk
                            (false, false) => {
                                let walk = self.index.dist(u, x) + self.weights[e] + self.index.dist(y, v);
                                out.bound = out.bound.min(walk);
                            }
                            // (ii)
                            (true, true) => {
                                if self.hit(v, x) {
                                    self.add_hit(&mut out, u, v, x);
                                }
                            }
                            // (iii) u-side intact up to x
                            (false, true) => match self.index.tree_child(u, e) {
                                None => {
                                    if self.hit(u, y) {
                                        self.add_hit(&mut out, u, v, y);
                                    }
                                }
                                Some(child) => {
                                    if child == y && !self.touches(u, y) {
                                        u_helpers.push(y);
                                    }
                                }
                            },
                            // (iv) mirror image of (iii) in T_v
                            (true, false) => match self.index.tree_child(v, e) {
                                None => {
                                    if self.hit(v, x) {
                                        self.add_hit(&mut out, u, v, x);
                                    }
                                }
                                Some(child) => {
                                    if child == x && !self.touches(v, x) {
                                        v_helpers.push(x);
                                    }
                                }
                            },
                        }
                    }
                }
            }
        }

        v_helpers.sort_unstable();
        v_helpers.dedup();
        u_helpers.sort_unstable();
        u_helpers.dedup();
        for vh in v_helpers {
            let sub = self.case_two(u, v, vh, Direction::Forward);
            out.absorb(sub);
        }
        for uh in u_helpers {
            let sub = self.case_two(u, v, uh, Direction::Mirrored);
            out.absorb(sub);
        }
        out.finish()
    }
}
