//! Precomputed worst-case failure sets.
//!
//! For every key `(u, v, u', v', b₁, b₂)` the tables store the failure set
//! `D⋆` with `|D⋆| ≤ d` that maximises the composite `u`–`v` distance in
//! `G − D⋆`, among the sets that leave π(u, u') and π(v', v) intact and, when
//! `b₁` (resp. `b₂`) is set, keep every failure endpoint out of `T_u(u')`
//! (resp. `T_v(v')`). The empty set satisfies every constraint, so every key
//! has an entry.
//!
//! Construction enumerates each candidate set once, computes all-pairs
//! distances in `G − D'`, and max-merges into every key whose constraint the
//! set satisfies. Ties in length go to the lexicographically smallest sorted
//! edge-id sequence, which makes the merge a total order and the output
//! independent of evaluation order.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{EdgeId, FailureSet, Graph, Vertex};
use crate::index::ShortestPathIndex;
use crate::length::CompositeLength;
use crate::sssp::dijkstra;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("failure budget must be at least 1")]
    ZeroBudget,
    #[error("table with {entries} entries does not fit in memory")]
    TooLarge { entries: u128 },
    #[error("shortest path from {root} to {vertex} is not unique after removing edges {failures:?}")]
    Tie {
        failures: Vec<EdgeId>,
        root: Vertex,
        vertex: Vertex,
    },
    #[error("table key {0:?} is out of range")]
    KeyOutOfRange(TableKey),
    #[error("inconsistent table data: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TableKey {
    pub u: Vertex,
    pub v: Vertex,
    pub u_helper: Vertex,
    pub v_helper: Vertex,
    /// Keep `T_u(u')` free of failure endpoints.
    pub guard_u_subtree: bool,
    /// Keep `T_v(v')` free of failure endpoints.
    pub guard_v_subtree: bool,
}

impl TableKey {
    pub fn new(u: Vertex, v: Vertex, u_helper: Vertex, v_helper: Vertex, b1: bool, b2: bool) -> Self {
        TableKey {
            u,
            v,
            u_helper,
            v_helper,
            guard_u_subtree: b1,
            guard_v_subtree: b2,
        }
    }

    /// The unconstrained key `(u, v, u, v, 0, 0)`.
    pub fn unconstrained(u: Vertex, v: Vertex) -> Self {
        TableKey::new(u, v, u, v, false, false)
    }

    fn slot(&self, n: usize) -> Option<usize> {
        if [self.u, self.v, self.u_helper, self.v_helper].iter().any(|&x| x >= n) {
            return None;
        }
        Some(
            ((((self.u * n + self.v) * n + self.u_helper) * n + self.v_helper) * 2 + self.guard_u_subtree as usize) * 2
                + self.guard_v_subtree as usize,
        )
    }

    /// Inverse of the slot layout; keys are ordered by
    /// `(u, v, u', v', b₁, b₂)`.
    pub fn from_slot(n: usize, mut slot: usize) -> Self {
        let b2 = slot % 2 == 1;
        slot /= 2;
        let b1 = slot % 2 == 1;
        slot /= 2;
        let v_helper = slot % n;
        slot /= n;
        let u_helper = slot % n;
        slot /= n;
        let v = slot % n;
        let u = slot / n;
        TableKey::new(u, v, u_helper, v_helper, b1, b2)
    }
}

/// Number of keys for `n` vertices.
pub fn entry_count(n: usize) -> u128 {
    4 * (n as u128).pow(4)
}

/// Whether the failure set `dp` respects the intactness constraints of `key`.
pub fn constraint_holds(index: &ShortestPathIndex, dp: &FailureSet, key: &TableKey) -> bool {
    constraint_from_parts(
        !index.path_intersects(key.u, key.u_helper, dp),
        !index.path_intersects(key.v, key.v_helper, dp),
        !index.subtree_touches(key.u, key.u_helper, dp),
        !index.subtree_touches(key.v, key.v_helper, dp),
        key.guard_u_subtree,
        key.guard_v_subtree,
    )
}

#[inline]
fn constraint_from_parts(
    u_path_intact: bool,
    v_path_intact: bool,
    u_subtree_intact: bool,
    v_subtree_intact: bool,
    b1: bool,
    b2: bool,
) -> bool {
    u_path_intact && v_path_intact && (!b1 || u_subtree_intact) && (!b2 || v_subtree_intact)
}

/// Every failure set of size at most `d` over `m` edges, in lexicographic
/// order of their sorted id sequences (so `∅` comes first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureCatalog {
    m: usize,
    d: usize,
    sets: Vec<FailureSet>,
}

impl FailureCatalog {
    pub fn new(m: usize, d: usize) -> Self {
        fn extend(m: usize, d: usize, cur: &mut Vec<EdgeId>, out: &mut Vec<FailureSet>) {
            out.push(FailureSet::from_sorted_unchecked(cur.clone()));
            if cur.len() == d {
                return;
            }
            let start = cur.last().map_or(0, |&x| x + 1);
            for e in start..m {
                cur.push(e);
                extend(m, d, cur, out);
                cur.pop();
            }
        }
        let mut sets = Vec::new();
        extend(m, d, &mut Vec::new(), &mut sets);
        FailureCatalog { m, d, sets }
    }

    pub fn sets(&self) -> &[FailureSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn get(&self, i: usize) -> &FailureSet {
        &self.sets[i]
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn budget(&self) -> usize {
        self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Slot {
    len: CompositeLength,
    set: u32,
}

impl Slot {
    const NONE: Slot = Slot {
        len: CompositeLength::ZERO,
        set: u32::MAX,
    };

    /// Longer wins; on equal length the earlier catalog index wins.
    #[inline]
    fn beats(&self, other: &Slot) -> bool {
        self.len > other.len || (self.len == other.len && self.set < other.set)
    }
}

/// A stored `(D⋆, L)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableEntry<'a> {
    pub d_star: &'a FailureSet,
    pub l_star: CompositeLength,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTables {
    n: usize,
    catalog: FailureCatalog,
    slots: Vec<Slot>,
}

/// How the failure-set enumeration is scheduled. Defaults to parallel when
/// the `parallel` feature is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

/// Called with `(sets done, total sets)` after each block of sets.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

const PROGRESS_BLOCK: usize = 256;

/// Per-failure-set scratch: distances in `G − D'` and the clean masks.
struct SetScan {
    n: usize,
    dist: Vec<CompositeLength>,
    path_intact: Vec<bool>,
    subtree_intact: Vec<bool>,
}

impl SetScan {
    fn new(n: usize) -> Self {
        SetScan {
            n,
            dist: vec![CompositeLength::UNREACHABLE; n * n],
            path_intact: vec![false; n * n],
            subtree_intact: vec![false; n * n],
        }
    }

    fn compute(
        &mut self,
        g: &Graph,
        weights: &[CompositeLength],
        index: &ShortestPathIndex,
        dp: &FailureSet,
    ) -> Result<(), TableError> {
        let n = self.n;
        let removed = dp.mask(g.edge_count());
        for r in 0..n {
            let t = dijkstra(g, weights, r, Some(&removed));
            if let Some(vertex) = t.tie_at {
                return Err(TableError::Tie {
                    failures: dp.ids().to_vec(),
                    root: r,
                    vertex,
                });
            }
            self.dist[r * n..(r + 1) * n].copy_from_slice(&t.dist);
            for x in 0..n {
                self.path_intact[r * n + x] = !index.path_intersects(r, x, dp);
                self.subtree_intact[r * n + x] = !index.subtree_touches(r, x, dp);
            }
        }
        Ok(())
    }

    fn merge_into(&self, set: u32, slots: &mut [Slot]) {
        let n = self.n;
        for u in 0..n {
            for v in 0..n {
                let cand = Slot {
                    len: self.dist[u * n + v],
                    set,
                };
                for uh in 0..n {
                    let iu = u * n + uh;
                    if !self.path_intact[iu] {
                        continue;
                    }
                    for vh in 0..n {
                        let iv = v * n + vh;
                        if !self.path_intact[iv] {
                            continue;
                        }
                        let base = (((u * n + v) * n + uh) * n + vh) * 4;
                        for b1 in [false, true] {
                            for b2 in [false, true] {
                                if !constraint_from_parts(
                                    true,
                                    true,
                                    self.subtree_intact[iu],
                                    self.subtree_intact[iv],
                                    b1,
                                    b2,
                                ) {
                                    continue;
                                }
                                let s = &mut slots[base + 2 * b1 as usize + b2 as usize];
                                if cand.beats(s) {
                                    *s = cand;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

impl OracleTables {
    /// Exhaustive construction over all failure sets of size ≤ `d`.
    pub fn build(
        g: &Graph,
        weights: &[CompositeLength],
        index: &ShortestPathIndex,
        d: usize,
        execution: Execution,
        progress: Option<Progress<'_>>,
    ) -> Result<Self, TableError> {
        if d == 0 {
            return Err(TableError::ZeroBudget);
        }
        let n = g.vertex_count();
        let entries = entry_count(n);
        let len = usize::try_from(entries)
            .ok()
            .filter(|&e| e.checked_mul(std::mem::size_of::<Slot>()).is_some())
            .ok_or(TableError::TooLarge { entries })?;
        let mut probe: Vec<Slot> = Vec::new();
        probe
            .try_reserve_exact(len)
            .map_err(|_| TableError::TooLarge { entries })?;
        drop(probe);

        let catalog = FailureCatalog::new(g.edge_count(), d);
        let total = catalog.len();
        let slots = match execution {
            Execution::Sequential => {
                let mut slots = vec![Slot::NONE; len];
                let mut scan = SetScan::new(n);
                for (i, dp) in catalog.sets().iter().enumerate() {
                    scan.compute(g, weights, index, dp)?;
                    scan.merge_into(i as u32, &mut slots);
                    if let Some(report) = progress {
                        if (i + 1) % PROGRESS_BLOCK == 0 || i + 1 == total {
                            report(i + 1, total);
                        }
                    }
                }
                slots
            }
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                use std::sync::atomic::{AtomicUsize, Ordering};

                let done = AtomicUsize::new(0);
                catalog
                    .sets()
                    .par_iter()
                    .enumerate()
                    .try_fold(
                        || (vec![Slot::NONE; len], SetScan::new(n)),
                        |(mut slots, mut scan), (i, dp)| {
                            scan.compute(g, weights, index, dp)?;
                            scan.merge_into(i as u32, &mut slots);
                            let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                            if let Some(report) = progress {
                                if finished.is_multiple_of(PROGRESS_BLOCK) || finished == total {
                                    report(finished, total);
                                }
                            }
                            Ok((slots, scan))
                        },
                    )
                    .map(|r| r.map(|(slots, _)| slots))
                    .try_reduce(
                        || vec![Slot::NONE; len],
                        |mut a, b| {
                            for (x, y) in a.iter_mut().zip(b) {
                                if y.beats(x) {
                                    *x = y;
                                }
                            }
                            Ok(a)
                        },
                    )?
            }
        };
        debug_assert!(slots.iter().all(|s| s.set != u32::MAX));
        Ok(OracleTables { n, catalog, slots })
    }

    /// Reassemble from stored entries in key order.
    pub fn from_entries(
        n: usize,
        m: usize,
        d: usize,
        entries: impl IntoIterator<Item = (FailureSet, CompositeLength)>,
    ) -> Result<Self, TableError> {
        let catalog = FailureCatalog::new(m, d);
        let position: HashMap<&FailureSet, u32> =
            catalog.sets().iter().enumerate().map(|(i, s)| (s, i as u32)).collect();
        let expected = entry_count(n);
        let mut slots = Vec::new();
        for (set, len) in entries {
            let &set = position.get(&set).ok_or_else(|| {
                TableError::Inconsistent(format!("failure set {:?} is not a valid candidate", set.ids()))
            })?;
            slots.push(Slot { len, set });
        }
        if slots.len() as u128 != expected {
            return Err(TableError::Inconsistent(format!(
                "{} entries, expected {expected}",
                slots.len()
            )));
        }
        Ok(OracleTables { n, catalog, slots })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn budget(&self) -> usize {
        self.catalog.budget()
    }

    pub fn catalog(&self) -> &FailureCatalog {
        &self.catalog
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Constant-time table access.
    #[inline]
    pub fn lookup(&self, key: &TableKey) -> Result<TableEntry<'_>, TableError> {
        let slot = key.slot(self.n).ok_or(TableError::KeyOutOfRange(*key))?;
        Ok(self.entry_at(slot))
    }

    #[inline]
    fn entry_at(&self, slot: usize) -> TableEntry<'_> {
        let s = self.slots[slot];
        TableEntry {
            d_star: self.catalog.get(s.set as usize),
            l_star: s.len,
        }
    }

    /// All entries in key order.
    pub fn entries(&self) -> impl Iterator<Item = (TableKey, TableEntry<'_>)> + '_ {
        (0..self.slots.len()).map(move |i| (TableKey::from_slot(self.n, i), self.entry_at(i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;
    use crate::tiebreak::{assign_tiebreakers, composite_weights};

    struct Fixture {
        g: Graph,
        w: Vec<CompositeLength>,
        ix: ShortestPathIndex,
    }

    fn fixture(g: Graph) -> Fixture {
        let w = composite_weights(&g, &assign_tiebreakers(&g, 1));
        let ix = ShortestPathIndex::build(&g, &w).unwrap();
        Fixture { g, w, ix }
    }

    fn tables(f: &Fixture, d: usize) -> OracleTables {
        OracleTables::build(&f.g, &f.w, &f.ix, d, Execution::Sequential, None).unwrap()
    }

    fn fs(g: &Graph, ids: &[EdgeId]) -> FailureSet {
        FailureSet::new(g, ids.iter().copied()).unwrap()
    }

    #[test]
    fn catalog_order_and_size() {
        let c = FailureCatalog::new(4, 2);
        let ids: Vec<&[EdgeId]> = c.sets().iter().map(|s| s.ids()).collect();
        assert_eq!(ids[..4], [&[][..], &[0], &[0, 1], &[0, 2]]);
        assert_eq!(c.len(), 1 + 4 + 6);
        assert!(c.sets().windows(2).all(|w| w[0].ids() < w[1].ids()));
        assert_eq!(FailureCatalog::new(4, 5).len(), 16);
    }

    #[test]
    fn key_slot_round_trip() {
        let n = 5;
        for slot in 0..entry_count(n) as usize {
            assert_eq!(TableKey::from_slot(n, slot).slot(n), Some(slot));
        }
        assert_eq!(TableKey::new(5, 0, 0, 0, false, false).slot(5), None);
    }

    #[test]
    fn constraint_examples() {
        let f = fixture(fixtures::g1());
        let k = TableKey::new(0, 2, 1, 2, false, false);
        assert!(constraint_holds(&f.ix, &FailureSet::empty(), &k));
        assert!(!constraint_holds(&f.ix, &fs(&f.g, &[0]), &k));
        let k = TableKey::new(0, 2, 1, 2, true, false);
        assert!(!constraint_holds(&f.ix, &fs(&f.g, &[3]), &k));
    }

    #[test]
    fn g1_single_failure_entries() {
        let f = fixture(fixtures::g1());
        let t = tables(&f, 1);
        assert_eq!(t.len(), 1024);

        let e = t.lookup(&TableKey::new(0, 2, 0, 2, false, false)).unwrap();
        assert_eq!(e.d_star.ids(), &[0]);
        assert_eq!(e.l_star.true_len(), Some(6));

        let e = t.lookup(&TableKey::new(0, 2, 1, 2, false, false)).unwrap();
        assert_eq!(e.d_star.ids(), &[1]);
        assert_eq!(e.l_star.true_len(), Some(6));

        let e = t.lookup(&TableKey::new(0, 2, 1, 3, true, true)).unwrap();
        assert!(e.d_star.is_empty());
        assert_eq!(e.l_star.true_len(), Some(3));
    }

    #[test]
    fn g6_guarded_entry() {
        let f = fixture(fixtures::g6());
        let t = tables(&f, 1);
        assert_eq!(t.len(), 9604);
        // {k1} and {k2} both stretch 0→4 to true length 7; the tie keys pick
        // between the two (different) detours.
        let e = t.lookup(&TableKey::new(0, 4, 5, 6, true, true)).unwrap();
        assert!(e.d_star.ids() == [1] || e.d_star.ids() == [2]);
        assert_eq!(e.l_star.true_len(), Some(7));
    }

    #[test]
    fn lookup_rejects_out_of_range() {
        let f = fixture(fixtures::g1());
        let t = tables(&f, 1);
        let bad = TableKey::new(0, 4, 0, 0, false, false);
        assert_eq!(t.lookup(&bad), Err(TableError::KeyOutOfRange(bad)));
    }

    #[test]
    fn zero_budget_rejected() {
        let f = fixture(fixtures::g1());
        assert_eq!(
            OracleTables::build(&f.g, &f.w, &f.ix, 0, Execution::Sequential, None),
            Err(TableError::ZeroBudget)
        );
    }

    #[test]
    fn budget_above_edge_count_covers_everything() {
        let f = fixture(fixtures::g1());
        let t = tables(&f, 5);
        assert_eq!(t.catalog().len(), 16);
        // {e0, e1, e2} is the first set in lexicographic order that isolates 2.
        let e = t.lookup(&TableKey::unconstrained(0, 2)).unwrap();
        assert!(e.l_star.is_unreachable());
        assert_eq!(e.d_star.ids(), &[0, 1, 2]);
    }

    #[test]
    fn relaxing_guards_never_shortens() {
        let f = fixture(fixtures::g6());
        let t = tables(&f, 2);
        let n = 7;
        for slot in 0..t.len() {
            let k = TableKey::from_slot(n, slot);
            let here = t.lookup(&k).unwrap().l_star;
            if k.guard_u_subtree {
                let relaxed = TableKey {
                    guard_u_subtree: false,
                    ..k
                };
                assert!(t.lookup(&relaxed).unwrap().l_star >= here);
            }
            if k.guard_v_subtree {
                let relaxed = TableKey {
                    guard_v_subtree: false,
                    ..k
                };
                assert!(t.lookup(&relaxed).unwrap().l_star >= here);
            }
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential() {
        let f = fixture(fixtures::g6());
        let seq = tables(&f, 2);
        let par = OracleTables::build(&f.g, &f.w, &f.ix, 2, Execution::Parallel, None).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn progress_reaches_total() {
        use std::sync::Mutex;
        let f = fixture(fixtures::g6());
        let seen = Mutex::new(Vec::new());
        let report = |done: usize, total: usize| seen.lock().unwrap().push((done, total));
        OracleTables::build(&f.g, &f.w, &f.ix, 2, Execution::Sequential, Some(&report)).unwrap();
        let seen = seen.into_inner().unwrap();
        assert_eq!(seen.last(), Some(&(37, 37)));
    }
}
