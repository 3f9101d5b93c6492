//! Cross-checks an [`Oracle`] against the brute-force reference.
//!
//! For each instance `(u, v, D)` the verifier checks that the query answer
//! equals the reference distance, that the replacement path has rank at most
//! `|D|`, that every damaged-on-both-sides vertex of that path splits it into
//! pieces of strictly smaller rank, and that every hitting set computed during
//! the query satisfies its contract. Reference paths, not the oracle's index,
//! decide which paths are damaged.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{FailureSet, Graph, Vertex};
use crate::hitset::sextic_bound;
use crate::length::CompositeLength;
use crate::query::{Oracle, QueryConfig};
use crate::reference::{rank_of_path, ReferenceApsp, ReferenceTree, ReplacementPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every ordered pair `u ≠ v` against every failure set of size ≤ d.
    Exhaustive,
    /// Uniformly drawn pairs `u ≠ v` and failure sets of size ≤ d.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub instances: u64,
    pub mismatches: u64,
    /// Replacement paths with rank above `|D|`.
    pub rank_violations: u64,
    /// Split vertices whose halves do not drop in rank.
    pub split_violations: u64,
    pub hitsets_checked: u64,
    /// Bounds below the true distance.
    pub unsound_bounds: u64,
    /// Neither exact bound nor a hit on the replacement path.
    pub missed_paths: u64,
    pub oversized_hitsets: u64,
    /// Hits with an intact path to one of the ends.
    pub bad_hits: u64,
    pub lookup_overruns: u64,
    pub max_hits: usize,
    pub max_lookups: u64,
    pub max_rank: usize,
    pub max_depth: usize,
    pub first_failure: Option<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    pub fn violations(&self) -> u64 {
        self.mismatches
            + self.rank_violations
            + self.split_violations
            + self.unsound_bounds
            + self.missed_paths
            + self.oversized_hitsets
            + self.bad_hits
            + self.lookup_overruns
    }

    fn fail(&mut self, what: impl FnOnce() -> String) {
        if self.first_failure.is_none() {
            self.first_failure = Some(what());
        }
    }

    /// Fold `other` (later instances) into `self`.
    fn merge(&mut self, other: VerifyReport) {
        self.instances += other.instances;
        self.mismatches += other.mismatches;
        self.rank_violations += other.rank_violations;
        self.split_violations += other.split_violations;
        self.hitsets_checked += other.hitsets_checked;
        self.unsound_bounds += other.unsound_bounds;
        self.missed_paths += other.missed_paths;
        self.oversized_hitsets += other.oversized_hitsets;
        self.bad_hits += other.bad_hits;
        self.lookup_overruns += other.lookup_overruns;
        self.max_hits = self.max_hits.max(other.max_hits);
        self.max_lookups = self.max_lookups.max(other.max_lookups);
        self.max_rank = self.max_rank.max(other.max_rank);
        self.max_depth = self.max_depth.max(other.max_depth);
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph: n={} m={} d={}", self.n, self.m, self.d)?;
        writeln!(f, "instances:          {}", self.instances)?;
        writeln!(f, "distance mismatches: {}", self.mismatches)?;
        writeln!(f, "rank > |D|:          {}", self.rank_violations)?;
        writeln!(f, "split rank failures: {}", self.split_violations)?;
        writeln!(f, "hitsets checked:     {}", self.hitsets_checked)?;
        writeln!(f, "  unsound bounds:    {}", self.unsound_bounds)?;
        writeln!(f, "  missed paths:      {}", self.missed_paths)?;
        writeln!(f, "  oversized:         {}", self.oversized_hitsets)?;
        writeln!(f, "  bad hits:          {}", self.bad_hits)?;
        writeln!(f, "lookup overruns:     {}", self.lookup_overruns)?;
        writeln!(
            f,
            "max |H|={} max lookups={} max rank={} max depth={}",
            self.max_hits, self.max_lookups, self.max_rank, self.max_depth
        )?;
        match &self.first_failure {
            Some(msg) => write!(f, "FAIL: {msg}"),
            None => write!(f, "PASS"),
        }
    }
}

/// Reference trees in `G − D`, computed on first use.
struct LazyReference<'a> {
    g: &'a Graph,
    weights: &'a [CompositeLength],
    removed: &'a FailureSet,
    trees: Vec<Option<ReferenceTree>>,
}

impl<'a> LazyReference<'a> {
    fn new(g: &'a Graph, weights: &'a [CompositeLength], removed: &'a FailureSet) -> Self {
        LazyReference {
            g,
            weights,
            removed,
            trees: vec![None; g.vertex_count()],
        }
    }

    fn tree(&mut self, s: Vertex) -> &ReferenceTree {
        let (g, w, r) = (self.g, self.weights, self.removed);
        self.trees[s].get_or_insert_with(|| ReferenceTree::new(g, w, r, s))
    }

    fn dist(&mut self, u: Vertex, v: Vertex) -> CompositeLength {
        self.tree(u).dist[v]
    }

    fn path(&mut self, u: Vertex, v: Vertex) -> Option<ReplacementPath> {
        self.tree(u).path_to(v)
    }
}

struct Checker<'a> {
    oracle: &'a Oracle,
    base: ReferenceApsp,
    bound: u64,
}

impl<'a> Checker<'a> {
    fn new(oracle: &'a Oracle) -> Self {
        let base = ReferenceApsp::new(oracle.graph(), oracle.weights(), &FailureSet::empty());
        Checker {
            oracle,
            base,
            bound: sextic_bound(oracle.budget()),
        }
    }

    /// Intact π(a, b) contains a failure, decided from reference paths.
    fn damaged(&self, a: Vertex, b: Vertex, d: &FailureSet) -> bool {
        self.base
            .path(a, b)
            .expect("base graph is connected")
            .edges
            .iter()
            .any(|&e| d.contains(e))
    }

    fn rank(&self, path: &ReplacementPath) -> usize {
        rank_of_path(path, self.oracle.weights(), |a, b| self.base.dist(a, b))
    }

    fn check(
        &self,
        reference: &mut LazyReference<'_>,
        d: &FailureSet,
        u: Vertex,
        v: Vertex,
        report: &mut VerifyReport,
    ) {
        let describe = |what: &str| format!("{what} at u={u} v={v} D={:?}", d.ids());
        report.instances += 1;
        let trace = self
            .oracle
            .query_traced(
                u,
                v,
                d,
                QueryConfig {
                    memoize: true,
                    record_hitsets: true,
                },
            )
            .expect("verifier only issues valid queries");
        let truth = reference.dist(u, v);
        if trace.length != truth {
            report.mismatches += 1;
            report.fail(|| describe(&format!("query {:?} != reference {:?}", trace.length, truth)));
        }
        report.max_lookups = report.max_lookups.max(trace.counters.lookups);
        report.max_depth = report.max_depth.max(trace.max_depth);
        if trace.counters.lookups > self.bound {
            report.lookup_overruns += 1;
            report.fail(|| describe(&format!("{} lookups exceed {}", trace.counters.lookups, self.bound)));
        }

        if let Some(path) = reference.path(u, v) {
            let rank = self.rank(&path);
            report.max_rank = report.max_rank.max(rank);
            if rank > d.len() {
                report.rank_violations += 1;
                report.fail(|| describe(&format!("rank {rank} > |D|")));
            }
            let last = path.vertices.len() - 1;
            for (i, &w) in path.vertices.iter().enumerate() {
                if !(self.damaged(u, w, d) && self.damaged(w, v, d)) {
                    continue;
                }
                let left = self.rank(&path.subpath(self.oracle.weights(), 0, i));
                let right = self.rank(&path.subpath(self.oracle.weights(), i, last));
                if rank == 0 || left > rank - 1 || right > rank - 1 {
                    report.split_violations += 1;
                    report.fail(|| describe(&format!("split at {w}: ranks {left}+{right} vs {rank}")));
                }
            }
        }

        for rec in &trace.hitsets {
            report.hitsets_checked += 1;
            report.max_hits = report.max_hits.max(rec.outcome.hits.len());
            let (a, b) = (rec.u, rec.v);
            let truth = reference.dist(a, b);
            if rec.outcome.bound < truth {
                report.unsound_bounds += 1;
                report.fail(|| describe(&format!("hitset ({a},{b}) bound below truth")));
            }
            if rec.outcome.bound != truth {
                let hit = reference
                    .path(a, b)
                    .is_some_and(|p| rec.outcome.hits.iter().any(|&h| p.contains(h)));
                if !hit {
                    report.missed_paths += 1;
                    report.fail(|| describe(&format!("hitset ({a},{b}) neither exact nor hitting")));
                }
            }
            if rec.outcome.hits.len() as u64 > self.bound {
                report.oversized_hitsets += 1;
                report.fail(|| describe(&format!("hitset ({a},{b}) has {} vertices", rec.outcome.hits.len())));
            }
            for &h in &rec.outcome.hits {
                if !(self.damaged(a, h, d) && self.damaged(h, b, d)) {
                    report.bad_hits += 1;
                    report.fail(|| describe(&format!("hitset ({a},{b}) member {h} has an intact side")));
                }
            }
        }
    }
}

fn check_set(checker: &Checker<'_>, d: &FailureSet, pairs: &[(Vertex, Vertex)]) -> VerifyReport {
    let oracle = checker.oracle;
    let mut reference = LazyReference::new(oracle.graph(), oracle.weights(), d);
    let mut report = VerifyReport::default();
    for &(u, v) in pairs {
        checker.check(&mut reference, d, u, v, &mut report);
    }
    report
}

/// Run every check over the instances selected by `mode`.
pub fn verify_instance(oracle: &Oracle, mode: VerifyMode) -> VerifyReport {
    let g = oracle.graph();
    let n = g.vertex_count();
    let catalog = oracle.tables().catalog();
    let checker = Checker::new(oracle);

    // Work units: one failure set with the pairs to query under it, in the
    // order the instances are defined.
    let units: Vec<(usize, Vec<(Vertex, Vertex)>)> = match mode {
        VerifyMode::Exhaustive => {
            let pairs: Vec<(Vertex, Vertex)> = (0..n)
                .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
                .collect();
            (0..catalog.len()).map(|i| (i, pairs.clone())).collect()
        }
        VerifyMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .filter(|_| n >= 2)
                .map(|_| {
                    let u = rng.gen_range(0..n);
                    let v = (u + rng.gen_range(1..n)) % n;
                    (rng.gen_range(0..catalog.len()), vec![(u, v)])
                })
                .collect()
        }
    };

    let run = |(set, pairs): &(usize, Vec<(Vertex, Vertex)>)| check_set(&checker, catalog.get(*set), pairs);

    #[cfg(feature = "parallel")]
    let partials: Vec<VerifyReport> = {
        use rayon::prelude::*;
        units.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<VerifyReport> = units.iter().map(run).collect();

    let mut report = VerifyReport {
        n,
        m: g.edge_count(),
        d: oracle.budget(),
        ..VerifyReport::default()
    };
    for p in partials {
        report.merge(p);
    }
    report
}
