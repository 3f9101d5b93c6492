//! The oracle itself: preprocessing and the rank-bounded recursive query.
//!
//! `query(u, v, D)` evaluates `query_r(u, v, D, |D|)`, where
//!
//! * if π(u, v) avoids `D` the intact distance is returned;
//! * if the rank budget is exhausted the answer is unreachable;
//! * otherwise the hitting set `(L, H)` of `(u, v, D)` is computed and the
//!   answer is `min(L, min_{w ∈ H} query_r(u, w, r−1) + query_r(w, v, r−1))`.
//!
//! Replacement paths under `|D|` failures decompose into at most `|D| + 1`
//! intact shortest paths joined by single edges, which bounds the recursion.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{EdgeId, FailureSet, FailureSetError, Graph, GraphError, Vertex};
use crate::hitset::{HitSetCounters, HitSetEngine, HitSetOutcome};
use crate::index::{IndexError, ShortestPathIndex};
use crate::length::CompositeLength;
use crate::tables::{Execution, OracleTables, Progress, TableError};
use crate::tiebreak::{assign_tiebreakers, composite_weights, MAX_RESEEDS};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Tables(#[from] TableError),
    #[error("no tie-free seed found in {attempts} attempts starting from seed {seed}")]
    TieBreakExhausted { seed: u64, attempts: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("{failures} failures exceed the oracle budget of {budget}")]
    BudgetExceeded { failures: usize, budget: usize },
    #[error("vertex {vertex} out of range for {n} vertices")]
    BadVertex { vertex: Vertex, n: usize },
    #[error(transparent)]
    Failure(#[from] FailureSetError),
}

/// Exact distance in `G − D`, or unreachable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u64),
    Unreachable,
}

impl From<CompositeLength> for Distance {
    fn from(len: CompositeLength) -> Self {
        len.true_len().map_or(Distance::Unreachable, Distance::Finite)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(x) => write!(f, "{x}"),
            Distance::Unreachable => f.write_str("UNREACHABLE"),
        }
    }
}

#[derive(Clone, Copy, Default)]
pub struct BuildOptions<'a> {
    pub execution: Execution,
    pub progress: Option<Progress<'a>>,
}

/// A preprocessed oracle for one graph and failure budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Oracle {
    graph: Graph,
    seed: u64,
    ties: Vec<u64>,
    weights: Vec<CompositeLength>,
    index: ShortestPathIndex,
    tables: OracleTables,
}

impl Oracle {
    /// Preprocess `graph` for up to `d` failures. Tie keys start from `seed`
    /// and are re-drawn from `seed + 1, seed + 2, …` whenever some shortest
    /// path, in `G` or in any `G − D'` with `|D'| ≤ d`, turns out not to be
    /// unique.
    pub fn build(graph: Graph, d: usize, seed: u64, options: BuildOptions<'_>) -> Result<Self, OracleError> {
        if d == 0 {
            return Err(TableError::ZeroBudget.into());
        }
        for attempt in 0..=MAX_RESEEDS {
            let s = seed.wrapping_add(attempt);
            let ties = assign_tiebreakers(&graph, s);
            let weights = composite_weights(&graph, &ties);
            let index = match ShortestPathIndex::build(&graph, &weights) {
                Ok(ix) => ix,
                Err(IndexError::Tie { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            let tables = match OracleTables::build(&graph, &weights, &index, d, options.execution, options.progress) {
                Ok(t) => t,
                Err(TableError::Tie { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            return Ok(Oracle {
                graph,
                seed: s,
                ties,
                weights,
                index,
                tables,
            });
        }
        Err(OracleError::TieBreakExhausted {
            seed,
            attempts: MAX_RESEEDS + 1,
        })
    }

    /// Assemble from already-validated components (used when loading).
    pub fn from_components(
        graph: Graph,
        seed: u64,
        ties: Vec<u64>,
        index: ShortestPathIndex,
        tables: OracleTables,
    ) -> Self {
        let weights = composite_weights(&graph, &ties);
        Oracle {
            graph,
            seed,
            ties,
            weights,
            index,
            tables,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// The seed whose tie keys were accepted.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tie_keys(&self) -> &[u64] {
        &self.ties
    }

    pub fn weights(&self) -> &[CompositeLength] {
        &self.weights
    }

    pub fn index(&self) -> &ShortestPathIndex {
        &self.index
    }

    pub fn tables(&self) -> &OracleTables {
        &self.tables
    }

    pub fn budget(&self) -> usize {
        self.tables.budget()
    }

    fn check_vertex(&self, x: Vertex) -> Result<(), QueryError> {
        let n = self.graph.vertex_count();
        if x >= n {
            return Err(QueryError::BadVertex { vertex: x, n });
        }
        Ok(())
    }

    /// Validate and canonicalise a failure list against this oracle.
    pub fn failure_set(&self, ids: impl IntoIterator<Item = EdgeId>) -> Result<FailureSet, QueryError> {
        let d = FailureSet::new(&self.graph, ids)?;
        if d.len() > self.budget() {
            return Err(QueryError::BudgetExceeded {
                failures: d.len(),
                budget: self.budget(),
            });
        }
        Ok(d)
    }

    /// Exact `u`–`v` distance with the edges `failures` removed. Duplicate
    /// ids are ignored.
    pub fn query(&self, u: Vertex, v: Vertex, failures: &[EdgeId]) -> Result<Distance, QueryError> {
        let d = self.failure_set(failures.iter().copied())?;
        Ok(self.query_set(u, v, &d)?.into())
    }

    /// Composite answer for a canonical failure set.
    pub fn query_set(&self, u: Vertex, v: Vertex, d: &FailureSet) -> Result<CompositeLength, QueryError> {
        Ok(self.query_traced(u, v, d, QueryConfig::default())?.length)
    }

    pub fn query_traced(
        &self,
        u: Vertex,
        v: Vertex,
        d: &FailureSet,
        config: QueryConfig,
    ) -> Result<QueryTrace, QueryError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if d.len() > self.budget() {
            return Err(QueryError::BudgetExceeded {
                failures: d.len(),
                budget: self.budget(),
            });
        }
        if let Some(&bad) = d.ids().iter().find(|&&e| e >= self.graph.edge_count()) {
            return Err(FailureSetError::UnknownEdge(bad).into());
        }
        let mut run = QueryRun {
            index: &self.index,
            engine: HitSetEngine::new(&self.index, &self.tables, &self.weights, d),
            failures: d,
            memo: config.memoize.then(HashMap::new),
            records: config.record_hitsets.then(Vec::new),
            max_depth: 0,
            max_hits: 0,
        };
        let length = run.query_r(u, v, d.len(), 1);
        Ok(QueryTrace {
            length,
            counters: run.engine.counters,
            max_depth: run.max_depth,
            max_hits: run.max_hits,
            hitsets: run.records.unwrap_or_default(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryConfig {
    /// Cache `query_r` results on `(a, b, r)` within one query.
    pub memoize: bool,
    /// Keep every hitting-set outcome for later inspection.
    pub record_hitsets: bool,
}

impl Default for QueryConfig {
    fn default() -> Self {
        QueryConfig {
            memoize: true,
            record_hitsets: false,
        }
    }
}

/// One hitting-set evaluation made during a query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitSetRecord {
    pub u: Vertex,
    pub v: Vertex,
    pub outcome: HitSetOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryTrace {
    pub length: CompositeLength,
    pub counters: HitSetCounters,
    /// Deepest `query_r` frame, counting the top-level call as 1.
    pub max_depth: usize,
    pub max_hits: usize,
    pub hitsets: Vec<HitSetRecord>,
}

impl QueryTrace {
    pub fn distance(&self) -> Distance {
        self.length.into()
    }
}

struct QueryRun<'a> {
    index: &'a ShortestPathIndex,
    engine: HitSetEngine<'a>,
    failures: &'a FailureSet,
    memo: Option<HashMap<(Vertex, Vertex, usize), CompositeLength>>,
    records: Option<Vec<HitSetRecord>>,
    max_depth: usize,
    max_hits: usize,
}

impl QueryRun<'_> {
    fn query_r(&mut self, a: Vertex, b: Vertex, rank: usize, depth: usize) -> CompositeLength {
        self.max_depth = self.max_depth.max(depth);
        if !self.index.path_intersects(a, b, self.failures) {
            return self.index.dist(a, b);
        }
        if rank == 0 {
            return CompositeLength::UNREACHABLE;
        }
        if let Some(&hit) = self.memo.as_ref().and_then(|m| m.get(&(a, b, rank))) {
            return hit;
        }

        let outcome = self.engine.case_three(a, b);
        self.max_hits = self.max_hits.max(outcome.hits.len());
        let mut best = outcome.bound;
        for &w in &outcome.hits {
            let left = self.query_r(a, w, rank - 1, depth + 1);
            if left >= best {
                continue;
            }
            let right = self.query_r(w, b, rank - 1, depth + 1);
            best = best.min(left + right);
        }
        if let Some(records) = self.records.as_mut() {
            records.push(HitSetRecord { u: a, v: b, outcome });
        }
        if let Some(memo) = self.memo.as_mut() {
            memo.insert((a, b, rank), best);
        }
        best
    }
}
