//! Exact distance oracle for undirected weighted graphs under up to `d` edge
//! failures.
//!
//! Preprocessing enumerates every failure set of size at most `d` and stores,
//! for every `(u, v, u', v', b₁, b₂)`, the set that stretches the `u`–`v`
//! distance the most subject to intactness constraints around the helper
//! vertices `u'` and `v'`. A query `(u, v, D)` then recurses over hitting
//! vertices whose both sides are damaged, using only table lookups and
//! constant-time tree predicates, and returns the exact distance in `G − D`.
//!
//! ```
//! use ftdo::{fixtures, BuildOptions, Distance, Oracle};
//!
//! let oracle = Oracle::build(fixtures::g1(), 2, 1, BuildOptions::default()).unwrap();
//! assert_eq!(oracle.query(0, 2, &[1]).unwrap(), Distance::Finite(6));
//! assert_eq!(oracle.query(0, 2, &[1, 2]).unwrap(), Distance::Unreachable);
//! ```

pub mod generate;
pub mod graph;
pub mod hitset;
pub mod index;
pub mod length;
pub mod persist;
pub mod query;
pub mod reference;
mod sssp;
pub mod tables;
pub mod tiebreak;
pub mod verify;

pub use graph::{fixtures, Edge, EdgeId, FailureSet, FailureSetError, Graph, GraphError, Vertex};
pub use hitset::{HitSetEngine, HitSetOutcome, InducedKeyTree};
pub use index::ShortestPathIndex;
pub use length::CompositeLength;
pub use query::{BuildOptions, Distance, Oracle, OracleError, QueryConfig, QueryError, QueryTrace};
pub use tables::{constraint_holds, Execution, OracleTables, TableEntry, TableKey};
pub use verify::{verify_instance, VerifyMode, VerifyReport};
