//! Seeded per-edge tie-break values.
//!
//! Every edge gets an independent value drawn uniformly from `[1, 8·m·n²]`.
//! Path lengths then carry the sum of these values as a second,
//! lexicographically weaker component (see [`CompositeLength`]), which makes
//! all shortest paths unique with high probability while leaving the reported
//! distances untouched. Whether uniqueness actually holds is checked by the
//! shortest-path builders, which re-seed on a detected tie.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::length::CompositeLength;

/// Retries allowed after the initial seed before giving up.
pub const MAX_RESEEDS: u64 = 64;

/// Inclusive upper end of the tie-break range for `g`.
pub fn tie_range(g: &Graph) -> u64 {
    let n = g.vertex_count() as u64;
    let m = g.edge_count() as u64;
    (8 * m * n * n).max(1)
}

/// Pure function of `(g, seed)`.
pub fn assign_tiebreakers(g: &Graph, seed: u64) -> Vec<u64> {
    let hi = tie_range(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..g.edge_count()).map(|_| rng.gen_range(1..=hi)).collect()
}

/// Composite edge weights `(w(e), tie(e))` indexed by edge id.
pub fn composite_weights(g: &Graph, ties: &[u64]) -> Vec<CompositeLength> {
    assert_eq!(ties.len(), g.edge_count(), "one tie key per edge");
    g.edges()
        .iter()
        .zip(ties)
        .map(|(e, &t)| CompositeLength::new(e.weight, t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;

    #[test]
    fn values_in_range() {
        let g = fixtures::g1();
        let ties = assign_tiebreakers(&g, 1);
        assert_eq!(ties.len(), 4);
        assert!(ties.iter().all(|&t| (1..=8 * 4 * 16).contains(&t)));
    }

    #[test]
    fn deterministic_in_seed() {
        let g = fixtures::g6();
        assert_eq!(assign_tiebreakers(&g, 42), assign_tiebreakers(&g, 42));
        assert_ne!(assign_tiebreakers(&g, 42), assign_tiebreakers(&g, 43));
    }
}
