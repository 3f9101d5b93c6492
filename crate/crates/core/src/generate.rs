//! Seeded random connected graphs: a random spanning tree plus uniformly
//! chosen extra edges.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Edge, Graph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("need at least one vertex")]
    NoVertices,
    #[error("{m} edges cannot connect {n} vertices")]
    TooFewEdges { n: usize, m: usize },
    #[error("{m} edges exceed the {max} possible in a simple graph on {n} vertices")]
    TooManyEdges { n: usize, m: usize, max: usize },
    #[error("maximum weight must be at least 1")]
    ZeroWeight,
}

/// Connected simple graph with `n` vertices, `m` edges and weights uniform
/// in `[1, wmax]`, deterministic in `seed`.
pub fn gnm_connected(n: usize, m: usize, wmax: u64, seed: u64) -> Result<Graph, GenerateError> {
    if n == 0 {
        return Err(GenerateError::NoVertices);
    }
    if wmax == 0 {
        return Err(GenerateError::ZeroWeight);
    }
    let max = n * (n - 1) / 2;
    if m > max {
        return Err(GenerateError::TooManyEdges { n, m, max });
    }
    if m + 1 < n {
        return Err(GenerateError::TooFewEdges { n, m });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut present = vec![false; n * n];
    let mut pairs = Vec::with_capacity(m);
    for i in 1..n {
        let (a, b) = (order[i], order[rng.gen_range(0..i)]);
        present[a * n + b] = true;
        present[b * n + a] = true;
        pairs.push((a, b));
    }
    let mut spare: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !present[a * n + b])
        .collect();
    spare.shuffle(&mut rng);
    pairs.extend(spare.into_iter().take(m - (n - 1)));

    let edges = pairs
        .into_iter()
        .map(|(a, b)| Edge::new(a, b, rng.gen_range(1..=wmax)))
        .collect();
    Ok(Graph::new(n, edges).expect("generator only emits valid graphs"))
}
