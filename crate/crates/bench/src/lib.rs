//! Shared fixtures for the benchmark suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use tradenet_core::WeightedNetwork;

/// Seeded Erdős–Rényi network with uniform random weights in [0.5, 2).
pub fn seeded_er(n: usize, p: f64, seed: u64) -> WeightedNetwork {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, 0.5 + 1.5 * rng.random::<f64>()));
            }
        }
    }
    WeightedNetwork::build(n, &edges).expect("generated edges are canonical")
}
