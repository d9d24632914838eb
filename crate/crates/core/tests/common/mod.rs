#![allow(dead_code)]

use qwalk::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Connected graph: random spanning tree plus `extra` random edges, with
/// weights uniform in `[0.2, 3)` or all ones.
pub fn connected_graph(n: usize, extra: usize, weighted: bool, seed: u64) -> Graph {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut pairs = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        pairs.insert((u, v));
    }
    let max = n * (n - 1) / 2;
    let target = (pairs.len() + extra).min(max);
    while pairs.len() < target {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i != j {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    let edges: Vec<(usize, usize, f64)> = pairs
        .into_iter()
        .map(|(i, j)| (i, j, if weighted { rng.random_range(0.2..3.0) } else { 1.0 }))
        .collect();
    Graph::new(n, edges).unwrap()
}

pub fn max_abs(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}
