//! Small bundled networks used by the tests, the guide and the CLI.

use num_complex::Complex64;

use crate::graph::{parse_edge_list, Graph};
use crate::spectral::{CMatrix, Hamiltonian};

const KARATE: &str = include_str!("../fixtures/karate.edgelist");

/// Zachary's karate club, unweighted (34 nodes, 78 edges).
pub fn karate() -> Graph {
    parse_edge_list(KARATE).expect("bundled fixture parses").graph
}

/// Two disjoint unit triangles `{0,1,2}` and `{3,4,5}`.
pub fn two_triangles() -> Graph {
    Graph::unweighted(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).expect("valid fixture")
}

/// Hopping phases on the four bridges of the six-node toy model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToyPhases {
    /// No bridges: two disjoint triangles.
    Disconnected,
    /// All bridges `+1`.
    Coherent,
    /// Bridges `(1,3), (1,4)` are `+1`, `(2,3), (2,4)` are `-1`: paths from
    /// node 0 to node 5 interfere destructively.
    Canceling,
    /// Bridge phases `e^{iφ}` with `φ` uniform on `[0, 2π)`.
    Random(u64),
}

/// Bridges between the two triangles of the toy model.
pub const TOY_BRIDGES: [(usize, usize); 4] = [(1, 3), (1, 4), (2, 3), (2, 4)];

/// Six-node toy Hamiltonian: unit hopping inside the triangles `{0,1,2}` and
/// `{3,4,5}`, zero on-site energies, and unit-magnitude bridges with the
/// chosen phases. Nodes 0 and 5 are the two nodes not touching a bridge.
pub fn six_node_toy(phases: ToyPhases) -> Hamiltonian {
    let mut m = CMatrix::zeros(6, 6);
    let mut set = |i: usize, j: usize, z: Complex64| {
        m[(i, j)] = z;
        m[(j, i)] = z.conj();
    };
    for (i, j) in [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)] {
        set(i, j, Complex64::new(1.0, 0.0));
    }
    let bridge: [Complex64; 4] = match phases {
        ToyPhases::Disconnected => [Complex64::new(0.0, 0.0); 4],
        ToyPhases::Coherent => [Complex64::new(1.0, 0.0); 4],
        ToyPhases::Canceling => {
            let (p, q) = (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0));
            [p, p, q, q]
        }
        ToyPhases::Random(seed) => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            std::array::from_fn(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        }
    };
    for (&(i, j), z) in TOY_BRIDGES.iter().zip(bridge) {
        set(i, j, z);
    }
    Hamiltonian::new(m).expect("toy Hamiltonian is Hermitian")
}

/// Looks up a bundled fixture by name: `karate`, `two-triangles`,
/// `toy-disconnected`, `toy-coherent`, `toy-canceling`, `toy-random`.
pub fn hamiltonian_by_name(name: &str) -> Option<Hamiltonian> {
    Some(match name {
        "toy-disconnected" => six_node_toy(ToyPhases::Disconnected),
        "toy-coherent" => six_node_toy(ToyPhases::Coherent),
        "toy-canceling" => six_node_toy(ToyPhases::Canceling),
        "toy-random" => six_node_toy(ToyPhases::Random(0)),
        _ => return None,
    })
}

/// Graph fixtures by name: `karate`, `two-triangles`.
pub fn graph_by_name(name: &str) -> Option<Graph> {
    match name {
        "karate" => Some(karate()),
        "two-triangles" => Some(two_triangles()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn karate_counts() {
        let g = karate();
        assert_eq!(g.n(), 34);
        assert_eq!(g.edge_count(), 78);
        assert!(g.edges().iter().all(|e| e.weight == 1.0));
        assert!(g.is_connected());
    }

    #[test]
    fn toy_variants_share_magnitudes() {
        let base = six_node_toy(ToyPhases::Coherent);
        for p in [ToyPhases::Canceling, ToyPhases::Random(3)] {
            let h = six_node_toy(p);
            for i in 0..6 {
                for j in 0..6 {
                    assert!((h.get(i, j).norm() - base.get(i, j).norm()).abs() < 1e-15);
                }
            }
        }
        let d = six_node_toy(ToyPhases::Disconnected);
        assert!(TOY_BRIDGES.iter().all(|&(i, j)| d.get(i, j).norm() == 0.0));
    }
}
