mod common;

use common::{connected_graph, max_abs};
use proptest::prelude::*;
use qwalk::walk::{
    avg_density, avg_transfer_matrix, classical_generator, energy_gap_bound, entropy_bound, longtime_distribution,
    quantumness, quantumness_uniform_degree_form, stationary_classical, transfer_matrix, uniform_energy, walk_report,
    Horizon, InitialState,
};
use qwalk::{Graph, SpectralDecomposition};

fn dec(g: &Graph) -> SpectralDecomposition {
    SpectralDecomposition::of(&qwalk::walk::quantum_generator(g).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laplacian_rows_sum_to_zero(n in 2usize..30, extra in 0usize..40, seed: u64) {
        let g = connected_graph(n, extra, true, seed);
        let l = g.laplacian();
        let dmax = g.degrees().into_iter().fold(0.0, f64::max);
        for row in l.row_iter() {
            prop_assert!(row.sum().abs() <= 1e-12 * dmax);
        }
        let hc = classical_generator(&g).unwrap();
        for col in hc.column_iter() {
            prop_assert!(col.sum().abs() <= 1e-12);
        }
    }

    #[test]
    fn spectral_and_degree_forms_agree(n in 3usize..30, extra in 0usize..40, seed: u64) {
        let g = connected_graph(n, extra, true, seed);
        let d = dec(&g);
        let u = InitialState::UniformSuperposition;
        let eps = quantumness(&d, &u).unwrap();
        prop_assert!((eps - quantumness_uniform_degree_form(&g).unwrap()).abs() <= 1e-10);
        prop_assert!(eps <= (n as f64 - 2.0) / n as f64 + 1e-12);
        let eg = energy_gap_bound(&d, &u).unwrap();
        prop_assert!((eg.energy - uniform_energy(&g).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn report_identity_and_bounds(n in 3usize..30, extra in 0usize..40, seed: u64) {
        let g = connected_graph(n, extra, true, seed);
        let r = walk_report(&g, &InitialState::UniformSuperposition).unwrap();
        if let Some(qc) = &r.quantum_correction {
            for i in 0..n {
                let rhs = (1.0 - r.epsilon) * r.p_classical[i] + r.epsilon * qc[i];
                prop_assert!((r.p_quantum[i] - rhs).abs() <= 1e-8);
            }
        }
        prop_assert!(r.epsilon <= r.energy / r.gap + 1e-9);
        prop_assert!(r.epsilon <= r.entropy_bound + 1e-9);
        prop_assert!((r.p_quantum.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unit_weights_below_star_maximum(n in 3usize..30, extra in 0usize..40, seed: u64) {
        let g = connected_graph(n, extra, false, seed);
        let eps = quantumness_uniform_degree_form(&g).unwrap();
        let nf = n as f64;
        prop_assert!(eps <= 0.5 - (nf - 1.0).sqrt() / nf + 1e-12);
    }

    #[test]
    fn averaged_diagonal_is_longtime_distribution(n in 2usize..25, extra in 0usize..30, seed: u64, node in 0usize..25) {
        let g = connected_graph(n, extra, true, seed);
        let d = dec(&g);
        for s in [InitialState::UniformSuperposition, InitialState::Localized(node % n)] {
            let p = longtime_distribution(&d, &s).unwrap();
            let rho = avg_density(&d, &s, Horizon::Infinite).unwrap();
            for i in 0..n {
                prop_assert!((rho.matrix()[(i, i)].re - p[i]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn transfer_matrices_doubly_stochastic(n in 2usize..25, extra in 0usize..30, seed: u64, t in 0.0f64..40.0) {
        let g = connected_graph(n, extra, true, seed);
        let d = dec(&g);
        for (m, tol) in [
            (transfer_matrix(&d, t), 1e-9),
            (avg_transfer_matrix(&d, Horizon::Finite(t)).unwrap(), 1e-8),
            (avg_transfer_matrix(&d, Horizon::Infinite).unwrap(), 1e-8),
        ] {
            for i in 0..n {
                prop_assert!((m.row(i).sum() - 1.0).abs() <= tol);
                prop_assert!((m.column(i).sum() - 1.0).abs() <= tol);
            }
            prop_assert!(m.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)));
        }
    }

    #[test]
    fn weight_scaling(n in 3usize..20, extra in 0usize..30, seed: u64, c in 0.1f64..10.0, t in 0.0f64..20.0) {
        let g = connected_graph(n, extra, true, seed);
        let w: Vec<f64> = g.edges().iter().map(|e| e.weight * c).collect();
        let gc = g.with_weights(&w).unwrap();
        let (p, pc) = (stationary_classical(&g).unwrap(), stationary_classical(&gc).unwrap());
        for i in 0..n {
            prop_assert!((p[i] - pc[i]).abs() <= 1e-12);
        }
        prop_assert!((quantumness_uniform_degree_form(&g).unwrap() - quantumness_uniform_degree_form(&gc).unwrap()).abs() <= 1e-12);
        // H = A scales with c: eigenvalues by c and R̄_{cH}(t) = R̄_H(ct)
        let h = qwalk::Hamiltonian::from_adjacency(&g);
        let hc = h.scaled(c);
        let (d1, d2) = (SpectralDecomposition::of(&h).unwrap(), SpectralDecomposition::of(&hc).unwrap());
        for (a, b) in d1.eigenvalues().iter().zip(d2.eigenvalues()) {
            prop_assert!((a * c - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
        let r1 = avg_transfer_matrix(&d1, Horizon::Finite(c * t)).unwrap();
        let r2 = avg_transfer_matrix(&d2, Horizon::Finite(t)).unwrap();
        prop_assert!(max_abs(&(r1 - r2)) <= 1e-8);
    }

    #[test]
    fn entropy_bound_holds(n in 3usize..40, extra in 0usize..60, seed: u64) {
        let g = connected_graph(n, extra, true, seed);
        prop_assert!(quantumness_uniform_degree_form(&g).unwrap() <= entropy_bound(&g).unwrap() + 1e-9);
    }
}

#[test]
fn star_closed_form() {
    for n in [5usize, 10, 100] {
        let g = Graph::unweighted(n, (1..n).map(|i| (0, i))).unwrap();
        let eps = quantumness(&dec(&g), &InitialState::UniformSuperposition).unwrap();
        let nf = n as f64;
        assert!((eps - (0.5 - (nf - 1.0).sqrt() / nf)).abs() <= 1e-12, "n={n}");
    }
}
