mod common;

use common::connected_graph;
use proptest::prelude::*;
use qwalk::metrics::{renyi_entropy, shannon_entropy};
use qwalk::walk::quantumness_uniform_degree_form;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn renyi_non_increasing(w in prop::collection::vec(0.0f64..1.0, 1..30)) {
        let total: f64 = w.iter().sum();
        prop_assume!(total > 0.0);
        let p: Vec<f64> = w.iter().map(|x| x / total).collect();
        let qs = [0.0, 0.25, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0, 50.0, 1e6, f64::INFINITY];
        let h: Vec<f64> = qs.iter().map(|&q| renyi_entropy(&p, q).unwrap()).collect();
        for k in 1..h.len() {
            prop_assert!(h[k] <= h[k - 1] + 1e-12, "q={} -> {} > {}", qs[k], h[k], h[k - 1]);
        }
        prop_assert!((h[4] - shannon_entropy(&p)).abs() <= 1e-15);
    }

    #[test]
    fn uniform_renyi_is_log_n(n in 1usize..200, q in 0.0f64..20.0) {
        let p = vec![1.0 / n as f64; n];
        prop_assert!((renyi_entropy(&p, q).unwrap() - (n as f64).ln()).abs() <= 1e-12);
    }

    #[test]
    fn half_order_entropy_gives_quantumness(n in 3usize..50, extra in 0usize..80, seed: u64) {
        let g = connected_graph(n, extra, true, seed);
        let d = g.degrees();
        let total: f64 = d.iter().sum();
        let p: Vec<f64> = d.iter().map(|x| x / total).collect();
        let eps = 1.0 - renyi_entropy(&p, 0.5).unwrap().exp() / n as f64;
        prop_assert!((eps - quantumness_uniform_degree_form(&g).unwrap()).abs() <= 1e-10);
    }
}
