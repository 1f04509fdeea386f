//! Estimator, regression and aggregation against independent references.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use qaoa_core::analysis::fit_exponential;
use qaoa_core::circuit::{build_qaoa_circuit, QaoaParams};
use qaoa_core::costmodel::aggregate;
use qaoa_core::estimator::{estimate_cut, exact_cut_expectation};
use qaoa_core::graphs::{reference_instance, Graph};
use qaoa_core::simulator::{measure_samples, simulate_circuit};

const P4: [(f64, f64); 6] = [
    (8.0, 100.6),
    (10.0, 102.8),
    (12.0, 106.6),
    (14.0, 107.5),
    (16.0, 113.1),
    (20.0, 118.8),
];
const P8: [(f64, f64); 5] = [(8.0, 211.3), (10.0, 220.6), (12.0, 226.2), (14.0, 233.2), (16.0, 241.1)];

#[test]
fn sampled_cut_converges_to_exact() {
    let g = reference_instance();
    let params = QaoaParams::new(vec![0.41, 0.77], vec![0.52, 0.18]).unwrap();
    let s = simulate_circuit(&build_qaoa_circuit(&g, &params)).unwrap();
    let exact = exact_cut_expectation(&s, &g);
    for (n, seed) in [(10_000, 1u64), (100_000, 2)] {
        let est = estimate_cut(&measure_samples(&s, n, &mut ChaCha8Rng::seed_from_u64(seed)), &g);
        assert!(
            (est.mean_cut - exact).abs() < 4.0 * est.std_error,
            "n={n}: {} vs {exact} ± {}",
            est.mean_cut,
            est.std_error
        );
    }
}

/// Single-layer edge expectation for an edge whose endpoints have `d` and
/// `e` other neighbours, `t` of them shared (triangles through the edge).
fn p1_edge_cut(gamma: f64, beta: f64, d: i32, e: i32, t: i32) -> f64 {
    // written for the cost unitary exp(-iγC); ours is exp(+iγC) up to phase
    let g = -gamma;
    0.5 + 0.25 * (4.0 * beta).sin() * g.sin() * (g.cos().powi(d) + g.cos().powi(e))
        - 0.25 * (2.0 * beta).sin().powi(2) * g.cos().powi(d + e - 2 * t) * (1.0 - (2.0 * g).cos().powi(t))
}

#[test]
fn single_layer_matches_closed_form() {
    for (gamma, beta) in [(1.1, 0.35), (-0.4, 0.9), (2.3, -0.2)] {
        let params = QaoaParams::new(vec![gamma], vec![beta]).unwrap();
        let k3 = Graph::complete(3);
        let s = simulate_circuit(&build_qaoa_circuit(&k3, &params)).unwrap();
        let want = 3.0 * p1_edge_cut(gamma, beta, 1, 1, 1);
        assert!((exact_cut_expectation(&s, &k3) - want).abs() < 1e-12);
        let est = estimate_cut(&measure_samples(&s, 50_000, &mut ChaCha8Rng::seed_from_u64(9)), &k3);
        assert!((est.mean_cut - want).abs() < 4.0 * est.std_error);

        // the reference instance is cubic; count shared neighbours per edge
        let g = reference_instance();
        let adj = g.adjacency();
        let want: f64 = g
            .edges()
            .iter()
            .map(|&(u, v)| {
                let t = adj[u].iter().filter(|w| adj[v].contains(w)).count() as i32;
                p1_edge_cut(gamma, beta, 2, 2, t)
            })
            .sum();
        let s = simulate_circuit(&build_qaoa_circuit(&g, &params)).unwrap();
        assert!((exact_cut_expectation(&s, &g) - want).abs() < 1e-12);
    }
}

// Reference values from an independent least-squares implementation.
#[test]
fn ols_on_tabulated_costs() {
    let f4 = fit_exponential(&P4).unwrap();
    assert!((f4.slope - 0.006122567585489509).abs() < 1e-12);
    assert!((f4.intercept - 1.952038400508802).abs() < 1e-12);
    assert!((f4.r_squared - 0.9827166514536296).abs() < 1e-12);
    let f8 = fit_exponential(&P8).unwrap();
    assert!((f8.slope - 0.006935923231654284).abs() < 1e-12);
    assert!((f8.intercept - 2.2713535936622185).abs() < 1e-12);
    assert!((f8.r_squared - 0.9934472076407562).abs() < 1e-12);
}

#[test]
fn prediction_interval_on_tabulated_costs() {
    let (lo, hi) = fit_exponential(&P4).unwrap().prediction_band(30.0, 0.95).unwrap();
    assert!((lo - 2.113550780137447).abs() < 1e-9, "{lo}");
    assert!((hi - 2.15788007600953).abs() < 1e-9, "{hi}");
}

#[test]
fn sdom_of_normal_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let d = Normal::new(100.0, 4.0).unwrap();
    let xs: Vec<f64> = (0..40).map(|_| d.sample(&mut rng)).collect();
    let (mean, sdom) = aggregate(&xs).unwrap();
    // two-pass reference
    let m = xs.iter().sum::<f64>() / 40.0;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / 39.0;
    assert!((mean - m).abs() < 1e-12);
    assert!((sdom - (var / 40.0).sqrt()).abs() < 1e-12);
    // and it estimates σ/√n
    assert!((sdom - 4.0 / 40f64.sqrt()).abs() < 0.3);
}
