use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tailbench::tail_index::theoretical_r;
use tailbench::{default_r, hill_fit, HallParams, SortedSample};

fn pareto(alpha: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / alpha))
        .collect()
}

proptest! {
    #[test]
    fn hill_is_scale_invariant(seed in 0u64..1000, s in 0.01f64..100.0, r in 5usize..150) {
        let xs = pareto(1.5, 200, seed);
        let base = hill_fit(&SortedSample::from_slice(&xs).unwrap(), r).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| x * s).collect();
        let moved = hill_fit(&SortedSample::new(scaled).unwrap(), r).unwrap();
        prop_assert!((moved.alpha_hat - base.alpha_hat).abs() < 1e-12 * base.alpha_hat.max(1.0));
        let expected_a = base.a_hat * s.powf(base.alpha_hat);
        prop_assert!((moved.a_hat / expected_a - 1.0).abs() < 1e-10);
    }

    #[test]
    fn theoretical_r_equals_default_when_alpha_equals_beta(alpha in 0.5f64..10.0, n in 10usize..100_000) {
        let p = HallParams::new(1.0, alpha, -1.0, alpha).unwrap();
        prop_assert_eq!(theoretical_r(&p, n, Some(1.0)), default_r(n));
    }

    #[test]
    fn default_r_stays_in_range(n in 2usize..10_000_000) {
        let r = default_r(n);
        prop_assert!(r >= 1 && r < n);
    }
}

#[test]
fn pareto_index_two_is_recovered() {
    let n = 100_000;
    let est = hill_fit(&SortedSample::new(pareto(2.0, n, 3)).unwrap(), default_r(n)).unwrap();
    assert!((1.9..=2.1).contains(&est.alpha_hat), "{}", est.alpha_hat);
    // Â targets A = 1
    assert!((est.a_hat - 1.0).abs() < 0.3, "{}", est.a_hat);
}

#[test]
fn r_examples() {
    assert_eq!(default_r(256), 40);
    assert_eq!(default_r(4096), 256);
    assert_eq!(default_r(8), 4);
    let p = HallParams::new(1.0, 1.0, -1.0, 1.0).unwrap();
    assert_eq!(theoretical_r(&p, 4096, None), 323);
    assert_eq!(theoretical_r(&p, 8, Some(1e9)), 7);
}
