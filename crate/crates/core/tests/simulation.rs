use proptest::prelude::*;

use tailbench::asymptotics::{burr_tail_rate_rows, predict_mse_prop1, predict_mse_thm1};
use tailbench::simulation::{summarize, TargetRule};
use tailbench::{run_cell, BurrDist, Distribution, Estimator, HallParams, KernelSpec, SimConfig};

fn burr(c: f64, ell: f64) -> Distribution {
    BurrDist::new(c, ell).unwrap().into()
}

proptest! {
    #[test]
    fn thm1_zero_bandwidth_scales_with_the_threshold(alpha in 2.1f64..10.0, u in 0.1f64..20.0) {
        let k = KernelSpec::gaussian();
        let p = HallParams::new(1.0, alpha, -1.0, 1.0).unwrap();
        let a = predict_mse_thm1(&p, 1000.0, u, 0.0, &k).unwrap();
        let b = predict_mse_thm1(&p, 1000.0, 2.0 * u, 0.0, &k).unwrap();
        prop_assert!((b / a / 2f64.powf(alpha + 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prop1_vanishes_at_the_balanced_exponent(alpha in 0.2f64..10.0, beta in 0.5f64..10.0) {
        let p = HallParams::new(1.0, alpha, -1.0, beta).unwrap();
        let c6 = 1.0 / (alpha + 2.0 * beta);
        prop_assert!(predict_mse_prop1(&p, 4096.0, c6).unwrap().abs() < 1e-20);
        prop_assert!(predict_mse_prop1(&p, 4096.0, 2.0 * c6).unwrap() > 0.0);
    }

    #[test]
    fn summaries_flag_instability(errs in proptest::collection::vec(0.0f64..5.0, 100), k in 0usize..4) {
        let mut values: Vec<f64> = errs.iter().map(|e| 1.0 + e).collect();
        for v in values.iter_mut().take(k) {
            *v = f64::INFINITY;
        }
        let s = summarize(Estimator::Pt, &values, &[false; 100], 1.0);
        prop_assert_eq!(s.n_nonfinite, k);
        prop_assert_eq!(s.show_infinite, k > 1);
        let mean = errs[k..].iter().map(|e| e * e).sum::<f64>() / (100 - k) as f64;
        prop_assert!((s.rel_mse_x100 - 100.0 * mean).abs() < 1e-9 * (1.0 + 100.0 * mean));
        prop_assert_eq!(s.unstable, k > 1 || 100.0 * mean >= 1000.0);
    }
}

#[test]
fn estimators_share_replication_samples() {
    let cfg = |ests| {
        SimConfig::tail(burr(1.0, 1.0), 512, TargetRule::HallPower { c1: 1.0 }, ests)
            .with_seed(77)
            .with_replications(40)
    };
    let alone = run_cell(&cfg(vec![Estimator::Pt])).unwrap();
    let all = run_cell(&cfg(Estimator::ALL.to_vec())).unwrap();
    assert_eq!(alone.summary(Estimator::Pt), all.summary(Estimator::Pt));
    let again = run_cell(&cfg(Estimator::ALL.to_vec())).unwrap();
    assert_eq!(all, again);
}

#[test]
fn pointwise_kernel_rate_matches_the_equal_rate_exponent() {
    // PB carries the pointwise-optimal bandwidth, so its MSE rate is the
    // kernel rate; the global AL bandwidth is not tuned to x
    let row = burr_tail_rate_rows()
        .into_iter()
        .find(|r| r.c == 3.0 && r.ell == 0.5)
        .unwrap();
    let expected = row.rates.ne.value.unwrap();
    let mse = |n: usize| {
        let cfg = SimConfig::tail(
            burr(3.0, 0.5),
            n,
            TargetRule::HallPower { c1: 1.0 },
            vec![Estimator::Pb],
        )
        .with_seed(5)
        .with_replications(300);
        run_cell(&cfg)
            .unwrap()
            .summary(Estimator::Pb)
            .unwrap()
            .rel_mse_x100
    };
    let (a, b) = (mse(1 << 12), mse(1 << 16));
    let slope = (b / a).ln() / 16f64.ln();
    assert!(
        (slope - expected).abs() <= 0.15,
        "slope {slope}, expected {expected}"
    );
}
