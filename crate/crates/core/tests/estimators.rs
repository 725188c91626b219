use proptest::prelude::*;

use tailbench::distributions::{sample, true_mef};
use tailbench::estimators::{mef_ne, mef_pe, mef_pi, tail_ne, tail_pi, tail_pt, NeBandwidth};
use tailbench::{
    default_r, estimate_mef, estimate_tail, hill_fit, BurrDist, Estimator, GpdDist, SortedSample,
    TailDistribution, WeibullDist,
};

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (m, var.sqrt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pt_at_the_threshold_is_the_exceedance_share(seed in 0u64..10_000, q in 0.5f64..0.95) {
        let s = SortedSample::new(sample(&GpdDist::new(0.3, 1.0).unwrap(), 500, seed)).unwrap();
        let u = s.values()[(q * 500.0) as usize];
        let rec = tail_pt(&s, u, u).unwrap();
        let share = s.exceeding(u).len() as f64 / 500.0;
        prop_assert!((rec.value - share).abs() < 1e-12, "{} vs {}", rec.value, share);
    }

    #[test]
    fn pi_is_nonincreasing_in_x(seed in 0u64..10_000, a in 1.0f64..50.0, b in 1.0f64..50.0) {
        let s = SortedSample::new(sample(&BurrDist::new(1.0, 1.0).unwrap(), 400, seed)).unwrap();
        let est = hill_fit(&s, default_r(400)).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(tail_pi(&est, hi).unwrap().value <= tail_pi(&est, lo).unwrap().value);
    }
}

#[test]
fn gpd_mean_excess_estimate_converges() {
    let d = GpdDist::new(0.25, 1.0).unwrap();
    let u = 1.0;
    let truth = true_mef(&d, u).unwrap();
    let vals: Vec<f64> = (0..100)
        .map(|seed| {
            let s = SortedSample::new(sample(&d, 20_000, seed)).unwrap();
            mef_pe(&s, u).unwrap().value
        })
        .collect();
    let (m, sd) = mean_sd(&vals);
    assert!(
        (m - truth).abs() < 3.0 * sd / 10.0 + 1e-3,
        "mean {m}, truth {truth}, sd {sd}"
    );
}

#[test]
fn estimates_are_deterministic() {
    let d = BurrDist::new(3.0, 1.0).unwrap();
    let s = SortedSample::new(sample(&d, 2048, 42)).unwrap();
    let est = hill_fit(&s, default_r(2048)).unwrap();
    for e in Estimator::ALL {
        let a = estimate_tail(e, &s, 2.0, 1.5, Some(&est)).unwrap();
        let b = estimate_tail(e, &s, 2.0, 1.5, Some(&est)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits(), "{e}");
        let a = estimate_mef(e, &s, 1.5, Some(&est)).unwrap();
        let b = estimate_mef(e, &s, 1.5, Some(&est)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits(), "{e}");
    }
}

#[test]
fn kernel_tail_boundary_and_median() {
    let d = WeibullDist::new(1.0, 1.0).unwrap();
    let n = 10_000;
    let s = SortedSample::new(sample(&d, n, 9)).unwrap();
    let below = tail_ne(&s, s.min() - 100.0, NeBandwidth::Al, None).unwrap();
    assert!((below.value - 1.0).abs() < 1e-12, "{}", below.value);
    let median = d.quantile(0.5).unwrap();
    let at_median = tail_ne(&s, median, NeBandwidth::Al, None).unwrap();
    assert!(
        (at_median.value - 0.5).abs() < 5.0 / (n as f64).sqrt(),
        "{}",
        at_median.value
    );
}

#[test]
fn pb_overestimates_the_far_tail_of_a_short_sample() {
    // Burr(3,3), n = 256, x = 2·256^{1/15}: the pointwise bandwidth is wide
    // enough that kernel mass leaks far beyond x
    let d = BurrDist::new(3.0, 3.0).unwrap();
    let n = 256;
    let x = 2.0 * (n as f64).powf(1.0 / 15.0);
    let truth = d.tail_prob(x).unwrap();
    let vals: Vec<f64> = (0..400)
        .map(|seed| {
            let s = SortedSample::new(sample(&d, n, seed)).unwrap();
            let est = hill_fit(&s, default_r(n)).unwrap();
            tail_ne(&s, x, NeBandwidth::Pb, Some(&est)).unwrap().value
        })
        .collect();
    let (m, _) = mean_sd(&vals);
    assert!(m > 20.0 * truth, "mean {m} vs truth {truth}");
    assert!((0.003..=0.3).contains(&m), "mean {m}");
}

#[test]
fn exponential_mean_excess_estimates() {
    let d = WeibullDist::new(1.0, 1.0).unwrap();
    let n = 20_000;
    let u = d.quantile(0.9).unwrap();
    let mut ne = Vec::new();
    let mut scale = Vec::new();
    for seed in 0..50 {
        let s = SortedSample::new(sample(&d, n, seed)).unwrap();
        ne.push(mef_ne(&s, u, NeBandwidth::Al, None).unwrap().value);
        let rec = mef_pe(&s, u).unwrap();
        scale.push(rec.diagnostics.gpd.unwrap().scale);
    }
    let (m, sd) = mean_sd(&ne);
    assert!(
        (m - 1.0).abs() < 3.0 * sd / 50f64.sqrt() + 0.02,
        "kernel mean excess {m}"
    );
    let (m, sd) = mean_sd(&scale);
    assert!(
        (m - 1.0).abs() < 3.0 * sd / 50f64.sqrt() + 0.01,
        "GPD scale {m}"
    );
}

#[test]
fn plug_in_mean_excess_is_within_its_spread() {
    let d = BurrDist::new(3.0, 1.0).unwrap();
    let n = 4096;
    let u = d.quantile(0.99).unwrap();
    let truth = true_mef(&d, u).unwrap();
    let vals: Vec<f64> = (0..200)
        .map(|seed| {
            let s = SortedSample::new(sample(&d, n, seed)).unwrap();
            let est = hill_fit(&s, default_r(n)).unwrap();
            mef_pi(&est, u).unwrap().value
        })
        .collect();
    let (m, sd) = mean_sd(&vals);
    assert!(
        (m - truth).abs() <= 3.0 * sd,
        "mean {m}, truth {truth}, sd {sd}"
    );
}

#[test]
fn domain_errors() {
    let s = SortedSample::new(sample(&BurrDist::new(1.0, 1.0).unwrap(), 100, 1)).unwrap();
    assert!(tail_pt(&s, 1.0, 2.0).is_err());
    assert!(tail_ne(&s, 1.0, NeBandwidth::Pb, None).is_err());
    assert!(estimate_tail(Estimator::Pi, &s, 2.0, 1.0, None).is_err());
}
