use proptest::prelude::*;
use statrs::function::beta::{beta_reg, ln_beta};

use tailbench::distributions::{hall_params_of_burr, mef_by_quadrature, sample, true_mef};
use tailbench::{BurrDist, Distribution, GpdDist, TailDistribution, WeibullDist};

fn laws() -> Vec<Distribution> {
    vec![
        BurrDist::new(1.0, 1.0).unwrap().into(),
        BurrDist::new(3.0, 0.5).unwrap().into(),
        BurrDist::new(0.5, 3.0).unwrap().into(),
        BurrDist::new(2.0, 3.0).unwrap().into(),
        WeibullDist::new(1.0, 0.5).unwrap().into(),
        WeibullDist::new(2.0, 1.0).unwrap().into(),
        WeibullDist::new(1.0, 10.0).unwrap().into(),
        GpdDist::new(0.5, 1.0).unwrap().into(),
        GpdDist::new(0.0, 2.0).unwrap().into(),
        GpdDist::new(-0.4, 1.0).unwrap().into(),
    ]
}

proptest! {
    #[test]
    fn quantile_round_trip(p in 0.001f64..0.999, idx in 0usize..10) {
        let d = &laws()[idx];
        let x = d.quantile(p).unwrap();
        prop_assert!((d.tail_prob(x).unwrap() - (1.0 - p)).abs() < 1e-12);
    }

    #[test]
    fn tail_is_nonincreasing(a in 0.0f64..50.0, b in 0.0f64..50.0, idx in 0usize..9) {
        let d = &laws()[idx];
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(d.tail_prob(hi).unwrap() <= d.tail_prob(lo).unwrap());
    }
}

#[test]
fn burr_quantile_example_round_trips() {
    let d = BurrDist::new(2.0, 3.0).unwrap();
    let x = d.quantile(0.875).unwrap();
    assert!((x - 1.0).abs() < 1e-12);
    assert!((d.tail_prob(x).unwrap() - 0.125).abs() < 1e-15);
}

/// Kolmogorov–Smirnov distance of a sample against the exact CDF.
fn ks_distance(d: &Distribution, xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - d.tail_prob(x).unwrap();
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn sampler_passes_kolmogorov_smirnov() {
    let n = 100_000;
    // asymptotic 1% critical value
    let critical = 1.6276 / (n as f64).sqrt();
    for (i, d) in laws().iter().enumerate() {
        let mut xs = sample(d, n, 100 + i as u64);
        let ks = ks_distance(d, &mut xs);
        assert!(ks < critical, "{}: D = {ks}", d.label());
    }
}

#[test]
fn sampler_monte_carlo_checks() {
    let burr = BurrDist::new(1.0, 1.0).unwrap();
    let xs = sample(&burr, 1_000_000, 7);
    let frac = xs.iter().filter(|&&x| x > 1.0).count() as f64 / xs.len() as f64;
    assert!((frac - 0.5).abs() < 0.002, "{frac}");

    let exp = WeibullDist::new(1.0, 1.0).unwrap();
    let ys = sample(&exp, 1_000_000, 7);
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    assert!((mean - 1.0).abs() < 0.01, "{mean}");
}

#[test]
fn gpd_mean_excess_quadrature_matches_closed_form() {
    for gamma in [0.0, 0.25, 0.5] {
        let d = GpdDist::new(gamma, 1.0).unwrap();
        for u in [0.0, 1.0, 5.0] {
            let exact = (1.0 + gamma * u) / (1.0 - gamma);
            let quad = mef_by_quadrature(&d, u).unwrap();
            assert!(
                (quad - exact).abs() < 1e-9,
                "γ={gamma} u={u}: {quad} vs {exact}"
            );
            assert_eq!(true_mef(&d, u).unwrap(), exact);
        }
    }
    assert_eq!(
        true_mef(&GpdDist::new(0.5, 1.0).unwrap(), 0.0).unwrap(),
        2.0
    );
    for u in [0.0, 0.7, 12.0] {
        assert_eq!(
            true_mef(&WeibullDist::new(1.0, 1.0).unwrap(), u).unwrap(),
            1.0
        );
    }
}

/// `e(u)` of Burr(c, ℓ) via the incomplete beta function: with
/// `w = 1/(1 + t^c)`, `∫_u^∞ F̄ = c⁻¹ B(w_u; ℓ − 1/c, 1/c)`.
fn burr_mef_by_beta(c: f64, ell: f64, u: f64) -> f64 {
    let (a, b) = (ell - 1.0 / c, 1.0 / c);
    let wu = 1.0 / (1.0 + u.powf(c));
    let integral = beta_reg(a, b, wu) * ln_beta(a, b).exp() / c;
    integral / wu.powf(ell)
}

#[test]
fn burr_mean_excess_matches_incomplete_beta() {
    for (c, ell) in [(3.0, 1.0), (1.0, 3.0), (3.0, 3.0), (2.0, 0.75), (0.5, 3.0)] {
        let d = BurrDist::new(c, ell).unwrap();
        for u in [0.0, 0.5, 1.0, 4.0, 30.0] {
            let oracle = burr_mef_by_beta(c, ell, u);
            let quad = true_mef(&d, u).unwrap();
            assert!(
                (quad - oracle).abs() <= 1e-9 * oracle,
                "Burr({c},{ell}) u={u}: {quad} vs {oracle}"
            );
        }
    }
}

#[test]
fn burr_mean_excess_matches_monte_carlo() {
    let d = BurrDist::new(3.0, 1.0).unwrap();
    let u = 1.0;
    let excess: Vec<f64> = sample(&d, 10_000_000, 79)
        .into_iter()
        .filter(|&x| x > u)
        .map(|x| x - u)
        .collect();
    let m = excess.len() as f64;
    let mean = excess.iter().sum::<f64>() / m;
    let sd = (excess.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    let truth = true_mef(&d, u).unwrap();
    assert!(
        (mean - truth).abs() < 3.0 * sd / m.sqrt(),
        "{mean} vs {truth}"
    );
}

#[test]
fn burr_hall_expansion_residual_is_next_order() {
    let x: f64 = 1e3;
    for (c, ell) in [
        (0.5, 0.5),
        (1.0, 0.5),
        (0.5, 1.0),
        (1.0, 1.0),
        (0.5, 3.0),
        (1.0, 3.0),
    ] {
        let p = hall_params_of_burr(&BurrDist::new(c, ell).unwrap()).unwrap();
        let y = x.powf(-p.beta());
        // tail/(A x^{−α}) − (1 + B x^{−β}), computed without cancellation in the tail
        let rel = (-ell * y.ln_1p()).exp_m1() - p.b() * y;
        let residual = x.powf(p.beta()) * rel.abs();
        let next = x.powf(p.beta()) * ell * (ell + 1.0) / 2.0 * y * y;
        assert!(
            residual < 10.0 * next,
            "Burr({c},{ell}): {residual} vs {next}"
        );
        assert!(
            residual < 0.1 * p.b().abs(),
            "Burr({c},{ell}) residual {residual} vs B"
        );
    }
}

#[test]
fn hall_parameters_of_table_rows() {
    let cases = [
        ((1.0, 1.0), (1.0, 1.0)),
        ((3.0, 0.5), (1.5, 3.0)),
        ((0.5, 3.0), (1.5, 0.5)),
    ];
    for ((c, ell), (alpha, beta)) in cases {
        let p = hall_params_of_burr(&BurrDist::new(c, ell).unwrap()).unwrap();
        assert_eq!(
            (p.alpha(), p.beta(), p.a(), p.b()),
            (alpha, beta, 1.0, -ell)
        );
    }
}
