//! Kernel distribution and density estimators, the closed-form Gaussian
//! kernel mean-excess estimator, and bandwidth selectors.
//!
//! Sums skip observations more than [`KERNEL_CUTOFF`] bandwidths away from
//! the evaluation point; for the Gaussian kernel their contribution is below
//! `Φ(−40) ≈ 4e−350`, i.e. exactly zero in double precision.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::distributions::HallParams;
use crate::error::{domain, Error, Result};
use crate::sample::SortedSample;
use crate::tail_index::TailIndexEstimate;

/// Half-width, in bandwidths, of the window that kernel sums visit.
pub const KERNEL_CUTOFF: f64 = 40.0;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal CDF, accurate in both tails.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// A symmetric kernel `w`, its CDF `W`, and the constants
/// `μ₂ = ∫z²w(z)dz` and `ψ = ∫zW(z)w(z)dz`.
#[derive(Debug, Clone, Copy)]
pub struct KernelSpec {
    pub name: &'static str,
    pub pdf: fn(f64) -> f64,
    pub cdf: fn(f64) -> f64,
    pub mu2: f64,
    pub psi: f64,
}

impl KernelSpec {
    pub fn gaussian() -> Self {
        Self {
            name: "gaussian",
            pdf: std_normal_pdf,
            cdf: std_normal_cdf,
            mu2: 1.0,
            // 1 / (2√π)
            psi: 0.282_094_791_773_878_14,
        }
    }

    fn is_gaussian(&self) -> bool {
        self.name == "gaussian"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandwidthMethod {
    PointwiseTrue,
    PointwisePlugin,
    GlobalAL,
    MefTrue,
    MefPlugin,
    Fixed,
}

/// A bandwidth plus how it was chosen.
///
/// `valid` is false when the asymptotic condition behind a pointwise formula
/// (`x^{α+3}/n` small) fails. `capped` is set when a formula produced a
/// value above the sample range (or a nonfinite one) and it was cut back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bandwidth {
    pub h: f64,
    pub method: BandwidthMethod,
    pub valid: bool,
    pub capped: bool,
}

impl Bandwidth {
    pub fn fixed(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return domain(format!("bandwidth must be positive, got {h}"));
        }
        Ok(Self {
            h,
            method: BandwidthMethod::Fixed,
            valid: true,
            capped: false,
        })
    }

    /// Caps `h` at `range` (the sample's max − min).
    pub fn capped_to(mut self, range: f64) -> Self {
        if range > 0.0 && !(self.h <= range) {
            self.h = range;
            self.capped = true;
        }
        self
    }
}

/// `(1/n) Σ W((x − Xᵢ)/h)`, clamped to `[0, 1]`.
pub fn kernel_cdf(sample: &SortedSample, x: f64, h: f64, k: &KernelSpec) -> f64 {
    (1.0 - kernel_tail(sample, x, h, k)).clamp(0.0, 1.0)
}

/// `1 − F̂(x) = (1/n) Σ W((Xᵢ − x)/h)`, summed directly so that deep-tail
/// values keep their relative precision (uses the kernel's symmetry).
pub fn kernel_tail(sample: &SortedSample, x: f64, h: f64, k: &KernelSpec) -> f64 {
    let xs = sample.values();
    let reach = KERNEL_CUTOFF * h;
    let (lo, hi) = sample.window(x - reach, x + reach);
    let inner: f64 = xs[lo..hi].iter().map(|&xi| (k.cdf)((xi - x) / h)).sum();
    (inner + (xs.len() - hi) as f64) / xs.len() as f64
}

/// `(1/(nh)) Σ w((x − Xᵢ)/h)`.
pub fn kernel_density(sample: &SortedSample, x: f64, h: f64, k: &KernelSpec) -> f64 {
    let xs = sample.values();
    let reach = KERNEL_CUTOFF * h;
    let (lo, hi) = sample.window(x - reach, x + reach);
    let s: f64 = xs[lo..hi].iter().map(|&xi| (k.pdf)((x - xi) / h)).sum();
    s / (xs.len() as f64 * h)
}

fn pointwise_formula(a: f64, alpha: f64, n: usize, x: f64, k: &KernelSpec) -> Result<(f64, bool)> {
    if !(x > 0.0) {
        return domain(format!("evaluation point must be positive, got {x}"));
    }
    if !(k.psi > 0.0) {
        return domain(format!("kernel {} has ψ ≤ 0", k.name));
    }
    let nf = n as f64;
    let h = nf.powf(-1.0 / 3.0)
        * (2.0 / (a * alpha * (alpha + 1.0).powi(2)) * x.powf(alpha + 3.0)).cbrt()
        * (k.psi / (k.mu2 * k.mu2)).cbrt();
    let valid = x.powf(alpha + 3.0) / nf < 1.0;
    Ok((h, valid))
}

/// Pointwise-optimal bandwidth for the tail at `x` under a Hall-class law:
///
/// `h_{A,α} = n^{−1/3} {2 A⁻¹ α⁻¹ (α+1)⁻² x^{α+3}}^{1/3} (ψ/μ₂²)^{1/3}`.
pub fn pointwise_bandwidth_true(
    params: &HallParams,
    n: usize,
    x: f64,
    k: &KernelSpec,
) -> Result<Bandwidth> {
    let (h, valid) = pointwise_formula(params.a(), params.alpha(), n, x, k)?;
    Ok(Bandwidth {
        h,
        method: BandwidthMethod::PointwiseTrue,
        valid,
        capped: false,
    })
}

/// [`pointwise_bandwidth_true`] with `(Â, α̂)` in place of `(A, α)`.
pub fn pointwise_bandwidth_plugin(
    est: &TailIndexEstimate,
    n: usize,
    x: f64,
    k: &KernelSpec,
) -> Result<Bandwidth> {
    let (h, valid) = pointwise_formula(est.a_hat, est.alpha_hat, n, x, k)?;
    Ok(Bandwidth {
        h,
        method: BandwidthMethod::PointwisePlugin,
        valid,
        capped: false,
    })
}

fn mef_formula(a: f64, alpha: f64, n: usize, u: f64, k: &KernelSpec) -> Result<(f64, bool)> {
    if !(u > 0.0) {
        return domain(format!("threshold must be positive, got {u}"));
    }
    if !(k.psi > 0.0) {
        return domain(format!("kernel {} has ψ ≤ 0", k.name));
    }
    let nf = n as f64;
    let h = nf.powf(-1.0 / 3.0)
        * u.powf(1.0 + alpha / 3.0)
        * (k.psi / (2.0 * a * alpha * k.mu2 * k.mu2)).cbrt();
    let valid = u.powf(alpha + 3.0) / nf < 1.0;
    Ok((h, valid))
}

/// MSE-optimal bandwidth for the kernel mean excess at `u`:
///
/// `h* = n^{−1/3} u^{1+α/3} {ψ / (2Aαμ₂²)}^{1/3}`.
pub fn mef_bandwidth_true(
    params: &HallParams,
    n: usize,
    u: f64,
    k: &KernelSpec,
) -> Result<Bandwidth> {
    let (h, valid) = mef_formula(params.a(), params.alpha(), n, u, k)?;
    Ok(Bandwidth {
        h,
        method: BandwidthMethod::MefTrue,
        valid,
        capped: false,
    })
}

/// [`mef_bandwidth_true`] with `(Â, α̂)` substituted.
pub fn mef_bandwidth_plugin(
    est: &TailIndexEstimate,
    n: usize,
    u: f64,
    k: &KernelSpec,
) -> Result<Bandwidth> {
    let (h, valid) = mef_formula(est.a_hat, est.alpha_hat, n, u, k)?;
    Ok(Bandwidth {
        h,
        method: BandwidthMethod::MefPlugin,
        valid,
        capped: false,
    })
}

/// Grid size for the roughness functional in [`al_bandwidth`].
pub const AL_GRID_POINTS: usize = 1024;

/// Global plug-in bandwidth for the kernel distribution estimator.
///
/// Minimizes the asymptotic integrated MSE
/// `n⁻¹∫F(1−F) − 2ψh/n + h⁴μ₂²R/4`, giving
/// `h = n^{−1/3} {2ψ / (μ₂² R̂)}^{1/3}` with `R̂ = ∫(f̂_g′)²`.
///
/// The pilot `f̂_g` is a Gaussian kernel density with the normal-reference
/// bandwidth `g = 1.06 sd n^{−1/5}`. `R̂` is a trapezoid sum of `(f̂_g′)²` on
/// [`AL_GRID_POINTS`] equispaced points spanning `[min − 3sd, max + 3sd]`,
/// with `f̂_g′` on the grid obtained from linearly binned counts convolved
/// with the exact kernel derivative.
pub fn al_bandwidth(sample: &SortedSample, k: &KernelSpec) -> Result<Bandwidth> {
    let n = sample.len();
    if n < 10 {
        return domain(format!(
            "global bandwidth needs at least 10 observations, got {n}"
        ));
    }
    let sd = sample.std_dev();
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(Error::DegenerateSample(format!(
            "sample standard deviation is {sd}"
        )));
    }
    let nf = n as f64;
    let g = 1.06 * sd * nf.powf(-0.2);
    let lo = sample.min() - 3.0 * sd;
    let hi = sample.max() + 3.0 * sd;
    let m = AL_GRID_POINTS;
    let delta = (hi - lo) / (m - 1) as f64;

    // linear binning onto the grid
    let mut counts = vec![0.0; m];
    for &x in sample.values() {
        let pos = (x - lo) / delta;
        let j = (pos.floor() as usize).min(m - 2);
        let frac = pos - j as f64;
        counts[j] += 1.0 - frac;
        counts[j + 1] += frac;
    }

    // φ'(z) = −z φ(z) sampled at grid offsets
    let reach = ((8.0 * g / delta).ceil() as usize).min(m - 1);
    let weights: Vec<f64> = (0..=reach)
        .map(|l| {
            let z = l as f64 * delta / g;
            -z * std_normal_pdf(z)
        })
        .collect();

    let scale = 1.0 / (nf * g * g);
    let mut roughness = 0.0;
    for i in 0..m {
        let mut d = 0.0;
        let j_lo = i.saturating_sub(reach);
        let j_hi = (i + reach).min(m - 1);
        for (j, &c) in counts.iter().enumerate().take(j_hi + 1).skip(j_lo) {
            if c == 0.0 {
                continue;
            }
            // derivative in t of φ((t − X)/g) at t = grid[i], X ≈ grid[j]
            if i >= j {
                d += c * weights[i - j];
            } else {
                d -= c * weights[j - i];
            }
        }
        let d = d * scale;
        let w = if i == 0 || i == m - 1 { 0.5 } else { 1.0 };
        roughness += w * d * d;
    }
    roughness *= delta;
    if !(roughness > 0.0) || !roughness.is_finite() {
        return Err(Error::Numerical(format!(
            "density-derivative roughness estimate is {roughness}"
        )));
    }
    let h = nf.powf(-1.0 / 3.0) * (2.0 * k.psi / (k.mu2 * k.mu2 * roughness)).cbrt();
    Ok(Bandwidth {
        h,
        method: BandwidthMethod::GlobalAL,
        valid: true,
        capped: false,
    })
}

/// Gaussian-kernel mean excess in closed form:
///
/// `ê(u) = Σ{(Xᵢ − u)Φ((Xᵢ − u)/h) + hφ((Xᵢ − u)/h)} / Σ Φ((Xᵢ − u)/h)`,
/// i.e. `∫₀^∞ t f̂(u + t) dt / (1 − F̂(u))` for the same bandwidth.
pub fn kernel_mef(sample: &SortedSample, u: f64, h: f64, k: &KernelSpec) -> Result<f64> {
    if !k.is_gaussian() {
        return domain(format!(
            "closed-form kernel mean excess holds only for the Gaussian kernel, not {}",
            k.name
        ));
    }
    if !(h > 0.0 && h.is_finite()) {
        return domain(format!("bandwidth must be positive, got {h}"));
    }
    let xs = sample.values();
    let (lo, _) = sample.window(u - KERNEL_CUTOFF * h, f64::INFINITY);
    let mut num = 0.0;
    let mut den = 0.0;
    for &xi in &xs[lo..] {
        let d = xi - u;
        let z = d / h;
        let cdf = std_normal_cdf(z);
        num += d * cdf + h * std_normal_pdf(z);
        den += cdf;
    }
    if den / xs.len() as f64 <= 1e-12 {
        return Err(Error::NoExceedance(u));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    fn s(v: &[f64]) -> SortedSample {
        SortedSample::from_slice(v).unwrap()
    }

    #[test]
    fn gaussian_constants_match_integrals() {
        let k = KernelSpec::gaussian();
        let mu2 = integrate(|z| z * z * std_normal_pdf(z), -40.0, 40.0, 1e-13, 0.0, 200);
        let psi = integrate(
            |z| z * std_normal_cdf(z) * std_normal_pdf(z),
            -40.0,
            40.0,
            1e-13,
            0.0,
            200,
        );
        assert!((mu2.value - k.mu2).abs() < 1e-12, "{mu2:?}");
        assert!((psi.value - k.psi).abs() < 1e-10, "{psi:?}");
        assert!((k.psi - 1.0 / (2.0 * std::f64::consts::PI.sqrt())).abs() < 1e-16);
        assert_eq!(std_normal_cdf(0.0), 0.5);
    }

    #[test]
    fn cdf_examples() {
        let k = KernelSpec::gaussian();
        let sm = s(&[1.0, 2.0, 3.0]);
        for h in [0.01, 1.0, 50.0] {
            assert!((kernel_cdf(&sm, 2.0, h, &k) - 0.5).abs() < 1e-15);
        }
        assert!((kernel_cdf(&sm, 2.5, 1e-8, &k) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn density_examples() {
        let k = KernelSpec::gaussian();
        assert!((kernel_density(&s(&[0.7]), 0.7, 1.0, &k) - 0.398_942_3).abs() < 1e-7);
        let a = 1.3;
        let h = 0.8;
        let d = kernel_density(&s(&[-a, a]), 0.0, h, &k);
        assert!((d - std_normal_pdf(a / h) / h).abs() < 1e-15);
    }

    #[test]
    fn pointwise_bandwidth_example() {
        let k = KernelSpec::gaussian();
        let p = HallParams::new(1.0, 1.0, -1.0, 1.0).unwrap();
        let bw = pointwise_bandwidth_true(&p, 1000, 1.0, &k).unwrap();
        let hand = 1000f64.powf(-1.0 / 3.0) * 0.5f64.cbrt() * 0.282_094_8f64.cbrt();
        assert!((bw.h - hand).abs() < 1e-8, "{}", bw.h);
        assert!((bw.h - 0.052_06).abs() < 1e-5);
        assert!(bw.valid);
        let far = pointwise_bandwidth_true(&p, 1000, 10.0, &k).unwrap();
        assert!(!far.valid);
        assert!(pointwise_bandwidth_true(&p, 1000, 0.0, &k).is_err());
    }

    #[test]
    fn mef_bandwidth_example() {
        let k = KernelSpec::gaussian();
        let p = HallParams::new(1.0, 1.0, -1.0, 1.0).unwrap();
        let bw = mef_bandwidth_true(&p, 1000, 1.0, &k).unwrap();
        let hand = 1000f64.powf(-1.0 / 3.0) * (0.282_094_8f64 / 2.0).cbrt();
        assert!((bw.h - hand).abs() < 1e-8, "{}", bw.h);
        let twice = mef_bandwidth_true(&p, 1000, 2.0, &k).unwrap();
        assert!((twice.h / bw.h - 2f64.powf(4.0 / 3.0)).abs() < 1e-12);
        assert!(matches!(
            mef_bandwidth_true(&p, 1000, -1.0, &k),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn kernel_mef_examples() {
        let k = KernelSpec::gaussian();
        let e = kernel_mef(&s(&[2.0]), 2.0, 1.0, &k).unwrap();
        assert!((e - 0.797_884_56).abs() < 1e-8);
        let e = kernel_mef(&s(&[6.0, 8.0]), 5.0, 1e-8, &k).unwrap();
        assert!((e - 2.0).abs() < 1e-12);
        assert!(matches!(
            kernel_mef(&s(&[1.0, 2.0]), 100.0, 0.1, &k),
            Err(Error::NoExceedance(_))
        ));
    }

    #[test]
    fn cap_marks_flag() {
        let bw = Bandwidth::fixed(5.0).unwrap().capped_to(2.0);
        assert_eq!(bw.h, 2.0);
        assert!(bw.capped);
        let inf = Bandwidth {
            h: f64::INFINITY,
            ..Bandwidth::fixed(1.0).unwrap()
        }
        .capped_to(3.0);
        assert_eq!(inf.h, 3.0);
    }

    #[test]
    fn al_rejects_constant_sample() {
        let k = KernelSpec::gaussian();
        let sm = s(&[4.0; 20]);
        assert!(matches!(
            al_bandwidth(&sm, &k),
            Err(Error::DegenerateSample(_))
        ));
    }
}
