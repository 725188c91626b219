//! Hill-type estimation of the Hall-class pair `(A, α)` from the `r` largest
//! order statistics, and the two rules for choosing `r`.

use serde::{Deserialize, Serialize};

use crate::distributions::HallParams;
use crate::error::{domain, Error, Result};
use crate::sample::SortedSample;

/// `(Â, α̂)` together with the `r` and `n` that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailIndexEstimate {
    pub alpha_hat: f64,
    pub a_hat: f64,
    pub r: usize,
    pub n: usize,
}

impl TailIndexEstimate {
    /// Builds an estimate from known values, e.g. to evaluate plug-in
    /// formulas at the true parameters.
    pub fn new(alpha_hat: f64, a_hat: f64, r: usize, n: usize) -> Result<Self> {
        if !(alpha_hat > 0.0 && alpha_hat.is_finite()) {
            return domain(format!("alpha_hat must be positive, got {alpha_hat}"));
        }
        if !(a_hat > 0.0 && a_hat.is_finite()) {
            return domain(format!("A_hat must be positive, got {a_hat}"));
        }
        Ok(Self {
            alpha_hat,
            a_hat,
            r,
            n,
        })
    }
}

/// Hill estimator on the `r` largest of `n` observations:
///
/// `α̂ = [r⁻¹ Σ_{j≤r} ln X_{(n−j+1)} − ln X_{(n−r)}]⁻¹`, `Â = (r/n) X_{(n−r)}^{α̂}`.
pub fn hill_fit(sample: &SortedSample, r: usize) -> Result<TailIndexEstimate> {
    let xs = sample.values();
    let n = xs.len();
    if r == 0 || r >= n {
        return domain(format!("r = {r} must satisfy 1 ≤ r < n = {n}"));
    }
    let anchor = xs[n - r - 1];
    if anchor <= 0.0 {
        return domain(format!(
            "order statistic X_(n-r) = {anchor} is not positive; the estimator is log-based"
        ));
    }
    let ln_anchor = anchor.ln();
    let mean_log_excess = xs[n - r..].iter().map(|x| x.ln() - ln_anchor).sum::<f64>() / r as f64;
    if mean_log_excess <= 0.0 {
        return Err(Error::DegenerateSample(format!(
            "the {} largest observations are tied; mean log excess is zero",
            r + 1
        )));
    }
    let alpha_hat = 1.0 / mean_log_excess;
    let a_hat = (r as f64 / n as f64) * (alpha_hat * ln_anchor).exp();
    TailIndexEstimate::new(alpha_hat, a_hat, r, n)
}

fn clamp_r(raw: f64, n: usize) -> usize {
    let upper = n.saturating_sub(1).max(1);
    if !raw.is_finite() || raw >= upper as f64 {
        return upper;
    }
    (raw.round_ties_even().max(1.0) as usize).min(upper)
}

/// `r = n^{2/3}` rounded half-to-even and clamped to `[1, n − 1]`.
pub fn default_r(n: usize) -> usize {
    clamp_r((n as f64).powf(2.0 / 3.0), n)
}

/// Constant `s` of the MSE-optimal order `r₀ ∼ s n^{2β/(α+2β)}`:
///
/// `s = A^{2β/(α+2β)} (B²)^{−α/(α+2β)} {α(α+β)²/(2β³)}^{α/(α+2β)}`.
pub fn optimal_r_constant(params: &HallParams) -> f64 {
    let (a, alpha, b, beta) = (params.a(), params.alpha(), params.b(), params.beta());
    let d = alpha + 2.0 * beta;
    a.powf(2.0 * beta / d)
        * (b * b).powf(-alpha / d)
        * (alpha * (alpha + beta).powi(2) / (2.0 * beta.powi(3))).powf(alpha / d)
}

/// `r = s n^{2β/(α+2β)}`, with `s` taken from [`optimal_r_constant`] when not
/// supplied; rounded half-to-even and clamped to `[1, n − 1]`.
pub fn theoretical_r(params: &HallParams, n: usize, s: Option<f64>) -> usize {
    let s = s.unwrap_or_else(|| optimal_r_constant(params));
    let (alpha, beta) = (params.alpha(), params.beta());
    clamp_r(s * (n as f64).powf(2.0 * beta / (alpha + 2.0 * beta)), n)
}
