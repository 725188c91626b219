//! Closed-form asymptotic predictors: convergence-rate exponents for the tail
//! and mean-excess estimators, and leading-order MSE expressions.

use serde::{Deserialize, Serialize};

use crate::distributions::{HallParams, TailDistribution, WeibullTailParams};
use crate::error::{domain, Result};
use crate::kernel::KernelSpec;
use crate::tail_index::optimal_r_constant;

/// Why a rate has no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NotApplicable {
    /// The optimal bandwidth does not shrink, so the kernel MSE expansion
    /// breaks down.
    BandwidthDiverges,
    /// A condition behind the rate fails (or no estimator exists).
    AssumptionBroken,
}

/// Polynomial exponent `e` of a rate `n^e (ln n)^{log_power}`, or the reason
/// it is unavailable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateExponent {
    pub value: Option<f64>,
    pub reason: Option<NotApplicable>,
    pub log_power: u32,
}

impl RateExponent {
    pub fn polynomial(value: f64) -> Self {
        Self {
            value: Some(value),
            reason: None,
            log_power: 0,
        }
    }

    pub fn with_log_power(value: f64, log_power: u32) -> Self {
        Self {
            value: Some(value),
            reason: None,
            log_power,
        }
    }

    pub fn not_applicable(reason: NotApplicable) -> Self {
        Self {
            value: None,
            reason: Some(reason),
            log_power: 0,
        }
    }

    pub fn is_applicable(&self) -> bool {
        self.value.is_some()
    }

    /// Table cell: three decimals when rounding changes the value, the exact
    /// short form otherwise (`-0.667`, `-0.8`, `1.75`), and `--` when not
    /// applicable.
    pub fn cell(&self) -> String {
        self.value.map_or_else(|| "--".to_string(), format_rate)
    }
}

/// Rounds half away from zero to three decimals.
pub fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

/// Prints a rate the way rate tables do: three decimals when the value is
/// not already exact at three decimals, otherwise trailing zeros dropped.
pub fn format_rate(v: f64) -> String {
    let r = round3(v);
    let r = if r == 0.0 { 0.0 } else { r };
    if (r - v).abs() > 1e-12 {
        return format!("{r:.3}");
    }
    let s = format!("{r:.3}");
    let s = s.trim_end_matches('0');
    let s = s.strip_suffix('.').unwrap_or(s);
    s.to_string()
}

/// Either tail class, for rate lookups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailClass {
    Hall(HallParams),
    Weibull(WeibullTailParams),
}

/// Rates of the three tail-probability estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRates {
    pub ne: RateExponent,
    pub pt: RateExponent,
    pub pi: RateExponent,
}

/// Rates of the three mean-excess estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MefRates {
    pub ne: RateExponent,
    pub pt: RateExponent,
    pub pi: RateExponent,
}

/// `δ = 1/(2β + α)`: evaluation points sit at `x ∼ C₁ n^δ`.
pub fn delta(params: &HallParams) -> f64 {
    1.0 / (2.0 * params.beta() + params.alpha())
}

/// Relative-MSE rate exponents of the tail estimators at `x ∼ C₁ n^δ`
/// (Hall class) or `x ∼ C₂ (ln n)^{1/κ}` (Weibull class).
///
/// Hall: kernel `δα − 1` when `β > 3/2` (otherwise the bandwidth diverges),
/// piecing together `δα − 1`, plug-in `2δα − 2` times `(ln n)²`.
/// Weibull: kernel and piecing together `−1 + C C₂^κ`; no plug-in exists.
pub fn tail_rate_exponents(class: &TailClass, c2: Option<f64>) -> Result<TailRates> {
    match class {
        TailClass::Hall(p) => {
            let d = delta(p);
            let pt = d * p.alpha() - 1.0;
            let ne = if p.beta() > 1.5 {
                RateExponent::polynomial(pt)
            } else {
                RateExponent::not_applicable(NotApplicable::BandwidthDiverges)
            };
            Ok(TailRates {
                ne,
                pt: RateExponent::polynomial(pt),
                pi: RateExponent::with_log_power(2.0 * d * p.alpha() - 2.0, 2),
            })
        }
        TailClass::Weibull(w) => {
            let Some(c2) = c2 else {
                return domain("Weibull-class rates need C2");
            };
            if !(c2 > 0.0) {
                return domain(format!("C2 must be positive, got {c2}"));
            }
            let e = -1.0 + w.scale_c() * c2.powf(w.kappa());
            Ok(TailRates {
                ne: RateExponent::polynomial(e),
                pt: RateExponent::polynomial(e),
                pi: RateExponent::not_applicable(NotApplicable::AssumptionBroken),
            })
        }
    }
}

// Absorbs rounding in p(α+3) for exact dyadic p.
const BOUNDARY_SLACK: f64 = 1e-12;

/// MSE rate exponents of the mean-excess estimators at `u = n^p`.
///
/// Kernel: `p(α+2) − 1` while `p(α+3) ≤ 1` (the bandwidth `h*` stays
/// bounded); GPD fit: `p(α+2) − 1` when `p(α+2β) > 1`; plug-in:
/// `2p − 1 + α/(2β+α)`.
pub fn mef_rate_exponents(params: &HallParams, p: f64) -> Result<MefRates> {
    if !(p > 0.0 && p.is_finite()) {
        return domain(format!("u = n^p needs p > 0, got {p}"));
    }
    let (alpha, beta) = (params.alpha(), params.beta());
    let poly = p * (alpha + 2.0) - 1.0;
    let ne = if p * (alpha + 3.0) <= 1.0 + BOUNDARY_SLACK {
        RateExponent::polynomial(poly)
    } else {
        RateExponent::not_applicable(NotApplicable::BandwidthDiverges)
    };
    let pt = if p * (alpha + 2.0 * beta) > 1.0 + BOUNDARY_SLACK {
        RateExponent::polynomial(poly)
    } else {
        RateExponent::not_applicable(NotApplicable::AssumptionBroken)
    };
    Ok(MefRates {
        ne,
        pt,
        pi: RateExponent::polynomial(2.0 * p - 1.0 + alpha / (2.0 * beta + alpha)),
    })
}

/// Kernel tail MSE: `{h² f′(x) μ₂ / 2}² + F̄(x)/n`, with `f′` and `F̄` exact.
pub fn predict_mse_cor1(
    dist: &impl TailDistribution,
    n: usize,
    x: f64,
    h: f64,
    k: &KernelSpec,
) -> Result<f64> {
    let bias = h * h * dist.pdf_derivative(x) * k.mu2 / 2.0;
    Ok(bias * bias + dist.tail_prob(x)? / n as f64)
}

/// `ν = (c₁⁻¹ − 1, α(ln c₁ + c₁⁻¹ − 1))`.
pub fn nu(alpha: f64, c1: f64) -> [f64; 2] {
    [1.0 / c1 - 1.0, alpha * (c1.ln() + 1.0 / c1 - 1.0)]
}

/// Asymptotic covariance of the scaled GPD maximum-likelihood estimate
/// `(γ̂, ĉ/c)`: `(1+γ) [[1+γ, −1], [−1, 2]]`. This is the standard
/// regular-case (`γ > −1/2`) result and is used wherever `Σ₀` appears.
pub fn sigma0(gamma: f64) -> [[f64; 2]; 2] {
    let s = 1.0 + gamma;
    [[s * (1.0 + gamma), -s], [-s, 2.0 * s]]
}

fn check_count(n: f64, name: &str) -> Result<()> {
    if n > 0.0 && n.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be positive, got {n}"))
    }
}

/// Relative MSE of the piecing-together tail at `x = c₁u`:
///
/// `[B²{c₁^{−β} + c₂α(α+β)⁻¹(α+β+1)⁻¹ (α−β, α)·ν}² + 1 + α² νᵀΣ₀ν] / N`
/// with `Σ₀ =` [`sigma0`]`(1/α)`.
pub fn predict_relmse_cor3(params: &HallParams, c1: f64, c2: f64, n_exceed: f64) -> Result<f64> {
    if !(c1 >= 1.0) {
        return domain(format!("c1 must be at least 1 (u ≤ x), got {c1}"));
    }
    check_count(n_exceed, "N")?;
    let (alpha, beta, b) = (params.alpha(), params.beta(), params.b());
    let v = nu(alpha, c1);
    let s = sigma0(1.0 / alpha);
    let lin = (alpha - beta) * v[0] + alpha * v[1];
    let bias = c1.powf(-beta) + c2 * alpha / ((alpha + beta) * (alpha + beta + 1.0)) * lin;
    let quad = v[0] * (s[0][0] * v[0] + s[0][1] * v[1]) + v[1] * (s[1][0] * v[0] + s[1][1] * v[1]);
    Ok((b * b * bias * bias + 1.0 + alpha * alpha * quad) / n_exceed)
}

/// Far-tail form (`u = o(x)`), relative MSE scaled by `{ln(1 + x/u)}⁻²`:
///
/// `[B²{c₂α(α+β)⁻¹(α+β+1)⁻¹(α+1)(1−β)}² + α²(α+1)²] / N`.
pub fn predict_relmse_cor3_far(params: &HallParams, c2: f64, n_exceed: f64) -> Result<f64> {
    check_count(n_exceed, "N")?;
    let (alpha, beta, b) = (params.alpha(), params.beta(), params.b());
    let bias = c2 * alpha / ((alpha + beta) * (alpha + beta + 1.0)) * (alpha + 1.0) * (1.0 - beta);
    Ok((b * b * bias * bias + alpha * alpha * (alpha + 1.0).powi(2)) / n_exceed)
}

/// Relative MSE of the piecing-together tail for the Weibull class at
/// `x = u(1 + c₃(κC)⁻¹u^{−κ})`:
///
/// `[c₃²c₅²{−(4 − k) + c₃(5 + 2k)/2 + c₃²(2 + k)/6 − c₃³/8}² + 1 + 2c₃² − c₃³ + c₃⁴/4] / N`
/// with `k = κ(1 − κ)`.
pub fn predict_relmse_cor4(
    params: &WeibullTailParams,
    c3: f64,
    c5: f64,
    n_exceed: f64,
) -> Result<f64> {
    if !(c3 > 0.0) {
        return domain(format!("c3 must be positive, got {c3}"));
    }
    check_count(n_exceed, "N")?;
    let kk = params.kappa() * (1.0 - params.kappa());
    let poly =
        -(4.0 - kk) + c3 * (5.0 + 2.0 * kk) / 2.0 + c3 * c3 * (2.0 + kk) / 6.0 - c3.powi(3) / 8.0;
    let bias2 = c3 * c3 * c5 * c5 * poly * poly;
    let var = 1.0 + 2.0 * c3 * c3 - c3.powi(3) + c3.powi(4) / 4.0;
    Ok((bias2 + var) / n_exceed)
}

/// Plug-in tail MSE at `ln x / ln n → c₆` with the optimal `r`:
///
/// `½ s⁻¹ A² α² β⁻¹ (α+2β)⁻¹ {c₆(α+2β) − 1}² n⁻² (ln n)²`.
pub fn predict_mse_prop1(params: &HallParams, n: f64, c6: f64) -> Result<f64> {
    if params.b() == 0.0 {
        return domain("B = 0 leaves the optimal-r constant undefined");
    }
    check_count(n, "n")?;
    let (a, alpha, beta) = (params.a(), params.alpha(), params.beta());
    let s = optimal_r_constant(params);
    let d = alpha + 2.0 * beta;
    let bracket = c6 * d - 1.0;
    Ok(0.5 / s * a * a * alpha * alpha / (beta * d)
        * bracket
        * bracket
        * n.powi(-2)
        * n.ln().powi(2))
}

/// Kernel mean-excess MSE for the Hall class:
///
/// `h⁴μ₂²α²(α−1)⁻²u⁻² + n⁻¹ 2A⁻¹(α−1)⁻² u^{α+2} {(α−1)/(α−2) − αhψ/u}`.
///
/// Needs `α > 2` for the variance term to exist.
pub fn predict_mse_thm1(
    params: &HallParams,
    n: f64,
    u: f64,
    h: f64,
    k: &KernelSpec,
) -> Result<f64> {
    let (a, alpha) = (params.a(), params.alpha());
    if !(alpha > 2.0) {
        return domain(format!(
            "α = {alpha}: the variance term carries (α − 2)⁻¹ and needs α > 2"
        ));
    }
    if !(u > 0.0) {
        return domain(format!("threshold must be positive, got {u}"));
    }
    check_count(n, "n")?;
    let am1 = alpha - 1.0;
    let bias2 = h.powi(4) * k.mu2 * k.mu2 * alpha * alpha / (am1 * am1 * u * u);
    let var = 2.0 / (a * am1 * am1) * u.powf(alpha + 2.0) / n
        * (am1 / (alpha - 2.0) - alpha * h * k.psi / u);
    Ok(bias2 + var)
}

/// Order-of-magnitude envelopes of the Weibull-class kernel mean-excess MSE:
/// the squared bias is `o(h⁴μ₂²u^{4κ−2})` and the variance
/// `o(n⁻¹u² exp(Cu^κ))`. These are bounds, not predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thm1Envelope {
    pub bias_sq_order: f64,
    pub variance_order: f64,
    pub assertable: bool,
}

pub fn thm1_weibull_envelope(
    params: &WeibullTailParams,
    n: f64,
    u: f64,
    h: f64,
    k: &KernelSpec,
) -> Thm1Envelope {
    let kappa = params.kappa();
    Thm1Envelope {
        bias_sq_order: h.powi(4) * k.mu2 * k.mu2 * u.powf(4.0 * kappa - 2.0),
        variance_order: u * u * (params.scale_c() * u.powf(kappa)).exp() / n,
        assertable: false,
    }
}

/// `λ_n = −√n A^{1/2} B β (α+β)⁻¹ u^{−α/2−β}`.
pub fn lambda_n_hall(params: &HallParams, n: f64, u: f64) -> f64 {
    let (a, alpha, b, beta) = (params.a(), params.alpha(), params.b(), params.beta());
    -n.sqrt() * a.sqrt() * b * beta / (alpha + beta) * u.powf(-alpha / 2.0 - beta)
}

/// `λ_n = √n (Cκ)⁻² u^{−2κ} exp(−Cu^κ/2)`.
pub fn lambda_n_weibull(params: &WeibullTailParams, n: f64, u: f64) -> f64 {
    let (c, kappa) = (params.scale_c(), params.kappa());
    n.sqrt() * (c * kappa).powi(-2) * u.powf(-2.0 * kappa) * (-0.5 * c * u.powf(kappa)).exp()
}

/// GPD mean-excess MSE, Hall class, with `γ = 1/α` and `e(u)` supplied:
///
/// `[λ_n² e²(1+γ)²{1 + γ(1−γ)⁻¹(1−β)(α+β+1)⁻¹}² + e²(1+γ)(1−γ)²(2γ²−γ+1)] / N*`.
pub fn predict_mse_cor6_hall(
    params: &HallParams,
    u: f64,
    n: f64,
    n_star: f64,
    e_u: f64,
) -> Result<f64> {
    let (alpha, beta) = (params.alpha(), params.beta());
    if !(alpha > 1.0) {
        return domain(format!("needs α > 1 (γ < 1), got α = {alpha}"));
    }
    check_count(n_star, "N*")?;
    let g = 1.0 / alpha;
    let lam = lambda_n_hall(params, n, u);
    let mean_factor = (1.0 + g) * (1.0 + g / (1.0 - g) * (1.0 - beta) / (alpha + beta + 1.0));
    let bias2 = lam * lam * e_u * e_u * mean_factor * mean_factor;
    let var = e_u * e_u * (1.0 + g) * (1.0 - g).powi(2) * (2.0 * g * g - g + 1.0);
    Ok((bias2 + var) / n_star)
}

/// GPD mean-excess MSE, Weibull class:
/// `[λ_n² u²(κ−1)² + C⁻²κ⁻²u^{2(1−κ)}] / N*`.
pub fn predict_mse_cor6_weibull(
    params: &WeibullTailParams,
    u: f64,
    n: f64,
    n_star: f64,
) -> Result<f64> {
    check_count(n_star, "N*")?;
    let (c, kappa) = (params.scale_c(), params.kappa());
    let lam = lambda_n_weibull(params, n, u);
    let bias2 = lam * lam * u * u * (kappa - 1.0).powi(2);
    let var = (c * kappa).powi(-2) * u.powf(2.0 * (1.0 - kappa));
    Ok((bias2 + var) / n_star)
}

/// Plug-in mean-excess MSE with `r ∼ s n^{2β/(2β+α)}`:
///
/// `u² n^{−1+α/(2β+α)} α²(α−1)⁻⁴ {A^{−2β/α}B²β²(α+β)⁻² s^{2β/α} + s⁻¹}`.
pub fn predict_mse_cor7(params: &HallParams, u: f64, n: f64, s: f64) -> Result<f64> {
    let (a, alpha, b, beta) = (params.a(), params.alpha(), params.b(), params.beta());
    if !(alpha > 1.0) {
        return domain(format!("needs α > 1, got α = {alpha}"));
    }
    if !(s > 0.0) {
        return domain(format!("s must be positive, got {s}"));
    }
    check_count(n, "n")?;
    let bias2 = a.powf(-2.0 * beta / alpha) * b * b * beta * beta / (alpha + beta).powi(2)
        * s.powf(2.0 * beta / alpha);
    Ok(
        u * u * n.powf(-1.0 + alpha / (2.0 * beta + alpha)) * alpha * alpha / (alpha - 1.0).powi(4)
            * (bias2 + 1.0 / s),
    )
}

/// Burr `(c, ℓ)` rows of the tail-rate table, in printed order.
pub const TAIL_TABLE_BURR_ROWS: [(f64, f64); 9] = [
    (0.5, 0.5),
    (1.0, 0.5),
    (3.0, 0.5),
    (0.5, 1.0),
    (1.0, 1.0),
    (3.0, 1.0),
    (0.5, 3.0),
    (1.0, 3.0),
    (3.0, 3.0),
];

/// `C₂` blocks and `κ` rows of the Weibull tail-rate table (`C = 1`).
pub const TAIL_TABLE_WEIBULL_C2: [f64; 3] = [0.2, 1.0 / 3.0, 0.5];
pub const TAIL_TABLE_WEIBULL_KAPPA: [f64; 4] = [0.5, 1.0, 3.0, 10.0];

/// Threshold exponents `p` (`u = n^p`) of the mean-excess rate table.
pub const MEF_TABLE_P: [f64; 4] = [1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0, 3.0 / 8.0];

/// One Burr row of the tail-rate table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurrRateRow {
    pub c: f64,
    pub ell: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rates: TailRates,
}

/// One Weibull row of the tail-rate table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullRateRow {
    pub kappa: f64,
    pub scale_c: f64,
    pub c2: f64,
    pub rates: TailRates,
}

/// One row of the mean-excess rate table: rates at each `p` of [`MEF_TABLE_P`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MefRateRow {
    pub c: f64,
    pub ell: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rates: [MefRates; 4],
}

fn burr_hall(c: f64, ell: f64) -> HallParams {
    // every table row has c ≥ 1/2
    HallParams::new(1.0, c * ell, -ell, c).expect("table rows lie in the Hall class")
}

/// Burr block of the tail-rate table.
pub fn burr_tail_rate_rows() -> Vec<BurrRateRow> {
    TAIL_TABLE_BURR_ROWS
        .iter()
        .map(|&(c, ell)| {
            let p = burr_hall(c, ell);
            BurrRateRow {
                c,
                ell,
                alpha: p.alpha(),
                beta: p.beta(),
                rates: tail_rate_exponents(&TailClass::Hall(p), None).expect("Hall rates"),
            }
        })
        .collect()
}

/// Weibull block of the tail-rate table (`C = 1`).
pub fn weibull_tail_rate_rows() -> Vec<WeibullRateRow> {
    let mut rows = Vec::new();
    for c2 in TAIL_TABLE_WEIBULL_C2 {
        for kappa in TAIL_TABLE_WEIBULL_KAPPA {
            let w = WeibullTailParams::new(1.0, kappa).expect("table row");
            rows.push(WeibullRateRow {
                kappa,
                scale_c: 1.0,
                c2,
                rates: tail_rate_exponents(&TailClass::Weibull(w), Some(c2))
                    .expect("Weibull rates"),
            });
        }
    }
    rows
}

/// The mean-excess rate table.
pub fn mef_rate_rows() -> Vec<MefRateRow> {
    TAIL_TABLE_BURR_ROWS
        .iter()
        .map(|&(c, ell)| {
            let p = burr_hall(c, ell);
            MefRateRow {
                c,
                ell,
                alpha: p.alpha(),
                beta: p.beta(),
                rates: MEF_TABLE_P.map(|q| mef_rate_exponents(&p, q).expect("p > 0")),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hall(alpha: f64, beta: f64) -> HallParams {
        HallParams::rates_only(alpha, beta).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert!((delta(&hall(1.0, 1.0)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((delta(&hall(3.0, 3.0)) - 1.0 / 9.0).abs() < 1e-15);
        assert!((delta(&hall(1.5, 3.0)) - 2.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn tail_rate_examples() {
        let r = tail_rate_exponents(&TailClass::Hall(hall(1.0, 1.0)), None).unwrap();
        assert_eq!(r.ne.cell(), "--");
        assert_eq!(r.pt.cell(), "-0.667");
        assert_eq!(r.pi.cell(), "-1.333");
        assert_eq!(r.pi.log_power, 2);
        let r = tail_rate_exponents(&TailClass::Hall(hall(1.5, 3.0)), None).unwrap();
        assert_eq!(
            (r.ne.cell(), r.pt.cell(), r.pi.cell()),
            ("-0.8".into(), "-0.8".into(), "-1.6".into())
        );
        let w = WeibullTailParams::new(1.0, 0.5).unwrap();
        let r = tail_rate_exponents(&TailClass::Weibull(w), Some(0.2)).unwrap();
        assert_eq!(r.ne.cell(), "-0.553");
        assert_eq!(r.pi.reason, Some(NotApplicable::AssumptionBroken));
        assert!(tail_rate_exponents(&TailClass::Weibull(w), None).is_err());
    }

    #[test]
    fn mef_rate_examples() {
        let r = mef_rate_exponents(&hall(1.0, 1.0), 1.0 / 16.0).unwrap();
        assert_eq!(r.ne.cell(), "-0.813");
        assert_eq!(r.pt.cell(), "--");
        assert_eq!(r.pi.cell(), "-0.542");
        let r = mef_rate_exponents(&hall(1.0, 1.0), 3.0 / 8.0).unwrap();
        assert_eq!(r.pt.cell(), "0.125");
        let r = mef_rate_exponents(&hall(9.0, 3.0), 1.0 / 16.0).unwrap();
        assert_eq!(r.ne.cell(), "-0.313");
        // p(α+3) = 1 exactly keeps the kernel rate
        let r = mef_rate_exponents(&hall(1.0, 1.0), 0.25).unwrap();
        assert_eq!(r.ne.cell(), "-0.25");
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(format_rate(-0.5625), "-0.563");
        assert_eq!(format_rate(0.3125), "0.313");
        assert_eq!(format_rate(-1.0 + 0.2f64.powi(10)), "-1.000");
        assert_eq!(format_rate(1.75), "1.75");
        assert_eq!(format_rate(-0.05), "-0.05");
    }

    #[test]
    fn cor4_examples() {
        let w = WeibullTailParams::new(1.0, 1.0).unwrap();
        assert!((predict_relmse_cor4(&w, 1e-9, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((predict_relmse_cor4(&w, 1.0, 0.0, 10.0).unwrap() - 0.225).abs() < 1e-15);
        assert!((predict_relmse_cor4(&w, 2.0, 0.0, 5.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cor3_at_c1_one() {
        let p = HallParams::new(1.0, 2.0, -0.7, 1.5).unwrap();
        let v = predict_relmse_cor3(&p, 1.0, 0.8, 50.0).unwrap();
        assert!((v - (0.49 + 1.0) / 50.0).abs() < 1e-15);
    }

    #[test]
    fn cor3_far_tail_bias_vanishes_at_beta_one() {
        let p = HallParams::new(1.0, 2.0, -3.0, 1.0).unwrap();
        for c2 in [0.1, 1.0, 7.0] {
            let v = predict_relmse_cor3_far(&p, c2, 1.0).unwrap();
            assert!((v - 4.0 * 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prop1_examples() {
        let p = HallParams::new(1.0, 1.0, -1.0, 1.0).unwrap();
        assert_eq!(predict_mse_prop1(&p, 1000.0, 1.0 / 3.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let v = predict_mse_prop1(&p, e, 1.0).unwrap();
        let expect = 0.5 * 2f64.powf(-1.0 / 3.0) / 3.0 * 4.0 * e.powi(-2);
        assert!((v - expect).abs() < 1e-15);
    }

    #[test]
    fn thm1_pieces() {
        let k = KernelSpec::gaussian();
        let p = HallParams::new(1.0, 3.0, -1.0, 1.0).unwrap();
        let v0 = predict_mse_thm1(&p, 1e4, 2.0, 0.0, &k).unwrap();
        assert!((v0 - 2.0 / 4.0 * 32.0 / 1e4 * 2.0).abs() < 1e-15);
        let v1 = predict_mse_thm1(&p, 1e4, 4.0, 0.0, &k).unwrap();
        assert!((v1 / v0 - 32.0).abs() < 1e-12);
        assert!(predict_mse_thm1(&hall(2.0, 1.0), 1e4, 2.0, 0.1, &k).is_err());
    }

    #[test]
    fn cor6_examples() {
        let w = WeibullTailParams::new(1.0, 1.0).unwrap();
        let v = predict_mse_cor6_weibull(&w, 3.0, 1e4, 100.0).unwrap();
        assert!((v - 0.01).abs() < 1e-15);
        // γ = 1/2 and e(u) = 2: variance (4)(3/2)(1/4)(1) = 1.5
        let p = HallParams::new(1.0, 2.0, -1e-300, 1.0).unwrap();
        let v = predict_mse_cor6_hall(&p, 5.0, 1e4, 10.0, 2.0).unwrap();
        assert!((v - 0.15).abs() < 1e-12);
    }

    #[test]
    fn cor7_small_b_keeps_variance_only() {
        let p = HallParams::new(1.0, 3.0, -1e-200, 1.0).unwrap();
        let v = predict_mse_cor7(&p, 2.0, 1e4, 0.5).unwrap();
        let expect = 4.0 * 1e4f64.powf(-1.0 + 0.6) * 9.0 / 16.0 * 2.0;
        assert!((v - expect).abs() < 1e-12 * expect);
    }
}
