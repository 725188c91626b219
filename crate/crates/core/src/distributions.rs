//! Reference distributions with exact tails.
//!
//! Burr (`1 − F(x) = (1 + x^c)^{−ℓ}`), Weibull (`exp(−C x^κ)`) and the
//! generalized Pareto law, each with a closed-form quantile, an
//! inverse-transform sampler and a mean-excess oracle. The Burr family lies in
//! the Hall class with `α = cℓ`, `β = c`; the Weibull family meets the
//! Weibull-class tail condition exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature;

/// Operations shared by every reference distribution.
pub trait TailDistribution {
    /// `1 − F(x)` for `x ≥ 0`.
    fn tail_prob(&self, x: f64) -> Result<f64>;

    /// `F^{-1}(p)` for `p ∈ (0, 1)`.
    fn quantile(&self, p: f64) -> Result<f64>;

    /// The `x` with `tail_prob(x) = q`, for `q ∈ (0, 1]`. Used by the sampler
    /// so deep-tail draws keep full relative precision.
    fn inverse_tail(&self, q: f64) -> f64;

    fn pdf(&self, x: f64) -> f64;

    /// `f'(x)`.
    fn pdf_derivative(&self, x: f64) -> f64;

    /// `ln(tail(u + t) / tail(u))` for `t ≥ 0`, evaluated without forming the
    /// two tails separately.
    fn log_tail_ratio(&self, u: f64, t: f64) -> f64;

    fn has_finite_mef(&self) -> bool;

    fn closed_form_mef(&self, _u: f64) -> Option<f64> {
        None
    }

    fn extreme_value_index(&self) -> f64;
}

fn check_nonneg(x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        domain(format!("x = {x} outside [0, ∞)"))
    }
}

fn check_prob(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        domain(format!("probability {p} outside (0, 1)"))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be positive and finite, got {v}"))
    }
}

/// Burr XII law with tail `(1 + x^c)^{−ℓ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurrDist {
    c: f64,
    ell: f64,
}

impl BurrDist {
    pub fn new(c: f64, ell: f64) -> Result<Self> {
        positive("c", c)?;
        positive("ell", ell)?;
        Ok(Self { c, ell })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }
}

impl TailDistribution for BurrDist {
    fn tail_prob(&self, x: f64) -> Result<f64> {
        check_nonneg(x)?;
        Ok((-self.ell * x.powf(self.c).ln_1p()).exp())
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_prob(p)?;
        Ok((-(-p).ln_1p() / self.ell).exp_m1().powf(1.0 / self.c))
    }

    fn inverse_tail(&self, q: f64) -> f64 {
        (-q.ln() / self.ell).exp_m1().powf(1.0 / self.c)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let xc = x.powf(self.c);
        self.ell * self.c * x.powf(self.c - 1.0) * (-(self.ell + 1.0) * xc.ln_1p()).exp()
    }

    fn pdf_derivative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let xc = x.powf(self.c);
        let score = (self.c - 1.0) / x - (self.ell + 1.0) * self.c * xc / (x * (1.0 + xc));
        self.pdf(x) * score
    }

    fn log_tail_ratio(&self, u: f64, t: f64) -> f64 {
        -self.ell * ((u + t).powf(self.c).ln_1p() - u.powf(self.c).ln_1p())
    }

    fn has_finite_mef(&self) -> bool {
        self.c * self.ell > 1.0
    }

    fn extreme_value_index(&self) -> f64 {
        1.0 / (self.c * self.ell)
    }
}

/// Weibull law with tail `exp(−C x^κ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullDist {
    scale_c: f64,
    kappa: f64,
}

impl WeibullDist {
    pub fn new(scale_c: f64, kappa: f64) -> Result<Self> {
        positive("C", scale_c)?;
        positive("kappa", kappa)?;
        Ok(Self { scale_c, kappa })
    }

    /// The exponent scale `C`.
    pub fn scale_c(&self) -> f64 {
        self.scale_c
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn tail_params(&self) -> WeibullTailParams {
        WeibullTailParams {
            scale_c: self.scale_c,
            kappa: self.kappa,
        }
    }
}

impl TailDistribution for WeibullDist {
    fn tail_prob(&self, x: f64) -> Result<f64> {
        check_nonneg(x)?;
        Ok((-self.scale_c * x.powf(self.kappa)).exp())
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_prob(p)?;
        Ok((-(-p).ln_1p() / self.scale_c).powf(1.0 / self.kappa))
    }

    fn inverse_tail(&self, q: f64) -> f64 {
        (-q.ln() / self.scale_c).powf(1.0 / self.kappa)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let (c, k) = (self.scale_c, self.kappa);
        c * k * x.powf(k - 1.0) * (-c * x.powf(k)).exp()
    }

    fn pdf_derivative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let (c, k) = (self.scale_c, self.kappa);
        self.pdf(x) * ((k - 1.0) / x - c * k * x.powf(k - 1.0))
    }

    fn log_tail_ratio(&self, u: f64, t: f64) -> f64 {
        let (c, k) = (self.scale_c, self.kappa);
        if u > 0.0 {
            -c * u.powf(k) * (k * (t / u).ln_1p()).exp_m1()
        } else {
            -c * t.powf(k)
        }
    }

    fn has_finite_mef(&self) -> bool {
        true
    }

    fn closed_form_mef(&self, _u: f64) -> Option<f64> {
        (self.kappa == 1.0).then(|| 1.0 / self.scale_c)
    }

    fn extreme_value_index(&self) -> f64 {
        0.0
    }
}

/// Generalized Pareto law `H_{γ,c}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdDist {
    gamma: f64,
    scale: f64,
}

impl GpdDist {
    pub fn new(gamma: f64, scale: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return domain(format!("gamma must be finite, got {gamma}"));
        }
        positive("scale", scale)?;
        Ok(Self { gamma, scale })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Right end of the support (`∞` unless `γ < 0`).
    pub fn upper_endpoint(&self) -> f64 {
        if self.gamma < 0.0 {
            -self.scale / self.gamma
        } else {
            f64::INFINITY
        }
    }
}

impl TailDistribution for GpdDist {
    fn tail_prob(&self, x: f64) -> Result<f64> {
        check_nonneg(x)?;
        if x > self.upper_endpoint() {
            return domain(format!(
                "x = {x} beyond the GPD support end {}",
                self.upper_endpoint()
            ));
        }
        Ok(gpd_tail(self.gamma, self.scale, x))
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_prob(p)?;
        let log_q = (-p).ln_1p();
        Ok(gpd_inverse_log_tail(self.gamma, self.scale, log_q))
    }

    fn inverse_tail(&self, q: f64) -> f64 {
        gpd_inverse_log_tail(self.gamma, self.scale, q.ln())
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 || x > self.upper_endpoint() {
            return 0.0;
        }
        let (g, c) = (self.gamma, self.scale);
        if g == 0.0 {
            (-x / c).exp() / c
        } else {
            (-(1.0 / g + 1.0) * (g * x / c).ln_1p()).exp() / c
        }
    }

    fn pdf_derivative(&self, x: f64) -> f64 {
        if x < 0.0 || x > self.upper_endpoint() {
            return 0.0;
        }
        let (g, c) = (self.gamma, self.scale);
        -self.pdf(x) * (1.0 + g) / (c + g * x)
    }

    fn log_tail_ratio(&self, u: f64, t: f64) -> f64 {
        let (g, c) = (self.gamma, self.scale);
        if g == 0.0 {
            -t / c
        } else {
            let arg = g * t / (c + g * u);
            if arg <= -1.0 {
                f64::NEG_INFINITY
            } else {
                -arg.ln_1p() / g
            }
        }
    }

    fn has_finite_mef(&self) -> bool {
        self.gamma < 1.0
    }

    fn closed_form_mef(&self, u: f64) -> Option<f64> {
        (self.gamma < 1.0).then(|| (self.scale + self.gamma * u) / (1.0 - self.gamma))
    }

    fn extreme_value_index(&self) -> f64 {
        self.gamma
    }
}

/// GPD tail `1 − H_{γ,c}(y)`, zero past the support end.
pub(crate) fn gpd_tail(gamma: f64, scale: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return 1.0;
    }
    if gamma == 0.0 {
        return (-y / scale).exp();
    }
    let arg = gamma * y / scale;
    if arg <= -1.0 {
        0.0
    } else {
        (-arg.ln_1p() / gamma).exp()
    }
}

fn gpd_inverse_log_tail(gamma: f64, scale: f64, log_q: f64) -> f64 {
    if gamma == 0.0 {
        -scale * log_q
    } else {
        scale * (-gamma * log_q).exp_m1() / gamma
    }
}

/// Any of the three reference laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Distribution {
    Burr(BurrDist),
    Weibull(WeibullDist),
    Gpd(GpdDist),
}

impl Distribution {
    fn inner(&self) -> &dyn TailDistribution {
        match self {
            Distribution::Burr(d) => d,
            Distribution::Weibull(d) => d,
            Distribution::Gpd(d) => d,
        }
    }

    /// Short label such as `Burr(3,1/2)` used in reports.
    pub fn label(&self) -> String {
        match self {
            Distribution::Burr(d) => format!("Burr({},{})", fmt_param(d.c), fmt_param(d.ell)),
            Distribution::Weibull(d) => {
                format!("Weibull({},{})", fmt_param(d.kappa), fmt_param(d.scale_c))
            }
            Distribution::Gpd(d) => format!("GPD({},{})", fmt_param(d.gamma), fmt_param(d.scale)),
        }
    }
}

/// Prints simple fractions the way the tables do (`1/2`, `1/3`, ...).
pub fn fmt_param(v: f64) -> String {
    for den in 2..=16u32 {
        let num = v * den as f64;
        if (num - num.round()).abs() < 1e-12 && num.round() != 0.0 && (v.fract() != 0.0) {
            return format!("{}/{}", num.round() as i64, den);
        }
    }
    if v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

impl TailDistribution for Distribution {
    fn tail_prob(&self, x: f64) -> Result<f64> {
        self.inner().tail_prob(x)
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        self.inner().quantile(p)
    }
    fn inverse_tail(&self, q: f64) -> f64 {
        self.inner().inverse_tail(q)
    }
    fn pdf(&self, x: f64) -> f64 {
        self.inner().pdf(x)
    }
    fn pdf_derivative(&self, x: f64) -> f64 {
        self.inner().pdf_derivative(x)
    }
    fn log_tail_ratio(&self, u: f64, t: f64) -> f64 {
        self.inner().log_tail_ratio(u, t)
    }
    fn has_finite_mef(&self) -> bool {
        self.inner().has_finite_mef()
    }
    fn closed_form_mef(&self, u: f64) -> Option<f64> {
        self.inner().closed_form_mef(u)
    }
    fn extreme_value_index(&self) -> f64 {
        self.inner().extreme_value_index()
    }
}

impl From<BurrDist> for Distribution {
    fn from(d: BurrDist) -> Self {
        Distribution::Burr(d)
    }
}
impl From<WeibullDist> for Distribution {
    fn from(d: WeibullDist) -> Self {
        Distribution::Weibull(d)
    }
}
impl From<GpdDist> for Distribution {
    fn from(d: GpdDist) -> Self {
        Distribution::Gpd(d)
    }
}

/// Hall-class parameters: `1 − F(x) ≈ A x^{−α}(1 + B x^{−β})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HallParams {
    a: f64,
    alpha: f64,
    b: f64,
    beta: f64,
}

impl HallParams {
    pub fn new(a: f64, alpha: f64, b: f64, beta: f64) -> Result<Self> {
        positive("A", a)?;
        positive("alpha", alpha)?;
        if b == 0.0 || !b.is_finite() {
            return domain(format!("B must be nonzero and finite, got {b}"));
        }
        if !(beta >= 0.5 && beta.is_finite()) {
            return domain(format!("beta must be at least 1/2, got {beta}"));
        }
        Ok(Self { a, alpha, b, beta })
    }

    /// Rate-only parameters where `A` and `B` play no role (rate tables).
    pub fn rates_only(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(1.0, alpha, -1.0, beta)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Extreme value index `γ = 1/α`.
    pub fn gamma_of(&self) -> f64 {
        1.0 / self.alpha
    }
}

/// Weibull-class parameters: `1 − F(x) ≈ exp(−C x^κ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullTailParams {
    scale_c: f64,
    kappa: f64,
}

impl WeibullTailParams {
    pub fn new(scale_c: f64, kappa: f64) -> Result<Self> {
        positive("C", scale_c)?;
        positive("kappa", kappa)?;
        Ok(Self { scale_c, kappa })
    }
    pub fn scale_c(&self) -> f64 {
        self.scale_c
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn gamma_of(&self) -> f64 {
        0.0
    }
}

/// `1 − F(x)`.
pub fn tail_prob(dist: &impl TailDistribution, x: f64) -> Result<f64> {
    dist.tail_prob(x)
}

/// `F^{-1}(p)`.
pub fn quantile(dist: &impl TailDistribution, p: f64) -> Result<f64> {
    dist.quantile(p)
}

/// `n` i.i.d. draws by inverse transform from a ChaCha8 stream keyed by
/// `seed`. The same seed always yields the same vector.
pub fn sample(dist: &(impl TailDistribution + ?Sized), n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            // 1 − U lies in (0, 1]
            let q = 1.0 - rng.random::<f64>();
            dist.inverse_tail(q)
        })
        .collect()
}

/// Mean excess `e(u) = E[X − u | X > u]`.
///
/// Uses the closed form where one exists (GPD; Weibull with `κ = 1`) and
/// [`mef_by_quadrature`] otherwise.
pub fn true_mef(dist: &impl TailDistribution, u: f64) -> Result<f64> {
    check_nonneg(u)?;
    if !dist.has_finite_mef() {
        return domain("mean excess is infinite for this law (extreme value index ≥ 1)");
    }
    match dist.closed_form_mef(u) {
        Some(v) => Ok(v),
        None => mef_by_quadrature(dist, u),
    }
}

const MEF_REL_TOL: f64 = 1e-12;
const LOG_V_MIN: f64 = -120.0;
const LOG_V_MAX: f64 = 700.0;
const LOG_V_STEP: f64 = 0.25;
// integrand mass below e^{-60} of its peak is dropped
const LOG_DYNAMIC_RANGE: f64 = 60.0;

/// `e(u) = ∫₀^∞ tail(u + t) dt / tail(u)` by adaptive quadrature.
///
/// Substitutes `t = e^v`, which turns algebraic tail decay into exponential
/// decay in `v`, then integrates over the window where the integrand is
/// within `e^{60}` of its peak. A power-law remainder closes the integral
/// when the integrand is still decaying at `v = 700`.
pub fn mef_by_quadrature(dist: &(impl TailDistribution + ?Sized), u: f64) -> Result<f64> {
    check_nonneg(u)?;
    if !dist.has_finite_mef() {
        return domain("mean excess is infinite for this law (extreme value index ≥ 1)");
    }
    let log_g = |v: f64| dist.log_tail_ratio(u, v.exp()) + v;

    let steps = ((LOG_V_MAX - LOG_V_MIN) / LOG_V_STEP) as usize;
    let grid: Vec<(f64, f64)> = (0..=steps)
        .map(|i| {
            let v = LOG_V_MIN + i as f64 * LOG_V_STEP;
            (v, log_g(v))
        })
        .collect();
    let peak = grid
        .iter()
        .map(|&(_, lg)| lg)
        .filter(|lg| !lg.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::Numerical(format!(
            "mean-excess integrand has no finite peak at u = {u}"
        )));
    }
    let floor = peak - LOG_DYNAMIC_RANGE;
    let first = grid.iter().position(|&(_, lg)| lg > floor).unwrap_or(0);
    let last = grid
        .iter()
        .rposition(|&(_, lg)| lg > floor)
        .unwrap_or(steps);
    let lo = grid[first.saturating_sub(1)].0;
    let hi = grid[(last + 1).min(steps)].0;

    let r = quadrature::integrate(|v| log_g(v).exp(), lo, hi, MEF_REL_TOL, 0.0, 4000);
    if !r.converged {
        return Err(Error::Numerical(format!(
            "mean-excess quadrature did not converge at u = {u} (error {:.3e})",
            r.abs_error
        )));
    }
    let mut value = r.value;
    if last >= steps {
        let slope = grid[steps - 1].1 - grid[steps].1;
        if slope <= 0.0 {
            return Err(Error::Numerical(
                "mean-excess integrand not decaying at the truncation point".into(),
            ));
        }
        value += grid[steps].1.exp() * LOG_V_STEP / slope;
    }
    Ok(value)
}

/// Hall-class expansion of a Burr law: `(1 + x^c)^{−ℓ} = x^{−cℓ}(1 − ℓ x^{−c} + …)`,
/// so `A = 1`, `α = cℓ`, `B = −ℓ`, `β = c`.
///
/// Fails when `c < 1/2`, which leaves the Hall class as defined (`β ≥ 1/2`).
pub fn hall_params_of_burr(dist: &BurrDist) -> Result<HallParams> {
    HallParams::new(1.0, dist.c * dist.ell, -dist.ell, dist.c)
}
