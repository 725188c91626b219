//! The composite estimators: tail probability by kernel smoothing (global or
//! pointwise bandwidth), by piecing together the empirical tail with a fitted
//! GPD, and by Hall plug-in; mean excess by the same three routes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gpd_fit::{fit_pot, GpdParams};
use crate::kernel::{
    al_bandwidth, kernel_mef, kernel_tail, mef_bandwidth_plugin, pointwise_bandwidth_plugin,
    Bandwidth, KernelSpec,
};
use crate::sample::SortedSample;
use crate::tail_index::TailIndexEstimate;

/// Estimator labels as they appear in table columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Estimator {
    /// Hall plug-in.
    Pi,
    /// Piecing together (for the mean excess: the GPD estimate `ĉ/(1 − γ̃)`).
    Pt,
    /// Kernel estimate with the global plug-in bandwidth.
    Al,
    /// Kernel estimate with the pointwise bandwidth at `(Â, α̂)`.
    Pb,
}

impl Estimator {
    pub const ALL: [Estimator; 4] = [Estimator::Pi, Estimator::Pt, Estimator::Al, Estimator::Pb];

    pub fn label(self) -> &'static str {
        match self {
            Estimator::Pi => "PI",
            Estimator::Pt => "PT",
            Estimator::Al => "AL",
            Estimator::Pb => "PB",
        }
    }

    pub fn needs_tail_index(self) -> bool {
        matches!(self, Estimator::Pi | Estimator::Pb)
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "PI" => Ok(Estimator::Pi),
            "PT" | "PE" => Ok(Estimator::Pt),
            "AL" | "NE" => Ok(Estimator::Al),
            "PB" => Ok(Estimator::Pb),
            other => Err(Error::Config(format!("unknown estimator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Tail,
    Mef,
}

/// Kernel bandwidth choice for the nonparametric estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeBandwidth {
    Al,
    Pb,
}

/// Conditions worth knowing about an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    InsufficientExceedances,
    FitNotConverged,
    GammaAtBoundary,
    BandwidthCapped,
    BandwidthOutsideValidity,
    Clamped,
    MefNonexistent,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// The estimate before any clamping to `[0, 1]`.
    pub raw_value: f64,
    pub bandwidth: Option<Bandwidth>,
    pub n_exceed: Option<usize>,
    pub r: Option<usize>,
    pub alpha_hat: Option<f64>,
    pub a_hat: Option<f64>,
    pub gpd: Option<GpdParams>,
    pub fit_converged: Option<bool>,
    pub flags: Vec<Flag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub estimator: Estimator,
    pub quantity: Quantity,
    /// Reported value: probabilities clamped to `[0, 1]`.
    pub value: f64,
    pub diagnostics: Diagnostics,
}

impl EstimateRecord {
    pub fn is_flagged(&self) -> bool {
        !self.diagnostics.flags.is_empty()
    }
}

fn with_tail_index(d: &mut Diagnostics, est: &TailIndexEstimate) {
    d.r = Some(est.r);
    d.alpha_hat = Some(est.alpha_hat);
    d.a_hat = Some(est.a_hat);
}

fn note_bandwidth(d: &mut Diagnostics, bw: Bandwidth) {
    if bw.capped {
        d.flags.push(Flag::BandwidthCapped);
    }
    if !bw.valid {
        d.flags.push(Flag::BandwidthOutsideValidity);
    }
    d.bandwidth = Some(bw);
}

fn require_tail_index(est: Option<&TailIndexEstimate>) -> Result<&TailIndexEstimate> {
    est.ok_or_else(|| Error::Config("pointwise bandwidth needs a tail-index estimate".into()))
}

fn clamp_prob(raw: f64, d: &mut Diagnostics) -> f64 {
    let v = raw.clamp(0.0, 1.0);
    if v != raw {
        d.flags.push(Flag::Clamped);
    }
    v
}

/// Kernel tail estimate `1 − F̂(x)` with the Gaussian kernel.
///
/// `Pb` needs `tail_est` (Hill fit at the default `r`); its bandwidth is cut
/// back to the sample range when the formula overshoots.
pub fn tail_ne(
    sample: &SortedSample,
    x: f64,
    method: NeBandwidth,
    tail_est: Option<&TailIndexEstimate>,
) -> Result<EstimateRecord> {
    let k = KernelSpec::gaussian();
    let mut d = Diagnostics::default();
    let (bw, estimator) = match method {
        NeBandwidth::Al => (al_bandwidth(sample, &k)?, Estimator::Al),
        NeBandwidth::Pb => {
            let est = require_tail_index(tail_est)?;
            with_tail_index(&mut d, est);
            let bw = pointwise_bandwidth_plugin(est, sample.len(), x, &k)?
                .capped_to(sample.max() - sample.min());
            (bw, Estimator::Pb)
        }
    };
    note_bandwidth(&mut d, bw);
    let raw = kernel_tail(sample, x, bw.h, &k);
    d.raw_value = raw;
    let value = clamp_prob(raw, &mut d);
    Ok(EstimateRecord {
        estimator,
        quantity: Quantity::Tail,
        value,
        diagnostics: d,
    })
}

/// Piecing-together tail estimate `(N/n){1 − H_{γ̂,ĉ}(x − u)}`.
///
/// Fewer than two exceedances give a flagged record with value 0.
pub fn tail_pt(sample: &SortedSample, x: f64, u: f64) -> Result<EstimateRecord> {
    if !(u <= x) {
        return domain(format!("threshold u = {u} must not exceed x = {x}"));
    }
    let n = sample.len();
    let mut d = Diagnostics::default();
    let value = match fit_pot(sample, u, false) {
        Ok(fit) => {
            d.n_exceed = Some(fit.n_exceed);
            d.gpd = Some(fit.params);
            d.fit_converged = Some(fit.converged);
            if !fit.converged {
                d.flags.push(Flag::FitNotConverged);
            }
            (fit.n_exceed as f64 / n as f64) * fit.params.tail(x - u)
        }
        Err(Error::InsufficientExceedances { have, .. }) => {
            d.n_exceed = Some(have);
            d.flags.push(Flag::InsufficientExceedances);
            0.0
        }
        Err(e) => return Err(e),
    };
    d.raw_value = value;
    Ok(EstimateRecord {
        estimator: Estimator::Pt,
        quantity: Quantity::Tail,
        value,
        diagnostics: d,
    })
}

/// Hall plug-in tail `Â x^{−α̂}`, reported clamped to `[0, 1]`.
pub fn tail_pi(tail_est: &TailIndexEstimate, x: f64) -> Result<EstimateRecord> {
    if !(x > 0.0) {
        return domain(format!("evaluation point must be positive, got {x}"));
    }
    let mut d = Diagnostics::default();
    with_tail_index(&mut d, tail_est);
    let raw = tail_est.a_hat * x.powf(-tail_est.alpha_hat);
    d.raw_value = raw;
    let value = clamp_prob(raw, &mut d);
    Ok(EstimateRecord {
        estimator: Estimator::Pi,
        quantity: Quantity::Tail,
        value,
        diagnostics: d,
    })
}

/// Gaussian-kernel mean excess at `u` with the global or the mean-excess
/// optimal plug-in bandwidth `h*_{Â,α̂}`.
pub fn mef_ne(
    sample: &SortedSample,
    u: f64,
    method: NeBandwidth,
    tail_est: Option<&TailIndexEstimate>,
) -> Result<EstimateRecord> {
    let k = KernelSpec::gaussian();
    let mut d = Diagnostics::default();
    let (bw, estimator) = match method {
        NeBandwidth::Al => (al_bandwidth(sample, &k)?, Estimator::Al),
        NeBandwidth::Pb => {
            let est = require_tail_index(tail_est)?;
            with_tail_index(&mut d, est);
            let bw = mef_bandwidth_plugin(est, sample.len(), u, &k)?
                .capped_to(sample.max() - sample.min());
            (bw, Estimator::Pb)
        }
    };
    note_bandwidth(&mut d, bw);
    let value = kernel_mef(sample, u, bw.h, &k)?;
    d.raw_value = value;
    Ok(EstimateRecord {
        estimator,
        quantity: Quantity::Mef,
        value,
        diagnostics: d,
    })
}

/// GPD mean excess `ĉ/(1 − γ̃)` from the fit with `γ̃ < 1` enforced.
///
/// Fewer than two exceedances give a flagged NaN. A fit pinned at the shape
/// bound yields `≈ ĉ·10⁶`, flagged.
pub fn mef_pe(sample: &SortedSample, u: f64) -> Result<EstimateRecord> {
    let mut d = Diagnostics::default();
    let value = match fit_pot(sample, u, true) {
        Ok(fit) => {
            d.n_exceed = Some(fit.n_exceed);
            d.gpd = Some(fit.params);
            d.fit_converged = Some(fit.converged);
            if !fit.converged {
                d.flags.push(Flag::FitNotConverged);
            }
            if fit.boundary_active {
                d.flags.push(Flag::GammaAtBoundary);
            }
            fit.params.mean()
        }
        Err(Error::InsufficientExceedances { have, .. }) => {
            d.n_exceed = Some(have);
            d.flags.push(Flag::InsufficientExceedances);
            f64::NAN
        }
        Err(e) => return Err(e),
    };
    d.raw_value = value;
    Ok(EstimateRecord {
        estimator: Estimator::Pt,
        quantity: Quantity::Mef,
        value,
        diagnostics: d,
    })
}

/// Hall plug-in mean excess `u/(α̂ − 1)`; `+∞` (flagged) when
/// `α̂ ≤ 1 + 1e−6`, where the mean excess does not exist.
pub fn mef_pi(tail_est: &TailIndexEstimate, u: f64) -> Result<EstimateRecord> {
    if !(u > 0.0) {
        return domain(format!("threshold must be positive, got {u}"));
    }
    let mut d = Diagnostics::default();
    with_tail_index(&mut d, tail_est);
    let value = if tail_est.alpha_hat <= 1.0 + 1e-6 {
        d.flags.push(Flag::MefNonexistent);
        f64::INFINITY
    } else {
        u / (tail_est.alpha_hat - 1.0)
    };
    d.raw_value = value;
    Ok(EstimateRecord {
        estimator: Estimator::Pi,
        quantity: Quantity::Mef,
        value,
        diagnostics: d,
    })
}

/// Runs one tail estimator. `u` is used by `Pt` only; `tail_est` is required
/// for `Pi` and `Pb`.
pub fn estimate_tail(
    estimator: Estimator,
    sample: &SortedSample,
    x: f64,
    u: f64,
    tail_est: Option<&TailIndexEstimate>,
) -> Result<EstimateRecord> {
    match estimator {
        Estimator::Pi => tail_pi(require_tail_index(tail_est)?, x),
        Estimator::Pt => tail_pt(sample, x, u),
        Estimator::Al => tail_ne(sample, x, NeBandwidth::Al, tail_est),
        Estimator::Pb => tail_ne(sample, x, NeBandwidth::Pb, tail_est),
    }
}

/// Runs one mean-excess estimator at threshold `u`.
pub fn estimate_mef(
    estimator: Estimator,
    sample: &SortedSample,
    u: f64,
    tail_est: Option<&TailIndexEstimate>,
) -> Result<EstimateRecord> {
    match estimator {
        Estimator::Pi => mef_pi(require_tail_index(tail_est)?, u),
        Estimator::Pt => mef_pe(sample, u),
        Estimator::Al => mef_ne(sample, u, NeBandwidth::Al, tail_est),
        Estimator::Pb => mef_ne(sample, u, NeBandwidth::Pb, tail_est),
    }
}
