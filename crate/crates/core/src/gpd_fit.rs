//! Peaks-over-threshold maximum-likelihood fitting of the generalized Pareto
//! distribution.
//!
//! The likelihood is maximized in `(γ, τ = ln c)` by a two-start simplex
//! search followed by a Newton polish on the analytic score. The free fit
//! restricts `γ > −1`, where the likelihood is bounded; below that it grows
//! without limit as `c → −γ·max y`.

use serde::{Deserialize, Serialize};

use crate::distributions::gpd_tail;
use crate::error::{domain, Error, Result};
use crate::nelder_mead::{minimize, SimplexOptions};
use crate::sample::SortedSample;

/// Largest shape admitted by the constrained fit.
pub const GAMMA_CAP: f64 = 1.0 - 1e-6;
/// Below this `|γ|` the exponential limit of the likelihood is used.
pub const GAMMA_ZERO: f64 = 1e-8;
const GAMMA_FLOOR: f64 = -1.0;

/// GPD shape `γ` and scale `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdParams {
    pub gamma: f64,
    pub scale: f64,
}

impl GpdParams {
    pub fn new(gamma: f64, scale: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return domain(format!("gamma must be finite, got {gamma}"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return domain(format!("scale must be positive, got {scale}"));
        }
        Ok(Self { gamma, scale })
    }

    /// `1 − H_{γ,c}(y)`; 1 for `y ≤ 0`, 0 past the support end.
    pub fn tail(&self, y: f64) -> f64 {
        gpd_tail(self.gamma, self.scale, y)
    }

    /// Mean excess of the fitted law at its own threshold, `c/(1 − γ)`;
    /// `+∞` when `γ ≥ 1`.
    pub fn mean(&self) -> f64 {
        if self.gamma < 1.0 {
            self.scale / (1.0 - self.gamma)
        } else {
            f64::INFINITY
        }
    }
}

/// Result of a peaks-over-threshold fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotFit {
    pub params: GpdParams,
    pub threshold: f64,
    pub n_exceed: usize,
    pub loglik: f64,
    /// First-order conditions hold at `params`.
    pub converged: bool,
    /// The fit was run with `γ < 1` enforced.
    pub constrained: bool,
    /// The constraint binds: `γ` sits at [`GAMMA_CAP`].
    pub boundary_active: bool,
}

fn check_excesses(excesses: &[f64]) -> Result<()> {
    if excesses.is_empty() {
        return domain("empty excess set");
    }
    if let Some(bad) = excesses.iter().find(|y| !(**y >= 0.0) || !y.is_finite()) {
        return domain(format!("excess {bad} is negative or nonfinite"));
    }
    Ok(())
}

/// Log-likelihood in `(γ, τ = ln c)`; `−∞` off the support.
fn loglik_tau(gamma: f64, tau: f64, ys: &[f64]) -> f64 {
    let inv_c = (-tau).exp();
    let n = ys.len() as f64;
    if gamma.abs() < GAMMA_ZERO {
        return -n * tau - inv_c * ys.iter().sum::<f64>();
    }
    let mut acc = 0.0;
    for &y in ys {
        let t = gamma * y * inv_c;
        if t <= -1.0 {
            return f64::NEG_INFINITY;
        }
        acc += t.ln_1p();
    }
    -n * tau - (1.0 + 1.0 / gamma) * acc
}

/// `ℓ(γ, c) = −N ln c − (1 + 1/γ) Σ ln(1 + γyᵢ/c)`, or `−N ln c − Σyᵢ/c`
/// for `|γ| < 1e−8`. Returns `−∞` when some `1 + γyᵢ/c ≤ 0`.
pub fn gpd_loglik(params: &GpdParams, excesses: &[f64]) -> Result<f64> {
    check_excesses(excesses)?;
    Ok(loglik_tau(params.gamma, params.scale.ln(), excesses))
}

// ln(1+t)/t² − 1/(t(1+t)) = 1/2 − 2t/3 + 3t²/4 − 4t³/5 + 5t⁴/6 − …
fn score_gamma_series(t: f64) -> f64 {
    0.5 + t * (-2.0 / 3.0 + t * (0.75 + t * (-0.8 + t * (5.0 / 6.0))))
}

fn score_tau(gamma: f64, tau: f64, ys: &[f64]) -> Option<[f64; 2]> {
    let inv_c = (-tau).exp();
    let mut sg = 0.0;
    let mut st = 0.0;
    for &y in ys {
        let z = y * inv_c;
        let t = gamma * z;
        if t <= -1.0 {
            return None;
        }
        let ratio = z / (1.0 + t);
        if t.abs() < 1e-3 {
            sg += z * z * score_gamma_series(t) - ratio;
        } else {
            sg += (t.ln_1p() - t / (1.0 + t)) / (gamma * gamma) - ratio;
        }
        st += ratio;
    }
    Some([sg, -(ys.len() as f64) + (1.0 + gamma) * st])
}

/// Gradient of [`gpd_loglik`] with respect to `(γ, ln c)`:
///
/// `∂γ = Σ[γ⁻² ln(1 + γzᵢ) − (1 + γ⁻¹) zᵢ/(1 + γzᵢ)]`,
/// `∂ln c = −N + (1 + γ) Σ zᵢ/(1 + γzᵢ)`, with `zᵢ = yᵢ/c`.
/// Near `γ = 0` the first component uses its series, whose `γ = 0` value is
/// `Σ(zᵢ²/2 − zᵢ)`.
pub fn score_at(params: &GpdParams, excesses: &[f64]) -> Result<[f64; 2]> {
    check_excesses(excesses)?;
    score_tau(params.gamma, params.scale.ln(), excesses).ok_or_else(|| {
        Error::Domain(format!(
            "parameters (γ = {}, c = {}) put an excess outside the support",
            params.gamma, params.scale
        ))
    })
}

fn moment_start(ys: &[f64], gamma_max: f64) -> [f64; 2] {
    let n = ys.len() as f64;
    let m = ys.iter().sum::<f64>() / n;
    let v = ys.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let ratio = if v > 0.0 { m * m / v } else { 1.0 };
    let mut gamma = (0.5 * (1.0 - ratio)).clamp(GAMMA_FLOOR + 0.05, gamma_max - 0.05);
    let scale = (0.5 * m * (1.0 + ratio)).max(f64::MIN_POSITIVE);
    let ymax = ys.iter().cloned().fold(0.0, f64::max);
    if gamma < 0.0 && 1.0 + gamma * ymax / scale <= 0.0 {
        gamma = -0.9 * scale / ymax;
    }
    [gamma, scale.ln()]
}

struct Fitted {
    gamma: f64,
    tau: f64,
    loglik: f64,
    converged: bool,
    boundary: bool,
}

fn first_order_tol(n: usize) -> f64 {
    1e-7 * (n as f64).sqrt().max(1.0)
}

/// Newton steps on the score with a finite-difference Hessian and
/// backtracking. With `gamma_fixed` only `τ` moves.
fn polish(mut gamma: f64, mut tau: f64, ys: &[f64], gamma_fixed: bool) -> (f64, f64) {
    const FD: f64 = 1e-5;
    let mut ll = loglik_tau(gamma, tau, ys);
    for _ in 0..60 {
        let Some(g) = score_tau(gamma, tau, ys) else {
            break;
        };
        let (dg, dt) = if gamma_fixed {
            let (Some(p), Some(m)) = (
                score_tau(gamma, tau + FD, ys),
                score_tau(gamma, tau - FD, ys),
            ) else {
                break;
            };
            let h = (p[1] - m[1]) / (2.0 * FD);
            if !(h < 0.0) {
                break;
            }
            (0.0, -g[1] / h)
        } else {
            let cols = [
                (
                    score_tau(gamma + FD, tau, ys),
                    score_tau(gamma - FD, tau, ys),
                ),
                (
                    score_tau(gamma, tau + FD, ys),
                    score_tau(gamma, tau - FD, ys),
                ),
            ];
            let mut h = [[0.0; 2]; 2];
            for (j, col) in cols.iter().enumerate() {
                let (Some(p), Some(m)) = col else {
                    return (gamma, tau);
                };
                h[0][j] = (p[0] - m[0]) / (2.0 * FD);
                h[1][j] = (p[1] - m[1]) / (2.0 * FD);
            }
            let sym = 0.5 * (h[0][1] + h[1][0]);
            let det = h[0][0] * h[1][1] - sym * sym;
            if !(h[0][0] < 0.0 && det > 0.0) {
                break;
            }
            // d = −H⁻¹ g
            (
                -(h[1][1] * g[0] - sym * g[1]) / det,
                -(-sym * g[0] + h[0][0] * g[1]) / det,
            )
        };
        let gnorm = g[0].abs().max(g[1].abs());
        let mut lambda = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let ng = if gamma_fixed {
                gamma
            } else {
                gamma + lambda * dg
            };
            let nt = tau + lambda * dt;
            let nll = if ng > GAMMA_FLOOR {
                loglik_tau(ng, nt, ys)
            } else {
                f64::NEG_INFINITY
            };
            let better = nll > ll
                || (nll >= ll - 1e-12 * ll.abs()
                    && score_tau(ng, nt, ys)
                        .map(|s| {
                            let sn = if gamma_fixed {
                                s[1].abs()
                            } else {
                                s[0].abs().max(s[1].abs())
                            };
                            sn < gnorm
                        })
                        .unwrap_or(false));
            if better {
                gamma = ng;
                tau = nt;
                ll = nll;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !moved {
            break;
        }
        if let Some(s) = score_tau(gamma, tau, ys) {
            let sn = if gamma_fixed {
                s[1].abs()
            } else {
                s[0].abs().max(s[1].abs())
            };
            if sn <= 1e-3 * first_order_tol(ys.len()) {
                break;
            }
        }
    }
    (gamma, tau)
}

fn fit_excesses(ys: &[f64], constrain: bool) -> Fitted {
    let gamma_max = if constrain { GAMMA_CAP } else { f64::INFINITY };
    let clip = |g: f64| g.min(gamma_max);
    let objective = |p: &[f64]| {
        let g = clip(p[0]);
        if g <= GAMMA_FLOOR {
            return f64::INFINITY;
        }
        -loglik_tau(g, p[1], ys)
    };
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let starts = [
        moment_start(ys, if constrain { GAMMA_CAP } else { 2.0 }),
        [0.0, mean.max(f64::MIN_POSITIVE).ln()],
    ];
    let mut best: Option<(f64, f64, f64)> = None;
    for s in starts {
        let m = minimize(objective, &s, &[0.1, 0.1], SimplexOptions::default());
        let cand = (clip(m.x[0]), m.x[1], -m.fx);
        if best.is_none_or(|b| cand.2 > b.2) {
            best = Some(cand);
        }
    }
    let (mut gamma, mut tau, _) = best.unwrap_or((0.0, mean.ln(), f64::NEG_INFINITY));

    let mut boundary = constrain && gamma >= GAMMA_CAP;
    if boundary {
        (gamma, tau) = polish(GAMMA_CAP, tau, ys, true);
    } else {
        let (g, t) = polish(gamma, tau, ys, false);
        if constrain && g >= GAMMA_CAP {
            boundary = true;
            (gamma, tau) = polish(GAMMA_CAP, t, ys, true);
        } else {
            (gamma, tau) = (g, t);
        }
    }
    let loglik = loglik_tau(gamma, tau, ys);
    let tol = first_order_tol(ys.len());
    let converged = loglik.is_finite()
        && match score_tau(gamma, tau, ys) {
            Some(s) if boundary => s[1].abs() <= tol && s[0] >= 0.0,
            Some(s) => s[0].abs() <= tol && s[1].abs() <= tol,
            None => false,
        };
    Fitted {
        gamma,
        tau,
        loglik,
        converged,
        boundary,
    }
}

/// Fits `H_{γ,c}` to the excesses `{Xᵢ − u : Xᵢ > u}` by maximum likelihood.
///
/// With `constrain_gamma_lt_1` the shape is clipped to [`GAMMA_CAP`] and
/// `boundary_active` reports whether the clip binds. A fit that fails the
/// first-order conditions comes back with `converged = false` and the best
/// parameters found, not as an error.
pub fn fit_pot(sample: &SortedSample, u: f64, constrain_gamma_lt_1: bool) -> Result<PotFit> {
    let ys: Vec<f64> = sample.exceeding(u).iter().map(|x| x - u).collect();
    if ys.len() < 2 {
        return Err(Error::InsufficientExceedances {
            threshold: u,
            needed: 2,
            have: ys.len(),
        });
    }
    let f = fit_excesses(&ys, constrain_gamma_lt_1);
    Ok(PotFit {
        params: GpdParams {
            gamma: f.gamma,
            scale: f.tau.exp(),
        },
        threshold: u,
        n_exceed: ys.len(),
        loglik: f.loglik,
        converged: f.converged,
        constrained: constrain_gamma_lt_1,
        boundary_active: f.boundary,
    })
}
