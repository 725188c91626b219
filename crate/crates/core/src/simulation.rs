//! Seeded Monte-Carlo harness: one cell is a distribution, a sample size, a
//! target rule and a set of estimators; a table is a fixed grid of cells.
//!
//! Replication `i` draws its sample with seed `base_seed + i`, and every
//! estimator in the cell sees that same sample. Replications run in
//! parallel; per-replication results are collected in index order and
//! reduced serially, so thread count never changes the output.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::delta;
use crate::distributions::{
    hall_params_of_burr, sample, true_mef, BurrDist, Distribution, TailDistribution, WeibullDist,
};
use crate::error::{Error, Result};
use crate::estimators::{estimate_mef, estimate_tail, Estimator};
use crate::sample::SortedSample;
use crate::tail_index::{default_r, hill_fit};

/// What a cell estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Tail,
    Mef,
}

/// Argument of the logarithm in the Weibull target rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogArg {
    /// `x = C₂ (ln n)^{1/κ}`.
    SampleSize,
    /// `x = C₂ (ln log₂ n)^{1/κ}`, i.e. `ln 8` for `n = 2⁸`.
    Log2SampleSize,
}

/// How the evaluation point `x` (tail study) or the threshold `u` (mean
/// excess study, `u = C₃x`) is placed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TargetRule {
    /// `x = C₁ n^δ` with `δ = 1/(2β + α)`; Burr laws only.
    HallPower { c1: f64 },
    /// `x = C₂ (ln m)^{1/κ}`; Weibull laws only.
    WeibullLog { c2: f64, log_arg: LogArg },
    /// `x = F⁻¹(level)`; in a mean-excess study the threshold itself is the
    /// quantile (no `C₃` scaling).
    Quantile { level: f64 },
    /// A fixed `x`.
    Fixed { x: f64 },
}

impl TargetRule {
    pub fn constant_label(&self) -> String {
        match self {
            TargetRule::HallPower { c1 } => format!("C1={}", crate::distributions::fmt_param(*c1)),
            TargetRule::WeibullLog { c2, .. } => {
                format!("C2={}", crate::distributions::fmt_param(*c2))
            }
            TargetRule::Quantile { level } => format!("q={level}"),
            TargetRule::Fixed { x } => format!("x={x}"),
        }
    }
}

/// Full description of one Monte-Carlo cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub study: Study,
    pub dist: Distribution,
    pub n: usize,
    pub replications: usize,
    pub base_seed: u64,
    pub target: TargetRule,
    pub estimators: Vec<Estimator>,
    /// Threshold fraction: `u = C₃ x`.
    pub c3: f64,
}

/// Replications per tail-probability cell.
pub const TAIL_REPLICATIONS: usize = 1000;
/// Replications per mean-excess cell.
pub const MEF_REPLICATIONS: usize = 10_000;

/// `C₃ = 0.5` for Burr, `0.99` for Weibull (and GPD).
pub fn default_c3(dist: &Distribution) -> f64 {
    match dist {
        Distribution::Burr(_) => 0.5,
        _ => 0.99,
    }
}

impl SimConfig {
    /// A tail-probability cell with the default replication count and `C₃`.
    pub fn tail(
        dist: Distribution,
        n: usize,
        target: TargetRule,
        estimators: Vec<Estimator>,
    ) -> Self {
        Self {
            study: Study::Tail,
            c3: default_c3(&dist),
            dist,
            n,
            replications: TAIL_REPLICATIONS,
            base_seed: 0,
            target,
            estimators,
        }
    }

    /// A mean-excess cell with the default replication count and `C₃`.
    pub fn mef(
        dist: Distribution,
        n: usize,
        target: TargetRule,
        estimators: Vec<Estimator>,
    ) -> Self {
        Self {
            study: Study::Mef,
            replications: MEF_REPLICATIONS,
            ..Self::tail(dist, n, target, estimators)
        }
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn with_replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    /// Checks the configuration before any sampling.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.n < 10 {
            return bad(format!("sample size {} is below 10", self.n));
        }
        if self.estimators.is_empty() {
            return bad("no estimators requested".into());
        }
        if !(self.c3 > 0.0 && self.c3 <= 1.0) {
            return bad(format!("C3 = {} must lie in (0, 1]", self.c3));
        }
        if self.study == Study::Mef && !self.dist.has_finite_mef() {
            return bad(format!(
                "{} has no finite mean excess; a mean-excess study is undefined",
                self.dist.label()
            ));
        }
        match (&self.target, &self.dist) {
            (TargetRule::HallPower { c1 }, Distribution::Burr(b)) => {
                if hall_params_of_burr(b).is_err() {
                    return bad(format!("{} lies outside the Hall class", self.dist.label()));
                }
                if !(*c1 > 0.0) {
                    return bad(format!("C1 = {c1} must be positive"));
                }
            }
            (TargetRule::HallPower { .. }, _) => {
                return bad("the C1·n^δ rule needs a Burr law".into());
            }
            (TargetRule::WeibullLog { c2, log_arg }, Distribution::Weibull(_)) => {
                if !(*c2 > 0.0) {
                    return bad(format!("C2 = {c2} must be positive"));
                }
                if *log_arg == LogArg::Log2SampleSize && self.n < 8 {
                    return bad("ln(log2 n) needs n ≥ 8".into());
                }
            }
            (TargetRule::WeibullLog { .. }, _) => {
                return bad("the C2·(ln n)^{1/κ} rule needs a Weibull law".into());
            }
            (TargetRule::Quantile { level }, _) => {
                if !(*level > 0.0 && *level < 1.0) {
                    return bad(format!("quantile level {level} outside (0, 1)"));
                }
            }
            (TargetRule::Fixed { x }, _) => {
                if !(*x > 0.0 && x.is_finite()) {
                    return bad(format!("fixed x = {x} must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Short label of the law, e.g. `Burr(3,1/2)`.
    pub fn label(&self) -> String {
        self.dist.label()
    }
}

/// The evaluation point, threshold and true value of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedTarget {
    pub x: f64,
    pub u: f64,
    /// `F̄(x)` in a tail study, `e(u)` in a mean-excess study.
    pub truth: f64,
}

/// Computes `(x, u)` and the true value for a validated configuration.
pub fn resolve_target(cfg: &SimConfig) -> Result<ResolvedTarget> {
    cfg.validate()?;
    let nf = cfg.n as f64;
    let x = match (&cfg.target, &cfg.dist) {
        (TargetRule::HallPower { c1 }, Distribution::Burr(b)) => {
            c1 * nf.powf(delta(&hall_params_of_burr(b)?))
        }
        (TargetRule::WeibullLog { c2, log_arg }, Distribution::Weibull(w)) => {
            let m = match log_arg {
                LogArg::SampleSize => nf,
                LogArg::Log2SampleSize => nf.log2(),
            };
            c2 * m.ln().powf(1.0 / w.kappa())
        }
        (TargetRule::Quantile { level }, d) => d.quantile(*level)?,
        (TargetRule::Fixed { x }, _) => *x,
        _ => unreachable!("rejected by validate"),
    };
    let u = match (cfg.study, &cfg.target) {
        (Study::Mef, TargetRule::Quantile { .. }) => x,
        _ => cfg.c3 * x,
    };
    let truth = match cfg.study {
        Study::Tail => cfg.dist.tail_prob(x)?,
        Study::Mef => true_mef(&cfg.dist, u)?,
    };
    if !(truth > 0.0 && truth.is_finite()) {
        return Err(Error::Numerical(format!(
            "true value {truth} at x = {x}, u = {u} cannot normalize a relative error"
        )));
    }
    Ok(ResolvedTarget { x, u, truth })
}

/// Aggregate of one estimator over the replications of a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub estimator: Estimator,
    /// Mean of the finite squared relative errors, ×100.
    pub rel_mse_x100: f64,
    /// Standard deviation of the finite squared relative errors, ×100.
    pub sd_x100: f64,
    /// Mean over all replications, ×100 (`+∞` if any is nonfinite).
    pub raw_mean_x100: f64,
    /// Mean after dropping the largest 1% of finite errors, ×100.
    pub trimmed_mean_x100: f64,
    pub n_finite: usize,
    pub n_nonfinite: usize,
    pub n_flagged: usize,
    /// More than 1% nonfinite, or a mean of at least 1000.
    pub unstable: bool,
    /// More than 1% nonfinite: the cell is shown as `∞`.
    pub show_infinite: bool,
}

/// Result of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub label: String,
    pub study: Study,
    pub n: usize,
    pub replications: usize,
    pub base_seed: u64,
    pub target: TargetRule,
    pub resolved: ResolvedTarget,
    /// The law is Weibull with `κ > 1`, outside the `κ ≤ 1` range of the
    /// GPD approximation's scale mapping.
    pub kappa_above_one: bool,
    pub estimators: Vec<EstimatorSummary>,
}

impl SimResult {
    pub fn summary(&self, e: Estimator) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|s| s.estimator == e)
    }
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    value: f64,
    flagged: bool,
}

fn replicate(cfg: &SimConfig, target: &ResolvedTarget, i: usize) -> Vec<Outcome> {
    let draws = sample(&cfg.dist, cfg.n, cfg.base_seed.wrapping_add(i as u64));
    let failed = |_: Error| Outcome {
        value: f64::NAN,
        flagged: true,
    };
    let s = match SortedSample::new(draws) {
        Ok(s) => s,
        Err(e) => return cfg.estimators.iter().map(|_| failed(e.clone())).collect(),
    };
    let tail_est = if cfg.estimators.iter().any(|e| e.needs_tail_index()) {
        hill_fit(&s, default_r(cfg.n)).ok()
    } else {
        None
    };
    cfg.estimators
        .iter()
        .map(|&e| {
            let rec = match cfg.study {
                Study::Tail => estimate_tail(e, &s, target.x, target.u, tail_est.as_ref()),
                Study::Mef => estimate_mef(e, &s, target.u, tail_est.as_ref()),
            };
            match rec {
                Ok(r) => Outcome {
                    value: r.diagnostics.raw_value,
                    flagged: r.is_flagged(),
                },
                Err(Error::NoExceedance(_)) => Outcome {
                    value: f64::INFINITY,
                    flagged: true,
                },
                Err(err) => failed(err),
            }
        })
        .collect()
}

/// Share of nonfinite replications above which a cell is shown as `∞`.
pub const NONFINITE_DISPLAY_SHARE: f64 = 0.01;
/// Mean (×100) at or above which a cell counts as unstable.
pub const UNSTABLE_MEAN_X100: f64 = 1000.0;

/// Aggregates squared relative errors `((v − truth)/truth)²` of one
/// estimator, in replication order.
pub fn summarize(
    estimator: Estimator,
    values: &[f64],
    flags: &[bool],
    truth: f64,
) -> EstimatorSummary {
    let errors: Vec<f64> = values
        .iter()
        .map(|v| {
            let r = (v - truth) / truth;
            r * r
        })
        .collect();
    let finite: Vec<f64> = errors.iter().copied().filter(|e| e.is_finite()).collect();
    let n_finite = finite.len();
    let n_nonfinite = errors.len() - n_finite;
    let mean = if n_finite > 0 {
        finite.iter().sum::<f64>() / n_finite as f64
    } else {
        f64::NAN
    };
    let sd = if n_finite > 1 {
        (finite.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n_finite - 1) as f64).sqrt()
    } else if n_finite == 1 {
        0.0
    } else {
        f64::NAN
    };
    let raw_mean = if n_nonfinite > 0 { f64::INFINITY } else { mean };
    let trimmed = if n_finite > 0 {
        let mut sorted = finite.clone();
        sorted.sort_by(f64::total_cmp);
        let drop = (n_finite as f64 * 0.01).ceil() as usize;
        let keep = &sorted[..n_finite - drop.min(n_finite - 1)];
        keep.iter().sum::<f64>() / keep.len() as f64
    } else {
        f64::NAN
    };
    let show_infinite = n_nonfinite as f64 > NONFINITE_DISPLAY_SHARE * errors.len() as f64;
    EstimatorSummary {
        estimator,
        rel_mse_x100: 100.0 * mean,
        sd_x100: 100.0 * sd,
        raw_mean_x100: 100.0 * raw_mean,
        trimmed_mean_x100: 100.0 * trimmed,
        n_finite,
        n_nonfinite,
        n_flagged: flags.iter().filter(|f| **f).count(),
        unstable: show_infinite || !(100.0 * mean < UNSTABLE_MEAN_X100),
        show_infinite,
    }
}

/// Runs one cell.
pub fn run_cell(cfg: &SimConfig) -> Result<SimResult> {
    let target = resolve_target(cfg)?;
    let per_rep: Vec<Vec<Outcome>> = (0..cfg.replications)
        .into_par_iter()
        .map(|i| replicate(cfg, &target, i))
        .collect();
    let estimators = cfg
        .estimators
        .iter()
        .enumerate()
        .map(|(j, &e)| {
            let values: Vec<f64> = per_rep.iter().map(|r| r[j].value).collect();
            let flags: Vec<bool> = per_rep.iter().map(|r| r[j].flagged).collect();
            summarize(e, &values, &flags, target.truth)
        })
        .collect();
    Ok(SimResult {
        label: cfg.label(),
        study: cfg.study,
        n: cfg.n,
        replications: cfg.replications,
        base_seed: cfg.base_seed,
        target: cfg.target,
        resolved: target,
        kappa_above_one: matches!(cfg.dist, Distribution::Weibull(w) if w.kappa() > 1.0),
        estimators,
    })
}

/// The four Monte-Carlo tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableId {
    T3,
    T4,
    T6,
    T7,
}

impl TableId {
    pub fn number(self) -> u32 {
        match self {
            TableId::T3 => 3,
            TableId::T4 => 4,
            TableId::T6 => 6,
            TableId::T7 => 7,
        }
    }

    pub fn study(self) -> Study {
        match self {
            TableId::T3 | TableId::T4 => Study::Tail,
            TableId::T6 | TableId::T7 => Study::Mef,
        }
    }

    /// Estimator columns in printed order.
    pub fn estimators(self) -> Vec<Estimator> {
        match self {
            TableId::T4 => vec![Estimator::Pt, Estimator::Al, Estimator::Pb],
            _ => Estimator::ALL.to_vec(),
        }
    }

    pub fn default_replications(self) -> usize {
        match self.study() {
            Study::Tail => TAIL_REPLICATIONS,
            Study::Mef => MEF_REPLICATIONS,
        }
    }
}

impl std::str::FromStr for TableId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "t3" | "3" => Ok(TableId::T3),
            "t4" | "4" => Ok(TableId::T4),
            "t6" | "6" => Ok(TableId::T6),
            "t7" | "7" => Ok(TableId::T7),
            other => Err(Error::Config(format!("unknown table {other:?}"))),
        }
    }
}

/// Sample sizes of the Monte-Carlo tables.
pub const TABLE_SAMPLE_SIZES: [usize; 2] = [1 << 8, 1 << 12];
/// `C₁` blocks of the Burr tables.
pub const TABLE_C1: [f64; 3] = [0.5, 1.0, 2.0];
/// Burr rows of the mean-excess table (`cℓ > 1`).
pub const MEF_TABLE_BURR_ROWS: [(f64, f64); 5] =
    [(3.0, 0.5), (3.0, 1.0), (0.5, 3.0), (1.0, 3.0), (3.0, 3.0)];

/// One cell of a table together with its position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    /// Row parameters as printed, e.g. `3,1/2` or `10,1`.
    pub row: String,
    pub n: usize,
    /// Column-block constant (`C₁` or `C₂`).
    pub constant: f64,
    pub result: SimResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRun {
    pub id: TableId,
    pub base_seed: u64,
    pub replications: usize,
    pub cells: Vec<TableCell>,
}

/// The configurations of a table, in block order (`n`, then constant,
/// then row).
pub fn table_configs(
    id: TableId,
    base_seed: u64,
    replications: Option<usize>,
) -> Vec<(String, f64, SimConfig)> {
    use crate::asymptotics::{
        TAIL_TABLE_BURR_ROWS, TAIL_TABLE_WEIBULL_C2, TAIL_TABLE_WEIBULL_KAPPA,
    };
    use crate::distributions::fmt_param;
    let reps = replications.unwrap_or_else(|| id.default_replications());
    let burr_rows: &[(f64, f64)] = match id {
        TableId::T3 => &TAIL_TABLE_BURR_ROWS,
        _ => &MEF_TABLE_BURR_ROWS,
    };
    let mut out = Vec::new();
    for n in TABLE_SAMPLE_SIZES {
        match id {
            TableId::T3 | TableId::T6 => {
                for c1 in TABLE_C1 {
                    for &(c, ell) in burr_rows {
                        let dist = Distribution::Burr(BurrDist::new(c, ell).expect("table row"));
                        let target = TargetRule::HallPower { c1 };
                        let cfg = match id.study() {
                            Study::Tail => SimConfig::tail(dist, n, target, id.estimators()),
                            Study::Mef => SimConfig::mef(dist, n, target, id.estimators()),
                        };
                        let row = format!("{},{}", fmt_param(c), fmt_param(ell));
                        out.push((row, c1, cfg.with_seed(base_seed).with_replications(reps)));
                    }
                }
            }
            TableId::T4 | TableId::T7 => {
                for c2 in TAIL_TABLE_WEIBULL_C2 {
                    for kappa in TAIL_TABLE_WEIBULL_KAPPA {
                        let dist =
                            Distribution::Weibull(WeibullDist::new(1.0, kappa).expect("table row"));
                        let target = TargetRule::WeibullLog {
                            c2,
                            log_arg: LogArg::SampleSize,
                        };
                        let cfg = match id.study() {
                            Study::Tail => SimConfig::tail(dist, n, target, id.estimators()),
                            Study::Mef => SimConfig::mef(dist, n, target, id.estimators()),
                        };
                        let row = format!("{},1", fmt_param(kappa));
                        out.push((row, c2, cfg.with_seed(base_seed).with_replications(reps)));
                    }
                }
            }
        }
    }
    out
}

/// Runs every cell of a table.
pub fn run_table(id: TableId, base_seed: u64, replications: Option<usize>) -> Result<TableRun> {
    let reps = replications.unwrap_or_else(|| id.default_replications());
    let cells = table_configs(id, base_seed, Some(reps))
        .into_iter()
        .map(|(row, constant, cfg)| {
            Ok(TableCell {
                row,
                n: cfg.n,
                constant,
                result: run_cell(&cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TableRun {
        id,
        base_seed,
        replications: reps,
        cells,
    })
}
