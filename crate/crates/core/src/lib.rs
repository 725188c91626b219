//! Tail-probability and mean-excess estimation for heavy- and light-tailed
//! data: kernel (NE), peaks-over-threshold (PT) and Hill plug-in (PI)
//! estimators, their asymptotic MSE predictors and rate tables, and a
//! seeded Monte-Carlo harness comparing them.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod config;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod gpd_fit;
pub mod kernel;
pub mod nelder_mead;
pub mod quadrature;
pub mod report;
pub mod sample;
pub mod simulation;
pub mod tail_index;

pub use distributions::{
    BurrDist, Distribution, GpdDist, HallParams, TailDistribution, WeibullDist, WeibullTailParams,
};
pub use error::{Error, Result};
pub use estimators::{estimate_mef, estimate_tail, EstimateRecord, Estimator};
pub use gpd_fit::{fit_pot, GpdParams, PotFit};
pub use kernel::{Bandwidth, KernelSpec};
pub use sample::SortedSample;
pub use simulation::{run_cell, run_table, SimConfig, SimResult, TableId};
pub use tail_index::{default_r, hill_fit, TailIndexEstimate};
