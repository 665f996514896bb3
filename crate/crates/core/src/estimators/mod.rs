//! Monte Carlo estimators built on exact runs of the dynamics.
//!
//! Replica `i` of an experiment with master seed `s` reads the field with
//! seed `derive_seed(s, i)`, so results depend on `(config, s, reps)` only.
//! Replicas run on the ambient rayon pool and are reduced in index order.
//! All infinite-time quantities are proxied at an explicit finite horizon.

mod blocks;
mod density;
mod edges;
mod shape;
mod stats;
mod survival;
mod torus;
mod transfer;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use blocks::{bg_event_probability, good_block_probability, BgReport, GoodBlockOptions, GoodBlockReport};
pub use density::{density_spectrum, DensityLevel, DensityReport};
pub use edges::{crossing_probability, edge_speeds, CrossingReport, EdgeReport};
pub use shape::{
    primal_dual_meet, restricted_cone_survival, round_displacement, shape_and_time_constants, ConeReport, MeetReport,
    ShapeEstimate, ShapeOptions,
};
pub use stats::{ks_exponential, linear_fit, Estimate, Histogram, LinearFit, Z95};
pub use survival::{
    critical_point, death_bound_fit, dual_survival_curve, subcritical_decay, survival_curve, CriticalReport,
    DeathReport, DecayOptions, DecayReport, SurvivalReport, SweepPoint,
};
pub use torus::{torus_stats, TorusLevel, TorusReport};
pub use transfer::{path_crossing_transfer, sum_box_probe, TransferOptions, TransferReport, TransferSample};

use crate::dynamics::DynamicsError;
use crate::field::{derive_seed, FieldError, FieldSpec};
use crate::geometry::GeometryError;
use crate::model::NormalizedModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("survival frequency {freq:.4} is below the floor {floor}: refusing a subcritical parameter")]
    SubcriticalRefused { freq: f64, floor: f64 },
    #[error("only {points} window points have at least {floor} deaths, need {needed}")]
    InsufficientDeaths { points: usize, floor: u64, needed: usize },
    #[error("no replica survives to time {0}")]
    InsufficientSurvivals(i64),
    #[error("{censored} of {reps} runs on the torus of side {n} were censored")]
    CensoredMean { n: i64, censored: u64, reps: u64 },
    #[error("cone base is not strictly inside the estimated shape: {0}")]
    ConeOutsideShape(String),
    #[error("no crossing sample in {0} attempts")]
    NoCrossingFound(u64),
    #[error("operation needs d = 2, model has d = {0}")]
    DimensionNot2(usize),
    #[error("bisection bracket not found in [0, 1]: {0}")]
    BracketNotFound(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl EstimatorError {
    /// Refusals are answers about the parameters, not failures.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Self::SubcriticalRefused { .. }
                | Self::InsufficientDeaths { .. }
                | Self::InsufficientSurvivals(_)
                | Self::CensoredMean { .. }
                | Self::ConeOutsideShape(_)
                | Self::NoCrossingFound(_)
                | Self::DimensionNot2(_)
                | Self::BracketNotFound(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, EstimatorError>;

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub estimator: String,
    pub p: f64,
    #[serde(rename = "T")]
    pub horizon: i64,
    pub reps: u64,
    pub mean: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

impl SummaryRow {
    pub fn new(estimator: impl Into<String>, p: f64, horizon: i64, seed: u64, e: &Estimate) -> Self {
        Self {
            estimator: estimator.into(),
            p,
            horizon,
            reps: e.n,
            mean: e.mean,
            stderr: e.stderr,
            ci_lo: e.ci95.0,
            ci_hi: e.ci95.1,
            seed,
        }
    }
}

/// Machine-readable output of an experiment.
pub trait Tabulate {
    /// One JSON record per replica or sweep point, in canonical order.
    fn records(&self) -> Vec<serde_json::Value>;
    fn summary(&self) -> Vec<SummaryRow>;
}

/// Runs `f(i)` for `i < reps` on the current pool; output is in index order.
pub fn replicate<T, F>(reps: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..reps).into_par_iter().map(f).collect()
}

/// Like [`replicate`] but stops at the first error in index order.
pub fn try_replicate<T, F>(reps: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    replicate(reps, f).into_iter().collect()
}

/// The field of replica `i`.
pub fn replica_field(model: &NormalizedModel, p: f64, seed: u64, i: u64) -> Result<FieldSpec> {
    Ok(FieldSpec::new(model.dim(), derive_seed(seed, i), p)?)
}

pub(crate) fn origin(model: &NormalizedModel) -> Vec<i64> {
    vec![0; model.dim()]
}

pub(crate) fn check_reps(reps: u64) -> Result<()> {
    if reps == 0 {
        return Err(EstimatorError::InvalidParameter("reps must be at least 1".into()));
    }
    Ok(())
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(EstimatorError::InvalidParameter(format!("p = {p} is not in [0, 1]")));
    }
    Ok(())
}

pub(crate) fn require_2d(model: &NormalizedModel) -> Result<()> {
    if model.dim() != 2 {
        return Err(EstimatorError::DimensionNot2(model.dim()));
    }
    Ok(())
}

/// Keeps the first `want` accepted attempts in index order, drawing
/// attempts in parallel batches of `batch` up to `budget` in total.
/// Returns the accepted values and the number of attempts consumed.
pub(crate) fn accept_in_order<T, F>(want: u64, batch: u64, budget: u64, f: F) -> Result<(Vec<T>, u64)>
where
    T: Send,
    F: Fn(u64) -> Result<Option<T>> + Sync + Send,
{
    let mut out = Vec::new();
    let mut next = 0u64;
    while (out.len() as u64) < want && next < budget {
        let end = (next + batch.max(1)).min(budget);
        let got: Vec<Result<Option<T>>> = (next..end).into_par_iter().map(&f).collect();
        for (i, g) in got.into_iter().enumerate() {
            if let Some(v) = g? {
                if (out.len() as u64) < want {
                    out.push(v);
                } else {
                    return Ok((out, next + i as u64));
                }
            }
            if out.len() as u64 == want {
                return Ok((out, next + i as u64 + 1));
            }
        }
        next = end;
    }
    Ok((out, next))
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("records are plain data")
}
