//! Density of dual survivors in boxes `B_n`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{check_p, check_reps, replica_field, survival_curve, try_replicate, Estimate, EstimatorError, Histogram, Result, SummaryRow, Tabulate};
use crate::dynamics::dual_survivors;
use crate::field::derive_seed;
use crate::model::NormalizedModel;

/// Smallest accepted survival depth.
pub const MIN_DEPTH: i64 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityLevel {
    pub n: i64,
    pub mean: Estimate,
    pub histogram: Histogram,
    /// `(a, frequency of Y_n <= a)` over the grid.
    pub below: Vec<(f64, Estimate)>,
    pub samples: Vec<f64>,
}

impl DensityLevel {
    pub fn frequency_below(&self, a: f64) -> Estimate {
        let k = self.samples.iter().filter(|&&y| y <= a).count() as u64;
        Estimate::proportion(k, self.samples.len() as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub p: f64,
    pub depth: i64,
    pub reps: u64,
    pub seed: u64,
    pub levels: Vec<DensityLevel>,
    /// `P(tau^o > T_inf)` on independent replicas.
    pub theta: Estimate,
    /// `p * theta`, the mean of every `Y_n`.
    pub p_theta: Estimate,
}

impl Tabulate for DensityReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.levels
            .iter()
            .flat_map(|l| l.samples.iter().enumerate().map(move |(i, y)| json!({"n": l.n, "replica": i, "y": y})))
            .collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        let mut rows: Vec<SummaryRow> = self
            .levels
            .iter()
            .map(|l| SummaryRow::new(format!("density_n{}", l.n), self.p, self.depth, self.seed, &l.mean))
            .collect();
        rows.push(SummaryRow::new("p_theta", self.p, self.depth, self.seed, &self.p_theta));
        rows
    }
}

/// `Y_n`: fraction of the slab sites of `B_n = [-n, n)^{d-1} x [0, R)`
/// whose dual chain survives `T_inf` steps, sampled for each `n` in
/// `sizes`, together with `p * theta_hat` from `theta_reps` primal runs.
#[allow(clippy::too_many_arguments)]
pub fn density_spectrum(
    model: &NormalizedModel,
    p: f64,
    sizes: &[i64],
    depth: i64,
    reps: u64,
    seed: u64,
    a_grid: &[f64],
    theta_reps: u64,
) -> Result<DensityReport> {
    check_reps(reps)?;
    check_reps(theta_reps)?;
    check_p(p)?;
    if depth < MIN_DEPTH {
        return Err(EstimatorError::InvalidParameter(format!("T_inf must be at least {MIN_DEPTH}")));
    }
    if sizes.iter().any(|&n| n < 1) {
        return Err(EstimatorError::InvalidParameter("box sizes must be positive".into()));
    }
    let k = model.spatial_dim();
    let mut levels = Vec::new();
    for &n in sizes {
        let samples = try_replicate(reps, |i| {
            let f = replica_field(model, p, seed, i)?;
            Ok(dual_survivors(model, &f, &vec![-n; k], &vec![n; k], depth)?.fraction())
        })?;
        let below = a_grid
            .iter()
            .map(|&a| (a, Estimate::proportion(samples.iter().filter(|&&y| y <= a).count() as u64, reps)))
            .collect();
        levels.push(DensityLevel {
            n,
            mean: Estimate::from_samples(&samples),
            histogram: Histogram::new(&samples, 0.0, 1.0, 20),
            below,
            samples,
        });
    }
    let theta = survival_curve(model, p, depth, theta_reps, derive_seed(seed, u64::MAX))?.estimate;
    Ok(DensityReport { p, depth, reps, seed, levels, theta, p_theta: theta.scaled(p) })
}
