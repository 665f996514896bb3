//! Extinction times on finite tori.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{check_p, check_reps, ks_exponential, linear_fit, replica_field, try_replicate, Estimate, EstimatorError, LinearFit, Result, SummaryRow, Tabulate};
use crate::dynamics::{torus_extinction, Extinction};
use crate::model::NormalizedModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusLevel {
    pub n: i64,
    pub mean: Estimate,
    /// KS distance of `tau / mean(tau)` to `Exp(1)`.
    pub ks: f64,
    /// `mean(tau) / log n`.
    pub log_ratio: f64,
    pub taus: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusReport {
    pub p: f64,
    pub t_max: i64,
    pub reps: u64,
    pub seed: u64,
    pub levels: Vec<TorusLevel>,
    /// `mean(tau)` against `log n`; compare the slope to `(d - 1) / c(p)`.
    pub log_fit: Option<LinearFit>,
    /// `log mean(tau)` against `n^{d-1}`.
    pub volume_fit: Option<LinearFit>,
}

impl TorusReport {
    /// Largest relative deviation of `mean / log n` from its average.
    pub fn log_ratio_spread(&self) -> f64 {
        let rs: Vec<f64> = self.levels.iter().map(|l| l.log_ratio).collect();
        let (lo, hi) = rs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r)));
        (hi - lo) / lo
    }
}

impl Tabulate for TorusReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.levels
            .iter()
            .flat_map(|l| l.taus.iter().enumerate().map(move |(i, t)| json!({"n": l.n, "replica": i, "tau": t})))
            .collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        self.levels
            .iter()
            .map(|l| SummaryRow::new(format!("torus_n{}", l.n), self.p, self.t_max, self.seed, &l.mean))
            .collect()
    }
}

/// Extinction time of the full torus `(Z/nZ)^{d-1}` for each side in
/// `sizes`. Refuses if any run is still alive at `t_max`.
pub fn torus_stats(
    model: &NormalizedModel,
    p: f64,
    sizes: &[i64],
    reps: u64,
    t_max: i64,
    seed: u64,
) -> Result<TorusReport> {
    check_reps(reps)?;
    check_p(p)?;
    if sizes.is_empty() {
        return Err(EstimatorError::InvalidParameter("no torus sizes".into()));
    }
    let mut levels = Vec::new();
    for &n in sizes {
        let runs = try_replicate(reps, |i| {
            let f = replica_field(model, p, seed, i)?;
            Ok(torus_extinction(model, &f, n, t_max)?)
        })?;
        let censored = runs.iter().filter(|e| e.survived()).count() as u64;
        if censored > 0 {
            return Err(EstimatorError::CensoredMean { n, censored, reps });
        }
        let taus: Vec<i64> = runs
            .iter()
            .map(|e| match e {
                Extinction::At(t) => *t,
                Extinction::Survived(_) => unreachable!(),
            })
            .collect();
        let xs: Vec<f64> = taus.iter().map(|&t| t as f64).collect();
        let mean = Estimate::from_samples(&xs);
        levels.push(TorusLevel {
            n,
            ks: ks_exponential(&xs),
            log_ratio: mean.mean / (n as f64).ln(),
            mean,
            taus,
        });
    }
    let k = model.spatial_dim() as i32;
    let ln: Vec<f64> = levels.iter().map(|l| (l.n as f64).ln()).collect();
    let means: Vec<f64> = levels.iter().map(|l| l.mean.mean).collect();
    let vol: Vec<f64> = levels.iter().map(|l| (l.n as f64).powi(k)).collect();
    let log_means: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    Ok(TorusReport {
        p,
        t_max,
        reps,
        seed,
        log_fit: linear_fit(&ln, &means),
        volume_fit: linear_fit(&vol, &log_means),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, NeighborhoodSpec};

    #[test]
    fn zero_density_dies_at_once() {
        let m = validate(&NeighborhoodSpec::planar(&[(0, 1), (1, 1)])).unwrap();
        let r = torus_stats(&m, 0.0, &[4, 8], 10, 100, 0).unwrap();
        for l in &r.levels {
            assert!(l.taus.iter().all(|&t| t == 1));
        }
    }

    #[test]
    fn censoring_is_refused() {
        let m = validate(&NeighborhoodSpec::planar(&[(0, 1), (1, 1)])).unwrap();
        let r = torus_stats(&m, 1.0, &[4], 3, 50, 0);
        assert!(matches!(r, Err(EstimatorError::CensoredMean { censored: 3, .. })));
    }
}
