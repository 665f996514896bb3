//! Edge speeds of half-line initial conditions and crossings of tilted
//! boxes (d = 2).

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{check_p, check_reps, replica_field, require_2d, try_replicate, Estimate, EstimatorError, Result, SummaryRow, Tabulate};
use crate::dynamics::{edge_track, evolve, DomainSpec, EdgeTrack, Probes, Side};
use crate::geometry::BlockGeometry;
use crate::model::{NormalizedModel, Rational};

/// Largest half-line truncation tried before giving up.
pub const MAX_TRUNCATION: i64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub replica: u64,
    pub r_t: Option<i64>,
    pub l_t: Option<i64>,
    pub truncation: (i64, i64),
}

/// `alpha = E r_T / T`, `beta = E l_T / T` with per-`t` diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub p: f64,
    pub horizon: i64,
    pub reps: u64,
    pub seed: u64,
    pub alpha: Estimate,
    pub beta: Estimate,
    /// `min_{1 <= t <= T} mean(r_t) / t`, an upper-bound diagnostic for alpha.
    pub alpha_inf: f64,
    /// `max_{1 <= t <= T} mean(l_t) / t`.
    pub beta_sup: f64,
    pub replicas: Vec<EdgeRecord>,
}

impl Tabulate for EdgeReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.replicas.iter().map(|r| serde_json::to_value(r).unwrap()).collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        vec![
            SummaryRow::new("alpha", self.p, self.horizon, self.seed, &self.alpha),
            SummaryRow::new("beta", self.p, self.horizon, self.seed, &self.beta),
        ]
    }
}

fn value(track: &EdgeTrack, t: i64) -> f64 {
    match track.values.get(t as usize) {
        Some(&v) => v as f64,
        None if track.side == Side::Right => f64::NEG_INFINITY,
        None => f64::INFINITY,
    }
}

/// Runs both half-line processes on each replica field (shared across
/// sides and, for a fixed seed, across `p`).
pub fn edge_speeds(model: &NormalizedModel, p: f64, horizon: i64, reps: u64, seed: u64) -> Result<EdgeReport> {
    require_2d(model)?;
    check_reps(reps)?;
    check_p(p)?;
    if horizon < 1 {
        return Err(EstimatorError::InvalidParameter("T must be at least 1".into()));
    }
    let tracks = try_replicate(reps, |i| {
        let f = replica_field(model, p, seed, i)?;
        let r = edge_track(model, &f, Side::Right, horizon, MAX_TRUNCATION)?;
        let l = edge_track(model, &f, Side::Left, horizon, MAX_TRUNCATION)?;
        Ok((r, l))
    })?;
    let n = reps as f64;
    let mut alpha_inf = f64::INFINITY;
    let mut beta_sup = f64::NEG_INFINITY;
    for t in 1..=horizon {
        let mr = tracks.iter().map(|(r, _)| value(r, t)).sum::<f64>() / n;
        let ml = tracks.iter().map(|(_, l)| value(l, t)).sum::<f64>() / n;
        alpha_inf = alpha_inf.min(mr / t as f64);
        beta_sup = beta_sup.max(ml / t as f64);
    }
    let th = horizon as f64;
    let rs: Vec<f64> = tracks.iter().map(|(r, _)| value(r, horizon) / th).collect();
    let ls: Vec<f64> = tracks.iter().map(|(_, l)| value(l, horizon) / th).collect();
    let replicas = tracks
        .iter()
        .enumerate()
        .map(|(i, (r, l))| EdgeRecord {
            replica: i as u64,
            r_t: r.values.get(horizon as usize).copied(),
            l_t: l.values.get(horizon as usize).copied(),
            truncation: (r.truncation, l.truncation),
        })
        .collect();
    Ok(EdgeReport {
        p,
        horizon,
        reps,
        seed,
        alpha: Estimate::from_samples(&rs),
        beta: Estimate::from_samples(&ls),
        alpha_inf,
        beta_sup,
        replicas,
    })
}

/// Frequency of `_B xi^{S^-}_L` non-empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub p: f64,
    pub length: i64,
    pub eps: f64,
    pub slope: Rational,
    pub half_width: i64,
    pub reps: u64,
    pub seed: u64,
    pub estimate: Estimate,
    pub crossed: Vec<bool>,
}

impl Tabulate for CrossingReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.crossed.iter().enumerate().map(|(i, c)| json!({"replica": i, "crossed": c})).collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        vec![SummaryRow::new("crossing", self.p, self.length, self.seed, &self.estimate)]
    }
}

/// The crossing block `B(floor(eps L), L + R, slope)`; its top slab holds
/// the state at step `L`.
pub fn crossing_block(model: &NormalizedModel, length: i64, eps: f64, slope: Rational) -> Result<BlockGeometry> {
    let w = (eps * length as f64).floor() as i64;
    if w < 1 {
        return Err(EstimatorError::InvalidParameter(format!("floor(eps L) = {w} must be at least 1")));
    }
    Ok(BlockGeometry::new(vec![w], length + model.range(), vec![slope])?)
}

/// `S^-` cut to the sites that can enter the block in one step.
fn truncated_half_line(model: &NormalizedModel, w: i64, slope: Rational) -> Vec<Vec<i64>> {
    let r = model.range();
    let reach = model.split_offsets().iter().map(|o| o.spatial[0].abs()).max().unwrap_or(0);
    let tilt = (slope.abs() * (2 * r)).ceil().to_integer();
    let xmin = -w - tilt - reach - 1;
    (xmin..=0).flat_map(|x| (0..r).map(move |s| vec![x, s])).collect()
}

/// Frequency of `{_B xi^{S^-}_L != empty}` with `B = B(floor(eps L), L + R, slope)`.
/// Sites of `S^-` that cannot step into `B` are dropped, which leaves the
/// event unchanged.
pub fn crossing_probability(
    model: &NormalizedModel,
    p: f64,
    length: i64,
    eps: f64,
    slope: Rational,
    reps: u64,
    seed: u64,
) -> Result<CrossingReport> {
    require_2d(model)?;
    check_reps(reps)?;
    check_p(p)?;
    let block = crossing_block(model, length, eps, slope)?;
    let w = block.w()[0];
    let domain = DomainSpec::block(block, vec![0, 0]);
    let start = truncated_half_line(model, w, slope);
    let crossed = try_replicate(reps, |i| {
        let f = replica_field(model, p, seed, i)?;
        Ok(evolve(model, &start, &f, &domain, length, &Probes::none())?.extinction.survived())
    })?;
    let k = crossed.iter().filter(|&&c| c).count() as u64;
    Ok(CrossingReport {
        p,
        length,
        eps,
        slope,
        half_width: w,
        reps,
        seed,
        estimate: Estimate::proportion(k, reps),
        crossed,
    })
}
