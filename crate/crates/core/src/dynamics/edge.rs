//! Right and left edges of the half-slab processes in `d = 2`.

use serde::{Deserialize, Serialize};

use super::domain::DomainSpec;
use super::state::ProcessState;
use super::{run, DynamicsError, Probes};
use crate::field::SiteField;
use crate::model::NormalizedModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `r_t = max {x: (x, s) in xi^{S^-}_t}`, `S^-` the left half-slab.
    Right,
    /// `l_t = min {x: (x, s) in xi^{S^+}_t}`, `S^+` the right half-slab.
    Left,
}

/// Edge values `values[t]` for `t = 0..=T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTrack {
    pub side: Side,
    pub values: Vec<i64>,
    /// Set when no site is ever open: the process is empty from this step.
    pub extinct_from: Option<i64>,
    /// Half-slab truncation that certified the values.
    pub truncation: i64,
}

/// Runs `xi^{S^-}` (or `xi^{S^+}`) truncated to `|x| <= L`, doubling `L`
/// until every value up to `horizon` is certified exact: a value is exact
/// once it beats the furthest point that sites beyond the truncation can
/// reach. Fails with [`DynamicsError::Uncertified`] past `max_truncation`.
pub fn edge_track<F: SiteField + ?Sized>(
    model: &NormalizedModel,
    field: &F,
    side: Side,
    horizon: i64,
    max_truncation: i64,
) -> Result<EdgeTrack, DynamicsError> {
    if model.dim() != 2 {
        return Err(DynamicsError::DimensionNot2(model.dim()));
    }
    let r = model.range();
    let (lo, hi) = model.axis_speeds(0);
    let zero = lo * 0;
    // furthest inward drift of sites beyond the truncation after dt steps
    let drift = |dt: i64| match side {
        Side::Right => (hi.max(zero) * dt).floor().to_integer(),
        Side::Left => ((-lo).max(zero) * dt).floor().to_integer(),
    };
    let mut trunc = (drift(horizon + r) / 2).max(16);
    loop {
        let start: Vec<Vec<i64>> = (0..=trunc)
            .flat_map(|x| (0..r).map(move |s| vec![if side == Side::Right { -x } else { x }, s]))
            .collect();
        let state = ProcessState::new(model, &start)?;
        let probes = Probes { extremes: true, ..Probes::none() };
        let traj = run(model, state, field, &DomainSpec::Full.resolve(r, false), horizon, &probes);
        let mut values = Vec::with_capacity(traj.extremes.len());
        let mut certified = true;
        let mut extinct_from = None;
        for (t, e) in traj.extremes.iter().enumerate() {
            let bound = drift(t as i64 + r - 1) - trunc - 1;
            match (side, e) {
                (_, None) => {
                    extinct_from = Some(t as i64);
                    certified = field.never_open();
                    break;
                }
                (Side::Right, Some((_, m))) => {
                    certified &= *m >= bound;
                    values.push(*m);
                }
                (Side::Left, Some((m, _))) => {
                    certified &= *m <= -bound;
                    values.push(*m);
                }
            }
            if !certified {
                break;
            }
        }
        if certified {
            return Ok(EdgeTrack { side, values, extinct_from, truncation: trunc });
        }
        if trunc >= max_truncation {
            return Err(DynamicsError::Uncertified(trunc));
        }
        trunc = (trunc * 2).min(max_truncation);
    }
}
