//! Re-indexing of a run on the tilted lattice `(x, t) -> (x - t v, t)`.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;

use super::{DynamicsError, Trajectory};
use crate::model::Rational;

/// A point `(x, s)` of the tilted lattice; `x + s v` is integral.
pub type TiltedSite = (Vec<Rational>, i64);

/// Tilted state, hitting times and hit region at one time `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TiltedView {
    pub v: Vec<Rational>,
    pub period: i64,
    pub t: i64,
    /// `{(x, s) in base: (x + (t + s) v, 0) in xi_{t+s}}`.
    pub xi: BTreeSet<TiltedSite>,
    /// `t_hat(x, s)` for every base point hit up to time `t`.
    pub hit_times: BTreeMap<TiltedSite, i64>,
}

impl TiltedView {
    /// `H_hat_t`.
    pub fn hit(&self) -> BTreeSet<TiltedSite> {
        self.hit_times.iter().filter(|(_, &h)| h <= self.t).map(|(p, _)| p.clone()).collect()
    }

    pub fn contains(&self, p: &TiltedSite) -> bool {
        self.xi.contains(p)
    }
}

/// `R_hat = min {t >= R: t v integral}`.
pub fn tilt_period(v: &[Rational], range: i64) -> i64 {
    let l = v.iter().fold(1i64, |acc, q| acc.lcm(q.denom()));
    l * Integer::div_ceil(&range, &l)
}

fn is_integral(v: &[Rational]) -> bool {
    v.iter().all(|q| q.is_integer())
}

/// Computes the tilted view at time `t` from the retained snapshots of a
/// forward run. Needs snapshots at every time in `0..t + R_hat`; the tilted
/// state is supported on lattice points only when `t v` is integral.
pub fn tilted_view(traj: &Trajectory, v: &[Rational], t: i64) -> Result<TiltedView, DynamicsError> {
    let first = traj.snapshots.first().ok_or(DynamicsError::MissingSnapshots(0))?;
    let k = first.window().dim();
    if v.len() != k {
        return Err(DynamicsError::IrrationalTilt);
    }
    let r = first.range() as i64;
    let period = tilt_period(v, r);
    let at = |tau: i64| -> Result<Vec<Vec<i64>>, DynamicsError> {
        match traj.snapshot(tau) {
            Some(s) => Ok(s.row_sites(0)),
            // the chain is absorbed in the empty state
            None if traj.extinction.time().is_some_and(|e| tau >= e) => Ok(Vec::new()),
            None => Err(DynamicsError::MissingSnapshots(tau)),
        }
    };
    let shift = |z: &[i64], tau: i64| -> Vec<Rational> {
        z.iter().zip(v).map(|(&c, q)| Rational::from_integer(c) - q * tau).collect()
    };
    let mut xi = BTreeSet::new();
    let tv: Vec<Rational> = v.iter().map(|q| q * t).collect();
    if is_integral(&tv) {
        for s in 0..period {
            for z in at(t + s)? {
                xi.insert((shift(&z, t + s), s));
            }
        }
    }
    let mut hit_times = BTreeMap::new();
    for tau in 0..=t {
        let s = tau.rem_euclid(period);
        for z in at(tau)? {
            hit_times.entry((shift(&z, tau), s)).or_insert(tau);
        }
    }
    Ok(TiltedView { v: v.to_vec(), period, t, xi, hit_times })
}

/// `K_hat_t` restricted to `points`: where the two tilted states agree.
pub fn tilted_coupled(a: &TiltedView, full: &TiltedView, points: &[TiltedSite]) -> Vec<TiltedSite> {
    points.iter().filter(|p| a.contains(p) == full.contains(p)).cloned().collect()
}
