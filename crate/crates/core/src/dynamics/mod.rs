//! Exact evolution of the restricted process `_B xi^A_t`, its dual, and the
//! derived observables: hitting times, hit and coupled regions, edges,
//! torus extinction and tilted views.
//!
//! The forward chain at step `t` is the set of slab sites `(x, s)`,
//! `0 <= s < R`, such that `(x, t + s)` is reached from `A` by a path whose
//! sites after the first are open and lie in `B`. Reachability is reflexive,
//! so `xi_0 = A` whether or not the sites of `A` are open.

mod bits;
mod domain;
mod edge;
mod reach;
mod regions;
mod snapshot;
mod state;
mod survivors;
mod tilt;
mod torus;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use domain::{DomainSpec, Region};
pub use edge::{edge_track, EdgeTrack, Side};
pub use reach::{dual_reaches, reaches, reaches_within};
pub use regions::{coupling_margin, hit_and_coupled_regions, Regions};
pub use snapshot::{decode_rows, encode_rows, Snapshot};
pub use state::{ProcessState, Window};
pub use tilt::{tilt_period, tilted_coupled, tilted_view, TiltedView};
pub use survivors::{dual_survivors, SurvivorMap};
pub use torus::torus_extinction;

pub(crate) use domain::Translated;
pub(crate) use regions::full_slab_on_window;
pub(crate) use state::steps_of;

use crate::field::SiteField;
use crate::model::NormalizedModel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("site {0:?} is outside the time slab")]
    SiteOutsideSlab(Vec<i64>),
    #[error("site has {got} coordinates, model is {expected}-dimensional")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("operation needs d = 2, model has d = {0}")]
    DimensionNot2(usize),
    #[error("torus side {n} is too small, need at least {min}")]
    TorusTooSmall { n: i64, min: i64 },
    #[error("margin {given} is below the required dilation {required}")]
    WindowTooSmall { required: i64, given: i64 },
    #[error("tilt vector has the wrong dimension or a non-representable entry")]
    IrrationalTilt,
    #[error("no snapshot retained for time {0}")]
    MissingSnapshots(i64),
    #[error("edge could not be certified within truncation {0}")]
    Uncertified(i64),
    #[error("{0}")]
    Unsupported(&'static str),
}

/// Absorption time of the chain observed up to a horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extinction {
    /// `tau = min {t: xi_t empty}`.
    At(i64),
    /// Still non-empty at the horizon.
    Survived(i64),
}

impl Extinction {
    pub fn survived(&self) -> bool {
        matches!(self, Extinction::Survived(_))
    }

    /// `tau > t` is known from the observation.
    pub fn alive_at(&self, t: i64) -> bool {
        match *self {
            Extinction::At(tau) => tau > t,
            Extinction::Survived(h) => {
                debug_assert!(t <= h);
                true
            }
        }
    }

    pub fn time(&self) -> Option<i64> {
        match *self {
            Extinction::At(tau) => Some(tau),
            Extinction::Survived(_) => None,
        }
    }
}

/// Which states to keep along a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum Retain {
    #[default]
    None,
    Every,
    At(Vec<i64>),
}

/// Optional observations collected by [`evolve`].
#[derive(Debug, Clone, Default)]
pub struct Probes {
    pub counts: bool,
    pub snapshots: Retain,
    pub hitting: bool,
    /// Per-step smallest and largest occupied axis-0 coordinate.
    pub extremes: bool,
}

impl Probes {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        Self { counts: true, snapshots: Retain::Every, hitting: true, extremes: true }
    }
}

/// Hitting times `t^A(x) = min {t: (x, 0) in xi^A_t}` up to a horizon.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HittingData {
    pub horizon: i64,
    pub times: BTreeMap<Vec<i64>, i64>,
}

impl HittingData {
    /// `None` means unreached by the horizon.
    pub fn get(&self, x: &[i64]) -> Option<i64> {
        self.times.get(x).copied()
    }

    /// `H_t = {(x, s) in S: t^A(x) <= t - s}` for a slab of height `range`.
    pub fn hit_region(&self, t: i64, range: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for (x, &tx) in &self.times {
            for s in 0..range {
                if tx <= t - s {
                    let mut site = x.clone();
                    site.push(s);
                    out.push(site);
                }
            }
        }
        out.sort();
        out
    }
}

/// Result of [`evolve`] or [`dual_evolve`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub extinction: Extinction,
    pub horizon: i64,
    /// `counts[t] = |xi_t|` for every simulated `t`.
    pub counts: Vec<u64>,
    pub snapshots: Vec<ProcessState>,
    pub hitting: Option<HittingData>,
    pub extremes: Vec<Option<(i64, i64)>>,
    pub final_state: ProcessState,
}

impl Trajectory {
    pub fn snapshot(&self, t: i64) -> Option<&ProcessState> {
        self.snapshots.iter().find(|s| s.t() == t)
    }
}

/// `xi_0^A`. Sites are given in slab coordinates and need not be open.
pub fn initial_state(model: &NormalizedModel, a: &[Vec<i64>]) -> Result<ProcessState, DynamicsError> {
    ProcessState::new(model, a)
}

/// One step of the chain (forward or dual, as recorded in the state).
pub fn step<F: SiteField + ?Sized>(
    state: &mut ProcessState,
    model: &NormalizedModel,
    field: &F,
    domain: &DomainSpec,
) {
    let steps = steps_of(model);
    let region = domain.resolve(model.range(), state.is_dual());
    if state.is_dual() {
        state.step_dual(&steps, field, &region);
    } else {
        state.step_forward(&steps, field, &region);
    }
}

/// Runs the forward chain from `A` for at most `horizon` steps.
pub fn evolve<F: SiteField + ?Sized>(
    model: &NormalizedModel,
    a: &[Vec<i64>],
    field: &F,
    domain: &DomainSpec,
    horizon: i64,
    probes: &Probes,
) -> Result<Trajectory, DynamicsError> {
    let state = match domain.torus_side() {
        Some(n) => ProcessState::on_torus(model, n, a)?,
        None => ProcessState::new(model, a)?,
    };
    let region = domain.resolve(model.range(), false);
    Ok(run(model, state, field, &region, horizon, probes))
}

/// Runs the dual chain from `A`: time runs along `-e_d`, a site extends
/// only if it is open and in the domain, newly reached sites need not be
/// open. [`DomainSpec::Full`] is read as its time reversal, which never
/// restricts the dual chain.
pub fn dual_evolve<F: SiteField + ?Sized>(
    model: &NormalizedModel,
    a: &[Vec<i64>],
    field: &F,
    domain: &DomainSpec,
    horizon: i64,
    probes: &Probes,
) -> Result<Trajectory, DynamicsError> {
    let torus = domain.torus_side();
    if let Some(n) = torus {
        state::check_torus(model, n)?;
    }
    let state = ProcessState::build(model, a, true, torus)?;
    let region = domain.resolve(model.range(), true);
    Ok(run(model, state, field, &region, horizon, probes))
}

/// Continues `state` up to absolute step `horizon`. Forward states run
/// under `domain`; dual states under its time reversal.
pub fn evolve_from<F: SiteField + ?Sized>(
    model: &NormalizedModel,
    state: ProcessState,
    field: &F,
    domain: &DomainSpec,
    horizon: i64,
    probes: &Probes,
) -> Trajectory {
    let region = domain.resolve(model.range(), state.is_dual());
    run(model, state, field, &region, horizon, probes)
}

/// Steps `state` until `horizon` or extinction, collecting `probes`.
pub(crate) fn run<F, G>(
    model: &NormalizedModel,
    mut state: ProcessState,
    field: &F,
    region: &G,
    horizon: i64,
    probes: &Probes,
) -> Trajectory
where
    F: SiteField + ?Sized,
    G: Region + ?Sized,
{
    let steps = steps_of(model);
    let mut counts = Vec::new();
    let mut snapshots = Vec::new();
    let mut extremes = Vec::new();
    let mut hits = probes.hitting.then(|| HitTracker::new(model.dim() - 1));
    let keep = |t: i64| match &probes.snapshots {
        Retain::None => false,
        Retain::Every => true,
        Retain::At(ts) => ts.contains(&t),
    };
    let extinction = loop {
        let t = state.t();
        if probes.counts {
            counts.push(state.count());
        }
        if probes.extremes {
            extremes.push(state.axis0_extremes());
        }
        if let Some(h) = hits.as_mut() {
            h.record(&state);
        }
        if keep(t) {
            snapshots.push(state.clone());
        }
        if state.is_empty() {
            break Extinction::At(t);
        }
        if t >= horizon {
            break Extinction::Survived(horizon);
        }
        if state.is_dual() {
            state.step_dual(&steps, field, region);
        } else {
            state.step_forward(&steps, field, region);
        }
    };
    Trajectory {
        extinction,
        horizon,
        counts,
        snapshots,
        hitting: hits.map(|h| h.finish(horizon)),
        extremes,
        final_state: state,
    }
}

/// Grow-only record of sites seen in row 0.
struct HitTracker {
    window: Window,
    bits: Vec<u64>,
    times: BTreeMap<Vec<i64>, i64>,
}

impl HitTracker {
    fn new(k: usize) -> Self {
        Self { window: Window::new(vec![0; k], vec![0; k]), bits: Vec::new(), times: BTreeMap::new() }
    }

    fn record(&mut self, state: &ProcessState) {
        let sw = state.window();
        let k = sw.dim();
        let row = state.row_words(0);
        let sn = sw.words();
        let mut rest = vec![0; k - 1];
        let mut tmp = Vec::new();
        for line in 0..sw.lines() {
            let src = &row[line * sn..][..sn];
            if src.iter().all(|&w| w == 0) {
                continue;
            }
            sw.rest_of(line, &mut rest);
            let (a, b) = bits::span(src).unwrap();
            let mut need: Vec<(i64, i64)> = vec![(sw.lo[0] + a as i64, sw.lo[0] + b as i64 + 1)];
            need.extend(rest.iter().map(|&c| (c, c + 1)));
            self.grow(&need);
            let w = &self.window;
            let tn = w.words();
            let tl = w.line_of(&rest).unwrap();
            tmp.clear();
            tmp.resize(tn, 0u64);
            bits::or_shifted(&mut tmp, src, sw.lo[0] - w.lo[0]);
            let hit = &mut self.bits[tl * tn..][..tn];
            for (i, word) in tmp.iter().enumerate() {
                let fresh = word & !hit[i];
                if fresh != 0 {
                    bits::for_each_one(&[fresh], |j| {
                        let mut x = Vec::with_capacity(k);
                        x.push(w.lo[0] + (i * 64 + j) as i64);
                        x.extend_from_slice(&rest);
                        self.times.insert(x, state.t());
                    });
                    hit[i] |= fresh;
                }
            }
        }
    }

    fn grow(&mut self, need: &[(i64, i64)]) {
        let w = &self.window;
        if w.volume() > 0 && need.iter().enumerate().all(|(i, &(l, h))| w.lo[i] <= l && h <= w.hi[i]) {
            return;
        }
        let k = w.dim();
        let mut lo = Vec::with_capacity(k);
        let mut hi = Vec::with_capacity(k);
        for (i, &(l, h)) in need.iter().enumerate() {
            let (l, h) = if w.volume() > 0 { (l.min(w.lo[i]), h.max(w.hi[i])) } else { (l, h) };
            let pad = if i == 0 { 64 + (h - l) / 2 } else { 1 + (h - l) / 4 };
            lo.push(l - pad);
            hi.push(h + pad);
        }
        let new = Window::new(lo, hi);
        let mut bits_new = vec![0u64; new.lines() * new.words()];
        let (ow, nw) = (w.words(), new.words());
        let mut rest = vec![0; k - 1];
        for line in 0..w.lines() {
            w.rest_of(line, &mut rest);
            let dl = new.line_of(&rest).unwrap();
            let dst = &mut bits_new[dl * nw..][..nw];
            bits::or_shifted(dst, &self.bits[line * ow..][..ow], w.lo[0] - new.lo[0]);
        }
        self.window = new;
        self.bits = bits_new;
    }

    fn finish(self, horizon: i64) -> HittingData {
        HittingData { horizon, times: self.times }
    }
}
