//! Survival of the origin: order parameters, the critical point proxy and
//! the decay of extinction-time tails.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    check_p, check_reps, linear_fit, origin, replica_field, to_value, try_replicate, Estimate,
    EstimatorError, LinearFit, Result, SummaryRow, Tabulate,
};
use crate::dynamics::{dual_evolve, evolve, evolve_from, initial_state, DomainSpec, Extinction, Probes, ProcessState};
use crate::field::{derive_seed, FieldSpec};
use crate::model::NormalizedModel;

/// Per-replica extinction record of a survival experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalReport {
    pub estimator: String,
    pub p: f64,
    pub horizon: i64,
    pub seed: u64,
    /// Frequency of runs alive at the horizon.
    pub estimate: Estimate,
    pub extinction: Vec<Extinction>,
}

impl SurvivalReport {
    fn new(estimator: &str, p: f64, horizon: i64, seed: u64, extinction: Vec<Extinction>) -> Self {
        let alive = extinction.iter().filter(|e| e.survived()).count() as u64;
        Self {
            estimator: estimator.into(),
            p,
            horizon,
            seed,
            estimate: Estimate::proportion(alive, extinction.len() as u64),
            extinction,
        }
    }

    /// Frequency of runs alive at `t <= horizon`.
    pub fn alive_at(&self, t: i64) -> Estimate {
        let k = self.extinction.iter().filter(|e| e.alive_at(t)).count() as u64;
        Estimate::proportion(k, self.extinction.len() as u64)
    }
}

impl Tabulate for SurvivalReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.extinction
            .iter()
            .enumerate()
            .map(|(i, e)| {
                json!({
                    "replica": i,
                    "seed": derive_seed(self.seed, i as u64),
                    "alive": e.survived(),
                    "tau": e.time(),
                })
            })
            .collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        vec![SummaryRow::new(&self.estimator, self.p, self.horizon, self.seed, &self.estimate)]
    }
}

/// `P(tau^o > T)`: frequency of replicas with `xi^o_T` non-empty.
pub fn survival_curve(model: &NormalizedModel, p: f64, horizon: i64, reps: u64, seed: u64) -> Result<SurvivalReport> {
    check_reps(reps)?;
    check_p(p)?;
    let o = origin(model);
    let ext = try_replicate(reps, |i| {
        let f = replica_field(model, p, seed, i)?;
        Ok(evolve(model, &[o.clone()], &f, &DomainSpec::Full, horizon, &Probes::none())?.extinction)
    })?;
    Ok(SurvivalReport::new("survival", p, horizon, seed, ext))
}

/// Frequency of replicas whose dual chain from the origin is alive after
/// `T` steps.
pub fn dual_survival_curve(
    model: &NormalizedModel,
    p: f64,
    horizon: i64,
    reps: u64,
    seed: u64,
) -> Result<SurvivalReport> {
    check_reps(reps)?;
    check_p(p)?;
    let o = origin(model);
    let ext = try_replicate(reps, |i| {
        let f = replica_field(model, p, seed, i)?;
        Ok(dual_evolve(model, &[o.clone()], &f, &DomainSpec::Full, horizon, &Probes::none())?.extinction)
    })?;
    Ok(SurvivalReport::new("dual_survival", p, horizon, seed, ext))
}

/// One evaluation of the critical-point proxy event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: f64,
    pub seed: u64,
    pub frequency: Estimate,
}

/// Bisection result. The estimate is a finite-size proxy for `p_c`: the
/// parameter where the proxy event has frequency 1/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub label: String,
    pub horizon: i64,
    pub extent_stop: i64,
    pub reps: u64,
    pub seed: u64,
    pub bracket: (f64, f64),
    pub p_hat: f64,
    pub sweep: Vec<SweepPoint>,
    /// `p_hat` recomputed on independent seed sets.
    pub stability: Vec<f64>,
}

impl CriticalReport {
    /// Largest deviation of the stability estimates from `p_hat`.
    pub fn spread(&self) -> f64 {
        self.stability.iter().map(|q| (q - self.p_hat).abs()).fold(0.0, f64::max)
    }
}

impl Tabulate for CriticalReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.sweep
            .iter()
            .enumerate()
            .map(|(i, s)| json!({"point": i, "p": s.p, "seed": s.seed, "frequency": s.frequency}))
            .collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        let e = Estimate {
            mean: self.p_hat,
            stderr: (self.bracket.1 - self.bracket.0) / 2.0,
            n: self.reps,
            ci95: self.bracket,
        };
        vec![SummaryRow::new("pc", self.p_hat, self.horizon, self.seed, &e)]
    }
}

/// `xi^o` alive at `T`, or reaching sup-norm extent `L_stop` before.
fn proxy_event(model: &NormalizedModel, f: &FieldSpec, horizon: i64, extent_stop: i64) -> Result<bool> {
    let mut state = initial_state(model, &[origin(model)])?;
    let mut t = 0;
    loop {
        if state.is_empty() {
            return Ok(false);
        }
        if t >= horizon {
            return Ok(true);
        }
        if let Some(b) = state.bounds() {
            let ext = b.iter().map(|&(lo, hi)| lo.abs().max((hi - 1).abs())).max().unwrap_or(0);
            if ext >= extent_stop {
                return Ok(true);
            }
        }
        state = evolve_from(model, state, f, &DomainSpec::Full, t + 1, &Probes::none()).final_state;
        t += 1;
    }
}

fn proxy_frequency(model: &NormalizedModel, p: f64, horizon: i64, extent_stop: i64, reps: u64, seed: u64) -> Result<Estimate> {
    let hits = try_replicate(reps, |i| proxy_event(model, &replica_field(model, p, seed, i)?, horizon, extent_stop))?;
    Ok(Estimate::proportion(hits.iter().filter(|&&h| h).count() as u64, reps))
}

fn bisect(
    model: &NormalizedModel,
    horizon: i64,
    extent_stop: i64,
    reps: u64,
    tol: f64,
    seed: u64,
    sweep: &mut Vec<SweepPoint>,
) -> Result<(f64, f64)> {
    let mut eval = |p: f64| -> Result<bool> {
        let e = proxy_frequency(model, p, horizon, extent_stop, reps, seed)?;
        sweep.push(SweepPoint { p, seed, frequency: e });
        Ok(e.mean >= 0.5)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if eval(lo)? {
        return Err(EstimatorError::BracketNotFound("frequency at p = 0 is already at least 1/2".into()));
    }
    if !eval(hi)? {
        return Err(EstimatorError::BracketNotFound("frequency at p = 1 is below 1/2".into()));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// Bisection in `p` of the frequency of "`xi^o` reaches time `T` or extent
/// `L_stop`" against 1/2. Replicas share seeds across `p`, so the
/// frequency is non-decreasing in `p` and the bracket always straddles the
/// crossing. `stability_sets` repeats the search on independent seeds.
pub fn critical_point(
    model: &NormalizedModel,
    horizon: i64,
    extent_stop: i64,
    reps: u64,
    tol: f64,
    seed: u64,
    stability_sets: u64,
) -> Result<CriticalReport> {
    check_reps(reps)?;
    if !(tol > 0.0) {
        return Err(EstimatorError::InvalidParameter("tol must be positive".into()));
    }
    let mut sweep = Vec::new();
    let bracket = bisect(model, horizon, extent_stop, reps, tol, seed, &mut sweep)?;
    let mut stability = Vec::new();
    for j in 0..stability_sets {
        let mut scratch = Vec::new();
        let (lo, hi) = bisect(model, horizon, extent_stop, reps, tol, derive_seed(seed, u64::MAX - j), &mut scratch)?;
        sweep.extend(scratch);
        stability.push(0.5 * (lo + hi));
    }
    Ok(CriticalReport {
        label: "finite-size proxy".into(),
        horizon,
        extent_stop,
        reps,
        seed,
        bracket,
        p_hat: 0.5 * (bracket.0 + bracket.1),
        sweep,
        stability,
    })
}

/// Log-linear fit of the finite extinction-time tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeathReport {
    pub p: f64,
    pub horizon: i64,
    pub reps: u64,
    pub seed: u64,
    pub window: (i64, i64),
    pub floor: u64,
    /// `(t, #{t <= tau <= T})` over the window.
    pub tail: Vec<(i64, u64)>,
    /// Fit of `log P(t <= tau <= T)` on the points meeting the floor.
    pub fit: LinearFit,
}

impl Tabulate for DeathReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.tail
            .iter()
            .map(|&(t, c)| json!({"t": t, "count": c, "frequency": c as f64 / self.reps as f64, "used": c >= self.floor}))
            .collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        let f = &self.fit;
        let e = Estimate::normal(f.slope, f.slope_stderr, self.reps);
        vec![SummaryRow::new("death_slope", self.p, self.horizon, self.seed, &e)]
    }
}

/// Minimum number of deaths a window point needs to enter the fit.
pub const DEATH_FLOOR: u64 = 5;

/// Fits `log P(t <= tau^o <= T)` against `t` on the window. Runs alive at
/// `T` are censored out of the event. Points with fewer than
/// [`DEATH_FLOOR`] deaths are dropped; at least three must remain.
pub fn death_bound_fit(
    model: &NormalizedModel,
    p: f64,
    horizon: i64,
    reps: u64,
    window: (i64, i64),
    seed: u64,
) -> Result<DeathReport> {
    check_reps(reps)?;
    check_p(p)?;
    let (a, b) = window;
    if !(1 <= a && a <= b && b <= horizon) {
        return Err(EstimatorError::InvalidParameter(format!("window {window:?} is not inside [1, {horizon}]")));
    }
    let report = survival_curve(model, p, horizon, reps, seed)?;
    let mut deaths = vec![0u64; horizon as usize + 2];
    for e in &report.extinction {
        if let Extinction::At(t) = e {
            deaths[*t as usize] += 1;
        }
    }
    // tail[t] = #{t <= tau <= T}
    let mut tail = vec![0u64; horizon as usize + 2];
    for t in (0..=horizon as usize).rev() {
        tail[t] = tail[t + 1] + deaths[t];
    }
    let points: Vec<(i64, u64)> = (a..=b).map(|t| (t, tail[t as usize])).collect();
    let used: Vec<&(i64, u64)> = points.iter().filter(|(_, c)| *c >= DEATH_FLOOR).collect();
    const NEEDED: usize = 3;
    if used.len() < NEEDED {
        return Err(EstimatorError::InsufficientDeaths { points: used.len(), floor: DEATH_FLOOR, needed: NEEDED });
    }
    let xs: Vec<f64> = used.iter().map(|(t, _)| *t as f64).collect();
    let ys: Vec<f64> = used.iter().map(|(_, c)| (*c as f64 / reps as f64).ln()).collect();
    let fit = linear_fit(&xs, &ys).expect("at least three distinct times");
    Ok(DeathReport { p, horizon, reps, seed, window, floor: DEATH_FLOOR, tail: points, fit })
}

/// Tuning of [`subcritical_decay`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayOptions {
    /// Steps between splitting levels.
    pub stride: i64,
    /// Two fit windows `[a, b]` for the convergence diagnostic.
    pub windows: [(i64, i64); 2],
}

impl DecayOptions {
    /// Trailing windows `[T/2, 3T/4]` and `[3T/4, T]`, levels every 10 steps.
    pub fn for_horizon(horizon: i64) -> Self {
        Self { stride: 10, windows: [(horizon / 2, 3 * horizon / 4), (3 * horizon / 4, horizon)] }
    }
}

/// Tail of `tau^o` from fixed-effort splitting, with `c(p)` fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub p: f64,
    pub horizon: i64,
    pub reps: u64,
    pub seed: u64,
    pub stride: i64,
    /// `tail[t] = P(tau^o >= t)` for `t = 0..=T`.
    pub tail: Vec<Estimate>,
    /// Survivors at each splitting level, before resampling.
    pub level_survivors: Vec<u64>,
    pub windows: [(i64, i64); 2],
    /// Least-squares slope of `-log P(tau >= t)` per window.
    pub c_hat: [f64; 2],
    /// `|c_0 - c_1| / max(c_0, c_1)`.
    pub relative_gap: f64,
}

impl Tabulate for DecayReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.tail.iter().enumerate().map(|(t, e)| json!({"t": t, "tail": to_value(e)})).collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        self.c_hat
            .iter()
            .zip(&self.windows)
            .map(|(c, w)| SummaryRow::new(format!("decay[{},{}]", w.0, w.1), self.p, self.horizon, self.seed, &Estimate::normal(*c, 0.0, self.reps)))
            .collect()
    }
}

/// Estimates `P(tau^o >= t)` by fixed-effort splitting: every `stride`
/// steps the surviving states are resampled to `reps` clones, each
/// continued on a fresh independent field. The chain is Markov in its
/// state, so the product of per-level survival fractions is unbiased.
/// `c(p)` is the slope of `-log P(tau >= t)` over each window.
pub fn subcritical_decay(
    model: &NormalizedModel,
    p: f64,
    horizon: i64,
    reps: u64,
    seed: u64,
    opts: &DecayOptions,
) -> Result<DecayReport> {
    check_reps(reps)?;
    check_p(p)?;
    if opts.stride < 1 {
        return Err(EstimatorError::InvalidParameter("stride must be positive".into()));
    }
    for &(a, b) in &opts.windows {
        if !(1 <= a && a < b && b <= horizon) {
            return Err(EstimatorError::InvalidParameter(format!("window ({a}, {b}) is not inside [1, {horizon}]")));
        }
    }
    let start = initial_state(model, &[origin(model)])?;
    let mut states: Vec<ProcessState> = vec![start; reps as usize];
    // alive[t] = estimate of P(xi_t non-empty), relative variance alongside
    let mut alive = vec![(1.0f64, 0.0f64); horizon as usize + 1];
    let mut weight = 1.0f64;
    let mut rel_var = 0.0f64;
    let mut level_survivors = Vec::new();
    let mut t0 = 0i64;
    let mut level = 0u64;
    let n = reps as f64;
    while t0 < horizon {
        let t1 = (t0 + opts.stride).min(horizon);
        let level_seed = derive_seed(seed, level);
        let runs = try_replicate(reps, |j| {
            let f = FieldSpec::new(model.dim(), derive_seed(level_seed, j), p)?;
            let probes = Probes { counts: true, ..Probes::none() };
            Ok(evolve_from(model, states[j as usize].clone(), &f, &DomainSpec::Full, t1, &probes))
        })?;
        for t in t0 + 1..=t1 {
            let k = runs.iter().filter(|r| r.extinction.alive_at(t)).count() as f64;
            let frac = k / n;
            let var = if k > 0.0 { rel_var + (1.0 - frac) / k } else { f64::INFINITY };
            alive[t as usize] = (weight * frac, var);
        }
        let survivors: Vec<ProcessState> =
            runs.into_iter().filter(|r| r.extinction.survived()).map(|r| r.final_state).collect();
        level_survivors.push(survivors.len() as u64);
        if survivors.is_empty() {
            for t in t1 + 1..=horizon {
                alive[t as usize] = (0.0, f64::INFINITY);
            }
            break;
        }
        let frac = survivors.len() as f64 / n;
        weight *= frac;
        rel_var += (1.0 - frac) / survivors.len() as f64;
        states = (0..reps as usize).map(|j| survivors[j % survivors.len()].clone()).collect();
        t0 = t1;
        level += 1;
    }
    // P(tau >= t) = P(xi_{t-1} non-empty); tau >= 0 always
    let tail: Vec<Estimate> = (0..=horizon)
        .map(|t| {
            let (m, rv) = if t == 0 { (1.0, 0.0) } else { alive[t as usize - 1] };
            let se = if rv.is_finite() { m * rv.sqrt() } else { 0.0 };
            Estimate::normal(m, se, reps)
        })
        .collect();
    let last = opts.windows.iter().map(|w| w.1).max().unwrap();
    if let Some(t) = (1..=last).find(|&t| tail[t as usize].mean <= 0.0) {
        return Err(EstimatorError::InsufficientSurvivals(t - 1));
    }
    let fit = |(a, b): (i64, i64)| {
        let xs: Vec<f64> = (a..=b).map(|t| t as f64).collect();
        let ys: Vec<f64> = (a..=b).map(|t| -tail[t as usize].mean.ln()).collect();
        linear_fit(&xs, &ys).map(|f| f.slope).unwrap_or(f64::NAN)
    };
    let c_hat = [fit(opts.windows[0]), fit(opts.windows[1])];
    let relative_gap = (c_hat[0] - c_hat[1]).abs() / c_hat[0].abs().max(c_hat[1].abs());
    Ok(DecayReport {
        p,
        horizon,
        reps,
        seed,
        stride: opts.stride,
        tail,
        level_survivors,
        windows: opts.windows,
        c_hat,
        relative_gap,
    })
}
