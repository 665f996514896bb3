//! Limit shape, restricted-cone percolation and primal-dual meeting.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    accept_in_order, check_p, check_reps, linear_fit, origin, replica_field, try_replicate, Estimate, EstimatorError,
    Result, SummaryRow, Tabulate,
};
use crate::dynamics::{
    dual_evolve, evolve, hit_and_coupled_regions, run, DomainSpec, HittingData, Probes, ProcessState, Translated,
    Window,
};
use crate::field::{derive_seed, FieldSpec, Shifted};
use crate::geometry::{box_points, Polytope};
use crate::model::{NormalizedModel, Rational};

/// Smallest conditioning acceptance rate before a parameter is refused.
pub const SURVIVAL_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeOptions {
    /// Number of directions on the circle (d = 3); ignored otherwise.
    pub grid: usize,
    /// Runs are kept only if alive at this time.
    pub condition_horizon: i64,
}

/// Per-run observations of the shape experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeRun {
    pub attempt: u64,
    /// `max <x, u> / t` over `H_t ∩ K_t`, per direction.
    pub support: Vec<f64>,
    /// `max <x, u> / t` over `xi^o_t`, per direction.
    pub xi_support: Vec<f64>,
    /// Slope of `t^o(floor(n u))` against `n`, per direction.
    pub mu: Vec<Option<f64>>,
}

/// `U_hat = {x: <x, u> <= h(u) for every grid direction u}` with `h` the
/// mean support of `(H_t ∩ K_t) / t`, plus per-direction time constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeEstimate {
    pub p: f64,
    pub t: i64,
    pub reps: u64,
    pub seed: u64,
    pub condition_horizon: i64,
    /// Unit vectors in `R^{d-1}`.
    pub directions: Vec<Vec<f64>>,
    pub support: Vec<Estimate>,
    /// Time constant `mu(u)`; `None` where the ray from the origin misses
    /// the shape in too many runs.
    pub mu_hat: Vec<Option<Estimate>>,
    /// Fraction of attempts that survived to the conditioning horizon.
    pub acceptance: Estimate,
    pub runs: Vec<ShapeRun>,
}

impl ShapeEstimate {
    /// `[lo, hi]` of `U_hat` when `d = 2`.
    pub fn interval(&self) -> Option<(Estimate, Estimate)> {
        if self.directions.first()?.len() != 1 {
            return None;
        }
        let right = self.directions.iter().position(|u| u[0] > 0.0)?;
        let left = self.directions.iter().position(|u| u[0] < 0.0)?;
        Some((self.support[left].scaled(-1.0), self.support[right]))
    }

    /// `<x, u> < h(u)` for every direction.
    pub fn contains_interior(&self, x: &[f64]) -> bool {
        self.directions.iter().zip(&self.support).all(|(u, h)| dot(u, x) < h.mean)
    }

    /// Fraction of runs with `xi^o_t ⊆ (1 + eps) t U_hat`.
    pub fn containment_frequency(&self, eps: f64) -> Estimate {
        let ok = self
            .runs
            .iter()
            .filter(|r| r.xi_support.iter().zip(&self.support).all(|(x, h)| *x <= (1.0 + eps) * h.mean))
            .count() as u64;
        Estimate::proportion(ok, self.runs.len() as u64)
    }
}

impl Tabulate for ShapeEstimate {
    fn records(&self) -> Vec<serde_json::Value> {
        self.runs.iter().enumerate().map(|(i, r)| json!({"replica": i, "run": r})).collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        let mut rows = Vec::new();
        for (i, h) in self.support.iter().enumerate() {
            rows.push(SummaryRow::new(format!("support_u{i}"), self.p, self.t, self.seed, h));
            if let Some(m) = &self.mu_hat[i] {
                rows.push(SummaryRow::new(format!("mu_u{i}"), self.p, self.t, self.seed, m));
            }
        }
        rows
    }
}

fn dot(u: &[f64], x: &[f64]) -> f64 {
    u.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Direction grid: `+-1` for `k = 1`, `grid` angles for `k = 2`, and the
/// normalised `+-e_i` and `+-e_i +- e_j` otherwise.
pub fn directions(k: usize, grid: usize) -> Vec<Vec<f64>> {
    match k {
        1 => vec![vec![-1.0], vec![1.0]],
        2 => {
            let g = grid.max(4);
            (0..g)
                .map(|j| {
                    let a = std::f64::consts::TAU * j as f64 / g as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        }
        _ => {
            let mut out = Vec::new();
            for i in 0..k {
                for s in [-1.0, 1.0] {
                    let mut u = vec![0.0; k];
                    u[i] = s;
                    out.push(u);
                }
                for j in i + 1..k {
                    for (a, b) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                        let mut u = vec![0.0; k];
                        u[i] = a * std::f64::consts::FRAC_1_SQRT_2;
                        u[j] = b * std::f64::consts::FRAC_1_SQRT_2;
                        out.push(u);
                    }
                }
            }
            out
        }
    }
}

fn support(dirs: &[Vec<f64>], sites: &[Vec<i64>], t: i64) -> Vec<f64> {
    dirs.iter()
        .map(|u| {
            sites
                .iter()
                .map(|s| dot(u, &s[..u.len()].iter().map(|&c| c as f64).collect::<Vec<_>>()))
                .fold(f64::NEG_INFINITY, f64::max)
                / t as f64
        })
        .collect()
}

/// Slope of `t^o(floor(n u))` against `n` over the upper three quarters of
/// the initial run of hit points `n = 1, 2, ...`.
fn time_constant(hitting: &HittingData, u: &[f64]) -> Option<f64> {
    let mut pts = Vec::new();
    for n in 1.. {
        let x: Vec<i64> = u.iter().map(|c| (c * n as f64).floor() as i64).collect();
        match hitting.get(&x) {
            Some(t) => pts.push((n as f64, t as f64)),
            None => break,
        }
    }
    let from = pts.len() / 4;
    let tail = &pts[from..];
    if tail.len() < 3 {
        return None;
    }
    let xs: Vec<f64> = tail.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.1).collect();
    linear_fit(&xs, &ys).map(|f| f.slope)
}

fn shape_run(
    model: &NormalizedModel,
    f: &FieldSpec,
    t: i64,
    cond: i64,
    dirs: &[Vec<f64>],
    attempt: u64,
) -> Result<Option<ShapeRun>> {
    let o = origin(model);
    let probes = Probes { hitting: true, ..Probes::none() };
    let first = evolve(model, &[o], f, &DomainSpec::Full, cond.max(t), &probes)?;
    if !first.extinction.survived() {
        return Ok(None);
    }
    let hit = first.hitting.unwrap_or_default();
    let k = model.spatial_dim();
    let mut lo = vec![i64::MAX; k];
    let mut hi = vec![i64::MIN; k];
    for (x, &tx) in &hit.times {
        if tx <= t {
            for i in 0..k {
                lo[i] = lo[i].min(x[i]);
                hi[i] = hi[i].max(x[i] + 1);
            }
        }
    }
    let window = Window::new(lo, hi);
    let regions = hit_and_coupled_regions(model, f, t, &window, None)?;
    let hk = regions.hit_and_coupled();
    let xi = regions.origin.sites();
    Ok(Some(ShapeRun {
        attempt,
        support: support(dirs, &hk, t),
        xi_support: support(dirs, &xi, t),
        mu: dirs.iter().map(|u| time_constant(&regions.hitting, u)).collect(),
    }))
}

/// Conditions on survival to `condition_horizon` by rejection, then reads
/// the support of `(H_t ∩ K_t) / t` and of `xi^o_t / t` per direction and
/// regresses hitting times along each direction. Refuses when fewer than
/// [`SURVIVAL_FLOOR`] of the attempts survive.
pub fn shape_and_time_constants(
    model: &NormalizedModel,
    p: f64,
    t: i64,
    reps: u64,
    opts: &ShapeOptions,
    seed: u64,
) -> Result<ShapeEstimate> {
    check_reps(reps)?;
    check_p(p)?;
    if t < 1 {
        return Err(EstimatorError::InvalidParameter("t must be at least 1".into()));
    }
    let dirs = directions(model.spatial_dim(), opts.grid);
    let budget = (reps as f64 / SURVIVAL_FLOOR).ceil() as u64;
    let (runs, attempts) = accept_in_order(reps, reps, budget, |i| {
        let f = replica_field(model, p, seed, i)?;
        shape_run(model, &f, t, opts.condition_horizon, &dirs, i)
    })?;
    let acceptance = Estimate::proportion(runs.len() as u64, attempts.max(1));
    if (runs.len() as u64) < reps {
        return Err(EstimatorError::SubcriticalRefused { freq: acceptance.mean, floor: SURVIVAL_FLOOR });
    }
    let support = (0..dirs.len())
        .map(|j| {
            let xs: Vec<f64> = runs.iter().map(|r| r.support[j]).filter(|x| x.is_finite()).collect();
            if xs.is_empty() {
                Estimate::normal(f64::NEG_INFINITY, 0.0, 0)
            } else {
                Estimate::from_samples(&xs)
            }
        })
        .collect();
    let mu_hat = (0..dirs.len())
        .map(|j| {
            let xs: Vec<f64> = runs.iter().filter_map(|r| r.mu[j]).collect();
            (xs.len() * 2 > runs.len()).then(|| Estimate::from_samples(&xs))
        })
        .collect();
    Ok(ShapeEstimate {
        p,
        t,
        reps,
        seed,
        condition_horizon: opts.condition_horizon,
        directions: dirs,
        support,
        mu_hat,
        acceptance,
        runs,
    })
}

/// Restricted-cone survival frequency with its start window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub p: f64,
    pub horizon: i64,
    pub reps: u64,
    pub seed: u64,
    /// Start sites are the cone sites with time in `[t0 - R + 1, t0]`.
    pub start_window: (i64, i64),
    pub policy: String,
    pub estimate: Estimate,
    pub percolated: Vec<bool>,
}

impl Tabulate for ConeReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.percolated.iter().enumerate().map(|(i, c)| json!({"replica": i, "percolated": c})).collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        vec![SummaryRow::new("cone", self.p, self.horizon, self.seed, &self.estimate)]
    }
}

/// Fails unless every vertex of `o` lies strictly inside `U_hat`.
fn check_cone_base(o: &Polytope, shape: &ShapeEstimate) -> Result<()> {
    let verts = o.vertices();
    if verts.is_empty() {
        return Err(EstimatorError::ConeOutsideShape("cone base is empty or unbounded".into()));
    }
    for v in &verts {
        let x: Vec<f64> = v.iter().map(|q| *q.numer() as f64 / *q.denom() as f64).collect();
        for (u, h) in shape.directions.iter().zip(&shape.support) {
            if dot(u, &x) >= h.mean {
                return Err(EstimatorError::ConeOutsideShape(format!(
                    "vertex {x:?} has <x, {u:?}> = {:.4} >= support {:.4}",
                    dot(u, &x),
                    h.mean
                )));
            }
        }
    }
    Ok(())
}

/// Frequency that some site of the cone `C = {(t z, t): t > 0, z in O}`
/// with time at most `t0` is joined to time `T` by a path inside `C`.
///
/// Every such path crosses the `R` consecutive times `[t0 - R + 1, t0]`,
/// and start sites need not be open, so the event equals survival to `T`
/// of the process in `C` started from all cone sites at those times.
#[allow(clippy::too_many_arguments)]
pub fn restricted_cone_survival(
    model: &NormalizedModel,
    p: f64,
    o: &Polytope,
    horizon: i64,
    t0: i64,
    reps: u64,
    seed: u64,
    shape: &ShapeEstimate,
) -> Result<ConeReport> {
    check_reps(reps)?;
    check_p(p)?;
    let k = model.spatial_dim();
    if o.dim() != k {
        return Err(EstimatorError::InvalidParameter(format!("cone base has dimension {}, need {k}", o.dim())));
    }
    check_cone_base(o, shape)?;
    let r = model.range();
    let sigma = t0 - r + 1;
    if sigma < 1 || horizon <= t0 {
        return Err(EstimatorError::InvalidParameter(format!("need R <= t0 < T, got t0 = {t0}, T = {horizon}")));
    }
    let domain = DomainSpec::Cone { polytope: o.clone() };
    let verts = o.vertices();
    let mut start = Vec::new();
    for s in 0..r {
        let tau = sigma + s;
        let ranges: Vec<(i64, i64)> = (0..k)
            .map(|i| {
                let lo = verts.iter().map(|v| (v[i] * tau).floor().to_integer()).min().unwrap();
                let hi = verts.iter().map(|v| (v[i] * tau).ceil().to_integer()).max().unwrap();
                (lo, hi + 1)
            })
            .collect();
        for mut x in box_points(&ranges) {
            x.push(tau);
            if domain.contains(&x, r) {
                x[k] = s;
                start.push(x);
            }
        }
    }
    let mut shift = vec![0; k + 1];
    shift[k] = sigma;
    let region = Translated { inner: domain.resolve(r, false), shift: shift.clone() };
    let percolated = try_replicate(reps, |i| {
        let f = replica_field(model, p, seed, i)?;
        let g = Shifted::new(&f, &shift);
        let state = ProcessState::new(model, &start)?;
        Ok(run(model, state, &g, &region, horizon - sigma, &Probes::none()).extinction.survived())
    })?;
    let hits = percolated.iter().filter(|&&b| b).count() as u64;
    Ok(ConeReport {
        p,
        horizon,
        reps,
        seed,
        start_window: (sigma, t0),
        policy: "cone sites with time in [t0 - R + 1, t0], start sites exempt from being open".into(),
        estimate: Estimate::proportion(hits, reps),
        percolated,
    })
}

/// Coordinatewise nearest integer to `2 t v`, ties toward `-inf`.
pub fn round_displacement(v: &[Rational], t: i64) -> Vec<i64> {
    let half = Rational::new(1, 2);
    v.iter().map(|c| (*c * (2 * t) - half).ceil().to_integer()).collect()
}

/// Failure frequency of primal-dual meeting per horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeetReport {
    pub p: f64,
    pub reps: u64,
    pub seed: u64,
    pub v_hat: Vec<Rational>,
    pub times: Vec<i64>,
    /// `P(both alive at t, xi_t ∩ dual_t empty)`.
    pub failure: Vec<Estimate>,
    pub both_alive: Vec<Estimate>,
}

impl Tabulate for MeetReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.times
            .iter()
            .enumerate()
            .map(|(j, t)| json!({"point": j, "t": t, "failure": self.failure[j], "both_alive": self.both_alive[j]}))
            .collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        self.times
            .iter()
            .zip(&self.failure)
            .map(|(t, e)| SummaryRow::new("meet_failure", self.p, *t, self.seed, e))
            .collect()
    }
}

/// Runs `xi^o` on one field and, on an independent field, the dual chain
/// from `(z, 2t)` with `z` the rounded `2 t v_hat`; both states at step
/// `t` live on the slab of times `[t, t + R)`.
pub fn primal_dual_meet(
    model: &NormalizedModel,
    p: f64,
    times: &[i64],
    reps: u64,
    v_hat: &[Rational],
    seed: u64,
) -> Result<MeetReport> {
    check_reps(reps)?;
    check_p(p)?;
    let k = model.spatial_dim();
    if v_hat.len() != k {
        return Err(EstimatorError::InvalidParameter(format!("v_hat needs {k} coordinates")));
    }
    let mut failure = Vec::new();
    let mut both_alive = Vec::new();
    for &t in times {
        if t < 1 {
            return Err(EstimatorError::InvalidParameter("meeting times must be positive".into()));
        }
        let z = round_displacement(v_hat, t);
        let outcomes = try_replicate(reps, |i| {
            let s = derive_seed(seed, i);
            let f1 = FieldSpec::new(model.dim(), derive_seed(s, 0), p)?;
            let f2 = FieldSpec::new(model.dim(), derive_seed(s, 1), p)?;
            let primal = evolve(model, &[origin(model)], &f1, &DomainSpec::Full, t, &Probes::none())?;
            let mut shift = vec![0; k + 1];
            shift[k] = 2 * t;
            let g = Shifted::new(&f2, &shift);
            let mut start = z.clone();
            start.push(0);
            let dual = dual_evolve(model, &[start], &g, &DomainSpec::Full, t, &Probes::none())?;
            let alive = primal.extinction.survived() && dual.extinction.survived();
            if !alive {
                return Ok((false, false));
            }
            let a = primal.final_state.absolute_sites();
            let mut b = dual.final_state.absolute_sites();
            for site in &mut b {
                site[k] += 2 * t;
            }
            let meet = b.iter().any(|s| a.binary_search(s).is_ok());
            Ok((true, !meet))
        })?;
        let n_alive = outcomes.iter().filter(|o| o.0).count() as u64;
        let n_fail = outcomes.iter().filter(|o| o.1).count() as u64;
        both_alive.push(Estimate::proportion(n_alive, reps));
        failure.push(Estimate::proportion(n_fail, reps));
    }
    Ok(MeetReport { p, reps, seed, v_hat: v_hat.to_vec(), times: times.to_vec(), failure, both_alive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, NeighborhoodSpec};

    fn asym() -> NormalizedModel {
        validate(&NeighborhoodSpec::planar(&[(-1, 1), (0, 1), (2, 1)])).unwrap()
    }

    #[test]
    fn rounding_ties_go_down() {
        let v = [Rational::new(1, 4), Rational::new(-1, 4), Rational::new(1, 3)];
        // 2 t v at t = 1: 1/2, -1/2, 2/3
        assert_eq!(round_displacement(&v, 1), vec![0, -1, 1]);
    }

    #[test]
    fn full_density_shape_is_the_spread() {
        let opts = ShapeOptions { grid: 8, condition_horizon: 30 };
        let s = shape_and_time_constants(&asym(), 1.0, 30, 2, &opts, 0).unwrap();
        let (lo, hi) = s.interval().unwrap();
        assert_eq!((lo.mean, hi.mean), (-1.0, 2.0));
        assert_eq!(s.containment_frequency(0.0).mean, 1.0);
        assert_eq!(s.acceptance.mean, 1.0);
    }

    #[test]
    fn zero_density_is_refused() {
        let opts = ShapeOptions { grid: 8, condition_horizon: 10 };
        let r = shape_and_time_constants(&asym(), 0.0, 10, 4, &opts, 0);
        assert!(matches!(r, Err(EstimatorError::SubcriticalRefused { .. })));
    }

    #[test]
    fn meeting_at_full_and_zero_density() {
        let m = validate(&NeighborhoodSpec::planar(&[(0, 1), (1, 1)])).unwrap();
        let v = [Rational::new(1, 2)];
        let full = primal_dual_meet(&m, 1.0, &[4, 16], 3, &v, 0).unwrap();
        assert!(full.failure.iter().all(|e| e.mean == 0.0));
        assert!(full.both_alive.iter().all(|e| e.mean == 1.0));
        let none = primal_dual_meet(&m, 0.0, &[4], 3, &v, 0).unwrap();
        assert_eq!((none.failure[0].mean, none.both_alive[0].mean), (0.0, 0.0));
    }

    #[test]
    fn cone_outside_shape_is_refused() {
        let opts = ShapeOptions { grid: 8, condition_horizon: 20 };
        let s = shape_and_time_constants(&asym(), 1.0, 20, 1, &opts, 0).unwrap();
        let wide = Polytope::interval(Rational::new(-2, 1), Rational::new(0, 1));
        let r = restricted_cone_survival(&asym(), 1.0, &wide, 50, 5, 3, 0, &s);
        assert!(matches!(r, Err(EstimatorError::ConeOutsideShape(_))));
        let inner = Polytope::interval(Rational::new(-1, 2), Rational::new(1, 1));
        let ok = restricted_cone_survival(&asym(), 1.0, &inner, 50, 5, 3, 0, &s).unwrap();
        assert_eq!(ok.estimate.mean, 1.0);
        let zero = restricted_cone_survival(&asym(), 0.0, &inner, 50, 5, 3, 0, &s).unwrap();
        assert_eq!(zero.estimate.mean, 0.0);
    }
}
