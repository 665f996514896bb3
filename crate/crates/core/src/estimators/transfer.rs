//! Crossing paths of two tilted boxes and their sprinkled transfer (d = 2).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{accept_in_order, check_p, check_reps, require_2d, Estimate, EstimatorError, Result, SummaryRow, Tabulate};
use crate::dynamics::{evolve, reaches_within, DomainSpec, Probes};
use crate::field::{derive_seed, AllOpen, FieldSpec, SiteField};
use crate::geometry::{box_points, BlockGeometry, PlacedBlock};
use crate::model::{NormalizedModel, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferOptions {
    /// Box half-width is `floor(box_eps L)`.
    pub box_eps: f64,
    /// Tilt of `B` (right edge speed).
    pub alpha: Rational,
    /// Tilt of `B'` (left edge speed).
    pub beta: Rational,
    /// Half-side of the probe box `B_n`.
    pub n: i64,
    /// Attempts drawn before giving up.
    pub budget: u64,
}

/// One field on which both boxes are crossed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferSample {
    pub attempt: u64,
    pub gamma: Vec<Vec<i64>>,
    pub gamma_prime: Vec<Vec<i64>>,
    /// `gamma ∩ gamma' != empty`.
    pub paths_meet: bool,
    /// `hat gamma ∩ gamma' != empty`.
    pub hat_meets: bool,
    /// `a_0 ->[gamma ∪ gamma' ∪ eta] a'_{m'}` on the sprinkled field.
    pub transfer: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub p: f64,
    pub eps: f64,
    pub length: i64,
    pub reps: u64,
    pub seed: u64,
    pub options: TransferOptions,
    /// `(t, v)` with `v + B_n ⊆ xi^o_t` at `p = 1`.
    pub probe: (i64, Vec<i64>),
    /// Sprinkled sites are those within this sup-distance of `B ∩ B'`.
    pub eta_radius: i64,
    pub attempts: u64,
    /// Fraction of attempts where both boxes are crossed.
    pub crossing: Estimate,
    /// Fraction of crossing samples with a successful transfer.
    pub transfer: Estimate,
    pub hat_meets: Estimate,
    pub paths_meet: Estimate,
    pub samples: Vec<TransferSample>,
}

impl Tabulate for TransferReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, s)| {
                json!({
                    "sample": i,
                    "attempt": s.attempt,
                    "paths_meet": s.paths_meet,
                    "hat_meets": s.hat_meets,
                    "transfer": s.transfer,
                    "gamma": s.gamma,
                    "gamma_prime": s.gamma_prime,
                })
            })
            .collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        vec![
            SummaryRow::new("crossing_detected", self.p, self.length, self.seed, &self.crossing),
            SummaryRow::new("sprinkled_transfer", self.p, self.length, self.seed, &self.transfer),
        ]
    }
}

/// Smallest `t <= t_max`, then lexicographically smallest `v`, with
/// `v + B_n ⊆ xi^o_t` when every site is open.
pub fn sum_box_probe(model: &NormalizedModel, n: i64, t_max: i64) -> Option<(i64, Vec<i64>)> {
    let k = model.spatial_dim();
    let r = model.range();
    let probes = Probes { snapshots: crate::dynamics::Retain::Every, ..Probes::none() };
    let traj = evolve(model, &[vec![0; k + 1]], &AllOpen, &DomainSpec::Full, t_max, &probes).ok()?;
    let mut bx = vec![(-n, n); k];
    bx.push((0, r));
    let bx = box_points(&bx);
    for state in traj.snapshots.iter().skip(1) {
        let Some(bounds) = state.bounds() else { continue };
        let centres: Vec<(i64, i64)> = bounds.iter().map(|&(lo, hi)| (lo + n, hi - n + 1)).collect();
        for v in box_points(&centres) {
            let full = bx.iter().all(|z| {
                let mut q: Vec<i64> = z[..k].iter().zip(&v).map(|(a, b)| a + b).collect();
                q.push(z[k]);
                state.contains(&q)
            });
            if full {
                return Some((state.t(), v));
            }
        }
    }
    None
}

/// Open sites of a placed box from which an open path inside the box
/// reaches time `top`, by time.
struct Good {
    t0: i64,
    rows: Vec<(i64, Vec<bool>)>,
}

impl Good {
    fn new<F: SiteField>(model: &NormalizedModel, f: &F, b: &PlacedBlock, top: i64) -> Self {
        let (t0, t1) = b.time_range();
        let mut rows: Vec<(i64, Vec<bool>)> = vec![(0, Vec::new()); (t1 - t0) as usize];
        for t in (t0..t1).rev() {
            let (lo, hi) = b.axis_range(0, t).unwrap_or((0, 0));
            let row = (lo..hi)
                .map(|x| {
                    f.is_open(&[x, t])
                        && (t >= top
                            || model.split_offsets().iter().any(|o| {
                                rows.get((t + o.time - t0) as usize).is_some_and(|(l, r)| {
                                    let j = x + o.spatial[0] - l;
                                    j >= 0 && r.get(j as usize).copied().unwrap_or(false)
                                })
                            }))
                })
                .collect();
            rows[(t - t0) as usize] = (lo, row);
        }
        Self { t0, rows }
    }

    fn get(&self, x: i64, t: i64) -> bool {
        let Some((lo, row)) = self.rows.get((t - self.t0) as usize) else { return false };
        let j = x - lo;
        j >= 0 && row.get(j as usize).copied().unwrap_or(false)
    }
}

/// Leftmost crossing path of `b` from a site of the bottom slab to a site
/// of time at least `top`: the lexicographically smallest start whose
/// successor set holds a good site, then the smallest good successor.
fn leftmost_crossing<F: SiteField>(model: &NormalizedModel, f: &F, b: &PlacedBlock, top: i64) -> Option<Vec<Vec<i64>>> {
    let good = Good::new(model, f, b, top);
    let r = model.range();
    let (t0, _) = b.time_range();
    let offsets = model.split_offsets();
    let mut starts = Vec::new();
    // a_1 = a_0 + y lies at most 2R - 1 above the bottom of the box
    for t in t0 + 1..t0 + 2 * r {
        let (lo, hi) = b.axis_range(0, t).unwrap_or((0, 0));
        for x in lo..hi {
            if good.get(x, t) {
                for o in offsets.iter().filter(|o| (t0..t0 + r).contains(&(t - o.time))) {
                    starts.push((x - o.spatial[0], t - o.time));
                }
            }
        }
    }
    let (mut x, mut t) = starts.into_iter().min()?;
    let mut path = vec![vec![x, t]];
    loop {
        let (nx, nt) = offsets
            .iter()
            .map(|o| (x + o.spatial[0], t + o.time))
            .filter(|&(a, s)| good.get(a, s))
            .min()?;
        path.push(vec![nx, nt]);
        (x, t) = (nx, nt);
        if t >= top {
            return Some(path);
        }
    }
}

/// Sites within sup-distance `radius` of `B ∩ B'`.
fn near_intersection(b: &PlacedBlock, bp: &PlacedBlock, radius: i64) -> HashSet<Vec<i64>> {
    let mut out = HashSet::new();
    for site in b.sites().filter(|s| bp.contains(s)) {
        for dt in -radius..=radius {
            for dx in -radius..=radius {
                out.insert(vec![site[0] + dx, site[1] + dt]);
            }
        }
    }
    out
}

struct Setup {
    b: PlacedBlock,
    bp: PlacedBlock,
    top: i64,
    probe: (i64, Vec<i64>),
    n: i64,
    eta: HashSet<Vec<i64>>,
}

fn transfer_sample(model: &NormalizedModel, f: &FieldSpec, st: &Setup, attempt: u64) -> Result<Option<TransferSample>> {
    let Some(gamma) = leftmost_crossing(model, f, &st.b, st.top) else { return Ok(None) };
    let Some(gamma_prime) = leftmost_crossing(model, f, &st.bp, st.top) else { return Ok(None) };
    let r = model.range();
    let own: HashSet<&Vec<i64>> = gamma.iter().collect();
    let paths_meet = gamma_prime.iter().any(|a| own.contains(a));
    let (pt, pv) = (st.probe.0, st.probe.1[0]);
    let hat_meets = gamma_prime.iter().any(|q| {
        gamma.iter().any(|a| {
            let dx = q[0] - a[0] - pv;
            let dt = q[1] - a[1] - pt;
            (-st.n..st.n).contains(&dx) && (0..r).contains(&dt)
        })
    });
    let path_sites: HashSet<&Vec<i64>> = gamma.iter().chain(&gamma_prime).collect();
    let sprinkled = f.sprinkled()?;
    let member = |s: &[i64]| {
        let s = s.to_vec();
        path_sites.contains(&s) || (st.eta.contains(&s) && f.extra_open(&s))
    };
    let transfer = reaches_within(model, &gamma[0], gamma_prime.last().unwrap(), &sprinkled, member);
    Ok(Some(TransferSample { attempt, gamma, gamma_prime, paths_meet, hat_meets, transfer }))
}

/// Draws fields until `reps` of them have both `B = B(w, L + R, alpha) - 2w e_1`
/// and `B' = B(w, L + R, beta) + 2w e_1` crossed from their bottom slab to
/// time `L`, with `w = floor(box_eps L)`. On each, extracts the leftmost
/// crossing paths `gamma`, `gamma'`, tests `hat gamma ∩ gamma'` for the
/// probe `(t, v)` of [`sum_box_probe`], and whether the field sprinkled by
/// `eps` near `B ∩ B'` joins `a_0` to `a'_{m'}` inside `gamma ∪ gamma' ∪ eta`.
pub fn path_crossing_transfer(
    model: &NormalizedModel,
    p: f64,
    eps: f64,
    length: i64,
    reps: u64,
    seed: u64,
    opts: &TransferOptions,
) -> Result<TransferReport> {
    require_2d(model)?;
    check_reps(reps)?;
    check_p(p)?;
    if !(0.0..=1.0 - p + 1e-12).contains(&eps) {
        return Err(EstimatorError::InvalidParameter(format!("eps = {eps} is not in [0, 1 - p]")));
    }
    if opts.alpha <= opts.beta {
        return Err(EstimatorError::InvalidParameter("need alpha > beta".into()));
    }
    let w = (opts.box_eps * length as f64).floor() as i64;
    if w < 1 || opts.n < 1 {
        return Err(EstimatorError::InvalidParameter(format!("need floor(box_eps L) >= 1 and n >= 1, got w = {w}")));
    }
    let r = model.range();
    let probe = sum_box_probe(model, opts.n, 64 * (opts.n + r))
        .ok_or_else(|| EstimatorError::InvalidParameter(format!("no sumset box of half-side {}", opts.n)))?;
    let radius = 2 * (probe.0 + opts.n + r);
    let block = |v: Rational| BlockGeometry::new(vec![w], length + r, vec![v]);
    let b = PlacedBlock::new(block(opts.alpha)?, vec![Rational::from_integer(-2 * w)], 0);
    let bp = PlacedBlock::new(block(opts.beta)?, vec![Rational::from_integer(2 * w)], 0);
    let eta = near_intersection(&b, &bp, radius);
    let st = Setup { b, bp, top: length, probe: probe.clone(), n: opts.n, eta };
    let (samples, attempts) = accept_in_order(reps, reps.max(64), opts.budget, |j| {
        let f = FieldSpec::new(2, derive_seed(seed, j), p)?.with_sprinkle(eps)?;
        transfer_sample(model, &f, &st, j)
    })?;
    if (samples.len() as u64) < reps {
        return Err(EstimatorError::NoCrossingFound(attempts));
    }
    let count = |f: fn(&TransferSample) -> bool| samples.iter().filter(|s| f(s)).count() as u64;
    Ok(TransferReport {
        p,
        eps,
        length,
        reps,
        seed,
        options: opts.clone(),
        probe,
        eta_radius: radius,
        attempts,
        crossing: Estimate::proportion(reps, attempts),
        transfer: Estimate::proportion(count(|s| s.transfer), reps),
        hat_meets: Estimate::proportion(count(|s| s.hat_meets), reps),
        paths_meet: Estimate::proportion(count(|s| s.paths_meet), reps),
        samples,
    })
}
