//! Block events of the renormalisation arguments.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{check_p, check_reps, replica_field, try_replicate, Estimate, EstimatorError, Result, SummaryRow, Tabulate};
use crate::dynamics::{
    coupling_margin, evolve, full_slab_on_window, steps_of, DomainSpec, ProcessState, Probes, Retain,
    Translated, Window,
};
use crate::field::{derive_seed, mix_site, FieldSpec, Shifted, SiteField};
use crate::geometry::{bg_target_blocks, box_points, BlockGeometry, PlacedBlock};
use crate::model::{NormalizedModel, Rational};

/// One sample of the block-renormalisation event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BgSample {
    /// `(x, t)`, uniform in `B(w, h, v)`.
    pub source: Vec<i64>,
    /// First `(y, s)` found with `(y, s) + B_n` fully infected.
    pub target: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BgReport {
    pub p: f64,
    pub geometry: BlockGeometry,
    pub n: i64,
    pub reps: u64,
    pub seed: u64,
    pub estimate: Estimate,
    pub samples: Vec<BgSample>,
}

impl Tabulate for BgReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.samples.iter().enumerate().map(|(i, s)| json!({"replica": i, "sample": s})).collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        vec![SummaryRow::new("bg_event", self.p, self.geometry.h(), self.seed, &self.estimate)]
    }
}

/// Uniform site of a placed block from a hash key.
fn sample_site(block: &PlacedBlock, key: u64) -> Vec<i64> {
    let (t0, t1) = block.time_range();
    let t = t0 + (mix_site(key, &[0]) % (t1 - t0) as u64) as i64;
    let k = block.block.spatial_dim();
    let mut x: Vec<i64> = (0..k)
        .map(|i| {
            let (lo, hi) = block.axis_range(i, t).expect("non-empty section");
            lo + (mix_site(key, &[1 + i as i64]) % (hi - lo) as u64) as i64
        })
        .collect();
    x.push(t);
    x
}

/// `B_n` in slab coordinates.
fn slab_box(k: usize, n: i64, r: i64) -> Vec<Vec<i64>> {
    let mut ranges = vec![(-n, n); k];
    ranges.push((0, r));
    box_points(&ranges)
}

/// `(x, t) + B_n ->[B(4w, 8h, v)] (y, s) + B_n` for some `(y, s)` in
/// either target block; returns the first such `(y, s)` by time, then
/// target, then position.
fn bg_event<F: SiteField>(
    model: &NormalizedModel,
    field: &F,
    g: &BlockGeometry,
    n: i64,
    source: &[i64],
) -> Result<Option<Vec<i64>>> {
    let k = model.spatial_dim();
    let r = model.range();
    let t = source[k];
    let bx = slab_box(k, n, r);
    let start: Vec<Vec<i64>> = bx
        .iter()
        .map(|z| {
            let mut s: Vec<i64> = z[..k].iter().zip(source).map(|(a, b)| a + b).collect();
            s.push(z[k]);
            s
        })
        .collect();
    let regions = bg_target_blocks(g);
    let env = DomainSpec::block(regions.envelope.block.clone(), vec![0; k + 1]);
    let mut shift = vec![0; k + 1];
    shift[k] = t;
    let region = Translated { inner: env.resolve(r, false), shift: shift.clone() };
    let shifted = Shifted::new(field, &shift);
    let steps = steps_of(model);
    let mut state = ProcessState::new(model, &start)?;
    let (lift, top) = regions.targets[0].time_range();
    // (y, s) + B_n lies in the envelope only if s + R <= 8h
    let last = (top - 1).min(8 * g.h() - r);
    while state.t() + t < last {
        state.step_forward(&steps, &shifted, &region);
        if state.is_empty() {
            return Ok(None);
        }
        let s = state.t() + t;
        if s < lift {
            continue;
        }
        for target in &regions.targets {
            let ranges: Vec<(i64, i64)> = (0..k).map(|i| target.axis_range(i, s).unwrap_or((0, 0))).collect();
            for y in box_points(&ranges) {
                let full = bx.iter().all(|z| {
                    let mut q: Vec<i64> = z[..k].iter().zip(&y).map(|(a, b)| a + b).collect();
                    q.push(z[k]);
                    state.contains(&q)
                });
                if full {
                    let mut hit = y;
                    hit.push(s);
                    return Ok(Some(hit));
                }
            }
        }
    }
    Ok(None)
}

/// Frequency, over `(x, t)` uniform in `B(w, h, v)`, that `(x, t) + B_n`
/// infects every site of `(y, s) + B_n` inside `B(4w, 8h, v)` for some
/// `(y, s)` in one of the target blocks `B(w, h, v) + 7h(v, 1) +- 2 w_{d-1} e_{d-1}`.
pub fn bg_event_probability(
    model: &NormalizedModel,
    p: f64,
    g: &BlockGeometry,
    n: i64,
    reps: u64,
    seed: u64,
) -> Result<BgReport> {
    check_reps(reps)?;
    check_p(p)?;
    let k = model.spatial_dim();
    if g.spatial_dim() != k {
        return Err(EstimatorError::InvalidParameter(format!("block has {} axes, need {k}", g.spatial_dim())));
    }
    let wmin = *g.w().iter().min().unwrap();
    if n < 1 || n >= wmin {
        return Err(EstimatorError::InvalidParameter(format!("need 1 <= n < min w = {wmin}, got n = {n}")));
    }
    if g.h() <= model.range() {
        return Err(EstimatorError::InvalidParameter(format!("need h > R = {}", model.range())));
    }
    let source_block = PlacedBlock::at_origin(g.clone());
    let samples = try_replicate(reps, |i| {
        let f = replica_field(model, p, seed, i)?;
        let source = sample_site(&source_block, derive_seed(derive_seed(seed, i), 0));
        let target = bg_event(model, &f, g, n, &source)?;
        Ok(BgSample { source, target })
    })?;
    let hits = samples.iter().filter(|s| s.target.is_some()).count() as u64;
    Ok(BgReport {
        p,
        geometry: g.clone(),
        n,
        reps,
        seed,
        estimate: Estimate::proportion(hits, reps),
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoodBlockOptions {
    /// Block tilt; defaults to the centre of the spread on every axis.
    pub v: Option<Vec<Rational>>,
}

/// Which of the three events held on one replica.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodBlockOutcome {
    pub dichotomy: bool,
    pub coupling: bool,
    pub probes: bool,
}

impl GoodBlockOutcome {
    pub fn good(&self) -> bool {
        self.dichotomy && self.coupling && self.probes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodBlockReport {
    pub p: f64,
    pub length: i64,
    pub c: i64,
    pub v: Vec<Rational>,
    pub reps: u64,
    pub seed: u64,
    pub estimate: Estimate,
    /// Per-event frequencies; events 2 and 3 are evaluated even when an
    /// earlier one fails.
    pub event_frequencies: [Estimate; 3],
    pub outcomes: Vec<GoodBlockOutcome>,
}

impl Tabulate for GoodBlockReport {
    fn records(&self) -> Vec<serde_json::Value> {
        self.outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| json!({"replica": i, "good": o.good(), "events": o}))
            .collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        let mut rows = vec![SummaryRow::new("good_block", self.p, self.length, self.seed, &self.estimate)];
        for (j, e) in self.event_frequencies.iter().enumerate() {
            rows.push(SummaryRow::new(format!("good_block_event{}", j + 1), self.p, self.length, self.seed, e));
        }
        rows
    }
}

fn spread_centre(model: &NormalizedModel) -> Vec<Rational> {
    (0..model.spatial_dim())
        .map(|i| {
            let (lo, hi) = model.axis_speeds(i);
            (lo + hi) / 2
        })
        .collect()
}

fn window_of(blocks: &[&PlacedBlock]) -> Window {
    let k = blocks[0].block.spatial_dim();
    let mut lo = vec![i64::MAX; k];
    let mut hi = vec![i64::MIN; k];
    for b in blocks {
        for (i, (l, h)) in b.bounding_box().into_iter().enumerate() {
            lo[i] = lo[i].min(l);
            hi[i] = hi[i].max(h);
        }
    }
    Window::new(lo, hi)
}

struct Scale {
    l: i64,
    cl: i64,
    short: i64,
    s: i64,
    v: Vec<Rational>,
}

impl Scale {
    fn block(&self, w: i64, h: i64) -> BlockGeometry {
        BlockGeometry::new(vec![w; self.v.len()], h, self.v.clone()).expect("positive sizes")
    }

    /// `B(3w, R, v) + u v` in slab coordinates.
    fn coupling_block(&self, u: i64, r: i64) -> PlacedBlock {
        let origin = self.v.iter().map(|c| c * u).collect();
        PlacedBlock::new(self.block(3 * self.l, r), origin, 0)
    }

    /// `B(w / C, R, v) + s (v, 0) +- L e_{d-1}`.
    fn probe_blocks(&self, r: i64) -> [PlacedBlock; 2] {
        let k = self.v.len();
        let probe = |sign: i64| {
            let mut origin: Vec<Rational> = self.v.iter().map(|c| c * self.s).collect();
            origin[k - 1] += Rational::from_integer(sign * self.l);
            PlacedBlock::new(self.block(self.short, r), origin, 0)
        };
        [probe(1), probe(-1)]
    }
}

fn good_block_run(model: &NormalizedModel, f: &FieldSpec, sc: &Scale) -> Result<GoodBlockOutcome> {
    let k = model.spatial_dim();
    let r = model.range();
    let base = PlacedBlock::at_origin(sc.block(sc.l, r));
    let checks = [sc.s, sc.cl].map(|u| sc.coupling_block(u, r));
    let mut dichotomy = true;
    let mut coupling = true;
    // xi^S on the shifted field, per start time t and check time u
    let mut full: Vec<Option<[ProcessState; 2]>> = vec![None; r as usize];
    for site in base.sites() {
        let t = site[k];
        let mut shift = vec![0; k + 1];
        shift[k] = t - r + 1;
        let g = Shifted::new(f, &shift);
        let mut start = site[..k].to_vec();
        start.push(r - 1);
        let at: Vec<i64> = [sc.s, sc.cl].iter().map(|u| u - t + r - 1).collect();
        let probes = Probes { snapshots: Retain::At(at.clone()), ..Probes::none() };
        let traj = evolve(model, &[start], &g, &DomainSpec::Full, sc.s + r - 1, &probes)?;
        let tau = traj.extinction.time().unwrap_or(i64::MAX);
        if tau < sc.short {
            continue;
        }
        if tau < sc.s {
            dichotomy = false;
        }
        if !coupling {
            continue;
        }
        if full[t as usize].is_none() {
            let mut pair = Vec::new();
            for (j, &u) in at.iter().enumerate() {
                let window = window_of(&[&checks[j]]);
                pair.push(full_slab_on_window(model, &g, u, &window, coupling_margin(model, u))?);
            }
            full[t as usize] = Some([pair.remove(0), pair.remove(0)]);
        }
        let slab = full[t as usize].as_ref().unwrap();
        for (j, &u) in at.iter().enumerate() {
            let own = traj.snapshot(u);
            let coupled = checks[j].sites().all(|q| own.is_some_and(|o| o.contains(&q)) == slab[j].contains(&q));
            if !coupled {
                coupling = false;
                break;
            }
        }
    }
    let probe_blocks = sc.probe_blocks(r);
    let window = window_of(&[&probe_blocks[0], &probe_blocks[1]]);
    let xi_s = full_slab_on_window(model, f, sc.s, &window, coupling_margin(model, sc.s))?;
    let probes = probe_blocks.iter().all(|b| b.sites().any(|q| xi_s.contains(&q)));
    Ok(GoodBlockOutcome { dichotomy, coupling, probes })
}

/// Frequency that `B = B(w, CL, v)` with `w = (L, ..., L)` is good:
///
/// 1. every `(x, t)` in `B(w, R, v)` has `tau < L/C` or `tau >= s`, where
///    `s = CL + floor(L/C)` and `tau` is the extinction time of `(x, R-1)`
///    on the configuration moved down by `t - R + 1`;
/// 2. each such site with `tau >= L/C` has coupled region containing
///    `B(3w, R, v) + u v` at `u = s` and `u = CL`;
/// 3. `xi^S_s` meets both `B(w/C, R, v) + s (v, 0) +- L e_{d-1}`.
pub fn good_block_probability(
    model: &NormalizedModel,
    p: f64,
    length: i64,
    c: i64,
    reps: u64,
    seed: u64,
    opts: &GoodBlockOptions,
) -> Result<GoodBlockReport> {
    check_reps(reps)?;
    check_p(p)?;
    if c < 2 {
        return Err(EstimatorError::InvalidParameter("C must be at least 2".into()));
    }
    let short = length / c;
    if short < 1 {
        return Err(EstimatorError::InvalidParameter(format!("floor(L / C) must be positive, got L = {length}")));
    }
    let v = opts.v.clone().unwrap_or_else(|| spread_centre(model));
    if v.len() != model.spatial_dim() {
        return Err(EstimatorError::InvalidParameter(format!("v needs {} coordinates", model.spatial_dim())));
    }
    let sc = Scale { l: length, cl: c * length, short, s: c * length + short, v: v.clone() };
    let outcomes = try_replicate(reps, |i| good_block_run(model, &replica_field(model, p, seed, i)?, &sc))?;
    let freq = |f: &dyn Fn(&GoodBlockOutcome) -> bool| {
        Estimate::proportion(outcomes.iter().filter(|o| f(o)).count() as u64, reps)
    };
    Ok(GoodBlockReport {
        p,
        length,
        c,
        v,
        reps,
        seed,
        estimate: freq(&|o| o.good()),
        event_frequencies: [freq(&|o| o.dichotomy), freq(&|o| o.coupling), freq(&|o| o.probes)],
        outcomes,
    })
}
