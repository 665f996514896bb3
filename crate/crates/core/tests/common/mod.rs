//! Brute-force oracles shared by the integration tests. They enumerate
//! paths offset by offset and never touch the bit-row engine.

#![allow(dead_code)]

use std::collections::BTreeSet;

use gosp::dynamics::DomainSpec;
use gosp::field::{FieldSpec, SiteField};
use gosp::model::{validate, NeighborhoodSpec, NormalizedModel};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type Site = Vec<i64>;

pub fn planar(x: &[(i64, i64)]) -> NormalizedModel {
    validate(&NeighborhoodSpec::planar(x)).unwrap()
}

pub fn asym() -> NormalizedModel {
    planar(&[(-1, 1), (0, 1), (2, 1)])
}

pub fn op() -> NormalizedModel {
    planar(&[(0, 1), (1, 1)])
}

/// Offsets drawn on by the random instances; the first is the asymmetric model.
pub fn pool() -> Vec<NeighborhoodSpec> {
    vec![
        NeighborhoodSpec::planar(&[(-1, 1), (0, 1), (2, 1)]),
        NeighborhoodSpec::planar(&[(0, 1), (1, 1)]),
        NeighborhoodSpec::planar(&[(-2, 1), (1, 1), (0, 2)]),
        NeighborhoodSpec::planar(&[(0, 1), (1, 1), (-1, 2)]),
        NeighborhoodSpec::planar(&[(-1, 1), (0, 1), (1, 1), (3, 2)]),
        NeighborhoodSpec::new(3, vec![vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 1]]),
        NeighborhoodSpec::new(3, vec![vec![-1, 0, 1], vec![1, 1, 1], vec![0, -1, 1], vec![0, 0, 2]]),
    ]
}

/// Restriction regions, with membership written out independently.
#[derive(Debug, Clone)]
pub enum Dom {
    Full,
    Unrestricted,
    /// Spatial box `[lo, hi)` on every axis.
    Tube(Vec<i64>, Vec<i64>),
    /// `sign * x[axis] >= threshold`.
    Half(usize, i64, i64),
}

impl Dom {
    pub fn spec(&self) -> DomainSpec {
        match self {
            Dom::Full => DomainSpec::Full,
            Dom::Unrestricted => DomainSpec::Unrestricted,
            Dom::Tube(lo, hi) => DomainSpec::Tube { lo: lo.clone(), hi: hi.clone() },
            Dom::Half(axis, sign, threshold) => DomainSpec::HalfSpace { axis: *axis, sign: *sign, threshold: *threshold },
        }
    }

    /// Membership for the forward chain; `mirrored` flips `Full` to
    /// times below `r`, as the dual chain reads it.
    pub fn contains(&self, site: &[i64], r: i64, mirrored: bool) -> bool {
        let t = *site.last().unwrap();
        match self {
            Dom::Full if mirrored => t < r,
            Dom::Full => t >= r,
            Dom::Unrestricted => true,
            Dom::Tube(lo, hi) => site[..site.len() - 1].iter().zip(lo.iter().zip(hi)).all(|(&c, (&l, &h))| l <= c && c < h),
            Dom::Half(axis, sign, threshold) => sign * site[*axis] >= *threshold,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub spec: NeighborhoodSpec,
    pub model: NormalizedModel,
    pub field: FieldSpec,
    pub dom: Dom,
    /// Start sites in slab coordinates.
    pub start: Vec<Site>,
    pub horizon: i64,
}

impl Instance {
    pub fn r(&self) -> i64 {
        self.model.range()
    }

    pub fn offsets(&self) -> &[Site] {
        &self.spec.offsets
    }
}

/// A random instance: at most 9 spatial sites across, `T <= 6`.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    let pool = pool();
    // the asymmetric model is drawn a third of the time
    let spec = if rng.gen_bool(1.0 / 3.0) { pool[0].clone() } else { pool[rng.gen_range(1..pool.len())].clone() };
    let model = validate(&spec).unwrap();
    let d = spec.d;
    let k = d - 1;
    let r = model.range();
    let side: i64 = if k == 1 { 9 } else { 3 };
    let lo: Vec<i64> = (0..k).map(|_| rng.gen_range(-4..=0)).collect();
    let hi: Vec<i64> = lo.iter().map(|l| l + side).collect();
    let dom = match rng.gen_range(0..4) {
        0 => Dom::Full,
        1 => Dom::Unrestricted,
        2 => Dom::Tube(lo.clone(), hi.clone()),
        _ => Dom::Half(rng.gen_range(0..d), if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(-2..=2)),
    };
    let n = rng.gen_range(1..=3);
    let start: BTreeSet<Site> = (0..n)
        .map(|_| {
            let mut s: Site = lo.iter().zip(&hi).map(|(&l, &h)| rng.gen_range(l..h)).collect();
            s.push(rng.gen_range(0..r));
            s
        })
        .collect();
    let p = [0.3, 0.5, 0.7, 0.9, 1.0][rng.gen_range(0..5)];
    let field = FieldSpec::new(d, rng.gen(), p).unwrap();
    Instance { spec, model, field, dom, start: start.into_iter().collect(), horizon: rng.gen_range(0..=6) }
}

fn add(a: &[i64], b: &[i64], sign: i64) -> Site {
    a.iter().zip(b).map(|(x, y)| x + sign * y).collect()
}

/// Every site at the end of an open path from a start site whose time is
/// below `t_end`, in absolute coordinates. Starts count as reached. The
/// chain never writes into its initial slab, so later path sites have
/// time at least `R` whatever the domain.
pub fn forward_reached(inst: &Instance, t_end: i64) -> BTreeSet<Site> {
    fn walk(inst: &Instance, cur: &Site, t_end: i64, out: &mut BTreeSet<Site>) {
        out.insert(cur.clone());
        for x in inst.offsets() {
            let next = add(cur, x, 1);
            let time = *next.last().unwrap();
            if time >= inst.r() && time < t_end && inst.field.is_open(&next) && inst.dom.contains(&next, inst.r(), false) {
                walk(inst, &next, t_end, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    for a in &inst.start {
        walk(inst, a, t_end, &mut out);
    }
    out
}

/// Forward state at step `t` in slab coordinates `(x, time - t)`.
pub fn forward_state(inst: &Instance, reached: &BTreeSet<Site>, t: i64) -> Vec<Site> {
    let r = inst.r();
    let mut out: Vec<Site> = reached
        .iter()
        .filter(|s| (t..t + r).contains(s.last().unwrap()))
        .map(|s| {
            let mut s = s.clone();
            *s.last_mut().unwrap() -= t;
            s
        })
        .collect();
    out.sort();
    out
}

/// Sites reached by dual paths from the start sites down to time `t_low`:
/// a site extends only when it is open and in the mirrored domain. Later
/// path sites lie below the initial slab.
pub fn dual_reached(inst: &Instance, t_low: i64) -> BTreeSet<Site> {
    fn walk(inst: &Instance, cur: &Site, t_low: i64, out: &mut BTreeSet<Site>) {
        out.insert(cur.clone());
        if !(inst.field.is_open(cur) && inst.dom.contains(cur, inst.r(), true)) {
            return;
        }
        for x in inst.offsets() {
            let next = add(cur, x, -1);
            if (t_low..0).contains(next.last().unwrap()) {
                walk(inst, &next, t_low, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    for b in &inst.start {
        walk(inst, b, t_low, &mut out);
    }
    out
}

/// Dual state at step `t` in slab coordinates `(x, time + t)`.
pub fn dual_state(inst: &Instance, reached: &BTreeSet<Site>, t: i64) -> Vec<Site> {
    let r = inst.r();
    let mut out: Vec<Site> = reached
        .iter()
        .filter(|s| (-t..-t + r).contains(s.last().unwrap()))
        .map(|s| {
            let mut s = s.clone();
            *s.last_mut().unwrap() += t;
            s
        })
        .collect();
    out.sort();
    out
}

/// `a -> b` by enumerating every open path from `a` that stays in the domain.
pub fn reaches_oracle(inst: &Instance, a: &[i64], b: &[i64]) -> bool {
    fn walk(inst: &Instance, cur: &Site, b: &[i64]) -> bool {
        if cur.as_slice() == b {
            return true;
        }
        inst.offsets().iter().any(|x| {
            let next = add(cur, x, 1);
            next.last() <= b.last() && inst.field.is_open(&next) && inst.dom.contains(&next, inst.r(), false) && walk(inst, &next, b)
        })
    }
    walk(inst, &a.to_vec(), b)
}

/// The `t`-fold sumset of the spatial parts of `x` (all with time 1).
pub fn sumset(x: &[(i64, i64)], t: usize) -> Vec<i64> {
    let parts: Vec<i64> = x.iter().map(|&(y, _)| y).collect();
    let mut cur: BTreeSet<i64> = [0].into();
    for _ in 0..t {
        cur = cur.iter().flat_map(|a| parts.iter().map(move |b| a + b)).collect();
    }
    cur.into_iter().collect()
}

use gosp::dynamics::{dual_evolve, evolve, dual_reaches, reaches, Probes, Retain, Trajectory};

/// States at steps `0..=T`; steps after extinction are empty.
pub fn states(tr: &Trajectory, horizon: i64) -> Vec<Vec<Site>> {
    (0..=horizon)
        .map(|t| match tr.snapshot(t) {
            Some(s) => s.sites(),
            None => {
                assert!(tr.extinction.time().is_some_and(|tau| tau <= t), "missing snapshot at {t}");
                Vec::new()
            }
        })
        .collect()
}

pub fn every_step() -> Probes {
    Probes { snapshots: Retain::Every, ..Probes::none() }
}

/// Compares the engine with the oracles on one instance; returns a
/// description of the first disagreement.
pub fn check_instance(inst: &Instance) -> Result<(), String> {
    let (m, f, d, h) = (&inst.model, &inst.field, inst.dom.spec(), inst.horizon);
    let r = inst.r();

    let tr = evolve(m, &inst.start, f, &d, h, &every_step()).map_err(|e| e.to_string())?;
    let reached = forward_reached(inst, h + r);
    for (t, got) in states(&tr, h).iter().enumerate() {
        let want = forward_state(inst, &reached, t as i64);
        if *got != want {
            return Err(format!("evolve at t={t}: {got:?} != {want:?}"));
        }
    }

    // the dual chain starts only from open sites to be interesting, but any start is legal
    let tr = dual_evolve(m, &inst.start, f, &d, h, &every_step()).map_err(|e| e.to_string())?;
    let reached = dual_reached(inst, -h);
    for (t, got) in states(&tr, h).iter().enumerate() {
        let want = dual_state(inst, &reached, t as i64);
        if *got != want {
            return Err(format!("dual_evolve at t={t}: {got:?} != {want:?}"));
        }
    }

    let k = inst.spec.d - 1;
    let a = &inst.start[0];
    for b in box_sites(a, k, h, r) {
        let want = reaches_oracle(inst, a, &b);
        if reaches(m, a, &b, f, &d) != want {
            return Err(format!("reaches {a:?} -> {b:?}: want {want}"));
        }
    }
    Ok(())
}

/// Sites within the dependency box of `a` up to `h` steps later.
pub fn box_sites(a: &[i64], k: usize, h: i64, r: i64) -> Vec<Site> {
    let span = 2 * (h + r);
    let mut out = vec![Vec::new()];
    for i in 0..k {
        out = out.into_iter().flat_map(|s: Site| (a[i] - span..=a[i] + span).map(move |c| [s.clone(), vec![c]].concat())).collect();
    }
    out.into_iter().flat_map(|s| (a[k]..=a[k] + h).map(move |t| [s.clone(), vec![t]].concat())).collect()
}

/// `reaches(a, b)` against `dual_reaches(b, a)` over the dependency box.
pub fn check_duality(inst: &Instance) -> Result<(), String> {
    let (m, f, d) = (&inst.model, &inst.field, inst.dom.spec());
    let k = inst.spec.d - 1;
    for a in &inst.start {
        for b in box_sites(a, k, inst.horizon, inst.r()) {
            if reaches(m, a, &b, f, &d) != dual_reaches(m, &b, a, f, &d) {
                return Err(format!("{a:?} -> {b:?}"));
            }
        }
    }
    Ok(())
}
