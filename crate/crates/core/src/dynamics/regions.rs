//! Hit region `H_t` and coupled region `K_t` of the origin-started run.

use super::domain::{DomainSpec, TimeBoxes};
use super::state::{ProcessState, Window};
use super::{evolve, run, DynamicsError, HittingData, Probes};
use crate::field::SiteField;
use crate::geometry::box_points;
use crate::model::NormalizedModel;

/// `H_t`, `K_t` restricted to a window, and the two states they compare.
#[derive(Debug, Clone)]
pub struct Regions {
    pub t: i64,
    pub window: Window,
    pub margin: i64,
    pub hitting: HittingData,
    /// `xi^o_t`.
    pub origin: ProcessState,
    /// `xi^S_t`, exact inside the window.
    pub full: ProcessState,
    range: i64,
}

impl Regions {
    /// `H_t` (all of it, not only the window part).
    pub fn hit(&self) -> Vec<Vec<i64>> {
        self.hitting.hit_region(self.t, self.range)
    }

    /// Slab sites of the window, in sorted order.
    pub fn window_sites(&self) -> Vec<Vec<i64>> {
        let mut ranges: Vec<(i64, i64)> = self.window.lo.iter().copied().zip(self.window.hi.iter().copied()).collect();
        ranges.push((0, self.range));
        let mut v = box_points(&ranges);
        v.sort();
        v
    }

    /// `K_t` intersected with the window.
    pub fn coupled(&self) -> Vec<Vec<i64>> {
        self.window_sites()
            .into_iter()
            .filter(|s| self.origin.contains(s) == self.full.contains(s))
            .collect()
    }

    pub fn in_hit(&self, site: &[i64]) -> bool {
        let k = site.len() - 1;
        self.hitting.get(&site[..k]).is_some_and(|tx| tx <= self.t - site[k])
    }

    pub fn in_coupled(&self, site: &[i64]) -> bool {
        self.origin.contains(site) == self.full.contains(site)
    }

    /// `H_t ∩ K_t` intersected with the window.
    pub fn hit_and_coupled(&self) -> Vec<Vec<i64>> {
        self.window_sites()
            .into_iter()
            .filter(|s| self.in_hit(s) && self.in_coupled(s))
            .collect()
    }
}

/// Per-side dilation `(left, right)` along `axis` after `dt` steps: a site
/// at `x` can only be influenced by initial sites in `[x - left, x + right]`.
fn dilation(model: &NormalizedModel, axis: usize, dt: i64) -> (i64, i64) {
    let (lo, hi) = model.axis_speeds(axis);
    let zero = lo * 0;
    let left = (hi.max(zero) * dt).ceil().to_integer();
    let right = ((-lo).max(zero) * dt).ceil().to_integer();
    (left, right)
}

/// Smallest uniform margin around a window making the truncated full-slab
/// run exact on the window up to step `t`.
pub fn coupling_margin(model: &NormalizedModel, t: i64) -> i64 {
    let dt = t + model.range() - 1;
    (0..model.spatial_dim())
        .map(|i| {
            let (l, r) = dilation(model, i, dt);
            l.max(r)
        })
        .max()
        .unwrap_or(0)
}

/// Computes `H_t` and `K_t ∩ (window x [0, R))` on one configuration.
///
/// The full-slab run starts from the window dilated by `margin` (default:
/// [`coupling_margin`]) and is further cut to the backward dependency cone
/// of the window, which leaves its restriction to the window exact.
pub fn hit_and_coupled_regions<F: SiteField + ?Sized>(
    model: &NormalizedModel,
    field: &F,
    t: i64,
    window: &Window,
    margin: Option<i64>,
) -> Result<Regions, DynamicsError> {
    let k = model.spatial_dim();
    let r = model.range();
    let required = coupling_margin(model, t);
    let margin = margin.unwrap_or(required);
    if margin < required {
        return Err(DynamicsError::WindowTooSmall { required, given: margin });
    }
    let mut origin = vec![0; k + 1];
    origin[k] = 0;
    let probes = Probes { hitting: true, ..Probes::none() };
    let run_o = evolve(model, &[origin], field, &DomainSpec::Full, t, &probes)?;
    let full = full_slab_on_window(model, field, t, window, margin)?;
    let mut origin_state = run_o.final_state;
    while origin_state.t() < t {
        super::step(&mut origin_state, model, field, &DomainSpec::Full);
    }
    let mut hitting = run_o.hitting.unwrap_or_default();
    hitting.horizon = t;
    Ok(Regions { t, window: window.clone(), margin, hitting, origin: origin_state, full, range: r })
}

/// `xi^S_t`, exact on `window x [0, R)`: the run starts from the window
/// dilated by `margin` and is cut to the backward dependency cone of the
/// window. The margin must be at least [`coupling_margin`].
pub(crate) fn full_slab_on_window<F: SiteField + ?Sized>(
    model: &NormalizedModel,
    field: &F,
    t: i64,
    window: &Window,
    margin: i64,
) -> Result<ProcessState, DynamicsError> {
    let k = model.spatial_dim();
    let r = model.range();
    let mut ranges: Vec<(i64, i64)> = (0..k).map(|i| (window.lo[i] - margin, window.hi[i] + margin)).collect();
    ranges.push((0, r));
    let start = box_points(&ranges);
    let last = t + r - 1;
    let dil: Vec<Vec<(i64, i64)>> = (0..=last.max(0))
        .map(|tau| (0..k).map(|i| dilation(model, i, last - tau)).collect())
        .collect();
    let cone = TimeBoxes(|tau: i64| {
        if tau < 0 || tau > last {
            return None;
        }
        Some(
            (0..k)
                .map(|i| {
                    let (l, rr) = dil[tau as usize][i];
                    (window.lo[i] - l, window.hi[i] + rr)
                })
                .collect(),
        )
    });
    let full_state = ProcessState::new(model, &start)?;
    let run_s = run(model, full_state, field, &cone, t, &Probes::none());
    let mut full = run_s.final_state;
    // a dead truncated run still sits at its extinction step
    while full.t() < t {
        super::step(&mut full, model, field, &DomainSpec::Full);
    }
    Ok(full)
}
