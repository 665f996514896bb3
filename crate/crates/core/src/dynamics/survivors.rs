//! Dual survival of every site of a box at once, by a backward sweep in
//! time over bit rows.

use std::collections::VecDeque;

use super::bits;
use super::state::{or_translated, Window};
use super::DynamicsError;
use crate::field::SiteField;
use crate::model::NormalizedModel;

/// Slab sites of a box whose dual chain is still alive after `depth` steps.
#[derive(Debug, Clone)]
pub struct SurvivorMap {
    pub depth: i64,
    window: Window,
    range: usize,
    /// `rows[s]` covers slab time `s`.
    rows: Vec<Vec<u64>>,
}

impl SurvivorMap {
    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn count(&self) -> u64 {
        self.rows.iter().map(|r| bits::count(r)).sum()
    }

    /// Number of slab sites in the box.
    pub fn volume(&self) -> u64 {
        self.window.volume() * self.range as u64
    }

    pub fn fraction(&self) -> f64 {
        self.count() as f64 / self.volume() as f64
    }

    pub fn contains(&self, site: &[i64]) -> bool {
        let (&s, x) = site.split_last().unwrap();
        if s < 0 || s >= self.range as i64 || !self.window.contains(x) {
            return false;
        }
        let line = self.window.line_of(&x[1..]).unwrap();
        let n = self.window.words();
        bits::get(&self.rows[s as usize][line * n..][..n], (x[0] - self.window.lo[0]) as usize)
    }
}

/// For each slab site `z = (x, s)` with `x` in `[lo, hi)`, whether the dual
/// chain started from `z`, translated to the origin, is non-empty after
/// `depth` steps. Every site thus has the law of the origin.
pub fn dual_survivors<F: SiteField + ?Sized>(
    model: &NormalizedModel,
    field: &F,
    lo: &[i64],
    hi: &[i64],
    depth: i64,
) -> Result<SurvivorMap, DynamicsError> {
    let r = model.range();
    let mut rows = Vec::with_capacity(r as usize);
    let mut window = None;
    for s in 0..r {
        let map = sweep(model, field, lo, hi, depth - s)?;
        rows.push(map.rows[s as usize].clone());
        window = Some(map.window);
    }
    Ok(SurvivorMap { depth, window: window.unwrap(), range: r as usize, rows })
}

/// One backward sweep: a site at time `tau` survives iff
/// `tau <= R - 1 - depth`, or it is open and `z - x` survives for some `x`.
fn sweep<F: SiteField + ?Sized>(
    model: &NormalizedModel,
    field: &F,
    lo: &[i64],
    hi: &[i64],
    depth: i64,
) -> Result<SurvivorMap, DynamicsError> {
    let k = model.spatial_dim();
    if lo.len() != k || hi.len() != k {
        return Err(DynamicsError::DimensionMismatch { got: lo.len().max(hi.len()) + 1, expected: k + 1 });
    }
    let r = model.range();
    let depth = depth.max(-r);
    let target = Window::new(lo.to_vec(), hi.to_vec());
    let reach: i64 = model
        .split_offsets()
        .iter()
        .flat_map(|o| o.spatial.iter().map(|c| c.abs()))
        .max()
        .unwrap_or(0);
    let margin = reach * depth.max(0);
    let wide = Window::new(
        lo.iter().map(|c| c - margin).collect(),
        hi.iter().map(|c| c + margin).collect(),
    );
    let n = wide.words();
    let len = n * wide.lines();
    let width = wide.width(0);
    let full: Vec<u64> = {
        let mut row = vec![0u64; len];
        for line in 0..wide.lines() {
            for j in 0..width {
                bits::set(&mut row[line * n..][..n], j);
            }
        }
        row
    };
    // history[0] is the most recent time.
    let mut history: VecDeque<Vec<u64>> = (0..r).map(|_| full.clone()).collect();
    let first = (r - depth).min(r);
    let mut site = vec![0i64; k + 1];
    let mut kept: Vec<Vec<u64>> = Vec::new();
    for tau in first..r {
        let mut row = vec![0u64; len];
        for o in model.split_offsets() {
            let src = &history[(o.time - 1) as usize];
            or_translated(&mut row, &wide, src, &wide, &o.spatial, 1);
        }
        site[k] = tau;
        for line in 0..wide.lines() {
            let words = &mut row[line * n..][..n];
            if words.iter().all(|&x| x == 0) {
                continue;
            }
            wide.rest_of(line, &mut site[1..k]);
            bits::retain(words, |j| {
                site[0] = wide.lo[0] + j as i64;
                field.is_open(&site)
            });
        }
        history.push_front(row);
        history.pop_back();
        if tau >= 0 {
            kept.push(history[0].clone());
        }
    }
    // Times below `first` are all alive.
    let mut rows = Vec::with_capacity(r as usize);
    for s in 0..r {
        let src = if s < first { &full } else { &kept[(s - first.max(0)) as usize] };
        rows.push(restrict(src, &wide, &target));
    }
    Ok(SurvivorMap { depth, window: target, range: r as usize, rows })
}

fn restrict(src: &[u64], from: &Window, to: &Window) -> Vec<u64> {
    let mut out = vec![0u64; to.words() * to.lines()];
    let zero = vec![0i64; to.dim()];
    or_translated(&mut out, to, src, from, &zero, 1);
    out
}
