//! Slab occupancy stored as `R` dense bit layers over a spatial window.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::bits;
use super::domain::Region;
use super::DynamicsError;
use crate::field::SiteField;
use crate::model::NormalizedModel;

/// Spatial box `prod [lo_i, hi_i)`; axis 0 runs along bit lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

type Bounds = Vec<(i64, i64)>;

impl Window {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        debug_assert_eq!(lo.len(), hi.len());
        Self { lo, hi }
    }

    fn from_bounds(b: &Bounds) -> Self {
        Self {
            lo: b.iter().map(|r| r.0).collect(),
            hi: b.iter().map(|r| r.1).collect(),
        }
    }

    fn empty(k: usize) -> Self {
        Self { lo: vec![0; k], hi: vec![0; k] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn width(&self, axis: usize) -> usize {
        (self.hi[axis] - self.lo[axis]).max(0) as usize
    }

    pub fn volume(&self) -> u64 {
        (0..self.dim()).map(|i| self.width(i) as u64).product()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.iter().enumerate().all(|(i, &c)| self.lo[i] <= c && c < self.hi[i])
    }

    fn contains_window(&self, other: &Window) -> bool {
        other.volume() == 0
            || (0..self.dim()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    pub(crate) fn words(&self) -> usize {
        bits::words_for(self.width(0))
    }

    pub(crate) fn lines(&self) -> usize {
        if self.width(0) == 0 {
            return 0;
        }
        (1..self.dim()).map(|i| self.width(i)).product()
    }

    /// Line index of the coordinates `rest` on axes `1..`.
    pub(crate) fn line_of(&self, rest: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for i in (1..self.dim()).rev() {
            let c = rest[i - 1];
            if c < self.lo[i] || c >= self.hi[i] {
                return None;
            }
            idx = idx * self.width(i) + (c - self.lo[i]) as usize;
        }
        Some(idx)
    }

    /// Coordinates on axes `1..` of line `line`.
    pub(crate) fn rest_of(&self, mut line: usize, out: &mut [i64]) {
        for i in 1..self.dim() {
            let w = self.width(i);
            out[i - 1] = self.lo[i] + (line % w) as i64;
            line /= w;
        }
    }
}

fn union(a: Option<Bounds>, b: Option<Bounds>) -> Option<Bounds> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(a.iter().zip(&b).map(|(x, y)| (x.0.min(y.0), x.1.max(y.1))).collect()),
    }
}

fn intersect(a: Bounds, b: &Bounds) -> Option<Bounds> {
    let r: Bounds = a.iter().zip(b).map(|(x, y)| (x.0.max(y.0), x.1.min(y.1))).collect();
    r.iter().all(|(l, h)| l < h).then_some(r)
}

/// One offset of the neighbourhood split as `(y, u)`.
#[derive(Debug, Clone)]
pub(crate) struct Step {
    y: Vec<i64>,
    u: usize,
}

pub(crate) fn steps_of(model: &NormalizedModel) -> Vec<Step> {
    model
        .split_offsets()
        .iter()
        .map(|s| Step { y: s.spatial.clone(), u: s.time as usize })
        .collect()
}

/// Occupancy of the time slab at one step of the forward or dual chain.
///
/// Row `s` of the forward chain at step `t` holds absolute time `t + s`; row
/// `s` of the dual chain holds absolute time `s - t`. Every occupied site
/// lies inside the window.
#[derive(Debug, Clone)]
pub struct ProcessState {
    d: usize,
    t: i64,
    dual: bool,
    torus: Option<i64>,
    window: Window,
    rows: VecDeque<Vec<u64>>,
}

impl PartialEq for ProcessState {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d
            && self.t == other.t
            && self.dual == other.dual
            && self.torus == other.torus
            && self.rows.len() == other.rows.len()
            && self.sites() == other.sites()
    }
}

impl ProcessState {
    /// State at step 0 occupying exactly `sites`, given in slab coordinates
    /// `(x, s)` with `0 <= s < R`. Sites need not be open.
    pub fn new(model: &NormalizedModel, sites: &[Vec<i64>]) -> Result<Self, DynamicsError> {
        Self::build(model, sites, false, None)
    }

    /// Initial state of the dual chain.
    pub fn new_dual(model: &NormalizedModel, sites: &[Vec<i64>]) -> Result<Self, DynamicsError> {
        Self::build(model, sites, true, None)
    }

    /// Initial state on the torus of side `n`; spatial coordinates are
    /// reduced modulo `n`.
    pub fn on_torus(model: &NormalizedModel, n: i64, sites: &[Vec<i64>]) -> Result<Self, DynamicsError> {
        check_torus(model, n)?;
        Self::build(model, sites, false, Some(n))
    }

    pub(crate) fn build(
        model: &NormalizedModel,
        sites: &[Vec<i64>],
        dual: bool,
        torus: Option<i64>,
    ) -> Result<Self, DynamicsError> {
        let d = model.dim();
        let k = d - 1;
        let r = model.range();
        let mut reduced = Vec::with_capacity(sites.len());
        for s in sites {
            if s.len() != d {
                return Err(DynamicsError::DimensionMismatch { got: s.len(), expected: d });
            }
            if !(0..r).contains(&s[k]) {
                return Err(DynamicsError::SiteOutsideSlab(s.clone()));
            }
            let mut s = s.clone();
            if let Some(n) = torus {
                for c in &mut s[..k] {
                    *c = c.rem_euclid(n);
                }
            }
            reduced.push(s);
        }
        let window = match torus {
            Some(n) => Window::new(vec![0; k], vec![n; k]),
            None if reduced.is_empty() => Window::empty(k),
            None => {
                let lo = (0..k).map(|i| reduced.iter().map(|s| s[i]).min().unwrap()).collect();
                let hi = (0..k).map(|i| reduced.iter().map(|s| s[i] + 1).max().unwrap()).collect();
                Window::new(lo, hi)
            }
        };
        let size = window.lines() * window.words();
        let mut rows: VecDeque<Vec<u64>> = (0..r).map(|_| vec![0u64; size]).collect();
        for s in &reduced {
            let line = window.line_of(&s[1..k]).unwrap();
            let j = (s[0] - window.lo[0]) as usize;
            bits::set(&mut rows[s[k] as usize][line * window.words()..][..window.words()], j);
        }
        Ok(Self { d, t: 0, dual, torus, window, rows })
    }

    /// Number of steps taken.
    pub fn t(&self) -> i64 {
        self.t
    }

    pub fn range(&self) -> usize {
        self.rows.len()
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    pub fn torus(&self) -> Option<i64> {
        self.torus
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Absolute time of row `s`.
    pub fn row_time(&self, s: usize) -> i64 {
        if self.dual {
            s as i64 - self.t
        } else {
            self.t + s as i64
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&w| w == 0))
    }

    pub fn count(&self) -> u64 {
        self.rows.iter().map(|r| bits::count(r)).sum()
    }

    pub fn row_count(&self, s: usize) -> u64 {
        bits::count(&self.rows[s])
    }

    /// Occupancy of the slab site `(x, s)`.
    pub fn contains(&self, site: &[i64]) -> bool {
        let k = self.d - 1;
        let s = site[k];
        if s < 0 || s as usize >= self.rows.len() {
            return false;
        }
        let mut x = site[..k].to_vec();
        if let Some(n) = self.torus {
            x.iter_mut().for_each(|c| *c = c.rem_euclid(n));
        }
        if !self.window.contains(&x) {
            return false;
        }
        let line = self.window.line_of(&x[1..]).unwrap();
        let w = self.window.words();
        bits::get(&self.rows[s as usize][line * w..][..w], (x[0] - self.window.lo[0]) as usize)
    }

    /// Occupied sites of row `s` as spatial coordinates, sorted.
    pub fn row_sites(&self, s: usize) -> Vec<Vec<i64>> {
        let k = self.d - 1;
        let w = self.window.words();
        let mut out = Vec::new();
        let mut rest = vec![0; k.saturating_sub(1)];
        for line in 0..self.window.lines() {
            self.window.rest_of(line, &mut rest);
            bits::for_each_one(&self.rows[s][line * w..][..w], |j| {
                let mut x = Vec::with_capacity(k);
                x.push(self.window.lo[0] + j as i64);
                x.extend_from_slice(&rest);
                out.push(x);
            });
        }
        out.sort();
        out
    }

    /// Occupied sites in slab coordinates `(x, s)`, sorted.
    pub fn sites(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for s in 0..self.rows.len() {
            for mut x in self.row_sites(s) {
                x.push(s as i64);
                out.push(x);
            }
        }
        out.sort();
        out
    }

    /// Occupied sites in absolute coordinates `(x, time)`, sorted.
    pub fn absolute_sites(&self) -> Vec<Vec<i64>> {
        let k = self.d - 1;
        let mut out = self.sites();
        for s in &mut out {
            s[k] = self.row_time(s[k] as usize);
        }
        out.sort();
        out
    }

    /// Tight per-axis bounds `[lo, hi)` of the occupied sites.
    pub fn bounds(&self) -> Option<Vec<(i64, i64)>> {
        (0..self.rows.len()).fold(None, |acc, s| union(acc, self.row_bounds(s)))
    }

    /// Smallest and largest occupied axis-0 coordinate, over all rows.
    pub fn axis0_extremes(&self) -> Option<(i64, i64)> {
        self.bounds().map(|b| (b[0].0, b[0].1 - 1))
    }

    pub(crate) fn row_words(&self, s: usize) -> &[u64] {
        &self.rows[s]
    }

    fn row_bounds(&self, s: usize) -> Option<Bounds> {
        row_bounds(&self.rows[s], &self.window)
    }

    /// Moves every row into `target`, which must contain all occupied sites.
    fn relayout(&mut self, target: Window) {
        if target == self.window {
            return;
        }
        let old = std::mem::replace(&mut self.window, target);
        for row in self.rows.iter_mut() {
            *row = relayout_row(row, &old, &self.window);
        }
    }

    /// Chooses the window for the next step: keeps the current one unless it
    /// misses `need` or is far larger than it.
    fn plan_window(&self, need: Option<Bounds>) -> Window {
        let k = self.d - 1;
        let Some(need) = need else {
            return Window::empty(k);
        };
        let tight = Window::from_bounds(&need);
        let cur = &self.window;
        if cur.contains_window(&tight) && cur.volume() <= 4 * tight.volume() + 4096 {
            return cur.clone();
        }
        // slack so that steady growth re-lays rows rarely
        let lo = (0..k)
            .map(|i| {
                let pad = if i == 0 { 32 + tight.width(0) as i64 / 4 } else { 1 + tight.width(i) as i64 / 8 };
                need[i].0 - pad
            })
            .collect();
        let hi = (0..k)
            .map(|i| {
                let pad = if i == 0 { 32 + tight.width(0) as i64 / 4 } else { 1 + tight.width(i) as i64 / 8 };
                need[i].1 + pad
            })
            .collect();
        Window::new(lo, hi)
    }

    /// One step of the forward chain.
    pub(crate) fn step_forward<F, G>(&mut self, steps: &[Step], field: &F, region: &G)
    where
        F: SiteField + ?Sized,
        G: Region + ?Sized,
    {
        let r = self.rows.len();
        let k = self.d - 1;
        let new_time = self.t + r as i64;
        if let Some(n) = self.torus {
            let mut row = vec![0u64; self.window.lines() * self.window.words()];
            for st in steps {
                or_translated_torus(&mut row, &self.rows[r - st.u], &self.window, &st.y, 1, n);
            }
            self.rows.pop_front();
            self.finish_forward(row, field, region, new_time);
            return;
        }
        let bbs: Vec<Option<Bounds>> = (0..r).map(|s| self.row_bounds(s)).collect();
        let mut cand: Option<Bounds> = None;
        for st in steps {
            if let Some(b) = &bbs[r - st.u] {
                let moved = b.iter().zip(&st.y).map(|(&(l, h), &y)| (l + y, h + y)).collect();
                cand = union(cand, Some(moved));
            }
        }
        let limit = region.section_bounds(k, new_time);
        let cand = match (cand, limit) {
            (Some(c), Some(l)) => intersect(c, &l),
            _ => None,
        };
        let keep = bbs[1..].iter().cloned().fold(None, union);
        let target = self.plan_window(union(keep, cand.clone()));
        let mut row = vec![0u64; target.lines() * target.words()];
        if cand.is_some() {
            for st in steps {
                if bbs[r - st.u].is_some() {
                    or_translated(&mut row, &target, &self.rows[r - st.u], &self.window, &st.y, 1);
                }
            }
        }
        self.rows.pop_front();
        self.relayout(target);
        self.finish_forward(row, field, region, new_time);
    }

    fn finish_forward<F, G>(&mut self, mut row: Vec<u64>, field: &F, region: &G, time: i64)
    where
        F: SiteField + ?Sized,
        G: Region + ?Sized,
    {
        let k = self.d - 1;
        let w = self.window.words();
        let width = self.window.width(0);
        let lo0 = self.window.lo[0];
        let mut site = vec![0i64; self.d];
        site[k] = time;
        for line in 0..self.window.lines() {
            let words = &mut row[line * w..][..w];
            if words.iter().all(|&x| x == 0) {
                continue;
            }
            self.window.rest_of(line, &mut site[1..k]);
            match region.axis0_interval(&site[1..k], time) {
                None => words.fill(0),
                Some((a, b)) => {
                    let a = (a - lo0).clamp(0, width as i64) as usize;
                    let b = (b - lo0).clamp(0, width as i64) as usize;
                    bits::clip(words, a, b);
                }
            }
            bits::retain(words, |j| {
                site[0] = lo0 + j as i64;
                field.is_open(&site)
            });
        }
        self.rows.push_back(row);
        self.t += 1;
    }

    /// One step of the dual chain: a new bottom row at time `row_time(0) - 1`
    /// collects `c - (y, u)` over occupied sources `c` that are open and in
    /// the region.
    pub(crate) fn step_dual<F, G>(&mut self, steps: &[Step], field: &F, region: &G)
    where
        F: SiteField + ?Sized,
        G: Region + ?Sized,
    {
        let r = self.rows.len();
        let active: Vec<Option<Vec<u64>>> = (0..r)
            .map(|s| {
                steps
                    .iter()
                    .any(|st| st.u - 1 == s)
                    .then(|| self.active_row(s, field, region))
            })
            .collect();
        if let Some(n) = self.torus {
            let mut row = vec![0u64; self.window.lines() * self.window.words()];
            for st in steps {
                or_translated_torus(&mut row, active[st.u - 1].as_ref().unwrap(), &self.window, &st.y, -1, n);
            }
            self.rows.pop_back();
            self.rows.push_front(row);
            self.t += 1;
            return;
        }
        let abbs: Vec<Option<Bounds>> = active
            .iter()
            .map(|a| a.as_ref().and_then(|a| row_bounds(a, &self.window)))
            .collect();
        let mut cand: Option<Bounds> = None;
        for st in steps {
            if let Some(b) = &abbs[st.u - 1] {
                let moved = b.iter().zip(&st.y).map(|(&(l, h), &y)| (l - y, h - y)).collect();
                cand = union(cand, Some(moved));
            }
        }
        let keep = (0..r - 1).map(|s| self.row_bounds(s)).fold(None, union);
        let target = self.plan_window(union(keep, cand.clone()));
        let mut row = vec![0u64; target.lines() * target.words()];
        if cand.is_some() {
            for st in steps {
                if abbs[st.u - 1].is_some() {
                    let src = active[st.u - 1].as_ref().unwrap();
                    or_translated(&mut row, &target, src, &self.window, &st.y, -1);
                }
            }
        }
        self.rows.pop_back();
        self.relayout(target);
        self.rows.push_front(row);
        self.t += 1;
    }

    /// Occupied sites of row `s` that are open and inside the region.
    fn active_row<F, G>(&self, s: usize, field: &F, region: &G) -> Vec<u64>
    where
        F: SiteField + ?Sized,
        G: Region + ?Sized,
    {
        let k = self.d - 1;
        let time = self.row_time(s);
        let w = self.window.words();
        let width = self.window.width(0);
        let lo0 = self.window.lo[0];
        let mut row = self.rows[s].clone();
        let mut site = vec![0i64; self.d];
        site[k] = time;
        for line in 0..self.window.lines() {
            let words = &mut row[line * w..][..w];
            if words.iter().all(|&x| x == 0) {
                continue;
            }
            self.window.rest_of(line, &mut site[1..k]);
            match region.axis0_interval(&site[1..k], time) {
                None => words.fill(0),
                Some((a, b)) => {
                    let a = (a - lo0).clamp(0, width as i64) as usize;
                    let b = (b - lo0).clamp(0, width as i64) as usize;
                    bits::clip(words, a, b);
                }
            }
            bits::retain(words, |j| {
                site[0] = lo0 + j as i64;
                field.is_open(&site)
            });
        }
        row
    }
}

pub(crate) fn check_torus(model: &NormalizedModel, n: i64) -> Result<(), DynamicsError> {
    // n > 2 gamma R
    let min = (model.gamma() * 2 * model.range()).floor().to_integer() + 1;
    if n < min.max(1) {
        return Err(DynamicsError::TorusTooSmall { n, min });
    }
    Ok(())
}

fn row_bounds(row: &[u64], window: &Window) -> Option<Bounds> {
    let k = window.dim();
    let w = window.words();
    let mut acc: Option<Bounds> = None;
    let mut rest = vec![0; k.saturating_sub(1)];
    for line in 0..window.lines() {
        if let Some((a, b)) = bits::span(&row[line * w..][..w]) {
            window.rest_of(line, &mut rest);
            let mut bb = Vec::with_capacity(k);
            bb.push((window.lo[0] + a as i64, window.lo[0] + b as i64 + 1));
            bb.extend(rest.iter().map(|&c| (c, c + 1)));
            acc = union(acc, Some(bb));
        }
    }
    acc
}

fn relayout_row(row: &[u64], old: &Window, new: &Window) -> Vec<u64> {
    let k = old.dim();
    let (ow, nw) = (old.words(), new.words());
    let mut out = vec![0u64; new.lines() * nw];
    let shift = old.lo[0] - new.lo[0];
    let mut rest = vec![0; k.saturating_sub(1)];
    for line in 0..old.lines() {
        let src = &row[line * ow..][..ow];
        if src.iter().all(|&x| x == 0) {
            continue;
        }
        old.rest_of(line, &mut rest);
        if let Some(dl) = new.line_of(&rest) {
            let dst = &mut out[dl * nw..][..nw];
            bits::or_shifted(dst, src, shift);
            bits::clear_tail(dst, new.width(0));
        }
    }
    out
}

/// `dst |= src + sign * y`, with `src` laid out on `sw` and `dst` on `dw`.
pub(crate) fn or_translated(dst: &mut [u64], dw: &Window, src: &[u64], sw: &Window, y: &[i64], sign: i64) {
    let k = sw.dim();
    let (sn, dn) = (sw.words(), dw.words());
    let shift = sw.lo[0] + sign * y[0] - dw.lo[0];
    let mut rest = vec![0; k.saturating_sub(1)];
    for line in 0..sw.lines() {
        let s = &src[line * sn..][..sn];
        if s.iter().all(|&x| x == 0) {
            continue;
        }
        sw.rest_of(line, &mut rest);
        for (i, c) in rest.iter_mut().enumerate() {
            *c += sign * y[i + 1];
        }
        if let Some(dl) = dw.line_of(&rest) {
            let d = &mut dst[dl * dn..][..dn];
            bits::or_shifted(d, s, shift);
            bits::clear_tail(d, dw.width(0));
        }
    }
}

fn or_translated_torus(dst: &mut [u64], src: &[u64], w: &Window, y: &[i64], sign: i64, n: i64) {
    let k = w.dim();
    let words = w.words();
    let mut rest = vec![0; k.saturating_sub(1)];
    for line in 0..w.lines() {
        let s = &src[line * words..][..words];
        if s.iter().all(|&x| x == 0) {
            continue;
        }
        w.rest_of(line, &mut rest);
        for (i, c) in rest.iter_mut().enumerate() {
            *c = (*c + sign * y[i + 1]).rem_euclid(n);
        }
        let dl = w.line_of(&rest).unwrap();
        bits::or_rotated(&mut dst[dl * words..][..words], s, sign * y[0], n as usize);
    }
}
