//! Regions used by the block constructions: tilted blocks `B(w, h, v)`,
//! boxes `B_n`, cones over rational polytopes.
//!
//! Every membership test is exact rational arithmetic.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::model::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("block half-widths must be positive, got {0:?}")]
    NonPositiveWidth(Vec<i64>),
    #[error("block height must be positive, got {0}")]
    NonPositiveHeight(i64),
    #[error("width has {w} axes but tilt has {v}")]
    AxisMismatch { w: usize, v: usize },
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
    #[error("polytope is empty or has inconsistent dimensions")]
    BadPolytope,
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational, GeometryError> {
    let bad = || GeometryError::BadRational(s.to_string());
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let i: i64 = if int == "-" || int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10i64.pow(frac.len() as u32);
        let f: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = i.abs() * den + f;
        return Ok(Rational::new(if neg { -num } else { num }, den));
    }
    s.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

/// Rational serialised as the string `"p/q"` (or `"p"`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalLit(pub Rational);

impl fmt::Display for RationalLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for RationalLit {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s).map(RationalLit)
    }
}

impl Serialize for RationalLit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalLit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            S(String),
            I(i64),
        }
        match Raw::deserialize(d)? {
            Raw::S(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::I(i) => Ok(RationalLit(Rational::from_integer(i))),
        }
    }
}

fn ceil_q(q: Rational) -> i64 {
    q.ceil().to_integer()
}

fn floor_q(q: Rational) -> i64 {
    q.floor().to_integer()
}

/// `B(w, h, v) = {(x, t): 0 <= t < h, x - t v in prod [-w_i, w_i)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BlockLiteral", into = "BlockLiteral")]
pub struct BlockGeometry {
    w: Vec<i64>,
    h: i64,
    v: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockLiteral {
    w: Vec<i64>,
    h: i64,
    v: Vec<RationalLit>,
}

impl TryFrom<BlockLiteral> for BlockGeometry {
    type Error = GeometryError;
    fn try_from(l: BlockLiteral) -> Result<Self, Self::Error> {
        BlockGeometry::new(l.w, l.h, l.v.into_iter().map(|r| r.0).collect())
    }
}

impl From<BlockGeometry> for BlockLiteral {
    fn from(b: BlockGeometry) -> Self {
        BlockLiteral {
            w: b.w,
            h: b.h,
            v: b.v.into_iter().map(RationalLit).collect(),
        }
    }
}

impl BlockGeometry {
    pub fn new(w: Vec<i64>, h: i64, v: Vec<Rational>) -> Result<Self, GeometryError> {
        if w.is_empty() || w.iter().any(|&x| x <= 0) {
            return Err(GeometryError::NonPositiveWidth(w));
        }
        if h <= 0 {
            return Err(GeometryError::NonPositiveHeight(h));
        }
        if w.len() != v.len() {
            return Err(GeometryError::AxisMismatch { w: w.len(), v: v.len() });
        }
        Ok(Self { w, h, v })
    }

    /// `B(w, h, 0)` with the same half-width on every axis.
    pub fn upright(spatial_dim: usize, w: i64, h: i64) -> Result<Self, GeometryError> {
        Self::new(vec![w; spatial_dim], h, vec![Rational::from_integer(0); spatial_dim])
    }

    pub fn w(&self) -> &[i64] {
        &self.w
    }

    pub fn h(&self) -> i64 {
        self.h
    }

    pub fn v(&self) -> &[Rational] {
        &self.v
    }

    pub fn spatial_dim(&self) -> usize {
        self.w.len()
    }

    /// Same tilt, widths and height scaled: `B(a w, b h, v)`.
    pub fn scaled(&self, width_factor: i64, height_factor: i64) -> Self {
        Self {
            w: self.w.iter().map(|w| w * width_factor).collect(),
            h: self.h * height_factor,
            v: self.v.clone(),
        }
    }

    pub fn contains(&self, site: &[i64]) -> bool {
        PlacedBlock::at_origin(self.clone()).contains(site)
    }

    /// Number of integer sites in the block.
    pub fn volume(&self) -> u64 {
        self.sites().count() as u64
    }

    /// All integer sites of the block, time-major.
    pub fn sites(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        PlacedBlock::at_origin(self.clone()).sites_owned()
    }
}

pub fn block_contains(g: &BlockGeometry, site: &[i64]) -> bool {
    g.contains(site)
}

/// `B_n = [-n, n)^{d-1} x [0, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxGeometry {
    pub n: i64,
}

impl BoxGeometry {
    pub fn new(n: i64) -> Self {
        Self { n }
    }

    pub fn as_block(&self, spatial_dim: usize, range: i64) -> BlockGeometry {
        BlockGeometry::upright(spatial_dim, self.n, range).expect("n >= 1, R >= 1")
    }

    pub fn contains(&self, site: &[i64], range: i64) -> bool {
        let (t, x) = site.split_last().expect("non-empty site");
        (0..range).contains(t) && x.iter().all(|c| (-self.n..self.n).contains(c))
    }
}

/// A block translated so that its bottom-centre sits at `(origin_x, origin_t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedBlock {
    pub block: BlockGeometry,
    pub origin_x: Vec<Rational>,
    pub origin_t: i64,
}

impl PlacedBlock {
    pub fn at_origin(block: BlockGeometry) -> Self {
        let k = block.spatial_dim();
        Self {
            block,
            origin_x: vec![Rational::from_integer(0); k],
            origin_t: 0,
        }
    }

    pub fn new(block: BlockGeometry, origin_x: Vec<Rational>, origin_t: i64) -> Self {
        Self { block, origin_x, origin_t }
    }

    /// Translates by an integer site.
    pub fn translated(&self, by: &[i64]) -> Self {
        let (t, x) = by.split_last().expect("non-empty shift");
        Self {
            block: self.block.clone(),
            origin_x: self
                .origin_x
                .iter()
                .zip(x)
                .map(|(o, &c)| o + Rational::from_integer(c))
                .collect(),
            origin_t: self.origin_t + t,
        }
    }

    fn centre(&self, axis: usize, t: i64) -> Rational {
        self.origin_x[axis] + self.block.v[axis] * (t - self.origin_t)
    }

    pub fn contains(&self, site: &[i64]) -> bool {
        let (&t, x) = site.split_last().expect("non-empty site");
        if !(0..self.block.h).contains(&(t - self.origin_t)) || x.len() != self.block.w.len() {
            return false;
        }
        x.iter().enumerate().all(|(i, &xi)| {
            let rel = Rational::from_integer(xi) - self.centre(i, t);
            let w = Rational::from_integer(self.block.w[i]);
            -w <= rel && rel < w
        })
    }

    /// Integer range `[lo, hi)` of axis `axis` inside the block at time `t`.
    pub fn axis_range(&self, axis: usize, t: i64) -> Option<(i64, i64)> {
        if !(0..self.block.h).contains(&(t - self.origin_t)) {
            return None;
        }
        let c = self.centre(axis, t);
        let w = Rational::from_integer(self.block.w[axis]);
        let lo = ceil_q(c - w);
        let hi = ceil_q(c + w);
        (lo < hi).then_some((lo, hi))
    }

    /// Times `[lo, hi)` covered by the block.
    pub fn time_range(&self) -> (i64, i64) {
        (self.origin_t, self.origin_t + self.block.h)
    }

    /// Spatial bounding box `[lo_i, hi_i)` over all times of the block.
    pub fn bounding_box(&self) -> Vec<(i64, i64)> {
        (0..self.block.spatial_dim())
            .map(|i| {
                let a = self.axis_range(i, self.origin_t).unwrap_or((0, 0));
                let b = self
                    .axis_range(i, self.origin_t + self.block.h - 1)
                    .unwrap_or((0, 0));
                (a.0.min(b.0), a.1.max(b.1))
            })
            .collect()
    }

    fn sites_owned(self) -> impl Iterator<Item = Vec<i64>> {
        let (t0, t1) = self.time_range();
        let k = self.block.spatial_dim();
        (t0..t1).flat_map(move |t| {
            let ranges: Vec<(i64, i64)> = (0..k).map(|i| self.axis_range(i, t).unwrap_or((0, 0))).collect();
            box_points(&ranges).into_iter().map(move |mut x| {
                x.push(t);
                x
            })
        })
    }

    pub fn sites(&self) -> impl Iterator<Item = Vec<i64>> {
        self.clone().sites_owned()
    }
}

/// All integer points of `prod [lo_i, hi_i)`, first axis fastest.
pub fn box_points(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in ranges.iter().rev() {
        let mut next = Vec::with_capacity(out.len() * (hi - lo).max(0) as usize);
        for prefix in &out {
            for c in lo..hi {
                let mut p = vec![c];
                p.extend_from_slice(prefix);
                next.push(p);
            }
        }
        out = next;
    }
    // reorder so the first axis varies fastest
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

/// The regions of the block-renormalisation event: two target blocks
/// `B(w,h,v) + 7h(v,1) +- 2 w_{d-1} e_{d-1}` and the envelope `B(4w, 8h, v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BgRegions {
    pub source: PlacedBlock,
    pub targets: [PlacedBlock; 2],
    pub envelope: PlacedBlock,
}

pub fn bg_target_blocks(g: &BlockGeometry) -> BgRegions {
    let k = g.spatial_dim();
    let lift = 7 * g.h;
    let side = g.w[k - 1] * 2;
    let target = |sign: i64| {
        let origin_x: Vec<Rational> = (0..k)
            .map(|i| {
                let mut o = g.v[i] * lift;
                if i == k - 1 {
                    o += Rational::from_integer(sign * side);
                }
                o
            })
            .collect();
        PlacedBlock::new(g.clone(), origin_x, lift)
    };
    BgRegions {
        source: PlacedBlock::at_origin(g.clone()),
        targets: [target(-1), target(1)],
        envelope: PlacedBlock::at_origin(g.scaled(4, 8)),
    }
}

/// A rational half-space `a . z <= b` in `R^{d-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub a: Vec<RationalLit>,
    pub b: RationalLit,
}

/// Convex polytope given by rational inequalities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polytope {
    pub halfspaces: Vec<HalfSpace>,
}

impl Polytope {
    pub fn new(halfspaces: Vec<HalfSpace>) -> Result<Self, GeometryError> {
        let k = halfspaces.first().map(|h| h.a.len()).ok_or(GeometryError::BadPolytope)?;
        if k == 0 || halfspaces.iter().any(|h| h.a.len() != k) {
            return Err(GeometryError::BadPolytope);
        }
        Ok(Self { halfspaces })
    }

    /// The interval `[lo, hi]` in one dimension.
    pub fn interval(lo: Rational, hi: Rational) -> Self {
        let one = Rational::from_integer(1);
        Self {
            halfspaces: vec![
                HalfSpace { a: vec![RationalLit(one)], b: RationalLit(hi) },
                HalfSpace { a: vec![RationalLit(-one)], b: RationalLit(-lo) },
            ],
        }
    }

    /// The axis-parallel box `prod [lo_i, hi_i]`.
    pub fn cuboid(bounds: &[(Rational, Rational)]) -> Self {
        let k = bounds.len();
        let mut hs = Vec::new();
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            let mut a = vec![RationalLit(Rational::from_integer(0)); k];
            a[i] = RationalLit(Rational::from_integer(1));
            hs.push(HalfSpace { a: a.clone(), b: RationalLit(hi) });
            a[i] = RationalLit(Rational::from_integer(-1));
            hs.push(HalfSpace { a, b: RationalLit(-lo) });
        }
        Self { halfspaces: hs }
    }

    pub fn dim(&self) -> usize {
        self.halfspaces[0].a.len()
    }

    pub fn contains_point(&self, z: &[Rational]) -> bool {
        self.halfspaces.iter().all(|h| {
            let s = h.a.iter().zip(z).fold(Rational::from_integer(0), |acc, (a, z)| acc + a.0 * z);
            s <= h.b.0
        })
    }

    /// Strict interior membership.
    pub fn contains_interior(&self, z: &[Rational]) -> bool {
        self.halfspaces.iter().all(|h| {
            let s = h.a.iter().zip(z).fold(Rational::from_integer(0), |acc, (a, z)| acc + a.0 * z);
            s < h.b.0
        })
    }

    /// Vertices of a bounded polytope: feasible solutions of every
    /// non-singular `k x k` subsystem taken with equality. Empty if the
    /// polytope is empty; unbounded polytopes report only their vertices.
    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        let k = self.dim();
        let m = self.halfspaces.len();
        let mut out: Vec<Vec<Rational>> = Vec::new();
        let mut pick: Vec<usize> = (0..k).collect();
        if m < k {
            return out;
        }
        loop {
            let rows: Vec<(Vec<Rational>, Rational)> = pick
                .iter()
                .map(|&i| (self.halfspaces[i].a.iter().map(|a| a.0).collect(), self.halfspaces[i].b.0))
                .collect();
            if let Some(z) = solve(rows) {
                if self.contains_point(&z) && !out.contains(&z) {
                    out.push(z);
                }
            }
            // next k-subset in lexicographic order
            let mut i = k;
            loop {
                if i == 0 {
                    out.sort();
                    return out;
                }
                i -= 1;
                if pick[i] < m - k + i {
                    pick[i] += 1;
                    for j in i + 1..k {
                        pick[j] = pick[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Bounds of the 1-d polytope, if it is an interval.
    pub fn as_interval(&self) -> Option<(Rational, Rational)> {
        if self.dim() != 1 {
            return None;
        }
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for h in &self.halfspaces {
            let a = h.a[0].0;
            let bound = h.b.0 / a;
            if a > Rational::from_integer(0) {
                hi = Some(hi.map_or(bound, |x| x.min(bound)));
            } else if a < Rational::from_integer(0) {
                lo = Some(lo.map_or(bound, |x| x.max(bound)));
            }
        }
        Some((lo?, hi?))
    }
}

/// Gaussian elimination over the rationals; `None` if singular.
fn solve(mut rows: Vec<(Vec<Rational>, Rational)>) -> Option<Vec<Rational>> {
    let k = rows.len();
    let zero = Rational::from_integer(0);
    for c in 0..k {
        let piv = (c..k).find(|&r| rows[r].0[c] != zero)?;
        rows.swap(c, piv);
        let (pa, pb) = rows[c].clone();
        for r in 0..k {
            if r != c && rows[r].0[c] != zero {
                let f = rows[r].0[c] / pa[c];
                for j in 0..k {
                    let v = pa[j];
                    rows[r].0[j] -= f * v;
                }
                rows[r].1 -= f * pb;
            }
        }
    }
    Some(rows.iter().enumerate().map(|(i, (a, b))| *b / a[i]).collect())
}

/// `(x, t)` lies in the cone `{(t z, t): t > 0, z in O}`.
pub fn cone_contains(o: &Polytope, site: &[i64]) -> bool {
    let (&t, x) = site.split_last().expect("non-empty site");
    if t <= 0 || x.len() != o.dim() {
        return false;
    }
    // a . (x/t) <= b  <=>  a . x <= b t  for t > 0
    o.halfspaces.iter().all(|h| {
        let s = h
            .a
            .iter()
            .zip(x)
            .fold(Rational::from_integer(0), |acc, (a, &xi)| acc + a.0 * xi);
        s <= h.b.0 * t
    })
}

/// Integer range `[lo, hi)` of axis 0 of the cone at time `t` with the other
/// spatial coordinates fixed to `rest`.
pub fn cone_axis0_range(o: &Polytope, rest: &[i64], t: i64) -> Option<(i64, i64)> {
    if t <= 0 {
        return None;
    }
    let mut lo = i64::MIN;
    let mut hi = i64::MAX;
    for h in &o.halfspaces {
        let a0 = h.a[0].0;
        let r = h.b.0 * t
            - h.a[1..]
                .iter()
                .zip(rest)
                .fold(Rational::from_integer(0), |acc, (a, &xi)| acc + a.0 * xi);
        let zero = Rational::from_integer(0);
        if a0 > zero {
            hi = hi.min(floor_q(r / a0) + 1);
        } else if a0 < zero {
            lo = lo.max(ceil_q(r / a0));
        } else if r < zero {
            return None;
        }
    }
    (lo < hi).then_some((lo, hi))
}

/// Least common multiple of the denominators of `v`.
pub fn denominator_lcm(v: &[Rational]) -> i64 {
    v.iter().fold(1i64, |acc, q| acc.lcm(q.denom()))
}
