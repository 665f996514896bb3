//! Restriction regions `B` for the process.

use serde::{Deserialize, Serialize};

use crate::geometry::{cone_axis0_range, cone_contains, BlockGeometry, PlacedBlock, Polytope};

pub(crate) const NEG: i64 = i64::MIN / 4;
pub(crate) const POS: i64 = i64::MAX / 4;

/// A set of sites `B`; paths restricted to `B` may only use sites of `B`.
///
/// Every section at fixed time and fixed coordinates on axes `1..` is an
/// interval along axis 0 (all supported regions are convex).
pub trait Region: Sync {
    fn contains(&self, site: &[i64]) -> bool;

    /// Axis-0 coordinates `[lo, hi)` of the section through `rest` (the
    /// spatial axes `1..`) at `time`.
    fn axis0_interval(&self, rest: &[i64], time: i64) -> Option<(i64, i64)>;

    /// Per-axis `[lo, hi)` bounds of the spatial section at `time`, `None` if
    /// the section is empty. Unbounded sides are reported as very large values.
    fn section_bounds(&self, k: usize, time: i64) -> Option<Vec<(i64, i64)>> {
        let _ = time;
        Some(vec![(NEG, POS); k])
    }
}

/// The restriction region of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    /// `Z^{d-1} x [R, inf)`, the default: paths leave the initial slab and
    /// never return.
    Full,
    /// Every site.
    Unrestricted,
    /// `sign * x[axis] >= threshold`; `axis = d - 1` is time.
    HalfSpace { axis: usize, sign: i64, threshold: i64 },
    /// `B(w, h, v)` translated by an integer site.
    Block { block: BlockGeometry, offset: Vec<i64> },
    /// `{(t z, t): t > 0, z in O}`.
    Cone { polytope: Polytope },
    /// `prod [lo_i, hi_i)` times all of time.
    Tube { lo: Vec<i64>, hi: Vec<i64> },
    /// Spatial coordinates taken modulo `n`.
    Torus { n: i64 },
}

impl DomainSpec {
    pub fn torus_side(&self) -> Option<i64> {
        match self {
            DomainSpec::Torus { n } => Some(*n),
            _ => None,
        }
    }

    pub fn half_space(axis: usize, sign: i64, threshold: i64) -> Self {
        assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
        DomainSpec::HalfSpace { axis, sign, threshold }
    }

    pub fn block(block: BlockGeometry, offset: Vec<i64>) -> Self {
        DomainSpec::Block { block, offset }
    }

    pub(crate) fn resolve(&self, range: i64, mirrored: bool) -> Resolved<'_> {
        let placed = match self {
            DomainSpec::Block { block, offset } => {
                Some(PlacedBlock::at_origin(block.clone()).translated(offset))
            }
            _ => None,
        };
        Resolved { spec: self, range, mirrored, placed }
    }

    /// Membership for the forward chain of a model with range `range`.
    pub fn contains(&self, site: &[i64], range: i64) -> bool {
        self.resolve(range, false).contains(site)
    }
}

/// A domain bound to a model range. `mirrored` reads [`DomainSpec::Full`]
/// as its time reversal `Z^{d-1} x (-inf, R)`, the default of the dual chain.
pub(crate) struct Resolved<'a> {
    spec: &'a DomainSpec,
    range: i64,
    mirrored: bool,
    placed: Option<PlacedBlock>,
}

impl Region for Resolved<'_> {
    fn contains(&self, site: &[i64]) -> bool {
        let (&t, x) = site.split_last().expect("non-empty site");
        match self.spec {
            DomainSpec::Full => {
                if self.mirrored {
                    t < self.range
                } else {
                    t >= self.range
                }
            }
            DomainSpec::Unrestricted | DomainSpec::Torus { .. } => true,
            DomainSpec::HalfSpace { axis, sign, threshold } => sign * site[*axis] >= *threshold,
            DomainSpec::Block { .. } => self.placed.as_ref().unwrap().contains(site),
            DomainSpec::Cone { polytope } => cone_contains(polytope, site),
            DomainSpec::Tube { lo, hi } => {
                x.iter().zip(lo.iter().zip(hi)).all(|(&c, (&l, &h))| l <= c && c < h)
            }
        }
    }

    fn axis0_interval(&self, rest: &[i64], time: i64) -> Option<(i64, i64)> {
        let all = Some((NEG, POS));
        match self.spec {
            DomainSpec::Full => {
                let ok = if self.mirrored { time < self.range } else { time >= self.range };
                ok.then_some((NEG, POS))
            }
            DomainSpec::Unrestricted | DomainSpec::Torus { .. } => all,
            DomainSpec::HalfSpace { axis, sign, threshold } => {
                let k = rest.len() + 1;
                if *axis == 0 {
                    if *sign > 0 {
                        Some((*threshold, POS))
                    } else {
                        Some((NEG, 1 - threshold))
                    }
                } else {
                    let c = if *axis == k { time } else { rest[axis - 1] };
                    (sign * c >= *threshold).then_some((NEG, POS))
                }
            }
            DomainSpec::Block { .. } => {
                let b = self.placed.as_ref().unwrap();
                for (i, &c) in rest.iter().enumerate() {
                    let (lo, hi) = b.axis_range(i + 1, time)?;
                    if !(lo..hi).contains(&c) {
                        return None;
                    }
                }
                b.axis_range(0, time)
            }
            DomainSpec::Cone { polytope } => cone_axis0_range(polytope, rest, time),
            DomainSpec::Tube { lo, hi } => {
                let inside = rest
                    .iter()
                    .enumerate()
                    .all(|(i, &c)| lo[i + 1] <= c && c < hi[i + 1]);
                (inside && lo[0] < hi[0]).then_some((lo[0], hi[0]))
            }
        }
    }

    fn section_bounds(&self, k: usize, time: i64) -> Option<Vec<(i64, i64)>> {
        let all = vec![(NEG, POS); k];
        match self.spec {
            DomainSpec::Full => {
                let ok = if self.mirrored { time < self.range } else { time >= self.range };
                ok.then_some(all)
            }
            DomainSpec::Unrestricted | DomainSpec::Torus { .. } => Some(all),
            DomainSpec::HalfSpace { axis, sign, threshold } => {
                let mut b = all;
                if *axis == k {
                    return (sign * time >= *threshold).then_some(b);
                }
                b[*axis] = if *sign > 0 { (*threshold, POS) } else { (NEG, 1 - threshold) };
                Some(b)
            }
            DomainSpec::Block { .. } => {
                let p = self.placed.as_ref().unwrap();
                (0..k).map(|i| p.axis_range(i, time)).collect()
            }
            DomainSpec::Cone { polytope } => {
                if time <= 0 {
                    return None;
                }
                if k == 1 {
                    cone_axis0_range(polytope, &[], time).map(|r| vec![r])
                } else {
                    Some(all)
                }
            }
            DomainSpec::Tube { lo, hi } => {
                let b: Vec<(i64, i64)> = lo.iter().copied().zip(hi.iter().copied()).collect();
                b.iter().all(|(l, h)| l < h).then_some(b)
            }
        }
    }
}

/// `inner` viewed through a translation: site `z` is in the region iff
/// `z + shift` is in `inner`.
pub(crate) struct Translated<G> {
    pub inner: G,
    pub shift: Vec<i64>,
}

impl<G: Region> Region for Translated<G> {
    fn contains(&self, site: &[i64]) -> bool {
        let moved: Vec<i64> = site.iter().zip(&self.shift).map(|(a, b)| a + b).collect();
        self.inner.contains(&moved)
    }

    fn axis0_interval(&self, rest: &[i64], time: i64) -> Option<(i64, i64)> {
        let k = self.shift.len() - 1;
        let moved: Vec<i64> = rest.iter().zip(&self.shift[1..k]).map(|(a, b)| a + b).collect();
        let (lo, hi) = self.inner.axis0_interval(&moved, time + self.shift[k])?;
        Some((lo - self.shift[0], hi - self.shift[0]))
    }

    fn section_bounds(&self, k: usize, time: i64) -> Option<Vec<(i64, i64)>> {
        let b = self.inner.section_bounds(k, time + self.shift[k])?;
        Some(b.iter().zip(&self.shift).map(|(&(l, h), s)| (sat(l, -s), sat(h, -s))).collect())
    }
}

fn sat(c: i64, by: i64) -> i64 {
    if c <= NEG || c >= POS {
        c
    } else {
        c + by
    }
}

/// Space-time region given by per-time spatial boxes
/// `[lo_i(t), hi_i(t))`, used for exact truncations.
pub(crate) struct TimeBoxes<F: Fn(i64) -> Option<Vec<(i64, i64)>> + Sync>(pub F);

impl<F: Fn(i64) -> Option<Vec<(i64, i64)>> + Sync> Region for TimeBoxes<F> {
    fn contains(&self, site: &[i64]) -> bool {
        let (&t, x) = site.split_last().unwrap();
        match (self.0)(t) {
            Some(b) => x.iter().zip(&b).all(|(&c, &(l, h))| l <= c && c < h),
            None => false,
        }
    }

    fn axis0_interval(&self, rest: &[i64], time: i64) -> Option<(i64, i64)> {
        let b = (self.0)(time)?;
        rest.iter()
            .zip(&b[1..])
            .all(|(&c, &(l, h))| l <= c && c < h)
            .then_some(b[0])
            .filter(|r| r.0 < r.1)
    }

    fn section_bounds(&self, _k: usize, time: i64) -> Option<Vec<(i64, i64)>> {
        (self.0)(time).filter(|b| b.iter().all(|(l, h)| l < h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::box_points;
    use crate::model::Rational;

    fn check_sections(d: &dyn Region, k: usize, times: std::ops::Range<i64>, span: i64) {
        for t in times {
            let ranges = vec![(-span, span); k];
            for x in box_points(&ranges) {
                let mut site = x.clone();
                site.push(t);
                let inside = d.contains(&site);
                let iv = d.axis0_interval(&x[1..], t);
                let by_interval = iv.is_some_and(|(lo, hi)| (lo..hi).contains(&x[0]));
                assert_eq!(inside, by_interval, "site {site:?}");
                if inside {
                    let b = d.section_bounds(k, t).expect("non-empty section");
                    assert!(x.iter().zip(&b).all(|(&c, &(l, h))| l <= c && c < h));
                }
            }
        }
    }

    #[test]
    fn intervals_agree_with_membership() {
        let q = Rational::new;
        let specs = vec![
            DomainSpec::Full,
            DomainSpec::Unrestricted,
            DomainSpec::half_space(0, 1, -2),
            DomainSpec::half_space(0, -1, 1),
            DomainSpec::half_space(1, -1, -1),
            DomainSpec::half_space(2, 1, 3),
            DomainSpec::block(BlockGeometry::new(vec![3, 2], 5, vec![q(1, 2), q(-1, 3)]).unwrap(), vec![1, -1, 2]),
            DomainSpec::Cone { polytope: Polytope::cuboid(&[(q(-1, 2), q(1, 3)), (q(0, 1), q(1, 1))]) },
            DomainSpec::Tube { lo: vec![-2, 0], hi: vec![3, 2] },
        ];
        for s in &specs {
            for mirrored in [false, true] {
                check_sections(&s.resolve(2, mirrored), 2, -3..9, 7);
            }
        }
    }

    #[test]
    fn full_domain_and_its_mirror() {
        let d = DomainSpec::Full;
        assert!(!d.contains(&[0, 1], 2));
        assert!(d.contains(&[0, 2], 2));
        let m = d.resolve(2, true);
        assert!(m.contains(&[5, 1]));
        assert!(!m.contains(&[5, 2]));
    }

    #[test]
    fn time_boxes_region() {
        let r = TimeBoxes(|t: i64| (t >= 0).then(|| vec![(-t, t + 1)]));
        check_sections(&r, 1, -2..5, 6);
    }

    #[test]
    fn serde_round_trip() {
        let s = DomainSpec::Tube { lo: vec![0], hi: vec![4] };
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"kind":"tube","lo":[0],"hi":[4]}"#);
        assert_eq!(serde_json::from_str::<DomainSpec>(&j).unwrap(), s);
    }
}
