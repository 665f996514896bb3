//! Point-to-point connectivity by memoised search inside the dependency
//! cone of the target.

use std::collections::HashSet;

use super::domain::{DomainSpec, Region};
use crate::field::SiteField;
use crate::model::{NormalizedModel, Rational};

/// Per-axis speed bounds `(min y_i / u, max y_i / u)`.
fn speeds(model: &NormalizedModel) -> Vec<(Rational, Rational)> {
    (0..model.spatial_dim()).map(|i| model.axis_speeds(i)).collect()
}

/// `from` can still be joined to `to` by a forward path, ignoring `omega`.
fn in_cone(speeds: &[(Rational, Rational)], from: &[i64], to: &[i64]) -> bool {
    let k = speeds.len();
    let dt = to[k] - from[k];
    if dt < 0 {
        return false;
    }
    (0..k).all(|i| {
        let dx = Rational::from_integer(to[i] - from[i]);
        speeds[i].0 * dt <= dx && dx <= speeds[i].1 * dt
    })
}

/// `a ->[B] b`: `a = b`, or a path `a = a_0, ..., a_m = b` with steps in
/// `X` whose sites `a_1, ..., a_m` are open and in `B`.
pub fn reaches<F: SiteField + ?Sized>(
    model: &NormalizedModel,
    a: &[i64],
    b: &[i64],
    field: &F,
    domain: &DomainSpec,
) -> bool {
    let region = domain.resolve(model.range(), false);
    reaches_within(model, a, b, field, |s| region.contains(s))
}

/// [`reaches`] with the domain given as a membership predicate.
pub fn reaches_within<F, M>(model: &NormalizedModel, a: &[i64], b: &[i64], field: &F, member: M) -> bool
where
    F: SiteField + ?Sized,
    M: Fn(&[i64]) -> bool,
{
    if a == b {
        return true;
    }
    let sp = speeds(model);
    let offsets = &model.spec().offsets;
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut stack = vec![a.to_vec()];
    while let Some(cur) = stack.pop() {
        for x in offsets {
            let next: Vec<i64> = cur.iter().zip(x).map(|(c, y)| c + y).collect();
            if !in_cone(&sp, &next, b) || seen.contains(&next) {
                continue;
            }
            if !(field.is_open(&next) && member(&next)) {
                seen.insert(next);
                continue;
            }
            if next == b {
                return true;
            }
            seen.insert(next.clone());
            stack.push(next);
        }
    }
    false
}

/// `b ~>[B] a`: `b = a`, or a path `b = c_0, ..., c_m = a` with
/// `c_i - c_{i+1} in X` whose sites `c_0, ..., c_{m-1}` are open and in `B`.
/// Domain membership is read literally (no mirroring).
pub fn dual_reaches<F: SiteField + ?Sized>(
    model: &NormalizedModel,
    b: &[i64],
    a: &[i64],
    field: &F,
    domain: &DomainSpec,
) -> bool {
    if a == b {
        return true;
    }
    let region = domain.resolve(model.range(), false);
    let sp = speeds(model);
    let offsets = &model.spec().offsets;
    let usable = |c: &[i64]| field.is_open(c) && region.contains(c);
    if !usable(b) {
        return false;
    }
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut stack = vec![b.to_vec()];
    while let Some(cur) = stack.pop() {
        for x in offsets {
            let next: Vec<i64> = cur.iter().zip(x).map(|(c, y)| c - y).collect();
            if !in_cone(&sp, a, &next) {
                continue;
            }
            if next == a {
                return true;
            }
            if seen.insert(next.clone()) && usable(&next) {
                stack.push(next);
            }
        }
    }
    false
}
