//! Neighbourhood specifications and the constants derived from them.
//!
//! A neighbourhood is a finite set `X` of offsets in `Z^d`. The last
//! coordinate plays the role of time; a [`NormalizedModel`] is one whose
//! offsets all move strictly forward in time and generate all of `Z^d`.

mod lattice;
mod orientation;

use std::path::Path;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lattice::LatticeIndex;

pub type Rational = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("dimension must be between 2 and 8, got {0}")]
    BadDimension(usize),
    #[error("offset {offset:?} has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        offset: Vec<i64>,
        got: usize,
        expected: usize,
    },
    #[error("a neighbourhood needs at least 2 offsets, got {0}")]
    TooFewOffsets(usize),
    #[error("the origin cannot be an offset")]
    ZeroOffset,
    #[error("offset {0:?} is listed twice")]
    DuplicateOffset(Vec<i64>),
    #[error("offset {0:?} has a non-positive time component")]
    NonPositiveTimeComponent(Vec<i64>),
    #[error("offsets generate a proper sublattice of Z^d (index {0}); re-index the lattice first")]
    ProperSublattice(LatticeIndex),
    #[error("model file: {0}")]
    Io(String),
    #[error("model file is not valid JSON: {0}")]
    Json(String),
}

/// Raw neighbourhood as read from a model file: `{"d": 2, "X": [[-1,1],[0,1],[2,1]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeighborhoodSpec {
    pub d: usize,
    #[serde(rename = "X")]
    pub offsets: Vec<Vec<i64>>,
}

impl NeighborhoodSpec {
    pub fn new(d: usize, offsets: Vec<Vec<i64>>) -> Self {
        Self { d, offsets }
    }

    /// Shorthand for two-dimensional neighbourhoods given as `(x, t)` pairs.
    pub fn planar(offsets: &[(i64, i64)]) -> Self {
        Self::new(2, offsets.iter().map(|&(x, t)| vec![x, t]).collect())
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ModelError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialises")
    }

    /// Structural checks shared by every entry point.
    fn check_shape(&self) -> Result<(), ModelError> {
        if self.d < 2 || self.d > crate::field::MAX_DIM {
            return Err(ModelError::BadDimension(self.d));
        }
        for x in &self.offsets {
            if x.len() != self.d {
                return Err(ModelError::DimensionMismatch {
                    offset: x.clone(),
                    got: x.len(),
                    expected: self.d,
                });
            }
        }
        if self.offsets.len() < 2 {
            return Err(ModelError::TooFewOffsets(self.offsets.len()));
        }
        if self.offsets.iter().any(|x| x.iter().all(|&c| c == 0)) {
            return Err(ModelError::ZeroOffset);
        }
        let mut sorted = self.offsets.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateOffset(w[0].clone()));
        }
        Ok(())
    }
}

/// An offset split into its spatial part `y` and time step `u >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitOffset {
    pub spatial: Vec<i64>,
    pub time: i64,
}

/// A validated neighbourhood with its range `R` and spread `gamma`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedModel {
    spec: NeighborhoodSpec,
    range: i64,
    gamma: Rational,
    split: Vec<SplitOffset>,
    index: LatticeIndex,
}

/// Checks a neighbourhood and derives its constants.
///
/// Offsets are canonicalised to lexicographic order.
pub fn validate(spec: &NeighborhoodSpec) -> Result<NormalizedModel, ModelError> {
    let model = NormalizedModel::build(spec)?;
    if !model.index.is_full() {
        return Err(ModelError::ProperSublattice(model.index));
    }
    Ok(model)
}

/// Returns a rational direction `u` with `<x, u> > 0` for every offset, or
/// `None` when the offsets are not contained in any open half-space.
pub fn orientation_certificate(spec: &NeighborhoodSpec) -> Option<Vec<Rational>> {
    if spec.offsets.iter().any(|x| x.len() != spec.d) {
        return None;
    }
    orientation::separating_direction(&spec.offsets, spec.d)
}

/// Index of the lattice generated by the offsets inside `Z^d`.
pub fn lattice_index(spec: &NeighborhoodSpec) -> LatticeIndex {
    if spec.offsets.iter().any(|x| x.len() != spec.d) {
        return LatticeIndex::Infinite;
    }
    lattice::lattice_index(&spec.offsets, spec.d)
}

impl NormalizedModel {
    fn build(spec: &NeighborhoodSpec) -> Result<Self, ModelError> {
        spec.check_shape()?;
        let d = spec.d;
        if let Some(bad) = spec.offsets.iter().find(|x| x[d - 1] <= 0) {
            return Err(ModelError::NonPositiveTimeComponent(bad.clone()));
        }
        let mut offsets = spec.offsets.clone();
        offsets.sort();
        let split: Vec<SplitOffset> = offsets
            .iter()
            .map(|x| SplitOffset {
                spatial: x[..d - 1].to_vec(),
                time: x[d - 1],
            })
            .collect();
        let range = split.iter().map(|s| s.time).max().unwrap_or(1);
        let gamma = split
            .iter()
            .map(|s| {
                let norm = s.spatial.iter().map(|c| c.abs()).max().unwrap_or(0);
                Rational::new(norm, s.time)
            })
            .max()
            .unwrap_or_else(|| Rational::from_integer(0));
        let index = lattice::lattice_index(&offsets, d);
        Ok(Self {
            spec: NeighborhoodSpec { d, offsets },
            range,
            gamma,
            split,
            index,
        })
    }

    /// Like [`validate`] but accepts offsets generating a proper sublattice
    /// (for instance `{(-1,1),(1,1)}`, which only reaches the even sites).
    ///
    /// Dynamics are well defined on such models; the index is kept in
    /// [`NormalizedModel::lattice_index`].
    pub fn on_sublattice(spec: &NeighborhoodSpec) -> Result<Self, ModelError> {
        let model = Self::build(spec)?;
        if model.index == LatticeIndex::Infinite {
            return Err(ModelError::ProperSublattice(model.index));
        }
        Ok(model)
    }

    pub fn spec(&self) -> &NeighborhoodSpec {
        &self.spec
    }

    /// Dimension `d` of the lattice (space is `d - 1` dimensional).
    pub fn dim(&self) -> usize {
        self.spec.d
    }

    pub fn spatial_dim(&self) -> usize {
        self.spec.d - 1
    }

    /// Range `R`: largest time component of an offset.
    pub fn range(&self) -> i64 {
        self.range
    }

    /// Spread `gamma = max |y|_inf / u`.
    pub fn gamma(&self) -> Rational {
        self.gamma
    }

    pub fn split_offsets(&self) -> &[SplitOffset] {
        &self.split
    }

    pub fn lattice_index(&self) -> LatticeIndex {
        self.index
    }

    /// Extreme signed velocities `(min y_i/u, max y_i/u)` along spatial axis `i`.
    pub fn axis_speeds(&self, axis: usize) -> (Rational, Rational) {
        let speeds = self
            .split
            .iter()
            .map(|s| Rational::new(s.spatial[axis], s.time));
        let lo = speeds.clone().min().expect("non-empty");
        let hi = speeds.max().expect("non-empty");
        (lo, hi)
    }

    /// Extreme per-step displacements `(min y_i, max y_i)` along axis `i`.
    pub fn axis_steps(&self, axis: usize) -> (i64, i64) {
        let lo = self.split.iter().map(|s| s.spatial[axis]).min().unwrap();
        let hi = self.split.iter().map(|s| s.spatial[axis]).max().unwrap();
        (lo, hi)
    }

    /// `ceil(gamma * t)`, the exact per-axis reach of influence after `t` steps.
    pub fn reach(&self, t: i64) -> i64 {
        (self.gamma * t).ceil().to_integer()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn asym() -> NeighborhoodSpec {
        NeighborhoodSpec::planar(&[(-1, 1), (0, 1), (2, 1)])
    }

    #[test]
    fn asymmetric_example_is_valid() {
        let m = validate(&asym()).unwrap();
        assert_eq!(m.range(), 1);
        assert_eq!(m.gamma(), Rational::from_integer(2));
        assert_eq!(m.lattice_index(), LatticeIndex::Finite(1));
        assert_eq!(m.axis_speeds(0), (Rational::from_integer(-1), Rational::from_integer(2)));
    }

    #[test]
    fn diagonal_op_spans_half_the_lattice() {
        let spec = NeighborhoodSpec::planar(&[(-1, 1), (1, 1)]);
        assert_eq!(
            validate(&spec),
            Err(ModelError::ProperSublattice(LatticeIndex::Finite(2)))
        );
        let m = NormalizedModel::on_sublattice(&spec).unwrap();
        assert_eq!(m.lattice_index(), LatticeIndex::Finite(2));
    }

    #[test]
    fn single_offset_is_rejected() {
        let spec = NeighborhoodSpec::planar(&[(0, 1)]);
        assert_eq!(validate(&spec), Err(ModelError::TooFewOffsets(1)));
    }

    #[test]
    fn zero_duplicate_and_backward_offsets() {
        assert_eq!(
            validate(&NeighborhoodSpec::planar(&[(0, 0), (0, 1)])),
            Err(ModelError::ZeroOffset)
        );
        assert_eq!(
            validate(&NeighborhoodSpec::planar(&[(1, 1), (1, 1), (0, 1)])),
            Err(ModelError::DuplicateOffset(vec![1, 1]))
        );
        assert_eq!(
            validate(&NeighborhoodSpec::planar(&[(1, 0), (0, 1)])),
            Err(ModelError::NonPositiveTimeComponent(vec![1, 0]))
        );
    }

    #[test]
    fn range_and_gamma_with_long_steps() {
        let spec = NeighborhoodSpec::planar(&[(3, 2), (0, 1), (-1, 2)]);
        let m = validate(&spec).unwrap();
        assert_eq!(m.range(), 2);
        assert_eq!(m.gamma(), Rational::new(3, 2));
        assert_eq!(m.reach(3), 5);
    }

    #[test]
    fn offsets_are_canonicalised() {
        let m = validate(&NeighborhoodSpec::planar(&[(2, 1), (-1, 1), (0, 1)])).unwrap();
        assert_eq!(m.spec().offsets, vec![vec![-1, 1], vec![0, 1], vec![2, 1]]);
    }

    #[test]
    fn model_file_roundtrip() {
        let spec = NeighborhoodSpec::from_json(r#"{"d": 2, "X": [[-1,1],[0,1],[2,1]]}"#).unwrap();
        assert_eq!(spec, asym());
        assert!(NeighborhoodSpec::from_json(r#"{"d": 2, "X": [], "extra": 1}"#).is_err());
    }

    #[test]
    fn certificate_examples() {
        let r = Rational::from_integer;
        assert_eq!(
            orientation_certificate(&NeighborhoodSpec::planar(&[(1, 0), (0, 1)])),
            Some(vec![r(1), r(1)])
        );
        assert_eq!(
            orientation_certificate(&NeighborhoodSpec::planar(&[(0, 1), (0, -1)])),
            None
        );
        assert_eq!(
            orientation_certificate(&NeighborhoodSpec::planar(&[(-1, 1), (2, 1)])),
            Some(vec![r(0), r(1)])
        );
    }

    fn arb_spec() -> impl proptest::strategy::Strategy<Value = NeighborhoodSpec> {
        use proptest::prelude::*;
        (2usize..4).prop_flat_map(|d| {
            proptest::collection::vec(proptest::collection::vec(-3i64..4, d), 1..6)
                .prop_map(move |offsets| NeighborhoodSpec::new(d, offsets))
        })
    }

    proptest::proptest! {
        #[test]
        fn validate_agrees_with_its_parts(spec in arb_spec()) {
            let d = spec.d;
            let shape_ok = spec.check_shape().is_ok();
            let forward = spec.offsets.iter().all(|x| x[d - 1] >= 1);
            let full = lattice_index(&spec).is_full();
            let got = validate(&spec);
            proptest::prop_assert_eq!(got.is_ok(), shape_ok && forward && full);
            if let Ok(m) = got {
                // the time axis certifies orientation, so a certificate must exist
                let u = orientation_certificate(&spec);
                proptest::prop_assert!(u.is_some());
                for s in m.split_offsets() {
                    let norm = s.spatial.iter().map(|c| c.abs()).max().unwrap();
                    proptest::prop_assert!(Rational::from_integer(norm) <= m.gamma() * s.time);
                }
                let attained = m.split_offsets().iter().any(|s| {
                    let norm = s.spatial.iter().map(|c| c.abs()).max().unwrap();
                    Rational::new(norm, s.time) == m.gamma()
                });
                proptest::prop_assert!(attained);
                proptest::prop_assert_eq!(m.range(), m.split_offsets().iter().map(|s| s.time).max().unwrap());
            }
        }
    }
}
