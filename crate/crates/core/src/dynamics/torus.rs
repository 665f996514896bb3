//! Extinction of the quotient chain on `T_n^{d-1} x Z`.

use super::domain::DomainSpec;
use super::state::ProcessState;
use super::{run, DynamicsError, Extinction, Probes};
use crate::field::SiteField;
use crate::geometry::box_points;
use crate::model::NormalizedModel;

/// First empty time of the torus chain started from the full slab, or
/// `Survived(t_max)`. Sites are read from `field` at coordinates reduced
/// to `[0, n)`.
pub fn torus_extinction<F: SiteField + ?Sized>(
    model: &NormalizedModel,
    field: &F,
    n: i64,
    t_max: i64,
) -> Result<Extinction, DynamicsError> {
    let k = model.spatial_dim();
    let mut ranges = vec![(0, n); k];
    ranges.push((0, model.range()));
    let state = ProcessState::on_torus(model, n, &box_points(&ranges))?;
    let domain = DomainSpec::Torus { n };
    let region = domain.resolve(model.range(), false);
    Ok(run(model, state, field, &region, t_max, &Probes::none()).extinction)
}
