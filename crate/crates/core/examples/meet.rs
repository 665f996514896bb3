//! Primal and dual clusters started t v apart meet when both survive.

use gosp::estimators::primal_dual_meet;
use gosp::model::{NeighborhoodSpec, NormalizedModel, Rational};

fn main() {
    // the diagonal 2dOP, symmetric so the drift is zero
    let model = NormalizedModel::on_sublattice(&NeighborhoodSpec::planar(&[(-1, 1), (1, 1)])).unwrap();
    let r = primal_dual_meet(&model, 0.8, &[8, 16, 32], 500, &[Rational::from_integer(0)], 1).unwrap();
    for ((t, f), a) in r.times.iter().zip(&r.failure).zip(&r.both_alive) {
        println!("t={t:>2}: both alive {:.3}, alive but apart {:.4}", a.mean, f.mean);
    }
}
