//! Limit shape of the asymmetric model and survival in a cone inside it.

use gosp::estimators::{restricted_cone_survival, shape_and_time_constants, ShapeOptions};
use gosp::geometry::Polytope;
use gosp::model::{validate, NeighborhoodSpec, Rational};

fn main() {
    let model = validate(&NeighborhoodSpec::planar(&[(-1, 1), (0, 1), (2, 1)])).unwrap();
    let t = 300;
    let shape = shape_and_time_constants(&model, 0.8, t, 40, &ShapeOptions { grid: 16, condition_horizon: t }, 1).unwrap();
    println!("U_hat = {:?} (acceptance {:.2})", shape.interval(), shape.acceptance.mean);
    for (u, mu) in shape.directions.iter().zip(&shape.mu_hat) {
        println!("  direction {u:?}: time constant {:?}", mu.map(|m| m.mean));
    }

    let cone = Polytope::interval(Rational::new(0, 1), Rational::new(1, 2));
    let r = restricted_cone_survival(&model, 0.8, &cone, 300, 30, 60, 2, &shape).unwrap();
    println!("cone [0, 1/2]: percolates {:.2} ({})", r.estimate.mean, r.policy);
}
