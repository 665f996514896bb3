//! Primal and dual order parameters of 2dOP: p theta(p) equals the dual one.

use gosp::estimators::{dual_survival_curve, survival_curve};
use gosp::model::{validate, NeighborhoodSpec};

fn main() {
    let model = validate(&NeighborhoodSpec::planar(&[(0, 1), (1, 1)])).unwrap();
    let (p, horizon, reps) = (0.8, 60, 4000);
    let primal = survival_curve(&model, p, horizon, reps, 1).unwrap();
    let dual = dual_survival_curve(&model, p, horizon, reps, 2).unwrap();
    let scaled = primal.estimate.scaled(p);
    println!("theta_T       {:.4} +- {:.4}", primal.estimate.mean, primal.estimate.stderr);
    println!("p theta_T     {:.4} +- {:.4}", scaled.mean, scaled.stderr);
    println!("dual theta_T  {:.4} +- {:.4}", dual.estimate.mean, dual.estimate.stderr);
    println!("agree within 3 se: {}", scaled.agrees_with(&dual.estimate, 3.0));
}
