//! Exponential tails of the extinction time above and below criticality.

use gosp::estimators::{death_bound_fit, subcritical_decay, DecayOptions};
use gosp::model::{validate, NeighborhoodSpec};

fn main() {
    let model = validate(&NeighborhoodSpec::planar(&[(0, 1), (1, 1)])).unwrap();

    let d = death_bound_fit(&model, 0.8, 60, 20_000, (10, 40), 1).unwrap();
    println!("p=0.8: log P(t < tau < inf) slope {:.4}, R^2 {:.3}", d.fit.slope, d.fit.r_squared);

    let opts = DecayOptions { stride: 10, windows: [(40, 60), (60, 80)] };
    let s = subcritical_decay(&model, 0.5, 80, 2000, 1, &opts).unwrap();
    println!("p=0.5: c(p) from the two windows {:.4} {:.4}, gap {:.3}", s.c_hat[0], s.c_hat[1], s.relative_gap);
}
