//! Bisection for the critical density of 2dOP at a small horizon.

use gosp::estimators::critical_point;
use gosp::model::{validate, NeighborhoodSpec};

fn main() {
    let model = validate(&NeighborhoodSpec::planar(&[(0, 1), (1, 1)])).unwrap();
    let r = critical_point(&model, 200, 60, 400, 0.02, 1, 2).unwrap();
    println!("bracket {:?}, p_c ~ {:.3}", r.bracket, r.p_hat);
    for s in &r.sweep {
        println!("  p={:.4} survival {:.3}", s.p, s.frequency.mean);
    }
    println!("other seed sets: {:?}", r.stability);
}
