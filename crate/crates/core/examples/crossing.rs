//! Crossing frequency of tilted boxes along the right edge speed.

use gosp::estimators::crossing_probability;
use gosp::model::{validate, NeighborhoodSpec, Rational};

fn main() {
    let model = validate(&NeighborhoodSpec::planar(&[(0, 1), (1, 1)])).unwrap();
    let slope = Rational::new(3, 4);
    for l in [50, 100, 200] {
        let r = crossing_probability(&model, 0.8, l, 0.2, slope, 200, 1).unwrap();
        println!("L={l:>3} half-width {:>2}: crossed {:.3}", r.half_width, r.estimate.mean);
    }
}
