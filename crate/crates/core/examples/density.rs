//! Density of the set of sites reached from far below, against p theta.

use gosp::estimators::density_spectrum;
use gosp::model::{validate, NeighborhoodSpec};

fn main() {
    let model = validate(&NeighborhoodSpec::planar(&[(0, 1), (1, 1)])).unwrap();
    let r = density_spectrum(&model, 0.8, &[16, 32], 200, 300, 1, &[0.5], 2000).unwrap();
    println!("p theta = {:.4} +- {:.4}", r.p_theta.mean, r.p_theta.stderr);
    for l in &r.levels {
        let below: Vec<String> = l.below.iter().map(|(a, e)| format!("P(Y <= {a}) = {:.3}", e.mean)).collect();
        println!("n={:>2}: mean Y_n {:.4} +- {:.4}; {}", l.n, l.mean.mean, l.mean.stderr, below.join(", "));
    }
}
