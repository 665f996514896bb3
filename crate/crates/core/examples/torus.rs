//! Extinction on the discrete torus: exponential above, logarithmic below.

use gosp::estimators::torus_stats;
use gosp::model::{validate, NeighborhoodSpec};

fn main() {
    let model = validate(&NeighborhoodSpec::planar(&[(0, 1), (1, 1)])).unwrap();
    let sup = torus_stats(&model, 0.8, &[6], 200, 1_000_000, 1).unwrap();
    let l = &sup.levels[0];
    println!("p=0.8 n=6: mean tau {:.1}, KS to Exp(1) {:.3}", l.mean.mean, l.ks);

    let sub = torus_stats(&model, 0.55, &[8, 16, 32], 300, 100_000, 1).unwrap();
    for l in &sub.levels {
        println!("p=0.55 n={:>2}: mean tau / log n {:.2}", l.n, l.log_ratio);
    }
}
