//! Right and left edge speeds across densities for the asymmetric model.

use gosp::estimators::edge_speeds;
use gosp::model::{validate, NeighborhoodSpec};

fn main() {
    let model = validate(&NeighborhoodSpec::planar(&[(-1, 1), (0, 1), (2, 1)])).unwrap();
    for p in [0.75, 0.8, 0.85, 0.9] {
        let e = edge_speeds(&model, p, 400, 60, 1).unwrap();
        println!(
            "p={p:.2} alpha {:.3} +- {:.3}  beta {:.3} +- {:.3}",
            e.alpha.mean, e.alpha.stderr, e.beta.mean, e.beta.stderr
        );
    }
}
