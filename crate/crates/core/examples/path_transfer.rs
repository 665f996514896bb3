//! Crossing paths of two tilted boxes: planar models always let one path
//! hand over to the other, the asymmetric model need not.

use gosp::estimators::{path_crossing_transfer, TransferOptions};
use gosp::model::{validate, NeighborhoodSpec, Rational};

fn main() {
    let op = validate(&NeighborhoodSpec::planar(&[(0, 1), (1, 1)])).unwrap();
    let opts = TransferOptions { box_eps: 0.05, alpha: Rational::new(4, 5), beta: Rational::new(1, 5), n: 2, budget: 2000 };
    let r = path_crossing_transfer(&op, 0.8, 0.0, 100, 100, 1, &opts).unwrap();
    println!("2dOP: transfer {:.2}, paths meet {:.2}", r.transfer.mean, r.paths_meet.mean);

    let asym = validate(&NeighborhoodSpec::planar(&[(-1, 1), (0, 1), (2, 1)])).unwrap();
    let opts = TransferOptions { box_eps: 0.05, alpha: Rational::new(3, 2), beta: Rational::new(-1, 2), n: 2, budget: 2000 };
    let r = path_crossing_transfer(&asym, 0.8, 0.0, 100, 50, 1, &opts).unwrap();
    println!("asym: transfer {:.2}, paths meet {:.2}", r.transfer.mean, r.paths_meet.mean);
    if let Some(w) = r.samples.iter().find(|s| s.hat_meets && !s.paths_meet) {
        println!("attempt {} has disjoint paths of lengths {} and {}", w.attempt, w.gamma.len(), w.gamma_prime.len());
    }
}
