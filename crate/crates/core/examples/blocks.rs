//! Block events used in renormalisation: the bg probe and the good block.

use gosp::estimators::{bg_event_probability, good_block_probability, GoodBlockOptions};
use gosp::geometry::BlockGeometry;
use gosp::model::{validate, NeighborhoodSpec, Rational};

fn main() {
    let op = validate(&NeighborhoodSpec::planar(&[(0, 1), (1, 1)])).unwrap();
    for w in [8, 16] {
        let g = BlockGeometry::new(vec![w], w, vec![Rational::new(1, 2)]).unwrap();
        let r = bg_event_probability(&op, 0.8, &g, 2, 100, 1).unwrap();
        println!("2dOP bg event, w=h={w}: {:.2}", r.estimate.mean);
    }

    let asym = validate(&NeighborhoodSpec::planar(&[(-1, 1), (0, 1), (2, 1)])).unwrap();
    for l in [12, 16] {
        let r = good_block_probability(&asym, 0.8, l, 4, 20, 1, &GoodBlockOptions { v: None }).unwrap();
        let parts: Vec<f64> = r.event_frequencies.iter().map(|e| e.mean).collect();
        println!("asym good block L={l}: {:.2} (parts {parts:?})", r.estimate.mean);
    }
}
