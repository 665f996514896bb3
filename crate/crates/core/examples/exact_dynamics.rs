//! Runs the chain from the origin on one field and prints every row,
//! then checks one reachability against the dual chain.

use gosp::dynamics::{dual_reaches, evolve, reaches, DomainSpec, Probes, Retain};
use gosp::field::FieldSpec;
use gosp::model::{validate, NeighborhoodSpec};

fn main() {
    let model = validate(&NeighborhoodSpec::planar(&[(-1, 1), (0, 1), (2, 1)])).unwrap();
    let field = FieldSpec::new(2, 7, 0.7).unwrap();
    let probes = Probes { snapshots: Retain::Every, counts: true, ..Probes::none() };
    let run = evolve(&model, &[vec![0, 0]], &field, &DomainSpec::Full, 12, &probes).unwrap();

    println!("extinction: {:?}", run.extinction);
    for snap in &run.snapshots {
        let xs: Vec<i64> = snap.sites().iter().filter(|s| s[1] == 0).map(|s| s[0]).collect();
        let (lo, hi) = (-12, 24);
        let line: String = (lo..=hi).map(|x| if xs.contains(&x) { '#' } else { '.' }).collect();
        println!("t={:>2} {line}", snap.t());
    }

    let (a, b) = (vec![0, 0], vec![3, 5]);
    let forward = reaches(&model, &a, &b, &field, &DomainSpec::Unrestricted);
    let backward = dual_reaches(&model, &b, &a, &field, &DomainSpec::Unrestricted);
    println!("(0,0) -> (3,5): {forward}, dual agrees: {}", forward == backward);
}
