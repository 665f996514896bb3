//! Checks a few neighbourhoods and prints what validation learns about them.

use gosp::model::{orientation_certificate, validate, NeighborhoodSpec, NormalizedModel};

fn main() {
    let candidates = [
        ("asym", NeighborhoodSpec::planar(&[(-1, 1), (0, 1), (2, 1)])),
        ("2dOP", NeighborhoodSpec::planar(&[(0, 1), (1, 1)])),
        ("2dOP diagonal", NeighborhoodSpec::planar(&[(-1, 1), (1, 1)])),
        ("3d", NeighborhoodSpec::new(3, vec![vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 1]])),
        ("not oriented", NeighborhoodSpec::planar(&[(1, 1), (-1, -1)])),
    ];
    for (name, spec) in &candidates {
        match validate(spec) {
            Ok(m) => println!(
                "{name:>14}: d={} R={} gamma={} certificate={:?}",
                m.dim(),
                m.range(),
                m.gamma(),
                orientation_certificate(spec).map(|c| c.iter().map(|r| r.to_string()).collect::<Vec<_>>())
            ),
            Err(e) => println!("{name:>14}: rejected, {e}"),
        }
    }

    // the diagonal model lives on the even sublattice and can be kept there
    let diag = NormalizedModel::on_sublattice(&candidates[2].1).unwrap();
    println!("diagonal model on its sublattice: index {}", diag.lattice_index());
}
