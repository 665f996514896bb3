//! The site field is a pure function of (seed, site): no state, any order.

use gosp::field::{derive_seed, FieldSpec, MIXER_ID};

fn main() {
    let field = FieldSpec::new(2, 42, 0.6).unwrap();
    let row: String = (0..40).map(|x| if field.site_open(&[x, 3]).unwrap() { '#' } else { '.' }).collect();
    println!("mixer {MIXER_ID}");
    println!("row t=3      {row}");

    // the same site read twice, or from a clone, gives the same answer
    let again: String = (0..40).rev().map(|x| if field.site_open(&[x, 3]).unwrap() { '#' } else { '.' }).collect();
    println!("reversed ok  {}", again.chars().rev().collect::<String>() == row);

    // monotone coupling in p: open at 0.6 implies open at 0.8
    let denser = field.at_p(0.8).unwrap();
    let monotone = (0..10_000).all(|x| !field.site_open(&[x, 0]).unwrap() || denser.site_open(&[x, 0]).unwrap());
    println!("monotone in p {monotone}");

    // sprinkling opens a further eps of the closed sites
    let sprinkled = field.clone().with_sprinkle(0.1).unwrap();
    let n = 100_000;
    let open = (0..n).filter(|&x| sprinkled.sprinkled_open(&[x, 1]).unwrap()).count();
    println!("sprinkled density {:.3} (target 0.7)", open as f64 / n as f64);

    println!("replica seeds {:?}", (0..3).map(|i| derive_seed(42, i)).collect::<Vec<_>>());
}
