//! Semigroup words and orbits: evaluation order, reproducible sampling,
//! power subsemigroups, and escape bookkeeping.
//!
//! ```bash
//! cargo run --release --example word_orbits
//! ```

use num_complex::Complex64;
use semidyn::polyalg::{parse_polynomial, PolyMap};
use semidyn::semigroup::{PowerTuple, Semigroup, Word, WordSampler};

fn map(label: &str, comps: &[&str]) -> PolyMap {
    let k = comps.len();
    PolyMap::new(
        comps
            .iter()
            .map(|s| parse_polynomial(s, k).unwrap())
            .collect(),
        label,
    )
    .unwrap()
}

fn main() {
    // The two-generator semigroup of the product-map example with a = 2.
    let semigroup = Semigroup::new(
        vec![
            map("f", &["z1^2", "z2^2"]),
            map("g", &["(0.5)*z1^2", "z2^2"]),
        ],
        "example1",
    )
    .unwrap();

    // indices[0] is the outermost map: [0, 1] evaluates f after g.
    let w = Word::new(vec![0, 1]);
    let z = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
    println!("f(g(1,1)) = {:?}", semigroup.eval_word(&w, &z).unwrap());

    // Counter-based sampling: the same seed always yields the same words.
    let sampler = WordSampler::Random {
        count: 5,
        max_len: 6,
        seed: 42,
    };
    for word in semigroup.sample_words(&sampler).unwrap() {
        println!("sampled word {word}");
    }

    // Orbits record the partial-word image sequence and the exit step.
    let orbit = semigroup.orbit(
        &Word::new(vec![0; 10]),
        &[Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)],
        100.0,
        16,
    );
    println!(
        "orbit from (2,0): exit at sequence element {:?}, max norm {:.3e}",
        orbit.exit_step, orbit.max_norm
    );

    // Power subsemigroups square the generators symbolically.
    let squared = semigroup
        .power_subsemigroup(&PowerTuple(vec![2, 2]))
        .unwrap();
    for g in squared.generators() {
        println!("powered generator: {g}");
    }
}
