//! Point classification: the Fatou/Julia verdicts on the three reference
//! zones of the product-map semigroup, with the evidence behind each.
//!
//! ```bash
//! cargo run --release --example classify_points
//! ```

use num_complex::Complex64;
use semidyn::classify::{classify_point, normality_score, ClassifierConfig};
use semidyn::polyalg::{parse_polynomial, PolyMap};
use semidyn::semigroup::Semigroup;

fn main() {
    let f = PolyMap::new(
        vec![
            parse_polynomial("z1^2", 2).unwrap(),
            parse_polynomial("z2^2", 2).unwrap(),
        ],
        "f",
    )
    .unwrap();
    let g = PolyMap::new(
        vec![
            parse_polynomial("(0.5)*z1^2", 2).unwrap(),
            parse_polynomial("z2^2", 2).unwrap(),
        ],
        "g",
    )
    .unwrap();
    let semigroup = Semigroup::new(vec![f, g], "example1").unwrap();
    let cfg = ClassifierConfig::default();

    // Inside the unit bidisc every orbit contracts; beyond |z1| = 2 or
    // |z2| = 1 everything escapes; the band between |z1| = 1 and 2 mixes
    // escape with genuine boundedness.
    let probes = [
        ("bidisc interior", [0.5, 0.5]),
        ("escape zone", [3.0, 0.0]),
        ("Julia band", [1.5, 0.2]),
        ("band edge", [2.0, 0.3]),
    ];
    for (label, [x, y]) in probes {
        let z = [Complex64::new(x, 0.0), Complex64::new(y, 0.0)];
        let (class, evidence) = classify_point(&semigroup, &z, &cfg);
        println!(
            "{label:<16} ({x:.2}, {y:.2}) -> {class} \
             [escaping {} / bounded {}, max sep ratio {:.2e}]",
            evidence.n_escaping_words, evidence.n_bounded_words, evidence.max_separation_ratio
        );
        println!(
            "  normality score {:.3} (log kappa = {:.3})",
            normality_score(&semigroup, &z, &cfg),
            cfg.kappa.ln()
        );
        for w in &evidence.witnesses {
            println!("  witness word {w}");
        }
    }
}
