//! Polynomial algebra tour: the expression grammar, evaluation,
//! differentiation, Jacobian determinants, and univariate root solving.
//!
//! ```bash
//! cargo run --release --example expression_algebra
//! ```

use num_complex::Complex64;
use semidyn::polyalg::{parse_polynomial, roots_1d, PolyMap};

fn main() {
    // The grammar: variables z1..z9, complex literals like `(0.25)` or
    // `(1+2i)`, operators + - * ^ with integer powers.
    let p = parse_polynomial("(0.25)*z1 - z2^2", 2).unwrap();
    let z = [Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.5)];
    println!("p(z)           = {}", p.eval(&z).unwrap());
    println!("dp/dz1         = {}", p.differentiate(0).unwrap());
    println!("dp/dz2         = {}", p.differentiate(1).unwrap());

    // A volume-preserving quadratic map: the Jacobian determinant is -1.
    let henon = PolyMap::new(
        vec![
            parse_polynomial("z2", 2).unwrap(),
            parse_polynomial("z1 + z2^2", 2).unwrap(),
        ],
        "h",
    )
    .unwrap();
    println!("det Dh         = {}", henon.jacobian_det().unwrap());
    println!("volume-preserving: {}", henon.is_volume_preserving(1e-9));

    let squaring = PolyMap::new(
        vec![
            parse_polynomial("z1^2", 2).unwrap(),
            parse_polynomial("z2^2", 2).unwrap(),
        ],
        "f",
    )
    .unwrap();
    println!("det Df         = {}", squaring.jacobian_det().unwrap());

    // All roots of T_4(z) - 1 = 8z^4 - 8z^2, simultaneously.
    let t4_level = parse_polynomial("8*z1^4 - 8*z1^2", 1).unwrap();
    let roots = roots_1d(&t4_level, 1e-12, 500).unwrap();
    println!("roots of T4(z)-1:");
    for r in roots {
        println!("  {:.6}{:+.6}i", r.re, r.im);
    }
}
