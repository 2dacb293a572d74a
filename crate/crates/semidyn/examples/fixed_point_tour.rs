//! Fixed-point machinery: multistart Newton search, eigenvalue
//! classification, the covering relation at an expanding fixed point, and
//! backward orbits.
//!
//! ```bash
//! cargo run --release --example fixed_point_tour
//! ```

use num_complex::Complex64;
use semidyn::fixedpoints::{
    backward_orbit, covering_check, find_fixed_points, is_invertible_at, Polydisc,
};
use semidyn::polyalg::{parse_polynomial, PolyMap};

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
    // phi(z, w) = (w, z/4 - w^2): one attracting point, one saddle.
    let phi = map("phi", &["z2", "(0.25)*z1 - z2^2"]);
    let region = Polydisc::around_origin(2, 2.0);
    for record in find_fixed_points(&phi, &region, 200, 1e-10, 100) {
        println!(
            "fixed point ({:.4}, {:.4}): {} | eigenvalues {:?} | residual {:.1e}",
            record.location[0],
            record.location[1],
            record.kind,
            record
                .eigenvalues
                .iter()
                .map(|e| format!("{:.4}{:+.4}i", e.re, e.im))
                .collect::<Vec<_>>(),
            record.residual
        );
        println!(
            "  invertible there: {}",
            is_invertible_at(&phi, &record.location, 1e-9)
        );
    }

    // A repelling fixed point satisfies the covering relation: the polydisc
    // is compactly contained in its image.
    let expanding = map("psi", &["2*z1", "2*z2 + z1^2"]);
    let origin = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    let report = covering_check(&expanding, &origin, 0.25, 0.1, 128);
    println!(
        "covering check at the origin of psi: verdict {} \
         (min boundary image modulus {:.3}, preimage inside: {})",
        report.verdict, report.min_boundary_image_modulus, report.contains_preimage_of_center
    );
    println!("  {}", report.note);

    // Backward orbits of the squaring map are exact (triangular solving).
    let squaring = map("f", &["z1^2", "z2^2"]);
    let p = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
    let tree = backward_orbit(&squaring, &p, 2, &Polydisc::around_origin(2, 2.0), 10_000).unwrap();
    println!(
        "backward orbit of (1,1) under f: {} nodes over {} levels (truncated: {})",
        tree.total_nodes(),
        tree.levels.len(),
        tree.truncated
    );
    for (depth, level) in tree.levels.iter().enumerate() {
        println!("  depth {}: {} preimages", depth + 1, level.len());
    }
}
