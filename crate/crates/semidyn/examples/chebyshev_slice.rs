//! Complex-slice scan of the truncated Chebyshev family: the Julia set of
//! the full family is the real segment [-1, 1] times the closed unit disk,
//! and the slice at z2 = 0.5 should trace the segment.
//!
//! ```bash
//! cargo run --release --example chebyshev_slice
//! ```

use num_complex::Complex64;
use semidyn::classify::PointClass;
use semidyn::config::{bundled_config, ExperimentConfig};
use semidyn::gridscan::{render_ppm, scan, Region};

fn main() {
    let config = ExperimentConfig::from_json(bundled_config("chebyshev_N4").unwrap()).unwrap();
    let semigroup = config.build_semigroup().unwrap();
    println!(
        "truncated family: {}",
        semigroup
            .generators()
            .iter()
            .map(|g| g.label().to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    for note in config.notes() {
        println!("note: {note}");
    }
    // Half the acceptance resolution to keep the example snappy.
    let region = Region::ComplexSlice {
        var: 0,
        low: [-2.0, -1.0],
        high: [2.0, 1.0],
        nx: 100,
        ny: 50,
        fixed: vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
    };
    let classifier = config.classifier();
    let raster = scan(&semigroup, &region, &classifier).unwrap();
    let reference = config.reference.as_ref().unwrap();

    let (nx, ny) = region.resolution();
    let mut julia_near = 0usize;
    let mut julia_total = 0usize;
    let mut far_fatou = 0usize;
    let mut far_total = 0usize;
    for iy in 0..ny {
        for ix in 0..nx {
            let (x, y) = region.cell_center(ix, iy);
            let z = [Complex64::new(x, y), Complex64::new(0.5, 0.0)];
            let dist = reference.dist_to_set(&z);
            let class = raster.cell(ix, iy);
            if class == PointClass::JuliaCandidate {
                julia_total += 1;
                if dist <= 0.1 {
                    julia_near += 1;
                }
            }
            if dist > 0.15 {
                far_total += 1;
                if class.is_fatou() {
                    far_fatou += 1;
                }
            }
        }
    }
    println!(
        "Julia cells within 0.1 of the segment: {julia_near}/{julia_total} ({:.1}%)",
        100.0 * julia_near as f64 / julia_total.max(1) as f64
    );
    println!(
        "cells farther than 0.15 that are Fatou: {far_fatou}/{far_total} ({:.1}%)",
        100.0 * far_fatou as f64 / far_total.max(1) as f64
    );
    render_ppm(&raster, std::path::Path::new("chebyshev.ppm")).unwrap();
    println!("wrote chebyshev.ppm");
}
