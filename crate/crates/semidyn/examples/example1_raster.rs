//! Raster scan of the two-generator product-map semigroup against its
//! closed-form Julia set, with a PPM rendering.
//!
//! ```bash
//! cargo run --release --example example1_raster
//! ```
//!
//! Writes `example1.ppm` into the working directory. The full-resolution
//! acceptance run uses the bundled `example1_a2` config through the CLI:
//!
//! ```bash
//! cargo run --release -- scan --config crates/semidyn/configs/example1_a2.json
//! ```

use semidyn::config::{bundled_config, ExperimentConfig};
use semidyn::gridscan::{compare, render_ppm, scan, Region};

fn main() {
    let config = ExperimentConfig::from_json(bundled_config("example1_a2").unwrap()).unwrap();
    let semigroup = config.build_semigroup().unwrap();
    // Smaller grid than the acceptance run so the example finishes fast.
    let region = Region::ModulusPlane {
        low: [0.0, 0.0],
        high: [3.0, 2.0],
        nx: 100,
        ny: 100,
        phase_samples: 2,
    };
    let classifier = config.classifier();
    let t0 = std::time::Instant::now();
    let raster = scan(&semigroup, &region, &classifier).unwrap();
    println!("scanned {} cells in {:?}", raster.cells.len(), t0.elapsed());
    let counts = raster.counts();
    println!(
        "verdicts: bounded {}, escaping {}, julia {}, undetermined {}",
        counts[0], counts[1], counts[2], counts[3]
    );
    let reference = config.reference.as_ref().unwrap();
    let report = compare(&raster, reference, config.compare_band).unwrap();
    println!(
        "agreement with the closed-form Julia set: {:.4} over {} cells \
         ({} excluded near the boundary)",
        report.agreement.unwrap(),
        report.n_scored,
        report.n_band_excluded
    );
    render_ppm(&raster, std::path::Path::new("example1.ppm")).unwrap();
    println!("wrote example1.ppm (green bounded, blue escaping, black julia)");
}
