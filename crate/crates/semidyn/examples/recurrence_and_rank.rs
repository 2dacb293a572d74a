//! Component diagnostics on the recurrent-origin semigroup: labeling,
//! recurrence verdicts, limit-map ranks, and the limit manifold.
//!
//! ```bash
//! cargo run --release --example recurrence_and_rank
//! ```

use num_complex::Complex64;
use semidyn::components::{
    estimate_limit_manifold, label_components, limit_rank, recurrence_test, ManifoldFit,
};
use semidyn::config::{bundled_config, ExperimentConfig};
use semidyn::gridscan::scan;

fn main() {
    let config = ExperimentConfig::from_json(bundled_config("recurrent_origin").unwrap()).unwrap();
    let semigroup = config.build_semigroup().unwrap();
    let region = config.build_region().unwrap();
    let classifier = config.classifier();

    let raster = scan(&semigroup, &region, &classifier).unwrap();
    let labeling = label_components(&raster);
    println!("components found: {}", labeling.component_count);

    let origin = labeling.locate(0.05, 0.05).expect("origin component");
    let report = recurrence_test(&semigroup, &labeling, origin, &classifier, 8).unwrap();
    println!(
        "origin component: {:?} ({} / {} sequences returned; {} distinct targets)",
        report.verdict, report.n_recurrent, report.n_sequences, report.distinct_target_components
    );
    println!("  {}", report.note);

    // The two generators behave differently on the same component: the
    // shear has limit rank 1 with limit manifold {z1 = 0}, while the
    // quadratic contraction collapses to the origin (rank 0).
    let samples: Vec<Vec<Complex64>> = (0..8)
        .map(|i| {
            let t = i as f64 / 8.0;
            vec![
                Complex64::new(0.08 + 0.04 * t, 0.02 * t),
                Complex64::new(0.45 + 0.1 * t, -0.03 * t),
            ]
        })
        .collect();
    for (idx, n) in [(1usize, 40usize), (0, 40)] {
        let gen = semigroup.generator(idx);
        let estimate = limit_rank(gen, &samples, n, 1e-6);
        println!(
            "limit rank of {} at iterate {}: r = {} (singular values {:?})",
            gen.label(),
            n,
            estimate.rank,
            estimate
                .singular_values
                .iter()
                .map(|s| format!("{s:.2e}"))
                .collect::<Vec<_>>()
        );
    }

    let manifold = estimate_limit_manifold(semigroup.generator(1), &samples, 160, 1e-6);
    println!(
        "limit manifold of {}: {} cloud points, period {:?}",
        semigroup.generator(1).label(),
        manifold.cloud.len(),
        manifold.period
    );
    match &manifold.fit {
        ManifoldFit::Point(p) => println!("  collapses to the point ({:.4}, {:.4})", p[0], p[1]),
        ManifoldFit::Line {
            base,
            direction,
            rms_residual,
        } => println!(
            "  best-fit complex line through ({:.2e}, {:.2}) with direction ({:.2e}, {:.2}) \
             [rms {rms_residual:.2e}]",
            base[0], base[1], direction[0], direction[1]
        ),
        ManifoldFit::FullDimension => println!("  no proper submanifold fits"),
    }
}
