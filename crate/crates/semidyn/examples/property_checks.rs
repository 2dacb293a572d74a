//! Property checkers end to end: invariance of the Fatou/Julia partition,
//! finite-index raster equality, power-tuple independence, and the
//! volume-preserving divergence dichotomy.
//!
//! ```bash
//! cargo run --release --example property_checks
//! ```

use semidyn::classify::ClassifierConfig;
use semidyn::components::label_components;
use semidyn::config::{bundled_config, ExperimentConfig};
use semidyn::gridscan::{scan, Region};
use semidyn::polyalg::{parse_polynomial, PolyMap};
use semidyn::properties::{
    check_backward_invariance, check_commuting, check_finite_index_equality,
    check_forward_invariance, check_power_tuple_independence, check_volume_divergence,
};
use semidyn::semigroup::{PowerTuple, Semigroup};

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

fn show(report: &semidyn::properties::PropertyReport) {
    println!(
        "{:<22} {} ({} checked, {} violations, {} excluded)",
        report.property,
        if report.pass { "pass" } else { "FAIL" },
        report.n_checked,
        report.n_violations,
        report.n_excluded
    );
}

fn main() {
    let config = ExperimentConfig::from_json(bundled_config("example1_a2").unwrap()).unwrap();
    let semigroup = config.build_semigroup().unwrap();
    let classifier = ClassifierConfig {
        random_words: 100,
        ..config.classifier()
    };
    let region = Region::ModulusPlane {
        low: [0.0, 0.0],
        high: [3.0, 2.0],
        nx: 60,
        ny: 40,
        phase_samples: 2,
    };
    let raster = scan(&semigroup, &region, &classifier).unwrap();

    show(&check_forward_invariance(
        &semigroup,
        &raster,
        &classifier,
        80,
        config.compare_band,
        0.05,
    ));
    show(&check_backward_invariance(&semigroup, &raster, &classifier, 40, 0.05).unwrap());

    // The generators of this semigroup do not commute, so the power-tuple
    // corollary refuses to run on them.
    println!(
        "example1 generators commute: {}",
        check_commuting(semigroup.generator(0), semigroup.generator(1), 50, 1e-9)
    );

    // A commuting family where the corollary does apply.
    let powers = Semigroup::new(
        vec![map("f", &["z1^2", "z2^2"]), map("h", &["z1^3", "z2^3"])],
        "powers",
    )
    .unwrap();
    show(
        &check_power_tuple_independence(
            &powers,
            &PowerTuple(vec![1, 1]),
            &PowerTuple(vec![2, 3]),
            &region,
            &classifier,
            config.compare_band,
            0.05,
        )
        .unwrap(),
    );

    // Iterate-subsemigroup equality for the single squaring map.
    let squaring = Semigroup::new(vec![map("f", &["z1^2", "z2^2"])], "squaring").unwrap();
    show(
        &check_finite_index_equality(
            &squaring,
            &PowerTuple(vec![2]),
            &region,
            &classifier,
            config.compare_band,
            0.05,
        )
        .unwrap(),
    );

    // Volume-preserving dichotomy on the quadratic shear.
    let henon_config =
        ExperimentConfig::from_json(bundled_config("henon_volume").unwrap()).unwrap();
    let henon = henon_config.build_semigroup().unwrap();
    let henon_region = henon_config.build_region().unwrap();
    let henon_classifier = henon_config.classifier();
    let henon_raster = scan(&henon, &henon_region, &henon_classifier).unwrap();
    let labeling = label_components(&henon_raster);
    show(&check_volume_divergence(&henon, &labeling, 0, &henon_classifier, 6).unwrap());
}
