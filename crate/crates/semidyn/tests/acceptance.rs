//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with its measured numbers. Run with `--nocapture` to see
//! them:
//!
//! ```bash
//! cargo test -p semidyn --test acceptance -- --nocapture
//! ```

use num_complex::Complex64;
use semidyn::classify::{
    classifier_words, classify_point_with_words, ClassifierConfig, PointClass, WordSet,
};
use semidyn::components::{
    estimate_limit_manifold, label_components, limit_rank, recurrence_test, ManifoldFit,
    RecurrenceVerdict,
};
use semidyn::config::{bundled_config, ExperimentConfig, RunManifest};
use semidyn::fixedpoints::{find_fixed_points, FixedPointKind, Polydisc};
use semidyn::gridscan::{compare, render_ppm, scan, write_csv, Region};
use semidyn::polyalg::{parse_polynomial, PolyMap};
use semidyn::properties::{
    check_backward_invariance, check_commuting, check_finite_index_equality,
    check_forward_invariance, check_power_tuple_independence,
};
use semidyn::rng::{stream, KeyedRng};
use semidyn::semigroup::{enumerate_words, PowerTuple, Semigroup};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn load(name: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(bundled_config(name).unwrap()).unwrap()
}

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

struct Criterion {
    id: usize,
    name: &'static str,
}

impl Criterion {
    fn new(id: usize, name: &'static str) -> Self {
        Criterion { id, name }
    }

    fn check(&self, pass: bool, detail: String) {
        println!(
            "ACCEPTANCE {:02} ({}): {} — {detail}",
            self.id,
            self.name,
            if pass { "PASS" } else { "FAIL" }
        );
        assert!(pass, "criterion {} failed: {detail}", self.id);
    }
}

#[test]
fn acceptance_01_example1_raster_agreement() {
    let criterion = Criterion::new(1, "Example-1 raster vs closed form");
    let config = load("example1_a2");
    let semigroup = config.build_semigroup().unwrap();
    let region = config.build_region().unwrap();
    assert_eq!(region.resolution(), (200, 200));
    let started = std::time::Instant::now();
    let raster = scan(&semigroup, &region, &config.classifier()).unwrap();
    let elapsed = started.elapsed();
    let reference = config.reference.as_ref().unwrap();
    let report = compare(&raster, reference, 0.05).unwrap();
    let agreement = report.agreement.expect("cells scored");
    criterion.check(
        agreement >= 0.90 && elapsed.as_secs() <= 300,
        format!(
            "agreement {agreement:.4} over {} scored cells in {elapsed:?} (gate 0.90, 5 min)",
            report.n_scored
        ),
    );
}

#[test]
fn acceptance_02_single_map_raster_agreement() {
    let criterion = Criterion::new(2, "single squaring raster vs closed form");
    let config = load("single_squaring");
    let semigroup = config.build_semigroup().unwrap();
    let region = config.build_region().unwrap();
    assert_eq!(region.resolution(), (200, 200));
    let raster = scan(&semigroup, &region, &config.classifier()).unwrap();
    let reference = config.reference.as_ref().unwrap();
    let report = compare(&raster, reference, 0.05).unwrap();
    let agreement = report.agreement.expect("cells scored");
    criterion.check(
        agreement >= 0.90,
        format!(
            "agreement {agreement:.4} over {} scored cells (gate 0.90)",
            report.n_scored
        ),
    );
}

#[test]
fn acceptance_03_chebyshev_slice() {
    let criterion = Criterion::new(3, "Chebyshev slice traces the segment");
    let config = load("chebyshev_N4");
    let semigroup = config.build_semigroup().unwrap();
    let region = config.build_region().unwrap();
    assert_eq!(region.resolution(), (200, 100));
    let raster = scan(&semigroup, &region, &config.classifier()).unwrap();
    let reference = config.reference.as_ref().unwrap();
    let (nx, ny) = region.resolution();
    let mut julia_near = 0usize;
    let mut julia_total = 0usize;
    let mut far_fatou = 0usize;
    let mut far_total = 0usize;
    for iy in 0..ny {
        for ix in 0..nx {
            let (x, y) = region.cell_center(ix, iy);
            let z = [c(x, y), c(0.5, 0.0)];
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
    let precision = julia_near as f64 / julia_total.max(1) as f64;
    let far_rate = far_fatou as f64 / far_total.max(1) as f64;
    // The truncation caveat must reach the manifest.
    let manifest = RunManifest::new(&config, Some(&raster));
    let caveat = manifest.notes.iter().any(|n| n.contains("truncated"));
    criterion.check(
        julia_total > 0 && precision >= 0.90 && far_rate >= 0.90 && caveat,
        format!(
            "julia within 0.1: {julia_near}/{julia_total} = {precision:.3}; \
             far cells Fatou: {far_fatou}/{far_total} = {far_rate:.3}; \
             manifest caveat recorded: {caveat} (gates 0.90 / 0.90)"
        ),
    );
}

#[test]
fn acceptance_04_fixed_point_suite() {
    let criterion = Criterion::new(4, "fixed points of (w, z/4 - w^2)");
    let phi = map("phi1", &["z2", "(0.25)*z1 - z2^2"]);
    let region = Polydisc::around_origin(2, 2.0);
    let records = find_fixed_points(&phi, &region, 300, 1e-10, 120);
    let two = records.len() == 2;
    let origin = records
        .iter()
        .find(|r| semidyn::semigroup::sup_norm(&r.location) < 1e-8);
    let saddle = records.iter().find(|r| {
        (r.location[0] - c(-0.75, 0.0)).norm() < 1e-8
            && (r.location[1] - c(-0.75, 0.0)).norm() < 1e-8
    });
    // Independent oracle for the saddle eigenvalues: the quadratic formula
    // on x^2 - 1.5x - 0.25.
    let disc = (1.5f64 * 1.5 + 1.0).sqrt();
    let expected = [(1.5 + disc) / 2.0, (1.5 - disc) / 2.0];
    let origin_ok = origin.is_some_and(|r| {
        r.kind == FixedPointKind::Attracting
            && r.eigenvalues.iter().all(|e| (e.norm() - 0.5).abs() <= 1e-6)
    });
    let saddle_ok = saddle.is_some_and(|r| {
        r.kind == FixedPointKind::Saddle
            && expected.iter().all(|&want| {
                r.eigenvalues
                    .iter()
                    .any(|e| (e - c(want, 0.0)).norm() <= 1e-6)
            })
    });
    criterion.check(
        two && origin_ok && saddle_ok,
        format!(
            "{} records; origin attracting with |eig| = 0.5: {origin_ok}; \
             saddle eigenvalues within 1e-6 of quadratic-formula roots: {saddle_ok}",
            records.len()
        ),
    );
}

#[test]
fn acceptance_05_limit_diagnostics_and_recurrence() {
    let criterion = Criterion::new(5, "limit rank, limit manifold, recurrence");
    let phi1 = map("phi1", &["z2", "(0.25)*z1 - z2^2"]);
    let phi2 = map("phi2", &["z1*z2", "z2"]);

    let near_shear: Vec<Vec<Complex64>> = (0..8)
        .map(|i| {
            let t = i as f64 / 8.0;
            vec![c(0.08 + 0.04 * t, 0.02 * t), c(0.45 + 0.1 * t, -0.03 * t)]
        })
        .collect();
    let rank_shear = limit_rank(&phi2, &near_shear, 40, 1e-6);
    let manifold = estimate_limit_manifold(&phi2, &near_shear, 40, 1e-6);
    let max_z_coord = manifold
        .cloud
        .iter()
        .map(|p| p[0].norm())
        .fold(0.0, f64::max);
    let line_ok =
        matches!(&manifold.fit, ManifoldFit::Line { direction, .. } if direction[0].norm() < 1e-6);

    let near_origin: Vec<Vec<Complex64>> = (0..8)
        .map(|i| {
            let t = i as f64 / 8.0;
            vec![c(0.03 * t, 0.02), c(0.04, 0.03 * t)]
        })
        .collect();
    let rank_attract = limit_rank(&phi1, &near_origin, 40, 1e-6);

    let config = load("recurrent_origin");
    let semigroup = config.build_semigroup().unwrap();
    let raster = scan(
        &semigroup,
        &config.build_region().unwrap(),
        &config.classifier(),
    )
    .unwrap();
    let labeling = label_components(&raster);
    let origin_component = labeling.locate(0.05, 0.05).expect("origin component");
    let recurrence = recurrence_test(
        &semigroup,
        &labeling,
        origin_component,
        &config.classifier(),
        8,
    )
    .unwrap();

    criterion.check(
        rank_shear.rank == 1
            && !manifold.cloud.is_empty()
            && max_z_coord <= 1e-6
            && line_ok
            && rank_attract.rank == 0
            && recurrence.verdict == RecurrenceVerdict::RecurrentLikely,
        format!(
            "r(phi2) = {} (want 1); cloud max |z1| = {max_z_coord:.2e} (gate 1e-6, line fit {line_ok}); \
             r(phi1) = {} (want 0); recurrence verdict {:?}",
            rank_shear.rank, rank_attract.rank, recurrence.verdict
        ),
    );
}

#[test]
fn acceptance_06_finite_index_equality() {
    let criterion = Criterion::new(6, "finite-index raster equality");
    let squaring = Semigroup::new(vec![map("f", &["z1^2", "z2^2"])], "squaring").unwrap();
    let cfg = ClassifierConfig {
        seed: 20240606,
        ..ClassifierConfig::default()
    };
    let region = Region::ModulusPlane {
        low: [0.0, 0.0],
        high: [3.0, 2.0],
        nx: 100,
        ny: 100,
        phase_samples: 2,
    };
    let report =
        check_finite_index_equality(&squaring, &PowerTuple(vec![2]), &region, &cfg, 0.05, 0.05)
            .unwrap();
    let rate = report.n_violations as f64 / report.n_checked.max(1) as f64;
    criterion.check(
        report.pass,
        format!(
            "raster disagreement {rate:.4} over {} off-band cells (gate 0.05)",
            report.n_checked
        ),
    );
}

#[test]
fn acceptance_07_power_tuple_independence() {
    let criterion = Criterion::new(7, "power-tuple independence");
    let powers = Semigroup::new(
        vec![map("f", &["z1^2", "z2^2"]), map("h", &["z1^3", "z2^3"])],
        "powers",
    )
    .unwrap();
    let commuting = check_commuting(powers.generator(0), powers.generator(1), 64, 1e-9);
    let cfg = ClassifierConfig {
        seed: 20240607,
        ..ClassifierConfig::default()
    };
    let region = Region::ModulusPlane {
        low: [0.0, 0.0],
        high: [3.0, 2.0],
        nx: 100,
        ny: 100,
        phase_samples: 2,
    };
    let report = check_power_tuple_independence(
        &powers,
        &PowerTuple(vec![1, 1]),
        &PowerTuple(vec![2, 3]),
        &region,
        &cfg,
        0.05,
        0.05,
    )
    .unwrap();
    let rate = report.n_violations as f64 / report.n_checked.max(1) as f64;
    criterion.check(
        commuting && report.pass,
        format!(
            "commuting check {commuting}; raster disagreement {rate:.4} over {} cells (gate 0.05)",
            report.n_checked
        ),
    );
}

#[test]
fn acceptance_08_invariance_suite() {
    let criterion = Criterion::new(8, "forward/backward invariance on Example 1");
    let config = load("example1_a2");
    let semigroup = config.build_semigroup().unwrap();
    let cfg = config.classifier();
    let region = Region::ModulusPlane {
        low: [0.0, 0.0],
        high: [3.0, 2.0],
        nx: 100,
        ny: 100,
        phase_samples: 2,
    };
    let raster = scan(&semigroup, &region, &cfg).unwrap();
    let forward = check_forward_invariance(&semigroup, &raster, &cfg, 120, 0.05, 0.05);
    let backward = check_backward_invariance(&semigroup, &raster, &cfg, 60, 0.05).unwrap();
    let forward_rate = forward.n_violations as f64 / forward.n_checked.max(1) as f64;
    let backward_rate = backward.n_violations as f64 / backward.n_checked.max(1) as f64;
    criterion.check(
        forward.pass && backward.pass,
        format!(
            "forward violations {forward_rate:.4} ({} checked); \
             backward violations {backward_rate:.4} ({} checked) (gates 0.05)",
            forward.n_checked, backward.n_checked
        ),
    );
}

#[test]
fn acceptance_09_sampler_oracle_equivalence() {
    let criterion = Criterion::new(9, "exhaustive vs random sampler equivalence");
    let config = load("example1_a2");
    let semigroup = config.build_semigroup().unwrap();
    let cfg = config.classifier();
    let reference = config.reference.clone().unwrap();
    // Exhaustive words of length <= 8 versus the default random sampler
    // (N = 200, L = 12).
    let mut exhaustive = Vec::new();
    for len in 1..=8 {
        exhaustive.extend(enumerate_words(2, len).unwrap());
    }
    let exhaustive = WordSet::from_words(exhaustive);
    let random = classifier_words(&semigroup, &cfg);
    let mut rng = KeyedRng::at(20240609, stream::POINT_SAMPLES, 0);
    let mut agree = 0usize;
    let mut total = 0usize;
    while total < 100 {
        let z = [
            Complex64::from_polar(
                rng.next_range_f64(0.0, 3.0),
                rng.next_range_f64(0.0, 2.0 * std::f64::consts::PI),
            ),
            Complex64::from_polar(
                rng.next_range_f64(0.0, 2.0),
                rng.next_range_f64(0.0, 2.0 * std::f64::consts::PI),
            ),
        ];
        if reference.dist_to_boundary(&z) <= 0.05 {
            continue;
        }
        total += 1;
        let (a, _) = classify_point_with_words(&semigroup, &z, &cfg, &exhaustive);
        let (b, _) = classify_point_with_words(&semigroup, &z, &cfg, &random);
        // Agreement at the Julia/Fatou level; the two Fatou kinds match.
        let same = match (a, b) {
            (PointClass::JuliaCandidate, PointClass::JuliaCandidate) => true,
            (x, y) if x.is_fatou() && y.is_fatou() => true,
            (PointClass::Undetermined, PointClass::Undetermined) => true,
            _ => false,
        };
        if same {
            agree += 1;
        }
    }
    criterion.check(
        agree * 100 >= total * 95,
        format!(
            "agreement {agree}/{total} on points beyond 0.05 of the reference boundary (gate 95%)"
        ),
    );
}

#[test]
fn acceptance_10_scan_determinism_across_workers() {
    let criterion = Criterion::new(10, "byte-identical outputs at any worker count");
    let config = load("recurrent_origin");
    let semigroup = config.build_semigroup().unwrap();
    let region = config.build_region().unwrap();
    let cfg = config.classifier();
    let dir = std::env::temp_dir().join("semidyn_acceptance_determinism");
    std::fs::create_dir_all(&dir).unwrap();
    let mut blobs: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    for workers in [1usize, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap();
        let raster = pool.install(|| scan(&semigroup, &region, &cfg).unwrap());
        let ppm = dir.join(format!("w{workers}.ppm"));
        let csv = dir.join(format!("w{workers}.csv"));
        render_ppm(&raster, &ppm).unwrap();
        write_csv(&raster, &csv).unwrap();
        blobs.push((std::fs::read(&ppm).unwrap(), std::fs::read(&csv).unwrap()));
    }
    let identical = blobs.windows(2).all(|w| w[0] == w[1]);
    criterion.check(
        identical,
        format!(
            "PPM/CSV byte-identical across worker counts 1, 2, 4 ({} byte PPM)",
            blobs[0].0.len()
        ),
    );
}
