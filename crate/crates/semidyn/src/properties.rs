//! Executable checkers for the structural properties of Fatou/Julia sets:
//! forward/backward invariance, finite-index raster equality, power-tuple
//! independence, commutation, boundary containment, and the
//! volume-preserving divergence dichotomy.
//!
//! Set-level statements are tested on samples with explicit violation-rate
//! thresholds; the propositions predict zero violations in the limit, and
//! the thresholds absorb discretization error. Every witness embeds the
//! seed data needed to replay its violation.

use crate::classify::{classify_point, ClassifierConfig, PointClass};
use crate::components::{recurrence_test, ComponentLabeling, RecurrenceVerdict};
use crate::fixedpoints::{backward_orbit, FixedPointError, Polydisc};
use crate::gridscan::{scan, GridError, Raster, Region};
use crate::polyalg::PolyMap;
use crate::rng::{fnv1a64, mix, stream, KeyedRng};
use crate::semigroup::{sup_norm, PowerTuple, Semigroup, SemigroupError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PropertiesError {
    #[error("generators {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("generator {0} is not volume preserving")]
    NotVolumePreserving(usize),
    #[error("no generator admits exact preimage solving")]
    PreimageUnavailable,
    #[error("component {0} has no cells")]
    EmptyComponent(usize),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    FixedPoint(#[from] FixedPointError),
}

/// A reproducible violation: re-running the checker with the embedded seed
/// re-derives the same sample point and the same outcome.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub seed: u64,
    pub sample_index: u64,
    pub point: Vec<Complex64>,
    pub generator: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub n_checked: usize,
    pub n_violations: usize,
    pub n_excluded: usize,
    pub threshold: f64,
    pub pass: bool,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl PropertyReport {
    fn new(property: &str, threshold: f64) -> Self {
        PropertyReport {
            property: property.into(),
            n_checked: 0,
            n_violations: 0,
            n_excluded: 0,
            threshold,
            pass: true,
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn violation(&mut self, witness: Witness) {
        self.n_violations += 1;
        if self.witnesses.len() < 8 {
            self.witnesses.push(witness);
        }
    }

    fn finish(mut self) -> Self {
        let rate = if self.n_checked == 0 {
            0.0
        } else {
            self.n_violations as f64 / self.n_checked as f64
        };
        self.pass = rate <= self.threshold;
        self
    }
}

/// Default violation-rate threshold for the invariance checks.
pub const DEFAULT_VIOLATION_THRESHOLD: f64 = 0.05;
/// Default disagreement threshold for raster-equality checks.
pub const DEFAULT_DISAGREEMENT_THRESHOLD: f64 = 0.05;

/// Mask of cells whose center lies within `band` (sup metric on grid
/// coordinates) of some JuliaCandidate cell center.
fn near_julia_mask(raster: &Raster, band: f64) -> Vec<bool> {
    let (nx, ny) = raster.region.resolution();
    let (low, high) = raster.region.bounds();
    let cell_w = (high[0] - low[0]) / nx as f64;
    let cell_h = (high[1] - low[1]) / ny as f64;
    let wx = (band / cell_w).ceil() as isize;
    let wy = (band / cell_h).ceil() as isize;
    let mut mask = vec![false; nx * ny];
    for iy in 0..ny as isize {
        for ix in 0..nx as isize {
            let idx = iy as usize * nx + ix as usize;
            'window: for dy in -wy..=wy {
                for dx in -wx..=wx {
                    let (jx, jy) = (ix + dx, iy + dy);
                    if jx < 0 || jy < 0 || jx >= nx as isize || jy >= ny as isize {
                        continue;
                    }
                    if raster.cells[jy as usize * nx + jx as usize] == PointClass::JuliaCandidate
                        && (dx.abs() as f64 * cell_w).max(dy.abs() as f64 * cell_h) <= band
                    {
                        mask[idx] = true;
                        break 'window;
                    }
                }
            }
        }
    }
    mask
}

/// A concrete point for a raster cell: ModulusPlane cells get seeded phases,
/// slice cells their centers.
fn cell_point(region: &Region, ix: usize, iy: usize, seed: u64, index: u64) -> Vec<Complex64> {
    let (x, y) = region.cell_center(ix, iy);
    match region {
        Region::ModulusPlane { .. } => {
            let mut rng = KeyedRng::at(seed, stream::POINT_SAMPLES, index);
            let theta1 = rng.next_range_f64(0.0, 2.0 * std::f64::consts::PI);
            let theta2 = rng.next_range_f64(0.0, 2.0 * std::f64::consts::PI);
            vec![
                Complex64::from_polar(x, theta1),
                Complex64::from_polar(y, theta2),
            ]
        }
        Region::ComplexSlice { var, fixed, .. } => {
            let mut z = fixed.clone();
            z[*var] = Complex64::new(x, y);
            z
        }
    }
}

/// Forward invariance (Fatou version): a Fatou-classified point off the
/// critical locus of a generator must not map to a JuliaCandidate point.
/// Cells within `band` of detected Julia cells are excluded.
pub fn check_forward_invariance(
    semigroup: &Semigroup,
    raster: &Raster,
    cfg: &ClassifierConfig,
    n_samples: usize,
    band: f64,
    threshold: f64,
) -> PropertyReport {
    let mut report = PropertyReport::new("forward-invariance", threshold);
    let seed = mix(cfg.seed, fnv1a64(b"forward-invariance"));
    let mask = near_julia_mask(raster, band);
    let (nx, ny) = raster.region.resolution();
    let fatou_cells: Vec<(usize, usize)> = (0..nx * ny)
        .filter(|&idx| raster.cells[idx].is_fatou() && !mask[idx])
        .map(|idx| (idx % nx, idx / nx))
        .collect();
    report.n_excluded = (0..nx * ny)
        .filter(|&idx| raster.cells[idx].is_fatou() && mask[idx])
        .count();
    report.notes.push(format!(
        "{} Fatou cells within the {band} band around detected Julia cells were excluded",
        report.n_excluded
    ));
    let stride = (fatou_cells.len() / n_samples.max(1)).max(1);
    for (i, &(ix, iy)) in fatou_cells
        .iter()
        .step_by(stride)
        .take(n_samples)
        .enumerate()
    {
        let z = cell_point(&raster.region, ix, iy, seed, i as u64);
        for (gi, gen) in semigroup.generators().iter().enumerate() {
            if gen.jacobian_at(&z).det().norm() <= 1e-8 {
                continue;
            }
            let image = match gen.eval(&z) {
                Ok(v) => v,
                Err(_) => continue,
            };
            report.n_checked += 1;
            let (class, _) = classify_point(semigroup, &image, cfg);
            if class == PointClass::JuliaCandidate {
                report.violation(Witness {
                    seed,
                    sample_index: i as u64,
                    point: z.clone(),
                    generator: Some(gi),
                    detail: format!("Fatou cell ({ix},{iy}) mapped into a JuliaCandidate verdict"),
                });
            }
        }
    }
    report.finish()
}

/// Backward invariance of the Julia set: a JuliaCandidate point in the range
/// of a generator must have at least one JuliaCandidate preimage. Violation
/// is declared only when every found preimage classifies Fatou.
pub fn check_backward_invariance(
    semigroup: &Semigroup,
    raster: &Raster,
    cfg: &ClassifierConfig,
    n_samples: usize,
    threshold: f64,
) -> Result<PropertyReport, PropertiesError> {
    let mut report = PropertyReport::new("backward-invariance", threshold);
    let seed = mix(cfg.seed, fnv1a64(b"backward-invariance"));
    let exact_generators: Vec<usize> = (0..semigroup.num_generators())
        .filter(|&i| semigroup.generator(i).is_triangular())
        .collect();
    if exact_generators.is_empty() {
        return Err(PropertiesError::PreimageUnavailable);
    }
    let (nx, ny) = raster.region.resolution();
    let julia_cells: Vec<(usize, usize)> = (0..nx * ny)
        .filter(|&idx| raster.cells[idx] == PointClass::JuliaCandidate)
        .map(|idx| (idx % nx, idx / nx))
        .collect();
    if julia_cells.is_empty() {
        report.notes.push("no JuliaCandidate cells to check".into());
        return Ok(report.finish());
    }
    let stride = (julia_cells.len() / n_samples.max(1)).max(1);
    for (i, &(ix, iy)) in julia_cells
        .iter()
        .step_by(stride)
        .take(n_samples)
        .enumerate()
    {
        let q = cell_point(&raster.region, ix, iy, seed, i as u64);
        for &gi in &exact_generators {
            let gen = semigroup.generator(gi);
            let radius = 4.0 * (1.0 + sup_norm(&q));
            let region = Polydisc::around_origin(semigroup.dim(), radius);
            let tree = backward_orbit(gen, &q, 1, &region, 20_000)?;
            let preimages = tree.levels.first().cloned().unwrap_or_default();
            if preimages.is_empty() {
                continue;
            }
            report.n_checked += 1;
            let any_julia = preimages
                .iter()
                .any(|p| classify_point(semigroup, p, cfg).0 == PointClass::JuliaCandidate);
            if !any_julia {
                report.violation(Witness {
                    seed,
                    sample_index: i as u64,
                    point: q.clone(),
                    generator: Some(gi),
                    detail: format!(
                        "all {} preimages of Julia cell ({ix},{iy}) classified Fatou",
                        preimages.len()
                    ),
                });
            }
        }
    }
    Ok(report.finish())
}

/// Numeric commutation test on seeded points of the unit bidisc.
pub fn check_commuting(f: &PolyMap, h: &PolyMap, n_points: usize, tol: f64) -> bool {
    let k = f.dim();
    let mut rng = KeyedRng::at(0xC0_55E7, stream::POINT_SAMPLES, 0);
    for _ in 0..n_points {
        let z: Vec<Complex64> = (0..k)
            .map(|_| Complex64::new(rng.next_range_f64(-1.0, 1.0), rng.next_range_f64(-1.0, 1.0)))
            .collect();
        let (Ok(hz), Ok(fz)) = (h.eval(&z), f.eval(&z)) else {
            return false;
        };
        let (Ok(fhz), Ok(hfz)) = (f.eval(&hz), h.eval(&fz)) else {
            return false;
        };
        let scale = 1.0 + sup_norm(&fhz);
        let diff = fhz
            .iter()
            .zip(&hfz)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if diff > tol * scale {
            return false;
        }
    }
    true
}

fn compare_rasters_off_band(
    property: &str,
    a: &Raster,
    b: &Raster,
    band: f64,
    threshold: f64,
) -> PropertyReport {
    let mut report = PropertyReport::new(property, threshold);
    let mask_a = near_julia_mask(a, band);
    let mask_b = near_julia_mask(b, band);
    for idx in 0..a.cells.len() {
        if mask_a[idx] || mask_b[idx] {
            report.n_excluded += 1;
            continue;
        }
        let (ca, cb) = (a.cells[idx], b.cells[idx]);
        if !ca.is_decided() || !cb.is_decided() {
            report.n_excluded += 1;
            continue;
        }
        report.n_checked += 1;
        let julia_a = ca == PointClass::JuliaCandidate;
        let julia_b = cb == PointClass::JuliaCandidate;
        if julia_a != julia_b {
            let (nx, _) = a.region.resolution();
            let (x, y) = a.region.cell_center(idx % nx, idx / nx);
            report.violation(Witness {
                seed: 0,
                sample_index: idx as u64,
                point: vec![Complex64::new(x, 0.0), Complex64::new(y, 0.0)],
                generator: None,
                detail: format!("cell ({},{}) verdicts {ca} vs {cb}", idx % nx, idx / nx),
            });
        }
    }
    report.notes.push(format!(
        "{} cells excluded (band or undecided)",
        report.n_excluded
    ));
    report.finish()
}

/// Finite-index equality: the Fatou/Julia rasters of `G` and of its power
/// subsemigroup `H = <phi_i^{l_i}>` must agree off the band around each
/// raster's own Julia cells.
pub fn check_finite_index_equality(
    semigroup: &Semigroup,
    l: &PowerTuple,
    region: &Region,
    cfg: &ClassifierConfig,
    band: f64,
    threshold: f64,
) -> Result<PropertyReport, PropertiesError> {
    let power = semigroup.power_subsemigroup(l)?;
    let raster_g = scan(semigroup, region, cfg)?;
    let raster_h = scan(&power, region, cfg)?;
    let mut report =
        compare_rasters_off_band("finite-index", &raster_g, &raster_h, band, threshold);
    report
        .notes
        .push(format!("power tuple {:?} against the base semigroup", l.0));
    Ok(report)
}

/// Power-tuple independence for commuting generators: rasters of `G_l` and
/// `G_l'` must agree off band. Errors out when the generators do not
/// commute.
pub fn check_power_tuple_independence(
    semigroup: &Semigroup,
    l: &PowerTuple,
    l_alt: &PowerTuple,
    region: &Region,
    cfg: &ClassifierConfig,
    band: f64,
    threshold: f64,
) -> Result<PropertyReport, PropertiesError> {
    let m = semigroup.num_generators();
    for i in 0..m {
        for j in i + 1..m {
            if !check_commuting(semigroup.generator(i), semigroup.generator(j), 64, 1e-9) {
                return Err(PropertiesError::NotCommuting(i, j));
            }
        }
    }
    let g_l = semigroup.power_subsemigroup(l)?;
    let g_alt = semigroup.power_subsemigroup(l_alt)?;
    let raster_a = scan(&g_l, region, cfg)?;
    let raster_b = scan(&g_alt, region, cfg)?;
    let mut report = compare_rasters_off_band("power-tuple", &raster_a, &raster_b, band, threshold);
    report
        .notes
        .push(format!("tuples {:?} vs {:?}", l.0, l_alt.0));
    Ok(report)
}

/// Boundary containment: a boundary cell of a Fatou component must map,
/// under some generator, to within one cell of the boundary of the target
/// component of that generator.
pub fn check_boundary_containment(
    semigroup: &Semigroup,
    labeling: &ComponentLabeling,
    cfg: &ClassifierConfig,
    n_boundary_cells: usize,
    threshold: f64,
) -> PropertyReport {
    let mut report = PropertyReport::new("boundary-containment", threshold);
    let seed = mix(cfg.seed, fnv1a64(b"boundary-containment"));
    let (nx, ny) = labeling.region.resolution();
    let is_boundary = |ix: usize, iy: usize| -> bool {
        let l = labeling.label_at(ix, iy);
        if l < 0 {
            return false;
        }
        let mut boundary = false;
        if ix > 0 && labeling.label_at(ix - 1, iy) != l {
            boundary = true;
        }
        if ix + 1 < nx && labeling.label_at(ix + 1, iy) != l {
            boundary = true;
        }
        if iy > 0 && labeling.label_at(ix, iy - 1) != l {
            boundary = true;
        }
        if iy + 1 < ny && labeling.label_at(ix, iy + 1) != l {
            boundary = true;
        }
        boundary
    };
    let boundary_cells: Vec<(usize, usize)> = (0..nx * ny)
        .map(|idx| (idx % nx, idx / nx))
        .filter(|&(ix, iy)| is_boundary(ix, iy))
        .collect();
    if boundary_cells.is_empty() {
        report
            .notes
            .push("no boundary cells in the labeling".into());
        return report.finish();
    }
    // Per (component, generator): the component that interior samples map
    // into (majority vote).
    let mut target_cache: std::collections::HashMap<(usize, usize), Option<usize>> =
        std::collections::HashMap::new();
    let mut target_of = |comp: usize, gi: usize| -> Option<usize> {
        *target_cache.entry((comp, gi)).or_insert_with(|| {
            let cells = &labeling.cells[comp];
            let stride = (cells.len() / 12).max(1);
            let mut votes: std::collections::HashMap<usize, usize> =
                std::collections::HashMap::new();
            for (i, &(ix, iy)) in cells.iter().step_by(stride).take(12).enumerate() {
                let z = cell_point(&labeling.region, ix, iy, mix(seed, gi as u64), i as u64);
                if let Ok(image) = semigroup.generator(gi).eval(&z) {
                    if let Some(t) = labeling.locate_point(&image) {
                        *votes.entry(t).or_insert(0) += 1;
                    }
                }
            }
            votes
                .into_iter()
                .max_by_key(|&(t, count)| (count, usize::MAX - t))
                .map(|(t, _)| t)
        })
    };
    // The classifier blurs true boundaries by roughly its coarse-ring
    // radius, and the map magnifies that offset; the proximity window is
    // scaled accordingly rather than fixed at one cell.
    let (low, high) = labeling.region.bounds();
    let cell_min = ((high[0] - low[0]) / nx as f64).min((high[1] - low[1]) / ny as f64);
    let window = 1 + (2.0 * cfg.tear_radius / cell_min).ceil() as i64;
    report.notes.push(format!(
        "proximity window {window} cells (boundary blur ~ tear_radius {})",
        cfg.tear_radius
    ));
    let stride = (boundary_cells.len() / n_boundary_cells.max(1)).max(1);
    for (i, &(ix, iy)) in boundary_cells
        .iter()
        .step_by(stride)
        .take(n_boundary_cells)
        .enumerate()
    {
        let comp = labeling.label_at(ix, iy) as usize;
        let p = cell_point(&labeling.region, ix, iy, seed, i as u64);
        let mut satisfied = false;
        let mut verifiable = false;
        for gi in 0..semigroup.num_generators() {
            let Some(target) = target_of(comp, gi) else {
                continue;
            };
            let Ok(image) = semigroup.generator(gi).eval(&p) else {
                continue;
            };
            let (x, y) = labeling.region.project(&image);
            let Some((jx, jy)) = labeling.region.locate(x, y) else {
                continue;
            };
            verifiable = true;
            'probe: for dy in -window..=window {
                for dx in -window..=window {
                    let (cx, cy) = (jx as i64 + dx, jy as i64 + dy);
                    if cx < 0 || cy < 0 || cx >= nx as i64 || cy >= ny as i64 {
                        continue;
                    }
                    let (cx, cy) = (cx as usize, cy as usize);
                    if labeling.label_at(cx, cy) == target as i64 && is_boundary(cx, cy) {
                        satisfied = true;
                        break 'probe;
                    }
                }
            }
            if satisfied {
                break;
            }
        }
        if !verifiable {
            report.n_excluded += 1;
            continue;
        }
        report.n_checked += 1;
        if !satisfied {
            report.violation(Witness {
                seed,
                sample_index: i as u64,
                point: p,
                generator: None,
                detail: format!(
                    "boundary cell ({ix},{iy}) of component {comp} maps near no target boundary"
                ),
            });
        }
    }
    report
        .notes
        .push("approximate raster check by construction".into());
    report.finish()
}

/// The volume-preserving dichotomy: on an invariant component, either the
/// component is recurrent or some sequence of the semigroup diverges to
/// infinity. Passes when a divergent witness sequence is found or the
/// recurrence test reports RecurrentLikely.
pub fn check_volume_divergence(
    semigroup: &Semigroup,
    labeling: &ComponentLabeling,
    component_id: usize,
    cfg: &ClassifierConfig,
    n_sequences: usize,
) -> Result<PropertyReport, PropertiesError> {
    for (gi, gen) in semigroup.generators().iter().enumerate() {
        if !gen.is_volume_preserving(1e-9) {
            return Err(PropertiesError::NotVolumePreserving(gi));
        }
    }
    if component_id >= labeling.component_count {
        return Err(PropertiesError::EmptyComponent(component_id));
    }
    let mut report = PropertyReport::new("volume-divergence", 0.0);
    let seed = mix(cfg.seed, fnv1a64(b"volume-divergence"));
    let cells = &labeling.cells[component_id];
    if cells.is_empty() {
        return Err(PropertiesError::EmptyComponent(component_id));
    }
    let stride = (cells.len() / 16).max(1);
    let samples: Vec<Vec<Complex64>> = cells
        .iter()
        .step_by(stride)
        .take(16)
        .enumerate()
        .map(|(i, &(ix, iy))| cell_point(&labeling.region, ix, iy, seed, i as u64))
        .collect();
    let max_len = 96usize;
    let mut divergent_witness = None;
    'sequences: for s in 0..n_sequences {
        let mut rng = KeyedRng::at(seed, stream::SEQUENCES, s as u64);
        let mut points = samples.clone();
        for len in 1..=max_len {
            let letter = rng.next_below(semigroup.num_generators() as u64) as usize;
            let gen = semigroup.generator(letter);
            let mut max_norm: f64 = 0.0;
            for p in points.iter_mut() {
                if let Ok(image) = gen.eval(p) {
                    max_norm = max_norm.max(sup_norm(&image));
                    *p = image;
                }
            }
            report.n_checked += 1;
            if max_norm > cfg.escape_radius {
                divergent_witness = Some((s, len, max_norm));
                break 'sequences;
            }
        }
    }
    match divergent_witness {
        Some((s, len, norm)) => {
            report.notes.push(format!(
                "sequence {s} exceeded the escape radius at length {len} (norm {norm:.3e})"
            ));
        }
        None => {
            let recurrence = recurrence_test(semigroup, labeling, component_id, cfg, n_sequences)
                .map_err(|e| match e {
                crate::components::ComponentsError::EmptyComponent(id) => {
                    PropertiesError::EmptyComponent(id)
                }
                crate::components::ComponentsError::UnknownComponent { id, .. } => {
                    PropertiesError::EmptyComponent(id)
                }
            })?;
            if recurrence.verdict == RecurrenceVerdict::RecurrentLikely {
                report
                    .notes
                    .push("no divergent sequence found; component is recurrent".into());
            } else {
                report.n_violations = 1;
                report
                    .notes
                    .push("neither a divergent sequence nor recurrence evidence was found".into());
            }
        }
    }
    let mut finished = report.finish();
    if finished.n_violations > 0 {
        finished.pass = false;
    }
    Ok(finished)
}
