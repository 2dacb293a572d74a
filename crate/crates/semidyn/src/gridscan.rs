//! Region scans: classify grids of points, compare rasters against
//! closed-form reference sets, and emit PPM images and CSV tables.
//!
//! Two region modes. `ModulusPlane` grids the pair `(|z1|, |z2|)` and
//! classifies several phase samples per cell (the bundled product-map
//! examples have Julia sets defined purely by moduli). `ComplexSlice` grids
//! the real/imaginary parts of one coordinate with the others held fixed.

use crate::classify::{
    classifier_words, classify_point_with_words, ClassifierConfig, PointClass, WordSet,
};
use crate::rng::fnv1a64;
use crate::semigroup::Semigroup;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

/// Cell budget for one scan.
pub const SCAN_CELL_BUDGET: usize = 10_000_000;

const GOLDEN_FRAC: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("scan of {cells} cells exceeds budget {budget}")]
    BudgetExceeded { cells: usize, budget: usize },
    #[error("raster and reference have mismatched geometry: {0}")]
    GeometryMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
}

/// The region a scan covers.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// Grid over (|z1|, |z2|) with `phase_samples` phase points per cell.
    ModulusPlane {
        low: [f64; 2],
        high: [f64; 2],
        nx: usize,
        ny: usize,
        phase_samples: usize,
    },
    /// Grid over re/im of coordinate `var`, all other coordinates fixed.
    ComplexSlice {
        var: usize,
        low: [f64; 2],
        high: [f64; 2],
        nx: usize,
        ny: usize,
        fixed: Vec<Complex64>,
    },
}

impl Region {
    pub fn resolution(&self) -> (usize, usize) {
        match self {
            Region::ModulusPlane { nx, ny, .. } | Region::ComplexSlice { nx, ny, .. } => (*nx, *ny),
        }
    }

    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            Region::ModulusPlane { low, high, .. } | Region::ComplexSlice { low, high, .. } => {
                (*low, *high)
            }
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let (low, high) = self.bounds();
        let (nx, ny) = self.resolution();
        if !(low[0] < high[0] && low[1] < high[1]) {
            return Err("region bounds must satisfy low < high per axis".into());
        }
        if nx < 2 || ny < 2 {
            return Err("resolution must be at least 2x2".into());
        }
        match self {
            Region::ModulusPlane {
                low, phase_samples, ..
            } => {
                if *phase_samples < 1 {
                    return Err("phase_samples must be >= 1".into());
                }
                if low[0] < 0.0 || low[1] < 0.0 {
                    return Err("modulus bounds must be nonnegative".into());
                }
            }
            Region::ComplexSlice { var, fixed, .. } => {
                if *var >= fixed.len() {
                    return Err("slice variable index exceeds dimension".into());
                }
            }
        }
        Ok(())
    }

    /// Center of cell `(ix, iy)` in grid coordinates.
    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        let (low, high) = self.bounds();
        let (nx, ny) = self.resolution();
        let x = low[0] + (ix as f64 + 0.5) * (high[0] - low[0]) / nx as f64;
        let y = low[1] + (iy as f64 + 0.5) * (high[1] - low[1]) / ny as f64;
        (x, y)
    }

    /// Cell containing a grid-coordinate point, if inside the region.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let (low, high) = self.bounds();
        let (nx, ny) = self.resolution();
        if x < low[0] || x >= high[0] || y < low[1] || y >= high[1] {
            return None;
        }
        let ix = ((x - low[0]) / (high[0] - low[0]) * nx as f64) as usize;
        let iy = ((y - low[1]) / (high[1] - low[1]) * ny as f64) as usize;
        Some((ix.min(nx - 1), iy.min(ny - 1)))
    }

    /// Map a point of C^k to this region's grid coordinates.
    pub fn project(&self, z: &[Complex64]) -> (f64, f64) {
        match self {
            Region::ModulusPlane { .. } => (z[0].norm(), z[1].norm()),
            Region::ComplexSlice { var, .. } => (z[*var].re, z[*var].im),
        }
    }

    fn canonical_text(&self) -> String {
        match self {
            Region::ModulusPlane {
                low,
                high,
                nx,
                ny,
                phase_samples,
            } => format!(
                "modulus_plane low={low:?} high={high:?} res={nx}x{ny} phases={phase_samples}"
            ),
            Region::ComplexSlice {
                var,
                low,
                high,
                nx,
                ny,
                fixed,
            } => {
                let fixed_text: Vec<String> = fixed
                    .iter()
                    .map(|c| format!("{:?}+{:?}i", c.re, c.im))
                    .collect();
                format!(
                    "complex_slice var={var} low={low:?} high={high:?} res={nx}x{ny} fixed=[{}]",
                    fixed_text.join(";")
                )
            }
        }
    }
}

/// A classified grid plus provenance fingerprints.
#[derive(Clone, Debug)]
pub struct Raster {
    pub region: Region,
    /// Row-major verdicts, index `iy * nx + ix`.
    pub cells: Vec<PointClass>,
    /// Per-cell normality scores (log max separation ratio over evaluated
    /// samples).
    pub scores: Vec<f64>,
    pub config_fingerprint: String,
    pub generator_fingerprint: String,
}

impl Raster {
    pub fn cell(&self, ix: usize, iy: usize) -> PointClass {
        let (nx, _) = self.region.resolution();
        self.cells[iy * nx + ix]
    }

    pub fn counts(&self) -> [usize; 4] {
        let mut counts = [0usize; 4];
        for c in &self.cells {
            let slot = match c {
                PointClass::FatouBounded => 0,
                PointClass::FatouEscaping => 1,
                PointClass::JuliaCandidate => 2,
                PointClass::Undetermined => 3,
            };
            counts[slot] += 1;
        }
        counts
    }
}

pub fn generator_fingerprint(semigroup: &Semigroup) -> String {
    let mut text = String::new();
    for g in semigroup.generators() {
        text.push_str(&format!("{g}\n"));
    }
    format!("{:016x}", fnv1a64(text.as_bytes()))
}

fn scan_fingerprint(semigroup: &Semigroup, region: &Region, cfg: &ClassifierConfig) -> String {
    let cfg_json = serde_json::to_string(cfg).expect("classifier config serializes");
    let text = format!("{}|{}", region.canonical_text(), cfg_json);
    format!(
        "{:016x}",
        fnv1a64(format!("{text}|{}", generator_fingerprint(semigroup)).as_bytes())
    )
}

/// Classify every cell of the region. Deterministic for a fixed seed and
/// cell-parallel: verdicts are independent of the worker count.
pub fn scan(
    semigroup: &Semigroup,
    region: &Region,
    cfg: &ClassifierConfig,
) -> Result<Raster, GridError> {
    scan_with_phase_offset(semigroup, region, cfg, 0.0)
}

/// `scan` with the ModulusPlane phase grid rotated by `phase_offset`
/// (radians). Exposed for the phase-invariance diagnostics.
pub fn scan_with_phase_offset(
    semigroup: &Semigroup,
    region: &Region,
    cfg: &ClassifierConfig,
    phase_offset: f64,
) -> Result<Raster, GridError> {
    region.validate().map_err(GridError::GeometryMismatch)?;
    if semigroup.dim() != 2 {
        return Err(GridError::DimensionMismatch(format!(
            "grid scans expect dimension 2, got {}",
            semigroup.dim()
        )));
    }
    let (nx, ny) = region.resolution();
    let cells = nx * ny;
    if cells > SCAN_CELL_BUDGET {
        return Err(GridError::BudgetExceeded {
            cells,
            budget: SCAN_CELL_BUDGET,
        });
    }
    let words = classifier_words(semigroup, cfg);
    let results: Vec<(PointClass, f64)> = (0..cells)
        .into_par_iter()
        .map(|idx| {
            let ix = idx % nx;
            let iy = idx / nx;
            classify_cell(semigroup, region, cfg, &words, ix, iy, phase_offset)
        })
        .collect();
    let mut cell_classes = Vec::with_capacity(cells);
    let mut scores = Vec::with_capacity(cells);
    for (class, score) in results {
        cell_classes.push(class);
        scores.push(score);
    }
    Ok(Raster {
        region: region.clone(),
        cells: cell_classes,
        scores,
        config_fingerprint: scan_fingerprint(semigroup, region, cfg),
        generator_fingerprint: generator_fingerprint(semigroup),
    })
}

fn classify_cell(
    semigroup: &Semigroup,
    region: &Region,
    cfg: &ClassifierConfig,
    words: &WordSet,
    ix: usize,
    iy: usize,
    phase_offset: f64,
) -> (PointClass, f64) {
    let (x, y) = region.cell_center(ix, iy);
    match region {
        Region::ComplexSlice { var, fixed, .. } => {
            let mut z = fixed.clone();
            z[*var] = Complex64::new(x, y);
            let (class, ev) = classify_point_with_words(semigroup, &z, cfg, words);
            (class, ev.max_separation_ratio.max(1.0).ln())
        }
        Region::ModulusPlane { phase_samples, .. } => {
            let samples = *phase_samples;
            let mut verdicts: Vec<PointClass> = Vec::with_capacity(samples);
            let mut score: f64 = 0.0;
            for p in 0..samples {
                let theta1 = phase_offset + 2.0 * std::f64::consts::PI * p as f64 / samples as f64;
                let theta2 = phase_offset
                    + 2.0 * std::f64::consts::PI * ((p as f64 + 0.5) * GOLDEN_FRAC).fract();
                let z = [
                    Complex64::from_polar(x, theta1),
                    Complex64::from_polar(y, theta2),
                ];
                let (class, ev) = classify_point_with_words(semigroup, &z, cfg, words);
                score = score.max(ev.max_separation_ratio.max(1.0).ln());
                // Julia is closed: over-covering is the conservative error,
                // so one Julia sample decides the cell.
                if class == PointClass::JuliaCandidate {
                    return (PointClass::JuliaCandidate, score);
                }
                verdicts.push(class);
            }
            let unanimous = |target: PointClass| verdicts.iter().all(|&v| v == target);
            let class = if unanimous(PointClass::FatouBounded) {
                PointClass::FatouBounded
            } else if unanimous(PointClass::FatouEscaping) {
                PointClass::FatouEscaping
            } else {
                PointClass::Undetermined
            };
            (class, score)
        }
    }
}

/// One factor of a product set; a reference set is a finite union of
/// products of these.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Factor {
    /// `{ lo <= |z| <= hi }`.
    ModulusInterval { lo: f64, hi: f64 },
    /// `{ |z| = r }`.
    ModulusCircle { r: f64 },
    /// `{ Im z = 0, lo <= Re z <= hi }`.
    RealSegment { lo: f64, hi: f64 },
    /// `{ |z| <= r }`.
    Disk { r: f64 },
}

impl Factor {
    /// Exact membership for a complex coordinate.
    fn contains(&self, z: Complex64) -> bool {
        match *self {
            Factor::ModulusInterval { lo, hi } => {
                let m = z.norm();
                lo <= m && m <= hi
            }
            Factor::ModulusCircle { r } => (z.norm() - r).abs() <= 1e-12,
            Factor::RealSegment { lo, hi } => z.im.abs() <= 1e-12 && lo <= z.re && z.re <= hi,
            Factor::Disk { r } => z.norm() <= r,
        }
    }

    /// Membership for a modulus coordinate (phase unknown). A real segment
    /// constrains the phase, which a modulus cannot certify.
    fn contains_modulus(&self, m: f64) -> Option<bool> {
        match *self {
            Factor::ModulusInterval { lo, hi } => Some(lo <= m && m <= hi),
            Factor::ModulusCircle { r } => Some((m - r).abs() <= 1e-12),
            Factor::Disk { r } => Some(m <= r),
            Factor::RealSegment { .. } => None,
        }
    }

    fn dist_to_set_modulus(&self, m: f64) -> Option<f64> {
        match *self {
            Factor::ModulusInterval { lo, hi } => Some((lo - m).max(m - hi).max(0.0)),
            Factor::ModulusCircle { r } => Some((m - r).abs()),
            Factor::Disk { r } => Some((m - r).max(0.0)),
            Factor::RealSegment { .. } => None,
        }
    }

    /// Distance from a modulus coordinate to the factor's topological
    /// boundary (as a subset of C; `|z| = 0` edges are interior).
    fn dist_to_boundary_modulus(&self, m: f64) -> Option<f64> {
        match *self {
            Factor::ModulusInterval { lo, hi } => {
                let mut d = (m - hi).abs();
                if lo > 0.0 {
                    d = d.min((m - lo).abs());
                }
                Some(d)
            }
            Factor::ModulusCircle { r } => Some((m - r).abs()),
            Factor::Disk { r } => Some((m - r).abs()),
            Factor::RealSegment { .. } => None,
        }
    }

    fn dist_to_set(&self, z: Complex64) -> f64 {
        match *self {
            Factor::ModulusInterval { lo, hi } => {
                let m = z.norm();
                (lo - m).max(m - hi).max(0.0)
            }
            Factor::ModulusCircle { r } => (z.norm() - r).abs(),
            Factor::RealSegment { lo, hi } => {
                let dx = (lo - z.re).max(z.re - hi).max(0.0);
                (dx * dx + z.im * z.im).sqrt()
            }
            Factor::Disk { r } => (z.norm() - r).max(0.0),
        }
    }

    fn dist_to_boundary(&self, z: Complex64) -> f64 {
        match *self {
            Factor::ModulusInterval { lo, hi } => {
                let m = z.norm();
                let mut d = (m - hi).abs();
                if lo > 0.0 {
                    d = d.min((m - lo).abs());
                }
                d
            }
            Factor::ModulusCircle { r } => (z.norm() - r).abs(),
            Factor::RealSegment { .. } => self.dist_to_set(z),
            Factor::Disk { r } => (z.norm() - r).abs(),
        }
    }
}

/// A finite union of product sets (factors per term = dimension), matching
/// the closed-form Julia sets of the bundled examples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSet {
    pub terms: Vec<Vec<Factor>>,
}

impl ReferenceSet {
    pub fn dim(&self) -> usize {
        self.terms.first().map(|t| t.len()).unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.terms.is_empty() {
            return Err("reference set needs at least one term".into());
        }
        let k = self.terms[0].len();
        if self.terms.iter().any(|t| t.len() != k) {
            return Err("every term needs one factor per dimension".into());
        }
        Ok(())
    }

    /// Exact membership of a complex point.
    pub fn contains(&self, z: &[Complex64]) -> Result<bool, GridError> {
        if z.len() != self.dim() {
            return Err(GridError::DimensionMismatch(format!(
                "point has dimension {}, reference has {}",
                z.len(),
                self.dim()
            )));
        }
        Ok(self
            .terms
            .iter()
            .any(|term| term.iter().zip(z).all(|(f, &zi)| f.contains(zi))))
    }

    /// Exact membership of a modulus pair (ModulusPlane cells).
    pub fn contains_modulus(&self, m: &[f64]) -> Result<bool, GridError> {
        if m.len() != self.dim() {
            return Err(GridError::DimensionMismatch(format!(
                "modulus point has dimension {}, reference has {}",
                m.len(),
                self.dim()
            )));
        }
        for term in &self.terms {
            let mut all = true;
            for (f, &mi) in term.iter().zip(m) {
                match f.contains_modulus(mi) {
                    Some(inside) => all &= inside,
                    None => {
                        return Err(GridError::GeometryMismatch(
                            "real-segment factors need complex points".into(),
                        ))
                    }
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Sup-metric distance from a modulus pair to the set.
    pub fn dist_to_set_modulus(&self, m: &[f64]) -> Option<f64> {
        self.terms
            .iter()
            .map(|term| {
                term.iter()
                    .zip(m)
                    .map(|(f, &mi)| f.dist_to_set_modulus(mi))
                    .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
            })
            .try_fold(f64::INFINITY, |acc, d| d.map(|d| acc.min(d)))
    }

    /// Sup-metric distance from a modulus pair to the boundary of the set
    /// (per-term over-approximation: shared interior edges still count).
    pub fn dist_to_boundary_modulus(&self, m: &[f64]) -> Option<f64> {
        let mut best = f64::INFINITY;
        for term in &self.terms {
            for i in 0..term.len() {
                let mut d: f64 = 0.0;
                for (j, f) in term.iter().enumerate() {
                    let contribution = if i == j {
                        f.dist_to_boundary_modulus(m[j])?
                    } else {
                        f.dist_to_set_modulus(m[j])?
                    };
                    d = d.max(contribution);
                }
                best = best.min(d);
            }
        }
        Some(best)
    }

    pub fn dist_to_set(&self, z: &[Complex64]) -> f64 {
        self.terms
            .iter()
            .map(|term| {
                term.iter()
                    .zip(z)
                    .map(|(f, &zi)| f.dist_to_set(zi))
                    .fold(0.0f64, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn dist_to_boundary(&self, z: &[Complex64]) -> f64 {
        let mut best = f64::INFINITY;
        for term in &self.terms {
            for i in 0..term.len() {
                let mut d: f64 = 0.0;
                for (j, f) in term.iter().enumerate() {
                    let contribution = if i == j {
                        f.dist_to_boundary(z[j])
                    } else {
                        f.dist_to_set(z[j])
                    };
                    d = d.max(contribution);
                }
                best = best.min(d);
            }
        }
        best
    }
}

/// Closed-form Julia set of Example 1's semigroup `<f, g>` with `|a| > 1`:
/// `{|z1| <= 1} x {|z2| = 1}  u  {1 <= |z1| <= |a|} x {|z2| <= 1}`.
pub fn example1_reference(a_modulus: f64) -> ReferenceSet {
    ReferenceSet {
        terms: vec![
            vec![
                Factor::ModulusInterval { lo: 0.0, hi: 1.0 },
                Factor::ModulusCircle { r: 1.0 },
            ],
            vec![
                Factor::ModulusInterval {
                    lo: 1.0,
                    hi: a_modulus,
                },
                Factor::ModulusInterval { lo: 0.0, hi: 1.0 },
            ],
        ],
    }
}

/// Closed-form Julia set of the single squaring map:
/// `{|z1| = 1} x {|z2| <= 1}  u  {|z1| <= 1} x {|z2| = 1}`.
pub fn squaring_reference() -> ReferenceSet {
    ReferenceSet {
        terms: vec![
            vec![
                Factor::ModulusCircle { r: 1.0 },
                Factor::ModulusInterval { lo: 0.0, hi: 1.0 },
            ],
            vec![
                Factor::ModulusInterval { lo: 0.0, hi: 1.0 },
                Factor::ModulusCircle { r: 1.0 },
            ],
        ],
    }
}

/// Closed-form Julia set of the Chebyshev family: `[-1, 1] x {|z2| <= 1}`.
pub fn chebyshev_reference() -> ReferenceSet {
    ReferenceSet {
        terms: vec![vec![
            Factor::RealSegment { lo: -1.0, hi: 1.0 },
            Factor::Disk { r: 1.0 },
        ]],
    }
}

/// Confusion counts over scored cells.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Confusion {
    pub julia_member: usize,
    pub julia_nonmember: usize,
    pub fatou_member: usize,
    pub fatou_nonmember: usize,
}

/// Raster-vs-reference scorecard. Cells within `band` of the reference
/// boundary are excluded; undecided cells are not scored. Agreement is
/// absent when nothing was scored.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub agreement: Option<f64>,
    pub n_scored: usize,
    pub n_band_excluded: usize,
    pub n_undecided: usize,
    pub band: f64,
    pub confusion: Confusion,
}

/// Score a raster against a reference set. Julia verdicts should fall on
/// members, Fatou verdicts on nonmembers.
pub fn compare(
    raster: &Raster,
    reference: &ReferenceSet,
    band: f64,
) -> Result<ComparisonReport, GridError> {
    reference.validate().map_err(GridError::GeometryMismatch)?;
    let (nx, ny) = raster.region.resolution();
    let mut report = ComparisonReport {
        agreement: None,
        n_scored: 0,
        n_band_excluded: 0,
        n_undecided: 0,
        band,
        confusion: Confusion::default(),
    };
    let mut matches = 0usize;
    for iy in 0..ny {
        for ix in 0..nx {
            let (x, y) = raster.region.cell_center(ix, iy);
            let (boundary_dist, member) = match &raster.region {
                Region::ModulusPlane { .. } => {
                    let m = [x, y];
                    let d = reference.dist_to_boundary_modulus(&m).ok_or_else(|| {
                        GridError::GeometryMismatch(
                            "reference with real segments cannot score a modulus raster".into(),
                        )
                    })?;
                    (d, reference.contains_modulus(&m)?)
                }
                Region::ComplexSlice { var, fixed, .. } => {
                    let mut z = fixed.clone();
                    z[*var] = Complex64::new(x, y);
                    (reference.dist_to_boundary(&z), reference.contains(&z)?)
                }
            };
            if boundary_dist <= band {
                report.n_band_excluded += 1;
                continue;
            }
            let class = raster.cell(ix, iy);
            if !class.is_decided() {
                report.n_undecided += 1;
                continue;
            }
            report.n_scored += 1;
            let is_julia = class == PointClass::JuliaCandidate;
            match (is_julia, member) {
                (true, true) => {
                    report.confusion.julia_member += 1;
                    matches += 1;
                }
                (true, false) => report.confusion.julia_nonmember += 1,
                (false, true) => report.confusion.fatou_member += 1,
                (false, false) => {
                    report.confusion.fatou_nonmember += 1;
                    matches += 1;
                }
            }
        }
    }
    if report.n_scored > 0 {
        report.agreement = Some(matches as f64 / report.n_scored as f64);
    }
    Ok(report)
}

/// Fixed verdict palette (P6, maxval 255).
pub fn class_color(class: PointClass) -> [u8; 3] {
    match class {
        PointClass::FatouBounded => [0, 160, 0],
        PointClass::FatouEscaping => [0, 64, 224],
        PointClass::JuliaCandidate => [0, 0, 0],
        PointClass::Undetermined => [128, 128, 128],
    }
}

/// Write the raster as binary P6 PPM. Rows are emitted top-down from the
/// maximal y cell so the image's vertical axis matches the region's.
pub fn render_ppm(raster: &Raster, path: &Path) -> Result<(), GridError> {
    let (nx, ny) = raster.region.resolution();
    let mut buf = Vec::with_capacity(32 + 3 * nx * ny);
    buf.extend_from_slice(format!("P6\n{nx} {ny}\n255\n").as_bytes());
    for iy in (0..ny).rev() {
        for ix in 0..nx {
            buf.extend_from_slice(&class_color(raster.cell(ix, iy)));
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

/// Write the raster as CSV: `ix,iy,x_center,y_center,class,score`, one row
/// per cell in row-major order.
pub fn write_csv(raster: &Raster, path: &Path) -> Result<(), GridError> {
    let (nx, ny) = raster.region.resolution();
    let mut buf = String::with_capacity(32 * nx * ny);
    buf.push_str("ix,iy,x_center,y_center,class,score\n");
    for iy in 0..ny {
        for ix in 0..nx {
            let (x, y) = raster.region.cell_center(ix, iy);
            let idx = iy * nx + ix;
            buf.push_str(&format!(
                "{ix},{iy},{x:.9},{y:.9},{},{:.9}\n",
                raster.cells[idx], raster.scores[idx]
            ));
        }
    }
    std::fs::write(path, buf)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{parse_polynomial, PolyMap};

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

    fn example1(a: f64) -> Semigroup {
        let f = map("f", &["z1^2", "z2^2"]);
        let g = PolyMap::new(
            vec![
                parse_polynomial(&format!("({})*z1^2", 1.0 / a), 2).unwrap(),
                parse_polynomial("z2^2", 2).unwrap(),
            ],
            "g",
        )
        .unwrap();
        Semigroup::new(vec![f, g], "example1").unwrap()
    }

    fn small_cfg() -> ClassifierConfig {
        ClassifierConfig {
            random_words: 80,
            seed: 11,
            ..ClassifierConfig::default()
        }
    }

    #[test]
    fn membership_examples() {
        let r = example1_reference(2.0);
        assert!(r.contains_modulus(&[1.5, 0.3]).unwrap());
        assert!(!r.contains_modulus(&[0.5, 0.5]).unwrap());
        assert!(r.contains_modulus(&[0.5, 1.0]).unwrap());
    }

    #[test]
    fn membership_dimension_mismatch() {
        let r = example1_reference(2.0);
        assert!(matches!(
            r.contains_modulus(&[0.5]),
            Err(GridError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn boundary_distance_modulus_plane() {
        let r = example1_reference(2.0);
        // Deep inside the band: boundary pieces at |z1| in {1,2}, |z2| = 1.
        let d = r.dist_to_boundary_modulus(&[1.5, 0.2]).unwrap();
        assert!((d - 0.5).abs() < 1e-12, "d = {d}");
        // Near the |z1| = 1 edge.
        let d2 = r.dist_to_boundary_modulus(&[1.02, 0.2]).unwrap();
        assert!((d2 - 0.02).abs() < 1e-12, "d2 = {d2}");
    }

    #[test]
    fn chebyshev_reference_distances() {
        let r = chebyshev_reference();
        let z = [Complex64::new(0.5, 0.12), Complex64::new(0.5, 0.0)];
        assert!((r.dist_to_set(&z) - 0.12).abs() < 1e-12);
        let far = [Complex64::new(1.5, 0.0), Complex64::new(0.5, 0.0)];
        assert!((r.dist_to_set(&far) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scan_escape_zone_all_escaping() {
        let g = example1(2.0);
        let region = Region::ModulusPlane {
            low: [5.0, 0.0],
            high: [6.0, 0.8],
            nx: 6,
            ny: 4,
            phase_samples: 2,
        };
        let raster = scan(&g, &region, &small_cfg()).unwrap();
        assert!(raster.cells.iter().all(|&c| c == PointClass::FatouEscaping));
    }

    #[test]
    fn scan_traces_example1_reference() {
        let g = example1(2.0);
        let region = Region::ModulusPlane {
            low: [0.0, 0.0],
            high: [3.0, 2.0],
            nx: 30,
            ny: 20,
            phase_samples: 2,
        };
        let raster = scan(&g, &region, &small_cfg()).unwrap();
        let report = compare(&raster, &example1_reference(2.0), 0.08).unwrap();
        let agreement = report.agreement.expect("cells were scored");
        assert!(agreement >= 0.85, "agreement {agreement} report {report:?}");
    }

    #[test]
    fn parallel_and_serial_scans_agree_bitwise() {
        let g = example1(2.0);
        let region = Region::ModulusPlane {
            low: [0.0, 0.0],
            high: [3.0, 2.0],
            nx: 12,
            ny: 8,
            phase_samples: 2,
        };
        let cfg = small_cfg();
        let serial_pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let a = serial_pool.install(|| scan(&g, &region, &cfg).unwrap());
        let parallel_pool = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let b = parallel_pool.install(|| scan(&g, &region, &cfg).unwrap());
        assert_eq!(a.cells, b.cells);
        assert_eq!(a.scores, b.scores);
    }

    #[test]
    fn phase_offset_changes_few_verdicts() {
        let g = example1(2.0);
        let region = Region::ModulusPlane {
            low: [0.0, 0.0],
            high: [3.0, 2.0],
            nx: 20,
            ny: 14,
            phase_samples: 2,
        };
        let cfg = small_cfg();
        let a = scan_with_phase_offset(&g, &region, &cfg, 0.0).unwrap();
        let b = scan_with_phase_offset(&g, &region, &cfg, 0.37).unwrap();
        let same = a.cells.iter().zip(&b.cells).filter(|(x, y)| x == y).count();
        assert!(
            same * 100 >= a.cells.len() * 98,
            "stable {same}/{}",
            a.cells.len()
        );
    }

    #[test]
    fn compare_perfect_raster_is_full_agreement() {
        let reference = example1_reference(2.0);
        let region = Region::ModulusPlane {
            low: [0.0, 0.0],
            high: [3.0, 2.0],
            nx: 25,
            ny: 25,
            phase_samples: 1,
        };
        let (nx, ny) = region.resolution();
        let mut cells = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx {
                let (x, y) = region.cell_center(ix, iy);
                let inside = reference.contains_modulus(&[x, y]).unwrap();
                cells.push(if inside {
                    PointClass::JuliaCandidate
                } else {
                    PointClass::FatouBounded
                });
            }
        }
        let raster = Raster {
            region,
            scores: vec![0.0; cells.len()],
            cells,
            config_fingerprint: "test".into(),
            generator_fingerprint: "test".into(),
        };
        let report = compare(&raster, &reference, 0.05).unwrap();
        assert_eq!(report.agreement, Some(1.0));
    }

    #[test]
    fn compare_all_undetermined_has_no_agreement() {
        let region = Region::ModulusPlane {
            low: [0.0, 0.0],
            high: [3.0, 2.0],
            nx: 10,
            ny: 10,
            phase_samples: 1,
        };
        let raster = Raster {
            region,
            cells: vec![PointClass::Undetermined; 100],
            scores: vec![0.0; 100],
            config_fingerprint: "test".into(),
            generator_fingerprint: "test".into(),
        };
        let report = compare(&raster, &example1_reference(2.0), 0.05).unwrap();
        assert_eq!(report.agreement, None);
        assert_eq!(report.n_scored, 0);
    }

    #[test]
    fn ppm_payload_is_exact() {
        let region = Region::ModulusPlane {
            low: [0.0, 0.0],
            high: [1.0, 1.0],
            nx: 2,
            ny: 2,
            phase_samples: 1,
        };
        let raster = Raster {
            region,
            cells: vec![
                PointClass::FatouBounded,
                PointClass::FatouEscaping,
                PointClass::JuliaCandidate,
                PointClass::Undetermined,
            ],
            scores: vec![0.0; 4],
            config_fingerprint: "test".into(),
            generator_fingerprint: "test".into(),
        };
        let dir = std::env::temp_dir().join("semidyn_ppm_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("tiny.ppm");
        render_ppm(&raster, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let header = b"P6\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        let payload = &bytes[header.len()..];
        assert_eq!(payload.len(), 12);
        // Top row is iy = 1: julia (black), undetermined (gray).
        assert_eq!(&payload[0..6], &[0, 0, 0, 128, 128, 128]);
        // Bottom row is iy = 0: bounded (green), escaping (blue).
        assert_eq!(&payload[6..12], &[0, 160, 0, 0, 64, 224]);
    }

    #[test]
    fn csv_row_count_and_header() {
        let region = Region::ComplexSlice {
            var: 0,
            low: [-1.0, -1.0],
            high: [1.0, 1.0],
            nx: 3,
            ny: 2,
            fixed: vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
        };
        let raster = Raster {
            region,
            cells: vec![PointClass::FatouBounded; 6],
            scores: vec![0.25; 6],
            config_fingerprint: "test".into(),
            generator_fingerprint: "test".into(),
        };
        let dir = std::env::temp_dir().join("semidyn_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("tiny.csv");
        write_csv(&raster, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "ix,iy,x_center,y_center,class,score");
        assert!(lines[1].starts_with("0,0,"));
    }

    #[test]
    fn refinement_does_not_degrade_agreement() {
        let g = example1(2.0);
        let cfg = small_cfg();
        let reference = example1_reference(2.0);
        let mut agreements = Vec::new();
        for n in [12usize, 24, 48] {
            let region = Region::ModulusPlane {
                low: [0.0, 0.0],
                high: [3.0, 2.0],
                nx: n,
                ny: n,
                phase_samples: 2,
            };
            let raster = scan(&g, &region, &cfg).unwrap();
            let report = compare(&raster, &reference, 0.08).unwrap();
            agreements.push(report.agreement.unwrap());
        }
        for w in agreements.windows(2) {
            assert!(
                w[1] >= w[0] - 0.02,
                "agreement degraded under refinement: {agreements:?}"
            );
        }
    }
}
