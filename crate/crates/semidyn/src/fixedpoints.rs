//! Fixed points of words: multistart Newton search, eigenvalue
//! classification, covering-relation checks, and backward orbits.

use crate::polyalg::{roots_from_coeffs, PolyError, PolyMap};
use crate::semigroup::sup_norm;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FixedPointError {
    #[error("residual {residual:.3e} exceeds the fixed-point tolerance")]
    NotAFixedPoint { residual: f64 },
    #[error("preimage search budget of {budget} Newton runs exhausted")]
    BudgetExceeded { budget: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Polydisc search region: sup-norm ball around a center.
#[derive(Clone, Debug, PartialEq)]
pub struct Polydisc {
    pub center: Vec<Complex64>,
    pub radius: f64,
}

impl Polydisc {
    pub fn around_origin(k: usize, radius: f64) -> Self {
        Polydisc {
            center: vec![Complex64::new(0.0, 0.0); k],
            radius,
        }
    }

    pub fn contains(&self, z: &[Complex64]) -> bool {
        z.iter()
            .zip(&self.center)
            .all(|(a, c)| (a - c).norm() <= self.radius)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    Attracting,
    Repelling,
    Saddle,
    Indeterminate,
}

impl std::fmt::Display for FixedPointKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FixedPointKind::Attracting => "attracting",
            FixedPointKind::Repelling => "repelling",
            FixedPointKind::Saddle => "saddle",
            FixedPointKind::Indeterminate => "indeterminate",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct FixedPointRecord {
    pub location: Vec<Complex64>,
    pub residual: f64,
    pub eigenvalues: Vec<Complex64>,
    pub kind: FixedPointKind,
    pub jacobian_det_modulus: f64,
}

/// Covering-relation evidence for `B(center, r) cc F(B(center, r))`:
/// every boundary sample must map at least `r (1 + margin)` away from the
/// center, and the center must have a preimage inside the polydisc. A
/// sampled certificate, not a proof.
#[derive(Clone, Debug)]
pub struct CoveringReport {
    pub center: Vec<Complex64>,
    pub radius: f64,
    pub margin: f64,
    pub boundary_samples: usize,
    pub min_boundary_image_modulus: f64,
    pub contains_preimage_of_center: bool,
    pub verdict: bool,
    pub note: &'static str,
}

/// Backward orbit levels under a map: `levels[d]` holds the depth-(d+1)
/// preimages found inside the region. `truncated` is set whenever
/// completeness is not certified (always, in general mode).
#[derive(Clone, Debug)]
pub struct BackwardOrbitTree {
    pub root: Vec<Complex64>,
    pub levels: Vec<Vec<Vec<Complex64>>>,
    pub truncated: bool,
}

impl BackwardOrbitTree {
    pub fn total_nodes(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }
}

/// Low-discrepancy points in a polydisc: Halton sequences in the 2k real
/// coordinates, deterministic.
fn halton_starts(region: &Polydisc, n: usize) -> Vec<Vec<Complex64>> {
    const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    let k = region.center.len();
    assert!(2 * k <= PRIMES.len(), "polydisc dimension too large");
    (0..n)
        .map(|i| {
            (0..k)
                .map(|v| {
                    let u = halton(i as u64 + 1, PRIMES[2 * v]);
                    let w = halton(i as u64 + 1, PRIMES[2 * v + 1]);
                    region.center[v]
                        + Complex64::new(
                            region.radius * (2.0 * u - 1.0),
                            region.radius * (2.0 * w - 1.0),
                        )
                })
                .collect()
        })
        .collect()
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Newton iteration for `F(z) = target + shift * z` with `shift` either 0
/// (preimage solving) or 1 (fixed points, solving F(z) - z = target = 0).
fn newton(
    map: &PolyMap,
    start: &[Complex64],
    target: &[Complex64],
    subtract_identity: bool,
    tol: f64,
    max_iter: usize,
) -> Option<Vec<Complex64>> {
    let k = map.dim();
    let mut z = start.to_vec();
    for _ in 0..max_iter {
        let fz = map.eval(&z).ok()?;
        let mut g: Vec<Complex64> = fz.iter().zip(target).map(|(a, b)| a - b).collect();
        if subtract_identity {
            for i in 0..k {
                g[i] -= z[i];
            }
        }
        let residual = sup_norm(&g);
        let scale = 1.0 + sup_norm(&z);
        let mut jac = map.jacobian_at(&z);
        if subtract_identity {
            for i in 0..k {
                jac[(i, i)] -= Complex64::new(1.0, 0.0);
            }
        }
        let step = jac.solve(&g)?;
        for i in 0..k {
            z[i] -= step[i];
        }
        if !z.iter().all(|c| c.re.is_finite() && c.im.is_finite()) || sup_norm(&z) > 1e12 {
            return None;
        }
        if residual <= tol * scale && sup_norm(&step) <= tol * scale {
            return Some(z);
        }
    }
    None
}

/// Multistart Newton search for fixed points of `map` in `region`.
/// Converged points are deduplicated at distance `10 * tol` and returned
/// sorted lexicographically by coordinates. Fully deterministic.
pub fn find_fixed_points(
    map: &PolyMap,
    region: &Polydisc,
    n_starts: usize,
    tol: f64,
    max_iter: usize,
) -> Vec<FixedPointRecord> {
    assert!(n_starts >= 1);
    let zero = vec![Complex64::new(0.0, 0.0); map.dim()];
    let mut candidates = Vec::new();
    let mut starts = halton_starts(region, n_starts);
    starts.push(region.center.clone());
    for start in starts {
        if let Some(p) = newton(map, &start, &zero, true, tol, max_iter) {
            if region.contains(&p) {
                candidates.push(p);
            }
        }
    }
    candidates.sort_by(|a, b| lex_cmp(a, b));
    let mut accepted: Vec<Vec<Complex64>> = Vec::new();
    'outer: for c in candidates {
        for a in &accepted {
            let d = c
                .iter()
                .zip(a)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            if d <= 10.0 * tol {
                continue 'outer;
            }
        }
        accepted.push(c);
    }
    accepted
        .into_iter()
        .filter_map(|p| classify_fixed_point(map, &p, 1e-6).ok())
        .collect()
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match (x.re, x.im).partial_cmp(&(y.re, y.im)) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(other) => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Eigenvalue classification at a fixed point: closed form for k = 2, QR
/// iteration above. `tol_unit` is the dead zone around the unit circle.
pub fn classify_fixed_point(
    map: &PolyMap,
    p: &[Complex64],
    tol_unit: f64,
) -> Result<FixedPointRecord, FixedPointError> {
    let fp = map.eval(p)?;
    let residual = fp
        .iter()
        .zip(p)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if residual > 1e-6 * (1.0 + sup_norm(p)) {
        return Err(FixedPointError::NotAFixedPoint { residual });
    }
    let jac = map.jacobian_at(p);
    let det = jac.det();
    let eigenvalues = jac.eigenvalues();
    let all_below = eigenvalues.iter().all(|e| e.norm() < 1.0 - tol_unit);
    let all_above = eigenvalues.iter().all(|e| e.norm() > 1.0 + tol_unit);
    let any_neutral = eigenvalues
        .iter()
        .any(|e| (e.norm() - 1.0).abs() <= tol_unit);
    let kind = if all_below {
        FixedPointKind::Attracting
    } else if all_above {
        FixedPointKind::Repelling
    } else if !any_neutral {
        FixedPointKind::Saddle
    } else {
        FixedPointKind::Indeterminate
    };
    Ok(FixedPointRecord {
        location: p.to_vec(),
        residual,
        eigenvalues,
        kind,
        jacobian_det_modulus: det.norm(),
    })
}

/// `|det DF(p)| > tol`.
pub fn is_invertible_at(map: &PolyMap, p: &[Complex64], tol: f64) -> bool {
    map.jacobian_at(p).det().norm() > tol
}

/// Sample the distinguished boundary (product of circles) of the polydisc
/// `B(center, r)` and check the covering relation evidence.
pub fn covering_check(
    map: &PolyMap,
    center: &[Complex64],
    radius: f64,
    margin: f64,
    n_boundary: usize,
) -> CoveringReport {
    assert!(radius > 0.0);
    assert!(n_boundary >= 64, "need at least 64 boundary samples");
    let k = map.dim();
    let per_axis = (n_boundary as f64).powf(1.0 / k as f64).ceil() as usize;
    let mut min_modulus = f64::INFINITY;
    let mut angle_index = vec![0usize; k];
    let mut samples = 0usize;
    loop {
        let z: Vec<Complex64> = (0..k)
            .map(|v| {
                let theta = 2.0 * std::f64::consts::PI * angle_index[v] as f64 / per_axis as f64;
                center[v] + Complex64::from_polar(radius, theta)
            })
            .collect();
        if let Ok(image) = map.eval(&z) {
            let d = image
                .iter()
                .zip(center)
                .map(|(a, c)| (a - c).norm())
                .fold(0.0, f64::max);
            min_modulus = min_modulus.min(d);
        }
        samples += 1;
        // Odometer over the k angle axes.
        let mut axis = 0;
        loop {
            if axis == k {
                let region = Polydisc {
                    center: center.to_vec(),
                    radius,
                };
                let contains_preimage = preimage_of_center_exists(map, center, &region);
                let verdict = min_modulus > radius * (1.0 + margin) && contains_preimage;
                return CoveringReport {
                    center: center.to_vec(),
                    radius,
                    margin,
                    boundary_samples: samples,
                    min_boundary_image_modulus: min_modulus,
                    contains_preimage_of_center: contains_preimage,
                    verdict,
                    note: "sampled boundary certificate; evidence, not a proof",
                };
            }
            angle_index[axis] += 1;
            if angle_index[axis] < per_axis {
                break;
            }
            angle_index[axis] = 0;
            axis += 1;
        }
    }
}

fn preimage_of_center_exists(map: &PolyMap, center: &[Complex64], region: &Polydisc) -> bool {
    let shrunk = Polydisc {
        center: region.center.clone(),
        radius: region.radius * 0.95,
    };
    let mut starts = halton_starts(&shrunk, 48);
    starts.push(center.to_vec());
    for start in starts {
        if let Some(z) = newton(map, &start, center, false, 1e-9, 80) {
            if region.contains(&z) {
                return true;
            }
        }
    }
    false
}

/// Backward orbit of `p` under `map` to the given depth, restricted to
/// `region`.
///
/// Exact mode applies when the map is triangular (component i depends only
/// on variables 0..=i): preimages come from chained univariate root solving
/// and the tree is complete within the region. Otherwise multistart Newton
/// finds preimages and the tree is marked truncated.
pub fn backward_orbit(
    map: &PolyMap,
    p: &[Complex64],
    depth: usize,
    region: &Polydisc,
    budget: usize,
) -> Result<BackwardOrbitTree, FixedPointError> {
    assert!(depth >= 1);
    let exact = map.is_triangular();
    let mut tree = BackwardOrbitTree {
        root: p.to_vec(),
        levels: Vec::new(),
        truncated: !exact,
    };
    let mut frontier = vec![p.to_vec()];
    let mut newton_runs = 0usize;
    for _ in 0..depth {
        let mut next_level: Vec<Vec<Complex64>> = Vec::new();
        for target in &frontier {
            let preimages = if exact {
                triangular_preimages(map, target)?
            } else {
                newton_preimages(map, target, region, budget, &mut newton_runs)?
            };
            for q in preimages {
                if region.contains(&q) {
                    next_level.push(q);
                }
            }
        }
        next_level.sort_by(|a, b| lex_cmp(a, b));
        // Cluster-average nearby nodes: repeated roots come back as tight
        // clusters around the true preimage, and the mean cancels the
        // symmetric solver error.
        next_level = cluster_nodes(next_level, 1e-4);
        if next_level.is_empty() {
            break;
        }
        frontier = next_level.clone();
        tree.levels.push(next_level);
    }
    Ok(tree)
}

fn cluster_nodes(sorted: Vec<Vec<Complex64>>, tol: f64) -> Vec<Vec<Complex64>> {
    let mut out: Vec<(Vec<Complex64>, usize)> = Vec::new();
    'next: for node in sorted {
        for (mean, count) in out.iter_mut() {
            let d = mean
                .iter()
                .zip(&node)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if d <= tol {
                let n = *count as f64;
                for (m, v) in mean.iter_mut().zip(&node) {
                    *m = (*m * n + v) / (n + 1.0);
                }
                *count += 1;
                continue 'next;
            }
        }
        out.push((node, 1));
    }
    out.into_iter().map(|(mean, _)| mean).collect()
}

/// Componentwise preimage solving for triangular maps: solve
/// `F_i(z_1..z_i) = t_i` one univariate equation at a time.
fn triangular_preimages(
    map: &PolyMap,
    target: &[Complex64],
) -> Result<Vec<Vec<Complex64>>, FixedPointError> {
    let k = map.dim();
    let mut partial: Vec<Vec<Complex64>> = vec![Vec::new()];
    for i in 0..k {
        let mut extended = Vec::new();
        for prefix in &partial {
            // Substitute the known coordinates into component i.
            let mut poly = map.components()[i].clone();
            for (v, value) in prefix.iter().enumerate() {
                poly = poly.substitute(v, *value)?;
            }
            let Some(mut coeffs) = poly.coeffs_in_single_var(i) else {
                // Component depends on a later variable: not actually
                // triangular in the required sense.
                return Err(FixedPointError::Poly(PolyError::DimensionMismatch {
                    expected: i,
                    got: k,
                }));
            };
            coeffs[0] -= target[i];
            if coeffs.len() < 2 {
                // Constant component: either no solution or a whole plane;
                // neither is enumerable, so this branch dies.
                continue;
            }
            match roots_from_coeffs(&coeffs, 1e-10, 600) {
                Ok(roots) => {
                    for r in roots {
                        let mut q = prefix.clone();
                        q.push(r);
                        extended.push(q);
                    }
                }
                Err(PolyError::DegenerateLeadingCoefficient) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        partial = extended;
    }
    Ok(partial)
}

fn newton_preimages(
    map: &PolyMap,
    target: &[Complex64],
    region: &Polydisc,
    budget: usize,
    runs: &mut usize,
) -> Result<Vec<Vec<Complex64>>, FixedPointError> {
    let n_starts = 200;
    let mut found: Vec<Vec<Complex64>> = Vec::new();
    for start in halton_starts(region, n_starts) {
        *runs += 1;
        if *runs > budget {
            return Err(FixedPointError::BudgetExceeded { budget });
        }
        if let Some(z) = newton(map, &start, target, false, 1e-9, 60) {
            let is_new = found.iter().all(|q| {
                q.iter()
                    .zip(&z)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
                    > 1e-8
            });
            if is_new {
                found.push(z);
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_polynomial;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
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

    fn henon_quarter() -> PolyMap {
        // phi_1(z, w) = (w, 0.25 z - w^2)
        map("phi1", &["z2", "(0.25)*z1 - z2^2"])
    }

    #[test]
    fn finds_both_henon_fixed_points() {
        let f = henon_quarter();
        let region = Polydisc::around_origin(2, 2.0);
        let records = find_fixed_points(&f, &region, 200, 1e-10, 80);
        assert_eq!(records.len(), 2, "{records:?}");
        // Sorted lexicographically: (-0.75, -0.75) first, then (0, 0).
        let p0 = &records[0];
        assert!((p0.location[0] - c(-0.75, 0.0)).norm() < 1e-8);
        assert!((p0.location[1] - c(-0.75, 0.0)).norm() < 1e-8);
        let p1 = &records[1];
        assert!(sup_norm(&p1.location) < 1e-8);
    }

    #[test]
    fn squaring_map_fixed_points_in_bidisc() {
        let f = map("f", &["z1^2", "z2^2"]);
        let region = Polydisc::around_origin(2, 1.5);
        let records = find_fixed_points(&f, &region, 400, 1e-10, 80);
        let locations: Vec<(f64, f64)> = records
            .iter()
            .map(|r| (r.location[0].re.round(), r.location[1].re.round()))
            .collect();
        assert_eq!(records.len(), 4, "{locations:?}");
        for want in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            assert!(locations.contains(&want), "missing {want:?}");
        }
    }

    #[test]
    fn translation_has_no_fixed_points() {
        let f = map("t", &["z1 + 1", "z2"]);
        let region = Polydisc::around_origin(2, 3.0);
        let records = find_fixed_points(&f, &region, 100, 1e-10, 60);
        assert!(records.is_empty());
    }

    #[test]
    fn classify_origin_of_henon_attracting() {
        let f = henon_quarter();
        let rec = classify_fixed_point(&f, &[c(0.0, 0.0), c(0.0, 0.0)], 1e-6).unwrap();
        assert_eq!(rec.kind, FixedPointKind::Attracting);
        let mut moduli: Vec<f64> = rec.eigenvalues.iter().map(|e| e.norm()).collect();
        moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((moduli[0] - 0.5).abs() < 1e-9);
        assert!((moduli[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn classify_saddle_of_henon() {
        // Eigenvalues are the roots of x^2 - 1.5x - 0.25.
        let f = henon_quarter();
        let rec = classify_fixed_point(&f, &[c(-0.75, 0.0), c(-0.75, 0.0)], 1e-6).unwrap();
        assert_eq!(rec.kind, FixedPointKind::Saddle);
        let disc = (1.5f64 * 1.5 + 1.0).sqrt();
        let expect = [(1.5 + disc) / 2.0, (1.5 - disc) / 2.0];
        for e in expect {
            assert!(
                rec.eigenvalues
                    .iter()
                    .any(|l| (l - c(e, 0.0)).norm() < 1e-6),
                "missing eigenvalue {e}, got {:?}",
                rec.eigenvalues
            );
        }
    }

    #[test]
    fn classify_repelling_triangular() {
        let f = map("r", &["2*z1", "2*z2 + z1^2"]);
        let rec = classify_fixed_point(&f, &[c(0.0, 0.0), c(0.0, 0.0)], 1e-6).unwrap();
        assert_eq!(rec.kind, FixedPointKind::Repelling);
    }

    #[test]
    fn not_a_fixed_point_error() {
        let f = henon_quarter();
        assert!(matches!(
            classify_fixed_point(&f, &[c(0.3, 0.0), c(0.1, 0.0)], 1e-6),
            Err(FixedPointError::NotAFixedPoint { .. })
        ));
    }

    #[test]
    fn eigenvalue_product_matches_jacobian_det() {
        let f = henon_quarter();
        let region = Polydisc::around_origin(2, 2.0);
        for rec in find_fixed_points(&f, &region, 150, 1e-10, 80) {
            let prod: f64 = rec.eigenvalues.iter().map(|e| e.norm()).product();
            assert!(
                (prod - rec.jacobian_det_modulus).abs() <= 1e-8 * (1.0 + rec.jacobian_det_modulus)
            );
        }
    }

    #[test]
    fn covering_doubling_map() {
        let f = map("d", &["2*z1", "2*z2"]);
        let report = covering_check(&f, &[c(0.0, 0.0), c(0.0, 0.0)], 1.0, 0.1, 64);
        assert!(report.verdict, "{report:?}");
        assert!((report.min_boundary_image_modulus - 2.0).abs() < 1e-9);
        assert!(report.contains_preimage_of_center);
    }

    #[test]
    fn covering_fails_for_contraction() {
        let f = map("h", &["(0.5)*z1", "(0.5)*z2"]);
        let report = covering_check(&f, &[c(0.0, 0.0), c(0.0, 0.0)], 1.0, 0.1, 64);
        assert!(!report.verdict);
    }

    #[test]
    fn covering_perturbed_expansion() {
        let f = map("p", &["2*z1 + z2^2", "3*z2"]);
        let report = covering_check(&f, &[c(0.0, 0.0), c(0.0, 0.0)], 0.1, 0.1, 64);
        assert!(report.verdict, "{report:?}");
    }

    #[test]
    fn repelling_family_never_attracting_under_covering() {
        // Words of (2 z1, 2 z2 + z1^2) and seeded perturbations: wherever a
        // covering relation holds at a fixed point, the classification must
        // not be Attracting.
        for eps in [0.0, 0.01, -0.02, 0.05] {
            let f = PolyMap::new(
                vec![
                    parse_polynomial(&format!("2*z1 + ({eps})*z2"), 2).unwrap(),
                    parse_polynomial(&format!("2*z2 + z1^2 + ({eps})*z1"), 2).unwrap(),
                ],
                "family",
            )
            .unwrap();
            let region = Polydisc::around_origin(2, 0.5);
            for rec in find_fixed_points(&f, &region, 100, 1e-10, 60) {
                let covering = covering_check(&f, &rec.location, 0.05, 0.1, 64);
                if covering.verdict {
                    assert_ne!(rec.kind, FixedPointKind::Attracting, "{rec:?}");
                }
            }
        }
    }

    #[test]
    fn backward_orbit_exact_squaring() {
        let f = map("f", &["z1^2", "z2^2"]);
        let region = Polydisc::around_origin(2, 2.0);
        let tree = backward_orbit(&f, &[c(1.0, 0.0), c(1.0, 0.0)], 1, &region, 10_000).unwrap();
        assert!(!tree.truncated);
        assert_eq!(tree.levels.len(), 1);
        assert_eq!(tree.levels[0].len(), 4);
        for node in &tree.levels[0] {
            assert!((node[0].norm() - 1.0).abs() < 1e-8);
            assert!((node[1].norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn backward_orbit_origin_chain() {
        let f = map("f", &["z1^2", "z2^2"]);
        let region = Polydisc::around_origin(2, 2.0);
        let tree = backward_orbit(&f, &[c(0.0, 0.0), c(0.0, 0.0)], 3, &region, 10_000).unwrap();
        for level in &tree.levels {
            assert_eq!(level.len(), 1);
            assert!(sup_norm(&level[0]) < 1e-6);
        }
    }

    #[test]
    fn backward_orbit_linear_expansion_is_finite() {
        let f = map("d", &["2*z1", "2*z2"]);
        let region = Polydisc::around_origin(2, 1.0);
        let tree = backward_orbit(&f, &[c(0.0, 0.0), c(0.0, 0.0)], 3, &region, 10_000).unwrap();
        assert_eq!(tree.total_nodes(), 3);
        assert!(!tree.truncated);
    }

    #[test]
    fn backward_orbit_nodes_return_to_root() {
        // (z2, 0.25 z1 - z2^2) is not triangular (component 0 reads z2), so
        // this exercises the general Newton mode; found nodes must still
        // iterate forward onto the root.
        let f = henon_quarter();
        let region = Polydisc::around_origin(2, 3.0);
        let p = [c(-0.75, 0.0), c(-0.75, 0.0)];
        let tree = backward_orbit(&f, &p, 2, &region, 10_000).unwrap();
        assert!(tree.truncated);
        assert!(!tree.levels.is_empty(), "no preimages found at all");
        for (d, level) in tree.levels.iter().enumerate() {
            assert!(!level.is_empty());
            for node in level {
                let mut z = node.clone();
                for _ in 0..=d {
                    z = f.eval(&z).unwrap();
                }
                let err = z
                    .iter()
                    .zip(&p)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(err <= 1e-7 * (1.0 + sup_norm(&p)), "depth {d}: err {err}");
            }
        }
    }

    #[test]
    fn general_mode_is_marked_truncated() {
        // (z2, z1) swaps coordinates, so it is not triangular.
        let f = map("s", &["z2 + z1^2", "z1"]);
        let region = Polydisc::around_origin(2, 1.5);
        let tree = backward_orbit(&f, &[c(0.0, 0.0), c(0.0, 0.0)], 1, &region, 10_000).unwrap();
        assert!(tree.truncated);
    }

    #[test]
    fn invertibility_examples() {
        let f = map("f", &["z1^2", "z2^2"]);
        assert!(is_invertible_at(&f, &[c(1.0, 0.0), c(1.0, 0.0)], 1e-9));
        assert!(!is_invertible_at(&f, &[c(0.0, 0.0), c(0.0, 0.0)], 1e-9));
        let h = henon_quarter();
        assert!(is_invertible_at(&h, &[c(0.0, 0.0), c(0.0, 0.0)], 1e-9));
    }

    #[test]
    fn determinism_of_fixed_point_search() {
        let f = henon_quarter();
        let region = Polydisc::around_origin(2, 2.0);
        let a = find_fixed_points(&f, &region, 120, 1e-10, 80);
        let b = find_fixed_points(&f, &region, 120, 1e-10, 80);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.location, y.location);
            assert_eq!(x.kind, y.kind);
        }
    }
}
