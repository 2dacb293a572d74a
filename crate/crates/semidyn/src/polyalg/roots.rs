//! Univariate complex root finding by simultaneous Aberth-Ehrlich iteration.

use super::{MultiPoly, PolyError};
use num_complex::Complex64;

/// All complex roots (with multiplicity) of a univariate polynomial.
///
/// Initial guesses sit on a deterministically perturbed circle of radius
/// given by the Cauchy bound; the iteration refines all roots at once.
/// Roots are returned sorted by (re, im). Fails with
/// `DegenerateLeadingCoefficient` when the leading coefficient has modulus
/// at most `tol`, and with `NonConvergence` when `max_iter` passes without
/// every residual dropping below `tol * (1 + magnitude scale)`.
pub fn roots_1d(p: &MultiPoly, tol: f64, max_iter: usize) -> Result<Vec<Complex64>, PolyError> {
    let coeffs = p.univariate_coeffs().ok_or(PolyError::DimensionMismatch {
        expected: 1,
        got: p.nvars(),
    })?;
    roots_from_coeffs(&coeffs, tol, max_iter)
}

/// Same as [`roots_1d`] but on an ascending coefficient slice.
pub fn roots_from_coeffs(
    coeffs: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<Complex64>, PolyError> {
    // Trim trailing (near-)zero coefficients to find the true degree.
    let mut deg = coeffs.len().saturating_sub(1);
    while deg > 0 && coeffs[deg].norm() <= tol {
        deg -= 1;
    }
    if deg < 1 || coeffs[deg].norm() <= tol {
        return Err(PolyError::DegenerateLeadingCoefficient);
    }
    let coeffs = &coeffs[..=deg];
    let lead = coeffs[deg];

    // Cauchy bound: all roots lie within 1 + max |a_i / a_n|.
    let radius = 1.0
        + coeffs[..deg]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);

    let deriv: Vec<Complex64> = (1..=deg).map(|i| coeffs[i] * i as f64).collect();

    // Perturbed-circle start: golden-angle spacing plus a radial wobble so
    // no two guesses coincide and no guess sits on a symmetry axis.
    let mut z: Vec<Complex64> = (0..deg)
        .map(|i| {
            let frac = (i as f64 + 0.5) / deg as f64;
            let angle = 2.0 * std::f64::consts::PI * frac + 0.3779;
            let r = radius * (0.85 + 0.1 * ((i as f64 * 0.618_033_988_75).fract()));
            Complex64::from_polar(r, angle)
        })
        .collect();

    let eval = |x: Complex64| horner(coeffs, x);
    let eval_d = |x: Complex64| horner(&deriv, x);

    let mut worst_residual = f64::INFINITY;
    for _iter in 0..max_iter {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let pv = eval(z[i]);
            let dv = eval_d(z[i]);
            let newton = if dv.norm() > 1e-300 {
                pv / dv
            } else {
                // Flat derivative: take a deterministic sidestep.
                Complex64::new(1e-8, 1e-8)
            };
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let diff = z[i] - zj;
                    if diff.norm_sqr() > 1e-300 {
                        repulsion += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        // Residual check against the magnitude scale at each root.
        worst_residual = 0.0;
        let mut all_ok = true;
        for &zi in &z {
            let scale: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c.norm() * zi.norm().max(1.0).powi(j as i32))
                .sum();
            let residual = eval(zi).norm();
            worst_residual = worst_residual.max(residual / (1.0 + scale));
            if residual > tol * (1.0 + scale) {
                all_ok = false;
            }
        }
        if all_ok && moved < tol * (1.0 + radius) {
            let mut out = z;
            out.sort_by(|a, b| {
                (a.re, a.im)
                    .partial_cmp(&(b.re, b.im))
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            return Ok(out);
        }
    }
    Err(PolyError::NonConvergence {
        iterations: max_iter,
        residual: worst_residual,
    })
}

#[inline]
fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_polynomial;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_roots(found: &[Complex64], expected: &[Complex64], tol: f64) {
        assert_eq!(found.len(), expected.len(), "{found:?} vs {expected:?}");
        for e in expected {
            assert!(
                found.iter().any(|f| (f - e).norm() < tol),
                "missing root {e} in {found:?}"
            );
        }
    }

    #[test]
    fn quadratic_z2_minus_1() {
        let p = parse_polynomial("z1^2 - 1", 1).unwrap();
        let roots = roots_1d(&p, 1e-10, 200).unwrap();
        assert_roots(&roots, &[c(1.0, 0.0), c(-1.0, 0.0)], 1e-8);
    }

    #[test]
    fn quadratic_z2_minus_4() {
        let p = parse_polynomial("z1^2 - 4", 1).unwrap();
        let roots = roots_1d(&p, 1e-10, 200).unwrap();
        assert_roots(&roots, &[c(2.0, 0.0), c(-2.0, 0.0)], 1e-8);
    }

    #[test]
    fn chebyshev_level_set() {
        // T2(z) - 1 = 2z^2 - 2, roots +-1.
        let p = parse_polynomial("2*z1^2 - 2", 1).unwrap();
        let roots = roots_1d(&p, 1e-10, 200).unwrap();
        assert_roots(&roots, &[c(1.0, 0.0), c(-1.0, 0.0)], 1e-8);
    }

    #[test]
    fn complex_roots_and_high_degree() {
        // z^4 + 1: four primitive eighth roots of unity.
        let p = parse_polynomial("z1^4 + 1", 1).unwrap();
        let roots = roots_1d(&p, 1e-10, 400).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_roots(&roots, &[c(s, s), c(-s, s), c(s, -s), c(-s, -s)], 1e-8);
    }

    #[test]
    fn repeated_root() {
        // (z-1)^3 = z^3 - 3z^2 + 3z - 1; the cluster should sit near 1.
        let p = parse_polynomial("z1^3 - 3*z1^2 + 3*z1 - 1", 1).unwrap();
        let roots = roots_1d(&p, 1e-8, 2000).unwrap();
        for r in &roots {
            assert!((r - c(1.0, 0.0)).norm() < 1e-2, "{roots:?}");
        }
    }

    #[test]
    fn degenerate_leading_coefficient() {
        let p = parse_polynomial("0*z1^5 + 1", 1).unwrap();
        assert!(matches!(
            roots_1d(&p, 1e-10, 100),
            Err(PolyError::DegenerateLeadingCoefficient)
        ));
    }

    #[test]
    fn deterministic_output() {
        let p = parse_polynomial("z1^5 - z1 - 1", 1).unwrap();
        let a = roots_1d(&p, 1e-10, 500).unwrap();
        let b = roots_1d(&p, 1e-10, 500).unwrap();
        assert_eq!(a, b);
    }
}
