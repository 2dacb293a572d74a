//! Dense complex linear algebra for the tiny matrices (k <= 4) that show up
//! in Jacobian work: LU solves for Newton steps, determinants, eigenvalues
//! and singular values. Hand-rolled; pulling in a full linear algebra crate
//! for 2x2 matrices is not worth the dependency.

use num_complex::Complex64;

/// Row-major k x k complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut m = CMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self[(i, l)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(l, j)];
                }
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Determinant by partial-pivot Gaussian elimination.
    pub fn det(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm_sqr();
            for r in col + 1..n {
                let m = a[r * n + col].norm_sqr();
                if m > best {
                    best = m;
                    piv = r;
                }
            }
            if best == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
            }
        }
        det
    }

    /// Solve `A x = b` in place by LU with partial pivoting.
    /// Returns None when the matrix is numerically singular.
    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm_sqr();
            for r in col + 1..n {
                let m = a[r * n + col].norm_sqr();
                if m > best {
                    best = m;
                    piv = r;
                }
            }
            if best < 1e-300 {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                x.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
                let xc = x[col];
                x[r] -= f * xc;
            }
        }
        for r in (0..n).rev() {
            let mut s = x[r];
            for j in r + 1..n {
                s -= a[r * n + j] * x[j];
            }
            x[r] = s / a[r * n + r];
        }
        Some(x)
    }

    /// Eigenvalues. Closed form for n <= 2, shifted QR iteration otherwise.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        match self.n {
            0 => vec![],
            1 => vec![self[(0, 0)]],
            2 => {
                // Roots of lambda^2 - tr lambda + det.
                let tr = self[(0, 0)] + self[(1, 1)];
                let det = self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)];
                let disc = (tr * tr - 4.0 * det).sqrt();
                vec![(tr + disc) * 0.5, (tr - disc) * 0.5]
            }
            _ => self.eigenvalues_qr(),
        }
    }

    /// Unshifted-to-shifted QR iteration via Gram-Schmidt; adequate for the
    /// 3x3 and 4x4 matrices this crate ever sees.
    fn eigenvalues_qr(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut a = self.clone();
        let mut out = Vec::with_capacity(n);
        let mut active = n;
        let mut iters = 0usize;
        while active > 2 && iters < 20_000 {
            iters += 1;
            // Wilkinson-ish shift from the trailing entry.
            let shift = a[(active - 1, active - 1)];
            let mut shifted = a.clone();
            for i in 0..active {
                shifted[(i, i)] -= shift;
            }
            let (q, r) = shifted.qr(active);
            let mut next = r.mul_block(&q, active);
            for i in 0..active {
                next[(i, i)] += shift;
            }
            a = next;
            // Deflate when the last sub-diagonal row is negligible.
            let mut off = 0.0;
            for j in 0..active - 1 {
                off += a[(active - 1, j)].norm();
            }
            let scale = a[(active - 1, active - 1)].norm() + 1.0;
            if off < 1e-13 * scale {
                out.push(a[(active - 1, active - 1)]);
                active -= 1;
            }
        }
        // Finish the trailing 2x2 (or 1x1) block in closed form.
        if active == 1 {
            out.push(a[(0, 0)]);
        } else if active == 2 {
            let tr = a[(0, 0)] + a[(1, 1)];
            let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            let disc = (tr * tr - 4.0 * det).sqrt();
            out.push((tr + disc) * 0.5);
            out.push((tr - disc) * 0.5);
        } else {
            // Iteration budget exhausted; report diagonal as best effort.
            for i in 0..active {
                out.push(a[(i, i)]);
            }
        }
        out.reverse();
        out
    }

    /// QR of the leading `m x m` block by modified Gram-Schmidt.
    fn qr(&self, m: usize) -> (CMatrix, CMatrix) {
        let n = self.n;
        let mut q = CMatrix::zeros(n);
        let mut r = CMatrix::zeros(n);
        let mut cols: Vec<Vec<Complex64>> = (0..m)
            .map(|j| (0..m).map(|i| self[(i, j)]).collect())
            .collect();
        for j in 0..m {
            for i in 0..j {
                let mut dot = Complex64::new(0.0, 0.0);
                for l in 0..m {
                    dot += q[(l, i)].conj() * cols[j][l];
                }
                r[(i, j)] = dot;
                for l in 0..m {
                    let qv = q[(l, i)];
                    cols[j][l] -= dot * qv;
                }
            }
            let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            r[(j, j)] = Complex64::new(norm, 0.0);
            if norm > 1e-300 {
                for l in 0..m {
                    q[(l, j)] = cols[j][l] / norm;
                }
            } else {
                q[(j, j)] = Complex64::new(1.0, 0.0);
            }
        }
        (q, r)
    }

    fn mul_block(&self, rhs: &CMatrix, m: usize) -> CMatrix {
        let mut out = self.clone();
        for i in 0..m {
            for j in 0..m {
                let mut s = Complex64::new(0.0, 0.0);
                for l in 0..m {
                    s += self[(i, l)] * rhs[(l, j)];
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    /// Singular values, descending. Computed as the square roots of the
    /// eigenvalues of A^H A via cyclic Jacobi (Hermitian, so this is robust).
    pub fn singular_values(&self) -> Vec<f64> {
        let n = self.n;
        let mut h = self.conj_transpose().mul(self);
        // Cyclic Jacobi sweeps on the Hermitian matrix h.
        for _sweep in 0..60 {
            let mut off = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    off += h[(i, j)].norm_sqr();
                }
            }
            let scale: f64 = (0..n).map(|i| h[(i, i)].norm_sqr()).sum::<f64>() + 1e-300;
            if off <= 1e-28 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let hpq = h[(p, q)];
                    if hpq.norm_sqr() < 1e-300 {
                        continue;
                    }
                    let hpp = h[(p, p)].re;
                    let hqq = h[(q, q)].re;
                    // Unitary 2x2 diagonalization of [[hpp, hpq],[hpq*, hqq]].
                    let phase = hpq / hpq.norm();
                    let tau = (hqq - hpp) / (2.0 * hpq.norm());
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let cs = Complex64::new(c, 0.0);
                    let sn = phase * s;
                    for l in 0..n {
                        let hlp = h[(l, p)];
                        let hlq = h[(l, q)];
                        h[(l, p)] = hlp * cs - hlq * sn.conj();
                        h[(l, q)] = hlp * sn + hlq * cs;
                    }
                    for l in 0..n {
                        let hpl = h[(p, l)];
                        let hql = h[(q, l)];
                        h[(p, l)] = hpl * cs - hql * sn;
                        h[(q, l)] = hpl * sn.conj() + hql * cs;
                    }
                }
            }
        }
        let mut sv: Vec<f64> = (0..n).map(|i| h[(i, i)].re.max(0.0).sqrt()).collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}
