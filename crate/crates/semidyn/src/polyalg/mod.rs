//! Sparse multivariate polynomial arithmetic over complex coefficients.
//!
//! Polynomials are stored canonically: a `BTreeMap` from exponent
//! multi-indices to coefficients, with every stored coefficient of modulus
//! greater than [`COEFF_ZERO_TOL`]. Equality is equality of canonical term
//! maps. `PolyMap` bundles k polynomials in k variables (an endomorphism of
//! C^k) together with precompiled term tables for fast orbit evaluation.

mod parser;
mod roots;

pub use parser::{parse_polynomial, ParseError};
pub use roots::{roots_1d, roots_from_coeffs};

use crate::linalg::CMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Coefficients with modulus at or below this are dropped during
/// canonicalization (double precision noise floor).
pub const COEFF_ZERO_TOL: f64 = 1e-14;

/// Degree cap for symbolic composition; beyond this, word evaluation must be
/// numeric (composition degree grows exponentially with word length).
pub const COMPOSE_DEGREE_BUDGET: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable index {var} out of range for {nvars} variables")]
    IndexOutOfRange { var: usize, nvars: usize },
    #[error("symbolic determinants are supported only for k <= 4, got k = {k}")]
    UnsupportedDimension { k: usize },
    #[error("leading coefficient is degenerate (modulus <= tolerance)")]
    DegenerateLeadingCoefficient,
    #[error(
        "root iteration did not converge within {iterations} iterations (residual {residual:.3e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("composition degree {degree} exceeds budget {budget}")]
    DegreeBudgetExceeded { degree: u32, budget: u32 },
    #[error("non-finite coefficient rejected")]
    NonFiniteCoefficient,
}

/// Sparse polynomial in `nvars` complex variables.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, value: Complex64) -> Self {
        let mut p = MultiPoly::zero(nvars);
        if value.norm() > COEFF_ZERO_TOL {
            p.terms.insert(vec![0; nvars], value);
        }
        p
    }

    /// The monomial `z_var`.
    pub fn variable(nvars: usize, var: usize) -> Result<Self, PolyError> {
        if var >= nvars {
            return Err(PolyError::IndexOutOfRange { var, nvars });
        }
        let mut exps = vec![0u32; nvars];
        exps[var] = 1;
        let mut p = MultiPoly::zero(nvars);
        p.terms.insert(exps, Complex64::new(1.0, 0.0));
        Ok(p)
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        let mut p = MultiPoly::zero(nvars);
        for (exps, coeff) in terms {
            if exps.len() != nvars {
                return Err(PolyError::DimensionMismatch {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            if !coeff.re.is_finite() || !coeff.im.is_finite() {
                return Err(PolyError::NonFiniteCoefficient);
            }
            *p.terms.entry(exps).or_insert(Complex64::new(0.0, 0.0)) += coeff;
        }
        p.normalize();
        Ok(p)
    }

    /// Drop terms with negligible coefficients. Idempotent.
    fn normalize(&mut self) {
        self.terms.retain(|_, c| c.norm() > COEFF_ZERO_TOL);
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Some(c) when the polynomial is constant (including zero).
    pub fn as_constant(&self) -> Option<Complex64> {
        match self.terms.len() {
            0 => Some(Complex64::new(0.0, 0.0)),
            1 => {
                let (exps, &c) = self.terms.iter().next().unwrap();
                exps.iter().all(|&e| e == 0).then_some(c)
            }
            _ => None,
        }
    }

    /// Value at `z` by direct term summation with per-variable power tables.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64, PolyError> {
        if z.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: z.len(),
            });
        }
        // Memoize powers of each variable up to its maximum exponent.
        let mut pows: Vec<Vec<Complex64>> = Vec::with_capacity(self.nvars);
        for v in 0..self.nvars {
            let maxe = self.degree_in(v) as usize;
            let mut table = Vec::with_capacity(maxe + 1);
            table.push(Complex64::new(1.0, 0.0));
            for e in 1..=maxe {
                let prev = table[e - 1];
                table.push(prev * z[v]);
            }
            pows.push(table);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (exps, &coeff) in &self.terms {
            let mut t = coeff;
            for (v, &e) in exps.iter().enumerate() {
                t *= pows[v][e as usize];
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to `var`, canonical form.
    pub fn differentiate(&self, var: usize) -> Result<MultiPoly, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::IndexOutOfRange {
                var,
                nvars: self.nvars,
            });
        }
        let mut out = MultiPoly::zero(self.nvars);
        for (exps, &coeff) in &self.terms {
            let e = exps[var];
            if e == 0 {
                continue;
            }
            let mut new_exps = exps.clone();
            new_exps[var] = e - 1;
            *out.terms
                .entry(new_exps)
                .or_insert(Complex64::new(0.0, 0.0)) += coeff * e as f64;
        }
        out.normalize();
        Ok(out)
    }

    pub fn add(&self, rhs: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (exps, &coeff) in &rhs.terms {
            *out.terms
                .entry(exps.clone())
                .or_insert(Complex64::new(0.0, 0.0)) += coeff;
        }
        out.normalize();
        out
    }

    pub fn sub(&self, rhs: &MultiPoly) -> MultiPoly {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -*c;
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.normalize();
        out
    }

    pub fn mul(&self, rhs: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &rhs.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *out.terms.entry(exps).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
            }
        }
        out.normalize();
        out
    }

    pub fn pow(&self, exp: u32) -> MultiPoly {
        let mut result = MultiPoly::constant(self.nvars, Complex64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Substitute `subs[v]` for variable `v`. The degree bound
    /// `deg(self) * max deg(subs)` must stay within `budget`.
    pub fn compose(&self, subs: &[MultiPoly], budget: u32) -> Result<MultiPoly, PolyError> {
        if subs.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: subs.len(),
            });
        }
        let inner_deg = subs.iter().map(|s| s.total_degree()).max().unwrap_or(0);
        let bound = self.total_degree().saturating_mul(inner_deg.max(1));
        if bound > budget {
            return Err(PolyError::DegreeBudgetExceeded {
                degree: bound,
                budget,
            });
        }
        let out_nvars = subs.first().map(|s| s.nvars).unwrap_or(self.nvars);
        let mut acc = MultiPoly::zero(out_nvars);
        for (exps, &coeff) in &self.terms {
            let mut term = MultiPoly::constant(out_nvars, coeff);
            for (v, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&subs[v].pow(e));
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Ascending coefficient vector for univariate polynomials.
    pub fn univariate_coeffs(&self) -> Option<Vec<Complex64>> {
        if self.nvars != 1 {
            return None;
        }
        let deg = self.total_degree() as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (exps, &c) in &self.terms {
            coeffs[exps[0] as usize] = c;
        }
        Some(coeffs)
    }

    /// Substitute a numeric value for one variable, keeping the variable
    /// count (the substituted variable simply no longer occurs).
    pub fn substitute(&self, var: usize, value: Complex64) -> Result<MultiPoly, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::IndexOutOfRange {
                var,
                nvars: self.nvars,
            });
        }
        let mut out = MultiPoly::zero(self.nvars);
        for (exps, &coeff) in &self.terms {
            let scale = cpow(value, exps[var]);
            let mut new_exps = exps.clone();
            new_exps[var] = 0;
            *out.terms
                .entry(new_exps)
                .or_insert(Complex64::new(0.0, 0.0)) += coeff * scale;
        }
        out.normalize();
        Ok(out)
    }

    /// Ascending coefficients in `var` when the polynomial depends on no
    /// other variable; None otherwise.
    pub fn coeffs_in_single_var(&self, var: usize) -> Option<Vec<Complex64>> {
        if var >= self.nvars {
            return None;
        }
        if self
            .terms
            .keys()
            .any(|e| e.iter().enumerate().any(|(v, &x)| v != var && x > 0))
        {
            return None;
        }
        let deg = self.degree_in(var) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (exps, &c) in &self.terms {
            coeffs[exps[var] as usize] = c;
        }
        Some(coeffs)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if exps.iter().all(|&e| e == 0) {
                write!(f, "({:.6}{:+.6}i)", coeff.re, coeff.im)?;
                continue;
            }
            if (coeff - Complex64::new(1.0, 0.0)).norm() > COEFF_ZERO_TOL {
                write!(f, "({:.6}{:+.6}i)*", coeff.re, coeff.im)?;
            }
            let mut sep = "";
            for (v, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                write!(f, "{sep}z{}", v + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
                sep = "*";
            }
        }
        Ok(())
    }
}

/// Flat, cache-friendly term table used in orbit hot loops.
#[derive(Clone, Debug)]
struct CompiledPoly {
    nvars: usize,
    coeffs: Vec<Complex64>,
    /// Concatenated exponent rows, stride `nvars`.
    exps: Vec<u32>,
}

impl CompiledPoly {
    fn compile(p: &MultiPoly) -> Self {
        let mut coeffs = Vec::with_capacity(p.terms.len());
        let mut exps = Vec::with_capacity(p.terms.len() * p.nvars);
        for (e, &c) in &p.terms {
            coeffs.push(c);
            exps.extend_from_slice(e);
        }
        CompiledPoly {
            nvars: p.nvars,
            coeffs,
            exps,
        }
    }

    #[inline]
    fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, &coeff) in self.coeffs.iter().enumerate() {
            let row = &self.exps[t * self.nvars..(t + 1) * self.nvars];
            let mut term = coeff;
            for (v, &e) in row.iter().enumerate() {
                match e {
                    0 => {}
                    1 => term *= z[v],
                    2 => {
                        let w = z[v];
                        term *= w * w;
                    }
                    _ => term *= cpow(z[v], e),
                }
            }
            acc += term;
        }
        acc
    }
}

#[inline]
fn cpow(base: Complex64, mut e: u32) -> Complex64 {
    let mut result = Complex64::new(1.0, 0.0);
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            result *= b;
        }
        e >>= 1;
        if e > 0 {
            b *= b;
        }
    }
    result
}

/// A polynomial endomorphism of C^k: k polynomials in k variables.
#[derive(Clone, Debug)]
pub struct PolyMap {
    components: Vec<MultiPoly>,
    compiled: Vec<CompiledPoly>,
    jac_compiled: Vec<CompiledPoly>,
    label: String,
}

impl PartialEq for PolyMap {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
    }
}

impl PolyMap {
    pub fn new(components: Vec<MultiPoly>, label: impl Into<String>) -> Result<Self, PolyError> {
        let k = components.len();
        for c in &components {
            if c.nvars != k {
                return Err(PolyError::DimensionMismatch {
                    expected: k,
                    got: c.nvars,
                });
            }
        }
        let compiled = components.iter().map(CompiledPoly::compile).collect();
        let mut jac_compiled = Vec::with_capacity(k * k);
        for comp in &components {
            for v in 0..k {
                jac_compiled.push(CompiledPoly::compile(&comp.differentiate(v)?));
            }
        }
        Ok(PolyMap {
            components,
            compiled,
            jac_compiled,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn identity(k: usize) -> Self {
        let comps = (0..k).map(|v| MultiPoly::variable(k, v).unwrap()).collect();
        PolyMap::new(comps, "id").unwrap()
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>, PolyError> {
        if z.len() != self.dim() {
            return Err(PolyError::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        Ok(self.compiled.iter().map(|c| c.eval(z)).collect())
    }

    /// Allocation-free evaluation for orbit loops. `out` must have length k
    /// and must not alias `z`.
    #[inline]
    pub fn eval_into(&self, z: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(z.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        for (slot, c) in out.iter_mut().zip(&self.compiled) {
            *slot = c.eval(z);
        }
    }

    /// Symbolic Jacobian matrix, entry (i, j) = d component_i / d z_j.
    pub fn jacobian(&self) -> PolyMatrix {
        let k = self.dim();
        let mut entries = Vec::with_capacity(k * k);
        for comp in &self.components {
            for v in 0..k {
                entries.push(comp.differentiate(v).expect("validated at construction"));
            }
        }
        PolyMatrix { k, entries }
    }

    /// Numeric Jacobian at a point, from the precompiled derivative table.
    pub fn jacobian_at(&self, z: &[Complex64]) -> CMatrix {
        let k = self.dim();
        let mut m = CMatrix::zeros(k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = self.jac_compiled[i * k + j].eval(z);
            }
        }
        m
    }

    /// Symbolic Jacobian determinant (vanishing locus = critical set).
    pub fn jacobian_det(&self) -> Result<MultiPoly, PolyError> {
        self.jacobian().det()
    }

    /// True when the Jacobian determinant is a constant of modulus within
    /// `tol` of 1 — the decidable certificate for volume preservation used
    /// throughout this crate (biholomorphy itself is not certified).
    pub fn is_volume_preserving(&self, tol: f64) -> bool {
        match self.jacobian_det() {
            Ok(det) => match det.as_constant() {
                Some(c) => (c.norm() - 1.0).abs() <= tol,
                None => false,
            },
            Err(_) => false,
        }
    }

    /// True when the Jacobian determinant is not identically zero
    /// (maximal generic rank).
    pub fn has_maximal_rank(&self) -> Result<bool, PolyError> {
        Ok(!self.jacobian_det()?.is_zero())
    }

    /// Symbolic composition `self ∘ inner`, bounded by the degree budget.
    pub fn compose(&self, inner: &PolyMap, budget: u32) -> Result<PolyMap, PolyError> {
        if inner.dim() != self.dim() {
            return Err(PolyError::DimensionMismatch {
                expected: self.dim(),
                got: inner.dim(),
            });
        }
        let comps = self
            .components
            .iter()
            .map(|c| c.compose(&inner.components, budget))
            .collect::<Result<Vec<_>, _>>()?;
        PolyMap::new(comps, format!("{}∘{}", self.label, inner.label))
    }

    /// Symbolic power `self^n` within the degree budget.
    pub fn power(&self, n: u32, budget: u32) -> Result<PolyMap, PolyError> {
        let mut acc = PolyMap::identity(self.dim());
        for _ in 0..n {
            acc = self.compose(&acc, budget)?;
        }
        acc.label = format!("{}^{}", self.label, n);
        Ok(acc)
    }

    /// True when each component i depends only on variables 0..=i, so
    /// preimages can be solved one univariate equation at a time.
    pub fn is_triangular(&self) -> bool {
        self.components.iter().enumerate().all(|(i, comp)| {
            comp.terms
                .keys()
                .all(|exps| exps.iter().skip(i + 1).all(|&e| e == 0))
        })
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.label)?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// k x k matrix of polynomials (the symbolic Jacobian lives here).
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    k: usize,
    /// Row-major entries.
    entries: Vec<MultiPoly>,
}

impl PolyMatrix {
    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn entry(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.k + j]
    }

    /// Symbolic determinant by cofactor expansion; k <= 4 only (degree
    /// growth makes larger sizes useless here).
    pub fn det(&self) -> Result<MultiPoly, PolyError> {
        if self.k > 4 {
            return Err(PolyError::UnsupportedDimension { k: self.k });
        }
        Ok(self.det_recursive(&(0..self.k).collect::<Vec<_>>(), 0))
    }

    fn det_recursive(&self, cols: &[usize], row: usize) -> MultiPoly {
        let nvars = self.entries.first().map(|p| p.nvars).unwrap_or(self.k);
        if cols.is_empty() {
            return MultiPoly::constant(nvars, Complex64::new(1.0, 0.0));
        }
        let mut acc = MultiPoly::zero(nvars);
        for (pos, &col) in cols.iter().enumerate() {
            let minor_cols: Vec<usize> = cols.iter().copied().filter(|&c| c != col).collect();
            let sub = self.det_recursive(&minor_cols, row + 1);
            let mut term = self.entry(row, col).mul(&sub);
            if pos % 2 == 1 {
                term = term.neg();
            }
            acc = acc.add(&term);
        }
        acc
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<CMatrix, PolyError> {
        let mut m = CMatrix::zeros(self.k);
        for i in 0..self.k {
            for j in 0..self.k {
                m[(i, j)] = self.entry(i, j).eval(z)?;
            }
        }
        Ok(m)
    }
}
