//! Numerical exploration of the Fatou/Julia dichotomy for finitely
//! generated semigroups of polynomial endomorphisms of C^k (k = 2 is the
//! working case).
//!
//! The crate stacks up as:
//!
//! * [`polyalg`] — sparse multivariate polynomials, Jacobians, determinants,
//!   univariate root finding, and the expression grammar.
//! * [`semigroup`] — generators, words, reproducible word sampling, power
//!   subsemigroups, orbits.
//! * [`classify`] — the per-point Fatou/Julia classifier.
//! * [`gridscan`] — region scans, closed-form reference sets, raster
//!   comparison, PPM/CSV output.
//! * [`fixedpoints`] — multistart Newton fixed-point search, eigenvalue
//!   classification, covering checks, backward orbits.
//! * [`components`] — Fatou component labeling, recurrence/wandering
//!   diagnostics, limit-map rank and limit-manifold estimation.
//! * [`properties`] — executable checkers for invariance, finite-index
//!   equality, power-tuple independence, commutation, boundary containment,
//!   and the volume-preserving divergence dichotomy.
//! * [`config`] — experiment configuration, run manifests, bundled setups.
//!
//! Everything is deterministic given a seed: all randomness is counter-based
//! ([`rng`]), so parallel runs reproduce bit-for-bit at any worker count.
//!
//! See the `examples/` directory for one runnable walkthrough per major
//! capability, and the `semidyn` binary for the command-line interface.

pub mod classify;
pub mod components;
pub mod config;
pub mod fixedpoints;
pub mod gridscan;
pub mod linalg;
pub mod polyalg;
pub mod properties;
pub mod rng;
pub mod semigroup;

pub use num_complex::Complex64;
