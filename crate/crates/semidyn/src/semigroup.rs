//! Finitely generated semigroups of polynomial endomorphisms, their words,
//! and reproducible word sampling.
//!
//! Composition convention, fixed once: `indices[0]` is the OUTERMOST map, so
//! a word `[a, b, c]` evaluates as `phi_a(phi_b(phi_c(z)))`.

use crate::polyalg::{PolyError, PolyMap, COMPOSE_DEGREE_BUDGET};
use crate::rng::{stream, KeyedRng};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Norms above this are treated as escape to infinity; squaring maps reach
/// floating overflow within a few more steps anyway.
pub const OVERFLOW_GUARD: f64 = 1e150;

/// Budget on exhaustive enumeration.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemigroupError {
    #[error("cannot evaluate the empty word")]
    EmptyWord,
    #[error("orbit escaped to infinity at step {step} (overflow guard)")]
    EscapedToInfinity { step: usize },
    #[error("enumeration of {requested} words exceeds budget {budget}")]
    BudgetExceeded { requested: u64, budget: u64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Max modulus of the coordinates (polydisc norm); the norm used for escape
/// tests throughout the crate. Any non-finite coordinate reads as infinite:
/// `f64::max` would silently drop a NaN from an internal overflow, and a
/// NaN coordinate must never masquerade as a small norm.
#[inline]
pub fn sup_norm(z: &[Complex64]) -> f64 {
    let mut m = 0.0f64;
    for c in z {
        let n = c.norm();
        if !n.is_finite() {
            return f64::INFINITY;
        }
        if n > m {
            m = n;
        }
    }
    m
}

#[inline]
pub(crate) fn sup_norm_sqr(z: &[Complex64]) -> f64 {
    let mut m = 0.0f64;
    for c in z {
        let n = c.norm_sqr();
        if !n.is_finite() {
            return f64::INFINITY;
        }
        if n > m {
            m = n;
        }
    }
    m
}

/// A word in the generators: a finite sequence of generator indices,
/// `indices[0]` outermost.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word {
    pub indices: Vec<usize>,
}

impl Word {
    pub fn new(indices: Vec<usize>) -> Self {
        Word { indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Concatenation: `u.concat(v)` evaluates as `u` applied after `v`.
    pub fn concat(&self, inner: &Word) -> Word {
        let mut indices = self.indices.clone();
        indices.extend_from_slice(&inner.indices);
        Word { indices }
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let text: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "[{}]", text.join(","))
    }
}

/// Sampling strategy over words.
#[derive(Clone, Debug, PartialEq)]
pub enum WordSampler {
    /// All `m^length` words of exactly this length, lexicographic.
    Exhaustive { length: usize },
    /// `count` words with length uniform in `[1, max_len]` and uniform
    /// letters, drawn from a counter-based generator keyed by
    /// `(seed, draw index)`: reproducible and order-independent.
    Random {
        count: usize,
        max_len: usize,
        seed: u64,
    },
}

/// `(l_1, ..., l_m)` powers for the subsemigroup `< phi_i^{l_i} >`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerTuple(pub Vec<u32>);

impl PowerTuple {
    pub fn ones(m: usize) -> Self {
        PowerTuple(vec![1; m])
    }
}

/// The record produced by [`Semigroup::orbit`]: the partial-word image
/// sequence together with exit bookkeeping. Escape is data, not an error.
///
/// `exit_step` is the 1-based index into the point sequence (the initial
/// point is element 1) of the first point whose norm exceeds the radius.
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub points: Vec<Vec<Complex64>>,
    pub exit_step: Option<usize>,
    pub completed: bool,
    pub max_norm: f64,
}

/// A finitely generated semigroup `G = < phi_1, ..., phi_m >`. Generator
/// order is part of the identity: word indices refer to it.
#[derive(Clone, Debug)]
pub struct Semigroup {
    generators: Vec<PolyMap>,
    name: String,
}

impl Semigroup {
    pub fn new(generators: Vec<PolyMap>, name: impl Into<String>) -> Result<Self, PolyError> {
        assert!(
            !generators.is_empty(),
            "a semigroup needs at least one generator"
        );
        let k = generators[0].dim();
        for g in &generators {
            if g.dim() != k {
                return Err(PolyError::DimensionMismatch {
                    expected: k,
                    got: g.dim(),
                });
            }
        }
        Ok(Semigroup {
            generators,
            name: name.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PolyMap] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &PolyMap {
        &self.generators[i]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Evaluate a word at a point, generators applied right-to-left.
    /// Escape beyond the overflow guard is reported as `EscapedToInfinity`.
    pub fn eval_word(&self, w: &Word, z: &[Complex64]) -> Result<Vec<Complex64>, SemigroupError> {
        if w.is_empty() {
            return Err(SemigroupError::EmptyWord);
        }
        let mut current = z.to_vec();
        let mut next = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (step, &idx) in w.indices.iter().rev().enumerate() {
            self.generators[idx].eval_into(&current, &mut next);
            std::mem::swap(&mut current, &mut next);
            let n = sup_norm_sqr(&current);
            if !n.is_finite() || n > OVERFLOW_GUARD * OVERFLOW_GUARD {
                return Err(SemigroupError::EscapedToInfinity { step: step + 1 });
            }
        }
        Ok(current)
    }

    /// The partial-word image sequence `z, phi_{w[last]}(z), ...` up to the
    /// full word or the first exit beyond modulus `radius`. At most
    /// `segment_limit` points are stored.
    pub fn orbit(
        &self,
        w: &Word,
        z: &[Complex64],
        radius: f64,
        segment_limit: usize,
    ) -> OrbitRecord {
        let mut points = Vec::with_capacity((w.len() + 1).min(segment_limit));
        let mut current = z.to_vec();
        let mut max_norm = sup_norm(&current);
        if segment_limit > 0 {
            points.push(current.clone());
        }
        if max_norm > radius {
            return OrbitRecord {
                points,
                exit_step: Some(1),
                completed: false,
                max_norm,
            };
        }
        let mut next = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (applied, &idx) in w.indices.iter().rev().enumerate() {
            self.generators[idx].eval_into(&current, &mut next);
            std::mem::swap(&mut current, &mut next);
            let n = sup_norm(&current);
            max_norm = max_norm.max(n);
            if points.len() < segment_limit {
                points.push(current.clone());
            }
            if !n.is_finite() || n > radius {
                return OrbitRecord {
                    points,
                    exit_step: Some(applied + 2),
                    completed: false,
                    max_norm,
                };
            }
        }
        OrbitRecord {
            points,
            exit_step: None,
            completed: true,
            max_norm,
        }
    }

    /// Draw words according to the sampler. Random mode is reproducible:
    /// identical seeds give identical word multisets in identical order.
    pub fn sample_words(&self, sampler: &WordSampler) -> Result<Vec<Word>, SemigroupError> {
        match *sampler {
            WordSampler::Exhaustive { length } => enumerate_words(self.num_generators(), length),
            WordSampler::Random {
                count,
                max_len,
                seed,
            } => {
                let m = self.num_generators() as u64;
                let mut out = Vec::with_capacity(count);
                for draw in 0..count {
                    let mut rng = KeyedRng::at(seed, stream::WORD_SAMPLER, draw as u64);
                    let len = 1 + rng.next_below(max_len.max(1) as u64) as usize;
                    let indices = (0..len).map(|_| rng.next_below(m) as usize).collect();
                    out.push(Word::new(indices));
                }
                Ok(out)
            }
        }
    }

    /// The subsemigroup `< phi_1^{l_1}, ..., phi_m^{l_m} >`, with the powers
    /// computed symbolically (degree budget applies).
    pub fn power_subsemigroup(&self, l: &PowerTuple) -> Result<Semigroup, SemigroupError> {
        assert_eq!(
            l.0.len(),
            self.num_generators(),
            "power tuple length mismatch"
        );
        assert!(l.0.iter().all(|&e| e >= 1), "powers must be >= 1");
        let generators = self
            .generators
            .iter()
            .zip(&l.0)
            .map(|(g, &e)| g.power(e, COMPOSE_DEGREE_BUDGET))
            .collect::<Result<Vec<_>, _>>()?;
        let suffix: Vec<String> = l.0.iter().map(|e| e.to_string()).collect();
        Semigroup::new(generators, format!("{}^({})", self.name, suffix.join(",")))
            .map_err(Into::into)
    }
}

/// All words of exact length `length` over `m` letters, lexicographic.
pub fn enumerate_words(m: usize, length: usize) -> Result<Vec<Word>, SemigroupError> {
    assert!(m >= 1 && length >= 1);
    let total = (m as u64).checked_pow(length as u32).unwrap_or(u64::MAX);
    if total > ENUMERATION_BUDGET {
        return Err(SemigroupError::BudgetExceeded {
            requested: total,
            budget: ENUMERATION_BUDGET,
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut current = vec![0usize; length];
    loop {
        out.push(Word::new(current.clone()));
        // Increment in base m, most significant digit first.
        let mut pos = length;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < m {
                break;
            }
            current[pos] = 0;
        }
    }
}
