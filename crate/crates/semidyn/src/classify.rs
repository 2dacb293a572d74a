//! Per-point Fatou/Julia classification by word sampling.
//!
//! A point is probed with a word set (random draws plus a short exhaustive
//! core) and two rings of companion points: a fine ring at radius `delta`
//! that measures equicontinuity, and a coarse ring at radius `tear_radius`
//! that detects neighborhoods split between escape and genuine boundedness.
//! Per word, each probe point either exits the escape radius at some step or
//! completes the word; the verdict aggregates those fates:
//!
//! * a word that escapes for the center while some companion completes at a
//!   norm no larger than the starting scale ("anchored"), or that completes
//!   anchored while the coarse ring escapes, tears the neighborhood — Julia
//!   evidence;
//! * a completed, anchored word whose fine-ring separation grew past `kappa`
//!   stretches the neighborhood without escaping — Julia evidence;
//! * escapes with all fine companions exiting within two steps of the center
//!   are uniform divergence — Fatou (escaping) evidence;
//! * completed words with separation ratio at most `kappa` are
//!   equicontinuity — Fatou (bounded) evidence.
//!
//! Completed words whose final norm exceeds the starting scale are treated
//! as truncated transits: they witness neither boundedness nor escape.
//! Conflicting non-Julia evidence yields `Undetermined` rather than a forced
//! binary call.

use crate::semigroup::{enumerate_words, sup_norm, Semigroup, Word, WordSampler};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Classifier knobs. Defaults follow squaring-map scales: the escape radius
/// is reached fast by degree-2 maps, and `kappa` separates derivative growth
/// `2^L` along Julia orbits from bounded distortion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    /// Escape radius R (sup-norm).
    pub escape_radius: f64,
    /// Maximum word length L for random draws.
    pub max_word_len: usize,
    /// Number of random words N.
    pub random_words: usize,
    /// Fine companion-ring radius.
    pub delta: f64,
    /// Separation-growth threshold (> 1).
    pub kappa: f64,
    /// Seed for word draws and companion directions.
    pub seed: u64,
    /// Companion count per ring (>= 4).
    pub n_companions: usize,
    /// Coarse companion-ring radius for tear detection.
    pub tear_radius: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            escape_radius: 1e6,
            max_word_len: 12,
            random_words: 200,
            delta: 1e-4,
            kappa: 1e3,
            seed: 1,
            n_companions: 8,
            tear_radius: 0.1,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<(), String> {
        // NaN knobs must fail validation, so every bound is checked in the
        // accepting direction.
        let finite = self.escape_radius.is_finite()
            && self.delta.is_finite()
            && self.kappa.is_finite()
            && self.tear_radius.is_finite();
        if !finite {
            return Err("classifier knobs must be finite".into());
        }
        if self.escape_radius <= 1.0 {
            return Err("escape_radius must exceed 1".into());
        }
        if self.delta <= 0.0 || self.delta >= 1e-2 * self.escape_radius {
            return Err("delta must be positive and below 1e-2 * escape_radius".into());
        }
        if self.kappa <= 1.0 {
            return Err("kappa must exceed 1".into());
        }
        if self.n_companions < 4 {
            return Err("n_companions must be at least 4".into());
        }
        if self.tear_radius <= 0.0 {
            return Err("tear_radius must be positive".into());
        }
        if self.max_word_len == 0 {
            return Err("max_word_len must be at least 1".into());
        }
        Ok(())
    }
}

/// Verdict for one point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    FatouBounded,
    FatouEscaping,
    JuliaCandidate,
    Undetermined,
}

impl PointClass {
    pub fn is_fatou(self) -> bool {
        matches!(self, PointClass::FatouBounded | PointClass::FatouEscaping)
    }

    pub fn is_decided(self) -> bool {
        self != PointClass::Undetermined
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PointClass::FatouBounded => "fatou_bounded",
            PointClass::FatouEscaping => "fatou_escaping",
            PointClass::JuliaCandidate => "julia_candidate",
            PointClass::Undetermined => "undetermined",
        }
    }
}

impl std::fmt::Display for PointClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Bookkeeping behind a verdict. Word counts are over the sampled multiset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Evidence {
    pub n_escaping_words: usize,
    pub n_bounded_words: usize,
    pub max_separation_ratio: f64,
    pub witnesses: Vec<Word>,
}

/// The word multiset a classification runs over: deterministic for a given
/// `(generators, cfg.seed)`. Grouped so duplicate words are stepped once.
#[derive(Clone, Debug)]
pub struct WordSet {
    grouped: Vec<(Word, usize)>,
    total: usize,
}

impl WordSet {
    pub fn total_words(&self) -> usize {
        self.total
    }

    pub fn distinct_words(&self) -> usize {
        self.grouped.len()
    }

    pub fn from_words<I: IntoIterator<Item = Word>>(words: I) -> Self {
        let mut grouped = std::collections::BTreeMap::new();
        let mut total = 0usize;
        for w in words {
            if w.is_empty() {
                continue;
            }
            *grouped.entry(w).or_insert(0usize) += 1;
            total += 1;
        }
        WordSet {
            grouped: grouped.into_iter().collect(),
            total,
        }
    }
}

/// The classifier word set: all words of length up to `min(L, 4)` plus `N`
/// random draws with lengths uniform in `[1, L]`.
pub fn classifier_words(semigroup: &Semigroup, cfg: &ClassifierConfig) -> WordSet {
    let mut words = Vec::new();
    let exhaustive_cap = cfg.max_word_len.min(4);
    for len in 1..=exhaustive_cap {
        match enumerate_words(semigroup.num_generators(), len) {
            Ok(ws) => words.extend(ws),
            Err(_) => break,
        }
    }
    let sampler = WordSampler::Random {
        count: cfg.random_words,
        max_len: cfg.max_word_len,
        seed: cfg.seed,
    };
    words.extend(
        semigroup
            .sample_words(&sampler)
            .expect("random sampling is total"),
    );
    WordSet::from_words(words)
}

/// Per-probe fate after a word.
///
/// Escape is judged by the final state, not by transient crossings: a
/// family may contain degree-zero components (the truncated Chebyshev
/// family's `f_0` is constant in z1) that snap huge intermediate values
/// back into a bounded region, so exceeding the escape radius mid-word is
/// not absorbing. Only the overflow guard is.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Fate {
    /// Still tracked; `exceed` is the step the current above-radius run
    /// started at, when the probe currently sits beyond the radius.
    Alive { exceed: Option<usize> },
    /// Crossed the overflow guard at this step; permanently escaped.
    Dead { step: usize },
}

impl Fate {
    /// Escaped in the final-state sense, with the step its above-radius
    /// run began.
    fn escape_step(self) -> Option<usize> {
        match self {
            Fate::Alive { exceed } => exceed,
            Fate::Dead { step } => Some(step),
        }
    }

    fn completed_inside(self) -> bool {
        matches!(self, Fate::Alive { exceed: None })
    }
}

struct ProbeRun {
    /// Flattened current positions, stride k; slot 0 is the center.
    cur: Vec<Complex64>,
    next: Vec<Complex64>,
    fate: Vec<Fate>,
    initial: Vec<Complex64>,
}

/// Per-word outcome flags feeding the verdict.
#[derive(Default, Debug)]
struct Tally {
    escaping_words: usize,
    bounded_words: usize,
    max_sep_ratio: f64,
    any_tear: bool,
    any_stretch: bool,
    any_fine_compesc: bool,
    any_ragged: bool,
    any_incomplete_stretch: bool,
    witness_tear: Option<Word>,
    witness_stretch: Option<Word>,
    witness_escape: Option<Word>,
    witness_calm: Option<Word>,
}

/// Classify one point. See the module docs for the decision procedure.
pub fn classify_point(
    semigroup: &Semigroup,
    z: &[Complex64],
    cfg: &ClassifierConfig,
) -> (PointClass, Evidence) {
    let words = classifier_words(semigroup, cfg);
    classify_point_with_words(semigroup, z, cfg, &words)
}

/// Classify against an already-sampled word set (shared across a grid scan).
pub fn classify_point_with_words(
    semigroup: &Semigroup,
    z: &[Complex64],
    cfg: &ClassifierConfig,
    words: &WordSet,
) -> (PointClass, Evidence) {
    let k = semigroup.dim();
    assert_eq!(z.len(), k, "point dimension mismatch");
    let n = cfg.n_companions;
    let npts = 1 + 2 * n;

    // Probe layout: center, then the fine ring, then the coarse ring.
    let mut initial = Vec::with_capacity(npts * k);
    initial.extend_from_slice(z);
    let dirs = companion_directions(n, k);
    for d in &dirs {
        for (i, zi) in z.iter().enumerate() {
            initial.push(zi + cfg.delta * d[i]);
        }
    }
    for d in &dirs {
        for (i, zi) in z.iter().enumerate() {
            initial.push(zi + cfg.tear_radius * d[i]);
        }
    }

    let mut run = ProbeRun {
        cur: vec![Complex64::new(0.0, 0.0); npts * k],
        next: vec![Complex64::new(0.0, 0.0); npts * k],
        fate: vec![Fate::Alive { exceed: None }; npts],
        initial,
    };

    let anchor = (1.0 + 1e-9) * sup_norm(z).max(1.0);
    let r_sqr = cfg.escape_radius * cfg.escape_radius;

    let mut tally = Tally::default();
    for (word, mult) in &words.grouped {
        run_word(semigroup, word, &mut run, r_sqr);
        score_word(word, *mult, &run, cfg, k, n, anchor, &mut tally);
    }

    let verdict = decide(&tally);
    let mut witnesses = Vec::new();
    for w in [
        tally.witness_tear,
        tally.witness_stretch,
        tally.witness_escape,
        tally.witness_calm,
    ]
    .into_iter()
    .flatten()
    {
        if !witnesses.contains(&w) {
            witnesses.push(w);
        }
    }
    let evidence = Evidence {
        n_escaping_words: tally.escaping_words,
        n_bounded_words: tally.bounded_words,
        max_separation_ratio: tally.max_sep_ratio,
        witnesses,
    };
    (verdict, evidence)
}

/// Continuous non-normality diagnostic: the log of the largest separation
/// growth ratio over sampled bounded words. Zero means perfect
/// equicontinuity at the sampled resolution.
pub fn normality_score(semigroup: &Semigroup, z: &[Complex64], cfg: &ClassifierConfig) -> f64 {
    let (_, evidence) = classify_point(semigroup, z, cfg);
    evidence.max_separation_ratio.max(1.0).ln()
}

/// First application step at which the orbit of `w` at `z` exceeds `radius`,
/// or None when the word completes within it. The initial point counts as
/// step 0 (so a point already outside yields Some(0)).
pub fn escape_time(semigroup: &Semigroup, w: &Word, z: &[Complex64], radius: f64) -> Option<usize> {
    let record = semigroup.orbit(w, z, radius, 1);
    record.exit_step.map(|seq_index| seq_index - 1)
}

/// Fixed companion directions: each probes a single coordinate, with phases
/// fanned in pi/4 steps so that for any point some companion is within
/// pi/8 of the radial (modulus) direction of every coordinate. Radial
/// probes are what make tears of modulus-product sets visible.
fn companion_directions(n: usize, k: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|i| {
            let coord = i % k;
            let fan = i / k;
            let phase = fan as f64 * std::f64::consts::FRAC_PI_4;
            let mut dir = vec![Complex64::new(0.0, 0.0); k];
            dir[coord] = Complex64::from_polar(1.0, phase);
            dir
        })
        .collect()
}

fn run_word(semigroup: &Semigroup, word: &Word, run: &mut ProbeRun, r_sqr: f64) {
    const GUARD_SQR: f64 = crate::semigroup::OVERFLOW_GUARD * crate::semigroup::OVERFLOW_GUARD;
    let k = semigroup.dim();
    let npts = run.fate.len();
    run.cur.copy_from_slice(&run.initial);
    let mut alive = npts;
    for (p, fate) in run.fate.iter_mut().enumerate() {
        let norm_sqr = crate::semigroup::sup_norm_sqr(&run.cur[p * k..(p + 1) * k]);
        *fate = if norm_sqr > GUARD_SQR || !norm_sqr.is_finite() {
            alive -= 1;
            Fate::Dead { step: 0 }
        } else {
            Fate::Alive {
                exceed: (norm_sqr > r_sqr).then_some(0),
            }
        };
    }
    for (applied, &letter) in word.indices.iter().rev().enumerate() {
        if alive == 0 {
            break;
        }
        let step = applied + 1;
        let gen = semigroup.generator(letter);
        for p in 0..npts {
            let Fate::Alive { exceed } = run.fate[p] else {
                continue;
            };
            let src = &run.cur[p * k..(p + 1) * k];
            let dst = &mut run.next[p * k..(p + 1) * k];
            gen.eval_into(src, dst);
            let norm_sqr = crate::semigroup::sup_norm_sqr(dst);
            if norm_sqr > GUARD_SQR || !norm_sqr.is_finite() {
                run.fate[p] = Fate::Dead {
                    step: exceed.unwrap_or(step),
                };
                alive -= 1;
            } else if norm_sqr > r_sqr {
                run.fate[p] = Fate::Alive {
                    exceed: Some(exceed.unwrap_or(step)),
                };
            } else {
                run.fate[p] = Fate::Alive { exceed: None };
            }
        }
        std::mem::swap(&mut run.cur, &mut run.next);
    }
    // Dead probes carry stale positions in `cur` after buffer swaps; they
    // are never read because scoring only inspects completed probes.
}

#[allow(clippy::too_many_arguments)]
fn score_word(
    word: &Word,
    mult: usize,
    run: &ProbeRun,
    cfg: &ClassifierConfig,
    k: usize,
    n: usize,
    anchor: f64,
    tally: &mut Tally,
) {
    let fine = 1..1 + n;
    let coarse = 1 + n..1 + 2 * n;

    match run.fate[0].escape_step() {
        Some(center_step) => {
            tally.escaping_words += mult;
            if tally.witness_escape.is_none() {
                tally.witness_escape = Some(word.clone());
            }
            // Uniform divergence requires every fine companion out within
            // two steps of the center.
            let mut uniform = true;
            for p in fine {
                match run.fate[p].escape_step() {
                    Some(s) => {
                        if s.abs_diff(center_step) > 2 {
                            uniform = false;
                        }
                    }
                    None => uniform = false,
                }
            }
            if !uniform {
                tally.any_ragged = true;
            }
            // A companion that completes at bounded scale while the center
            // escapes tears the neighborhood.
            for p in 1..1 + 2 * n {
                if run.fate[p].completed_inside() {
                    let norm = sup_norm(&run.cur[p * k..(p + 1) * k]);
                    if norm <= anchor {
                        tally.any_tear = true;
                        if tally.witness_tear.is_none() {
                            tally.witness_tear = Some(word.clone());
                        }
                        break;
                    }
                }
            }
        }
        None => {
            tally.bounded_words += mult;
            let center_norm = sup_norm(&run.cur[0..k]);
            let anchored = center_norm <= anchor;

            let mut fine_compesc = false;
            let mut sep_ratio: f64 = 0.0;
            for p in fine {
                if run.fate[p].completed_inside() {
                    let comp = &run.cur[p * k..(p + 1) * k];
                    let sep = comp
                        .iter()
                        .zip(&run.cur[0..k])
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0f64, f64::max);
                    sep_ratio = sep_ratio.max(sep / cfg.delta);
                } else {
                    fine_compesc = true;
                }
            }
            let coarse_exit = coarse.clone().any(|p| !run.fate[p].completed_inside());

            // A fine companion escaping for good while the center ends at
            // bounded scale is a delta-scale tear. Without the anchoring
            // gate this would fire on every cell the word's escape-radius
            // level set happens to cross.
            if fine_compesc && anchored {
                tally.any_fine_compesc = true;
            }
            tally.max_sep_ratio = tally.max_sep_ratio.max(sep_ratio);
            if anchored && coarse_exit {
                tally.any_tear = true;
                if tally.witness_tear.is_none() {
                    tally.witness_tear = Some(word.clone());
                }
            }
            if sep_ratio > cfg.kappa {
                if anchored {
                    tally.any_stretch = true;
                    if tally.witness_stretch.is_none() {
                        tally.witness_stretch = Some(word.clone());
                    }
                } else {
                    // Stretched but already past the starting scale: a
                    // truncated transit, conclusive for neither side.
                    tally.any_incomplete_stretch = true;
                }
            } else if !fine_compesc && tally.witness_calm.is_none() {
                tally.witness_calm = Some(word.clone());
            }
        }
    }
}

fn decide(tally: &Tally) -> PointClass {
    if tally.any_tear || tally.any_stretch || tally.any_fine_compesc {
        return PointClass::JuliaCandidate;
    }
    if tally.escaping_words > 0 {
        if tally.any_ragged {
            return PointClass::Undetermined;
        }
        return PointClass::FatouEscaping;
    }
    if tally.bounded_words > 0 && !tally.any_incomplete_stretch {
        return PointClass::FatouBounded;
    }
    PointClass::Undetermined
}
