//! Numeric inequalities for nonnegative sequences that the step-size analysis relies on,
//! evaluated on random sequences as a transcription check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack granted to every comparison.
pub const LEMMA_REL_SLACK: f64 = 1e-9;
/// Longest random sequence drawn.
pub const MAX_SEQUENCE_LEN: usize = 200;

/// One evaluated inequality `lower ≤ value ≤ upper`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaEval {
    pub lemma: &'static str,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: f64,
}

impl LemmaEval {
    fn holds(&self, bound_scale: f64) -> bool {
        let upper = self.upper * bound_scale;
        let upper_ok = self.value <= upper + LEMMA_REL_SLACK * upper.abs();
        let lower_ok = self
            .lower
            .is_none_or(|lo| lo <= self.value + LEMMA_REL_SLACK * lo.abs());
        upper_ok && lower_ok
    }
}

/// `√Σa ≤ Σ_t a_t / √(Σ_{i≤t} a_i) ≤ 2√Σa`, with `0/0` terms read as zero.
pub fn sqrt_sum_bounds(a: &[f64]) -> LemmaEval {
    let mut partial = 0.0;
    let mut value = 0.0;
    for &x in a {
        partial += x;
        if partial > 0.0 {
            value += x / partial.sqrt();
        }
    }
    LemmaEval {
        lemma: "sqrt-sum",
        value,
        lower: Some(partial.sqrt()),
        upper: 2.0 * partial.sqrt(),
    }
}

/// `Σ_t a_t / (1 + Σ_{i≤t} a_i) ≤ 1 + ln(1 + Σa)`.
pub fn one_plus_log_bound(a: &[f64]) -> LemmaEval {
    let mut partial = 0.0;
    let mut value = 0.0;
    for &x in a {
        partial += x;
        value += x / (1.0 + partial);
    }
    LemmaEval {
        lemma: "one-plus-log",
        value,
        lower: None,
        upper: 1.0 + partial.ln_1p(),
    }
}

/// `Σ_t b_t / Σ_{i≤t} b_i ≤ 2 + ln(Σb / b₁)` for `b₁ > 0`.
pub fn ratio_log_bound(b: &[f64]) -> Result<LemmaEval> {
    let b1 = b.first().copied().unwrap_or(0.0);
    if !(b1 > 0.0) {
        return Err(Error::InvalidArgument(
            "the first element must be positive".into(),
        ));
    }
    let mut partial = 0.0;
    let mut value = 0.0;
    for &x in b {
        partial += x;
        value += x / partial;
    }
    Ok(LemmaEval {
        lemma: "ratio-log",
        value,
        lower: None,
        upper: 2.0 + (partial / b1).ln(),
    })
}

fn offset_checks(a0: f64, a: &[f64]) -> Result<(f64, f64)> {
    if !(a0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "a0 must be positive, got {a0}"
        )));
    }
    let cap = a.iter().copied().fold(0.0, f64::max);
    // Σ_{t<T} a_t: every element but the last.
    let head: f64 = a.iter().take(a.len().saturating_sub(1)).sum();
    Ok((cap, head))
}

/// With `a₀ > 0` and `a_t ∈ [0, a]`:
/// `√(a₀ + Σ_{t<T} a_t) − √a₀ ≤ Σ_{t≤T} a_t / √(a₀ + Σ_{i<t} a_i) ≤ 2a/√a₀ + 3√a + 3√(a₀ + Σ_{t<T} a_t)`.
///
/// `a` is taken as the largest element.
pub fn offset_sqrt_bounds(a0: f64, a: &[f64]) -> Result<LemmaEval> {
    let (cap, head) = offset_checks(a0, a)?;
    let mut before = a0;
    let mut value = 0.0;
    for &x in a {
        value += x / before.sqrt();
        before += x;
    }
    Ok(LemmaEval {
        lemma: "offset-sqrt",
        value,
        lower: Some((a0 + head).sqrt() - a0.sqrt()),
        upper: 2.0 * cap / a0.sqrt() + 3.0 * cap.sqrt() + 3.0 * (a0 + head).sqrt(),
    })
}

/// With `a₀ > 0` and `a_t ∈ [0, a]`:
/// `Σ_{t≤T} a_t / (a₀ + Σ_{i<t} a_i) ≤ 2 + 4a/a₀ + 2 ln(1 + Σ_{t<T} a_t / a₀)`.
pub fn offset_log_bound(a0: f64, a: &[f64]) -> Result<LemmaEval> {
    let (cap, head) = offset_checks(a0, a)?;
    let mut before = a0;
    let mut value = 0.0;
    for &x in a {
        value += x / before;
        before += x;
    }
    Ok(LemmaEval {
        lemma: "offset-log",
        value,
        lower: None,
        upper: 2.0 + 4.0 * cap / a0 + 2.0 * (head / a0).ln_1p(),
    })
}

/// Evaluates all five inequalities on one sequence; `a₀` feeds the offset forms.
pub fn evaluate_all(a0: f64, a: &[f64]) -> Result<Vec<LemmaEval>> {
    let mut out = vec![sqrt_sum_bounds(a), one_plus_log_bound(a)];
    if a.first().is_some_and(|&x| x > 0.0) {
        out.push(ratio_log_bound(a)?);
    }
    out.push(offset_sqrt_bounds(a0, a)?);
    out.push(offset_log_bound(a0, a)?);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceLemmaReport {
    pub samples: usize,
    pub comparisons: usize,
}

fn mixed_scale<R: Rng>(rng: &mut R) -> f64 {
    10f64.powf(rng.random_range(-6.0..3.0))
}

/// A random sequence of length `1..=200` with entries `10^U(−6, 3)`, about a tenth of them zero.
pub fn random_sequence<R: Rng>(rng: &mut R) -> Vec<f64> {
    let len = rng.random_range(1..=MAX_SEQUENCE_LEN);
    (0..len)
        .map(|_| {
            if rng.random_bool(0.1) {
                0.0
            } else {
                mixed_scale(rng)
            }
        })
        .collect()
}

/// Checks every inequality on `samples` random sequences.
pub fn check_sequence_lemmas(samples: usize, seed: u64) -> Result<SequenceLemmaReport> {
    check_sequence_lemmas_scaled(samples, seed, 1.0)
}

/// As [`check_sequence_lemmas`], with every upper bound multiplied by `bound_scale`.
///
/// A scale below one corrupts the bounds and must make the check fail.
pub fn check_sequence_lemmas_scaled(
    samples: usize,
    seed: u64,
    bound_scale: f64,
) -> Result<SequenceLemmaReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comparisons = 0;
    for _ in 0..samples {
        let mut a = random_sequence(&mut rng);
        // Half of the samples get a positive head so that the ratio form is exercised.
        if a[0] == 0.0 && rng.random_bool(0.5) {
            a[0] = mixed_scale(&mut rng);
        }
        let a0 = mixed_scale(&mut rng);
        for eval in evaluate_all(a0, &a)? {
            comparisons += 1;
            if !eval.holds(bound_scale) {
                return Err(Error::LemmaViolation {
                    lemma: eval.lemma,
                    lhs: eval.value,
                    bound: eval.upper * bound_scale,
                    sequence: a,
                });
            }
        }
    }
    Ok(SequenceLemmaReport {
        samples,
        comparisons,
    })
}
