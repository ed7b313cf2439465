//! Randomized certificates for the regularity constants of a problem.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Objective;
use crate::error::{Error, Result};
use crate::geometry::BregmanGeometry;

/// Default number of sampled pairs per certificate.
pub const CERTIFICATE_PAIRS: usize = 1_000;

/// Seed of the sampling stream used by construction-time certificates.
pub const CERTIFICATE_SEED: u64 = 0x5eed_ce27;

const SLACK: f64 = 1e-9;

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks `f(x) ≤ f(y) + ⟨∇f(y), x − y⟩ + L·D(x, y)` on random interior pairs.
pub fn certify_relative_smoothness(
    objective: &dyn Objective,
    geometry: &BregmanGeometry,
    l: f64,
    pairs: usize,
    seed: u64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..pairs {
        let x = geometry.random_point(&mut rng);
        let y = geometry.random_point(&mut rng);
        let fx = objective.value(&x)?;
        let fy = objective.value(&y)?;
        let gy = objective.gradient(&y)?;
        let diff: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
        let bound = fy + inner(&gy, &diff) + l * geometry.divergence(&x, &y)?;
        if fx > bound + SLACK {
            return Err(Error::CertificateViolation(format!(
                "relative smoothness with L = {l} fails on pair {k}: f(x) = {fx}, bound = {bound}"
            )));
        }
    }
    Ok(())
}

/// Checks `⟨∇f(x), x − y⟩ ≤ G·√(2 D(y, x))` on random interior pairs.
pub fn certify_relative_continuity(
    objective: &dyn Objective,
    geometry: &BregmanGeometry,
    g: f64,
    pairs: usize,
    seed: u64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..pairs {
        let x = geometry.random_point(&mut rng);
        let y = geometry.random_point(&mut rng);
        let gx = objective.gradient(&x)?;
        let diff: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
        let lhs = inner(&gx, &diff);
        let rhs = g * (2.0 * geometry.divergence(&y, &x)?).sqrt();
        if lhs > rhs + SLACK {
            return Err(Error::CertificateViolation(format!(
                "relative continuity with G = {g} fails on pair {k}: {lhs} > {rhs}"
            )));
        }
    }
    Ok(())
}
