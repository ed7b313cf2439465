//! Sampled checks of the Bregman identities and of analytic gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{BregmanGeometry, DualVector, GeometryKind, Point};

/// Worst error seen over a batch of samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub max_error: f64,
}

/// Relative defect of the three-point identity
/// `D(p, x) − D(p, x') − D(x', x) = ⟨∇h(x') − ∇h(x), p − x'⟩`.
pub fn three_point_defect(
    geometry: &BregmanGeometry,
    p: &Point,
    x: &Point,
    x_new: &Point,
) -> Result<f64> {
    let d_px = geometry.divergence(p, x)?;
    let d_pn = geometry.divergence(p, x_new)?;
    let d_nx = geometry.divergence(x_new, x)?;
    let gx = geometry.grad_h(x)?;
    let gn = geometry.grad_h(x_new)?;
    let mut rhs = 0.0;
    let mut rhs_scale = 0.0;
    for i in 0..p.len() {
        let term = (gn[i] - gx[i]) * (p[i] - x_new[i]);
        rhs += term;
        rhs_scale += term.abs();
    }
    let lhs = d_px - d_pn - d_nx;
    let scale = (d_px.abs() + d_pn.abs() + d_nx.abs())
        .max(rhs_scale)
        .max(f64::MIN_POSITIVE);
    Ok((lhs - rhs).abs() / scale)
}

/// A dual vector that keeps the prox step well posed at `x`.
pub fn random_step<R: Rng + ?Sized>(
    geometry: &BregmanGeometry,
    x: &Point,
    rng: &mut R,
) -> DualVector {
    let v = x
        .iter()
        .map(|&xi| match geometry.kind() {
            // Keeps 1 − x v ≥ ½.
            GeometryKind::LogBarrier => rng.random_range(-1.0..0.5) / xi,
            _ => rng.random_range(-5.0..5.0),
        })
        .collect();
    DualVector::new(v)
}

/// Relative defect of `P_x(v) = Q(∇h(x) + v)`, the prox step against the mirror map.
pub fn prox_mirror_defect(geometry: &BregmanGeometry, x: &Point, v: &DualVector) -> Result<f64> {
    let prox = geometry.prox_step(x, v)?;
    let mut y = geometry.grad_h(x)?;
    for (yi, vi) in y.as_mut_slice().iter_mut().zip(v.iter()) {
        *yi += vi;
    }
    let mirrored = geometry.mirror_map(&y)?;
    Ok(prox
        .iter()
        .zip(mirrored.iter())
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max))
}

/// Three-point identity on `samples` random triples `(p, x, P_x(v))`.
pub fn check_three_point_identity(
    geometry: &BregmanGeometry,
    samples: usize,
    seed: u64,
) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_error: f64 = 0.0;
    for _ in 0..samples {
        let p = geometry.random_point(&mut rng);
        let x = geometry.random_point(&mut rng);
        let v = random_step(geometry, &x, &mut rng);
        let x_new = geometry.prox_step(&x, &v)?;
        max_error = max_error.max(three_point_defect(geometry, &p, &x, &x_new)?);
    }
    Ok(IdentityReport { samples, max_error })
}

/// Prox/mirror consistency on `samples` random `(x, v)` pairs.
pub fn check_prox_mirror_consistency(
    geometry: &BregmanGeometry,
    samples: usize,
    seed: u64,
) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_error: f64 = 0.0;
    for _ in 0..samples {
        let x = geometry.random_point(&mut rng);
        let v = random_step(geometry, &x, &mut rng);
        max_error = max_error.max(prox_mirror_defect(geometry, &x, &v)?);
    }
    Ok(IdentityReport { samples, max_error })
}

/// Largest absolute gap between `gradient` and central differences of `value` with step `eps`,
/// at `samples` random points of `geometry`.
///
/// The probes leave the feasible set, so `value` must accept points in a neighborhood of it.
pub fn check_gradient_fd<V, G>(
    value: V,
    gradient: G,
    geometry: &BregmanGeometry,
    samples: usize,
    eps: f64,
    seed: u64,
) -> Result<IdentityReport>
where
    V: Fn(&[f64]) -> Result<f64>,
    G: Fn(&[f64]) -> Result<DualVector>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_error: f64 = 0.0;
    for _ in 0..samples {
        let x = geometry.random_point(&mut rng);
        let g = gradient(&x)?;
        let mut probe = x.to_vec();
        for i in 0..x.len() {
            let xi = x[i];
            probe[i] = xi + eps;
            let up = value(&probe)?;
            probe[i] = xi - eps;
            let down = value(&probe)?;
            probe[i] = xi;
            max_error = max_error.max(((up - down) / (2.0 * eps) - g[i]).abs());
        }
    }
    Ok(IdentityReport { samples, max_error })
}
