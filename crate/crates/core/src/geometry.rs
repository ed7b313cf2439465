//! Bregman reference functions and the maps they induce.
//!
//! Three reference functions `h` are supported, each with closed-form
//! divergence, mirror map and prox-mapping:
//!
//! | kind          | `h(x)`              | domain                         | prox `P_x(v)`                  |
//! |---------------|---------------------|--------------------------------|--------------------------------|
//! | Euclidean     | `½‖x‖₂²`            | `ℝᵈ`                           | `x + v`                        |
//! | Entropic      | `Σ xᵢ log xᵢ`       | product of unit simplices      | `xᵢ·exp(vᵢ)`, renormalized     |
//! | LogBarrier    | `−Σ log xᵢ`         | positive orthant               | `xᵢ / (1 − xᵢvᵢ)`              |
//!
//! The entropic kind partitions the coordinates into consecutive blocks of
//! equal length, each constrained to its own simplex; a single simplex is the
//! one-block case. Divergences and prox steps factorize over blocks.

use std::ops::Deref;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower clamp applied to simplex coordinates before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-300;

/// Tolerance on simplex block sums when checking membership.
const SIMPLEX_SUM_TOL: f64 = 1e-8;

/// A primal point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

/// An element of the dual space (gradients, oracle signals, mirror coordinates).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualVector(Vec<f64>);

macro_rules! vector_newtype {
    ($name:ident) => {
        impl $name {
            pub fn new(coords: Vec<f64>) -> Self {
                Self(coords)
            }

            pub fn zeros(dim: usize) -> Self {
                Self(vec![0.0; dim])
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn as_mut_slice(&mut self) -> &mut [f64] {
                &mut self.0
            }

            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }
        }

        impl Deref for $name {
            type Target = [f64];

            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(coords: Vec<f64>) -> Self {
                Self(coords)
            }
        }
    };
}

vector_newtype!(Point);
vector_newtype!(DualVector);

impl DualVector {
    pub fn scaled(&self, factor: f64) -> DualVector {
        DualVector(self.0.iter().map(|v| v * factor).collect())
    }
}

/// Norm in which the reference function is strongly convex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    L2,
    /// ℓ¹ within each simplex block, combined across blocks in ℓ²
    /// (plain ℓ¹ for a single simplex). Its dual is ℓ^∞ per block, ℓ² across.
    L1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometryKind {
    Euclidean,
    Entropic { block_len: usize },
    LogBarrier,
}

/// A Bregman reference function `h` on `ℝᵈ` together with its strong-convexity data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BregmanGeometry {
    kind: GeometryKind,
    dim: usize,
    modulus: f64,
}

impl BregmanGeometry {
    pub fn euclidean(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            kind: GeometryKind::Euclidean,
            dim,
            modulus: 1.0,
        }
    }

    /// Negative entropy on the unit simplex of `ℝᵈ`.
    pub fn simplex(dim: usize) -> Self {
        Self::product_simplex(1, dim)
    }

    /// Negative entropy summed over `blocks` simplices of `block_len` coordinates each.
    pub fn product_simplex(blocks: usize, block_len: usize) -> Self {
        assert!(blocks > 0 && block_len > 0, "block counts must be positive");
        Self {
            kind: GeometryKind::Entropic { block_len },
            dim: blocks * block_len,
            modulus: 1.0,
        }
    }

    /// Log-barrier (Burg entropy) on the positive orthant. The declared modulus
    /// `K = 1` holds on the unit box `(0, 1]ᵈ`.
    pub fn log_barrier(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            kind: GeometryKind::LogBarrier,
            dim,
            modulus: 1.0,
        }
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Strong-convexity modulus `K` of `h` with respect to [`Self::ambient_norm`].
    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn ambient_norm(&self) -> Norm {
        match self.kind {
            GeometryKind::Entropic { .. } => Norm::L1,
            GeometryKind::Euclidean | GeometryKind::LogBarrier => Norm::L2,
        }
    }

    fn block_len(&self) -> usize {
        match self.kind {
            GeometryKind::Entropic { block_len } => block_len,
            _ => self.dim,
        }
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        match self.ambient_norm() {
            Norm::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Norm::L1 => x
                .chunks(self.block_len())
                .map(|b| b.iter().map(|v| v.abs()).sum::<f64>().powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }

    pub fn dual_norm(&self, v: &[f64]) -> f64 {
        match self.ambient_norm() {
            Norm::L2 => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            Norm::L1 => v
                .chunks(self.block_len())
                .map(|b| b.iter().fold(0.0_f64, |m, c| m.max(c.abs())).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }

    /// Checks that `x` lies in the domain of `h`.
    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        self.check_dim(x.len())?;
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::DomainViolation(format!(
                "coordinate {i} is not finite ({})",
                x[i]
            )));
        }
        match self.kind {
            GeometryKind::Euclidean => Ok(()),
            GeometryKind::LogBarrier => match x.iter().position(|&v| v <= 0.0) {
                Some(i) => Err(Error::DomainViolation(format!(
                    "coordinate {i} = {} is not positive",
                    x[i]
                ))),
                None => Ok(()),
            },
            GeometryKind::Entropic { block_len } => {
                if let Some(i) = x.iter().position(|&v| v < 0.0) {
                    return Err(Error::DomainViolation(format!(
                        "coordinate {i} = {} is negative",
                        x[i]
                    )));
                }
                for (k, block) in x.chunks(block_len).enumerate() {
                    let s: f64 = block.iter().sum();
                    if (s - 1.0).abs() > SIMPLEX_SUM_TOL {
                        return Err(Error::DomainViolation(format!(
                            "simplex block {k} sums to {s}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.check_point(x).is_ok()
    }

    /// The canonical starting point: origin, simplex barycenter, or all-ones.
    pub fn barycenter(&self) -> Point {
        let c = match self.kind {
            GeometryKind::Euclidean => 0.0,
            GeometryKind::Entropic { block_len } => 1.0 / block_len as f64,
            GeometryKind::LogBarrier => 1.0,
        };
        Point(vec![c; self.dim])
    }

    pub fn h_value(&self, x: &Point) -> Result<f64> {
        self.check_point(x)?;
        Ok(match self.kind {
            GeometryKind::Euclidean => 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
            GeometryKind::Entropic { .. } => x.iter().map(|&v| xlogx(v)).sum(),
            GeometryKind::LogBarrier => -x.iter().map(|v| v.ln()).sum::<f64>(),
        })
    }

    pub fn grad_h(&self, x: &Point) -> Result<DualVector> {
        self.check_point(x)?;
        Ok(DualVector(match self.kind {
            GeometryKind::Euclidean => x.to_vec(),
            GeometryKind::Entropic { .. } => x.iter().map(|&v| 1.0 + clamped_ln(v)).collect(),
            GeometryKind::LogBarrier => x.iter().map(|v| -1.0 / v).collect(),
        }))
    }

    /// `D(y, x) = h(y) − h(x) − ⟨∇h(x), y − x⟩`.
    pub fn divergence(&self, y: &Point, x: &Point) -> Result<f64> {
        self.check_point(y)?;
        self.check_point(x)?;
        Ok(match self.kind {
            GeometryKind::Euclidean => {
                0.5 * y
                    .iter()
                    .zip(x.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            }
            // Each summand y log(y/x) − y + x is nonnegative.
            GeometryKind::Entropic { .. } => y
                .iter()
                .zip(x.iter())
                .map(|(&yi, &xi)| {
                    let cross = if yi > 0.0 {
                        yi * (yi.ln() - clamped_ln(xi))
                    } else {
                        0.0
                    };
                    cross - yi + xi
                })
                .sum(),
            GeometryKind::LogBarrier => y
                .iter()
                .zip(x.iter())
                .map(|(yi, xi)| {
                    let r = yi / xi;
                    r - r.ln() - 1.0
                })
                .sum(),
        })
    }

    /// `D(x, y) + D(y, x) = ⟨∇h(x) − ∇h(y), x − y⟩`.
    pub fn symmetric_divergence(&self, x: &Point, y: &Point) -> Result<f64> {
        let gx = self.grad_h(x)?;
        let gy = self.grad_h(y)?;
        let s: f64 = gx
            .iter()
            .zip(gy.iter())
            .zip(x.iter().zip(y.iter()))
            .map(|((a, b), (p, q))| (a - b) * (p - q))
            .sum();
        // Each coordinate term is nonnegative in exact arithmetic.
        Ok(s.max(0.0))
    }

    /// `Q(y) = argmax_x {⟨y, x⟩ − h(x)}`.
    pub fn mirror_map(&self, y: &DualVector) -> Result<Point> {
        self.check_dim(y.len())?;
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::DomainViolation(format!(
                "dual coordinate {i} is not finite"
            )));
        }
        match self.kind {
            GeometryKind::Euclidean => Ok(Point(y.to_vec())),
            GeometryKind::Entropic { block_len } => {
                let mut out = y.to_vec();
                for block in out.chunks_mut(block_len) {
                    softmax_in_place(block);
                }
                Ok(Point(out))
            }
            GeometryKind::LogBarrier => {
                if let Some(i) = y.iter().position(|&v| v >= 0.0) {
                    return Err(Error::NoMaximizer(format!(
                        "dual coordinate {i} = {} is not strictly negative",
                        y[i]
                    )));
                }
                Ok(Point(y.iter().map(|v| -1.0 / v).collect()))
            }
        }
    }

    /// `P_x(v) = argmin_y {⟨v, x − y⟩ + D(y, x)}`, equal to `Q(∇h(x) + v)`.
    pub fn prox_step(&self, x: &Point, v: &DualVector) -> Result<Point> {
        self.check_point(x)?;
        self.check_dim(v.len())?;
        if let Some(i) = v.iter().position(|c| !c.is_finite()) {
            return Err(Error::DomainViolation(format!(
                "step coordinate {i} is not finite"
            )));
        }
        match self.kind {
            GeometryKind::Euclidean => {
                Ok(Point(x.iter().zip(v.iter()).map(|(a, b)| a + b).collect()))
            }
            GeometryKind::Entropic { block_len } => {
                let mut logits: Vec<f64> = x
                    .iter()
                    .zip(v.iter())
                    .map(|(&xi, vi)| clamped_ln(xi) + vi)
                    .collect();
                for block in logits.chunks_mut(block_len) {
                    softmax_in_place(block);
                }
                Ok(Point(logits))
            }
            GeometryKind::LogBarrier => x
                .iter()
                .zip(v.iter())
                .enumerate()
                .map(|(index, (xi, vi))| {
                    let denominator = 1.0 - xi * vi;
                    if denominator <= 0.0 {
                        Err(Error::StepTooLarge { index, denominator })
                    } else {
                        Ok(xi / denominator)
                    }
                })
                .collect::<Result<Vec<_>>>()
                .map(Point),
        }
    }

    /// `sup_{y ∈ X} ⟨g, x − y⟩`: zero exactly at first-order stationary points.
    ///
    /// For the unconstrained kinds this degenerates to a norm-style surrogate.
    pub fn stationarity_gap(&self, x: &Point, g: &DualVector) -> Result<f64> {
        self.check_point(x)?;
        self.check_dim(g.len())?;
        Ok(match self.kind {
            GeometryKind::Euclidean => g.iter().map(|c| c * c).sum::<f64>().sqrt(),
            GeometryKind::Entropic { block_len } => x
                .chunks(block_len)
                .zip(g.chunks(block_len))
                .map(|(xb, gb)| {
                    let inner: f64 = xb.iter().zip(gb).map(|(a, b)| a * b).sum();
                    let min = gb.iter().copied().fold(f64::INFINITY, f64::min);
                    (inner - min).max(0.0)
                })
                .sum(),
            GeometryKind::LogBarrier => x
                .iter()
                .zip(g.iter())
                .map(|(xi, gi)| (xi * gi).abs() + (-gi).max(0.0))
                .sum(),
        })
    }

    /// Draws a point from the interior of the domain.
    ///
    /// Simplex blocks use powered exponential weights so that samples range
    /// from near-uniform to strongly concentrated.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let coords = match self.kind {
            GeometryKind::Euclidean => (0..self.dim).map(|_| rng.random_range(-5.0..5.0)).collect(),
            GeometryKind::LogBarrier => (0..self.dim)
                .map(|_| rng.random_range(-3.0_f64..3.0).exp())
                .collect(),
            GeometryKind::Entropic { block_len } => {
                let mut out = Vec::with_capacity(self.dim);
                for _ in 0..self.dim / block_len {
                    let power: f64 = rng.random_range(1.0..4.0);
                    let block: Vec<f64> = (0..block_len)
                        .map(|_| {
                            let e: f64 = Exp1.sample(rng);
                            e.powf(power).max(1e-12)
                        })
                        .collect();
                    let s: f64 = block.iter().sum();
                    out.extend(block.into_iter().map(|w| w / s));
                }
                out
            }
        };
        Point(coords)
    }
}

fn xlogx(v: f64) -> f64 {
    if v > 0.0 {
        v * v.ln()
    } else {
        0.0
    }
}

pub(crate) fn clamped_ln(v: f64) -> f64 {
    v.max(LOG_FLOOR).ln()
}

/// Stabilized softmax over one simplex block, clamped below at [`LOG_FLOOR`].
pub(crate) fn softmax_in_place(block: &mut [f64]) {
    let max = block.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for w in block.iter_mut() {
        *w = (*w - max).exp();
        total += *w;
    }
    for w in block.iter_mut() {
        *w = (*w / total).max(LOG_FLOOR);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec())
    }

    fn dv(v: &[f64]) -> DualVector {
        DualVector::new(v.to_vec())
    }

    #[test]
    fn h_value_examples() {
        assert_eq!(
            BregmanGeometry::simplex(2)
                .h_value(&p(&[1.0, 0.0]))
                .unwrap(),
            0.0
        );
        assert_eq!(
            BregmanGeometry::euclidean(2)
                .h_value(&p(&[3.0, 4.0]))
                .unwrap(),
            12.5
        );
        assert_eq!(
            BregmanGeometry::log_barrier(2)
                .h_value(&p(&[1.0, 1.0]))
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn h_value_rejects_out_of_domain() {
        let lb = BregmanGeometry::log_barrier(2);
        assert!(matches!(
            lb.h_value(&p(&[1.0, 0.0])),
            Err(Error::DomainViolation(_))
        ));
        let ent = BregmanGeometry::simplex(2);
        assert!(matches!(
            ent.h_value(&p(&[0.7, 0.7])),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            ent.h_value(&p(&[1.2, -0.2])),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            ent.h_value(&p(&[1.0])),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    /// `h(y) − h(x) − ⟨∇h(x), y − x⟩` evaluated literally.
    fn divergence_from_definition(g: &BregmanGeometry, y: &Point, x: &Point) -> f64 {
        let gx = g.grad_h(x).unwrap();
        let lin: f64 = gx
            .iter()
            .zip(y.iter().zip(x.iter()))
            .map(|(a, (b, c))| a * (b - c))
            .sum();
        g.h_value(y).unwrap() - g.h_value(x).unwrap() - lin
    }

    #[test]
    fn divergence_examples() {
        for g in [
            BregmanGeometry::euclidean(2),
            BregmanGeometry::simplex(2),
            BregmanGeometry::log_barrier(2),
        ] {
            let x = p(&[0.25, 0.75]);
            assert_eq!(g.divergence(&x, &x).unwrap(), 0.0);
        }

        // Itakura-Saito by hand: 2 (1/2 − log(1/2) − 1)
        let lb = BregmanGeometry::log_barrier(2);
        let (y, x) = (p(&[1.0, 1.0]), p(&[2.0, 2.0]));
        let expected = 2.0 * (0.5 - 0.5_f64.ln() - 1.0);
        assert_abs_diff_eq!(expected, 0.386_294_361_119_890_6, epsilon = 1e-12);
        assert_abs_diff_eq!(lb.divergence(&y, &x).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(
            divergence_from_definition(&lb, &y, &x),
            expected,
            epsilon = 1e-12
        );

        // Relative entropy by hand: ½ log 2 + ½ log(2/3)
        let ent = BregmanGeometry::simplex(2);
        let (y, x) = (p(&[0.5, 0.5]), p(&[0.25, 0.75]));
        let expected = 0.5 * 2.0_f64.ln() + 0.5 * (2.0_f64 / 3.0).ln();
        assert_abs_diff_eq!(expected, 0.143_841_036_225_890_4, epsilon = 1e-12);
        assert_abs_diff_eq!(ent.divergence(&y, &x).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(
            divergence_from_definition(&ent, &y, &x),
            expected,
            epsilon = 1e-12
        );
    }

    #[test]
    fn euclidean_divergence_carries_the_half_factor() {
        let g = BregmanGeometry::euclidean(2);
        assert_eq!(g.divergence(&p(&[1.0, 1.0]), &p(&[0.0, 0.0])).unwrap(), 1.0);
    }

    #[test]
    fn mirror_map_examples() {
        let ent = BregmanGeometry::simplex(2);
        assert_eq!(ent.mirror_map(&dv(&[0.0, 0.0])).unwrap(), p(&[0.5, 0.5]));
        let lb = BregmanGeometry::log_barrier(2);
        assert_eq!(lb.mirror_map(&dv(&[-1.0, -2.0])).unwrap(), p(&[1.0, 0.5]));
        let eu = BregmanGeometry::euclidean(2);
        assert_eq!(eu.mirror_map(&dv(&[1.0, 2.0])).unwrap(), p(&[1.0, 2.0]));
    }

    #[test]
    fn log_barrier_mirror_map_requires_negative_dual() {
        let lb = BregmanGeometry::log_barrier(2);
        assert!(matches!(
            lb.mirror_map(&dv(&[-1.0, 0.0])),
            Err(Error::NoMaximizer(_))
        ));
        assert!(matches!(
            lb.mirror_map(&dv(&[3.0, -1.0])),
            Err(Error::NoMaximizer(_))
        ));
    }

    #[test]
    fn prox_step_examples() {
        for g in [
            BregmanGeometry::euclidean(2),
            BregmanGeometry::simplex(2),
            BregmanGeometry::log_barrier(2),
        ] {
            let x = p(&[0.25, 0.75]);
            let y = g.prox_step(&x, &DualVector::zeros(2)).unwrap();
            assert_abs_diff_eq!(y[0], 0.25, epsilon = 1e-15);
            assert_abs_diff_eq!(y[1], 0.75, epsilon = 1e-15);
        }
        let ent = BregmanGeometry::simplex(2);
        let y = ent
            .prox_step(&p(&[0.5, 0.5]), &dv(&[3.0_f64.ln(), 0.0]))
            .unwrap();
        assert_abs_diff_eq!(y[0], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(y[1], 0.25, epsilon = 1e-15);
        let eu = BregmanGeometry::euclidean(2);
        assert_eq!(
            eu.prox_step(&p(&[1.0, 1.0]), &dv(&[-1.0, 2.0])).unwrap(),
            p(&[0.0, 3.0])
        );
    }

    #[test]
    fn log_barrier_prox_reports_step_too_large() {
        let lb = BregmanGeometry::log_barrier(2);
        let err = lb.prox_step(&p(&[1.0, 2.0]), &dv(&[0.1, 0.5])).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { index: 1, .. }));
        let ok = lb.prox_step(&p(&[1.0, 2.0]), &dv(&[0.5, -1.0])).unwrap();
        assert_eq!(ok, p(&[2.0, 2.0 / 3.0]));
    }

    #[test]
    fn entropic_prox_survives_huge_steps() {
        let ent = BregmanGeometry::simplex(3);
        let y = ent
            .prox_step(&p(&[0.2, 0.3, 0.5]), &dv(&[1e4, -1e4, 0.0]))
            .unwrap();
        assert!(y.iter().all(|&v| v > 0.0 && v.is_finite()));
        assert_abs_diff_eq!(y.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_divergence_examples() {
        let eu = BregmanGeometry::euclidean(2);
        assert_eq!(
            eu.symmetric_divergence(&p(&[0.0, 0.0]), &p(&[1.0, 1.0]))
                .unwrap(),
            2.0
        );
        let ent = BregmanGeometry::simplex(2);
        let (x, y) = (p(&[0.5, 0.5]), p(&[0.25, 0.75]));
        assert_eq!(ent.symmetric_divergence(&x, &x).unwrap(), 0.0);
        let forward = 0.5 * 2.0_f64.ln() + 0.5 * (2.0_f64 / 3.0).ln();
        let backward = 0.25 * 0.5_f64.ln() + 0.75 * 1.5_f64.ln();
        assert_abs_diff_eq!(backward, 0.130_812_035_941_137_2, epsilon = 1e-12);
        assert_abs_diff_eq!(
            ent.symmetric_divergence(&x, &y).unwrap(),
            forward + backward,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(forward + backward, 0.274_653, epsilon = 1e-6);
    }

    #[test]
    fn product_simplex_factorizes() {
        let prod = BregmanGeometry::product_simplex(2, 2);
        let single = BregmanGeometry::simplex(2);
        let (y, x) = (p(&[0.5, 0.5, 0.1, 0.9]), p(&[0.25, 0.75, 0.6, 0.4]));
        let split = single
            .divergence(&p(&[0.5, 0.5]), &p(&[0.25, 0.75]))
            .unwrap()
            + single.divergence(&p(&[0.1, 0.9]), &p(&[0.6, 0.4])).unwrap();
        assert_abs_diff_eq!(prod.divergence(&y, &x).unwrap(), split, epsilon = 1e-14);
        let stepped = prod.prox_step(&x, &dv(&[1.0, 0.0, 0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(stepped[0] + stepped[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(stepped[2] + stepped[3], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn random_points_are_in_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [
            BregmanGeometry::euclidean(4),
            BregmanGeometry::product_simplex(3, 4),
            BregmanGeometry::log_barrier(4),
        ] {
            for _ in 0..100 {
                let x = g.random_point(&mut rng);
                g.check_point(&x).unwrap();
                if let GeometryKind::Entropic { .. } = g.kind() {
                    assert!(x.iter().all(|&v| v > 0.0));
                }
            }
        }
    }

    #[test]
    fn norms_are_dual() {
        let g = BregmanGeometry::simplex(3);
        let x = [0.5, -0.25, 0.25];
        let v = [1.0, -3.0, 2.0];
        assert_eq!(g.norm(&x), 1.0);
        assert_eq!(g.dual_norm(&v), 3.0);
        let inner: f64 = x.iter().zip(&v).map(|(a, b)| a * b).sum();
        assert!(inner.abs() <= g.norm(&x) * g.dual_norm(&v));
    }

    #[test]
    fn stationarity_gap_vanishes_at_simplex_vertex_minimizer() {
        let g = BregmanGeometry::simplex(2);
        let c = dv(&[0.0, 1.0]);
        assert_eq!(g.stationarity_gap(&p(&[1.0, 0.0]), &c).unwrap(), 0.0);
        assert_eq!(g.stationarity_gap(&p(&[0.5, 0.5]), &c).unwrap(), 0.5);
    }
}
