//! Stochastic first-order oracle: `g(x; ω) = ∇f(x) + U` with zero-mean, bounded noise.
//!
//! Noise is counter-based. The draw at iteration `t` comes from a ChaCha
//! stream keyed by `(seed, t)`, so a query is a pure function of its inputs
//! and reruns are bit-identical regardless of call order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DualVector, GeometryKind, Norm, Point};
use crate::problems::Problem;

/// Number of probes used to estimate `σ` for utility-resampling noise.
pub const SIGMA_PROBES: u64 = 10_000;

const PROBE_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    /// `U = r·e` with `r ~ Uniform[0, σ]` and `e` a symmetric random unit vector in the dual norm.
    SphereUniform,
    /// Fisher gradient evaluated at utilities `u_ij (1 + δ_ij)`, `δ_ij ~ Uniform[−w, w]`.
    FisherUtilityResample {
        rel_width: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub sigma: f64,
    pub noise: NoiseKind,
    pub seed: u64,
}

impl OracleConfig {
    pub fn deterministic() -> Self {
        Self {
            sigma: 0.0,
            noise: NoiseKind::None,
            seed: 0,
        }
    }

    pub fn sphere_uniform(sigma: f64, seed: u64) -> Self {
        Self {
            sigma,
            noise: NoiseKind::SphereUniform,
            seed,
        }
    }

    /// `σ` is estimated when the oracle is built.
    pub fn fisher_resample(rel_width: f64, seed: u64) -> Self {
        Self {
            sigma: 0.0,
            noise: NoiseKind::FisherUtilityResample { rel_width },
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.noise {
            NoiseKind::None if self.sigma != 0.0 => Err(Error::InvalidArgument(format!(
                "noiseless oracle must have sigma = 0, got {}",
                self.sigma
            ))),
            NoiseKind::SphereUniform if !(self.sigma.is_finite() && self.sigma > 0.0) => {
                Err(Error::InvalidArgument(format!(
                    "sphere-uniform noise needs sigma > 0, got {}",
                    self.sigma
                )))
            }
            NoiseKind::FisherUtilityResample { rel_width }
                if !(rel_width > 0.0 && rel_width < 1.0) =>
            {
                Err(Error::InvalidArgument(format!(
                    "utility resampling width must lie in (0, 1), got {rel_width}"
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Oracle {
    problem: Problem,
    config: OracleConfig,
}

impl Oracle {
    pub fn new(problem: Problem, config: OracleConfig) -> Result<Self> {
        config.validate()?;
        if let NoiseKind::FisherUtilityResample { .. } = config.noise {
            if problem.market().is_none() {
                return Err(Error::InvalidArgument(
                    "utility resampling noise requires a Fisher market problem".into(),
                ));
            }
        }
        let mut oracle = Self { problem, config };
        if let NoiseKind::FisherUtilityResample { .. } = config.noise {
            oracle.config.sigma = oracle.estimate_sigma()?;
        }
        Ok(oracle)
    }

    pub fn deterministic(problem: Problem) -> Self {
        Self {
            problem,
            config: OracleConfig::deterministic(),
        }
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn sigma(&self) -> f64 {
        self.config.sigma
    }

    pub fn is_deterministic(&self) -> bool {
        self.config.noise == NoiseKind::None
    }

    fn stream(&self, seed: u64, t: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        rng
    }

    /// The oracle signal at `x` for iteration `t`.
    pub fn query(&self, x: &Point, t: u64) -> Result<DualVector> {
        match self.config.noise {
            NoiseKind::None => self.problem.gradient(x),
            NoiseKind::SphereUniform => {
                let mut g = self.problem.gradient(x)?;
                let u = self.sphere_noise(t);
                for (gi, ui) in g.as_mut_slice().iter_mut().zip(u.iter()) {
                    *gi += ui;
                }
                Ok(g)
            }
            NoiseKind::FisherUtilityResample { rel_width } => {
                self.resampled_gradient(x, self.config.seed, t, rel_width)
            }
        }
    }

    /// The additive sphere-uniform noise `U_t`; zero for other noise kinds.
    pub fn sphere_noise(&self, t: u64) -> DualVector {
        let geometry = self.problem.geometry();
        let dim = geometry.dim();
        if self.config.noise != NoiseKind::SphereUniform {
            return DualVector::zeros(dim);
        }
        let mut rng = self.stream(self.config.seed, t);
        let radius = rng.random_range(0.0..=self.config.sigma);
        let mut dir: Vec<f64> = match geometry.ambient_norm() {
            Norm::L2 => (0..dim).map(|_| rng.sample(StandardNormal)).collect(),
            Norm::L1 => {
                let block_len = match geometry.kind() {
                    GeometryKind::Entropic { block_len } => block_len,
                    _ => dim,
                };
                // Uniform on the surface of the unit ℓ^∞ cube, block by block.
                let mut v = Vec::with_capacity(dim);
                for _ in 0..dim / block_len {
                    let face = rng.random_range(0..block_len);
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    for k in 0..block_len {
                        v.push(if k == face {
                            sign
                        } else {
                            rng.random_range(-1.0..=1.0)
                        });
                    }
                }
                v
            }
        };
        let n = geometry.dual_norm(&dir);
        if n > 0.0 {
            for c in &mut dir {
                *c *= radius / n;
            }
        }
        DualVector::new(dir)
    }

    fn resampled_gradient(
        &self,
        x: &Point,
        seed: u64,
        t: u64,
        rel_width: f64,
    ) -> Result<DualVector> {
        let market = self
            .problem
            .market()
            .ok_or_else(|| Error::InvalidArgument("problem is not a Fisher market".into()))?;
        let mut rng = self.stream(seed, t);
        let deltas: Vec<f64> = (0..market.utilities().len())
            .map(|_| rng.random_range(-rel_width..=rel_width))
            .collect();
        market.perturbed_gradient(x, &deltas)
    }

    /// Largest observed dual-norm deviation of the resampled gradient.
    ///
    /// The deviation does not depend on the bids, so probes are taken at the barycenter.
    fn estimate_sigma(&self) -> Result<f64> {
        let NoiseKind::FisherUtilityResample { rel_width } = self.config.noise else {
            return Ok(self.config.sigma);
        };
        let geometry = self.problem.geometry();
        let x = geometry.barycenter();
        let exact = self.problem.gradient(&x)?;
        let probe_seed = self.config.seed ^ PROBE_SEED_SALT;
        let mut sigma = 0.0_f64;
        for t in 0..SIGMA_PROBES {
            let g = self.resampled_gradient(&x, probe_seed, t, rel_width)?;
            let dev: Vec<f64> = g.iter().zip(exact.iter()).map(|(a, b)| a - b).collect();
            sigma = sigma.max(geometry.dual_norm(&dev));
        }
        Ok(sigma)
    }
}
