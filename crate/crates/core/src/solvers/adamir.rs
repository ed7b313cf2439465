use crate::error::{Error, Result};
use crate::geometry::{BregmanGeometry, Point};
use crate::oracle::Oracle;

/// Symmetric divergence at or below which two initial points count as equal.
pub const DEGENERATE_INIT_TOL: f64 = 1e-14;

/// State of the adaptive mirror-descent recursion.
///
/// The step at iteration `t` is `γ_t = (ρ₀² + Σ_{1 ≤ s < t} ρ_s²)^{−1/2}`,
/// where `ρ₀² = D(X₀, X₁) + D(X₁, X₀)` and each later residual is the
/// symmetric divergence between consecutive iterates divided by `γ_s²`.
#[derive(Clone, Debug)]
pub struct AdaMirState {
    x_prev: Point,
    x_curr: Point,
    residual_sq_sum: f64,
    rho0_sq: f64,
    t: u64,
    avg_accumulator: Vec<f64>,
    avg_count: usize,
}

/// What one call to [`AdaMirState::step`] did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    /// Iteration index the step was taken from.
    pub t: u64,
    pub gamma: f64,
    pub rho_sq: f64,
}

impl AdaMirState {
    pub fn init(geometry: &BregmanGeometry, x0: Point, x1: Point) -> Result<Self> {
        let rho0_sq = geometry.symmetric_divergence(&x0, &x1)?;
        if !(rho0_sq > DEGENERATE_INIT_TOL) {
            return Err(Error::DegenerateInit(rho0_sq));
        }
        let avg_accumulator = x1.to_vec();
        Ok(Self {
            x_prev: x0,
            x_curr: x1,
            residual_sq_sum: rho0_sq,
            rho0_sq,
            t: 1,
            avg_accumulator,
            avg_count: 1,
        })
    }

    /// `γ_t` for the next step.
    pub fn step_size(&self) -> f64 {
        self.residual_sq_sum.sqrt().recip()
    }

    /// Takes one Bregman step `X_{t+1} = P_{X_t}(−γ_t g_t)` and records its residual.
    pub fn step(&mut self, geometry: &BregmanGeometry, oracle: &Oracle) -> Result<StepOutcome> {
        let gamma = self.step_size();
        let g = oracle.query(&self.x_curr, self.t)?;
        let next = geometry.prox_step(&self.x_curr, &g.scaled(-gamma))?;
        let rho_sq = geometry.symmetric_divergence(&self.x_curr, &next)? / (gamma * gamma);
        let outcome = StepOutcome {
            t: self.t,
            gamma,
            rho_sq,
        };
        self.residual_sq_sum += rho_sq;
        for (acc, v) in self.avg_accumulator.iter_mut().zip(next.iter()) {
            *acc += v;
        }
        self.avg_count += 1;
        self.x_prev = std::mem::replace(&mut self.x_curr, next);
        self.t += 1;
        Ok(outcome)
    }

    pub fn current(&self) -> &Point {
        &self.x_curr
    }

    pub fn previous(&self) -> &Point {
        &self.x_prev
    }

    pub fn iteration(&self) -> u64 {
        self.t
    }

    pub fn rho0_sq(&self) -> f64 {
        self.rho0_sq
    }

    /// `ρ₀² + Σ_{s < t} ρ_s²`.
    pub fn residual_sq_sum(&self) -> f64 {
        self.residual_sq_sum
    }

    /// Uniform average of `X₁, …, X_t`.
    pub fn ergodic_average(&self) -> Point {
        let n = self.avg_count as f64;
        Point::new(self.avg_accumulator.iter().map(|s| s / n).collect())
    }
}
