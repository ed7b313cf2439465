//! Linear objectives on the simplex, relatively continuous with respect to negative entropy.

use super::certify::{certify_relative_continuity, CERTIFICATE_PAIRS, CERTIFICATE_SEED};
use super::{Objective, Problem};
use crate::error::{Error, Result};
use crate::geometry::{BregmanGeometry, DualVector, Point};

/// `f(x) = ⟨c, x⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearObjective {
    costs: Vec<f64>,
}

impl LinearObjective {
    pub fn new(costs: Vec<f64>) -> Result<Self> {
        if costs.is_empty() || costs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(
                "costs must be a nonempty vector of finite reals".into(),
            ));
        }
        Ok(Self { costs })
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }
}

impl Objective for LinearObjective {
    fn dim(&self) -> usize {
        self.costs.len()
    }

    fn value(&self, x: &Point) -> Result<f64> {
        if x.len() != self.costs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.costs.len(),
                got: x.len(),
            });
        }
        Ok(x.iter().zip(&self.costs).map(|(a, b)| a * b).sum())
    }

    fn gradient(&self, x: &Point) -> Result<DualVector> {
        if x.len() != self.costs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.costs.len(),
                got: x.len(),
            });
        }
        Ok(DualVector::new(self.costs.clone()))
    }
}

/// `⟨c, x⟩` on the unit simplex with entropic geometry.
///
/// The RC constant is `G = ‖c‖_∞ √(2/K)` (any positive value when `c = 0`),
/// verified on sampled pairs. The optimum is the vertex at the first minimal cost.
pub fn linear_simplex_problem(costs: Vec<f64>) -> Result<Problem> {
    let d = costs.len();
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "simplex problems need d >= 2, got {d}"
        )));
    }
    let objective = LinearObjective::new(costs)?;
    let geometry = BregmanGeometry::simplex(d);
    let sup = objective.costs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let g = if sup > 0.0 { sup } else { 1.0 } * (2.0 / geometry.modulus()).sqrt();
    certify_relative_continuity(
        &objective,
        &geometry,
        g,
        CERTIFICATE_PAIRS,
        CERTIFICATE_SEED,
    )?;

    let (argmin, min) =
        objective
            .costs
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (i, c)| if c < best.1 { (i, c) } else { best },
            );
    let mut vertex = vec![0.0; d];
    vertex[argmin] = 1.0;

    Problem::new(format!("linear-simplex-{d}"), objective, geometry)?
        .with_rc_constant(g)?
        .with_optimum(Point::new(vertex), min)
}

/// The synthetic RC instance: costs evenly spaced on `[0, 1]`, so `c = (0, 1)` for `d = 2`.
pub fn make_synthetic_rc_problem(d: usize) -> Result<Problem> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "the synthetic RC problem needs d >= 2, got {d}"
        )));
    }
    let costs = (0..d).map(|i| i as f64 / (d - 1) as f64).collect();
    let mut problem = linear_simplex_problem(costs)?;
    problem.name = format!("synthetic-rc-{d}");
    Ok(problem)
}
