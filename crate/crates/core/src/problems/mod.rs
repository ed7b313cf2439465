//! Convex test problems with declared relative-continuity (RC) or
//! relative-smoothness (RS) constants.

mod certify;
mod fisher;
mod linear;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BregmanGeometry, DualVector, Point};

pub use certify::{
    certify_relative_continuity, certify_relative_smoothness, CERTIFICATE_PAIRS, CERTIFICATE_SEED,
};
pub use fisher::{
    fisher_problem, make_random_market, FisherMarket, MarketManifest, ReferenceOptimum,
    FISHER_RS_CONSTANT, REFERENCE_RESIDUAL_TOL,
};
pub use linear::{linear_simplex_problem, make_synthetic_rc_problem, LinearObjective};

/// Tolerance on the first-order optimality of a declared optimum.
pub const OPTIMALITY_TOL: f64 = 1e-6;

/// A differentiable (or subdifferentiable) convex objective.
pub trait Objective: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &Point) -> Result<f64>;

    /// A (sub)gradient selection at `x`.
    fn gradient(&self, x: &Point) -> Result<DualVector>;

    /// The underlying market, for objectives that are Fisher markets.
    fn market(&self) -> Option<&FisherMarket> {
        None
    }
}

/// A certified minimizer and the minimum value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnownOptimum {
    pub point: Point,
    pub value: f64,
}

/// An objective paired with the reference geometry its regularity constants refer to.
#[derive(Clone)]
pub struct Problem {
    name: String,
    objective: Arc<dyn Objective>,
    geometry: BregmanGeometry,
    rc_constant: Option<f64>,
    rs_constant: Option<f64>,
    optimum: Option<KnownOptimum>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("geometry", &self.geometry)
            .field("rc_constant", &self.rc_constant)
            .field("rs_constant", &self.rs_constant)
            .field("optimum_value", &self.optimum.as_ref().map(|o| o.value))
            .finish()
    }
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        objective: impl Objective + 'static,
        geometry: BregmanGeometry,
    ) -> Result<Self> {
        if objective.dim() != geometry.dim() {
            return Err(Error::DimensionMismatch {
                expected: geometry.dim(),
                got: objective.dim(),
            });
        }
        Ok(Self {
            name: name.into(),
            objective: Arc::new(objective),
            geometry,
            rc_constant: None,
            rs_constant: None,
            optimum: None,
        })
    }

    pub fn with_rc_constant(mut self, g: f64) -> Result<Self> {
        self.rc_constant = Some(positive("RC constant", g)?);
        Ok(self)
    }

    pub fn with_rs_constant(mut self, l: f64) -> Result<Self> {
        self.rs_constant = Some(positive("RS constant", l)?);
        Ok(self)
    }

    /// Attaches a minimizer after checking first-order optimality to [`OPTIMALITY_TOL`].
    pub fn with_optimum(mut self, point: Point, value: f64) -> Result<Self> {
        self.geometry.check_point(&point)?;
        let g = self.objective.gradient(&point)?;
        let gap = self.geometry.stationarity_gap(&point, &g)?;
        if gap > OPTIMALITY_TOL {
            return Err(Error::CertificateViolation(format!(
                "declared optimum has stationarity gap {gap:e}"
            )));
        }
        let actual = self.objective.value(&point)?;
        if (actual - value).abs() > 1e-9 * (1.0 + value.abs()) {
            return Err(Error::CertificateViolation(format!(
                "declared optimal value {value} differs from f(x*) = {actual}"
            )));
        }
        self.optimum = Some(KnownOptimum { point, value });
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn geometry(&self) -> &BregmanGeometry {
        &self.geometry
    }

    pub fn objective(&self) -> &dyn Objective {
        self.objective.as_ref()
    }

    pub fn rc_constant(&self) -> Option<f64> {
        self.rc_constant
    }

    pub fn rs_constant(&self) -> Option<f64> {
        self.rs_constant
    }

    pub fn optimum(&self) -> Option<&KnownOptimum> {
        self.optimum.as_ref()
    }

    pub fn value(&self, x: &Point) -> Result<f64> {
        self.objective.value(x)
    }

    pub fn gradient(&self, x: &Point) -> Result<DualVector> {
        self.objective.gradient(x)
    }

    pub fn market(&self) -> Option<&FisherMarket> {
        self.objective.market()
    }
}

fn positive(what: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} must be positive, got {v}"
        )))
    }
}
