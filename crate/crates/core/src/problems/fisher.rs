//! Linear Fisher markets in the Eisenberg-Gale style potential form.
//!
//! `N` buyers with unit budgets place bids `b_ij` on `M` goods. Prices are
//! column sums `p_j = Σ_i b_ij`, and equilibrium bids minimize
//!
//! ```text
//! Φ(b) = Σ_j p_j log p_j − Σ_ij b_ij log u_ij
//! ```
//!
//! over the product of the buyers' simplices. Bids are stored row-major,
//! `b[i * M + j]`.

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::certify::{certify_relative_smoothness, CERTIFICATE_PAIRS, CERTIFICATE_SEED};
use super::{Objective, Problem};
use crate::error::{Error, Result};
use crate::geometry::{BregmanGeometry, DualVector, Point};
use crate::solvers::pr_step;

/// RS constant of `Φ` relative to the summed negative entropy.
pub const FISHER_RS_CONSTANT: f64 = 1.0;

/// Symmetric-divergence residual at which the proportional-response reference run stops.
pub const REFERENCE_RESIDUAL_TOL: f64 = 1e-12;

const MAX_REFERENCE_ITERATIONS: usize = 2_000_000;
const MAX_POLISH_ITERATIONS: usize = 200_000;
const POLISH_PATIENCE: usize = 1_000;

#[derive(Clone, Debug, PartialEq)]
pub struct FisherMarket {
    buyers: usize,
    goods: usize,
    utilities: Vec<f64>,
    log_utilities: Vec<f64>,
    provenance: Option<(u64, f64, f64)>,
}

/// JSON manifest of a market: `{n, m, seed, lo, hi, u}` with `u` row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketManifest {
    pub n: usize,
    pub m: usize,
    pub seed: Option<u64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub u: Vec<f64>,
}

impl FisherMarket {
    pub fn new(buyers: usize, goods: usize, utilities: Vec<f64>) -> Result<Self> {
        if buyers == 0 || goods == 0 {
            return Err(Error::InvalidArgument(
                "a market needs at least one buyer and one good".into(),
            ));
        }
        let cells = buyers.checked_mul(goods).ok_or_else(|| {
            Error::InvalidArgument(format!("market size {buyers}x{goods} overflows"))
        })?;
        if utilities.len() != cells {
            return Err(Error::DimensionMismatch {
                expected: cells,
                got: utilities.len(),
            });
        }
        if let Some(k) = utilities.iter().position(|u| !(u.is_finite() && *u > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "utility ({}, {}) = {} is not a positive real",
                k / goods,
                k % goods,
                utilities[k]
            )));
        }
        let log_utilities = utilities.iter().map(|u| u.ln()).collect();
        Ok(Self {
            buyers,
            goods,
            utilities,
            log_utilities,
            provenance: None,
        })
    }

    pub fn buyers(&self) -> usize {
        self.buyers
    }

    pub fn goods(&self) -> usize {
        self.goods
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    pub fn utility(&self, i: usize, j: usize) -> f64 {
        self.utilities[i * self.goods + j]
    }

    pub(crate) fn log_utilities(&self) -> &[f64] {
        &self.log_utilities
    }

    /// The product-of-simplices entropic geometry of the bid space.
    pub fn geometry(&self) -> BregmanGeometry {
        BregmanGeometry::product_simplex(self.buyers, self.goods)
    }

    pub fn prices(&self, b: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.goods];
        for row in b.chunks(self.goods) {
            for (pj, bij) in p.iter_mut().zip(row) {
                *pj += bij;
            }
        }
        p
    }

    /// `Φ(b)`, with `0 log 0 = 0`.
    pub fn objective(&self, b: &Point) -> Result<f64> {
        self.geometry().check_point(b)?;
        self.objective_extended(b)
    }

    /// `Φ` on any finite bids with nonnegative prices; rows need not lie on the simplex.
    pub fn objective_extended(&self, b: &[f64]) -> Result<f64> {
        self.check_extended(b)?;
        let p = self.prices(b);
        if let Some(j) = p.iter().position(|&pj| pj < 0.0) {
            return Err(Error::DomainViolation(format!(
                "good {j} has negative price"
            )));
        }
        let market_term: f64 = p
            .iter()
            .map(|&pj| if pj > 0.0 { pj * pj.ln() } else { 0.0 })
            .sum();
        let utility_term: f64 = b
            .iter()
            .zip(&self.log_utilities)
            .map(|(bij, lu)| bij * lu)
            .sum();
        Ok(market_term - utility_term)
    }

    /// `∇Φ(b)_ij = 1 + log p_j − log u_ij`.
    pub fn gradient(&self, b: &Point) -> Result<DualVector> {
        self.gradient_with_log_utilities(b, &self.log_utilities)
    }

    /// `∇Φ` on any finite bids with positive prices.
    pub fn gradient_extended(&self, b: &[f64]) -> Result<DualVector> {
        self.check_extended(b)?;
        let p = self.prices(b);
        if let Some(j) = p.iter().position(|&pj| pj <= 0.0) {
            return Err(Error::DomainViolation(format!("good {j} has zero price")));
        }
        Ok(self.gradient_at_prices(&p, &self.log_utilities))
    }

    fn check_extended(&self, b: &[f64]) -> Result<()> {
        if b.len() != self.utilities.len() {
            return Err(Error::DimensionMismatch {
                expected: self.utilities.len(),
                got: b.len(),
            });
        }
        if let Some(k) = b.iter().position(|v| !v.is_finite()) {
            return Err(Error::DomainViolation(format!("bid {k} is {}", b[k])));
        }
        Ok(())
    }

    /// The gradient of `Φ(·; u')` for perturbed utilities `u'_ij = u_ij (1 + δ_ij)`.
    pub fn perturbed_gradient(&self, b: &Point, deltas: &[f64]) -> Result<DualVector> {
        if deltas.len() != self.utilities.len() {
            return Err(Error::DimensionMismatch {
                expected: self.utilities.len(),
                got: deltas.len(),
            });
        }
        let log_u: Vec<f64> = self
            .log_utilities
            .iter()
            .zip(deltas)
            .map(|(lu, d)| lu + d.ln_1p())
            .collect();
        self.gradient_with_log_utilities(b, &log_u)
    }

    fn gradient_with_log_utilities(&self, b: &Point, log_u: &[f64]) -> Result<DualVector> {
        let p = self.positive_prices(b)?;
        Ok(self.gradient_at_prices(&p, log_u))
    }

    fn gradient_at_prices(&self, p: &[f64], log_u: &[f64]) -> DualVector {
        let log_p: Vec<f64> = p.iter().map(|v| v.ln()).collect();
        let g = log_u
            .chunks(self.goods)
            .flat_map(|row| row.iter().zip(&log_p).map(|(lu, lp)| 1.0 + lp - lu))
            .collect();
        DualVector::new(g)
    }

    /// Prices of a feasible bid matrix, all of which must be positive.
    pub(crate) fn positive_prices(&self, b: &Point) -> Result<Vec<f64>> {
        self.geometry().check_point(b)?;
        let p = self.prices(b);
        if let Some(j) = p.iter().position(|&pj| pj <= 0.0) {
            return Err(Error::DomainViolation(format!("good {j} has zero price")));
        }
        Ok(p)
    }

    /// Returns the declared RS constant after checking it on sampled pairs.
    pub fn rs_certificate(&self) -> Result<f64> {
        certify_relative_smoothness(
            self,
            &self.geometry(),
            FISHER_RS_CONSTANT,
            CERTIFICATE_PAIRS,
            CERTIFICATE_SEED,
        )?;
        Ok(FISHER_RS_CONSTANT)
    }

    /// Runs proportional response from the barycenter until the symmetric
    /// residual drops below `tol`, then polishes to float resolution.
    pub fn reference_optimum(&self, tol: f64) -> Result<ReferenceOptimum> {
        let geometry = self.geometry();
        let mut b = geometry.barycenter();
        let mut iterations = 0;
        let mut residual = f64::INFINITY;
        while residual >= tol {
            if iterations == MAX_REFERENCE_ITERATIONS {
                return Err(Error::CertificateViolation(format!(
                    "proportional response did not reach residual {tol:e} \
                     within {MAX_REFERENCE_ITERATIONS} iterations (last {residual:e})"
                )));
            }
            let next = pr_step(self, &b)?;
            residual = geometry.symmetric_divergence(&b, &next)?;
            b = next;
            iterations += 1;
        }
        // Past the tolerance, keep going until the residual stops shrinking and
        // return the iterate with the lowest objective seen on the way.
        let mut value = self.objective(&b)?;
        let mut best = (b.clone(), value, residual);
        let mut min_residual = residual;
        let mut stale = 0;
        for _ in 0..MAX_POLISH_ITERATIONS {
            let next = pr_step(self, &b)?;
            residual = geometry.symmetric_divergence(&b, &next)?;
            b = next;
            iterations += 1;
            value = self.objective(&b)?;
            if value < best.1 {
                best = (b.clone(), value, residual);
            }
            if residual < min_residual {
                min_residual = residual;
                stale = 0;
            } else {
                stale += 1;
                if stale == POLISH_PATIENCE {
                    break;
                }
            }
        }
        let (b, value, residual) = best;
        Ok(ReferenceOptimum {
            point: b,
            value,
            iterations,
            residual,
        })
    }

    pub fn manifest(&self) -> MarketManifest {
        let (seed, lo, hi) = match self.provenance {
            Some((s, l, h)) => (Some(s), Some(l), Some(h)),
            None => (None, None, None),
        };
        MarketManifest {
            n: self.buyers,
            m: self.goods,
            seed,
            lo,
            hi,
            u: self.utilities.clone(),
        }
    }

    pub fn from_manifest(manifest: MarketManifest) -> Result<Self> {
        let mut market = Self::new(manifest.n, manifest.m, manifest.u)?;
        market.provenance = match (manifest.seed, manifest.lo, manifest.hi) {
            (Some(s), Some(l), Some(h)) => Some((s, l, h)),
            (None, None, None) => None,
            _ => {
                return Err(Error::Parse(
                    "seed, lo and hi must be given together or not at all".into(),
                ))
            }
        };
        Ok(market)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.manifest())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let manifest: MarketManifest = serde_json::from_str(text)?;
        Self::from_manifest(manifest)
    }
}

impl Objective for FisherMarket {
    fn dim(&self) -> usize {
        self.utilities.len()
    }

    fn value(&self, x: &Point) -> Result<f64> {
        self.objective(x)
    }

    fn gradient(&self, x: &Point) -> Result<DualVector> {
        FisherMarket::gradient(self, x)
    }

    fn market(&self) -> Option<&FisherMarket> {
        Some(self)
    }
}

/// Output of [`FisherMarket::reference_optimum`].
#[derive(Clone, Debug)]
pub struct ReferenceOptimum {
    pub point: Point,
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Draws `u_ij ~ Uniform[lo, hi]` i.i.d. from a generator seeded with `seed`.
pub fn make_random_market(n: usize, m: usize, lo: f64, hi: f64, seed: u64) -> Result<FisherMarket> {
    if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "utility range must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    let dist = Uniform::new(lo, hi).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = (0..n.saturating_mul(m))
        .map(|_| dist.sample(&mut rng))
        .collect();
    let mut market = FisherMarket::new(n, m, u)?;
    market.provenance = Some((seed, lo, hi));
    Ok(market)
}

/// Wraps a market as a [`Problem`] with a certified RS constant and a
/// reference optimum from proportional response.
pub fn fisher_problem(market: FisherMarket) -> Result<Problem> {
    let l = market.rs_certificate()?;
    let reference = market.reference_optimum(REFERENCE_RESIDUAL_TOL)?;
    let geometry = market.geometry();
    let name = format!("fisher-{}x{}", market.buyers(), market.goods());
    Problem::new(name, market, geometry)?
        .with_rs_constant(l)?
        .with_optimum(reference.point, reference.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    #[test]
    fn objective_examples() {
        let one = FisherMarket::new(1, 1, vec![E]).unwrap();
        assert_abs_diff_eq!(
            one.objective(&Point::new(vec![1.0])).unwrap(),
            -1.0,
            epsilon = 1e-15
        );

        let two_buyers = FisherMarket::new(2, 1, vec![1.0, 1.0]).unwrap();
        let phi = two_buyers.objective(&Point::new(vec![1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(phi, 2.0 * 2.0_f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(phi, 1.386_294, epsilon = 1e-6);

        let square = FisherMarket::new(2, 2, vec![1.0; 4]).unwrap();
        assert_eq!(square.objective(&Point::new(vec![0.5; 4])).unwrap(), 0.0);
    }

    #[test]
    fn objective_uses_zero_log_zero_convention() {
        let mkt = FisherMarket::new(2, 2, vec![2.0, 3.0, 4.0, 5.0]).unwrap();
        let b = Point::new(vec![1.0, 0.0, 1.0, 0.0]);
        let expected = 2.0 * 2.0_f64.ln() - 2.0_f64.ln() - 4.0_f64.ln();
        assert_abs_diff_eq!(mkt.objective(&b).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn objective_rejects_infeasible_bids() {
        let mkt = FisherMarket::new(2, 2, vec![1.0; 4]).unwrap();
        assert!(matches!(
            mkt.objective(&Point::new(vec![0.5, 0.6, 0.5, 0.5])),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            mkt.objective(&Point::new(vec![1.5, -0.5, 0.5, 0.5])),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn gradient_examples() {
        let square = FisherMarket::new(2, 2, vec![1.0; 4]).unwrap();
        let g = square.gradient(&Point::new(vec![0.5; 4])).unwrap();
        assert!(g.iter().all(|&v| v == 1.0));
        let one = FisherMarket::new(1, 1, vec![E]).unwrap();
        assert_abs_diff_eq!(
            one.gradient(&Point::new(vec![1.0])).unwrap()[0],
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn gradient_requires_positive_prices() {
        let mkt = FisherMarket::new(2, 2, vec![1.0; 4]).unwrap();
        let err = mkt
            .gradient(&Point::new(vec![1.0, 0.0, 1.0, 0.0]))
            .unwrap_err();
        assert!(matches!(err, Error::DomainViolation(_)));
    }

    #[test]
    fn construction_validates_utilities() {
        assert!(FisherMarket::new(2, 2, vec![1.0, 2.0, 0.0, 1.0]).is_err());
        assert!(FisherMarket::new(2, 2, vec![1.0, 2.0, 3.0]).is_err());
        assert!(FisherMarket::new(0, 2, vec![]).is_err());
        assert!(FisherMarket::new(1, 2, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn random_market_is_deterministic_and_in_range() {
        let a = make_random_market(50, 5, 2.0, 8.0, 11).unwrap();
        let b = make_random_market(50, 5, 2.0, 8.0, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.utilities().len(), 250);
        assert!(a.utilities().iter().all(|&u| (2.0..8.0).contains(&u)));
        let c = make_random_market(50, 5, 2.0, 8.0, 12).unwrap();
        assert_ne!(a.utilities(), c.utilities());

        let single = make_random_market(1, 1, 2.0, 8.0, 4).unwrap();
        assert_eq!(single.utilities().len(), 1);
        assert!((2.0..=8.0).contains(&single.utility(0, 0)));

        assert!(make_random_market(2, 2, 3.0, 3.0, 0).is_err());
        assert!(make_random_market(2, 2, 0.0, 3.0, 0).is_err());
    }

    #[test]
    fn rs_certificate_accepts_unit_constant() {
        let mkt = make_random_market(6, 4, 2.0, 8.0, 5).unwrap();
        assert_eq!(mkt.rs_certificate().unwrap(), 1.0);
        let degenerate = FisherMarket::new(1, 1, vec![3.0]).unwrap();
        assert_eq!(degenerate.rs_certificate().unwrap(), 1.0);
    }

    #[test]
    fn rs_certificate_rejects_too_small_constant() {
        let mkt = make_random_market(5, 3, 2.0, 8.0, 9).unwrap();
        let err = certify_relative_smoothness(&mkt, &mkt.geometry(), 0.01, 1_000, 1).unwrap_err();
        assert!(matches!(err, Error::CertificateViolation(_)));
    }

    #[test]
    fn manifest_round_trip_keeps_provenance() {
        let mkt = make_random_market(3, 2, 2.0, 8.0, 77).unwrap();
        let text = mkt.to_json().unwrap();
        let back = FisherMarket::from_json(&text).unwrap();
        assert_eq!(back, mkt);
        assert_eq!(back.manifest().seed, Some(77));
    }

    #[test]
    fn manifest_rejects_malformed_input() {
        let bad_len = r#"{"n":2,"m":2,"seed":null,"lo":null,"hi":null,"u":[1,2,3]}"#;
        assert!(FisherMarket::from_json(bad_len).is_err());
        let partial = r#"{"n":1,"m":1,"seed":3,"lo":null,"hi":null,"u":[1]}"#;
        assert!(matches!(
            FisherMarket::from_json(partial),
            Err(Error::Parse(_))
        ));
        let negative = r#"{"n":1,"m":1,"seed":null,"lo":null,"hi":null,"u":[-1]}"#;
        assert!(FisherMarket::from_json(negative).is_err());
        assert!(FisherMarket::from_json("[1,2]").is_err());
    }

    #[test]
    fn reference_optimum_is_stationary() {
        let mkt = make_random_market(8, 3, 2.0, 8.0, 21).unwrap();
        let reference = mkt.reference_optimum(REFERENCE_RESIDUAL_TOL).unwrap();
        assert!(reference.residual < REFERENCE_RESIDUAL_TOL);
        let g = mkt.gradient(&reference.point).unwrap();
        let gap = mkt
            .geometry()
            .stationarity_gap(&reference.point, &g)
            .unwrap();
        assert!(gap < 1e-6, "gap {gap}");
        let problem = fisher_problem(mkt).unwrap();
        assert_eq!(problem.optimum().unwrap().value, reference.value);
        assert_eq!(problem.rs_constant(), Some(1.0));
    }
}
