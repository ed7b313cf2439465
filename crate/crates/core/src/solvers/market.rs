//! Closed-form Fisher-market updates: entropic gradient descent and proportional response.

use crate::error::{Error, Result};
use crate::geometry::{softmax_in_place, Point, LOG_FLOOR};
use crate::problems::FisherMarket;

fn check_interior(market: &FisherMarket, b: &Point) -> Result<Vec<f64>> {
    let p = market.positive_prices(b)?;
    if let Some(k) = b.iter().position(|&v| v <= 0.0) {
        return Err(Error::DomainViolation(format!(
            "bid {k} is zero; the update needs a strictly interior point"
        )));
    }
    Ok(p)
}

/// `b'_ij ∝ b_ij (u_ij / p_j)^γ`, renormalized per buyer.
///
/// Evaluated in log space, so large `γ` does not overflow.
pub fn egd_step(market: &FisherMarket, b: &Point, gamma: f64) -> Result<Point> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step size must be positive, got {gamma}"
        )));
    }
    let p = check_interior(market, b)?;
    let log_p: Vec<f64> = p.iter().map(|v| v.ln()).collect();
    let goods = market.goods();
    let mut out: Vec<f64> = b
        .iter()
        .zip(market.log_utilities())
        .enumerate()
        .map(|(k, (bij, lu))| bij.ln() + gamma * (lu - log_p[k % goods]))
        .collect();
    for row in out.chunks_mut(goods) {
        softmax_in_place(row);
    }
    Ok(Point::new(out))
}

/// `b'_ij = u_ij w_ij / Σ_k u_ik w_ik` with allocations `w_ij = b_ij / p_j`.
pub fn pr_step(market: &FisherMarket, b: &Point) -> Result<Point> {
    let p = check_interior(market, b)?;
    let goods = market.goods();
    let mut out: Vec<f64> = b
        .iter()
        .zip(market.utilities())
        .enumerate()
        .map(|(k, (bij, u))| u * (bij / p[k % goods]))
        .collect();
    for row in out.chunks_mut(goods) {
        let total: f64 = row.iter().sum();
        for v in row.iter_mut() {
            *v = (*v / total).max(LOG_FLOOR);
        }
    }
    Ok(Point::new(out))
}
