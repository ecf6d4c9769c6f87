//! Failure indicators and failure-probability curves.

use serde::Serialize;

use super::pcm::{expectation, CollocationGrid};
use super::StochasticError;

/// Step function of first threshold crossing, extended to `horizon` entries.
///
/// Entry `t` is 1 once any of `series[..=t]` exceeds `limit`. A series that
/// ended early without crossing is padded with zeros, one that crossed is
/// padded with ones.
pub fn bernoulli_transform(series: &[f64], limit: f64, horizon: usize) -> Vec<f64> {
    let len = horizon.max(series.len());
    match series.iter().position(|&v| v > limit) {
        Some(k) => (0..len).map(|t| if t < k { 0.0 } else { 1.0 }).collect(),
        None => vec![0.0; len],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureCurve {
    pub p_f: Vec<f64>,
}

impl FailureCurve {
    pub fn is_nondecreasing(&self) -> bool {
        self.p_f.windows(2).all(|w| w[0] <= w[1])
    }

    /// First entry at which the probability reaches `level`.
    pub fn first_reaching(&self, level: f64) -> Option<usize> {
        self.p_f.iter().position(|&p| p >= level)
    }
}

/// `p_f(t) = E[h_B(t)]` over the grid, clipped to `[0, 1]`.
///
/// The quadrature sum is divided by the summed weights so that a grid on
/// which every realization has failed gives exactly 1.
pub fn probability_of_failure(
    grid: &CollocationGrid,
    indicators: &[Vec<f64>],
) -> Result<FailureCurve, StochasticError> {
    let mean = expectation(grid, indicators)?;
    let mass: f64 = (0..grid.len()).fold(0.0, |acc, i| acc + grid.weight(i));
    Ok(FailureCurve {
        p_f: mean.into_iter().map(|p| (p / mass).clamp(0.0, 1.0)).collect(),
    })
}
