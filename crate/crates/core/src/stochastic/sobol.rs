//! First-order variance-based sensitivity indices on a collocation grid.

use serde::Serialize;

use super::pcm::{check_shape, expectation, CollocationGrid};
use super::StochasticError;

/// Total variance below which indices are reported as zero.
pub const LOW_VARIANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SobolIndices {
    /// `indices[j][t]` is the first-order index of parameter `j` at entry `t`.
    pub indices: Vec<Vec<f64>>,
    /// Entries whose total variance fell below [`LOW_VARIANCE`].
    pub low_variance: Vec<bool>,
}

/// First-order Sobol indices `S_j = Var(E[Q | xi_j]) / Var(Q)`.
///
/// Conditional means are quadrature averages over all other dimensions at
/// each point of dimension `j`; their variance is taken with the dimension-`j`
/// weights. Results are clamped to `[0, 1]` against rounding.
pub fn sobol_first_order(grid: &CollocationGrid, qoi: &[Vec<f64>]) -> Result<SobolIndices, StochasticError> {
    let len = check_shape(grid, qoi)?;
    let mean = expectation(grid, qoi)?;
    let mut total = vec![0.0; len];
    for (i, q) in qoi.iter().enumerate() {
        let w = grid.weight(i);
        for ((s, v), m) in total.iter_mut().zip(q).zip(&mean) {
            *s += w * (v - m) * (v - m);
        }
    }
    let n = grid.points_per_dim();
    let half: Vec<f64> = grid.rule().weights.iter().map(|w| w / 2.0).collect();
    let multi: Vec<Vec<usize>> = (0..grid.len()).map(|i| grid.multi_index(i)).collect();

    let mut indices = Vec::with_capacity(grid.dims());
    for j in 0..grid.dims() {
        // conditional[p][t] = E[Q | xi_j = node p]
        let mut conditional = vec![vec![0.0; len]; n];
        for (i, q) in qoi.iter().enumerate() {
            let idx = &multi[i];
            let w_rest: f64 = idx
                .iter()
                .enumerate()
                .filter(|&(d, _)| d != j)
                .map(|(_, &k)| half[k])
                .product();
            for (c, v) in conditional[idx[j]].iter_mut().zip(q) {
                *c += w_rest * v;
            }
        }
        let mut partial = vec![0.0; len];
        for (p, cond) in conditional.iter().enumerate() {
            for ((s, c), m) in partial.iter_mut().zip(cond).zip(&mean) {
                *s += half[p] * (c - m) * (c - m);
            }
        }
        indices.push(
            partial
                .iter()
                .zip(&total)
                .map(|(&v, &t)| if t < LOW_VARIANCE { 0.0 } else { (v / t).clamp(0.0, 1.0) })
                .collect(),
        );
    }
    Ok(SobolIndices {
        indices,
        low_variance: total.iter().map(|&t| t < LOW_VARIANCE).collect(),
    })
}
