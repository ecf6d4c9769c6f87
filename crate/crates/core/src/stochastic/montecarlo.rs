//! Seeded Monte Carlo baseline and error metric.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pcm::RandomParameter;
use super::StochasticError;

/// `n` reproducible draws from the product of uniform parameters.
pub fn sample_parameters(params: &[RandomParameter], n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| params.iter().map(|p| p.from_unit(rng.random::<f64>())).collect())
        .collect()
}

/// Plain average of realization series, accumulated in index order.
pub fn sample_mean(realizations: &[Vec<f64>]) -> Result<Vec<f64>, StochasticError> {
    let first = realizations
        .first()
        .ok_or_else(|| StochasticError::Shape("no realizations".into()))?;
    let mut sum = vec![0.0; first.len()];
    for (i, r) in realizations.iter().enumerate() {
        if r.len() != sum.len() {
            return Err(StochasticError::Shape(format!(
                "realization {i} has {} entries, expected {}",
                r.len(),
                sum.len()
            )));
        }
        for (s, v) in sum.iter_mut().zip(r) {
            *s += v;
        }
    }
    let n = realizations.len() as f64;
    Ok(sum.into_iter().map(|s| s / n).collect())
}

/// Sequential Monte Carlo estimate of `E[qoi]`.
pub fn monte_carlo(
    params: &[RandomParameter],
    n_samples: usize,
    seed: u64,
    qoi: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<Vec<f64>, StochasticError> {
    let samples = sample_parameters(params, n_samples, seed);
    let values: Vec<_> = samples.iter().map(|x| qoi(x)).collect();
    sample_mean(&values)
}

/// `||field - reference||_2 / ||reference||_2`.
pub fn relative_error(field: &[f64], reference: &[f64]) -> Result<f64, StochasticError> {
    if field.len() != reference.len() {
        return Err(StochasticError::Shape(format!(
            "field has {} entries, reference {}",
            field.len(),
            reference.len()
        )));
    }
    let diff: f64 = field.iter().zip(reference).map(|(a, b)| (a - b) * (a - b)).sum();
    let norm: f64 = reference.iter().map(|b| b * b).sum();
    if norm == 0.0 {
        return Err(StochasticError::Invalid("reference has zero norm".into()));
    }
    Ok((diff / norm).sqrt())
}
