//! Non-intrusive uncertainty quantification over black-box realizations.

use thiserror::Error;

pub mod montecarlo;
pub mod pcm;
pub mod quadrature;
pub mod reliability;
pub mod sobol;

pub use montecarlo::{monte_carlo, relative_error, sample_mean, sample_parameters};
pub use pcm::{expectation, std_dev, CollocationGrid, ParamName, RandomParameter};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub use reliability::{bernoulli_transform, probability_of_failure, FailureCurve};
pub use sobol::{sobol_first_order, SobolIndices, LOW_VARIANCE};

#[derive(Debug, Error)]
pub enum StochasticError {
    #[error("{0}")]
    Invalid(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}
