//! Tensor-product collocation over uniform parameters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_legendre, QuadratureRule};
use super::StochasticError;

/// Model inputs that can be treated as uncertain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParamName {
    /// Spread of the initial neck.
    #[serde(rename = "A_sigma")]
    ASigma,
    /// Phase-field layer width.
    #[serde(rename = "gamma")]
    Gamma,
    /// Fracture energy.
    #[serde(rename = "g_c")]
    FractureEnergy,
    /// Aging coefficient.
    #[serde(rename = "a")]
    Aging,
    /// Annual-mean ambient temperature, degrees Celsius.
    #[serde(rename = "theta_b")]
    BaseTemperature,
    /// Annual-mean wind speed.
    #[serde(rename = "w_b")]
    BaseWind,
    /// Base current.
    #[serde(rename = "I_b")]
    BaseCurrent,
    /// Current amplitude.
    #[serde(rename = "I_a")]
    CurrentAmplitude,
}

impl ParamName {
    pub const ALL: [ParamName; 8] = [
        ParamName::ASigma,
        ParamName::Gamma,
        ParamName::FractureEnergy,
        ParamName::Aging,
        ParamName::BaseTemperature,
        ParamName::BaseWind,
        ParamName::BaseCurrent,
        ParamName::CurrentAmplitude,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            ParamName::ASigma => "A_sigma",
            ParamName::Gamma => "gamma",
            ParamName::FractureEnergy => "g_c",
            ParamName::Aging => "a",
            ParamName::BaseTemperature => "theta_b",
            ParamName::BaseWind => "w_b",
            ParamName::BaseCurrent => "I_b",
            ParamName::CurrentAmplitude => "I_a",
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ParamName {
    type Err = StochasticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParamName::ALL.into_iter().find(|p| p.key() == s.trim()).ok_or_else(|| {
            let known: Vec<_> = ParamName::ALL.iter().map(|p| p.key()).collect();
            StochasticError::Invalid(format!("unknown parameter {s:?}, expected one of {}", known.join(", ")))
        })
    }
}

/// Uniform on `[mean (1 - frac), mean (1 + frac)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomParameter {
    pub name: ParamName,
    pub mean: f64,
    pub half_width_frac: f64,
}

impl RandomParameter {
    pub fn new(name: ParamName, mean: f64, half_width_frac: f64) -> Result<Self, StochasticError> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(StochasticError::Invalid(format!(
                "{name}: mean must be positive, got {mean}"
            )));
        }
        if !(0.0..1.0).contains(&half_width_frac) {
            return Err(StochasticError::Invalid(format!(
                "{name}: half width fraction must be in [0, 1), got {half_width_frac}"
            )));
        }
        Ok(Self {
            name,
            mean,
            half_width_frac,
        })
    }

    pub fn lower(&self) -> f64 {
        self.mean * (1.0 - self.half_width_frac)
    }

    pub fn upper(&self) -> f64 {
        self.mean * (1.0 + self.half_width_frac)
    }

    /// Affine map from the reference interval `[-1, 1]`.
    pub fn map(&self, eta: f64) -> f64 {
        let (a, b) = (self.lower(), self.upper());
        a + (b - a) * (eta + 1.0) / 2.0
    }

    /// Maps a unit-interval draw onto the support.
    pub fn from_unit(&self, u: f64) -> f64 {
        let (a, b) = (self.lower(), self.upper());
        a + (b - a) * u
    }
}

/// Full tensor grid of Gauss-Legendre nodes, last dimension varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    params: Vec<RandomParameter>,
    rule: QuadratureRule,
}

impl CollocationGrid {
    pub const MAX_DIMS: usize = 5;

    pub fn new(params: Vec<RandomParameter>, points_per_dim: usize) -> Result<Self, StochasticError> {
        if params.is_empty() || params.len() > Self::MAX_DIMS {
            return Err(StochasticError::Invalid(format!(
                "collocation needs 1 to {} parameters, got {}",
                Self::MAX_DIMS,
                params.len()
            )));
        }
        for (i, p) in params.iter().enumerate() {
            if params[..i].iter().any(|q| q.name == p.name) {
                return Err(StochasticError::Invalid(format!("parameter {} listed twice", p.name)));
            }
        }
        Ok(Self {
            params,
            rule: gauss_legendre(points_per_dim)?,
        })
    }

    pub fn params(&self) -> &[RandomParameter] {
        &self.params
    }

    pub fn dims(&self) -> usize {
        self.params.len()
    }

    pub fn points_per_dim(&self) -> usize {
        self.rule.len()
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn len(&self) -> usize {
        self.points_per_dim().pow(self.dims() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Per-dimension point indices of node `i`.
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let n = self.points_per_dim();
        let mut idx = vec![0; self.dims()];
        for slot in idx.iter_mut().rev() {
            *slot = i % n;
            i /= n;
        }
        idx
    }

    /// Physical coordinates of node `i`.
    pub fn node(&self, i: usize) -> Vec<f64> {
        self.multi_index(i)
            .iter()
            .zip(&self.params)
            .map(|(&k, p)| p.map(self.rule.nodes[k]))
            .collect()
    }

    /// Probability weight of node `i`: `prod_j w_j / 2`.
    pub fn weight(&self, i: usize) -> f64 {
        self.multi_index(i)
            .iter()
            .map(|&k| self.rule.weights[k] / 2.0)
            .product()
    }

    pub fn nodes(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }
}

pub(crate) fn check_shape(grid: &CollocationGrid, qoi: &[Vec<f64>]) -> Result<usize, StochasticError> {
    if qoi.len() != grid.len() {
        return Err(StochasticError::Shape(format!(
            "{} realizations for a grid of {} nodes",
            qoi.len(),
            grid.len()
        )));
    }
    let len = qoi[0].len();
    if let Some(i) = qoi.iter().position(|q| q.len() != len) {
        return Err(StochasticError::Shape(format!(
            "realization {i} has {} entries, expected {len}",
            qoi[i].len()
        )));
    }
    Ok(len)
}

/// Quadrature mean of each entry of the realization series.
pub fn expectation(grid: &CollocationGrid, qoi: &[Vec<f64>]) -> Result<Vec<f64>, StochasticError> {
    let len = check_shape(grid, qoi)?;
    let mut mean = vec![0.0; len];
    for (i, q) in qoi.iter().enumerate() {
        let w = grid.weight(i);
        for (m, v) in mean.iter_mut().zip(q) {
            *m += w * v;
        }
    }
    Ok(mean)
}

/// Quadrature standard deviation about `mean`.
pub fn std_dev(grid: &CollocationGrid, qoi: &[Vec<f64>], mean: &[f64]) -> Result<Vec<f64>, StochasticError> {
    let len = check_shape(grid, qoi)?;
    if mean.len() != len {
        return Err(StochasticError::Shape(format!(
            "mean has {} entries, expected {len}",
            mean.len()
        )));
    }
    let mut var = vec![0.0; len];
    for (i, q) in qoi.iter().enumerate() {
        let w = grid.weight(i);
        for ((s, v), m) in var.iter_mut().zip(q).zip(mean) {
            *s += w * (v - m) * (v - m);
        }
    }
    Ok(var.into_iter().map(|v| v.max(0.0).sqrt()).collect())
}
