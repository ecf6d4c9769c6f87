//! Thermo-electro-mechanical aging of overhead transmission lines.
//!
//! A 1-D finite-element model couples phase-field damage and fatigue in the
//! conductor with steady heat transfer and current flow. A stochastic layer
//! evaluates the deterministic model on Gauss-Legendre collocation grids to
//! produce statistics, first-order Sobol indices and failure probabilities.

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod campaign;
pub mod coupled;
pub mod exec;
pub mod fem1d;
pub mod geometry;
pub mod loading;
pub mod params;
pub mod report;
pub mod scenario;
pub mod stochastic;
