//! Material, air and run-control parameters.

use serde::{Deserialize, Serialize};

/// Conductor material. Defaults are for an all-aluminium conductor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialParams {
    /// Young's modulus, Pa.
    pub youngs_modulus: f64,
    /// Phase-field layer width, m.
    pub layer_width: f64,
    /// Fracture energy release rate, N/m.
    pub fracture_energy: f64,
    /// kg/m^3.
    pub density: f64,
    /// Aging coefficient, m^5/(y kg).
    pub aging_coeff: f64,
    /// W/(m K).
    pub thermal_conductivity: f64,
    /// Electrical conductivity at `theta0`, S/m.
    pub electrical_conductivity: f64,
    /// Temperature coefficient of resistivity, 1/K.
    pub resistivity_coeff: f64,
    /// Reference temperature for conductivity and fatigue scaling, K.
    pub theta0: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self {
            youngs_modulus: 69e9,
            layer_width: 0.02,
            fracture_energy: 10e3,
            density: 2700.0,
            aging_coeff: 1e-10,
            thermal_conductivity: 237.0,
            electrical_conductivity: 3.77e7,
            resistivity_coeff: 3.9e-3,
            theta0: 293.15,
        }
    }
}

impl MaterialParams {
    pub fn validate(&self) -> Result<(), String> {
        let fields = [
            ("youngs_modulus", self.youngs_modulus),
            ("layer_width", self.layer_width),
            ("fracture_energy", self.fracture_energy),
            ("density", self.density),
            ("aging_coeff", self.aging_coeff),
            ("thermal_conductivity", self.thermal_conductivity),
            ("electrical_conductivity", self.electrical_conductivity),
            ("resistivity_coeff", self.resistivity_coeff),
            ("theta0", self.theta0),
        ];
        positive_fields("material", &fields)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AirParams {
    /// kg/m^3.
    pub density: f64,
    /// m^2/s.
    pub kinematic_viscosity: f64,
    /// W/(m K).
    pub thermal_conductivity: f64,
    pub prandtl: f64,
}

impl Default for AirParams {
    fn default() -> Self {
        Self {
            density: 1.225,
            kinematic_viscosity: 15e-6,
            thermal_conductivity: 0.0295,
            prandtl: 0.71,
        }
    }
}

impl AirParams {
    pub fn validate(&self) -> Result<(), String> {
        positive_fields(
            "air",
            &[
                ("density", self.density),
                ("kinematic_viscosity", self.kinematic_viscosity),
                ("thermal_conductivity", self.thermal_conductivity),
                ("prandtl", self.prandtl),
            ],
        )
    }
}

/// `Nu = C Re^m Pr^(1/3)` over one Reynolds band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvectionBand {
    pub re_min: f64,
    pub re_max: f64,
    pub c: f64,
    pub m: f64,
}

/// Cross-flow cylinder correlation bands.
pub fn default_convection_bands() -> Vec<ConvectionBand> {
    [
        (0.4, 4.0, 0.989, 0.330),
        (4.0, 40.0, 0.911, 0.385),
        (40.0, 4_000.0, 0.683, 0.466),
        (4_000.0, 40_000.0, 0.193, 0.618),
        (40_000.0, 400_000.0, 0.027, 0.805),
    ]
    .iter()
    .map(|&(re_min, re_max, c, m)| ConvectionBand { re_min, re_max, c, m })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalParams {
    /// Natural-convection floor for the film coefficient, W/(m^2 K).
    pub h_min: f64,
    pub convection: Vec<ConvectionBand>,
}

impl Default for ThermalParams {
    fn default() -> Self {
        Self {
            h_min: 5.0,
            convection: default_convection_bands(),
        }
    }
}

/// Time stepping and failure threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    /// Time step, years.
    pub dt: f64,
    pub n_steps: usize,
    /// Annealing threshold on the conductor temperature, K.
    pub theta_lim: f64,
    pub steps_per_year: usize,
    pub n_elements: usize,
    /// Field snapshots are kept every this many steps (0 disables).
    pub snapshot_every: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            n_steps: 6000,
            theta_lim: 373.0,
            steps_per_year: 100,
            n_elements: 1000,
            snapshot_every: 500,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.dt > 0.0) {
            return Err(format!("simulation.dt must be positive, got {}", self.dt));
        }
        if self.steps_per_year == 0 || ((self.dt * self.steps_per_year as f64) - 1.0).abs() > 1e-9 {
            return Err(format!(
                "simulation.dt * steps_per_year must equal one year (dt = {}, steps_per_year = {})",
                self.dt, self.steps_per_year
            ));
        }
        if self.n_elements < 2 {
            return Err(format!("simulation.n_elements must be >= 2, got {}", self.n_elements));
        }
        if self.theta_lim.is_nan() {
            return Err("simulation.theta_lim is NaN".into());
        }
        Ok(())
    }

    pub fn time_of(&self, step: usize) -> f64 {
        step as f64 / self.steps_per_year as f64
    }
}

fn positive_fields(section: &str, fields: &[(&str, f64)]) -> Result<(), String> {
    for (name, v) in fields {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(format!("{section}.{name} must be positive, got {v}"));
        }
    }
    Ok(())
}
