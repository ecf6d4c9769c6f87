//! Staggered quasi-static thermo-electro-mechanical solver.
//!
//! Each step runs, in order: horizontal tension from the previous mean
//! temperature, displacement, strain-energy history, damage, fatigue,
//! temperature (Joule source from the previous voltage field) and voltage.
//! The run stops when the hottest node exceeds the annealing threshold.

use std::fmt;

use log::warn;
use serde::Serialize;
use thiserror::Error;

use crate::fem1d::{
    self, apply_dirichlet, apply_point_load, assemble_gradient_load, assemble_load, assemble_mass,
    assemble_reaction_diffusion, assemble_stiffness, FemError, GlobalSystem, LdlFactor, Mesh1D, QuadPoint,
};
use crate::geometry::{
    drag_coefficient, horizontal_tension, wind_load, wind_pressure, CableGeometry, GeometryError, SagParams,
    WindLoadParams,
};
use crate::loading::{LoadProfile, LoadSample};
use crate::params::{AirParams, ConvectionBand, MaterialParams, SimulationConfig, ThermalParams};

/// Lower bound on `(1 - phi)^2` in stiffness and conductivity.
pub const DEGRADATION_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stage {
    Tension,
    Displacement,
    Damage,
    Fatigue,
    Temperature,
    Voltage,
    Setup,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Tension => "tension",
            Stage::Displacement => "displacement",
            Stage::Damage => "damage",
            Stage::Fatigue => "fatigue",
            Stage::Temperature => "temperature",
            Stage::Voltage => "voltage",
            Stage::Setup => "setup",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("step {step}, {stage} solve: {source}")]
    Fem {
        step: usize,
        stage: Stage,
        #[source]
        source: FemError,
    },
    #[error("step {step}: {source}")]
    Geometry {
        step: usize,
        #[source]
        source: GeometryError,
    },
    #[error("invalid model: {0}")]
    Invalid(String),
}

/// Clamped damage used in degradation and fatigue factors.
#[inline]
fn clamp_phi(phi: f64) -> f64 {
    phi.clamp(0.0, 1.0)
}

/// `(1 - phi)^2`, floored.
#[inline]
pub fn degradation(phi: f64) -> f64 {
    let s = 1.0 - clamp_phi(phi);
    (s * s).max(DEGRADATION_FLOOR)
}

/// Film coefficient together with the flow regime it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatTransfer {
    pub h: f64,
    pub reynolds: f64,
    /// Reynolds number fell outside the correlation table.
    pub clamped: bool,
    /// The natural-convection floor was applied.
    pub floored: bool,
}

/// Forced-convection film coefficient from the banded Nusselt correlation.
pub fn convective_h(speed: f64, diameter: f64, air: &AirParams, thermal: &ThermalParams) -> HeatTransfer {
    let reynolds = speed.max(0.0) * diameter / air.kinematic_viscosity;
    let bands: &[ConvectionBand] = &thermal.convection;
    if !(reynolds > 0.0) {
        return HeatTransfer {
            h: thermal.h_min,
            reynolds,
            clamped: false,
            floored: true,
        };
    }
    let first = &bands[0];
    let last = &bands[bands.len() - 1];
    let (band, clamped) = if reynolds < first.re_min {
        (first, true)
    } else if reynolds > last.re_max {
        (last, true)
    } else {
        (bands.iter().find(|b| reynolds < b.re_max).unwrap_or(last), false)
    };
    let nusselt = band.c * reynolds.powf(band.m) * air.prandtl.cbrt();
    let h = nusselt * air.thermal_conductivity / diameter;
    if h < thermal.h_min {
        HeatTransfer {
            h: thermal.h_min,
            reynolds,
            clamped,
            floored: true,
        }
    } else {
        HeatTransfer {
            h,
            reynolds,
            clamped,
            floored: false,
        }
    }
}

/// Everything needed to advance one conductor in time.
#[derive(Debug, Clone)]
pub struct LineModel {
    pub mesh: Mesh1D,
    pub geometry: CableGeometry,
    pub material: MaterialParams,
    pub air: AirParams,
    pub thermal: ThermalParams,
    pub sag: SagParams,
    pub wind: WindLoadParams,
    pub loads: LoadProfile,
    pub config: SimulationConfig,
    area_q: Vec<[f64; 2]>,
    mass_factor: LdlFactor,
}

/// Nodal fields plus the per-point conductivity used by the last voltage solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldState {
    pub step: usize,
    pub t: f64,
    pub tension: f64,
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
    pub fatigue: Vec<f64>,
    pub theta: Vec<f64>,
    pub voltage: Vec<f64>,
    pub history: Vec<f64>,
    #[serde(skip)]
    pub conductivity: Vec<[f64; 2]>,
}

impl FieldState {
    pub fn max_damage(&self) -> f64 {
        self.phi.iter().map(|&p| clamp_phi(p)).fold(0.0, f64::max)
    }

    pub fn max_fatigue(&self) -> f64 {
        self.fatigue.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_temperature(&self) -> f64 {
        self.theta.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean_temperature(&self) -> f64 {
        self.theta.iter().sum::<f64>() / self.theta.len() as f64
    }

    pub fn voltage_drop(&self) -> f64 {
        (self.voltage[self.voltage.len() - 1] - self.voltage[0]).abs()
    }
}

/// Per-step counts of table clamps and floors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub drag_clamped: usize,
    pub convection_clamped: usize,
    pub h_floored: usize,
}

impl Diagnostics {
    fn absorb(&mut self, other: Diagnostics) {
        self.drag_clamped += other.drag_clamped;
        self.convection_clamped += other.convection_clamped;
        self.h_floored += other.h_floored;
    }
}

impl LineModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        geometry: CableGeometry,
        material: MaterialParams,
        air: AirParams,
        thermal: ThermalParams,
        sag: SagParams,
        wind: WindLoadParams,
        loads: LoadProfile,
        config: SimulationConfig,
    ) -> Result<Self, SolverError> {
        material.validate().map_err(SolverError::Invalid)?;
        air.validate().map_err(SolverError::Invalid)?;
        config.validate().map_err(SolverError::Invalid)?;
        sag.validate().map_err(|e| SolverError::Invalid(e.to_string()))?;
        wind.drag.validate().map_err(|e| SolverError::Invalid(e.to_string()))?;
        if thermal.convection.is_empty() || !(thermal.h_min > 0.0) {
            return Err(SolverError::Invalid(
                "thermal: need a convection table and positive h_min".into(),
            ));
        }
        let setup = |source| SolverError::Fem {
            step: 0,
            stage: Stage::Setup,
            source,
        };
        let mesh = Mesh1D::uniform(geometry.length, config.n_elements).map_err(setup)?;
        let mut area_q = Vec::with_capacity(mesh.n_elements());
        for e in 0..mesh.n_elements() {
            let [q0, q1] = mesh.quad_points(e);
            let a0 = geometry
                .area_at(q0.x)
                .map_err(|source| SolverError::Geometry { step: 0, source })?;
            let a1 = geometry
                .area_at(q1.x)
                .map_err(|source| SolverError::Geometry { step: 0, source })?;
            area_q.push([a0, a1]);
        }
        let mass = assemble_mass(&mesh, |qp| area_q[qp.element][qp.index]).map_err(setup)?;
        let mass_factor = mass.factor().map_err(setup)?;
        Ok(Self {
            mesh,
            geometry,
            material,
            air,
            thermal,
            sag,
            wind,
            loads,
            config,
            area_q,
            mass_factor,
        })
    }

    #[inline]
    fn area(&self, qp: &QuadPoint) -> f64 {
        self.area_q[qp.element][qp.index]
    }

    /// Cross-section at each node.
    pub fn nodal_area(&self) -> Vec<f64> {
        self.mesh
            .nodes()
            .iter()
            .map(|&x| self.geometry.area_at(x).expect("validated at construction"))
            .collect()
    }

    /// Pristine fields at `t = 0` with the voltage consistent with the initial current.
    pub fn initial_state(&self) -> Result<FieldState, SolverError> {
        let n = self.mesh.n_nodes();
        let load = self.loads.sample(0.0);
        let mut state = FieldState {
            step: 0,
            t: 0.0,
            tension: self.sag.pretension,
            u: vec![0.0; n],
            phi: vec![0.0; n],
            fatigue: vec![0.0; n],
            theta: vec![load.ambient_temp; n],
            voltage: vec![0.0; n],
            history: vec![0.0; n],
            conductivity: vec![[0.0; 2]; self.mesh.n_elements()],
        };
        let (voltage, conductivity) = self.solve_voltage(&state, &load).map_err(|source| SolverError::Fem {
            step: 0,
            stage: Stage::Voltage,
            source,
        })?;
        state.voltage = voltage;
        state.conductivity = conductivity;
        Ok(state)
    }

    /// Horizontal tension for the given mean conductor temperature and wind.
    pub fn tension(&self, theta_mean: f64, load: &LoadSample) -> Result<(f64, bool), GeometryError> {
        let re = load.wind_speed * self.geometry.diameter / self.air.kinematic_viscosity;
        let drag = drag_coefficient(&self.wind.drag, re);
        // Calm air sits below every band; that is not worth a warning.
        let clamped = drag.clamped && re > 0.0;
        let ww = wind_load(
            &self.wind,
            wind_pressure(self.wind.rho_air, load.wind_speed),
            drag.value,
            self.geometry.diameter,
        );
        Ok((horizontal_tension(&self.sag, theta_mean, ww)?, clamped))
    }

    /// Bar under end traction `tension`, clamped at `x = 0`.
    pub fn solve_displacement(&self, state: &FieldState, tension: f64) -> Result<Vec<f64>, FemError> {
        let m = &self.material;
        let k = assemble_stiffness(&self.mesh, |qp| {
            degradation(qp.interpolate(&state.phi)) * m.youngs_modulus * self.area(qp)
        })?;
        let gc_gamma = m.layer_width * m.fracture_energy;
        let w = assemble_gradient_load(&self.mesh, |qp| {
            let dphi = self.mesh.gradient(&state.phi, qp.element);
            gc_gamma * self.area(qp) * dphi * dphi
        })?;
        let mut sys = GlobalSystem::new(k, w)?;
        apply_point_load(&mut sys, self.mesh.n_elements(), tension);
        apply_dirichlet(&mut sys, 0, 0.0);
        fem1d::solve(&sys)
    }

    /// Running nodal maximum of `Y (du/dx)^2`.
    pub fn update_history(&self, history: &[f64], u: &[f64]) -> Vec<f64> {
        let y = self.material.youngs_modulus;
        self.mesh
            .nodal_gradient(u)
            .iter()
            .zip(history)
            .map(|(&g, &h)| h.max(y * g * g))
            .collect()
    }

    /// Damage from history and fatigue with zero-flux ends.
    pub fn solve_damage(&self, history: &[f64], fatigue: &[f64]) -> Result<Vec<f64>, FemError> {
        let m = &self.material;
        let (gamma, gc) = (m.layer_width, m.fracture_energy);
        let k = assemble_reaction_diffusion(
            &self.mesh,
            |qp| gamma * gc * self.area(qp),
            |qp| (qp.interpolate(history) + gc / gamma) * self.area(qp),
        )?;
        let b = assemble_load(&self.mesh, |qp| {
            (qp.interpolate(history) + qp.interpolate(fatigue) / gamma) * self.area(qp)
        })?;
        fem1d::solve(&GlobalSystem::new(k, b)?)
    }

    /// Forward-Euler fatigue update `M F' = M F + dt w_F`.
    pub fn update_fatigue(
        &self,
        fatigue: &[f64],
        phi: &[f64],
        u: &[f64],
        theta: &[f64],
        dt: f64,
    ) -> Result<Vec<f64>, FemError> {
        let m = &self.material;
        let rate = m.density * m.aging_coeff * m.youngs_modulus / m.layer_width;
        let w = assemble_load(&self.mesh, |qp| {
            let p = clamp_phi(qp.interpolate(phi));
            let strain = self.mesh.gradient(u, qp.element).abs();
            rate * (qp.interpolate(theta) / m.theta0) * (1.0 - p) * strain * p * self.area(qp)
        })?;
        let increment = self.mass_factor.solve(&w);
        Ok(fatigue.iter().zip(&increment).map(|(f, d)| f + dt * d).collect())
    }

    /// Steady heat balance with the Joule source of the stored voltage field.
    pub fn solve_temperature(
        &self,
        state: &FieldState,
        load: &LoadSample,
    ) -> Result<(Vec<f64>, HeatTransfer), FemError> {
        let ht = convective_h(load.wind_speed, self.geometry.diameter, &self.air, &self.thermal);
        let perimeter = self.geometry.perimeter();
        let kappa = self.material.thermal_conductivity;
        let k = assemble_reaction_diffusion(&self.mesh, |qp| kappa * self.area(qp), |_| ht.h * perimeter)?;
        let b = assemble_load(&self.mesh, |qp| {
            let dv = self.mesh.gradient(&state.voltage, qp.element);
            state.conductivity[qp.element][qp.index] * self.area(qp) * dv * dv + ht.h * perimeter * load.ambient_temp
        })?;
        Ok((fem1d::solve(&GlobalSystem::new(k, b)?)?, ht))
    }

    /// Conductivity at every Gauss point for the given damage and temperature.
    pub fn conductivity(&self, phi: &[f64], theta: &[f64]) -> Vec<[f64; 2]> {
        let m = &self.material;
        (0..self.mesh.n_elements())
            .map(|e| {
                self.mesh.quad_points(e).map(|qp| {
                    let warm = 1.0 + m.resistivity_coeff * (qp.interpolate(theta) - m.theta0);
                    degradation(qp.interpolate(phi)) * m.electrical_conductivity / warm
                })
            })
            .collect()
    }

    /// Voltage with `V(0) = 0` and the line current injected at `x = L`.
    pub fn solve_voltage(&self, state: &FieldState, load: &LoadSample) -> Result<(Vec<f64>, Vec<[f64; 2]>), FemError> {
        let sigma = self.conductivity(&state.phi, &state.theta);
        let k = assemble_stiffness(&self.mesh, |qp| sigma[qp.element][qp.index] * self.area(qp))?;
        let mut sys = GlobalSystem::with_zero_rhs(k);
        apply_point_load(&mut sys, self.mesh.n_elements(), load.current);
        apply_dirichlet(&mut sys, 0, 0.0);
        Ok((fem1d::solve(&sys)?, sigma))
    }

    /// Advances `state` by one step, returning the new state.
    pub fn step(&self, state: &FieldState) -> Result<(FieldState, Diagnostics), SolverError> {
        let step = state.step + 1;
        let t = self.config.time_of(step);
        let load = self.loads.sample(t);
        let fem = |stage: Stage| move |source| SolverError::Fem { step, stage, source };
        let mut diag = Diagnostics::default();

        let (tension, drag_clamped) = self
            .tension(state.mean_temperature(), &load)
            .map_err(|source| SolverError::Geometry { step, source })?;
        diag.drag_clamped += drag_clamped as usize;

        let u = self
            .solve_displacement(state, tension)
            .map_err(fem(Stage::Displacement))?;
        let history = self.update_history(&state.history, &u);
        let phi = self
            .solve_damage(&history, &state.fatigue)
            .map_err(fem(Stage::Damage))?;
        let fatigue = self
            .update_fatigue(&state.fatigue, &phi, &u, &state.theta, self.config.dt)
            .map_err(fem(Stage::Fatigue))?;
        let (theta, ht) = self.solve_temperature(state, &load).map_err(fem(Stage::Temperature))?;
        diag.convection_clamped += ht.clamped as usize;
        diag.h_floored += ht.floored as usize;

        let mut next = FieldState {
            step,
            t,
            tension,
            u,
            phi,
            fatigue,
            theta,
            voltage: Vec::new(),
            history,
            conductivity: Vec::new(),
        };
        let (voltage, conductivity) = self.solve_voltage(&next, &load).map_err(fem(Stage::Voltage))?;
        next.voltage = voltage;
        next.conductivity = conductivity;
        Ok((next, diag))
    }
}

/// Maxima recorded after each step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub t: f64,
    pub phi_max: f64,
    pub fatigue_max: f64,
    pub theta_max: f64,
    pub voltage_drop: f64,
}

impl SeriesPoint {
    fn of(state: &FieldState) -> Self {
        Self {
            t: state.t,
            phi_max: state.max_damage(),
            fatigue_max: state.max_fatigue(),
            theta_max: state.max_temperature(),
            voltage_drop: state.voltage_drop(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Failure {
    pub step: usize,
    pub time: f64,
    pub theta_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub series: Vec<SeriesPoint>,
    pub failure: Option<Failure>,
    pub snapshots: Vec<FieldState>,
    pub diagnostics: Diagnostics,
}

impl SimulationResult {
    pub fn failure_time(&self) -> Option<f64> {
        self.failure.map(|f| f.time)
    }
}

/// A solver error together with everything computed before it.
#[derive(Debug, Error)]
#[error("{source}")]
pub struct RunFailure {
    pub partial: SimulationResult,
    #[source]
    pub source: SolverError,
}

/// Step-by-step driver over a [`LineModel`].
pub struct Simulation<'m> {
    model: &'m LineModel,
    state: FieldState,
    diagnostics: Diagnostics,
}

impl<'m> Simulation<'m> {
    pub fn new(model: &'m LineModel) -> Result<Self, SolverError> {
        Ok(Self {
            model,
            state: model.initial_state()?,
            diagnostics: Diagnostics::default(),
        })
    }

    pub fn state(&self) -> &FieldState {
        &self.state
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.diagnostics
    }

    pub fn step(&mut self) -> Result<SeriesPoint, SolverError> {
        let (next, diag) = self.model.step(&self.state)?;
        self.state = next;
        self.diagnostics.absorb(diag);
        Ok(SeriesPoint::of(&self.state))
    }

    pub fn is_failed(&self) -> bool {
        self.state.step > 0 && self.state.max_temperature() > self.model.config.theta_lim
    }

    pub fn into_state(self) -> FieldState {
        self.state
    }
}

/// Runs until `n_steps` or the first step whose peak temperature exceeds the threshold.
pub fn run(model: &LineModel) -> Result<SimulationResult, Box<RunFailure>> {
    let every = model.config.snapshot_every;
    let mut result = SimulationResult {
        series: Vec::with_capacity(model.config.n_steps),
        failure: None,
        snapshots: Vec::new(),
        diagnostics: Diagnostics::default(),
    };
    let mut sim = match Simulation::new(model) {
        Ok(sim) => sim,
        Err(source) => {
            return Err(Box::new(RunFailure {
                partial: result,
                source,
            }))
        }
    };
    if every > 0 {
        result.snapshots.push(sim.state().clone());
    }
    for _ in 0..model.config.n_steps {
        match sim.step() {
            Ok(point) => result.series.push(point),
            Err(source) => {
                result.diagnostics = sim.diagnostics();
                return Err(Box::new(RunFailure {
                    partial: result,
                    source,
                }));
            }
        }
        let state = sim.state();
        if every > 0 && state.step % every == 0 {
            result.snapshots.push(state.clone());
        }
        if sim.is_failed() {
            result.failure = Some(Failure {
                step: state.step,
                time: state.t,
                theta_max: state.max_temperature(),
            });
            break;
        }
    }
    result.diagnostics = sim.diagnostics();
    let d = result.diagnostics;
    if d.drag_clamped > 0 || d.convection_clamped > 0 {
        warn!(
            "Reynolds number outside tabulated range: drag clamped {} times, convection clamped {} times",
            d.drag_clamped, d.convection_clamped
        );
    }
    if d.h_floored > 0 {
        warn!("natural-convection floor applied on {} steps", d.h_floored);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DragTable, STANDARD_GRAVITY};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn model_with(spread: Option<f64>, loads: LoadProfile, n_elements: usize) -> LineModel {
        let geometry = CableGeometry::new(200.0, 0.04, spread).unwrap();
        let material = MaterialParams::default();
        let sag = SagParams {
            pretension: 36e3,
            weight_per_length: material.density * STANDARD_GRAVITY * geometry.area0(),
            thermal_expansion: 2.3e-5,
            span: 200.0,
            theta_ref: material.theta0,
        };
        let wind = WindLoadParams {
            rho_air: 1.225,
            drag: DragTable::default(),
            theta_w: PI / 2.0,
            span_factor: 1.0,
        };
        let config = SimulationConfig {
            n_elements,
            n_steps: 50,
            ..SimulationConfig::default()
        };
        LineModel::new(
            geometry,
            material,
            AirParams::default(),
            ThermalParams::default(),
            sag,
            wind,
            loads,
            config,
        )
        .unwrap()
    }

    fn steady(current: f64) -> LoadProfile {
        LoadProfile::steady(3.0, 300.0, current)
    }

    fn blank(model: &LineModel) -> FieldState {
        let n = model.mesh.n_nodes();
        FieldState {
            step: 0,
            t: 0.0,
            tension: 0.0,
            u: vec![0.0; n],
            phi: vec![0.0; n],
            fatigue: vec![0.0; n],
            theta: vec![model.material.theta0; n],
            voltage: vec![0.0; n],
            history: vec![0.0; n],
            conductivity: vec![[0.0; 2]; model.mesh.n_elements()],
        }
    }

    #[test]
    fn convective_h_texas_august() {
        let air = AirParams::default();
        let ht = convective_h(2.63652, 0.04, &air, &ThermalParams::default());
        assert_relative_eq!(ht.reynolds, 7030.72, max_relative = 1e-5);
        // band 4000-40000: C = 0.193, m = 0.618
        let nu = 0.193 * 7030.72_f64.powf(0.618) * 0.71_f64.powf(1.0 / 3.0);
        assert_relative_eq!(ht.h, nu * 0.0295 / 0.04, max_relative = 1e-5);
        assert!((ht.h - 30.3).abs() < 0.1, "h = {}", ht.h);
        assert!(!ht.clamped && !ht.floored);
    }

    #[test]
    fn convective_h_calm_air_uses_floor() {
        let thermal = ThermalParams::default();
        let ht = convective_h(0.0, 0.04, &AirParams::default(), &thermal);
        assert_eq!(ht.h, thermal.h_min);
        assert!(ht.floored);
        let fast = convective_h(500.0, 0.04, &AirParams::default(), &thermal);
        assert!(fast.clamped);
    }

    #[test]
    fn bar_under_end_load() {
        let m = model_with(None, steady(1500.0), 50);
        let s = blank(&m);
        let h = 36e3;
        let u = m.solve_displacement(&s, h).unwrap();
        let ya = m.material.youngs_modulus * m.geometry.area0();
        for (i, x) in m.mesh.nodes().iter().enumerate() {
            assert_relative_eq!(u[i], h * x / ya, max_relative = 1e-9, epsilon = 1e-15);
        }
        let u2 = m.solve_displacement(&s, 2.0 * h).unwrap();
        for i in 0..u.len() {
            assert_relative_eq!(u2[i], 2.0 * u[i], max_relative = 1e-12, epsilon = 1e-18);
        }
        assert!(m.solve_displacement(&s, 0.0).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn history_is_running_max() {
        let m = model_with(None, steady(1500.0), 10);
        let y = m.material.youngs_modulus;
        let strains = [1e-3, 2e-3, 0.5e-3, 3e-3, 1e-3];
        let mut hist = vec![0.0; m.mesh.n_nodes()];
        let mut expect = 0.0_f64;
        for (k, &e) in strains.iter().enumerate() {
            let u: Vec<f64> = m.mesh.nodes().iter().map(|x| e * x).collect();
            hist = m.update_history(&hist, &u);
            expect = expect.max(y * e * e);
            for &h in &hist {
                assert_relative_eq!(h, expect, max_relative = 1e-9);
            }
            if k == 0 {
                assert_relative_eq!(hist[3], y * 1e-6, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn damage_zero_data() {
        let m = model_with(None, steady(1500.0), 20);
        let z = vec![0.0; m.mesh.n_nodes()];
        assert!(m.solve_damage(&z, &z).unwrap().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn damage_uniform_history_matches_pointwise_balance() {
        let m = model_with(None, steady(1500.0), 20);
        let (gamma, gc) = (m.material.layer_width, m.material.fracture_energy);
        let h0 = 3.6e5;
        let f0 = 120.0;
        let hist = vec![h0; m.mesh.n_nodes()];
        let fat = vec![f0; m.mesh.n_nodes()];
        // No gradient: (1 - phi) H - (gc phi - F) / gamma = 0
        let expect = (h0 + f0 / gamma) / (h0 + gc / gamma);
        for p in m.solve_damage(&hist, &fat).unwrap() {
            assert_relative_eq!(p, expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn damage_grows_with_fatigue() {
        let m = model_with(Some(2.0), steady(1500.0), 100);
        let hist = vec![1e4; m.mesh.n_nodes()];
        let mut prev = -1.0;
        for f in [0.0, 10.0, 100.0, 1000.0] {
            let p = m.solve_damage(&hist, &vec![f; m.mesh.n_nodes()]).unwrap();
            assert!(p[50] > prev);
            prev = p[50];
        }
    }

    #[test]
    fn fatigue_pointwise_rate() {
        let m = model_with(None, steady(1500.0), 20);
        let n = m.mesh.n_nodes();
        let mat = m.material;
        let (strain, phi, theta, dt) = (4e-4, 0.05, 320.0, 0.01);
        let u: Vec<f64> = m.mesh.nodes().iter().map(|x| strain * x).collect();
        let f0 = vec![7.0; n];
        let f1 = m.update_fatigue(&f0, &vec![phi; n], &u, &vec![theta; n], dt).unwrap();
        let expect =
            dt * mat.density * mat.aging_coeff * (theta / mat.theta0) * (1.0 - phi) * mat.youngs_modulus * strain * phi
                / mat.layer_width;
        for v in &f1 {
            assert_relative_eq!(v - 7.0, expect, max_relative = 1e-9);
        }
        let untouched = m.update_fatigue(&f0, &vec![0.0; n], &u, &vec![theta; n], dt).unwrap();
        assert_eq!(untouched, f0);
    }

    #[test]
    fn ohmic_voltage_drop() {
        let m = model_with(None, steady(1500.0), 100);
        let s = blank(&m);
        let load = LoadSample {
            t: 0.0,
            wind_speed: 3.0,
            ambient_temp: 300.0,
            current: 1500.0,
        };
        let (v, _) = m.solve_voltage(&s, &load).unwrap();
        let expect = 1500.0 * 200.0 / (3.77e7 * m.geometry.area0());
        assert_relative_eq!(v[100], expect, max_relative = 1e-9);
        assert!((expect - 6.33).abs() < 0.01);

        let mut warm = s.clone();
        warm.theta = vec![m.material.theta0 + 40.0; m.mesh.n_nodes()];
        let (vw, _) = m.solve_voltage(&warm, &load).unwrap();
        assert_relative_eq!(vw[100], expect * (1.0 + 3.9e-3 * 40.0), max_relative = 1e-9);

        let off = LoadSample { current: 0.0, ..load };
        assert!(m.solve_voltage(&s, &off).unwrap().0.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn uniform_temperature_matches_heat_balance() {
        let m = model_with(None, steady(1500.0), 50);
        let mut s = blank(&m);
        let load = m.loads.sample(0.0);
        let (v, sigma) = m.solve_voltage(&s, &load).unwrap();
        s.voltage = v;
        s.conductivity = sigma;
        let (theta, ht) = m.solve_temperature(&s, &load).unwrap();
        let a0 = m.geometry.area0();
        let qj = 1500.0_f64.powi(2) / (3.77e7 * a0 * a0);
        let expect = 300.0 + qj * a0 / (ht.h * PI * 0.04);
        for t in theta {
            assert_relative_eq!(t, expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn zero_current_keeps_ambient() {
        let m = model_with(Some(1.5), steady(0.0), 100);
        let mut sim = Simulation::new(&m).unwrap();
        for _ in 0..20 {
            sim.step().unwrap();
            for &t in &sim.state().theta {
                assert!((t - 300.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn more_wind_runs_cooler() {
        let m = model_with(None, steady(1500.0), 40);
        let mut s = blank(&m);
        let load = m.loads.sample(0.0);
        let (v, sigma) = m.solve_voltage(&s, &load).unwrap();
        s.voltage = v;
        s.conductivity = sigma;
        let calm = m
            .solve_temperature(
                &s,
                &LoadSample {
                    wind_speed: 1.0,
                    ..load
                },
            )
            .unwrap()
            .0;
        let windy = m
            .solve_temperature(
                &s,
                &LoadSample {
                    wind_speed: 6.0,
                    ..load
                },
            )
            .unwrap()
            .0;
        assert!(windy[20] < calm[20]);
    }

    #[test]
    fn first_step_is_sane() {
        let m = model_with(Some(1.5), steady(1500.0), 200);
        let mut sim = Simulation::new(&m).unwrap();
        let p = sim.step().unwrap();
        assert!(p.phi_max >= 0.0 && p.theta_max >= 300.0);
        let s = sim.state();
        for v in [&s.u, &s.phi, &s.fatigue, &s.theta, &s.voltage, &s.history] {
            assert!(v.iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn stepping_is_deterministic() {
        let m = model_with(Some(1.5), steady(1500.0), 100);
        let s0 = m.initial_state().unwrap();
        let a = m.step(&m.step(&s0).unwrap().0).unwrap().0;
        let copy = s0.clone();
        let b = m.step(&m.step(&copy).unwrap().0).unwrap().0;
        assert_eq!(a, b);
    }

    #[test]
    fn zero_threshold_fails_immediately() {
        let mut m = model_with(None, steady(1500.0), 20);
        m.config.theta_lim = 0.0;
        let r = run(&m).unwrap();
        assert_eq!(r.failure.unwrap().step, 1);
        assert_eq!(r.series.len(), 1);
    }

    #[test]
    fn degradation_floor() {
        assert_eq!(degradation(1.0), DEGRADATION_FLOOR);
        assert_eq!(degradation(1.7), DEGRADATION_FLOOR);
        assert_eq!(degradation(-0.2), 1.0);
        assert_relative_eq!(degradation(0.5), 0.25);
    }
}
