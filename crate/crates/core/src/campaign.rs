//! Campaign orchestration: deterministic runs evaluated on collocation grids
//! or Monte Carlo samples, reduced to statistics in fixed index order.

use serde::Serialize;
use thiserror::Error;

use crate::coupled::{run, RunFailure, Simulation, SimulationResult};
use crate::exec::Executor;
use crate::scenario::{DamageLevel, DamageSpec, Scenario, ScenarioError};
use crate::stochastic::{
    bernoulli_transform, expectation, probability_of_failure, relative_error, sample_mean, sample_parameters,
    sobol_first_order, std_dev, CollocationGrid, FailureCurve, ParamName, RandomParameter, SobolIndices,
    StochasticError,
};

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Stochastic(#[from] StochasticError),
    #[error("realization {index}: {source}")]
    Run {
        index: usize,
        #[source]
        source: Box<RunFailure>,
    },
    #[error("{0}")]
    Invalid(String),
}

impl CampaignError {
    /// True when the failure came from the solver rather than the configuration.
    pub fn is_runtime(&self) -> bool {
        matches!(self, CampaignError::Run { .. })
    }
}

fn overrides(params: &[RandomParameter], coords: &[f64]) -> Vec<(ParamName, f64)> {
    params.iter().zip(coords).map(|(p, &x)| (p.name, x)).collect()
}

/// Runs the scenario with the listed inputs replaced; snapshots are skipped.
pub fn run_realization(
    scenario: &Scenario,
    params: &[RandomParameter],
    coords: &[f64],
    index: usize,
) -> Result<SimulationResult, CampaignError> {
    let mut model = scenario.build_model_with(&overrides(params, coords))?;
    model.config.snapshot_every = 0;
    run(&model).map_err(|source| CampaignError::Run { index, source })
}

/// Peak-value series of one grid node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Realization {
    pub coords: Vec<f64>,
    pub weight: f64,
    pub failure_time: Option<f64>,
    #[serde(skip)]
    pub theta_max: Vec<f64>,
    #[serde(skip)]
    pub phi_max: Vec<f64>,
}

fn evaluate_grid(
    scenario: &Scenario,
    grid: &CollocationGrid,
    exec: &Executor,
) -> Result<Vec<Realization>, CampaignError> {
    let results = exec.map_range(grid.len(), |i| {
        let coords = grid.node(i);
        run_realization(scenario, grid.params(), &coords, i).map(|r| Realization {
            weight: grid.weight(i),
            failure_time: r.failure_time(),
            theta_max: r.series.iter().map(|p| p.theta_max).collect(),
            phi_max: r.series.iter().map(|p| p.phi_max).collect(),
            coords,
        })
    });
    results.into_iter().collect()
}

/// Statistics of a collocation campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UqOutcome {
    pub grid_params: Vec<RandomParameter>,
    pub points_per_dim: usize,
    pub realizations: Vec<Realization>,
    /// Number of leading steps shared by every realization.
    pub truncation: usize,
    pub times: Vec<f64>,
    pub theta_mean: Vec<f64>,
    pub theta_std: Vec<f64>,
    pub phi_mean: Vec<f64>,
    pub phi_std: Vec<f64>,
    pub sobol: SobolIndices,
}

impl UqOutcome {
    /// Index into the truncated series closest to `years`.
    pub fn index_at(&self, years: f64) -> Option<usize> {
        self.times.iter().position(|&t| t >= years - 1e-9)
    }
}

/// Mean, standard deviation and first-order Sobol indices of the peak
/// temperature over the configured parameters. Series are truncated at the
/// earliest failure across the grid.
pub fn uq_campaign(scenario: &Scenario, exec: &Executor) -> Result<UqOutcome, CampaignError> {
    let params = scenario.random_parameters(&scenario.campaign.parameters)?;
    let grid = CollocationGrid::new(params, scenario.campaign.points)?;
    let realizations = evaluate_grid(scenario, &grid, exec)?;
    let truncation = realizations.iter().map(|r| r.theta_max.len()).min().unwrap_or(0);
    if truncation == 0 {
        return Err(CampaignError::Invalid("a realization produced no time steps".into()));
    }
    let theta: Vec<Vec<f64>> = realizations
        .iter()
        .map(|r| r.theta_max[..truncation].to_vec())
        .collect();
    let phi: Vec<Vec<f64>> = realizations.iter().map(|r| r.phi_max[..truncation].to_vec()).collect();
    let theta_mean = expectation(&grid, &theta)?;
    let theta_std = std_dev(&grid, &theta, &theta_mean)?;
    let phi_mean = expectation(&grid, &phi)?;
    let phi_std = std_dev(&grid, &phi, &phi_mean)?;
    let sobol = sobol_first_order(&grid, &theta)?;
    let cfg = &scenario.simulation;
    Ok(UqOutcome {
        grid_params: grid.params().to_vec(),
        points_per_dim: grid.points_per_dim(),
        realizations,
        truncation,
        times: (1..=truncation).map(|s| cfg.time_of(s)).collect(),
        theta_mean,
        theta_std,
        phi_mean,
        phi_std,
        sobol,
    })
}

/// Failure-probability curve for one scenario and damage level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PfOutcome {
    pub state: String,
    pub damage: DamageLevel,
    pub spread: Option<f64>,
    pub grid_params: Vec<RandomParameter>,
    pub points_per_dim: usize,
    pub times: Vec<f64>,
    pub curve: FailureCurve,
    pub realizations: Vec<Realization>,
}

/// `P(theta_max > theta_lim)` over the full horizon.
pub fn pf_campaign(scenario: &Scenario, damage: DamageLevel, exec: &Executor) -> Result<PfOutcome, CampaignError> {
    let scenario = scenario.with_damage(DamageSpec::Level(damage));
    let names: Vec<ParamName> = scenario
        .campaign
        .parameters
        .iter()
        .copied()
        .filter(|&p| p != ParamName::ASigma || damage != DamageLevel::Pristine)
        .collect();
    let params = scenario.random_parameters(&names)?;
    let grid = CollocationGrid::new(params, scenario.campaign.points)?;
    let realizations = evaluate_grid(&scenario, &grid, exec)?;
    let cfg = &scenario.simulation;
    let horizon = cfg.n_steps;
    let indicators: Vec<Vec<f64>> = realizations
        .iter()
        .map(|r| bernoulli_transform(&r.theta_max, cfg.theta_lim, horizon))
        .collect();
    let curve = probability_of_failure(&grid, &indicators)?;
    Ok(PfOutcome {
        state: scenario.name.clone(),
        damage,
        spread: scenario.damage_spread(),
        grid_params: grid.params().to_vec(),
        points_per_dim: grid.points_per_dim(),
        times: (1..=curve.p_f.len()).map(|s| cfg.time_of(s)).collect(),
        curve,
        realizations,
    })
}

/// Nodal temperature after `step` steps, with the listed inputs replaced.
pub fn temperature_at_step(
    scenario: &Scenario,
    params: &[RandomParameter],
    coords: &[f64],
    step: usize,
    index: usize,
) -> Result<Vec<f64>, CampaignError> {
    let model = scenario.build_model_with(&overrides(params, coords))?;
    let to_run_error = |source| CampaignError::Run {
        index,
        source: Box::new(RunFailure {
            partial: SimulationResult {
                series: Vec::new(),
                failure: None,
                snapshots: Vec::new(),
                diagnostics: Default::default(),
            },
            source,
        }),
    };
    let mut sim = Simulation::new(&model).map_err(to_run_error)?;
    for _ in 0..step {
        sim.step().map_err(to_run_error)?;
    }
    Ok(sim.into_state().theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorPoint {
    /// Collocation points or Monte Carlo samples.
    pub evaluations: usize,
    pub relative_error: f64,
}

/// Error of the mean temperature field against a fine collocation reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceOutcome {
    pub parameter: RandomParameter,
    pub step: usize,
    pub time: f64,
    pub reference_points: usize,
    pub pcm: Vec<ErrorPoint>,
    pub mc: Vec<ErrorPoint>,
    pub seed: u64,
}

impl ConvergenceOutcome {
    pub fn pcm_error(&self, points: usize) -> Option<f64> {
        self.pcm
            .iter()
            .find(|e| e.evaluations == points)
            .map(|e| e.relative_error)
    }

    pub fn mc_error(&self, samples: usize) -> Option<f64> {
        self.mc
            .iter()
            .find(|e| e.evaluations == samples)
            .map(|e| e.relative_error)
    }
}

fn pcm_mean_field(
    scenario: &Scenario,
    param: RandomParameter,
    points: usize,
    step: usize,
    exec: &Executor,
) -> Result<Vec<f64>, CampaignError> {
    let grid = CollocationGrid::new(vec![param], points)?;
    let fields: Result<Vec<_>, _> = exec
        .map_range(grid.len(), |i| {
            temperature_at_step(scenario, grid.params(), &grid.node(i), step, i)
        })
        .into_iter()
        .collect();
    Ok(expectation(&grid, &fields?)?)
}

/// One-dimensional collocation versus Monte Carlo study at a fixed step.
pub fn convergence_study(scenario: &Scenario, exec: &Executor) -> Result<ConvergenceOutcome, CampaignError> {
    let c = &scenario.campaign;
    let step = c.convergence_step;
    if step == 0 || step > scenario.simulation.n_steps {
        return Err(CampaignError::Invalid(format!(
            "convergence step {step} outside 1..={}",
            scenario.simulation.n_steps
        )));
    }
    let param = scenario.random_parameters(&[c.convergence_parameter])?[0];
    let reference = pcm_mean_field(scenario, param, c.reference_points, step, exec)?;

    let mut pcm = Vec::with_capacity(c.pcm_orders.len());
    for &n in &c.pcm_orders {
        let mean = if n == c.reference_points {
            reference.clone()
        } else {
            pcm_mean_field(scenario, param, n, step, exec)?
        };
        pcm.push(ErrorPoint {
            evaluations: n,
            relative_error: relative_error(&mean, &reference)?,
        });
    }

    let mut counts = c.mc_samples.clone();
    counts.sort_unstable();
    counts.dedup();
    let mut mc = Vec::with_capacity(counts.len());
    if let Some(&largest) = counts.last() {
        let draws = sample_parameters(&[param], largest, c.seed);
        let fields: Result<Vec<_>, _> = exec
            .map(&draws, |x| temperature_at_step(scenario, &[param], x, step, 0))
            .into_iter()
            .collect();
        let fields = fields?;
        // smaller sample sizes are prefixes of the same seeded stream
        for n in counts {
            let mean = sample_mean(&fields[..n])?;
            mc.push(ErrorPoint {
                evaluations: n,
                relative_error: relative_error(&mean, &reference)?,
            });
        }
    }
    Ok(ConvergenceOutcome {
        parameter: param,
        step,
        time: scenario.simulation.time_of(step),
        reference_points: c.reference_points,
        pcm,
        mc,
        seed: c.seed,
    })
}
