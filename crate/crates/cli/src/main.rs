//! Command-line driver: deterministic runs, collocation campaigns, failure
//! probability sweeps and convergence studies.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use linelife::campaign::{convergence_study, pf_campaign, uq_campaign, CampaignError};
use linelife::coupled::run;
use linelife::exec::Executor;
use linelife::report::{
    unix_now, write_convergence, write_pf, write_simulation, write_uq, ReportError, ReportWriter, RunManifest,
};
use linelife::scenario::{load_scenarios, DamageSpec, Scenario, ScenarioError};
use linelife::stochastic::ParamName;

const DEFAULT_OUT: &str = "linelife-out";

#[derive(Debug, Parser)]
#[command(
    name = "linelife",
    version,
    about = "Coupled phase-field lifespan model of overhead transmission lines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single deterministic run: time series, field snapshots and failure summary.
    Simulate(RunArgs),
    /// Collocation campaign: mean, standard deviation and Sobol indices of peak temperature.
    Uq(RunArgs),
    /// Failure probability curves for every scenario and damage level.
    Pf(RunArgs),
    /// Collocation versus Monte Carlo error of the mean temperature field.
    Convergence(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Uq(_) => "uq",
            Command::Pf(_) => "pf",
            Command::Convergence(_) => "convergence",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Simulate(a) | Command::Uq(a) | Command::Pf(a) | Command::Convergence(a) => a,
        }
    }
}

/// Flags override the matching scenario fields.
#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file, run manifest or preset name (texas, california, michigan, florida).
    /// Repeat or comma-separate to compare several scenarios with `pf`.
    #[arg(long, env = "LINELIFE_SCENARIO", value_delimiter = ',', required = true)]
    scenario: Vec<String>,
    /// Uncertain parameters, e.g. g_c,a,theta_b,w_b,I_b.
    #[arg(long, env = "LINELIFE_PARAMS", value_delimiter = ',')]
    params: Option<Vec<ParamName>>,
    /// Collocation points per dimension.
    #[arg(long, env = "LINELIFE_POINTS")]
    points: Option<usize>,
    /// Worker threads; defaults to all available cores.
    #[arg(long, env = "LINELIFE_WORKERS")]
    workers: Option<usize>,
    /// Monte Carlo seed.
    #[arg(long, env = "LINELIFE_SEED")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "LINELIFE_OUT")]
    out: Option<PathBuf>,
    /// Damage level or neck spread in metres; `pf` accepts a list of levels.
    #[arg(long, env = "LINELIFE_DAMAGE", value_delimiter = ',')]
    damage: Option<Vec<DamageSpec>>,
    /// Finite elements along the span.
    #[arg(long, env = "LINELIFE_ELEMENTS")]
    elements: Option<usize>,
    /// Number of time steps.
    #[arg(long, env = "LINELIFE_STEPS")]
    steps: Option<usize>,
    /// Temperature limit in kelvin.
    #[arg(long, env = "LINELIFE_THETA_LIM")]
    theta_lim: Option<f64>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::Runtime(format!("writing results: {e}"))
    }
}

impl From<CampaignError> for CliError {
    fn from(e: CampaignError) -> Self {
        if e.is_runtime() {
            CliError::Runtime(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Config(m) => eprintln!("configuration error: {m}"),
                CliError::Runtime(m) => eprintln!("solver error: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}

fn execute(command: &Command) -> Result<(), CliError> {
    let args = command.args();
    let started = unix_now();
    let scenarios = resolve(command, args)?;
    let first = &scenarios[0];
    let exec = Executor::new(first.campaign.workers);
    let dir = first
        .campaign
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mut out = ReportWriter::new(dir)?;
    let outcome = match command {
        Command::Simulate(_) => simulate(&mut out, first),
        Command::Uq(_) => uq(&mut out, first, &exec),
        Command::Pf(_) => pf(&mut out, &scenarios, &exec),
        Command::Convergence(_) => convergence(&mut out, first, &exec),
    };
    RunManifest::new(command.name(), &scenarios, exec.workers(), started).write(&mut out)?;
    outcome?;
    println!("results written to {}", out.dir().display());
    Ok(())
}

/// Loads every scenario and applies the command-line overrides.
fn resolve(command: &Command, args: &RunArgs) -> Result<Vec<Scenario>, CliError> {
    let mut scenarios = Vec::new();
    for spec in &args.scenario {
        scenarios.extend(load_scenarios(spec)?);
    }
    let damage = args.damage.as_deref().unwrap_or_default();
    let pf_levels = match command {
        Command::Pf(_) if !damage.is_empty() => Some(
            damage
                .iter()
                .map(|d| match d {
                    DamageSpec::Level(l) => Ok(*l),
                    DamageSpec::Spread(s) => Err(CliError::Config(format!(
                        "pf sweeps named damage levels, got spread {s}"
                    ))),
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        _ if damage.len() > 1 => {
            return Err(CliError::Config(format!(
                "{} takes a single damage value",
                command.name()
            )));
        }
        _ => None,
    };
    for s in &mut scenarios {
        let c = &mut s.campaign;
        if let Some(p) = &args.params {
            c.parameters.clone_from(p);
        }
        if let Some(p) = args.points {
            c.points = p;
        }
        if args.workers.is_some() {
            c.workers = args.workers;
        }
        if let Some(seed) = args.seed {
            c.seed = seed;
        }
        if args.out.is_some() {
            c.output_dir.clone_from(&args.out);
        }
        if let Some(levels) = &pf_levels {
            c.damage_levels.clone_from(levels);
        } else if let Some(d) = damage.first() {
            s.damage = *d;
        }
        if let Some(n) = args.elements {
            s.simulation.n_elements = n;
        }
        if let Some(n) = args.steps {
            s.simulation.n_steps = n;
        }
        if let Some(t) = args.theta_lim {
            s.simulation.theta_lim = t;
        }
        s.validate()?;
    }
    if scenarios.len() > 1 && !matches!(command, Command::Pf(_)) {
        return Err(CliError::Config(format!("{} takes a single scenario", command.name())));
    }
    if let Some(w) = scenarios[0].campaign.workers {
        if w == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
    }
    Ok(scenarios)
}

fn simulate(out: &mut ReportWriter, scenario: &Scenario) -> Result<(), CliError> {
    let model = scenario.build_model()?;
    let nodes = model.mesh.nodes();
    match run(&model) {
        Ok(result) => {
            write_simulation(out, scenario, &nodes, &result, None)?;
            match result.failure {
                Some(f) => println!(
                    "{} ({}): failure at step {} after {:.2} years, theta_max {:.2} K",
                    scenario.name, scenario.damage, f.step, f.time, f.theta_max
                ),
                None => println!(
                    "{} ({}): no failure within {:.2} years",
                    scenario.name,
                    scenario.damage,
                    scenario.simulation.time_of(scenario.simulation.n_steps)
                ),
            }
            Ok(())
        }
        Err(failure) => {
            let message = failure.source.to_string();
            write_simulation(out, scenario, &nodes, &failure.partial, Some(message.clone()))?;
            Err(CliError::Runtime(message))
        }
    }
}

fn uq(out: &mut ReportWriter, scenario: &Scenario, exec: &Executor) -> Result<(), CliError> {
    let outcome = uq_campaign(scenario, exec)?;
    write_uq(out, scenario, &outcome)?;
    println!(
        "{}: {} realizations, statistics over {:.2} years",
        scenario.name,
        outcome.realizations.len(),
        outcome.times.last().copied().unwrap_or(0.0)
    );
    let last = outcome.truncation - 1;
    for (j, p) in outcome.grid_params.iter().enumerate() {
        println!(
            "  S_{:<8} first {:.4}  last {:.4}",
            p.name.key(),
            outcome.sobol.indices[j][0],
            outcome.sobol.indices[j][last]
        );
    }
    Ok(())
}

fn pf(out: &mut ReportWriter, scenarios: &[Scenario], exec: &Executor) -> Result<(), CliError> {
    let mut outcomes = Vec::new();
    for scenario in scenarios {
        for &level in &scenario.campaign.damage_levels {
            let outcome = pf_campaign(scenario, level, exec)?;
            let half = outcome.curve.first_reaching(0.5).map(|i| outcome.times[i]);
            let end = outcome.curve.p_f.last().copied().unwrap_or(0.0);
            match half {
                Some(t) => println!(
                    "{} {}: p_f reaches 0.5 at {t:.2} years, {end:.3} at the horizon",
                    outcome.state,
                    level.key()
                ),
                None => println!("{} {}: p_f {end:.3} at the horizon", outcome.state, level.key()),
            }
            outcomes.push(outcome);
        }
    }
    write_pf(out, &outcomes)?;
    Ok(())
}

fn convergence(out: &mut ReportWriter, scenario: &Scenario, exec: &Executor) -> Result<(), CliError> {
    let outcome = convergence_study(scenario, exec)?;
    write_convergence(out, &outcome)?;
    println!(
        "{}: mean temperature error over {} at step {} ({:.2} years)",
        scenario.name,
        outcome.parameter.name.key(),
        outcome.step,
        outcome.time
    );
    for e in &outcome.pcm {
        println!("  pcm {:>6}  {:.3e}", e.evaluations, e.relative_error);
    }
    for e in &outcome.mc {
        println!("  mc  {:>6}  {:.3e}", e.evaluations, e.relative_error);
    }
    Ok(())
}
