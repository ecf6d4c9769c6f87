//! CSV and JSON emission of run and campaign results.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so equal
//! results always produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use thiserror::Error;

use crate::campaign::{ConvergenceOutcome, PfOutcome, UqOutcome};
use crate::coupled::{Diagnostics, FieldState, SimulationResult};
use crate::scenario::Scenario;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: non-finite value {value} in column {column}")]
    NonFinite { path: String, column: String, value: f64 },
}

/// Collects output files under one directory.
#[derive(Debug, Clone)]
pub struct ReportWriter {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl ReportWriter {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, ReportError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| ReportError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Self {
            dir,
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Files written so far, in order.
    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes a numeric table; `None` cells are left empty.
    pub fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<Option<f64>>]) -> Result<PathBuf, ReportError> {
        let path = self.dir.join(name);
        let label = path.display().to_string();
        let csv_err = |source| ReportError::Csv {
            path: label.clone(),
            source,
        };
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            let mut record = Vec::with_capacity(row.len());
            for (col, cell) in row.iter().enumerate() {
                record.push(match cell {
                    Some(v) if !v.is_finite() => {
                        return Err(ReportError::NonFinite {
                            path: label.clone(),
                            column: header.get(col).unwrap_or(&"?").to_string(),
                            value: *v,
                        })
                    }
                    Some(v) => v.to_string(),
                    None => String::new(),
                });
            }
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush().map_err(|source| ReportError::Io {
            path: label.clone(),
            source,
        })?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, ReportError> {
        let path = self.dir.join(name);
        let label = path.display().to_string();
        let mut text = serde_json::to_string_pretty(value).map_err(|source| ReportError::Json {
            path: label.clone(),
            source,
        })?;
        text.push('\n');
        fs::write(&path, text).map_err(|source| ReportError::Io { path: label, source })?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn text(&mut self, name: &str, text: &str) -> Result<PathBuf, ReportError> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|source| ReportError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.written.push(path.clone());
        Ok(path)
    }
}

fn zip_columns(columns: &[&[f64]]) -> Vec<Vec<Option<f64>>> {
    let len = columns.iter().map(|c| c.len()).min().unwrap_or(0);
    (0..len).map(|i| columns.iter().map(|c| Some(c[i])).collect()).collect()
}

/// Outcome of a deterministic run as written to `failure_summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureSummary {
    pub scenario: String,
    pub damage: String,
    pub spread: Option<f64>,
    pub failed: bool,
    pub failure_time: Option<f64>,
    pub failure_step: Option<usize>,
    pub theta_max_at_failure: Option<f64>,
    pub steps_completed: usize,
    pub diagnostics: Diagnostics,
    /// Solver error that stopped the run early.
    pub error: Option<String>,
}

impl FailureSummary {
    pub fn new(scenario: &Scenario, result: &SimulationResult, error: Option<String>) -> Self {
        Self {
            scenario: scenario.name.clone(),
            damage: scenario.damage.to_string(),
            spread: scenario.damage_spread(),
            failed: result.failure.is_some(),
            failure_time: result.failure.map(|f| f.time),
            failure_step: result.failure.map(|f| f.step),
            theta_max_at_failure: result.failure.map(|f| f.theta_max),
            steps_completed: result.series.len(),
            diagnostics: result.diagnostics,
            error,
        }
    }
}

/// `timeseries.csv`, one snapshot CSV per stored state and `failure_summary.json`.
pub fn write_simulation(
    out: &mut ReportWriter,
    scenario: &Scenario,
    nodes: &[f64],
    result: &SimulationResult,
    error: Option<String>,
) -> Result<(), ReportError> {
    let rows: Vec<Vec<Option<f64>>> = result
        .series
        .iter()
        .map(|p| {
            vec![
                Some(p.t),
                Some(p.phi_max),
                Some(p.fatigue_max),
                Some(p.theta_max),
                Some(p.voltage_drop),
            ]
        })
        .collect();
    out.table(
        "timeseries.csv",
        &["t_years", "phi_max", "fatigue_max", "theta_max_k", "voltage_drop_v"],
        &rows,
    )?;
    for snap in &result.snapshots {
        write_snapshot(out, nodes, snap)?;
    }
    out.json("failure_summary.json", &FailureSummary::new(scenario, result, error))?;
    Ok(())
}

/// Nodal fields of one state, `snapshot_<step>.csv`.
pub fn write_snapshot(out: &mut ReportWriter, nodes: &[f64], state: &FieldState) -> Result<PathBuf, ReportError> {
    let rows = zip_columns(&[
        nodes,
        &state.u,
        &state.phi,
        &state.fatigue,
        &state.theta,
        &state.voltage,
        &state.history,
    ]);
    out.table(
        &format!("snapshot_{:05}.csv", state.step),
        &["x_m", "u_m", "phi", "fatigue", "theta_k", "voltage_v", "history"],
        &rows,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct ManifestParameter {
    name: String,
    mean: f64,
    lower: f64,
    upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct ManifestNode {
    index: usize,
    coords: Vec<f64>,
    weight: f64,
    failure_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct CampaignManifest<'a> {
    scenario: &'a str,
    damage: String,
    parameters: Vec<ManifestParameter>,
    points_per_dim: usize,
    truncation_steps: Option<usize>,
    nodes: Vec<ManifestNode>,
}

fn manifest_nodes(realizations: &[crate::campaign::Realization]) -> Vec<ManifestNode> {
    realizations
        .iter()
        .enumerate()
        .map(|(index, r)| ManifestNode {
            index,
            coords: r.coords.clone(),
            weight: r.weight,
            failure_time: r.failure_time,
        })
        .collect()
}

fn manifest_params(params: &[crate::stochastic::RandomParameter]) -> Vec<ManifestParameter> {
    params
        .iter()
        .map(|p| ManifestParameter {
            name: p.name.to_string(),
            mean: p.mean,
            lower: p.lower(),
            upper: p.upper(),
        })
        .collect()
}

/// `uq_mean.csv`, `uq_std.csv`, `sobol.csv` and `campaign_manifest.json`.
pub fn write_uq(out: &mut ReportWriter, scenario: &Scenario, uq: &UqOutcome) -> Result<(), ReportError> {
    out.table(
        "uq_mean.csv",
        &["t_years", "theta_max_k", "phi_max"],
        &zip_columns(&[&uq.times, &uq.theta_mean, &uq.phi_mean]),
    )?;
    out.table(
        "uq_std.csv",
        &["t_years", "theta_max_k", "phi_max"],
        &zip_columns(&[&uq.times, &uq.theta_std, &uq.phi_std]),
    )?;
    let names: Vec<String> = uq.grid_params.iter().map(|p| format!("S_{}", p.name)).collect();
    let mut header: Vec<&str> = vec!["t_years"];
    header.extend(names.iter().map(String::as_str));
    header.push("low_variance");
    let rows: Vec<Vec<Option<f64>>> = (0..uq.times.len())
        .map(|t| {
            let mut row = vec![Some(uq.times[t])];
            row.extend(uq.sobol.indices.iter().map(|s| Some(s[t])));
            row.push(Some(if uq.sobol.low_variance[t] { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    out.table("sobol.csv", &header, &rows)?;
    out.json(
        "campaign_manifest.json",
        &CampaignManifest {
            scenario: &scenario.name,
            damage: scenario.damage.to_string(),
            parameters: manifest_params(&uq.grid_params),
            points_per_dim: uq.points_per_dim,
            truncation_steps: Some(uq.truncation),
            nodes: manifest_nodes(&uq.realizations),
        },
    )?;
    Ok(())
}

/// `pf_<state>_<damage>.csv` per outcome plus `pf_combined.csv` and `campaign_manifest.json`.
pub fn write_pf(out: &mut ReportWriter, outcomes: &[PfOutcome]) -> Result<(), ReportError> {
    for pf in outcomes {
        let rows = zip_columns(&[&pf.times, &pf.curve.p_f]);
        out.table(
            &format!("pf_{}_{}.csv", pf.state, pf.damage.key()),
            &["t_years", "p_f"],
            &rows,
        )?;
    }
    if let Some(longest) = outcomes.iter().max_by_key(|o| o.times.len()) {
        let names: Vec<String> = outcomes
            .iter()
            .map(|o| format!("{}_{}", o.state, o.damage.key()))
            .collect();
        let mut header = vec!["t_years"];
        header.extend(names.iter().map(String::as_str));
        let rows: Vec<Vec<Option<f64>>> = (0..longest.times.len())
            .map(|t| {
                let mut row = vec![Some(longest.times[t])];
                row.extend(outcomes.iter().map(|o| o.curve.p_f.get(t).copied()));
                row
            })
            .collect();
        out.table("pf_combined.csv", &header, &rows)?;
    }
    let manifests: Vec<CampaignManifest> = outcomes
        .iter()
        .map(|pf| CampaignManifest {
            scenario: &pf.state,
            damage: pf.damage.key().to_string(),
            parameters: manifest_params(&pf.grid_params),
            points_per_dim: pf.points_per_dim,
            truncation_steps: None,
            nodes: manifest_nodes(&pf.realizations),
        })
        .collect();
    out.json("campaign_manifest.json", &manifests)?;
    Ok(())
}

/// `convergence.csv` with one row per method and evaluation count.
pub fn write_convergence(out: &mut ReportWriter, conv: &ConvergenceOutcome) -> Result<(), ReportError> {
    let path = out.dir().join("convergence.csv");
    let label = path.display().to_string();
    let csv_err = |source| ReportError::Csv {
        path: label.clone(),
        source,
    };
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    w.write_record(["method", "evaluations", "relative_error"])
        .map_err(csv_err)?;
    for (method, points) in [("pcm", &conv.pcm), ("mc", &conv.mc)] {
        for e in points.iter() {
            if !e.relative_error.is_finite() {
                return Err(ReportError::NonFinite {
                    path: label.clone(),
                    column: "relative_error".into(),
                    value: e.relative_error,
                });
            }
            w.write_record([
                method.to_string(),
                e.evaluations.to_string(),
                e.relative_error.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|source| ReportError::Io {
        path: label.clone(),
        source,
    })?;
    out.written.push(path);
    out.json("convergence_manifest.json", conv)?;
    Ok(())
}

/// Everything needed to repeat a command: resolved configuration, code
/// version, seed and wall-clock bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub workers: usize,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub scenario: Scenario,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub additional_scenarios: Vec<Scenario>,
}

/// Name of the manifest file; the only output that varies between repeats.
pub const RUN_MANIFEST: &str = "run_manifest.json";

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl RunManifest {
    pub fn new(command: &str, scenarios: &[Scenario], workers: usize, started_unix: u64) -> Self {
        let scenario = scenarios[0].clone();
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed: scenario.campaign.seed,
            workers,
            started_unix,
            finished_unix: unix_now(),
            scenario,
            additional_scenarios: scenarios[1..].to_vec(),
        }
    }

    pub fn write(&self, out: &mut ReportWriter) -> Result<PathBuf, ReportError> {
        out.json(RUN_MANIFEST, self)
    }
}
