//! Scenario configuration: TOML documents with includes, bundled presets and
//! construction of the deterministic model.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coupled::{LineModel, SolverError};
use crate::geometry::{CableGeometry, DragTable, GeometryError, SagParams, WindLoadParams, STANDARD_GRAVITY};
use crate::loading::{parse_weather_csv, CurrentLoad, LoadProfile, LoadingError, WeatherSeries, CELSIUS_OFFSET};
use crate::params::{AirParams, MaterialParams, SimulationConfig, ThermalParams};
use crate::stochastic::{ParamName, RandomParameter, StochasticError};

/// Files bundled into the binary, addressable by name.
const EMBEDDED: &[(&str, &str)] = &[
    ("conductor.toml", include_str!("../presets/conductor.toml")),
    ("texas.toml", include_str!("../presets/texas.toml")),
    ("texas.csv", include_str!("../presets/texas.csv")),
    ("california.toml", include_str!("../presets/california.toml")),
    ("california.csv", include_str!("../presets/california.csv")),
    ("michigan.toml", include_str!("../presets/michigan.toml")),
    ("michigan.csv", include_str!("../presets/michigan.csv")),
    ("florida.toml", include_str!("../presets/florida.toml")),
    ("florida.csv", include_str!("../presets/florida.csv")),
];

/// Names accepted in place of a scenario path.
pub const PRESETS: [&str; 4] = ["texas", "california", "michigan", "florida"];

const MAX_INCLUDE_DEPTH: usize = 16;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario {0:?} is neither a readable file nor a bundled preset ({presets})", presets = PRESETS.join(", "))]
    NotFound(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("include cycle through {0}")]
    IncludeCycle(String),
    #[error("weather data {origin}: {source}")]
    Weather {
        origin: String,
        #[source]
        source: LoadingError,
    },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("invalid geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Model(#[from] SolverError),
    #[error(transparent)]
    Stochastic(#[from] StochasticError),
}

/// Where a document came from, for resolving relative references.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    Dir(PathBuf),
    Embedded,
}

impl Origin {
    fn read(&self, name: &str) -> Result<(String, Origin, String), ScenarioError> {
        if let Origin::Dir(dir) = self {
            let path = dir.join(name);
            if path.is_file() {
                let text = std::fs::read_to_string(&path).map_err(|source| ScenarioError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                let parent = path.parent().map(Path::to_path_buf).unwrap_or_default();
                return Ok((text, Origin::Dir(parent), path.display().to_string()));
            }
        }
        embedded(name)
            .map(|text| (text.to_string(), Origin::Embedded, format!("<bundled {name}>")))
            .ok_or_else(|| ScenarioError::NotFound(name.to_string()))
    }
}

fn embedded(name: &str) -> Option<&'static str> {
    EMBEDDED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Text of a bundled file such as `texas.csv`.
pub fn bundled_file(name: &str) -> Option<&'static str> {
    embedded(name)
}

/// Weather given either as a CSV reference or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeatherSource {
    File(String),
    Inline(WeatherSeries),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DamageLevel {
    /// No neck at all.
    Pristine,
    Minimal,
    Moderate,
    Severe,
}

impl DamageLevel {
    pub const GRADED: [DamageLevel; 3] = [DamageLevel::Minimal, DamageLevel::Moderate, DamageLevel::Severe];

    pub fn key(&self) -> &'static str {
        match self {
            DamageLevel::Pristine => "pristine",
            DamageLevel::Minimal => "minimal",
            DamageLevel::Moderate => "moderate",
            DamageLevel::Severe => "severe",
        }
    }
}

/// A named damage level or an explicit neck spread in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DamageSpec {
    Level(DamageLevel),
    Spread(f64),
}

impl Default for DamageSpec {
    fn default() -> Self {
        DamageSpec::Level(DamageLevel::Minimal)
    }
}

impl fmt::Display for DamageSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DamageSpec::Level(l) => f.write_str(l.key()),
            DamageSpec::Spread(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for DamageSpec {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        for level in [
            DamageLevel::Pristine,
            DamageLevel::Minimal,
            DamageLevel::Moderate,
            DamageLevel::Severe,
        ] {
            if s.eq_ignore_ascii_case(level.key()) {
                return Ok(DamageSpec::Level(level));
            }
        }
        s.parse::<f64>()
            .ok()
            .filter(|v| *v > 0.0 && v.is_finite())
            .map(DamageSpec::Spread)
            .ok_or_else(|| {
                ScenarioError::Invalid(format!(
                    "damage {s:?}: expected pristine, minimal, moderate, severe or a positive spread"
                ))
            })
    }
}

/// Neck spreads for the named damage levels, metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DamagePresets {
    pub minimal: f64,
    pub moderate: f64,
    pub severe: f64,
}

impl Default for DamagePresets {
    fn default() -> Self {
        Self {
            minimal: 10.0,
            moderate: 3.4,
            severe: 1.6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySpec {
    pub length: f64,
    pub diameter: f64,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        Self {
            length: 200.0,
            diameter: 0.04,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SagSpec {
    /// Ultimate tensile strength of the conductor, N.
    pub ultimate_strength: f64,
    /// Pre-tension as a fraction of the ultimate strength.
    pub pretension_fraction: f64,
    /// Linear thermal expansion coefficient, 1/K.
    pub thermal_expansion: f64,
    /// Temperature at which the pre-tension is set; defaults to `material.theta0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_ref: Option<f64>,
}

impl Default for SagSpec {
    fn default() -> Self {
        Self {
            ultimate_strength: 180e3,
            pretension_fraction: 0.2,
            thermal_expansion: 2.3e-5,
            theta_ref: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindSpec {
    /// Angle between line and wind, rad.
    pub theta_w: f64,
    pub span_factor: f64,
    pub drag: DragTable,
}

impl Default for WindSpec {
    fn default() -> Self {
        Self {
            theta_w: PI / 2.0,
            span_factor: 1.0,
            drag: DragTable::default(),
        }
    }
}

/// Settings shared by the campaign commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignSpec {
    /// Uncertain inputs for `uq` and `pf`.
    pub parameters: Vec<ParamName>,
    /// Collocation points per dimension.
    pub points: usize,
    pub half_width_frac: f64,
    /// Seed for Monte Carlo sampling.
    pub seed: u64,
    /// Parameter of the one-dimensional convergence study.
    pub convergence_parameter: ParamName,
    /// Time step at which convergence errors are measured.
    pub convergence_step: usize,
    pub pcm_orders: Vec<usize>,
    pub reference_points: usize,
    pub mc_samples: Vec<usize>,
    /// Damage levels swept by `pf`.
    pub damage_levels: Vec<DamageLevel>,
    /// Worker threads; unset means all available cores.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Default for CampaignSpec {
    fn default() -> Self {
        Self {
            parameters: vec![
                ParamName::FractureEnergy,
                ParamName::Aging,
                ParamName::BaseTemperature,
                ParamName::BaseWind,
                ParamName::BaseCurrent,
            ],
            points: 5,
            half_width_frac: 0.1,
            seed: 20240917,
            convergence_parameter: ParamName::BaseCurrent,
            convergence_step: 500,
            pcm_orders: (2..=10).collect(),
            reference_points: 100,
            mc_samples: vec![100, 1000, 10_000],
            damage_levels: DamageLevel::GRADED.to_vec(),
            workers: None,
            output_dir: None,
        }
    }
}

/// A fully resolved scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub damage: DamageSpec,
    pub weather: WeatherSource,
    #[serde(default)]
    pub damage_presets: DamagePresets,
    #[serde(default)]
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub material: MaterialParams,
    #[serde(default)]
    pub air: AirParams,
    #[serde(default)]
    pub thermal: ThermalParams,
    #[serde(default)]
    pub sag: SagSpec,
    #[serde(default)]
    pub wind: WindSpec,
    #[serde(default)]
    pub current: CurrentLoad,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub campaign: CampaignSpec,
}

/// Loads a scenario from a TOML file, a run manifest (`.json`) or a preset name.
pub fn load_scenario(spec: &str) -> Result<Scenario, ScenarioError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: spec.to_string(),
            source,
        })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            return scenario_from_manifest(&text, spec);
        }
        return parse_scenario(&text, Origin::Dir(dir), spec);
    }
    let name = spec.strip_suffix(".toml").unwrap_or(spec).to_ascii_lowercase();
    if PRESETS.contains(&name.as_str()) {
        let file = format!("{name}.toml");
        return parse_scenario(embedded(&file).expect("bundled preset"), Origin::Embedded, &file);
    }
    Err(ScenarioError::NotFound(spec.to_string()))
}

/// Reads the `scenario` object of a run manifest.
pub fn scenario_from_manifest(text: &str, origin: &str) -> Result<Scenario, ScenarioError> {
    scenarios_from_manifest(text, origin).map(|mut all| all.swap_remove(0))
}

/// Like [`load_scenario`], but a run manifest yields every scenario it lists.
pub fn load_scenarios(spec: &str) -> Result<Vec<Scenario>, ScenarioError> {
    let path = Path::new(spec);
    if path.is_file() && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: spec.to_string(),
            source,
        })?;
        return scenarios_from_manifest(&text, spec);
    }
    load_scenario(spec).map(|s| vec![s])
}

/// Reads the `scenario` object and any `additional_scenarios` of a run manifest.
pub fn scenarios_from_manifest(text: &str, origin: &str) -> Result<Vec<Scenario>, ScenarioError> {
    let parse = |message: String| ScenarioError::Parse {
        origin: origin.to_string(),
        message,
    };
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse(e.to_string()))?;
    let first = value
        .get_mut("scenario")
        .map(serde_json::Value::take)
        .ok_or_else(|| parse("manifest has no \"scenario\" object".into()))?;
    let mut items = vec![first];
    if let Some(serde_json::Value::Array(rest)) = value.get_mut("additional_scenarios").map(serde_json::Value::take) {
        items.extend(rest);
    }
    items
        .into_iter()
        .map(|v| {
            let scenario: Scenario = serde_json::from_value(v).map_err(|e| parse(e.to_string()))?;
            scenario.resolved(&Origin::Embedded)
        })
        .collect()
}

/// Parses a TOML scenario document, following includes and weather references.
pub fn parse_scenario(text: &str, origin: Origin, label: &str) -> Result<Scenario, ScenarioError> {
    let mut stack = HashSet::new();
    stack.insert(label.to_string());
    let table = merged_table(text, &origin, label, &mut stack, 0)?;
    let scenario: Scenario = Scenario::deserialize(toml::Value::Table(table)).map_err(|e| ScenarioError::Parse {
        origin: label.to_string(),
        message: e.to_string(),
    })?;
    scenario.resolved(&origin)
}

fn merged_table(
    text: &str,
    origin: &Origin,
    label: &str,
    stack: &mut HashSet<String>,
    depth: usize,
) -> Result<toml::Table, ScenarioError> {
    if depth > MAX_INCLUDE_DEPTH {
        return Err(ScenarioError::IncludeCycle(label.to_string()));
    }
    let parse = |message: String| ScenarioError::Parse {
        origin: label.to_string(),
        message,
    };
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| parse(e.to_string()))?;
    let includes = match table.remove("include") {
        None => Vec::new(),
        Some(toml::Value::Array(items)) => items
            .into_iter()
            .map(|v| match v {
                toml::Value::String(s) => Ok(s),
                other => Err(parse(format!("include entries must be strings, got {other}"))),
            })
            .collect::<Result<_, _>>()?,
        Some(other) => return Err(parse(format!("include must be an array of file names, got {other}"))),
    };
    let mut base = toml::Table::new();
    for name in includes {
        let (child_text, child_origin, child_label) = origin.read(&name)?;
        if !stack.insert(child_label.clone()) {
            return Err(ScenarioError::IncludeCycle(child_label));
        }
        let child = merged_table(&child_text, &child_origin, &child_label, stack, depth + 1)?;
        stack.remove(&child_label);
        deep_merge(&mut base, child);
    }
    deep_merge(&mut base, table);
    Ok(base)
}

/// Overlays `over` onto `base`; nested tables merge key by key.
fn deep_merge(base: &mut toml::Table, over: toml::Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => deep_merge(b, o),
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

impl Scenario {
    /// Loads referenced weather data inline and validates the result.
    pub fn resolved(mut self, origin: &Origin) -> Result<Self, ScenarioError> {
        if let WeatherSource::File(name) = &self.weather {
            let (text, _, label) = origin.read(name)?;
            let series = parse_weather_csv(&self.name, &text)
                .map_err(|source| ScenarioError::Weather { origin: label, source })?;
            self.weather = WeatherSource::Inline(series);
        }
        self.validate()?;
        Ok(self)
    }

    pub fn weather(&self) -> Result<&WeatherSeries, ScenarioError> {
        match &self.weather {
            WeatherSource::Inline(w) => Ok(w),
            WeatherSource::File(f) => Err(ScenarioError::Invalid(format!("weather file {f} not loaded"))),
        }
    }

    /// Neck spread for the configured damage, `None` for a pristine conductor.
    pub fn damage_spread(&self) -> Option<f64> {
        match self.damage {
            DamageSpec::Level(DamageLevel::Pristine) => None,
            DamageSpec::Level(DamageLevel::Minimal) => Some(self.damage_presets.minimal),
            DamageSpec::Level(DamageLevel::Moderate) => Some(self.damage_presets.moderate),
            DamageSpec::Level(DamageLevel::Severe) => Some(self.damage_presets.severe),
            DamageSpec::Spread(s) => Some(s),
        }
    }

    pub fn with_damage(&self, damage: DamageSpec) -> Self {
        Self { damage, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let w = self.weather()?;
        WeatherSeries::new(&w.state_name, w.wind_ft_s, w.temp_k).map_err(|source| ScenarioError::Weather {
            origin: self.name.clone(),
            source,
        })?;
        self.current.validate().map_err(ScenarioError::Invalid)?;
        let p = &self.damage_presets;
        if !(p.minimal > 0.0 && p.moderate > 0.0 && p.severe > 0.0) {
            return Err(ScenarioError::Invalid("damage presets must be positive".into()));
        }
        let c = &self.campaign;
        if c.points == 0 || c.reference_points == 0 {
            return Err(ScenarioError::Invalid("campaign point counts must be positive".into()));
        }
        if self.sag.pretension_fraction <= 0.0 || self.sag.ultimate_strength <= 0.0 {
            return Err(ScenarioError::Invalid("sag pretension must be positive".into()));
        }
        self.build_model()?;
        Ok(())
    }

    /// Nominal value of an uncertain input.
    pub fn nominal(&self, name: ParamName) -> Result<f64, ScenarioError> {
        Ok(match name {
            ParamName::ASigma => self
                .damage_spread()
                .ok_or_else(|| ScenarioError::Invalid("A_sigma cannot vary on a pristine conductor".into()))?,
            ParamName::Gamma => self.material.layer_width,
            ParamName::FractureEnergy => self.material.fracture_energy,
            ParamName::Aging => self.material.aging_coeff,
            ParamName::BaseTemperature => self.load_profile()?.mean_ambient_celsius(),
            ParamName::BaseWind => self.load_profile()?.wind.mean,
            ParamName::BaseCurrent => self.current.base_a,
            ParamName::CurrentAmplitude => self.current.amplitude_a,
        })
    }

    /// Uniform parameters around the nominal values.
    pub fn random_parameters(&self, names: &[ParamName]) -> Result<Vec<RandomParameter>, ScenarioError> {
        names
            .iter()
            .map(|&n| {
                Ok(RandomParameter::new(
                    n,
                    self.nominal(n)?,
                    self.campaign.half_width_frac,
                )?)
            })
            .collect()
    }

    pub fn load_profile(&self) -> Result<LoadProfile, ScenarioError> {
        LoadProfile::from_weather(self.weather()?, self.current).map_err(|source| ScenarioError::Weather {
            origin: self.name.clone(),
            source,
        })
    }

    pub fn build_model(&self) -> Result<LineModel, ScenarioError> {
        self.build_model_with(&[])
    }

    /// Builds the model with some inputs replaced by the given values.
    pub fn build_model_with(&self, overrides: &[(ParamName, f64)]) -> Result<LineModel, ScenarioError> {
        let mut material = self.material;
        let mut spread = self.damage_spread();
        let mut loads = self.load_profile()?;
        for &(name, value) in overrides {
            match name {
                ParamName::ASigma => spread = Some(value),
                ParamName::Gamma => material.layer_width = value,
                ParamName::FractureEnergy => material.fracture_energy = value,
                ParamName::Aging => material.aging_coeff = value,
                ParamName::BaseTemperature => loads.ambient = loads.ambient.with_mean(CELSIUS_OFFSET + value),
                ParamName::BaseWind => loads.wind = loads.wind.with_mean(value),
                ParamName::BaseCurrent => loads.current.base_a = value,
                ParamName::CurrentAmplitude => loads.current.amplitude_a = value,
            }
        }
        let geometry = CableGeometry::new(self.geometry.length, self.geometry.diameter, spread)?;
        let sag = SagParams {
            pretension: self.sag.pretension_fraction * self.sag.ultimate_strength,
            weight_per_length: material.density * STANDARD_GRAVITY * geometry.area0(),
            thermal_expansion: self.sag.thermal_expansion,
            span: self.geometry.length,
            theta_ref: self.sag.theta_ref.unwrap_or(material.theta0),
        };
        let wind = WindLoadParams {
            rho_air: self.air.density,
            drag: self.wind.drag.clone(),
            theta_w: self.wind.theta_w,
            span_factor: self.wind.span_factor,
        };
        Ok(LineModel::new(
            geometry,
            material,
            self.air,
            self.thermal.clone(),
            sag,
            wind,
            loads,
            self.simulation,
        )?)
    }

    /// Resolved configuration as TOML, weather inline.
    pub fn to_toml(&self) -> Result<String, ScenarioError> {
        toml::to_string(self).map_err(|e| ScenarioError::Invalid(format!("cannot serialize scenario: {e}")))
    }
}
