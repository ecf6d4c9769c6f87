//! Seasonal weather loading and electric current demand.
//!
//! Monthly wind and ambient-temperature samples are turned into a smooth,
//! one-year periodic signal through a 12-point discrete Fourier transform.
//! Sample `k` (January is `k = 0`) sits at `t = k / 12` years.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of monthly samples per channel.
pub const MONTHS: usize = 12;
/// Number of harmonics recoverable from [`MONTHS`] real samples.
pub const HARMONICS: usize = MONTHS / 2;

const FOOT_IN_METERS: f64 = 0.3048;
pub const CELSIUS_OFFSET: f64 = 273.15;

#[derive(Debug, Error)]
pub enum LoadingError {
    #[error("sample {index} is not finite ({value})")]
    NonFiniteSample { index: usize, value: f64 },
    #[error("expected 12 rows, found {found}")]
    RowCount { found: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: negative wind speed {value}")]
    NegativeWind { line: usize, value: f64 },
    #[error("line {line}: non-positive absolute temperature {value}")]
    NonPositiveTemperature { line: usize, value: f64 },
    #[error("cannot read weather file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Monthly wind speed (ft/s, as published) and ambient temperature (K).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherSeries {
    pub state_name: String,
    pub wind_ft_s: [f64; MONTHS],
    pub temp_k: [f64; MONTHS],
}

impl WeatherSeries {
    pub fn new(
        state_name: impl Into<String>,
        wind_ft_s: [f64; MONTHS],
        temp_k: [f64; MONTHS],
    ) -> Result<Self, LoadingError> {
        for (i, (&w, &t)) in wind_ft_s.iter().zip(temp_k.iter()).enumerate() {
            if !w.is_finite() {
                return Err(LoadingError::NonFiniteSample { index: i, value: w });
            }
            if !t.is_finite() {
                return Err(LoadingError::NonFiniteSample { index: i, value: t });
            }
            if w < 0.0 {
                return Err(LoadingError::NegativeWind { line: i + 2, value: w });
            }
            if t <= 0.0 {
                return Err(LoadingError::NonPositiveTemperature { line: i + 2, value: t });
            }
        }
        Ok(Self {
            state_name: state_name.into(),
            wind_ft_s,
            temp_k,
        })
    }

    /// Wind samples converted to m/s.
    pub fn wind_si(&self) -> [f64; MONTHS] {
        self.wind_ft_s.map(to_si)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("month,wind_ft_s,temp_K\n");
        for k in 0..MONTHS {
            out.push_str(&format!("{},{},{}\n", k + 1, self.wind_ft_s[k], self.temp_k[k]));
        }
        out
    }
}

/// Converts feet per second to metres per second.
pub fn to_si(ft_per_s: f64) -> f64 {
    ft_per_s * FOOT_IN_METERS
}

/// Reads a weather CSV with header `month,wind_ft_s,temp_K` and 12 data rows.
pub fn ingest_weather_csv(path: impl AsRef<Path>) -> Result<WeatherSeries, LoadingError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadingError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_weather_csv(&name, &text)
}

/// Parses weather CSV text. Line numbers in errors are 1-based and count the header.
pub fn parse_weather_csv(state_name: &str, text: &str) -> Result<WeatherSeries, LoadingError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut wind = Vec::with_capacity(MONTHS);
    let mut temp = Vec::with_capacity(MONTHS);
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| LoadingError::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.len() != 3 {
            return Err(LoadingError::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let field = |i: usize, what: &str| -> Result<f64, LoadingError> {
            record[i].parse::<f64>().map_err(|_| LoadingError::Parse {
                line,
                message: format!("invalid {what} value {:?}", &record[i]),
            })
        };
        let w = field(1, "wind_ft_s")?;
        let t = field(2, "temp_K")?;
        if !w.is_finite() || !t.is_finite() {
            return Err(LoadingError::Parse {
                line,
                message: "non-finite value".into(),
            });
        }
        if w < 0.0 {
            return Err(LoadingError::NegativeWind { line, value: w });
        }
        if t <= 0.0 {
            return Err(LoadingError::NonPositiveTemperature { line, value: t });
        }
        wind.push(w);
        temp.push(t);
    }
    if wind.len() != MONTHS {
        return Err(LoadingError::RowCount { found: wind.len() });
    }
    WeatherSeries::new(
        state_name,
        wind.try_into().expect("length checked"),
        temp.try_into().expect("length checked"),
    )
}

/// Truncated Fourier series with period one year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierModel {
    pub mean: f64,
    pub cos: [f64; HARMONICS],
    pub sin: [f64; HARMONICS],
    pub period_years: f64,
}

impl FourierModel {
    pub fn constant(value: f64) -> Self {
        Self {
            mean: value,
            cos: [0.0; HARMONICS],
            sin: [0.0; HARMONICS],
            period_years: 1.0,
        }
    }

    /// Same seasonal shape with the mean replaced.
    pub fn with_mean(&self, mean: f64) -> Self {
        Self { mean, ..self.clone() }
    }

    pub fn eval(&self, t_years: f64) -> f64 {
        synthesize(self, t_years)
    }
}

/// Mean and harmonic coefficients of 12 equally spaced samples.
///
/// `A_n = 2 Re(X_n) / N`, `B_n = -2 Im(X_n) / N`; the Nyquist term `n = 6` is
/// scaled by `1 / N` and has no sine part.
pub fn dft_coefficients(samples: &[f64; MONTHS]) -> Result<FourierModel, LoadingError> {
    if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(LoadingError::NonFiniteSample { index, value });
    }
    let n = MONTHS as f64;
    let mut cos = [0.0; HARMONICS];
    let mut sin = [0.0; HARMONICS];
    let mean = samples.iter().sum::<f64>() / n;
    for k in 1..=HARMONICS {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, &x) in samples.iter().enumerate() {
            let angle = 2.0 * PI * (k * j) as f64 / n;
            re += x * angle.cos();
            im -= x * angle.sin();
        }
        let scale = if k == HARMONICS { 1.0 / n } else { 2.0 / n };
        cos[k - 1] = scale * re;
        sin[k - 1] = if k == HARMONICS { 0.0 } else { -scale * im };
    }
    Ok(FourierModel {
        mean,
        cos,
        sin,
        period_years: 1.0,
    })
}

/// Evaluates the Fourier series at `t` years (periodic extension).
pub fn synthesize(model: &FourierModel, t_years: f64) -> f64 {
    let phase = 2.0 * PI * t_years / model.period_years;
    model
        .cos
        .iter()
        .zip(model.sin.iter())
        .enumerate()
        .fold(model.mean, |acc, (i, (&a, &b))| {
            let arg = (i + 1) as f64 * phase;
            acc + a * arg.cos() + b * arg.sin()
        })
}

/// Base current plus a semi-annual oscillation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurrentLoad {
    pub base_a: f64,
    pub amplitude_a: f64,
}

impl Default for CurrentLoad {
    fn default() -> Self {
        Self {
            base_a: 1500.0,
            amplitude_a: 100.0,
        }
    }
}

impl CurrentLoad {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.base_a > 0.0 && self.base_a.is_finite()) {
            return Err(format!("base current must be positive, got {}", self.base_a));
        }
        if !(self.amplitude_a >= 0.0 && self.amplitude_a.is_finite()) {
            return Err(format!(
                "current amplitude must be non-negative, got {}",
                self.amplitude_a
            ));
        }
        Ok(())
    }
}

/// Magnitude of `I(t) = -I_b - I_a sin(4 pi t)`.
pub fn current_at(load: &CurrentLoad, t_years: f64) -> f64 {
    (load.base_a + load.amplitude_a * (4.0 * PI * t_years).sin()).abs()
}

/// Environmental and electrical loading at one instant, in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSample {
    pub t: f64,
    pub wind_speed: f64,
    pub ambient_temp: f64,
    pub current: f64,
}

impl fmt::Display for LoadSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={:.3}y v={:.3}m/s Ta={:.2}K I={:.1}A",
            self.t, self.wind_speed, self.ambient_temp, self.current
        )
    }
}

/// Continuous loading history built from a weather series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    /// Wind speed model in m/s.
    pub wind: FourierModel,
    /// Ambient temperature model in K.
    pub ambient: FourierModel,
    pub current: CurrentLoad,
}

impl LoadProfile {
    pub fn from_weather(weather: &WeatherSeries, current: CurrentLoad) -> Result<Self, LoadingError> {
        Ok(Self {
            wind: dft_coefficients(&weather.wind_si())?,
            ambient: dft_coefficients(&weather.temp_k)?,
            current,
        })
    }

    /// Constant wind, ambient temperature and current.
    pub fn steady(wind_speed: f64, ambient_temp: f64, current_a: f64) -> Self {
        Self {
            wind: FourierModel::constant(wind_speed),
            ambient: FourierModel::constant(ambient_temp),
            current: CurrentLoad {
                base_a: current_a,
                amplitude_a: 0.0,
            },
        }
    }

    /// Scales the annual-mean wind speed.
    pub fn scale_mean_wind(&mut self, factor: f64) {
        self.wind = self.wind.with_mean(self.wind.mean * factor);
    }

    /// Scales the annual-mean ambient temperature expressed in degrees Celsius.
    pub fn scale_mean_ambient_celsius(&mut self, factor: f64) {
        let celsius = self.ambient.mean - CELSIUS_OFFSET;
        self.ambient = self.ambient.with_mean(CELSIUS_OFFSET + factor * celsius);
    }

    pub fn mean_ambient_celsius(&self) -> f64 {
        self.ambient.mean - CELSIUS_OFFSET
    }

    pub fn sample(&self, t_years: f64) -> LoadSample {
        LoadSample {
            t: t_years,
            wind_speed: synthesize(&self.wind, t_years).max(0.0),
            ambient_temp: synthesize(&self.ambient, t_years),
            current: current_at(&self.current, t_years),
        }
    }
}
