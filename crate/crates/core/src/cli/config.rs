//! Scenario files: TOML with `[source]`, `[rates]`, `[numeric]` and
//! `[output]` tables. Unknown keys are rejected.

use serde::Deserialize;

use crate::drf::{ContinuousDrfConfig, DEFAULT_T_CELLS};
use crate::grid::DEFAULT_PHI_CELLS;
use crate::spectral::{DiscreteCsProcess, PulseShape, StationaryPsd};

/// A configuration problem, naming the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error at `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(key: impl Into<String>, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        key: key.into(),
        message: message.into(),
    })
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub source: SourceConfig,
    pub rates: RateGrid,
    #[serde(default)]
    pub methods: Option<Vec<String>>,
    #[serde(default)]
    pub numeric: NumericConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    Stationary,
    DiscreteCs,
    Am,
    Pam,
    SampledCoding,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub kind: SourceKind,
    pub psd: Option<PsdConfig>,
    pub pulse: Option<PulseConfig>,
    /// AM carrier, Hz.
    pub f0: Option<f64>,
    /// AM carrier phase, radians.
    pub phase: Option<f64>,
    /// PAM symbol period, seconds.
    pub period: Option<f64>,
    /// PAM symbol rates (Hz) to sweep instead of a single period.
    pub symbol_rates: Option<Vec<f64>>,
    /// Rescale the PAM pulse to unit average power.
    #[serde(default)]
    pub normalize_power: bool,
    /// Sampling rates for `sampled-coding`, Hz.
    pub fs: Option<Vec<f64>>,
    /// Discrete: independent samples with these per-phase variances.
    pub variances: Option<Vec<f64>>,
    /// Discrete: periodic moving-average taps, one list per phase.
    pub taps: Option<Vec<Vec<f64>>>,
    /// Discrete: `R[n, k]` for `k >= 0`, one list per phase.
    pub lags: Option<Vec<Vec<f64>>>,
    /// Discrete: seeded random periodic moving average.
    pub random: Option<RandomMaConfig>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RandomMaConfig {
    pub period: usize,
    pub order: usize,
    #[serde(default = "one")]
    pub tail_scale: f64,
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PsdFamilyName {
    Flat,
    Triangular,
    RaisedCosine,
    Gaussian,
    Tabulated,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PsdConfig {
    pub family: PsdFamilyName,
    pub half_width: Option<f64>,
    pub height: Option<f64>,
    pub peak: Option<f64>,
    /// Total power; alternative to `height` / `peak`.
    pub power: Option<f64>,
    pub rolloff: Option<f64>,
    pub std_dev: Option<f64>,
    pub freqs: Option<Vec<f64>>,
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PulseShapeName {
    Rectangular,
    Triangular,
    RaisedCosine,
    FlatBand,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub shape: PulseShapeName,
    /// Width of a rectangular pulse, in symbol periods.
    pub width: Option<f64>,
    /// Half-width of a triangular pulse (periods) or of a flat band (Hz).
    pub half_width: Option<f64>,
    pub rolloff: Option<f64>,
    pub gain: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RateGrid {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
    /// Explicit rates; excludes `min`/`max`/`count`.
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct NumericConfig {
    pub phi_cells: usize,
    pub m_start: usize,
    pub m_max: usize,
    pub convergence_tol: f64,
    pub lipschitz_c: Option<f64>,
    pub t_cells: usize,
    pub oracle_n: usize,
    /// Oracle half-window in periods.
    pub oracle_periods: usize,
    /// Largest relative oracle gap accepted by `verify`.
    pub verify_tol: f64,
    /// Matrix dimension for `spectra` on continuous sources.
    pub spectra_m: Option<usize>,
}

impl Default for NumericConfig {
    fn default() -> Self {
        let c = ContinuousDrfConfig::default();
        NumericConfig {
            phi_cells: DEFAULT_PHI_CELLS,
            m_start: c.m_start,
            m_max: c.m_max,
            convergence_tol: c.convergence_tol,
            lipschitz_c: None,
            t_cells: DEFAULT_T_CELLS,
            oracle_n: 256,
            oracle_periods: 8,
            verify_tol: 1e-3,
            spectra_m: None,
        }
    }
}

impl NumericConfig {
    pub fn continuous(&self) -> ContinuousDrfConfig {
        ContinuousDrfConfig {
            m_start: self.m_start,
            m_max: self.m_max,
            lipschitz_c: self.lipschitz_c,
            convergence_tol: self.convergence_tol,
            phi_cells: self.phi_cells,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
}

/// Parse a scenario, mapping TOML errors to the key they concern.
pub fn parse(text: &str) -> Result<Scenario, ConfigError> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| ConfigError {
        key: toml_error_key(&e),
        message: e.message().to_string(),
    })?;
    scenario.validate()?;
    Ok(scenario)
}

fn toml_error_key(e: &toml::de::Error) -> String {
    // serde reports unknown and missing keys in the message; prefer those
    let msg = e.message();
    for marker in ["unknown field `", "missing field `", "unknown variant `"] {
        if let Some(start) = msg.find(marker) {
            let rest = &msg[start + marker.len()..];
            if let Some(end) = rest.find('`') {
                return rest[..end].to_string();
            }
        }
    }
    "<document>".to_string()
}

fn need<T: Copy>(v: Option<T>, key: &str) -> Result<T, ConfigError> {
    match v {
        Some(x) => Ok(x),
        None => err(key, "is required here"),
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.rate_values()?;
        self.continuous_config()?;
        let s = &self.source;
        match s.kind {
            SourceKind::DiscreteCs => {
                self.discrete_process()?;
            }
            SourceKind::Stationary => {
                self.base_psd()?;
            }
            SourceKind::Am => {
                self.base_psd()?;
                need(s.f0, "source.f0")?;
            }
            SourceKind::Pam => {
                self.base_psd()?;
                self.pam_periods()?;
                self.pulse_config()?;
            }
            SourceKind::SampledCoding => {
                self.base_psd()?;
                match &s.fs {
                    Some(v) if !v.is_empty() && v.iter().all(|x| *x > 0.0) => {}
                    _ => return err("source.fs", "needs a nonempty list of positive rates"),
                }
            }
        }
        for m in self.methods() {
            if !allowed_methods(s.kind).contains(&m.as_str()) {
                return err(
                    "methods",
                    format!("`{m}` is not available for this source; choose from {:?}", allowed_methods(s.kind)),
                );
            }
        }
        Ok(())
    }

    pub fn methods(&self) -> Vec<String> {
        self.methods.clone().unwrap_or_else(|| vec!["drf".to_string()])
    }

    pub fn continuous_config(&self) -> Result<ContinuousDrfConfig, ConfigError> {
        let c = self.numeric.continuous();
        c.validate().map_err(|e| match e {
            crate::DrfError::InvalidParameter { name, reason } => ConfigError {
                key: format!("numeric.{name}"),
                message: reason,
            },
            other => ConfigError {
                key: "numeric".into(),
                message: other.to_string(),
            },
        })?;
        if self.numeric.oracle_n < 2 {
            return err("numeric.oracle_n", "must be at least 2");
        }
        if self.numeric.oracle_periods == 0 {
            return err("numeric.oracle_periods", "must be positive");
        }
        if self.numeric.t_cells == 0 {
            return err("numeric.t_cells", "must be positive");
        }
        Ok(c)
    }

    /// The rate grid, ascending.
    pub fn rate_values(&self) -> Result<Vec<f64>, ConfigError> {
        let g = &self.rates;
        let v = if let Some(values) = &g.values {
            if g.min.is_some() || g.max.is_some() || g.count.is_some() {
                return err("rates.values", "cannot be combined with min/max/count");
            }
            values.clone()
        } else {
            let min = need(g.min, "rates.min")?;
            let max = need(g.max, "rates.max")?;
            let count = need(g.count, "rates.count")?;
            if count == 0 {
                return err("rates.count", "must be positive");
            }
            if max < min {
                return err("rates.max", "must not be below rates.min");
            }
            if count == 1 {
                vec![min]
            } else {
                let step = |i: usize| i as f64 / (count - 1) as f64;
                match g.spacing {
                    Spacing::Linear => (0..count).map(|i| min + (max - min) * step(i)).collect(),
                    Spacing::Log => {
                        if min <= 0.0 {
                            return err("rates.min", "log spacing needs a positive minimum");
                        }
                        (0..count).map(|i| min * (max / min).powf(step(i))).collect()
                    }
                }
            }
        };
        if v.is_empty() {
            return err("rates", "rate grid is empty");
        }
        if v.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return err("rates", "rates must be finite and nonnegative");
        }
        let mut v = v;
        v.sort_by(f64::total_cmp);
        Ok(v)
    }

    pub fn base_psd(&self) -> Result<StationaryPsd, ConfigError> {
        let Some(p) = &self.source.psd else {
            return err("source.psd", "is required for this source kind");
        };
        let hw = || need(p.half_width, "source.psd.half_width");
        let built = match p.family {
            PsdFamilyName::Flat => {
                let w = hw()?;
                match (p.height, p.power) {
                    (Some(h), None) => StationaryPsd::flat(h, w),
                    (None, Some(pw)) => StationaryPsd::flat_with_power(pw, w),
                    _ => return err("source.psd.height", "give exactly one of height or power"),
                }
            }
            PsdFamilyName::Triangular => {
                let w = hw()?;
                match (p.peak, p.power) {
                    (Some(a), None) => StationaryPsd::triangular(a, w),
                    (None, Some(pw)) => StationaryPsd::triangular(pw / w, w),
                    _ => return err("source.psd.peak", "give exactly one of peak or power"),
                }
            }
            PsdFamilyName::RaisedCosine => {
                let w = hw()?;
                let beta = need(p.rolloff, "source.psd.rolloff")?;
                match (p.height, p.power) {
                    (Some(h), None) => StationaryPsd::raised_cosine(h, w, beta),
                    (None, Some(pw)) => StationaryPsd::raised_cosine(pw / (2.0 * w), w, beta),
                    _ => return err("source.psd.height", "give exactly one of height or power"),
                }
            }
            PsdFamilyName::Gaussian => {
                let sd = need(p.std_dev, "source.psd.std_dev")?;
                match (p.peak, p.power) {
                    (Some(a), None) => StationaryPsd::gaussian(a, sd),
                    (None, Some(pw)) => {
                        StationaryPsd::gaussian(pw / (sd * (2.0 * std::f64::consts::PI).sqrt()), sd)
                    }
                    _ => return err("source.psd.peak", "give exactly one of peak or power"),
                }
            }
            PsdFamilyName::Tabulated => {
                let (Some(f), Some(v)) = (&p.freqs, &p.values) else {
                    return err("source.psd.freqs", "tabulated spectra need freqs and values");
                };
                StationaryPsd::tabulated(f.clone(), v.clone())
            }
        };
        built.map_err(|e| param_error("source.psd", e))
    }

    /// Symbol periods of the PAM sweep, with the label suffix of each.
    pub fn pam_periods(&self) -> Result<Vec<(f64, Option<f64>)>, ConfigError> {
        let s = &self.source;
        match (s.period, &s.symbol_rates) {
            (Some(t), None) if t > 0.0 => Ok(vec![(t, None)]),
            (None, Some(v)) if !v.is_empty() && v.iter().all(|x| *x > 0.0) => {
                Ok(v.iter().map(|fs| (1.0 / fs, Some(*fs))).collect())
            }
            (Some(_), Some(_)) => err("source.symbol_rates", "cannot be combined with source.period"),
            (Some(_), None) => err("source.period", "must be positive"),
            (None, Some(_)) => err("source.symbol_rates", "needs a nonempty list of positive rates"),
            (None, None) => err("source.period", "PAM needs a period or symbol_rates"),
        }
    }

    fn pulse_config(&self) -> Result<&PulseConfig, ConfigError> {
        match &self.source.pulse {
            Some(p) => {
                self.pulse_for(p, 1.0)?;
                Ok(p)
            }
            None => err("source.pulse", "is required for PAM"),
        }
    }

    /// The pulse for symbol period `period`; time widths scale with it.
    pub fn pulse(&self, period: f64) -> Result<PulseShape, ConfigError> {
        let p = self.pulse_config()?;
        self.pulse_for(p, period)
    }

    fn pulse_for(&self, p: &PulseConfig, period: f64) -> Result<PulseShape, ConfigError> {
        let built = match p.shape {
            PulseShapeName::Rectangular => {
                PulseShape::rectangular(p.width.unwrap_or(1.0) * period)
            }
            PulseShapeName::Triangular => {
                PulseShape::triangular(p.half_width.unwrap_or(1.0) * period)
            }
            PulseShapeName::RaisedCosine => {
                PulseShape::raised_cosine(period, need(p.rolloff, "source.pulse.rolloff")?)
            }
            PulseShapeName::FlatBand => {
                PulseShape::flat_band(need(p.half_width, "source.pulse.half_width")?)
            }
        };
        let pulse = built.map_err(|e| param_error("source.pulse", e))?;
        Ok(pulse.with_gain(p.gain.unwrap_or(1.0)))
    }

    pub fn discrete_process(&self) -> Result<DiscreteCsProcess, ConfigError> {
        let s = &self.source;
        let given = [s.variances.is_some(), s.taps.is_some(), s.lags.is_some(), s.random.is_some()]
            .iter()
            .filter(|x| **x)
            .count();
        if given != 1 {
            return err("source.variances", "give exactly one of variances, taps, lags or random");
        }
        let built = if let Some(v) = &s.variances {
            DiscreteCsProcess::alternating_white(v).map_err(|e| param_error("source.variances", e))
        } else if let Some(t) = &s.taps {
            DiscreteCsProcess::periodic_ma(t).map_err(|e| param_error("source.taps", e))
        } else if let Some(l) = &s.lags {
            DiscreteCsProcess::from_lags(l.len(), l.clone()).map_err(|e| param_error("source.lags", e))
        } else {
            let r = s.random.as_ref().unwrap();
            DiscreteCsProcess::random_ma(r.period, r.order, r.tail_scale, r.seed)
                .map_err(|e| param_error("source.random", e))
        };
        built
    }
}

fn param_error(prefix: &str, e: crate::DrfError) -> ConfigError {
    match e {
        crate::DrfError::InvalidParameter { name, reason } => ConfigError {
            key: format!("{prefix}.{name}"),
            message: reason,
        },
        other => ConfigError {
            key: prefix.to_string(),
            message: other.to_string(),
        },
    }
}

pub fn allowed_methods(kind: SourceKind) -> &'static [&'static str] {
    match kind {
        SourceKind::Stationary => &["drf", "oracle"],
        SourceKind::DiscreteCs => &["drf", "lower_bound", "oracle"],
        SourceKind::Am => &["drf", "lower_bound", "oracle", "upper_bound_gaussian_psd", "baseline"],
        SourceKind::Pam => &["drf", "lower_bound", "oracle", "baseline"],
        SourceKind::SampledCoding => &["drf", "baseline"],
    }
}
