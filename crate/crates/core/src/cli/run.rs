//! Turning a scenario into CSV rows.

use std::fmt::Write as _;

use crate::cli::config::{ConfigError, Scenario, SourceKind};
use crate::drf::{
    am_gaussian_upper_bound, discrete_eigen_field, drf_am_curve, drf_pam_on, lower_bound_continuous_on,
    lower_bound_discrete_on, mmse_filter_on, pam_weighted_spectrum, sampled_source_coding_on,
};
use crate::error::DrfError;
use crate::grid::phi_grid;
use crate::oracle::{build_kernel, kl_drf, kl_drf_blocks, BlockCovariance};
use crate::rate::{BitsPerSecond, BitsPerSymbol};
use crate::spectral::{
    am_cpsd, pam_cpsd, psd_pc_matrix_continuous, psd_pc_matrix_discrete, CyclicSpectrum, PsdPcMatrix,
    StationaryPsd,
};
use crate::waterfill::{solve_water_level, stationary_drf_on, EigenField, RateNormalizer};

pub const CSV_HEADER: &str = "rate_bits,distortion,theta,method,M,converged";

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub rate: f64,
    pub distortion: f64,
    /// Water level, when the method has a single one.
    pub theta: Option<f64>,
    pub method: String,
    pub m: usize,
    pub converged: bool,
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numeric(DrfError),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Numeric(e) => write!(f, "numeric failure: {e}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<DrfError> for RunError {
    fn from(e: DrfError) -> Self {
        match e {
            DrfError::InvalidParameter { name, reason } => RunError::Config(ConfigError {
                key: name.to_string(),
                message: reason,
            }),
            other => RunError::Numeric(other),
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_rows(rows: &[Row]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let theta = r.theta.map(num).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(r.rate),
            num(r.distortion),
            theta,
            r.method,
            r.m,
            r.converged
        );
    }
    out
}

/// Stationary spectra are treated as cyclostationary with the critical
/// period `1 / (2 f_B)`.
fn critical_period(psd: &StationaryPsd) -> f64 {
    0.5 / psd.effective_radius().max(f64::MIN_POSITIVE)
}

fn label(method: &str, fs: Option<f64>) -> String {
    match fs {
        Some(fs) => format!("{method}[fs={fs}]"),
        None => method.to_string(),
    }
}

/// The PAM spectra of the sweep with their labels, pulses rescaled to unit
/// average power when requested.
fn pam_specs(s: &Scenario) -> Result<Vec<(CyclicSpectrum, Option<f64>)>, RunError> {
    let base = s.base_psd()?;
    let mut out = Vec::new();
    for (period, fs) in s.pam_periods()? {
        let mut pulse = s.pulse(period)?;
        if s.source.normalize_power {
            let p = pam_cpsd(base.clone(), pulse.clone(), period)?.average_power()?;
            if p > 0.0 {
                pulse = pulse.clone().with_gain(pulse.gain() / p.sqrt());
            }
        }
        out.push((pam_cpsd(base.clone(), pulse, period)?, fs));
    }
    Ok(out)
}

/// Rows for every requested method at every rate, ordered by rate and then
/// by method.
pub fn compute_rows(s: &Scenario, methods: &[String]) -> Result<Vec<Row>, RunError> {
    let rates = s.rate_values()?;
    let cfg = s.continuous_config()?;
    let cells = s.numeric.phi_cells;
    let n_oracle = s.numeric.oracle_n;
    let mut rows: Vec<(usize, Row)> = Vec::new();
    let mut push = |i: usize, row: Row| rows.push((i, row));
    let plain = |rate: f64, p: crate::waterfill::RateDistortionPoint, method: String, m: usize| Row {
        rate,
        distortion: p.distortion,
        theta: Some(p.theta),
        method,
        m,
        converged: true,
    };

    match s.source.kind {
        SourceKind::Stationary => {
            let psd = s.base_psd()?;
            for method in methods {
                match method.as_str() {
                    "drf" => {
                        for (i, &r) in rates.iter().enumerate() {
                            let p = stationary_drf_on(&psd, BitsPerSecond(r), cells)?;
                            push(i, plain(r, p, "drf".into(), 1));
                        }
                    }
                    "oracle" => {
                        let t0 = critical_period(&psd);
                        let spec = CyclicSpectrum::stationary(psd.clone(), t0)?;
                        let k = build_kernel(&spec, s.numeric.oracle_periods as f64 * t0, n_oracle)?;
                        for (i, &r) in rates.iter().enumerate() {
                            push(i, plain(r, kl_drf(&k, BitsPerSecond(r))?, "oracle".into(), n_oracle));
                        }
                    }
                    _ => unreachable!("validated"),
                }
            }
        }
        SourceKind::DiscreteCs => {
            let proc = s.discrete_process()?;
            let m = proc.period();
            for method in methods {
                match method.as_str() {
                    "drf" => {
                        let field = discrete_eigen_field(&proc, cells)?;
                        for (i, &r) in rates.iter().enumerate() {
                            let p = solve_water_level(&field, r, RateNormalizer::per_symbol(m))?;
                            push(i, plain(r, p, "drf".into(), m));
                        }
                    }
                    "lower_bound" => {
                        for (i, &r) in rates.iter().enumerate() {
                            let d = lower_bound_discrete_on(&proc, BitsPerSymbol(r), cells)?;
                            push(i, bound_row(r, d, m));
                        }
                    }
                    "oracle" => {
                        let b = BlockCovariance::whole_periods(&proc, n_oracle)?;
                        for (i, &r) in rates.iter().enumerate() {
                            let p = kl_drf_blocks(&b, BitsPerSymbol(r))?;
                            push(i, plain(r, p, "oracle".into(), b.len()));
                        }
                    }
                    _ => unreachable!("validated"),
                }
            }
        }
        SourceKind::Am => {
            let base = s.base_psd()?;
            let f0 = s.source.f0.unwrap();
            let spec = am_cpsd(base.clone(), f0, s.source.phase.unwrap_or(0.0))?;
            let bps: Vec<BitsPerSecond> = rates.iter().map(|&r| BitsPerSecond(r)).collect();
            for method in methods {
                match method.as_str() {
                    "drf" => {
                        let res = drf_am_curve(&base, f0, &bps, &cfg)?;
                        for (i, a) in res.into_iter().enumerate() {
                            let m = match &a.method {
                                crate::drf::AmMethod::Narrowband => 1,
                                crate::drf::AmMethod::Numeric(r) => r.m,
                            };
                            let converged = a.converged();
                            push(
                                i,
                                Row {
                                    converged,
                                    ..plain(rates[i], a.point, "drf".into(), m)
                                },
                            );
                        }
                    }
                    "lower_bound" => {
                        for (i, &r) in rates.iter().enumerate() {
                            let d = lower_bound_continuous_on(&spec, BitsPerSecond(r), s.numeric.t_cells, cells)?;
                            push(i, bound_row(r, d, s.numeric.t_cells));
                        }
                    }
                    "upper_bound_gaussian_psd" => {
                        for (i, &r) in rates.iter().enumerate() {
                            let p = am_gaussian_upper_bound(&base, f0, BitsPerSecond(r), cells)?;
                            push(i, plain(r, p, method.clone(), 1));
                        }
                    }
                    "baseline" => {
                        for (i, &r) in rates.iter().enumerate() {
                            push(i, plain(r, stationary_drf_on(&base, BitsPerSecond(r), cells)?, method.clone(), 1));
                        }
                    }
                    "oracle" => {
                        let k = build_kernel(&spec, s.numeric.oracle_periods as f64 * spec.period(), n_oracle)?;
                        for (i, &r) in rates.iter().enumerate() {
                            push(i, plain(r, kl_drf(&k, BitsPerSecond(r))?, "oracle".into(), n_oracle));
                        }
                    }
                    _ => unreachable!("validated"),
                }
            }
        }
        SourceKind::Pam => {
            let base = s.base_psd()?;
            let specs = pam_specs(s)?;
            for method in methods {
                if method == "baseline" {
                    for (i, &r) in rates.iter().enumerate() {
                        push(i, plain(r, stationary_drf_on(&base, BitsPerSecond(r), cells)?, method.clone(), 1));
                    }
                    continue;
                }
                for (spec, fs) in &specs {
                    let CyclicSpectrum::Pam { pulse, period, .. } = spec else {
                        unreachable!()
                    };
                    let name = label(method, *fs);
                    match method.as_str() {
                        "drf" => {
                            for (i, &r) in rates.iter().enumerate() {
                                let p = drf_pam_on(&base, pulse, *period, BitsPerSecond(r), cells)?;
                                push(i, plain(r, p, name.clone(), 1));
                            }
                        }
                        "lower_bound" => {
                            for (i, &r) in rates.iter().enumerate() {
                                let d = lower_bound_continuous_on(spec, BitsPerSecond(r), s.numeric.t_cells, cells)?;
                                push(i, Row { method: name.clone(), ..bound_row(r, d, s.numeric.t_cells) });
                            }
                        }
                        "oracle" => {
                            let k = build_kernel(spec, s.numeric.oracle_periods as f64 * period, n_oracle)?;
                            for (i, &r) in rates.iter().enumerate() {
                                push(i, plain(r, kl_drf(&k, BitsPerSecond(r))?, name.clone(), n_oracle));
                            }
                        }
                        _ => unreachable!("validated"),
                    }
                }
            }
        }
        SourceKind::SampledCoding => {
            let base = s.base_psd()?;
            let list = s.source.fs.clone().unwrap();
            for method in methods {
                match method.as_str() {
                    "drf" => {
                        for &fs in &list {
                            for (i, &r) in rates.iter().enumerate() {
                                let c = sampled_source_coding_on(&base, fs, BitsPerSecond(r), cells)?;
                                push(
                                    i,
                                    Row {
                                        rate: r,
                                        distortion: c.distortion(),
                                        theta: Some(c.coding.theta),
                                        method: label("drf", Some(fs)),
                                        m: 1,
                                        converged: true,
                                    },
                                );
                            }
                        }
                    }
                    "baseline" => {
                        for (i, &r) in rates.iter().enumerate() {
                            push(i, plain(r, stationary_drf_on(&base, BitsPerSecond(r), cells)?, method.clone(), 1));
                        }
                    }
                    _ => unreachable!("validated"),
                }
            }
        }
    }
    rows.sort_by_key(|(i, _)| *i);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

fn bound_row(rate: f64, d: f64, m: usize) -> Row {
    Row {
        rate,
        distortion: d,
        theta: None,
        method: "lower_bound".into(),
        m,
        converged: true,
    }
}

/// Largest relative gap between `drf` rows and their `oracle` rows.
pub fn oracle_gap(rows: &[Row]) -> Option<f64> {
    let mut gap: Option<f64> = None;
    for a in rows.iter().filter(|r| r.method.starts_with("drf")) {
        let twin = a.method.replacen("drf", "oracle", 1);
        for b in rows.iter().filter(|r| r.method == twin && r.rate == a.rate) {
            let scale = a.distortion.abs().max(f64::MIN_POSITIVE);
            let g = (a.distortion - b.distortion).abs() / scale;
            gap = Some(gap.map_or(g, |x: f64| x.max(g)));
        }
    }
    gap
}

/// Spectral profile CSV: `phi`, ascending eigenvalues `lambda_1..lambda_M`,
/// `trace`, and for PAM also `f` (Hz) and `weighted_spectrum`. Sampled
/// coding sources give `fs,f,psd,response,folded_j` instead.
pub fn spectra_csv(s: &Scenario) -> Result<String, RunError> {
    let cells = s.numeric.phi_cells;
    let matrix_csv = |mat: &PsdPcMatrix, extra: Option<&dyn Fn(f64) -> (f64, f64)>| -> Result<String, RunError> {
        let grid = phi_grid(cells, &mat.phi_breakpoints());
        let field = EigenField::from_matrix(mat, grid.clone())?;
        let m = mat.dim();
        let mut out = String::from("phi");
        for k in 1..=m {
            let _ = write!(out, ",lambda_{k}");
        }
        out.push_str(",trace");
        if extra.is_some() {
            out.push_str(",f,weighted_spectrum");
        }
        out.push('\n');
        for (phi, eigs) in grid.nodes().iter().zip(field.eigs()) {
            out.push_str(&num(*phi));
            for v in eigs {
                out.push(',');
                out.push_str(&num(*v));
            }
            out.push(',');
            out.push_str(&num(mat.trace(*phi)));
            if let Some(g) = extra {
                let (f, w) = g(*phi);
                let _ = write!(out, ",{},{}", num(f), num(w));
            }
            out.push('\n');
        }
        Ok(out)
    };
    let cont_m = s.numeric.spectra_m.unwrap_or(s.numeric.m_start);
    match s.source.kind {
        SourceKind::DiscreteCs => matrix_csv(&psd_pc_matrix_discrete(&s.discrete_process()?), None),
        SourceKind::Stationary => {
            let psd = s.base_psd()?;
            let spec = CyclicSpectrum::stationary(psd.clone(), critical_period(&psd))?;
            matrix_csv(&psd_pc_matrix_continuous(&spec, s.numeric.spectra_m.unwrap_or(1))?, None)
        }
        SourceKind::Am => {
            let spec = am_cpsd(s.base_psd()?, s.source.f0.unwrap(), s.source.phase.unwrap_or(0.0))?;
            matrix_csv(&psd_pc_matrix_continuous(&spec, cont_m)?, None)
        }
        SourceKind::Pam => {
            let base = s.base_psd()?;
            let (spec, _) = pam_specs(s)?.remove(0);
            let CyclicSpectrum::Pam { pulse, period, .. } = &spec else {
                unreachable!()
            };
            let w = |phi: f64| {
                let f = phi / period;
                (f, pam_weighted_spectrum(&base, pulse, *period, f))
            };
            matrix_csv(&psd_pc_matrix_continuous(&spec, cont_m)?, Some(&w))
        }
        SourceKind::SampledCoding => {
            let base = s.base_psd()?;
            let mut out = String::from("fs,f,psd,response,folded_j\n");
            for &fs in s.source.fs.as_ref().unwrap() {
                let filt = mmse_filter_on(&base, fs, cells)?;
                for &f in filt.grid().nodes() {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        num(fs),
                        num(f),
                        num(base.eval(f)),
                        num(filt.response(f)),
                        num(filt.folded_j(f))
                    );
                }
            }
            Ok(out)
        }
    }
}
