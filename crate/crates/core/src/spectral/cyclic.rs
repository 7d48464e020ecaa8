use std::f64::consts::PI;

use super::{expi, DiscreteCsProcess, PulseShape, StationaryPsd, C64};
use crate::error::{DrfError, Result};
use crate::grid::{fold_unit, QuadratureGrid};

/// Set of cyclic indices `n` with `Ŝⁿ ≢ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum ActiveIndices {
    Finite(Vec<i64>),
    /// Every index may be active (time-limited PAM pulses).
    Unbounded,
}

/// Second-order description of a real cyclostationary Gaussian process with
/// period `T₀`.
#[derive(Debug, Clone, PartialEq)]
pub enum CyclicSpectrum {
    /// A stationary process viewed as cyclostationary with an arbitrary period.
    Stationary { psd: StationaryPsd, period: f64 },
    /// `√2 U(t) cos(2π f₀ t + phase)`.
    Am {
        base: StationaryPsd,
        f0: f64,
        phase: f64,
    },
    /// `Σ_n U(n T₀) p(t - n T₀)`.
    Pam {
        base: StationaryPsd,
        pulse: PulseShape,
        period: f64,
    },
}

/// Amplitude modulation of `base` by a carrier at `f0` Hz.
pub fn am_cpsd(base: StationaryPsd, f0: f64, phase: f64) -> Result<CyclicSpectrum> {
    if !(f0.is_finite() && f0 > 0.0) {
        return Err(DrfError::invalid("f0", format!("must be positive, got {f0}")));
    }
    if !phase.is_finite() {
        return Err(DrfError::invalid("phase", "must be finite"));
    }
    Ok(CyclicSpectrum::Am { base, f0, phase })
}

/// Pulse-amplitude modulation of the samples `U(n T₀)` by `pulse`.
pub fn pam_cpsd(base: StationaryPsd, pulse: PulseShape, period: f64) -> Result<CyclicSpectrum> {
    if !(period.is_finite() && period > 0.0) {
        return Err(DrfError::invalid("T0", format!("must be positive, got {period}")));
    }
    Ok(CyclicSpectrum::Pam {
        base,
        pulse,
        period,
    })
}

/// Either kind of process, for [`average_power`].
#[derive(Debug, Clone, Copy)]
pub enum PowerSource<'a> {
    Continuous(&'a CyclicSpectrum),
    Discrete(&'a DiscreteCsProcess),
}

impl<'a> From<&'a CyclicSpectrum> for PowerSource<'a> {
    fn from(s: &'a CyclicSpectrum) -> Self {
        PowerSource::Continuous(s)
    }
}

impl<'a> From<&'a DiscreteCsProcess> for PowerSource<'a> {
    fn from(p: &'a DiscreteCsProcess) -> Self {
        PowerSource::Discrete(p)
    }
}

/// Average power `σ²` (per unit time, or per symbol for discrete processes).
pub fn average_power<'a>(source: impl Into<PowerSource<'a>>) -> Result<f64> {
    match source.into() {
        PowerSource::Continuous(s) => s.average_power(),
        PowerSource::Discrete(p) => Ok(p.average_power()),
    }
}

/// Sample count used when an integral over a band has to be done numerically.
const BAND_CELLS: usize = 8192;

impl CyclicSpectrum {
    pub fn stationary(psd: StationaryPsd, period: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(DrfError::invalid("T0", format!("must be positive, got {period}")));
        }
        Ok(CyclicSpectrum::Stationary { psd, period })
    }

    /// `T₀` in seconds.
    pub fn period(&self) -> f64 {
        match self {
            CyclicSpectrum::Stationary { period, .. } | CyclicSpectrum::Pam { period, .. } => {
                *period
            }
            CyclicSpectrum::Am { f0, .. } => 1.0 / f0,
        }
    }

    pub fn active_indices(&self) -> ActiveIndices {
        match self {
            CyclicSpectrum::Stationary { .. } => ActiveIndices::Finite(vec![0]),
            CyclicSpectrum::Am { base, .. } => {
                if base.is_zero() {
                    ActiveIndices::Finite(vec![])
                } else {
                    ActiveIndices::Finite(vec![-2, 0, 2])
                }
            }
            CyclicSpectrum::Pam {
                base,
                pulse,
                period,
            } => {
                if base.is_zero() || pulse.is_zero() {
                    return ActiveIndices::Finite(vec![]);
                }
                match pulse.support_radius() {
                    Some(r) => {
                        // P(f) P*(f - n/T₀) needs both arguments inside the band
                        let nmax = (2.0 * r * period).ceil() as i64;
                        let ns = (-nmax..=nmax)
                            .filter(|n| (*n as f64).abs() < 2.0 * r * period)
                            .collect();
                        ActiveIndices::Finite(ns)
                    }
                    None => ActiveIndices::Unbounded,
                }
            }
        }
    }

    /// Spectrum of the symbol sequence `U(n T₀)` expressed per Hz of the
    /// modulated process: `(1/T₀) Σ_j S_U(f - j/T₀)`. Only defined for PAM.
    pub fn symbol_spectrum(&self, f: f64) -> Option<f64> {
        match self {
            CyclicSpectrum::Pam { base, period, .. } => Some(aliased_psd(base, f, *period)),
            _ => None,
        }
    }

    /// Cyclic power spectral density `Ŝⁿ(f)`.
    pub fn cpsd(&self, n: i64, f: f64) -> C64 {
        match self {
            CyclicSpectrum::Stationary { psd, .. } => {
                if n == 0 {
                    C64::new(psd.eval(f), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            CyclicSpectrum::Am { base, f0, phase } => match n {
                0 => C64::new(0.5 * (base.eval(f + f0) + base.eval(f - f0)), 0.0),
                2 => expi(2.0 * phase) * (0.5 * base.eval(f - f0)),
                -2 => expi(-2.0 * phase) * (0.5 * base.eval(f + f0)),
                _ => C64::new(0.0, 0.0),
            },
            CyclicSpectrum::Pam {
                base,
                pulse,
                period,
            } => {
                let sa = aliased_psd(base, f, *period);
                pulse.fourier(f) * pulse.fourier(f - n as f64 / period).conj() * (sa / period)
            }
        }
    }

    /// Time-varying spectral density `S^t(f) = Σ_n Ŝⁿ(f) e^{2πint/T₀}`, the
    /// transform in `τ` of `R(t, τ)`. Complex in general; its aliased sum
    /// over `f - k/T₀` is real and nonnegative.
    pub fn tpsd(&self, t: f64, f: f64) -> C64 {
        match self {
            CyclicSpectrum::Stationary { psd, .. } => C64::new(psd.eval(f), 0.0),
            CyclicSpectrum::Am { .. } => {
                let p = self.period();
                [-2i64, 0, 2]
                    .iter()
                    .map(|&n| self.cpsd(n, f) * expi(2.0 * PI * n as f64 * t / p))
                    .sum()
            }
            CyclicSpectrum::Pam {
                base,
                pulse,
                period,
            } => {
                let sa = aliased_psd(base, f, *period);
                let q = pulse.periodized(t, f * period, *period);
                pulse.fourier(f) * q.conj() * expi(2.0 * PI * f * t) * sa
            }
        }
    }

    /// Radius in Hz outside which `S^t(f)` vanishes for every `t` (or is
    /// negligible, for unbounded spectra). `None` if the process is not band
    /// limited.
    pub fn tpsd_radius(&self) -> Option<f64> {
        match self {
            CyclicSpectrum::Stationary { psd, .. } => Some(psd.effective_radius()),
            CyclicSpectrum::Am { base, f0, .. } => Some(base.effective_radius() + f0),
            CyclicSpectrum::Pam { pulse, .. } => pulse.support_radius(),
        }
    }

    /// Kinks and jumps of the spectra, mapped to normalized frequency
    /// `φ = f T₀` and folded into `[-1/2, 1/2)`.
    pub fn phi_breakpoints(&self) -> Vec<f64> {
        let p = self.period();
        let hz: Vec<f64> = match self {
            CyclicSpectrum::Stationary { psd, .. } => psd.breakpoints(),
            CyclicSpectrum::Am { base, f0, .. } => base
                .breakpoints()
                .iter()
                .flat_map(|b| [b + f0, b - f0])
                .collect(),
            CyclicSpectrum::Pam { base, pulse, .. } => {
                let mut v = base.breakpoints();
                v.extend(pulse.breakpoints());
                v
            }
        };
        let mut out: Vec<f64> = hz.iter().map(|b| fold_unit(b * p)).collect();
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        out
    }

    /// `σ_X² = (1/T₀) ∫₀^{T₀} R(t, 0) dt`.
    pub fn average_power(&self) -> Result<f64> {
        match self {
            CyclicSpectrum::Stationary { psd, .. } => Ok(psd.total_power()),
            CyclicSpectrum::Am { base, .. } => Ok(base.total_power()),
            CyclicSpectrum::Pam {
                base,
                pulse,
                period,
            } => {
                if pulse.is_zero() || base.is_zero() {
                    return Ok(0.0);
                }
                if let Some((a, b)) = pulse.time_support() {
                    // (1/T₀) Σ_l R_U(l T₀) r_p(l T₀), finitely many terms
                    let lmax = ((b - a) / period).ceil() as i64;
                    let mut acc = 0.0;
                    for l in -lmax..=lmax {
                        let tau = l as f64 * period;
                        acc += base.autocorrelation(tau) * pulse.time_autocorrelation(tau).unwrap_or(0.0);
                    }
                    return Ok(acc / period);
                }
                let r = pulse.support_radius().expect("pulse is time- or band-limited");
                let mut bps = pulse.breakpoints();
                bps.extend(shifted_breakpoints(base, *period, r));
                let grid = QuadratureGrid::aligned(-r, r, BAND_CELLS, &bps);
                let v = grid.integrate(|f| {
                    pulse.fourier(f).norm_sqr() * aliased_psd(base, f, *period) / period
                });
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(DrfError::Divergent("average power of PAM process".into()))
                }
            }
        }
    }

    /// Autocorrelation `R(t, τ) = E[X(t + τ) X(t)]`.
    pub fn autocorrelation(&self, t: f64, tau: f64) -> f64 {
        match self {
            CyclicSpectrum::Stationary { psd, .. } => psd.autocorrelation(tau),
            CyclicSpectrum::Am { base, f0, phase } => {
                2.0 * base.autocorrelation(tau)
                    * (2.0 * PI * f0 * (t + tau) + phase).cos()
                    * (2.0 * PI * f0 * t + phase).cos()
            }
            CyclicSpectrum::Pam {
                base,
                pulse,
                period,
            } => {
                if pulse.is_zero() || base.is_zero() {
                    return 0.0;
                }
                if let Some((a, b)) = pulse.time_support() {
                    let s = t + tau;
                    let range = |x: f64| {
                        let lo = ((x - b) / period).floor() as i64;
                        let hi = ((x - a) / period).ceil() as i64;
                        lo..=hi
                    };
                    let mut acc = 0.0;
                    for i in range(s) {
                        let ps = pulse.time(s - i as f64 * period);
                        if ps == 0.0 {
                            continue;
                        }
                        for j in range(t) {
                            let pt = pulse.time(t - j as f64 * period);
                            if pt != 0.0 {
                                acc += base.autocorrelation((i - j) as f64 * period) * ps * pt;
                            }
                        }
                    }
                    acc
                } else {
                    // numeric inverse transform of the TPSD over the pulse band
                    let r = pulse.support_radius().expect("pulse is time- or band-limited");
                    let mut bps = pulse.breakpoints();
                    bps.extend(shifted_breakpoints(base, *period, r));
                    let grid = QuadratureGrid::aligned(-r, r, BAND_CELLS, &bps);
                    grid.integrate(|f| (self.tpsd(t, f) * expi(2.0 * PI * f * tau)).re)
                }
            }
        }
    }
}

/// `(1/T₀) Σ_j S_U(f - j/T₀)`.
pub(crate) fn aliased_psd(psd: &StationaryPsd, f: f64, period: f64) -> f64 {
    if psd.is_zero() {
        return 0.0;
    }
    let r = psd.effective_radius();
    let jmin = ((f - r) * period).floor() as i64;
    let jmax = ((f + r) * period).ceil() as i64;
    let s: f64 = (jmin..=jmax).map(|j| psd.eval(f - j as f64 / period)).sum();
    s / period
}

/// Breakpoints of `f ↦ Σ_j S(f - j/T₀)` inside `[-radius, radius]`.
pub(crate) fn shifted_breakpoints(psd: &StationaryPsd, period: f64, radius: f64) -> Vec<f64> {
    let r = psd.effective_radius();
    let jmax = ((radius + r) * period).ceil() as i64;
    let mut out = Vec::new();
    for b in psd.breakpoints() {
        for j in -jmax..=jmax {
            let x = b + j as f64 / period;
            if x.abs() <= radius {
                out.push(x);
            }
        }
    }
    out
}
