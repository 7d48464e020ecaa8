use std::f64::consts::PI;

use super::{sinc, EPS_TAIL};
use crate::error::{DrfError, Result};

/// Shape of a stationary power spectral density. All families are even in `f`.
#[derive(Debug, Clone, PartialEq)]
pub enum PsdFamily {
    Zero,
    /// `height` on `|f| <= half_width`.
    Flat { height: f64, half_width: f64 },
    /// `peak * (1 - |f| / half_width)` on `|f| <= half_width`.
    Triangular { peak: f64, half_width: f64 },
    /// Flat top of `height` out to `(1 - rolloff) * half_width`, then a
    /// raised-cosine taper reaching zero at `(1 + rolloff) * half_width`.
    RaisedCosine {
        height: f64,
        half_width: f64,
        rolloff: f64,
    },
    /// `peak * exp(-f² / (2 std_dev²))`, unbounded support.
    Gaussian { peak: f64, std_dev: f64 },
    /// Linear interpolation through `(freqs[i], values[i])`, `freqs` starting
    /// at zero and increasing; zero beyond the last knot.
    Tabulated { freqs: Vec<f64>, values: Vec<f64> },
}

/// Power spectral density of a real stationary Gaussian source.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPsd {
    family: PsdFamily,
    total_power: f64,
    clamped: usize,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(DrfError::invalid(name, format!("must be positive and finite, got {v}")))
    }
}

fn nonnegative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(DrfError::invalid(name, format!("must be nonnegative and finite, got {v}")))
    }
}

impl StationaryPsd {
    pub fn zero() -> Self {
        StationaryPsd {
            family: PsdFamily::Zero,
            total_power: 0.0,
            clamped: 0,
        }
    }

    pub fn flat(height: f64, half_width: f64) -> Result<Self> {
        nonnegative("height", height)?;
        positive("half_width", half_width)?;
        Ok(StationaryPsd {
            family: PsdFamily::Flat { height, half_width },
            total_power: 2.0 * height * half_width,
            clamped: 0,
        })
    }

    /// Flat PSD on `[-half_width, half_width]` with the given total power.
    pub fn flat_with_power(power: f64, half_width: f64) -> Result<Self> {
        positive("half_width", half_width)?;
        Self::flat(power / (2.0 * half_width), half_width)
    }

    pub fn triangular(peak: f64, half_width: f64) -> Result<Self> {
        nonnegative("peak", peak)?;
        positive("half_width", half_width)?;
        Ok(StationaryPsd {
            family: PsdFamily::Triangular { peak, half_width },
            total_power: peak * half_width,
            clamped: 0,
        })
    }

    pub fn raised_cosine(height: f64, half_width: f64, rolloff: f64) -> Result<Self> {
        nonnegative("height", height)?;
        positive("half_width", half_width)?;
        if !(0.0..=1.0).contains(&rolloff) {
            return Err(DrfError::invalid("rolloff", format!("must lie in [0, 1], got {rolloff}")));
        }
        Ok(StationaryPsd {
            family: PsdFamily::RaisedCosine {
                height,
                half_width,
                rolloff,
            },
            total_power: 2.0 * height * half_width,
            clamped: 0,
        })
    }

    pub fn gaussian(peak: f64, std_dev: f64) -> Result<Self> {
        nonnegative("peak", peak)?;
        positive("std_dev", std_dev)?;
        Ok(StationaryPsd {
            family: PsdFamily::Gaussian { peak, std_dev },
            total_power: peak * std_dev * (2.0 * PI).sqrt(),
            clamped: 0,
        })
    }

    /// Tabulated PSD. Negative values are clamped to zero and counted in
    /// [`clamped_count`](Self::clamped_count).
    pub fn tabulated(freqs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if freqs.len() != values.len() || freqs.len() < 2 {
            return Err(DrfError::invalid(
                "freqs",
                "need at least two knots and one value per knot",
            ));
        }
        if freqs[0] != 0.0 {
            return Err(DrfError::invalid("freqs", "first knot must be 0"));
        }
        if freqs.windows(2).any(|w| !(w[1] > w[0])) || freqs.iter().any(|f| !f.is_finite()) {
            return Err(DrfError::invalid("freqs", "knots must be finite and increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DrfError::invalid("values", "values must be finite"));
        }
        let clamped = values.iter().filter(|v| **v < 0.0).count();
        let values: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
        let half: f64 = freqs
            .windows(2)
            .zip(values.windows(2))
            .map(|(f, v)| 0.5 * (f[1] - f[0]) * (v[0] + v[1]))
            .sum();
        Ok(StationaryPsd {
            family: PsdFamily::Tabulated { freqs, values },
            total_power: 2.0 * half,
            clamped,
        })
    }

    pub fn family(&self) -> &PsdFamily {
        &self.family
    }

    /// `∫ S(f) df`.
    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    /// Number of negative tabulated values that were clamped to zero.
    pub fn clamped_count(&self) -> usize {
        self.clamped
    }

    pub fn is_zero(&self) -> bool {
        self.total_power == 0.0
    }

    pub fn eval(&self, f: f64) -> f64 {
        let a = f.abs();
        match &self.family {
            PsdFamily::Zero => 0.0,
            PsdFamily::Flat { height, half_width } => {
                if a <= *half_width {
                    *height
                } else {
                    0.0
                }
            }
            PsdFamily::Triangular { peak, half_width } => {
                if a < *half_width {
                    peak * (1.0 - a / half_width)
                } else {
                    0.0
                }
            }
            PsdFamily::RaisedCosine {
                height,
                half_width,
                rolloff,
            } => {
                let lo = (1.0 - rolloff) * half_width;
                let hi = (1.0 + rolloff) * half_width;
                if a <= lo {
                    *height
                } else if a < hi {
                    0.5 * height * (1.0 + (PI * (a - lo) / (hi - lo)).cos())
                } else {
                    0.0
                }
            }
            PsdFamily::Gaussian { peak, std_dev } => peak * (-0.5 * (a / std_dev).powi(2)).exp(),
            PsdFamily::Tabulated { freqs, values } => {
                let last = freqs.len() - 1;
                if a >= freqs[last] {
                    return if a == freqs[last] { values[last] } else { 0.0 };
                }
                let i = freqs.partition_point(|&x| x <= a) - 1;
                let t = (a - freqs[i]) / (freqs[i + 1] - freqs[i]);
                values[i] + t * (values[i + 1] - values[i])
            }
        }
    }

    /// Smallest `f_B` with `S(f) = 0` for `|f| > f_B`, or `None` for
    /// unbounded support.
    pub fn support_radius(&self) -> Option<f64> {
        match &self.family {
            PsdFamily::Zero => Some(0.0),
            PsdFamily::Flat { half_width, .. } | PsdFamily::Triangular { half_width, .. } => {
                Some(*half_width)
            }
            PsdFamily::RaisedCosine {
                half_width,
                rolloff,
                ..
            } => Some((1.0 + rolloff) * half_width),
            PsdFamily::Gaussian { .. } => None,
            PsdFamily::Tabulated { freqs, .. } => Some(*freqs.last().unwrap()),
        }
    }

    /// Upper bound on `∫_{|f| > radius} S(f) df`.
    pub fn tail_mass(&self, radius: f64) -> f64 {
        match &self.family {
            PsdFamily::Gaussian { peak, std_dev } => {
                if radius <= 0.0 {
                    return self.total_power;
                }
                let bound = 2.0 * peak * std_dev * std_dev / radius
                    * (-0.5 * (radius / std_dev).powi(2)).exp();
                bound.min(self.total_power)
            }
            _ => match self.support_radius() {
                Some(r) if radius >= r => 0.0,
                _ => self.total_power,
            },
        }
    }

    /// Radius beyond which the spectrum is negligible: the exact support for
    /// bounded families, otherwise the radius at which both the tail mass and
    /// the envelope value fall below `EPS_TAIL` relative to the total power.
    pub fn effective_radius(&self) -> f64 {
        if let Some(r) = self.support_radius() {
            return r;
        }
        match &self.family {
            PsdFamily::Gaussian { std_dev, .. } => {
                let target = EPS_TAIL * self.total_power;
                let mut k = 1.0;
                while self.tail_mass(k * std_dev) > target || self.eval(k * std_dev) > target {
                    k += 0.5;
                }
                k * std_dev
            }
            _ => unreachable!("only the Gaussian family has unbounded support"),
        }
    }

    /// Maximum of the spectrum.
    pub fn peak(&self) -> f64 {
        match &self.family {
            PsdFamily::Zero => 0.0,
            PsdFamily::Flat { height, .. } | PsdFamily::RaisedCosine { height, .. } => *height,
            PsdFamily::Triangular { peak, .. } | PsdFamily::Gaussian { peak, .. } => *peak,
            PsdFamily::Tabulated { values, .. } => values.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Frequencies where the spectrum has a kink or jump, both signs.
    pub fn breakpoints(&self) -> Vec<f64> {
        let positive: Vec<f64> = match &self.family {
            PsdFamily::Zero | PsdFamily::Gaussian { .. } => vec![],
            PsdFamily::Flat { half_width, .. } => vec![*half_width],
            PsdFamily::Triangular { half_width, .. } => vec![0.0, *half_width],
            PsdFamily::RaisedCosine {
                half_width,
                rolloff,
                ..
            } => vec![(1.0 - rolloff) * half_width, (1.0 + rolloff) * half_width],
            PsdFamily::Tabulated { freqs, .. } => freqs.clone(),
        };
        let mut out = Vec::with_capacity(2 * positive.len());
        for b in positive {
            out.push(b);
            if b != 0.0 {
                out.push(-b);
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Autocorrelation `R(τ) = ∫ S(f) e^{2πifτ} df`.
    pub fn autocorrelation(&self, tau: f64) -> f64 {
        match &self.family {
            PsdFamily::Zero => 0.0,
            PsdFamily::Flat { height, half_width } => {
                2.0 * height * half_width * sinc(2.0 * half_width * tau)
            }
            PsdFamily::Triangular { peak, half_width } => {
                peak * half_width * sinc(half_width * tau).powi(2)
            }
            PsdFamily::RaisedCosine {
                height,
                half_width,
                rolloff,
            } => {
                let x = 4.0 * rolloff * half_width * tau;
                let taper = if (1.0 - x * x).abs() < 1e-10 {
                    // limit of cos(πx/2) / (1 - x²) at x = ±1
                    PI / 4.0
                } else {
                    (PI * x / 2.0).cos() / (1.0 - x * x)
                };
                2.0 * height * half_width * sinc(2.0 * half_width * tau) * taper
            }
            PsdFamily::Gaussian { peak, std_dev } => {
                peak * std_dev * (2.0 * PI).sqrt()
                    * (-2.0 * (PI * std_dev * tau).powi(2)).exp()
            }
            PsdFamily::Tabulated { freqs, values } => {
                // exact integral of the piecewise-linear interpolant against cos
                let w = 2.0 * PI * tau;
                let mut acc = 0.0;
                for (f, v) in freqs.windows(2).zip(values.windows(2)) {
                    let slope = (v[1] - v[0]) / (f[1] - f[0]);
                    let c0 = v[0] - slope * f[0];
                    if w.abs() < 1e-12 {
                        acc += 0.5 * (f[1] - f[0]) * (v[0] + v[1]);
                    } else {
                        let prim = |x: f64| {
                            (c0 + slope * x) * (w * x).sin() / w + slope * (w * x).cos() / (w * w)
                        };
                        acc += prim(f[1]) - prim(f[0]);
                    }
                }
                2.0 * acc
            }
        }
    }
}
