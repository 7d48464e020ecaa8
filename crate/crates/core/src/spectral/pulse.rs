use std::f64::consts::PI;

use super::{expi, sinc, C64};
use crate::error::{DrfError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum PulseKind {
    /// `p(t) = 1` on `[0, width)`.
    Rectangular { width: f64 },
    /// `p(t) = 1 - |t| / half_width` on `|t| < half_width`.
    Triangular { half_width: f64 },
    /// Raised-cosine spectrum with Nyquist interval `symbol_time`:
    /// `P(f) = symbol_time` on the flat part, zero beyond
    /// `(1 + rolloff) / (2 symbol_time)`.
    RaisedCosine { symbol_time: f64, rolloff: f64 },
    /// `P(f) = 1` on `|f| <= half_width`.
    FlatBand { half_width: f64 },
}

/// A real pulse `gain * p(t)` described by its shape family.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseShape {
    kind: PulseKind,
    gain: f64,
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(DrfError::invalid(name, format!("must be positive and finite, got {v}")))
    }
}

impl PulseShape {
    pub fn new(kind: PulseKind) -> Result<Self> {
        match kind {
            PulseKind::Rectangular { width } => check_positive("width", width)?,
            PulseKind::Triangular { half_width } | PulseKind::FlatBand { half_width } => {
                check_positive("half_width", half_width)?
            }
            PulseKind::RaisedCosine {
                symbol_time,
                rolloff,
            } => {
                check_positive("symbol_time", symbol_time)?;
                if !(0.0..=1.0).contains(&rolloff) {
                    return Err(DrfError::invalid(
                        "rolloff",
                        format!("must lie in [0, 1], got {rolloff}"),
                    ));
                }
            }
        }
        Ok(PulseShape { kind, gain: 1.0 })
    }

    pub fn rectangular(width: f64) -> Result<Self> {
        Self::new(PulseKind::Rectangular { width })
    }

    pub fn triangular(half_width: f64) -> Result<Self> {
        Self::new(PulseKind::Triangular { half_width })
    }

    pub fn raised_cosine(symbol_time: f64, rolloff: f64) -> Result<Self> {
        Self::new(PulseKind::RaisedCosine {
            symbol_time,
            rolloff,
        })
    }

    pub fn flat_band(half_width: f64) -> Result<Self> {
        Self::new(PulseKind::FlatBand { half_width })
    }

    /// The all-zero pulse.
    pub fn zero(kind: PulseKind) -> Result<Self> {
        Ok(Self::new(kind)?.with_gain(0.0))
    }

    pub fn with_gain(mut self, gain: f64) -> Self {
        self.gain = gain;
        self
    }

    /// Rescale so that the energy equals `energy`.
    pub fn with_energy(self, energy: f64) -> Self {
        let unit = self.shape_energy();
        let gain = (energy / unit).sqrt();
        self.with_gain(gain)
    }

    pub fn kind(&self) -> &PulseKind {
        &self.kind
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn is_zero(&self) -> bool {
        self.gain == 0.0
    }

    fn shape_energy(&self) -> f64 {
        match self.kind {
            PulseKind::Rectangular { width } => width,
            PulseKind::Triangular { half_width } => 2.0 * half_width / 3.0,
            PulseKind::RaisedCosine {
                symbol_time,
                rolloff,
            } => symbol_time * (1.0 - rolloff / 4.0),
            PulseKind::FlatBand { half_width } => 2.0 * half_width,
        }
    }

    /// `∫ |p(t)|² dt`.
    pub fn energy(&self) -> f64 {
        self.gain * self.gain * self.shape_energy()
    }

    /// Fourier transform `P(f) = ∫ p(t) e^{-2πift} dt`.
    pub fn fourier(&self, f: f64) -> C64 {
        let g = self.gain;
        match self.kind {
            PulseKind::Rectangular { width } => {
                expi(-PI * f * width) * (g * width * sinc(f * width))
            }
            PulseKind::Triangular { half_width } => {
                C64::new(g * half_width * sinc(f * half_width).powi(2), 0.0)
            }
            PulseKind::RaisedCosine {
                symbol_time,
                rolloff,
            } => {
                let a = f.abs();
                let lo = (1.0 - rolloff) / (2.0 * symbol_time);
                let hi = (1.0 + rolloff) / (2.0 * symbol_time);
                let v = if a <= lo {
                    symbol_time
                } else if a < hi {
                    0.5 * symbol_time * (1.0 + (PI * (a - lo) / (hi - lo)).cos())
                } else {
                    0.0
                };
                C64::new(g * v, 0.0)
            }
            PulseKind::FlatBand { half_width } => {
                C64::new(if f.abs() <= half_width { g } else { 0.0 }, 0.0)
            }
        }
    }

    /// `p(t)`.
    pub fn time(&self, t: f64) -> f64 {
        let g = self.gain;
        match self.kind {
            PulseKind::Rectangular { width } => {
                if (0.0..width).contains(&t) {
                    g
                } else {
                    0.0
                }
            }
            PulseKind::Triangular { half_width } => g * (1.0 - t.abs() / half_width).max(0.0),
            PulseKind::RaisedCosine {
                symbol_time,
                rolloff,
            } => {
                let x = 2.0 * rolloff * t / symbol_time;
                let taper = if (1.0 - x * x).abs() < 1e-10 {
                    PI / 4.0
                } else {
                    (PI * x / 2.0).cos() / (1.0 - x * x)
                };
                g * sinc(t / symbol_time) * taper
            }
            PulseKind::FlatBand { half_width } => g * 2.0 * half_width * sinc(2.0 * half_width * t),
        }
    }

    /// Smallest `f_P` with `P(f) = 0` for `|f| > f_P`, `None` if unbounded.
    pub fn support_radius(&self) -> Option<f64> {
        match self.kind {
            PulseKind::Rectangular { .. } | PulseKind::Triangular { .. } => None,
            PulseKind::RaisedCosine {
                symbol_time,
                rolloff,
            } => Some((1.0 + rolloff) / (2.0 * symbol_time)),
            PulseKind::FlatBand { half_width } => Some(half_width),
        }
    }

    /// Upper bound on `∫_{|f| > radius} |P(f)|² df`.
    pub fn spectral_tail(&self, radius: f64) -> f64 {
        if let Some(r) = self.support_radius() {
            return if radius >= r { 0.0 } else { self.energy() };
        }
        if radius <= 0.0 {
            return self.energy();
        }
        let g2 = self.gain * self.gain;
        let bound = match self.kind {
            // |P|² <= g² / (π f)²
            PulseKind::Rectangular { .. } => 2.0 * g2 / (PI * PI * radius),
            // |P|² <= g² / (π⁴ w² f⁴)
            PulseKind::Triangular { half_width } => {
                2.0 * g2 / (3.0 * PI.powi(4) * half_width * half_width * radius.powi(3))
            }
            _ => unreachable!("band-limited shapes handled above"),
        };
        bound.min(self.energy())
    }

    /// Interval outside which `p(t) = 0`, `None` if unbounded.
    pub fn time_support(&self) -> Option<(f64, f64)> {
        match self.kind {
            PulseKind::Rectangular { width } => Some((0.0, width)),
            PulseKind::Triangular { half_width } => Some((-half_width, half_width)),
            _ => None,
        }
    }

    /// Frequencies (Hz, both signs) where `|P(f)|` has a kink or jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            PulseKind::RaisedCosine {
                symbol_time,
                rolloff,
            } => {
                let lo = (1.0 - rolloff) / (2.0 * symbol_time);
                let hi = (1.0 + rolloff) / (2.0 * symbol_time);
                vec![-hi, -lo, lo, hi]
            }
            PulseKind::FlatBand { half_width } => vec![-half_width, half_width],
            _ => vec![],
        }
    }

    /// Pulse autocorrelation `∫ p(t + τ) p(t) dt` for time-limited shapes.
    pub(crate) fn time_autocorrelation(&self, tau: f64) -> Option<f64> {
        let g2 = self.gain * self.gain;
        match self.kind {
            PulseKind::Rectangular { width } => Some(g2 * (width - tau.abs()).max(0.0)),
            PulseKind::Triangular { half_width } => {
                // self-convolution of a triangle: scaled cubic B-spline
                let u = (tau / half_width).abs();
                let b = if u <= 1.0 {
                    2.0 / 3.0 - u * u + 0.5 * u * u * u
                } else if u < 2.0 {
                    (2.0 - u).powi(3) / 6.0
                } else {
                    0.0
                };
                Some(g2 * half_width * b)
            }
            _ => None,
        }
    }

    /// Aliased energy spectrum `Σ_k |P(f - k / T₀)|²`.
    pub fn aliased_energy(&self, f: f64, period: f64) -> f64 {
        if let Some(radius) = self.support_radius() {
            let kmin = ((f - radius) * period).floor() as i64;
            let kmax = ((f + radius) * period).ceil() as i64;
            (kmin..=kmax)
                .map(|k| self.fourier(f - k as f64 / period).norm_sqr())
                .sum()
        } else {
            // Poisson dual: T₀ Σ_l r_p(l T₀) e^{-2πi f l T₀}, finite for
            // time-limited pulses
            let (a, b) = self.time_support().expect("pulse is time- or band-limited");
            let lmax = ((b - a) / period).ceil() as i64;
            let mut acc = self.time_autocorrelation(0.0).unwrap();
            for l in 1..=lmax {
                let r = self.time_autocorrelation(l as f64 * period).unwrap();
                acc += 2.0 * r * (2.0 * PI * f * l as f64 * period).cos();
            }
            period * acc.max(0.0)
        }
    }

    /// Periodized pulse `q_t(φ) = Σ_j p(t - j T₀) e^{2πijφ}`.
    pub fn periodized(&self, t: f64, phi: f64, period: f64) -> C64 {
        if let Some((a, b)) = self.time_support() {
            let jmin = ((t - b) / period).floor() as i64;
            let jmax = ((t - a) / period).ceil() as i64;
            (jmin..=jmax)
                .map(|j| expi(2.0 * PI * j as f64 * phi) * self.time(t - j as f64 * period))
                .sum()
        } else {
            let radius = self.support_radius().expect("pulse is time- or band-limited");
            let nmin = (-radius * period - phi).floor() as i64;
            let nmax = (radius * period - phi).ceil() as i64;
            let acc: C64 = (nmin..=nmax)
                .map(|n| {
                    let nu = (phi + n as f64) / period;
                    self.fourier(nu) * expi(2.0 * PI * nu * t)
                })
                .sum();
            acc / period
        }
    }
}
