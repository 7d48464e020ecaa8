//! Spectral descriptions of stationary and cyclostationary Gaussian sources,
//! and the polyphase spectral (PSD-PC) matrices built from them.
//!
//! Physical frequencies are in Hz and appear only at the constructors and
//! evaluators of the individual families. Everything that feeds the
//! waterfilling engine is expressed in the normalized frequency
//! `φ ∈ [-1/2, 1/2]`.
//!
//! Cyclic spectra use the asymmetric autocorrelation
//! `R(t, τ) = E[X(t + τ) X(t)]`. References that use the symmetric form
//! `E[X(t + τ/2) X(t - τ/2)]` have CPSD `Ŝⁿ(f - n / (2 T₀))` in this
//! convention; that conversion is not implemented.

mod cyclic;
mod discrete;
mod matrix;
mod psd;
mod pulse;

pub use cyclic::{am_cpsd, average_power, pam_cpsd, ActiveIndices, CyclicSpectrum, PowerSource};
pub use discrete::DiscreteCsProcess;
pub use matrix::{psd_pc_matrix_continuous, psd_pc_matrix_discrete, PsdPcMatrix, PsdPcRoute};
pub use psd::{PsdFamily, StationaryPsd};
pub use pulse::{PulseKind, PulseShape};

pub use nalgebra::Complex;

/// Complex double.
pub type C64 = Complex<f64>;

/// Relative tail tolerance for truncating infinite spectral series.
pub const EPS_TAIL: f64 = 1e-12;

/// Relative tolerance below which negative eigenvalues count as rounding.
pub const EPS_PSD: f64 = 1e-9;

/// Upper bound on alias or harmonic indices visited by any series.
pub const MAX_SERIES_TERMS: usize = 1 << 20;

/// `sin(πx) / (πx)`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - (std::f64::consts::PI * x).powi(2) / 6.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

pub(crate) fn expi(angle: f64) -> C64 {
    C64::new(angle.cos(), angle.sin())
}
