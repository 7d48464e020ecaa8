//! Distortion-rate functions of cyclostationary Gaussian processes.
//!
//! A cyclostationary (CS) Gaussian source is described by its cyclic
//! spectra. Splitting the source into its polyphase components gives a
//! stationary vector process whose spectral density matrix (the PSD-PC
//! matrix) is Hermitian at every normalized frequency `φ ∈ [-1/2, 1/2]`.
//! The distortion-rate function follows by reverse waterfilling a single
//! water level over the eigenvalues of that matrix.
//!
//! Module map:
//!
//! - [`spectral`]: stationary PSDs, pulse shapes, cyclic spectra (AM, PAM)
//!   and the discrete/continuous PSD-PC matrices.
//! - [`waterfill`]: Hermitian eigenvalues, parametric `(θ → R, D)`
//!   evaluation and water-level root finding.
//! - [`drf`]: the assembled distortion-rate results, lower bounds and the
//!   combined sampling and source coding distortion.
//! - [`oracle`]: brute-force Karhunen-Loève eigenvalue DRF on finite
//!   windows, used to validate the spectral fast paths.
//! - [`cli`]: scenario configs and CSV output for the `cyclo-drf` binary.

pub mod cli;
pub mod drf;
pub mod error;
pub mod grid;
pub mod oracle;
pub mod rate;
pub mod spectral;
pub mod waterfill;

pub use error::{DrfError, Result};
pub use rate::{BitsPerSecond, BitsPerSymbol};
