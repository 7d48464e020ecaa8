//! Brute-force distortion-rate values from covariance eigenvalues on a
//! finite window.
//!
//! Continuous kernels are discretized with the midpoint (Nyström) rule on
//! `[-T, T]`. The `1/(2T)` normalization is folded into the weight `1/N`, so
//! the eigenvalues of `weight * K` sum to the windowed average power.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{DrfError, Result};
use crate::grid::QuadratureGrid;
use crate::rate::{BitsPerSecond, BitsPerSymbol};
use crate::spectral::{CyclicSpectrum, DiscreteCsProcess, EPS_PSD};
use crate::waterfill::{clamp_nonnegative, solve_water_level, EigenField, RateDistortionPoint, RateNormalizer};

/// Covariance kernel sampled at midpoints of `N` cells covering `[-T, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelGrid {
    times: Vec<f64>,
    values: DMatrix<f64>,
    weight: f64,
    half_window: f64,
}

impl KernelGrid {
    /// Assemble from raw parts; `values` is symmetrized.
    pub fn from_parts(times: Vec<f64>, values: DMatrix<f64>, weight: f64, half_window: f64) -> Result<Self> {
        let n = times.len();
        if n < 2 || values.nrows() != n || values.ncols() != n {
            return Err(DrfError::invalid("values", "need an N x N matrix with N >= 2"));
        }
        if !(weight > 0.0 && half_window > 0.0) {
            return Err(DrfError::invalid("weight", "weight and window must be positive"));
        }
        let values = (&values + values.transpose()) * 0.5;
        Ok(KernelGrid {
            times,
            values,
            weight,
            half_window,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `T`.
    pub fn half_window(&self) -> f64 {
        self.half_window
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Ascending eigenvalues of `weight * K`.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        weighted_eigenvalues(&self.values, self.weight)
    }

    /// `weight * trace(K)`: the average power over the window.
    pub fn window_power(&self) -> f64 {
        self.weight * self.values.trace()
    }
}

/// Covariance of `(X[0], …, X[N-1])` for a discrete process.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCovariance {
    matrix: DMatrix<f64>,
}

impl BlockCovariance {
    /// `n` must hold whole periods; a partial period over-weights the
    /// variance of its phases by `O(1/N)`.
    pub fn new(proc: &DiscreteCsProcess, n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(proc.period()) {
            return Err(DrfError::invalid("N", "block length must be a positive multiple of the period"));
        }
        // entry (i, j) = E X[i] X[j] = R[j, i - j]
        let matrix = DMatrix::from_fn(n, n, |i, j| proc.covariance(j as i64, i as i64 - j as i64));
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        Ok(BlockCovariance { matrix })
    }

    /// The longest block of at most `n` samples holding whole periods (at
    /// least one period).
    pub fn whole_periods(proc: &DiscreteCsProcess, n: usize) -> Result<Self> {
        let m = proc.period();
        Self::new(proc, (n - n % m).max(m))
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Ascending eigenvalues of the covariance divided by `N`.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        weighted_eigenvalues(&self.matrix, 1.0 / self.len() as f64)
    }
}

fn weighted_eigenvalues(values: &DMatrix<f64>, weight: f64) -> Result<Vec<f64>> {
    let scaled = values * weight;
    let trace = scaled.trace();
    let mut eigs: Vec<f64> = scaled.symmetric_eigenvalues().iter().copied().collect();
    if eigs.iter().any(|v| !v.is_finite()) {
        return Err(DrfError::EigenSolver {
            phi: f64::NAN,
            dim: values.nrows(),
            norm: values.norm(),
        });
    }
    clamp_nonnegative(&mut eigs, trace.abs().max(EPS_PSD * scaled.norm()))?;
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

fn check_window(spec: &CyclicSpectrum, half_window: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(DrfError::invalid("N", "grid needs at least two points"));
    }
    let ratio = half_window / spec.period();
    if !(half_window > 0.0) || (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
        return Err(DrfError::invalid("T", "window half-width must be a positive multiple of the period"));
    }
    Ok(())
}

fn midpoints(half_window: f64, n: usize) -> Vec<f64> {
    QuadratureGrid::uniform(-half_window, half_window, n).nodes().to_vec()
}

/// Kernel `K(t, s) = R(s, t - s)` of `spec` on `N` midpoints of `[-T, T]`.
pub fn build_kernel(spec: &CyclicSpectrum, half_window: f64, n: usize) -> Result<KernelGrid> {
    check_window(spec, half_window, n)?;
    let times = midpoints(half_window, n);
    let values = sample_kernel(spec, &times, |t| t);
    KernelGrid::from_parts(times, values, 1.0 / n as f64, half_window)
}

/// Kernel of the process sampled every `T₀ / M` and held in between:
/// `K̃(t, s) = K(⌊t⌋, ⌊s⌋)` with `⌊·⌋` rounding down to the sampling lattice.
pub fn step_kernel(spec: &CyclicSpectrum, half_window: f64, n: usize, m: usize) -> Result<KernelGrid> {
    check_window(spec, half_window, n)?;
    if m == 0 {
        return Err(DrfError::invalid("M", "must be at least 1"));
    }
    let step = spec.period() / m as f64;
    let times = midpoints(half_window, n);
    let values = sample_kernel(spec, &times, |t| (t / step).floor() * step);
    KernelGrid::from_parts(times, values, 1.0 / n as f64, half_window)
}

/// `R(snap(t_j), snap(t_i) - snap(t_j))` over all pairs, evaluating each
/// distinct (phase, lag) combination once when the snapped times lie on a
/// lattice commensurate with the period.
fn sample_kernel(spec: &CyclicSpectrum, times: &[f64], snap: impl Fn(f64) -> f64 + Sync) -> DMatrix<f64> {
    let n = times.len();
    let t0 = spec.period();
    let s: Vec<f64> = times.iter().map(|&t| snap(t)).collect();
    let h = times[1] - times[0];
    let per_period = t0 / h;
    let lattice = (per_period - per_period.round()).abs() < 1e-9 && per_period.round() >= 1.0;
    let mut out = DMatrix::zeros(n, n);
    if lattice {
        let p = per_period.round() as usize;
        // columns j and j + p see the same phase; row offsets are lags
        let cols: Vec<Vec<f64>> = (0..p.min(n))
            .into_par_iter()
            .map(|j| {
                (0..n)
                    .map(|i| spec.autocorrelation(s[j], s[i] - s[j]))
                    .collect()
            })
            .collect();
        for j in 0..n {
            let base = j % p;
            let shift = j - base;
            for i in 0..n {
                // row i of column j has the lag of row i - shift in column `base`,
                // shifted by whole periods of the snapped lattice
                let v = if i >= shift {
                    cols[base][i - shift]
                } else {
                    spec.autocorrelation(s[j], s[i] - s[j])
                };
                out[(i, j)] = v;
            }
        }
    } else {
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|j| (0..n).map(|i| spec.autocorrelation(s[j], s[i] - s[j])).collect())
            .collect();
        for (j, col) in rows.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                out[(i, j)] = *v;
            }
        }
    }
    out
}

fn eigen_field(eigs: Vec<f64>) -> Result<EigenField> {
    let n = eigs.len();
    let grid = QuadratureGrid::uniform(0.0, n as f64, n);
    EigenField::from_values(1, grid, eigs.into_iter().map(|v| vec![v]).collect())
}

/// `D = Σ min(θ, λ_k)`, `R = (1/2T) · ½ Σ log⁺(λ_k / θ)` bits per second.
pub fn kl_drf(kernel: &KernelGrid, target_rate: BitsPerSecond) -> Result<RateDistortionPoint> {
    let field = eigen_field(kernel.eigenvalues()?)?;
    solve_water_level(&field, target_rate.value(), RateNormalizer(0.25 / kernel.half_window))
}

/// `D = Σ min(θ, λ_k / N)`, `R = (1/N) · ½ Σ log⁺(λ_k / (N θ))` bits per symbol.
pub fn kl_drf_blocks(block: &BlockCovariance, target_rate: BitsPerSymbol) -> Result<RateDistortionPoint> {
    let field = eigen_field(block.eigenvalues()?)?;
    solve_water_level(&field, target_rate.value(), RateNormalizer(0.5 / block.len() as f64))
}

/// Outcome of [`weyl_gap`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylGap {
    /// `max_l |λ_l(A) - λ_l(B)|` over descending-sorted weighted eigenvalues.
    pub eigen_gap: f64,
    /// `2 sup |K_A - K_B|`.
    pub sup_bound: f64,
}

impl WeylGap {
    pub fn holds(&self) -> bool {
        self.eigen_gap <= self.sup_bound + 1e-9
    }
}

/// Largest eigenvalue displacement between two kernels on the same grid,
/// together with the perturbation bound it must respect.
pub fn weyl_gap(a: &KernelGrid, b: &KernelGrid) -> Result<WeylGap> {
    if a.times != b.times || a.weight != b.weight {
        return Err(DrfError::GridMismatch(format!(
            "{} points (weight {}) vs {} points (weight {})",
            a.len(),
            a.weight,
            b.len(),
            b.weight
        )));
    }
    let mut ea = a.values.scale(a.weight).symmetric_eigenvalues().as_slice().to_vec();
    let mut eb = b.values.scale(b.weight).symmetric_eigenvalues().as_slice().to_vec();
    ea.sort_by(|x, y| y.total_cmp(x));
    eb.sort_by(|x, y| y.total_cmp(x));
    let eigen_gap = ea
        .iter()
        .zip(&eb)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let sup = (&a.values - &b.values).amax();
    Ok(WeylGap {
        eigen_gap,
        sup_bound: 2.0 * sup,
    })
}
