//! Parametric reverse waterfilling over a field of eigenvalues.
//!
//! Rates are accumulated in nats and reported in bits. Eigenvalues are sorted
//! ascending, though nothing here depends on the order.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{DrfError, Result};
use crate::grid::{QuadratureGrid, DEFAULT_PHI_CELLS};
use crate::rate::BitsPerSecond;
use crate::spectral::{PsdPcMatrix, StationaryPsd, C64, EPS_PSD};

/// Relative tolerance on the rate returned by [`solve_water_level`].
pub const EPS_RATE: f64 = 1e-9;

const BISECTION_DEPTH: i32 = 120;
const MAX_BISECTIONS: usize = 200;

/// One point of a distortion-rate curve. `rate` is in bits per symbol or per
/// second depending on the normalizer that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateDistortionPoint {
    pub theta: f64,
    pub rate: f64,
    pub distortion: f64,
}

/// Diagnostics attached to a curve.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveMeta {
    pub dim: usize,
    pub grid_cells: usize,
    pub converged: bool,
}

/// Points sorted by rate.
#[derive(Debug, Clone, PartialEq)]
pub struct DrfCurve {
    pub points: Vec<RateDistortionPoint>,
    pub meta: CurveMeta,
}

impl DrfCurve {
    pub fn new(mut points: Vec<RateDistortionPoint>, meta: CurveMeta) -> Self {
        points.sort_by(|a, b| a.rate.total_cmp(&b.rate));
        DrfCurve { points, meta }
    }

    /// Distortion never increases with rate.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].distortion <= w[0].distortion + tol)
    }

    /// Slopes between consecutive points never decrease.
    pub fn is_convex(&self, tol: f64) -> bool {
        let slope = |a: &RateDistortionPoint, b: &RateDistortionPoint| {
            (b.distortion - a.distortion) / (b.rate - a.rate)
        };
        self.points
            .windows(3)
            .all(|w| slope(&w[1], &w[2]) >= slope(&w[0], &w[1]) - tol)
    }
}

/// Multiplier applied to `Σ_m ∫ log⁺(λ_m / θ)` to obtain a rate in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateNormalizer(pub f64);

impl RateNormalizer {
    /// `1 / (2M)`: bits per source symbol.
    pub fn per_symbol(dim: usize) -> Self {
        RateNormalizer(0.5 / dim as f64)
    }

    /// `1 / (2 T₀)`: bits per second.
    pub fn per_second(period: f64) -> Self {
        RateNormalizer(0.5 / period)
    }
}

/// Sorted eigenvalues at every node of a quadrature grid. Distortion is
/// `(1/M) Σ_m ∫ min(λ_m, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenField {
    dim: usize,
    grid: QuadratureGrid,
    eigs: Vec<Vec<f64>>,
}

impl EigenField {
    /// Eigenvalues of `matrix` at every node of `grid`, computed in parallel.
    pub fn from_matrix(matrix: &PsdPcMatrix, grid: QuadratureGrid) -> Result<Self> {
        let eigs = grid
            .nodes()
            .par_iter()
            .map(|&phi| hermitian_eigenvalues(matrix, phi))
            .collect::<Result<Vec<_>>>()?;
        Ok(EigenField {
            dim: matrix.dim(),
            grid,
            eigs,
        })
    }

    /// One scalar spectrum sampled on `grid`.
    pub fn scalar(grid: QuadratureGrid, values: Vec<f64>) -> Result<Self> {
        Self::from_values(1, grid, values.into_iter().map(|v| vec![v]).collect())
    }

    pub fn from_values(dim: usize, grid: QuadratureGrid, mut eigs: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(DrfError::invalid("dim", "must be at least 1"));
        }
        if eigs.len() != grid.len() || eigs.iter().any(|e| e.len() != dim) {
            return Err(DrfError::invalid("eigs", "one list of `dim` values per grid node"));
        }
        for e in &mut eigs {
            if e.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(DrfError::invalid("eigs", "values must be finite and nonnegative"));
            }
            e.sort_by(f64::total_cmp);
        }
        Ok(EigenField { dim, grid, eigs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    /// Ascending eigenvalues at each grid node.
    pub fn eigs(&self) -> &[Vec<f64>] {
        &self.eigs
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigs
            .iter()
            .filter_map(|e| e.last().copied())
            .fold(0.0, f64::max)
    }

    /// `(1/M) Σ_m ∫ λ_m`, the distortion at zero rate.
    pub fn power(&self) -> f64 {
        let s: f64 = self
            .grid
            .weights()
            .iter()
            .zip(&self.eigs)
            .map(|(w, e)| w * e.iter().sum::<f64>())
            .sum();
        s / self.dim as f64
    }
}

/// Ascending eigenvalues of the PSD-PC matrix at `φ`.
pub fn hermitian_eigenvalues(matrix: &PsdPcMatrix, phi: f64) -> Result<Vec<f64>> {
    hermitian_matrix_eigenvalues(&matrix.at(phi), phi)
}

/// Ascending eigenvalues of a Hermitian positive semidefinite matrix after
/// symmetrizing. Negative values within `EPS_PSD` of the trace are clamped.
pub fn hermitian_matrix_eigenvalues(a: &DMatrix<C64>, phi: f64) -> Result<Vec<f64>> {
    let n = a.nrows();
    let trace: f64 = (0..n).map(|i| a[(i, i)].re).sum();
    let mut eigs = if n == 1 {
        vec![a[(0, 0)].re]
    } else {
        let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
        let norm = sym.norm();
        let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 10_000).ok_or(
            DrfError::EigenSolver {
                phi,
                dim: n,
                norm,
            },
        )?;
        eig.eigenvalues.iter().copied().collect()
    };
    clamp_nonnegative(&mut eigs, trace.abs())?;
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

pub(crate) fn clamp_nonnegative(eigs: &mut [f64], scale: f64) -> Result<()> {
    let tolerance = EPS_PSD * scale;
    for v in eigs.iter_mut() {
        if !v.is_finite() {
            return Err(DrfError::NotPositiveSemidefinite {
                value: *v,
                tolerance,
            });
        }
        if *v < 0.0 {
            if *v < -tolerance {
                return Err(DrfError::NotPositiveSemidefinite {
                    value: *v,
                    tolerance,
                });
            }
            *v = 0.0;
        }
    }
    Ok(())
}

/// Distortion and rate (bits) at water level `theta`.
pub fn waterfill_eval(eigs: &EigenField, theta: f64, rate_normalizer: RateNormalizer) -> RateDistortionPoint {
    let mut d = 0.0;
    let mut r = 0.0;
    let mut unbounded = false;
    for (w, e) in eigs.grid.weights().iter().zip(&eigs.eigs) {
        let mut dn = 0.0;
        let mut rn = 0.0;
        for &l in e {
            if l > theta {
                dn += theta;
                if theta > 0.0 {
                    rn += (l / theta).ln();
                } else {
                    unbounded = true;
                }
            } else {
                dn += l;
            }
        }
        d += w * dn;
        r += w * rn;
    }
    let rate = if unbounded {
        f64::INFINITY
    } else {
        rate_normalizer.0 * r / LN_2
    };
    RateDistortionPoint {
        theta,
        rate,
        distortion: d / eigs.dim as f64,
    }
}

/// Water level whose rate equals `target_rate` (bits), by bisection in
/// `log θ` on `[λ_max 2^-120, λ_max]`.
pub fn solve_water_level(
    eigs: &EigenField,
    target_rate: f64,
    rate_normalizer: RateNormalizer,
) -> Result<RateDistortionPoint> {
    if !(target_rate.is_finite() && target_rate >= 0.0) {
        return Err(DrfError::invalid(
            "target_rate",
            format!("must be finite and nonnegative, got {target_rate}"),
        ));
    }
    let lmax = eigs.lambda_max();
    if lmax == 0.0 {
        // the zero process is reproduced exactly at any rate
        return Ok(RateDistortionPoint {
            theta: 0.0,
            rate: 0.0,
            distortion: 0.0,
        });
    }
    if target_rate == 0.0 {
        return Ok(waterfill_eval(eigs, lmax, rate_normalizer));
    }
    let mut lo = lmax * 2f64.powi(-BISECTION_DEPTH);
    let mut hi = lmax;
    let mut at_lo = waterfill_eval(eigs, lo, rate_normalizer);
    // very high rates on narrow bands need more depth than the default
    // bracket; widen it while the water level stays a normal float
    while at_lo.rate < target_rate {
        let next = lo * 2f64.powi(-BISECTION_DEPTH);
        if !next.is_normal() {
            return Err(DrfError::RateUnreachable {
                target: target_rate,
                theta: lo,
            });
        }
        hi = lo;
        lo = next;
        at_lo = waterfill_eval(eigs, lo, rate_normalizer);
    }
    let tol = EPS_RATE.max(EPS_RATE * target_rate);
    let mut best = at_lo;
    for _ in 0..MAX_BISECTIONS {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            break;
        }
        let p = waterfill_eval(eigs, mid, rate_normalizer);
        if (p.rate - target_rate).abs() < (best.rate - target_rate).abs() {
            best = p;
        }
        if p.rate > target_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best.rate - target_rate).abs() > tol {
        return Err(DrfError::RateUnreachable {
            target: target_rate,
            theta: best.theta,
        });
    }
    Ok(best)
}

/// Grid over the support of `psd` in Hz, aligned to its breakpoints.
pub fn stationary_grid(psd: &StationaryPsd, cells: usize) -> QuadratureGrid {
    let r = psd.effective_radius().max(f64::MIN_POSITIVE);
    QuadratureGrid::aligned(-r, r, cells, &psd.breakpoints())
}

/// Pinsker reverse waterfilling of a stationary spectrum:
/// `D = ∫ min(S, θ) df`, `R = ½ ∫ log⁺(S/θ) df`.
pub fn stationary_drf(psd: &StationaryPsd, target_rate: BitsPerSecond) -> Result<RateDistortionPoint> {
    stationary_drf_on(psd, target_rate, DEFAULT_PHI_CELLS)
}

pub fn stationary_drf_on(
    psd: &StationaryPsd,
    target_rate: BitsPerSecond,
    cells: usize,
) -> Result<RateDistortionPoint> {
    let grid = stationary_grid(psd, cells);
    let values = grid.nodes().iter().map(|&f| psd.eval(f)).collect();
    let field = EigenField::scalar(grid, values)?;
    solve_water_level(&field, target_rate.value(), RateNormalizer(0.5))
}
