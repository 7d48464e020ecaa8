use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{expi, StationaryPsd, C64};
use crate::error::{DrfError, Result};
use crate::grid::fold_unit;

/// Discrete-time cyclostationary Gaussian process with period `M`.
#[derive(Debug, Clone, PartialEq)]
pub enum DiscreteCsProcess {
    /// `lags[n][k] = R[n, k] = E[X[n + k] X[n]]` for `0 <= n < M`, `k >= 0`;
    /// lags not listed are zero.
    Covariance { period: usize, lags: Vec<Vec<f64>> },
    /// Stationary sequence (`M = 1`) whose spectrum, in cycles per sample, is
    /// `psd` aliased onto `[-1/2, 1/2]`.
    Stationary { psd: StationaryPsd },
}

impl DiscreteCsProcess {
    pub fn from_lags(period: usize, lags: Vec<Vec<f64>>) -> Result<Self> {
        if period == 0 {
            return Err(DrfError::invalid("period", "must be at least 1"));
        }
        if lags.len() != period {
            return Err(DrfError::invalid(
                "lags",
                format!("expected {period} rows, got {}", lags.len()),
            ));
        }
        if lags.iter().any(|row| row.is_empty() || row.iter().any(|v| !v.is_finite())) {
            return Err(DrfError::invalid("lags", "rows must be nonempty and finite"));
        }
        if lags.iter().any(|row| row[0] < 0.0) {
            return Err(DrfError::invalid("lags", "variances must be nonnegative"));
        }
        Ok(DiscreteCsProcess::Covariance { period, lags })
    }

    /// Independent samples, sample `n` having variance `variances[n mod M]`.
    pub fn alternating_white(variances: &[f64]) -> Result<Self> {
        Self::from_lags(variances.len(), variances.iter().map(|v| vec![*v]).collect())
    }

    /// `X[n] = Σ_j h_{n mod M}[j] W[n - j]` with `W` unit-variance white noise.
    pub fn periodic_ma(taps: &[Vec<f64>]) -> Result<Self> {
        let m = taps.len();
        if m == 0 {
            return Err(DrfError::invalid("taps", "need at least one phase"));
        }
        let len = taps.iter().map(Vec::len).max().unwrap_or(0);
        if len == 0 {
            return Err(DrfError::invalid("taps", "need at least one tap"));
        }
        let h = |n: usize, j: usize| taps[n % m].get(j).copied().unwrap_or(0.0);
        let lags = (0..m)
            .map(|n| {
                (0..len)
                    .map(|k| (0..len - k).map(|j| h(n + k, j + k) * h(n, j)).sum())
                    .collect()
            })
            .collect();
        Self::from_lags(m, lags)
    }

    /// Periodic moving average with `order + 1` taps per phase, seeded. The
    /// leading tap is uniform on `[0.5, 1.5]`, the others uniform on
    /// `[-tail_scale, tail_scale]`.
    pub fn random_ma(period: usize, order: usize, tail_scale: f64, seed: u64) -> Result<Self> {
        if !(tail_scale.is_finite() && tail_scale >= 0.0) {
            return Err(DrfError::invalid("tail_scale", "must be finite and nonnegative"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taps: Vec<Vec<f64>> = (0..period)
            .map(|_| {
                (0..=order)
                    .map(|j| {
                        if j == 0 {
                            rng.gen_range(0.5..1.5)
                        } else {
                            tail_scale * rng.gen_range(-1.0..1.0)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::periodic_ma(&taps)
    }

    pub fn stationary(psd: StationaryPsd) -> Self {
        DiscreteCsProcess::Stationary { psd }
    }

    /// `M`.
    pub fn period(&self) -> usize {
        match self {
            DiscreteCsProcess::Covariance { period, .. } => *period,
            DiscreteCsProcess::Stationary { .. } => 1,
        }
    }

    /// Largest lag with a nonzero covariance, `None` for unbounded memory.
    pub fn max_lag(&self) -> Option<usize> {
        match self {
            DiscreteCsProcess::Covariance { lags, .. } => {
                Some(lags.iter().map(Vec::len).max().unwrap_or(1) - 1)
            }
            DiscreteCsProcess::Stationary { .. } => None,
        }
    }

    /// `R[n, k] = E[X[n + k] X[n]]` for any integers `n`, `k`.
    pub fn covariance(&self, n: i64, k: i64) -> f64 {
        match self {
            DiscreteCsProcess::Covariance { period, lags } => {
                let m = *period as i64;
                // R[n, -k] = R[n - k, k]
                let (n, k) = if k < 0 { (n + k, -k) } else { (n, k) };
                let row = &lags[n.rem_euclid(m) as usize];
                row.get(k as usize).copied().unwrap_or(0.0)
            }
            DiscreteCsProcess::Stationary { psd } => psd.autocorrelation(k as f64),
        }
    }

    /// Time-varying spectrum `Sⁿ(e^{2πiφ}) = Σ_k R[n, k] e^{-2πiφk}`.
    pub fn tpsd(&self, n: i64, phi: f64) -> C64 {
        match self {
            DiscreteCsProcess::Covariance { .. } => {
                let kmax = self.max_lag().unwrap() as i64;
                (-kmax..=kmax)
                    .map(|k| expi(-2.0 * PI * phi * k as f64) * self.covariance(n, k))
                    .sum()
            }
            DiscreteCsProcess::Stationary { psd } => {
                let phi = fold_unit(phi);
                let r = psd.effective_radius();
                let kmax = (r + 0.5).ceil() as i64;
                C64::new((-kmax..=kmax).map(|k| psd.eval(phi - k as f64)).sum(), 0.0)
            }
        }
    }

    /// Kinks of the spectrum in `φ`, folded to `[-1/2, 1/2)`.
    pub fn phi_breakpoints(&self) -> Vec<f64> {
        match self {
            DiscreteCsProcess::Covariance { .. } => vec![],
            DiscreteCsProcess::Stationary { psd } => {
                let mut v: Vec<f64> = psd.breakpoints().iter().map(|b| fold_unit(*b)).collect();
                v.sort_by(f64::total_cmp);
                v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
                v
            }
        }
    }

    /// `σ² = (1/M) Σ_n R[n, 0]`.
    pub fn average_power(&self) -> f64 {
        match self {
            DiscreteCsProcess::Covariance { period, lags } => {
                lags.iter().map(|row| row[0]).sum::<f64>() / *period as f64
            }
            DiscreteCsProcess::Stationary { psd } => psd.total_power(),
        }
    }
}
