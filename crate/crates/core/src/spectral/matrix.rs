use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{expi, CyclicSpectrum, DiscreteCsProcess, C64, EPS_TAIL, MAX_SERIES_TERMS};
use crate::error::{DrfError, Result};

/// How the continuous-time PSD-PC matrix is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdPcRoute {
    /// Aliased sum of the time-varying spectrum at the `M` sampling phases.
    Series,
    /// Outer-product form for PAM: `S_Ū(φ) q_{t_m}(φ) q_{t_r}(φ)*`.
    Factored,
}

#[derive(Debug, Clone)]
enum Source {
    Discrete(DiscreteCsProcess),
    Series { spec: CyclicSpectrum, kmax: i64 },
    Factored { spec: CyclicSpectrum },
}

/// `M × M` Hermitian cross-spectral matrix of the polyphase components,
/// evaluated on demand at normalized frequency `φ`.
#[derive(Debug, Clone)]
pub struct PsdPcMatrix {
    dim: usize,
    source: Source,
}

/// PSD-PC matrix of a discrete cyclostationary process.
pub fn psd_pc_matrix_discrete(proc: &DiscreteCsProcess) -> PsdPcMatrix {
    PsdPcMatrix {
        dim: proc.period(),
        source: Source::Discrete(proc.clone()),
    }
}

/// PSD-PC matrix of the samples `X(n T₀ / M)`. PAM spectra use the exact
/// factored form, everything else the truncated series.
pub fn psd_pc_matrix_continuous(spec: &CyclicSpectrum, m: usize) -> Result<PsdPcMatrix> {
    let route = match spec {
        CyclicSpectrum::Pam { .. } => PsdPcRoute::Factored,
        _ => PsdPcRoute::Series,
    };
    PsdPcMatrix::continuous(spec, m, route)
}

impl PsdPcMatrix {
    pub fn continuous(spec: &CyclicSpectrum, m: usize, route: PsdPcRoute) -> Result<Self> {
        if m == 0 {
            return Err(DrfError::invalid("M", "must be at least 1"));
        }
        let source = match route {
            PsdPcRoute::Factored => match spec {
                CyclicSpectrum::Pam { .. } => Source::Factored { spec: spec.clone() },
                _ => {
                    return Err(DrfError::invalid(
                        "route",
                        "the factored form exists only for PAM spectra",
                    ))
                }
            },
            PsdPcRoute::Series => {
                let radius = series_radius(spec)?;
                let kmax = (radius * spec.period()).ceil() as i64 + 1;
                Source::Series {
                    spec: spec.clone(),
                    kmax,
                }
            }
        };
        Ok(PsdPcMatrix { dim: m, source })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(m, r)` at `φ`.
    pub fn entry(&self, m: usize, r: usize, phi: f64) -> C64 {
        let md = self.dim as f64;
        match &self.source {
            Source::Discrete(p) => {
                let mut acc = C64::new(0.0, 0.0);
                for n in 0..self.dim {
                    let psi = (phi - n as f64) / md;
                    let phase = 2.0 * PI * (m as f64 - r as f64) * psi;
                    acc += p.tpsd(r as i64, psi) * expi(phase);
                }
                acc / md
            }
            Source::Series { spec, kmax } => {
                let t0 = spec.period();
                let tr = r as f64 * t0 / md;
                let mut acc = C64::new(0.0, 0.0);
                for k in -kmax..=*kmax {
                    let x = phi - k as f64;
                    let phase = 2.0 * PI * (m as f64 - r as f64) * x / md;
                    acc += spec.tpsd(tr, x / t0) * expi(phase);
                }
                acc / t0
            }
            Source::Factored { spec } => {
                let (qm, qr) = match spec {
                    CyclicSpectrum::Pam { pulse, period, .. } => (
                        pulse.periodized(m as f64 * period / md, phi, *period),
                        pulse.periodized(r as f64 * period / md, phi, *period),
                    ),
                    _ => unreachable!(),
                };
                qm * qr.conj() * symbol_psd(spec, phi)
            }
        }
    }

    /// The whole matrix at `φ`.
    pub fn at(&self, phi: f64) -> DMatrix<C64> {
        let n = self.dim;
        match &self.source {
            Source::Factored { spec } => {
                let CyclicSpectrum::Pam { pulse, period, .. } = spec else {
                    unreachable!()
                };
                let q: Vec<C64> = (0..n)
                    .map(|m| pulse.periodized(m as f64 * period / n as f64, phi, *period))
                    .collect();
                let s = symbol_psd(spec, phi);
                DMatrix::from_fn(n, n, |m, r| q[m] * q[r].conj() * s)
            }
            Source::Series { spec, kmax } => {
                // S^{t_r} at each alias, reused across rows
                let t0 = spec.period();
                let md = n as f64;
                let ks: Vec<f64> = (-kmax..=*kmax).map(|k| phi - k as f64).collect();
                let mut out = DMatrix::zeros(n, n);
                for r in 0..n {
                    let tr = r as f64 * t0 / md;
                    let s: Vec<C64> = ks.iter().map(|x| spec.tpsd(tr, x / t0)).collect();
                    for m in 0..n {
                        let d = m as f64 - r as f64;
                        let mut acc = C64::new(0.0, 0.0);
                        for (x, v) in ks.iter().zip(&s) {
                            if v.re != 0.0 || v.im != 0.0 {
                                acc += v * expi(2.0 * PI * d * x / md);
                            }
                        }
                        out[(m, r)] = acc / t0;
                    }
                }
                out
            }
            Source::Discrete(_) => DMatrix::from_fn(n, n, |m, r| self.entry(m, r, phi)),
        }
    }

    pub fn trace(&self, phi: f64) -> f64 {
        (0..self.dim).map(|m| self.entry(m, m, phi).re).sum()
    }

    /// Points in `[-1/2, 1/2)` where entries may have kinks or jumps.
    pub fn phi_breakpoints(&self) -> Vec<f64> {
        match &self.source {
            Source::Discrete(p) => p.phi_breakpoints(),
            Source::Series { spec, .. } | Source::Factored { spec } => spec.phi_breakpoints(),
        }
    }

    /// Average power per polyphase sample; the trace integrates to
    /// `M` times this.
    pub fn average_power(&self) -> Result<f64> {
        match &self.source {
            Source::Discrete(p) => Ok(p.average_power()),
            Source::Series { spec, .. } | Source::Factored { spec } => {
                // the samples see R(t_m, 0) at M phases, not the continuous average
                let t0 = spec.period();
                let md = self.dim as f64;
                Ok((0..self.dim)
                    .map(|m| spec.autocorrelation(m as f64 * t0 / md, 0.0))
                    .sum::<f64>()
                    / md)
            }
        }
    }
}

/// `S_Ū(φ) = (1/T₀) Σ_j S_U((φ - j)/T₀)`, spectrum of the symbols `U(n T₀)`.
fn symbol_psd(spec: &CyclicSpectrum, phi: f64) -> f64 {
    let t0 = spec.period();
    spec.symbol_spectrum(phi / t0).unwrap_or(0.0)
}

/// Frequency radius (Hz) past which the neglected aliases carry less than
/// `EPS_TAIL` of the power.
fn series_radius(spec: &CyclicSpectrum) -> Result<f64> {
    if let Some(r) = spec.tpsd_radius() {
        return Ok(r);
    }
    let CyclicSpectrum::Pam { pulse, period, .. } = spec else {
        unreachable!("only PAM with time-limited pulses is unbounded")
    };
    let required = EPS_TAIL * pulse.energy();
    let limit = MAX_SERIES_TERMS as f64 / period;
    let achieved = pulse.spectral_tail(limit);
    if achieved > required {
        return Err(DrfError::Truncation {
            achieved,
            required,
            terms: MAX_SERIES_TERMS,
        });
    }
    // bisect on the radius for the smallest admissible truncation
    let (mut lo, mut hi) = (0.0, limit);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if pulse.spectral_tail(mid) > required {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{am_cpsd, pam_cpsd, PulseShape, StationaryPsd};

    fn close(a: &DMatrix<C64>, b: &DMatrix<C64>, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn discrete_entries_match_lag_sum() {
        // entry(m, r) = Σ_k R[r, Mk + m - r] e^{-2πikφ}
        let p = DiscreteCsProcess::random_ma(3, 4, 1.0, 11).unwrap();
        let mat = psd_pc_matrix_discrete(&p);
        for phi in [-0.41, 0.0, 0.17, 0.5] {
            let fast = mat.at(phi);
            let slow = DMatrix::from_fn(3, 3, |m, r| {
                (-6i64..=6)
                    .map(|k| {
                        expi(-2.0 * PI * k as f64 * phi)
                            * p.covariance(r as i64, 3 * k + m as i64 - r as i64)
                    })
                    .sum::<C64>()
            });
            assert!(close(&fast, &slow, 1e-12), "{fast} vs {slow}");
        }
    }

    #[test]
    fn white_noise_is_scaled_identity() {
        let p = DiscreteCsProcess::alternating_white(&[2.5, 2.5, 2.5, 2.5]).unwrap();
        let mat = psd_pc_matrix_discrete(&p);
        let a = mat.at(0.31);
        let expect = DMatrix::from_diagonal_element(4, 4, C64::new(2.5, 0.0));
        assert!(close(&a, &expect, 1e-14));
    }

    #[test]
    fn alternating_variances_diagonal() {
        let p = DiscreteCsProcess::alternating_white(&[1.0, 4.0]).unwrap();
        let a = psd_pc_matrix_discrete(&p).at(-0.2);
        let expect = DMatrix::from_fn(2, 2, |m, r| {
            C64::new(if m == r { [1.0, 4.0][m] } else { 0.0 }, 0.0)
        });
        assert!(close(&a, &expect, 1e-14));
    }

    #[test]
    fn stationary_m1_is_folded_psd() {
        let psd = StationaryPsd::triangular(1.0, 2.0).unwrap();
        let spec = CyclicSpectrum::stationary(psd.clone(), 0.4).unwrap();
        let mat = psd_pc_matrix_continuous(&spec, 1).unwrap();
        for phi in [-0.3, 0.05, 0.45] {
            let folded: f64 = (-5..=5).map(|k| psd.eval((phi - k as f64) / 0.4)).sum::<f64>() / 0.4;
            assert!((mat.entry(0, 0, phi).re - folded).abs() < 1e-13);
        }
    }

    #[test]
    fn pam_routes_agree() {
        let spec = pam_cpsd(
            StationaryPsd::triangular(1.0, 0.8).unwrap(),
            PulseShape::raised_cosine(1.0, 0.4).unwrap(),
            1.0,
        )
        .unwrap();
        for m in [1, 3, 4] {
            let a = PsdPcMatrix::continuous(&spec, m, PsdPcRoute::Series).unwrap();
            let b = PsdPcMatrix::continuous(&spec, m, PsdPcRoute::Factored).unwrap();
            for phi in [-0.45, -0.1, 0.2, 0.37] {
                assert!(close(&a.at(phi), &b.at(phi), 1e-12), "M={m} phi={phi}");
                assert!((a.entry(1 % m, 0, phi) - a.at(phi)[(1 % m, 0)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn am_narrowband_rank_one_eigenvalue() {
        let base = StationaryPsd::flat(0.5, 1.0).unwrap();
        let spec = am_cpsd(base.clone(), 4.0, 0.0).unwrap();
        let mat = psd_pc_matrix_continuous(&spec, 4).unwrap();
        for phi in [-0.2, 0.1, 0.24] {
            let a = mat.at(phi);
            let tr: f64 = (0..4).map(|i| a[(i, i)].re).sum();
            assert!((tr - 4.0 * 4.0 * base.eval(4.0 * phi)).abs() < 1e-12);
            // rank one: every 2x2 minor vanishes
            let minor = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            assert!(minor.norm() < 1e-12);
        }
    }

    #[test]
    fn rectangular_series_truncation_reported() {
        let spec = pam_cpsd(
            StationaryPsd::flat(1.0, 0.4).unwrap(),
            PulseShape::rectangular(1.0).unwrap(),
            1.0,
        )
        .unwrap();
        let err = PsdPcMatrix::continuous(&spec, 2, PsdPcRoute::Series).unwrap_err();
        assert!(matches!(err, DrfError::Truncation { .. }));
        assert!(psd_pc_matrix_continuous(&spec, 2).is_ok());
    }
}
