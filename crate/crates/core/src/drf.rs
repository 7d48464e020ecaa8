//! Distortion-rate functions assembled from the spectral models and the
//! waterfilling engine, plus polyphase lower bounds and the distortion of
//! combined sampling and source coding.

use rayon::prelude::*;

use crate::error::{DrfError, Result};
use crate::grid::{fold_unit, phi_grid, QuadratureGrid, DEFAULT_PHI_CELLS};
use crate::rate::{BitsPerSecond, BitsPerSymbol};
use crate::spectral::{
    am_cpsd, pam_cpsd, psd_pc_matrix_continuous, psd_pc_matrix_discrete, CyclicSpectrum,
    DiscreteCsProcess, PulseShape, StationaryPsd,
};
use crate::waterfill::{
    solve_water_level, stationary_drf_on, stationary_grid, EigenField, RateDistortionPoint,
    RateNormalizer,
};

/// Default number of sampling phases for the continuous lower bound.
pub const DEFAULT_T_CELLS: usize = 64;

/// Distortion-rate function of a discrete cyclostationary process at
/// `target_rate` bits per source symbol.
pub fn drf_cs_discrete(proc: &DiscreteCsProcess, target_rate: BitsPerSymbol) -> Result<RateDistortionPoint> {
    drf_cs_discrete_on(proc, target_rate, DEFAULT_PHI_CELLS)
}

pub fn drf_cs_discrete_on(
    proc: &DiscreteCsProcess,
    target_rate: BitsPerSymbol,
    cells: usize,
) -> Result<RateDistortionPoint> {
    let field = discrete_eigen_field(proc, cells)?;
    solve_water_level(&field, target_rate.value(), RateNormalizer::per_symbol(proc.period()))
}

/// Eigenvalues of the PSD-PC matrix of `proc` on a `cells`-point grid.
pub fn discrete_eigen_field(proc: &DiscreteCsProcess, cells: usize) -> Result<EigenField> {
    let matrix = psd_pc_matrix_discrete(proc);
    let grid = phi_grid(cells, &matrix.phi_breakpoints());
    EigenField::from_matrix(&matrix, grid)
}

/// Settings of the `M` sweep used for continuous-time sources.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousDrfConfig {
    pub m_start: usize,
    pub m_max: usize,
    /// Lipschitz constant of `R(t, ·)`; estimated when `None`.
    pub lipschitz_c: Option<f64>,
    /// Stop once `|D_{2M} - D_M| <= convergence_tol * σ²`.
    pub convergence_tol: f64,
    pub phi_cells: usize,
}

impl Default for ContinuousDrfConfig {
    fn default() -> Self {
        ContinuousDrfConfig {
            m_start: 4,
            m_max: 64,
            lipschitz_c: None,
            convergence_tol: 1e-6,
            phi_cells: DEFAULT_PHI_CELLS,
        }
    }
}

impl ContinuousDrfConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_start == 0 || !self.m_start.is_power_of_two() {
            return Err(DrfError::invalid("m_start", "must be a positive power of two"));
        }
        if self.m_max < self.m_start || !self.m_max.is_power_of_two() {
            return Err(DrfError::invalid("m_max", "must be a power of two no smaller than m_start"));
        }
        if let Some(c) = self.lipschitz_c {
            if !(c.is_finite() && c >= 0.0) {
                return Err(DrfError::invalid("lipschitz_c", "must be finite and nonnegative"));
            }
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol > 0.0) {
            return Err(DrfError::invalid("convergence_tol", "must be positive"));
        }
        if self.phi_cells == 0 {
            return Err(DrfError::invalid("phi_cells", "must be positive"));
        }
        Ok(())
    }
}

/// Result of an `M` sweep at one rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousDrfReport {
    /// The value at the last `M` visited.
    pub point: RateDistortionPoint,
    pub m: usize,
    /// `(M, D_M)` for every `M` visited.
    pub iterates: Vec<(usize, RateDistortionPoint)>,
    /// `|D_{2M} - D_M|` between consecutive iterates.
    pub cauchy_gaps: Vec<f64>,
    pub converged: bool,
    /// Lipschitz constant used for the eigenvalue perturbation bound.
    pub lipschitz_c: f64,
    /// `4 C T₀ / M` at the final `M`; a per-eigenvalue diagnostic, not the
    /// stopping rule.
    pub weyl_bound: f64,
}

/// Distortion-rate function of a continuous-time cyclostationary process at
/// `target_rate` bits per second.
pub fn drf_cs_continuous(
    spec: &CyclicSpectrum,
    target_rate: BitsPerSecond,
    cfg: &ContinuousDrfConfig,
) -> Result<ContinuousDrfReport> {
    Ok(drf_cs_continuous_curve(spec, &[target_rate], cfg)?.remove(0))
}

/// [`drf_cs_continuous`] at several rates, sharing the eigenvalue fields.
pub fn drf_cs_continuous_curve(
    spec: &CyclicSpectrum,
    rates: &[BitsPerSecond],
    cfg: &ContinuousDrfConfig,
) -> Result<Vec<ContinuousDrfReport>> {
    cfg.validate()?;
    let sigma2 = spec.average_power()?;
    let t0 = spec.period();
    let c = match cfg.lipschitz_c {
        Some(c) => c,
        None => estimate_lipschitz(spec),
    };
    let norm = RateNormalizer::per_second(t0);
    let mut iterates: Vec<Vec<(usize, RateDistortionPoint)>> = vec![Vec::new(); rates.len()];
    let mut m = cfg.m_start;
    loop {
        let field = continuous_eigen_field(spec, m, cfg.phi_cells)?;
        for (it, rate) in iterates.iter_mut().zip(rates) {
            it.push((m, solve_water_level(&field, rate.value(), norm)?));
        }
        let done = iterates.iter().all(|it| last_gap(it).is_some_and(|g| g <= cfg.convergence_tol * sigma2));
        if done || m >= cfg.m_max {
            break;
        }
        m *= 2;
    }
    Ok(iterates
        .into_iter()
        .map(|it| {
            let cauchy_gaps: Vec<f64> = it
                .windows(2)
                .map(|w| (w[1].1.distortion - w[0].1.distortion).abs())
                .collect();
            let converged = last_gap(&it).is_some_and(|g| g <= cfg.convergence_tol * sigma2);
            let (m, point) = *it.last().unwrap();
            ContinuousDrfReport {
                point,
                m,
                iterates: it,
                cauchy_gaps,
                converged,
                lipschitz_c: c,
                weyl_bound: 4.0 * c * t0 / m as f64,
            }
        })
        .collect())
}

fn last_gap(it: &[(usize, RateDistortionPoint)]) -> Option<f64> {
    match it {
        [.., a, b] => Some((b.1.distortion - a.1.distortion).abs()),
        _ => None,
    }
}

/// Eigenvalues of the `M × M` PSD-PC matrix of the samples `X(n T₀ / M)`.
pub fn continuous_eigen_field(spec: &CyclicSpectrum, m: usize, cells: usize) -> Result<EigenField> {
    let matrix = psd_pc_matrix_continuous(spec, m)?;
    let grid = phi_grid(cells, &matrix.phi_breakpoints());
    EigenField::from_matrix(&matrix, grid)
}

/// Largest finite-difference slope of `τ ↦ R(t, τ)` over `τ ∈ [-T₀, T₀]`
/// (256 steps) at eight phases `t`.
pub fn estimate_lipschitz(spec: &CyclicSpectrum) -> f64 {
    let t0 = spec.period();
    let steps = 256;
    let h = 2.0 * t0 / steps as f64;
    (0..8)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * t0 / 8.0;
            let vals: Vec<f64> = (0..=steps)
                .map(|j| spec.autocorrelation(t, -t0 + j as f64 * h))
                .collect();
            vals.windows(2)
                .map(|w| (w[1] - w[0]).abs() / h)
                .fold(0.0, f64::max)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max)
}

/// `S̃(f) = S_Ū(f T₀) Σ_k |P(f - k/T₀)|²`, with `S_Ū(f T₀)` the symbol
/// spectrum `(1/T₀) Σ_j S_U(f - j/T₀)`.
pub fn pam_weighted_spectrum(base: &StationaryPsd, pulse: &PulseShape, period: f64, f: f64) -> f64 {
    let sa: f64 = {
        let r = base.effective_radius();
        let jmin = ((f - r) * period).floor() as i64;
        let jmax = ((f + r) * period).ceil() as i64;
        (jmin..=jmax).map(|j| base.eval(f - j as f64 / period)).sum::<f64>() / period
    };
    if sa == 0.0 {
        return 0.0;
    }
    sa * pulse.aliased_energy(f, period)
}

/// Distortion-rate function of `Σ_n U(n T₀) p(t - n T₀)`:
/// `D = (1/T₀) ∫ min(S̃, θ) df`, `R = ½ ∫ log⁺(S̃/θ) df` over
/// `|f| < 1/(2T₀)`.
pub fn drf_pam(
    base: &StationaryPsd,
    pulse: &PulseShape,
    period: f64,
    target_rate: BitsPerSecond,
) -> Result<RateDistortionPoint> {
    drf_pam_on(base, pulse, period, target_rate, DEFAULT_PHI_CELLS)
}

pub fn drf_pam_on(
    base: &StationaryPsd,
    pulse: &PulseShape,
    period: f64,
    target_rate: BitsPerSecond,
    cells: usize,
) -> Result<RateDistortionPoint> {
    let spec = pam_cpsd(base.clone(), pulse.clone(), period)?;
    // same nodes as the PSD-PC matrix grid, mapped to Hz
    let grid = phi_grid(cells, &spec.phi_breakpoints()).scaled(1.0 / period);
    // (1/T₀) min(S̃, θ) = min(S̃/T₀, θ/T₀): waterfill S̃/T₀ directly
    let values: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&f| pam_weighted_spectrum(base, pulse, period, f) / period)
        .collect();
    let field = EigenField::scalar(grid, values)?;
    solve_water_level(&field, target_rate.value(), RateNormalizer(0.5))
}

/// How [`drf_am`] obtained its value.
#[derive(Debug, Clone, PartialEq)]
pub enum AmMethod {
    /// `f₀ > 2 f_B`: the baseband DRF, exactly.
    Narrowband,
    /// The `M` sweep on the modulated spectrum.
    Numeric(ContinuousDrfReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmDrf {
    pub point: RateDistortionPoint,
    pub method: AmMethod,
}

impl AmDrf {
    pub fn is_exact(&self) -> bool {
        matches!(self.method, AmMethod::Narrowband)
    }

    pub fn converged(&self) -> bool {
        match &self.method {
            AmMethod::Narrowband => true,
            AmMethod::Numeric(r) => r.converged,
        }
    }
}

/// Distortion-rate function of `√2 U(t) cos(2π f₀ t)`.
pub fn drf_am(
    base: &StationaryPsd,
    f0: f64,
    target_rate: BitsPerSecond,
    cfg: &ContinuousDrfConfig,
) -> Result<AmDrf> {
    Ok(drf_am_curve(base, f0, &[target_rate], cfg)?.remove(0))
}

pub fn drf_am_curve(
    base: &StationaryPsd,
    f0: f64,
    rates: &[BitsPerSecond],
    cfg: &ContinuousDrfConfig,
) -> Result<Vec<AmDrf>> {
    let fb = base
        .support_radius()
        .ok_or_else(|| DrfError::invalid("base", "amplitude modulation needs a band-limited base spectrum"))?;
    let spec = am_cpsd(base.clone(), f0, 0.0)?;
    if f0 > 2.0 * fb {
        rates
            .iter()
            .map(|&r| {
                Ok(AmDrf {
                    point: stationary_drf_on(base, r, cfg.phi_cells)?,
                    method: AmMethod::Narrowband,
                })
            })
            .collect()
    } else {
        Ok(drf_cs_continuous_curve(&spec, rates, cfg)?
            .into_iter()
            .map(|r| AmDrf {
                point: r.point,
                method: AmMethod::Numeric(r),
            })
            .collect())
    }
}

/// The same process with a carrier phase uniform on `[0, 2π)` independent of
/// `U`. Asynchronous block codes achieve the DRF of the synchronous process,
/// so this is [`drf_am`] unchanged.
pub fn drf_am_random_phase(
    base: &StationaryPsd,
    f0: f64,
    target_rate: BitsPerSecond,
    cfg: &ContinuousDrfConfig,
) -> Result<AmDrf> {
    drf_am(base, f0, target_rate, cfg)
}

/// DRF of the stationary Gaussian process with the phase-averaged spectrum
/// `½ (S_U(f + f₀) + S_U(f - f₀))`, an upper bound on the AM DRF.
pub fn am_gaussian_upper_bound(
    base: &StationaryPsd,
    f0: f64,
    target_rate: BitsPerSecond,
    cells: usize,
) -> Result<RateDistortionPoint> {
    let spec = am_cpsd(base.clone(), f0, 0.0)?;
    let r = spec.tpsd_radius().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let bps: Vec<f64> = base
        .breakpoints()
        .iter()
        .flat_map(|b| [b + f0, b - f0])
        .collect();
    let grid = QuadratureGrid::aligned(-r, r, cells, &bps);
    let values = grid.nodes().iter().map(|&f| spec.cpsd(0, f).re).collect();
    let field = EigenField::scalar(grid, values)?;
    solve_water_level(&field, target_rate.value(), RateNormalizer(0.5))
}

/// Lower bound on the DRF of a discrete process: every polyphase component
/// is coded on its own with the whole code, `M R̄` bits per component symbol.
pub fn lower_bound_discrete(proc: &DiscreteCsProcess, target_rate: BitsPerSymbol) -> Result<f64> {
    lower_bound_discrete_on(proc, target_rate, DEFAULT_PHI_CELLS)
}

pub fn lower_bound_discrete_on(
    proc: &DiscreteCsProcess,
    target_rate: BitsPerSymbol,
    cells: usize,
) -> Result<f64> {
    let matrix = psd_pc_matrix_discrete(proc);
    let grid = phi_grid(cells, &matrix.phi_breakpoints());
    let m = proc.period();
    let per_component = target_rate.value() * m as f64;
    let mut total = 0.0;
    for c in 0..m {
        let values = grid
            .nodes()
            .iter()
            .map(|&phi| matrix.entry(c, c, phi).re.max(0.0))
            .collect();
        let field = EigenField::scalar(grid.clone(), values)?;
        total += solve_water_level(&field, per_component, RateNormalizer(0.5))?.distortion;
    }
    Ok(total / m as f64)
}

/// Lower bound on the DRF of a continuous-time process: the sampled sequence
/// `X(n T₀ + t)` coded with the whole code (`R T₀` bits per sample), averaged
/// over `t ∈ [0, T₀)`.
pub fn lower_bound_continuous(spec: &CyclicSpectrum, target_rate: BitsPerSecond) -> Result<f64> {
    lower_bound_continuous_on(spec, target_rate, DEFAULT_T_CELLS, DEFAULT_PHI_CELLS)
}

pub fn lower_bound_continuous_on(
    spec: &CyclicSpectrum,
    target_rate: BitsPerSecond,
    t_cells: usize,
    phi_cells: usize,
) -> Result<f64> {
    if t_cells == 0 {
        return Err(DrfError::invalid("t_cells", "must be positive"));
    }
    let t0 = spec.period();
    let per_sample = target_rate.value() * t0;
    let grid = phi_grid(phi_cells, &spec.phi_breakpoints());
    let kmax = spec.tpsd_radius().map(|r| (r * t0).ceil() as i64 + 1);
    let phases = QuadratureGrid::uniform(0.0, t0, t_cells);
    let parts = phases
        .nodes()
        .par_iter()
        .map(|&t| {
            let values = grid
                .nodes()
                .iter()
                .map(|&phi| polyphase_psd(spec, t, phi, kmax).max(0.0))
                .collect();
            let field = EigenField::scalar(grid.clone(), values)?;
            Ok(solve_water_level(&field, per_sample, RateNormalizer(0.5))?.distortion)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(phases
        .weights()
        .iter()
        .zip(&parts)
        .map(|(w, d)| w * d)
        .sum::<f64>()
        / t0)
}

/// Spectrum of the sampled sequence `X(n T₀ + t)`:
/// `(1/T₀) Σ_k S^t((φ - k)/T₀)`.
fn polyphase_psd(spec: &CyclicSpectrum, t: f64, phi: f64, kmax: Option<i64>) -> f64 {
    match (spec, kmax) {
        (CyclicSpectrum::Pam { pulse, period, .. }, _) => {
            let q = pulse.periodized(t, phi, *period);
            spec.symbol_spectrum(phi / period).unwrap_or(0.0) * q.norm_sqr()
        }
        (_, Some(k)) => {
            let t0 = spec.period();
            (-k..=k)
                .map(|j| spec.tpsd(t, (phi - j as f64) / t0).re)
                .sum::<f64>()
                / t0
        }
        _ => unreachable!("non-PAM spectra have a finite radius"),
    }
}

/// MMSE reconstruction of `U` from its samples at rate `fs`.
#[derive(Debug, Clone, PartialEq)]
pub struct MmseFilter {
    base: StationaryPsd,
    fs: f64,
    mmse: f64,
    grid: QuadratureGrid,
}

impl MmseFilter {
    pub fn fs(&self) -> f64 {
        self.fs
    }

    /// `E (U(t) - Û(t))²`, averaged over time.
    pub fn mmse(&self) -> f64 {
        self.mmse
    }

    /// `W(f) = S_U(f) / Σ_k S_U(f - k fs)`, zero where the sum vanishes.
    pub fn response(&self, f: f64) -> f64 {
        let den = self.aliased(f);
        if den > 0.0 {
            self.base.eval(f) / den
        } else {
            0.0
        }
    }

    /// Spectrum of the estimate folded onto `(-fs/2, fs/2)`:
    /// `J(f) = Σ_k S_U(f - k fs)² / Σ_k S_U(f - k fs)`.
    pub fn folded_j(&self, f: f64) -> f64 {
        let (sum, sq) = self.alias_sums(f);
        if sum > 0.0 {
            sq / sum
        } else {
            0.0
        }
    }

    /// Grid over the band where `J` lives.
    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    fn aliased(&self, f: f64) -> f64 {
        self.alias_sums(f).0
    }

    fn alias_sums(&self, f: f64) -> (f64, f64) {
        let r = self.base.effective_radius();
        let kmin = ((f - r) / self.fs).floor() as i64;
        let kmax = ((f + r) / self.fs).ceil() as i64;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for k in kmin..=kmax {
            let v = self.base.eval(f - k as f64 * self.fs);
            sum += v;
            sq += v * v;
        }
        (sum, sq)
    }
}

/// Wiener filter for reconstructing `U` from `U(n / fs)`.
pub fn mmse_filter(base: &StationaryPsd, fs: f64) -> Result<MmseFilter> {
    mmse_filter_on(base, fs, DEFAULT_PHI_CELLS)
}

pub fn mmse_filter_on(base: &StationaryPsd, fs: f64, cells: usize) -> Result<MmseFilter> {
    if !(fs.is_finite() && fs > 0.0) {
        return Err(DrfError::invalid("fs", format!("must be positive, got {fs}")));
    }
    let radius = base.effective_radius();
    let grid = if radius < 0.5 * fs {
        // no aliasing: integrate over the support as the stationary DRF does
        stationary_grid(base, cells)
    } else {
        let bps: Vec<f64> = base
            .breakpoints()
            .iter()
            .map(|b| fs * fold_unit(b / fs))
            .collect();
        QuadratureGrid::aligned(-0.5 * fs, 0.5 * fs, cells, &bps)
    };
    let mut filter = MmseFilter {
        base: base.clone(),
        fs,
        mmse: 0.0,
        grid,
    };
    // pointwise Σ S_k - Σ S_k² / Σ S_k, exactly zero where bands do not overlap
    filter.mmse = filter.grid.integrate(|f| {
        let (sum, sq) = filter.alias_sums(f);
        if sum > 0.0 {
            sum - sq / sum
        } else {
            0.0
        }
    });
    Ok(filter)
}

/// Distortion split of [`sampled_source_coding`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledCoding {
    pub mmse: f64,
    /// Waterfilling of `J` at the target rate.
    pub coding: RateDistortionPoint,
}

impl SampledCoding {
    pub fn distortion(&self) -> f64 {
        self.mmse + self.coding.distortion
    }
}

/// Minimal distortion when `U` is sampled at `fs` and the samples are
/// encoded at `target_rate`: the MMSE of the sampler plus the waterfilled
/// spectrum `J` of the estimate.
pub fn sampled_source_coding(
    base: &StationaryPsd,
    fs: f64,
    target_rate: BitsPerSecond,
) -> Result<SampledCoding> {
    sampled_source_coding_on(base, fs, target_rate, DEFAULT_PHI_CELLS)
}

pub fn sampled_source_coding_on(
    base: &StationaryPsd,
    fs: f64,
    target_rate: BitsPerSecond,
    cells: usize,
) -> Result<SampledCoding> {
    let filter = mmse_filter_on(base, fs, cells)?;
    let values = filter
        .grid
        .nodes()
        .iter()
        .map(|&f| filter.folded_j(f))
        .collect();
    let field = EigenField::scalar(filter.grid.clone(), values)?;
    let coding = solve_water_level(&field, target_rate.value(), RateNormalizer(0.5))?;
    Ok(SampledCoding {
        mmse: filter.mmse,
        coding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waterfill::stationary_drf;

    #[test]
    fn alternating_hand_value() {
        let p = DiscreteCsProcess::alternating_white(&[1.0, 4.0]).unwrap();
        let d = drf_cs_discrete(&p, BitsPerSymbol(0.5)).unwrap();
        assert!((d.distortion - 1.0).abs() < 1e-9);
        let z = drf_cs_discrete(&p, BitsPerSymbol(0.0)).unwrap();
        assert!((z.distortion - 2.5).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_sandwich_alternating() {
        let p = DiscreteCsProcess::alternating_white(&[1.0, 4.0]).unwrap();
        let lb = lower_bound_discrete(&p, BitsPerSymbol(0.5)).unwrap();
        assert!((lb - 0.625).abs() < 1e-9);
        assert!(lb <= drf_cs_discrete(&p, BitsPerSymbol(0.5)).unwrap().distortion);
        assert!((lower_bound_discrete(&p, BitsPerSymbol(0.0)).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn pam_zero_pulse_is_lossless() {
        let base = StationaryPsd::flat(1.0, 0.4).unwrap();
        let pulse = PulseShape::rectangular(1.0).unwrap().with_gain(0.0);
        for r in [0.0, 1.0, 5.0] {
            assert_eq!(drf_pam(&base, &pulse, 1.0, BitsPerSecond(r)).unwrap().distortion, 0.0);
        }
    }

    #[test]
    fn pam_with_ideal_interpolator_is_baseband() {
        // P = T₀ on the Nyquist band reproduces U exactly
        let t0 = 0.5;
        let base = StationaryPsd::triangular(1.0, 0.9).unwrap();
        let pulse = PulseShape::flat_band(1.0 / (2.0 * t0)).unwrap().with_gain(t0);
        for r in [0.5, 2.0] {
            let a = drf_pam(&base, &pulse, t0, BitsPerSecond(r)).unwrap().distortion;
            let b = stationary_drf(&base, BitsPerSecond(r)).unwrap().distortion;
            assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn am_narrowband_is_exact_label() {
        let base = StationaryPsd::flat(0.5, 1.0).unwrap();
        let cfg = ContinuousDrfConfig::default();
        let a = drf_am(&base, 4.0, BitsPerSecond(1.0), &cfg).unwrap();
        assert!(a.is_exact());
        assert!((a.point.distortion - 0.5).abs() < 1e-9);
        assert!(drf_am(&StationaryPsd::gaussian(1.0, 1.0).unwrap(), 4.0, BitsPerSecond(1.0), &cfg).is_err());
    }

    #[test]
    fn mmse_flat_overlap() {
        let base = StationaryPsd::flat(0.5, 1.0).unwrap();
        let f = mmse_filter(&base, 1.0).unwrap();
        assert!((f.mmse() - 0.5).abs() < 1e-12);
        assert!((f.response(0.2) - 0.5).abs() < 1e-15);
        assert!((f.folded_j(0.2) - 0.5).abs() < 1e-15);
        let nyq = mmse_filter(&base, 2.5).unwrap();
        assert_eq!(nyq.mmse(), 0.0);
        assert_eq!(nyq.response(0.7), 1.0);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ContinuousDrfConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.m_start = 3;
        assert!(cfg.validate().is_err());
        cfg.m_start = 8;
        cfg.m_max = 4;
        assert!(cfg.validate().is_err());
    }
}
