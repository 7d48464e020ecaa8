//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::io::Write;

use cyclo_drf::cli::main_with_args;
use cyclo_drf::drf::{
    am_gaussian_upper_bound, continuous_eigen_field, drf_am, drf_cs_continuous_curve, drf_cs_discrete, drf_pam,
    lower_bound_continuous, lower_bound_discrete, mmse_filter, sampled_source_coding, AmMethod, ContinuousDrfConfig,
};
use cyclo_drf::grid::{phi_grid, DEFAULT_PHI_CELLS};
use cyclo_drf::oracle::{build_kernel, kl_drf_blocks, step_kernel, weyl_gap, BlockCovariance};
use cyclo_drf::spectral::{
    am_cpsd, pam_cpsd, psd_pc_matrix_continuous, CyclicSpectrum, DiscreteCsProcess, PulseShape, StationaryPsd,
};
use cyclo_drf::waterfill::{hermitian_eigenvalues, solve_water_level, stationary_drf, EigenField, RateNormalizer};
use cyclo_drf::{BitsPerSecond, BitsPerSymbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const ORACLE_REL_TOL: f64 = 1e-3;
const ORACLE_N: usize = 256;
const HAND_TOL: f64 = 1e-9;
const REDUCTION_REL_TOL: f64 = 1e-12;
const CLOSED_FORM_TOL: f64 = 1e-9;
/// Midpoint quadrature of the kinked integrand `min(S, θ)`, relative to σ².
const QUADRATURE_TOL: f64 = 1e-6;
const RANK_ONE_TOL: f64 = 1e-10;
const PAM_REL_TOL: f64 = 1e-6;
const AM_NARROW_REL_TOL: f64 = 1e-6;
const ZERO_RATE_TOL: f64 = 1e-9;
const STAIRCASE_REL_TOL: f64 = 1e-6;
const HIGH_RATE_GAP: f64 = 1e-4;
const WEYL_FACTOR: f64 = 1.8;
const CAUCHY_TOL: f64 = 1e-4;
/// Cauchy gaps below this multiple of σ² are rounding noise.
const CAUCHY_FLOOR: f64 = 1e-12;
const SAMPLING_TOL: f64 = 1e-9;
const MMSE_TOL: f64 = 1e-6;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Taps after the first are scaled by 0.25 so the N = 255 window edge stays
/// below the oracle tolerance.
fn random_m3() -> DiscreteCsProcess {
    DiscreteCsProcess::random_ma(3, 1, 0.25, 2024).unwrap()
}

fn oracle_equivalence() -> Check {
    let rates = [0.1, 0.5, 1.0, 2.0, 4.0, 8.0];
    let mut worst: f64 = 0.0;
    let alt = DiscreteCsProcess::alternating_white(&[1.0, 4.0]).map_err(e)?;
    for proc in [alt.clone(), random_m3()] {
        let block = BlockCovariance::whole_periods(&proc, ORACLE_N).map_err(e)?;
        for r in rates {
            let fast = drf_cs_discrete(&proc, BitsPerSymbol(r)).map_err(e)?.distortion;
            let slow = kl_drf_blocks(&block, BitsPerSymbol(r)).map_err(e)?.distortion;
            let g = rel(fast, slow);
            worst = worst.max(g);
            ensure(g <= ORACLE_REL_TOL, || format!("{proc:?} at {r} bits: fast {fast} oracle {slow}"))?;
        }
    }
    let hand = drf_cs_discrete(&alt, BitsPerSymbol(0.5)).map_err(e)?;
    ensure((hand.distortion - 1.0).abs() <= HAND_TOL, || {
        format!("hand value: D = {} at 0.5 bits/symbol", hand.distortion)
    })?;
    Ok(format!("max oracle gap {worst:.2e}, hand value {:.1e} off", (hand.distortion - 1.0).abs()))
}

/// Triangular spectrum of peak `h` and half-width `b` at water level `θ < h`:
/// `R = b (c - 1 - ln c) / ln 2` with `c = θ / h`, and `D = θ (b + a)` with
/// `a = b (1 - c)` the band where the spectrum exceeds `θ`.
fn triangular_closed_form(h: f64, b: f64, theta: f64) -> (f64, f64) {
    let c = theta / h;
    let a = b * (1.0 - c);
    (b * (c - 1.0 - c.ln()) / std::f64::consts::LN_2, theta * (b + a))
}

fn stationary_reduction() -> Check {
    let mut worst: f64 = 0.0;
    for psd in [
        StationaryPsd::flat(3.0, 0.5).map_err(e)?,
        StationaryPsd::flat(2.0, 0.3).map_err(e)?,
        StationaryPsd::triangular(2.0, 0.5).map_err(e)?,
        StationaryPsd::triangular(1.0, 0.4).map_err(e)?,
    ] {
        let proc = DiscreteCsProcess::stationary(psd.clone());
        // scalar Pinsker waterfilling of S(φ) on the same φ grid
        let grid = phi_grid(DEFAULT_PHI_CELLS, &psd.breakpoints());
        let values = grid.nodes().iter().map(|&p| psd.eval(p)).collect();
        let field = EigenField::scalar(grid, values).map_err(e)?;
        for r in [0.0, 0.25, 1.0, 3.0, 6.0] {
            let a = drf_cs_discrete(&proc, BitsPerSymbol(r)).map_err(e)?.distortion;
            let b = solve_water_level(&field, r, RateNormalizer(0.5)).map_err(e)?.distortion;
            worst = worst.max(rel(a, b));
            ensure(rel(a, b) <= REDUCTION_REL_TOL, || format!("{psd:?} at {r}: {a} vs {b}"))?;
        }
    }
    let (h, b) = (1.0, 0.4);
    let tri = StationaryPsd::triangular(h, b).map_err(e)?;
    let proc = DiscreteCsProcess::stationary(tri.clone());
    for theta in [0.7, 0.2, 0.01] {
        let (r, d) = triangular_closed_form(h, b, theta);
        let a = drf_cs_discrete(&proc, BitsPerSymbol(r)).map_err(e)?.distortion;
        let c = stationary_drf(&tri, BitsPerSecond(r)).map_err(e)?.distortion;
        let tol = QUADRATURE_TOL * tri.total_power();
        ensure((a - d).abs() <= tol && (c - d).abs() <= tol, || {
            format!("triangular closed form at θ = {theta}: {a}, {c} vs {d}")
        })?;
    }
    let sigma2 = 1.7;
    let flat = StationaryPsd::flat_with_power(sigma2, 1.0).map_err(e)?;
    for r in [0.0, 1.0, 3.0] {
        let d = stationary_drf(&flat, BitsPerSecond(r)).map_err(e)?.distortion;
        let want = sigma2 * 2f64.powf(-r);
        ensure(rel(d, want) <= CLOSED_FORM_TOL, || format!("flat band at {r}: {d} vs {want}"))?;
    }
    Ok(format!("max M = 1 reduction gap {worst:.2e}"))
}

fn pam_rank_one() -> Check {
    let base = StationaryPsd::triangular(1.0, 0.5).map_err(e)?;
    let pulse = PulseShape::raised_cosine(1.0, 0.5).map_err(e)?;
    let spec = pam_cpsd(base.clone(), pulse.clone(), 1.0).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for m in [4, 8, 16] {
        let mat = psd_pc_matrix_continuous(&spec, m).map_err(e)?;
        for _ in 0..128 {
            let phi: f64 = rng.gen_range(-0.5..0.5);
            let eigs = hermitian_eigenvalues(&mat, phi).map_err(e)?;
            let top = eigs[m - 1];
            if top > 0.0 {
                let ratio = eigs[m - 2].abs() / top;
                worst_ratio = worst_ratio.max(ratio);
                ensure(ratio <= RANK_ONE_TOL, || format!("M = {m}, φ = {phi}: ratio {ratio:e}"))?;
            }
        }
        let field = continuous_eigen_field(&spec, m, DEFAULT_PHI_CELLS).map_err(e)?;
        for r in [0.25, 1.0, 4.0] {
            let cont = solve_water_level(&field, r, RateNormalizer::per_second(1.0)).map_err(e)?.distortion;
            let exact = drf_pam(&base, &pulse, 1.0, BitsPerSecond(r)).map_err(e)?.distortion;
            worst_gap = worst_gap.max(rel(cont, exact));
            ensure(rel(cont, exact) <= PAM_REL_TOL, || format!("M = {m} at {r}: {cont} vs {exact}"))?;
        }
    }
    Ok(format!("max eigenvalue ratio {worst_ratio:.2e}, max drf_pam gap {worst_gap:.2e}"))
}

fn am_orderings() -> Check {
    let rates = [0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0];
    let wide = StationaryPsd::triangular(1.0, 1.0).map_err(e)?;
    let cfg = ContinuousDrfConfig::default();
    let mut worst: f64 = 0.0;
    for r in rates {
        let am = drf_am(&wide, 4.0, BitsPerSecond(r), &cfg).map_err(e)?;
        let base = stationary_drf(&wide, BitsPerSecond(r)).map_err(e)?;
        worst = worst.max(rel(am.point.distortion, base.distortion));
        ensure(rel(am.point.distortion, base.distortion) <= AM_NARROW_REL_TOL, || {
            format!("f0 = 4 at {r}: {} vs {}", am.point.distortion, base.distortion)
        })?;
    }
    // the numeric sweep on the modulated spectrum agrees up to quadrature
    let am4 = am_cpsd(wide.clone(), 4.0, 0.0).map_err(e)?;
    let bps: Vec<BitsPerSecond> = rates.iter().map(|&r| BitsPerSecond(r)).collect();
    let mut sweep: f64 = 0.0;
    for (r, rep) in bps.iter().zip(drf_cs_continuous_curve(&am4, &bps, &cfg).map_err(e)?) {
        let base = stationary_drf(&wide, *r).map_err(e)?.distortion;
        sweep = sweep.max((rep.point.distortion - base).abs());
        ensure((rep.point.distortion - base).abs() <= QUADRATURE_TOL * wide.total_power(), || {
            format!("f0 = 4 sweep at {}: {} vs {base}", r.value(), rep.point.distortion)
        })?;
    }
    let mut margin = f64::INFINITY;
    for r in rates {
        let am = drf_am(&wide, 1.2, BitsPerSecond(r), &cfg).map_err(e)?;
        ensure(matches!(am.method, AmMethod::Numeric(_)), || "f0 = 1.2 took the narrowband path".into())?;
        ensure(am.converged(), || format!("f0 = 1.2 did not converge at {r}"))?;
        let upper = am_gaussian_upper_bound(&wide, 1.2, BitsPerSecond(r), DEFAULT_PHI_CELLS).map_err(e)?;
        margin = margin.min(upper.distortion - am.point.distortion);
        ensure(am.point.distortion <= upper.distortion, || {
            format!("f0 = 1.2 at {r}: DRF {} above upper bound {}", am.point.distortion, upper.distortion)
        })?;
    }
    Ok(format!(
        "narrowband gap {worst:.2e}, numeric sweep gap {sweep:.2e}, min upper-bound margin {margin:.3e}"
    ))
}

fn bounds() -> Check {
    let rates = [0.0, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0];
    let alt = DiscreteCsProcess::alternating_white(&[1.0, 4.0]).map_err(e)?;
    let ma = random_m3();
    for proc in [&alt, &ma] {
        let sigma2 = proc.average_power();
        for r in rates {
            let lb = lower_bound_discrete(proc, BitsPerSymbol(r)).map_err(e)?;
            let d = drf_cs_discrete(proc, BitsPerSymbol(r)).map_err(e)?.distortion;
            ensure(lb <= d * (1.0 + 1e-12), || format!("{proc:?} at {r}: bound {lb} above DRF {d}"))?;
            if r == 0.0 {
                ensure((lb - d).abs() <= ZERO_RATE_TOL * sigma2, || format!("zero rate: {lb} vs {d}"))?;
            }
        }
        let lb = lower_bound_discrete(proc, BitsPerSymbol(20.0)).map_err(e)?;
        let d = drf_cs_discrete(proc, BitsPerSymbol(20.0)).map_err(e)?.distortion;
        ensure(d - lb <= HIGH_RATE_GAP * sigma2, || format!("20 bits: gap {}", d - lb))?;
    }
    let tri = StationaryPsd::triangular(1.0, 1.0).map_err(e)?;
    let cfg = ContinuousDrfConfig::default();
    let am = am_cpsd(tri.clone(), 1.2, 0.0).map_err(e)?;
    let ams: Vec<BitsPerSecond> = rates.iter().map(|&r| BitsPerSecond(r)).collect();
    let reports = drf_cs_continuous_curve(&am, &ams, &cfg).map_err(e)?;
    for (r, rep) in ams.iter().zip(&reports) {
        let lb = lower_bound_continuous(&am, *r).map_err(e)?;
        let d = rep.point.distortion;
        ensure(lb <= d * (1.0 + 1e-12), || format!("AM at {}: bound {lb} above DRF {d}", r.value()))?;
        if r.value() == 0.0 {
            ensure((lb - d).abs() <= ZERO_RATE_TOL, || format!("AM zero rate: {lb} vs {d}"))?;
        }
    }
    let stair = pam_cpsd(tri.clone(), PulseShape::rectangular(1.0).map_err(e)?, 1.0).map_err(e)?;
    let CyclicSpectrum::Pam { pulse, .. } = &stair else { unreachable!() };
    let mut worst: f64 = 0.0;
    for r in [0.25, 1.0, 3.0] {
        let lb = lower_bound_continuous(&stair, BitsPerSecond(r)).map_err(e)?;
        let d = drf_pam(&tri, pulse, 1.0, BitsPerSecond(r)).map_err(e)?.distortion;
        worst = worst.max(rel(lb, d));
        ensure(rel(lb, d) <= STAIRCASE_REL_TOL, || format!("staircase at {r}: bound {lb} vs {d}"))?;
    }
    Ok(format!("bounds below DRF everywhere, staircase gap {worst:.2e}"))
}

fn weyl_machinery() -> Check {
    let flat = StationaryPsd::flat(0.5, 1.0).map_err(e)?;
    let spec = am_cpsd(flat, 4.0, 0.0).map_err(e)?;
    let exact = build_kernel(&spec, 0.5, 1024).map_err(e)?;
    let mut gaps = Vec::new();
    for m in [16, 32, 64] {
        let step = step_kernel(&spec, 0.5, 1024, m).map_err(e)?;
        let g = weyl_gap(&exact, &step).map_err(e)?;
        ensure(g.holds(), || format!("M = {m}: gap {} exceeds bound {}", g.eigen_gap, g.sup_bound))?;
        gaps.push(g.eigen_gap);
    }
    for w in gaps.windows(2) {
        ensure(w[0] >= WEYL_FACTOR * w[1], || format!("eigen gaps {gaps:?} shrink too slowly"))?;
    }
    let tri = StationaryPsd::triangular(1.0, 1.0).map_err(e)?;
    let scenarios = [
        ("AM f0 = 1.2", am_cpsd(tri.clone(), 1.2, 0.0).map_err(e)?),
        ("AM f0 = 0.7", am_cpsd(tri.clone(), 0.7, 0.3).map_err(e)?),
        (
            "PAM raised cosine",
            pam_cpsd(
                StationaryPsd::triangular(1.0, 0.5).map_err(e)?,
                PulseShape::raised_cosine(1.0, 0.5).map_err(e)?,
                1.0,
            )
            .map_err(e)?,
        ),
    ];
    let cfg = ContinuousDrfConfig {
        convergence_tol: CAUCHY_TOL,
        ..Default::default()
    };
    for (name, spec) in scenarios {
        let sigma2 = spec.average_power().map_err(e)?;
        let reps = drf_cs_continuous_curve(&spec, &[BitsPerSecond(0.5), BitsPerSecond(2.0)], &cfg).map_err(e)?;
        for rep in reps {
            let floor = CAUCHY_FLOOR * sigma2;
            let g: Vec<f64> = rep.cauchy_gaps.iter().map(|x| x.max(floor)).collect();
            ensure(g.windows(2).all(|w| w[1] <= w[0]), || format!("{name}: gaps {g:?} not decreasing"))?;
            ensure(rep.m <= 64 && g.last().is_some_and(|x| *x <= CAUCHY_TOL * sigma2), || {
                format!("{name}: gaps {g:?} by M = {}", rep.m)
            })?;
        }
    }
    Ok(format!("Weyl eigen gaps {:.2e} {:.2e} {:.2e}", gaps[0], gaps[1], gaps[2]))
}

/// mmse of a flat band `[-B, B]` of height `h` sampled at `fs`, by counting
/// the aliases overlapping each frequency of the folded band.
fn flat_alias_mmse(h: f64, b: f64, fs: f64) -> f64 {
    let n = 100_000;
    let df = fs / n as f64;
    (0..n)
        .map(|i| {
            let f = -fs / 2.0 + (i as f64 + 0.5) * df;
            let k = (-20..=20).filter(|k| (f - *k as f64 * fs).abs() < b).count() as f64;
            // k aliases of equal height: Σ S - Σ S² / Σ S = (k - 1) h
            if k > 0.0 {
                (k - 1.0) * h * df
            } else {
                0.0
            }
        })
        .sum()
}

fn sampling() -> Check {
    let tri = StationaryPsd::triangular(1.0, 1.0).map_err(e)?;
    for fs in [2.0, 2.5, 4.0] {
        for r in [0.0, 0.5, 1.0, 3.0] {
            let c = sampled_source_coding(&tri, fs, BitsPerSecond(r)).map_err(e)?.distortion();
            let d = stationary_drf(&tri, BitsPerSecond(r)).map_err(e)?.distortion;
            ensure(rel(c, d) <= SAMPLING_TOL, || format!("fs = {fs} at {r}: {c} vs {d}"))?;
        }
    }
    let flat = StationaryPsd::flat(0.5, 1.0).map_err(e)?;
    for (psd, fs) in [(&tri, 1.0), (&tri, 1.5), (&flat, 1.0)] {
        let c = sampled_source_coding(psd, fs, BitsPerSecond(60.0)).map_err(e)?;
        ensure(c.distortion() - c.mmse <= SAMPLING_TOL, || format!("fs = {fs}: excess {}", c.distortion() - c.mmse))?;
    }
    let mmse = mmse_filter(&flat, 1.0).map_err(e)?.mmse();
    let oracle = flat_alias_mmse(0.5, 1.0, 1.0);
    ensure((mmse - 0.5).abs() <= MMSE_TOL && (oracle - 0.5).abs() <= MMSE_TOL, || {
        format!("flat overlap mmse {mmse}, alias count {oracle}")
    })?;
    Ok(format!("flat-overlap mmse {mmse:.9}"))
}

fn fig4_csv(path: &std::path::Path) -> Result<Vec<u8>, String> {
    let code = main_with_args(["cyclo-drf", "drf", "--scenario", "fig4", "--out", path.to_str().unwrap()]);
    ensure(code == 0, || format!("exit code {code}"))?;
    std::fs::read(path).map_err(e)
}

fn fig4_ordering() -> Check {
    let dir = tempfile::tempdir().map_err(e)?;
    let a = fig4_csv(&dir.path().join("a.csv"))?;
    let b = fig4_csv(&dir.path().join("b.csv"))?;
    ensure(a == b, || "CSV differs between runs".into())?;
    let text = String::from_utf8(a).map_err(e)?;
    let order = ["drf[fs=0.25]", "drf[fs=0.5]", "drf[fs=0.9]", "baseline"];
    let mut by_rate: Vec<(String, Vec<(String, f64)>)> = Vec::new();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let d: f64 = cols[1].parse().map_err(e)?;
        match by_rate.last_mut() {
            Some((r, v)) if r == cols[0] => v.push((cols[3].to_string(), d)),
            _ => by_rate.push((cols[0].to_string(), vec![(cols[3].to_string(), d)])),
        }
    }
    ensure(by_rate.len() == 10, || format!("{} rate points", by_rate.len()))?;
    for (rate, rows) in &by_rate {
        let curve: Vec<f64> = order
            .iter()
            .map(|m| rows.iter().find(|(n, _)| n == m).map(|x| x.1).ok_or(format!("{m} missing at {rate}")))
            .collect::<Result<_, _>>()?;
        ensure(curve.windows(2).all(|w| w[0] < w[1]), || format!("not ordered at {rate}: {curve:?}"))?;
    }
    Ok("strictly ordered at 10 rates, byte-identical reruns".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 stationary reduction", stationary_reduction),
        ("3 PAM rank one", pam_rank_one),
        ("4 AM narrowband and upper bound", am_orderings),
        ("5 lower bounds", bounds),
        ("6 Weyl and M convergence", weyl_machinery),
        ("7 combined sampling", sampling),
        ("8 fig4 sampling-rate ordering", fig4_ordering),
    ];
    let results: Vec<Check> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|(_, f)| s.spawn(f)).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err("panicked".into())))
            .collect()
    });
    // written to the stdout handle directly so the lines survive capture
    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for ((name, _), res) in criteria.iter().zip(&results) {
        let line = match res {
            Ok(msg) => format!("PASS  criterion {name}: {msg}\n"),
            Err(msg) => {
                failed += 1;
                format!("FAIL  criterion {name}: {msg}\n")
            }
        };
        out.write_all(line.as_bytes()).unwrap();
    }
    out.flush().unwrap();
    drop(out);
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
