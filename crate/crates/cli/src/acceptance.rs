//! The acceptance suite: one check per criterion, each reporting PASS or
//! FAIL with the measured numbers.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cqed_core::floquet::{
    fold, one_period_propagator, quasienergies, unitarity_residual, PeriodicHamiltonian, Scheme, DEFAULT_STEPS,
};
use cqed_core::measurement::{
    chi_from_dephasing_slope, dephasing_rate, linear_fit, time_averaged_frequency, time_averaged_frequency_series,
};
use cqed_core::parametric::{chi_parametric_series, g_p_from_flux, DEFAULT_M_MAX, GUARD_BAND};
use cqed_core::spectra::crossing::crossing_sweep;
use cqed_core::spectra::eigen::diagonalize;
use cqed_core::spectra::shift::chi_from_rotating_frame;
use cqed_core::units::{mhz, to_mhz};
use cqed_core::{Level, PumpSpec, Qubit, RotatingFrame, SystemSpec};

use crate::commands::{self, calibrate, chi_sweep, floquet_check, CommandKind, RunContext};
use crate::config::{CalibrateConfig, Grid, TransferConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} [{}] {}: {}", self.id, self.name, self.detail)
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "series vs diagonalization"),
    (2, "resonance positions"),
    (3, "splitting readout"),
    (4, "g_p linear in amplitude"),
    (5, "straddling sign structure"),
    (6, "two-photon lineshape"),
    (7, "dephasing formula"),
    (8, "calibration loop closure"),
    (9, "Floquet validation"),
    (10, "determinism"),
];

type Check = CliResult<(bool, String)>;

pub fn run_criterion(id: u8, ctx: &RunContext) -> CriterionResult {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map_or("unknown criterion", |c| c.1);
    let outcome = match id {
        1 => series_vs_diagonalization(),
        2 => resonance_positions(ctx),
        3 => splitting_readout(ctx),
        4 => coupling_linearity(ctx),
        5 => straddling_signs(),
        6 => two_photon_lineshape(),
        7 => dephasing_formula(ctx.seed),
        8 => calibration_closure(ctx),
        9 => floquet_validation(ctx),
        10 => determinism(ctx),
        _ => Err(CliError::Config(format!("no criterion {id}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        name,
        passed,
        detail,
    }
}

pub fn run_all(ctx: &RunContext) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, ctx)).collect()
}

fn frame(alpha: f64, detuning: f64, coupling: f64, qubit_dim: usize, cavity_dim: usize) -> RotatingFrame {
    RotatingFrame {
        anharmonicity: alpha,
        detuning,
        coupling,
        qubit_dim,
        cavity_dim,
    }
}

fn chi_ge(rf: &RotatingFrame) -> CliResult<f64> {
    Ok(chi_from_rotating_frame(rf, Level::G, Level::E)?.value)
}

/// `n` entries spread evenly over `v`, ends included.
fn pick_evenly<T: Copy>(v: &[T], n: usize) -> Vec<T> {
    if v.len() <= n {
        return v.to_vec();
    }
    (0..n).map(|i| v[i * (v.len() - 1) / (n - 1)]).collect()
}

/// `(Delta_p, g_p)` pairs with `g_p / |Delta_p| <= 0.05` outside every pole
/// guard band of a `qubit_dim`-level truncation.
fn oracle_grid(alpha: f64, qubit_dim: usize, n: usize) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for k in 0..160 {
        let magnitude = mhz(20.0) * 100f64.powf(k as f64 / 159.0);
        for sign in [-1.0, 1.0] {
            let d = sign * magnitude;
            let g = (0.05 * magnitude).min(mhz(5.0));
            let guarded = (0..qubit_dim - 1).any(|m| (d + m as f64 * alpha).abs() <= GUARD_BAND * g);
            if !guarded {
                pts.push((d, g));
            }
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pick_evenly(&pts, n)
}

fn series_vs_diagonalization() -> Check {
    let dim = DEFAULT_M_MAX + 2;
    let (mut worst, mut worst_at) = (0.0f64, (0.0, 0.0));
    let mut worst_m1 = 0.0f64;
    let mut worst_two = 0.0f64;
    let mut count = 0;
    let mut within = 0;
    for alpha_mhz in [-180.0, -220.0] {
        let alpha = mhz(alpha_mhz);
        for (d, g) in oracle_grid(alpha, dim, 100) {
            count += 1;
            let diag = chi_ge(&frame(alpha, d, g, dim, 3))?;
            let series = chi_parametric_series(g, d, alpha, DEFAULT_M_MAX).value;
            let rel = ((series - diag) / diag).abs();
            if rel <= 0.05 {
                within += 1;
            }
            if rel > worst {
                worst = rel;
                worst_at = (alpha_mhz, to_mhz(d));
            }
            let m1 = chi_parametric_series(g, d, alpha, 1).value;
            worst_m1 = worst_m1.max(((m1 - diag) / diag).abs());

            let two = chi_ge(&frame(alpha, d, g, 2, 3))?;
            let jc = g * g / d;
            worst_two = worst_two.max(((two - jc) / jc).abs());
        }
    }
    let passed = count == 200 && worst <= 0.05 && worst_two <= 0.01;
    Ok((
        passed,
        format!(
            "{count} points, {within} within 5%; max |series(m_max={DEFAULT_M_MAX}) - diag|/|diag| = {worst:.3} \
             at alpha = {} MHz, Delta_p = {:.1} MHz (limit 0.05); m_max=1 series max {worst_m1:.2e}; \
             two-level vs g^2/Delta max {worst_two:.2e} (limit 0.01)",
            worst_at.0, worst_at.1
        ),
    ))
}

/// Operating system with the pump scale set so that `g_p` equals `g` at
/// the given amplitude.
fn system_with_coupling(sys: &SystemSpec, target: Qubit, amplitude: f64, g: f64) -> CliResult<SystemSpec> {
    let phi = sys.static_flux;
    let slopes = (sys.qubit(target).slope(phi) * sys.cavity.slope(phi)).abs().sqrt();
    if slopes == 0.0 {
        return Err(CliError::Numerical("pump coupling vanishes at the static bias".into()));
    }
    let mut sys = sys.clone();
    sys.coupler.coupling_mut(target).pump_scale = g / (amplitude * slopes);
    Ok(sys)
}

const OPERATING_AMPLITUDE: f64 = 0.005;

fn operating_pump(sys: &SystemSpec, target: Qubit, detuning: f64) -> CliResult<PumpSpec> {
    let gap = -sys.detuning(target, sys.static_flux);
    Ok(PumpSpec::new(target, gap + detuning, OPERATING_AMPLITUDE)?)
}

fn sweep_around(
    sys: &SystemSpec,
    target: Qubit,
    level: Level,
    centre: f64,
    half_width: f64,
    points: usize,
) -> CliResult<cqed_core::spectra::CrossingSweep> {
    let pump = operating_pump(sys, target, centre)?;
    let freqs = Grid::new(pump.frequency - half_width, pump.frequency + half_width, points).values();
    Ok(crossing_sweep(sys, &pump, level, &freqs)?)
}

fn resonance_positions(ctx: &RunContext) -> Check {
    let target = Qubit::R;
    let sys = system_with_coupling(&ctx.system, target, OPERATING_AMPLITUDE, mhz(5.0))?;
    let alpha = sys.qubit(target).anharmonicity;
    let step = mhz(1.0);
    let mut passed = true;
    let mut parts = Vec::new();
    let mut gaps = Vec::new();
    for (level, order) in [(Level::G, 0.0), (Level::E, 1.0), (Level::F, 2.0)] {
        let centre = -order * alpha;
        let sweep = sweep_around(&sys, target, level, centre, mhz(80.0), 161)?;
        let expected = operating_pump(&sys, target, centre)?.frequency;
        let (at, _) = sweep.min_gap();
        let offset = at - expected;
        passed &= offset.abs() <= step && !sweep.ambiguous;
        gaps.push(sweep.fit_gap()?);
        parts.push(format!(
            "{level}: min gap at Delta_p = {:.1} MHz (expected {:.1})",
            to_mhz(centre + offset),
            to_mhz(centre)
        ));
    }
    let ratio = gaps[1] / gaps[0];
    let ratio_ok = (ratio / 2f64.sqrt() - 1.0).abs() <= 0.02;
    passed &= ratio_ok;
    parts.push(format!(
        "gap(e)/gap(g) = {ratio:.4} (sqrt 2 = {:.4}, limit 2%); gap(f)/gap(g) = {:.4}",
        2f64.sqrt(),
        gaps[2] / gaps[0]
    ));
    Ok((passed, parts.join("; ")))
}

fn splitting_readout(ctx: &RunContext) -> Check {
    let target = Qubit::R;
    let sys = system_with_coupling(&ctx.system, target, OPERATING_AMPLITUDE, mhz(5.0))?;
    let g = g_p_from_flux(&sys, &operating_pump(&sys, target, 0.0)?, sys.static_flux)?;
    let sweep = sweep_around(&sys, target, Level::G, 0.0, mhz(40.0), 161)?;
    let split = to_mhz(sweep.fit_gap()?);
    Ok((
        (split - 10.0).abs() <= 0.2,
        format!("g_p = {:.4} MHz, fitted splitting 2g_p = {split:.4} MHz (want 10 +/- 0.2)", to_mhz(g)),
    ))
}

fn coupling_linearity(ctx: &RunContext) -> Check {
    let cfg = &ctx.config.chi_sweep;
    let target: Qubit = cfg.target.into();
    let sys = &ctx.system;
    let gap = -sys.detuning(target, sys.static_flux);
    let ladder: Vec<f64> = (1..=6).map(|k| k as f64 * OPERATING_AMPLITUDE / 6.0).collect();
    let mut points = Vec::new();
    for &a in &ladder {
        let pump = PumpSpec::new(target, gap, a)?;
        let g = chi_sweep::fit_coupling(ctx, &pump, mhz(cfg.fit_window_mhz), cfg.fit_points)?;
        points.push((a, to_mhz(g)));
    }
    let fit = linear_fit(&points)?;
    let max = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let rel_intercept = (fit.intercept / max).abs();
    let fitted: Vec<String> = points.iter().map(|p| format!("{:.4}", p.1)).collect();
    Ok((
        fit.r_squared > 0.999 && rel_intercept < 0.02,
        format!(
            "fitted g_p [{}] MHz; R^2 = {:.8} (limit 0.999), |intercept|/max = {rel_intercept:.2e} (limit 0.02)",
            fitted.join(", "),
            fit.r_squared
        ),
    ))
}

fn straddling_signs() -> Check {
    let alpha = mhz(-220.0);
    let g = mhz(5.0);
    let dim = DEFAULT_M_MAX + 2;
    let series = |d: f64| chi_parametric_series(g, d, alpha, DEFAULT_M_MAX).value;
    let diag = |d: f64| chi_ge(&frame(alpha, d, g, dim, 3));

    let (below, above) = (-alpha - mhz(30.0), -alpha + mhz(30.0));
    let flip_series = series(below).signum() != series(above).signum();
    let flip_diag = diag(below)?.signum() != diag(above)?.signum();

    let (near, far) = (mhz(-50.0), mhz(-500.0));
    let decay_series = (series(near) / series(far)).abs();
    let decay_diag = (diag(near)? / diag(far)?).abs();

    let mut signs_series = (false, false);
    let mut signs_diag = (false, false);
    for d in Grid::new(-600.0, 600.0, 241).values().into_iter().map(mhz) {
        if (0..dim - 1).any(|m| (d + m as f64 * alpha).abs() <= GUARD_BAND * g) {
            continue;
        }
        let s = series(d);
        let c = diag(d)?;
        signs_series = (signs_series.0 || s > 0.0, signs_series.1 || s < 0.0);
        signs_diag = (signs_diag.0 || c > 0.0, signs_diag.1 || c < 0.0);
    }
    let both = signs_series.0 && signs_series.1 && signs_diag.0 && signs_diag.1;
    Ok((
        flip_series && flip_diag && decay_series >= 5.0 && decay_diag >= 5.0 && both,
        format!(
            "sign flip across -alpha: series {flip_series}, diag {flip_diag}; |chi(-50 MHz)/chi(-500 MHz)|: \
             series {decay_series:.2}, diag {decay_diag:.2} (limit 5); both signs in sweep: {both}"
        ),
    ))
}

fn asymmetry(alpha: f64, g: f64, centre: f64) -> CliResult<f64> {
    let delta = 2.0 * g;
    let plus = chi_ge(&frame(alpha, centre + delta, g, 6, 4))?;
    let minus = chi_ge(&frame(alpha, centre - delta, g, 6, 4))?;
    Ok(((plus - minus) / (plus + minus)).abs())
}

fn two_photon_lineshape() -> Check {
    let alpha = mhz(-220.0);
    let g = mhz(5.0);
    let even = asymmetry(alpha, g, -2.0 * alpha)?;
    let odd = asymmetry(alpha, g, -alpha)?;
    Ok((
        even < 0.2 && odd > 0.8,
        format!("asymmetry at -2 alpha = {even:.4} (limit < 0.2), at -alpha = {odd:.4} (limit > 0.8)"),
    ))
}

fn dephasing_formula(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_linear = 0.0f64;
    let mut worst_inverse = 0.0f64;
    for _ in 0..200 {
        let kappa = mhz(rng.gen_range(1.0..50.0));
        let chi = mhz(rng.gen_range(0.01..50.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let (a, b) = (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
        let unit = dephasing_rate(1.0, kappa, chi);
        let lin = (dephasing_rate(a, kappa, chi) - a * unit).abs() / (a * unit).max(f64::MIN_POSITIVE);
        let add = (dephasing_rate(a + b, kappa, chi) - dephasing_rate(a, kappa, chi) - dephasing_rate(b, kappa, chi))
            .abs()
            / dephasing_rate(a + b, kappa, chi);
        worst_linear = worst_linear.max(lin).max(add);
        let back = chi_from_dephasing_slope(unit, kappa)?.value;
        worst_inverse = worst_inverse.max((back - chi.abs()).abs() / chi.abs());
    }

    let kappa = mhz(10.0);
    let mut worst_saturation = 0.0f64;
    for n in [0.5, 1.0, 2.0] {
        let ratio = dephasing_rate(n, kappa, 100.0 * kappa) / (2.0 * n * kappa);
        worst_saturation = worst_saturation.max((ratio - 1.0).abs());
    }

    // 8 n kappa chi^2 / (kappa^2 + 4 chi^2) evaluated directly in MHz
    let oracle = 8.0 * 10.0 * 0.3 * 0.3 / (10.0 * 10.0 + 4.0 * 0.3 * 0.3);
    let gamma = to_mhz(dephasing_rate(1.0, kappa, mhz(0.3)));
    let numeric_ok = (gamma - oracle).abs() <= 1e-12 && (gamma - 0.0717).abs() < 5e-5;

    Ok((
        worst_linear <= 1e-12 && worst_saturation <= 0.01 && worst_inverse <= 1e-10 && numeric_ok,
        format!(
            "linearity {worst_linear:.1e} (limit 1e-12); saturation {worst_saturation:.2e} (limit 0.01); \
             inversion {worst_inverse:.1e} (limit 1e-10); Gamma(n=1)/2pi = {gamma:.6} MHz (oracle {oracle:.6})"
        ),
    ))
}

fn calibration_closure(ctx: &RunContext) -> Check {
    let mut local = ctx.clone();
    local.config.calibrate = CalibrateConfig {
        anchor_ghz: 3.03,
        pump_ghz: Grid::new(2.5, 3.4, 91),
        transfer: TransferConfig::ripple(2.5, 3.4, 1.5e-4),
        ..CalibrateConfig::default()
    };
    let table = calibrate::table(&local)?;
    let after = table.flatness_after();

    let fm = &ctx.system.right.flux_model;
    let diff = |d: f64| -> CliResult<f64> {
        Ok(time_averaged_frequency(fm, 0.0, d)? - time_averaged_frequency_series(fm, 0.0, d)?)
    };
    let ratio = diff(0.1)? / diff(0.05)?;
    Ok((
        after < 0.01 && (ratio - 16.0).abs() <= 2.0,
        format!(
            "flatness before {:.3}, after {after:.2e} (limit 0.01); step-halving ratio {ratio:.3} (want 16 +/- 2)",
            table.flatness_before()
        ),
    ))
}

fn floquet_validation(ctx: &RunContext) -> Check {
    let cfg = &ctx.config.floquet_check;
    let sys = floquet_check::validation_system(&ctx.system, cfg);
    let target: Qubit = cfg.target.into();
    let detuning = mhz(-50.0);
    let pump = operating_pump(&sys, target, detuning)?;

    let driven = PeriodicHamiltonian::new(&sys, &pump)?;
    let mut unitarity = 0.0f64;
    for steps in [DEFAULT_STEPS, 2 * DEFAULT_STEPS] {
        unitarity = unitarity.max(unitarity_residual(&one_period_propagator(&driven, steps, Scheme::Midpoint)?));
    }

    let undriven = PeriodicHamiltonian::new(&sys, &pump.with_amplitude(0.0))?;
    let omega = pump.frequency;
    let period = 2.0 * std::f64::consts::PI / omega;
    let quasi = quasienergies(&one_period_propagator(&undriven, DEFAULT_STEPS, Scheme::Midpoint)?, period)?;
    let bare = diagonalize(&undriven.static_hamiltonian())?;
    let mismatch = bare
        .energies()
        .iter()
        .map(|&e| {
            quasi
                .energies
                .iter()
                .map(|&q| fold(e - q, omega).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
        / omega;

    let full = floquet_check::evaluate(&sys, cfg, OPERATING_AMPLITUDE, detuning)?;
    let half = floquet_check::evaluate(&sys, cfg, 0.5 * OPERATING_AMPLITUDE, detuning)?;
    let r_full = (full.chi_floquet - full.chi_diag).abs();
    let r_half = (half.chi_floquet - half.chi_diag).abs();
    let shrink = r_full / r_half;
    Ok((
        unitarity <= 1e-9 && mismatch <= 1e-8 && full.deviation().abs() <= 0.10 && shrink >= 2.5,
        format!(
            "||U^dag U - 1|| = {unitarity:.1e} (limit 1e-9); undriven quasi-energy mismatch {mismatch:.1e} of omega_p \
             (limit 1e-8); chi_floquet = {:.5} MHz vs chi_diag = {:.5} MHz, deviation {:.2e} (limit 0.10); \
             residual shrinks {shrink:.2}x on halving (limit 2.5)",
            to_mhz(full.chi_floquet),
            to_mhz(full.chi_diag),
            full.deviation()
        ),
    ))
}

fn snapshot(dir: &Path) -> CliResult<BTreeMap<String, Vec<u8>>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
            files.insert(name, std::fs::read(&path)?);
        }
    }
    Ok(files)
}

fn run_into(ctx: &RunContext, dir: &Path, jobs: usize) -> CliResult<BTreeMap<String, Vec<u8>>> {
    let mut local = ctx.with_out(dir).with_jobs(jobs);
    local.plot = false;
    for kind in CommandKind::ALL {
        commands::run(kind, &local)?;
    }
    snapshot(dir)
}

fn determinism(ctx: &RunContext) -> Check {
    let tmp = tempfile::tempdir()?;
    let many = ctx.jobs.max(2);
    let first = run_into(ctx, &tmp.path().join("a"), many)?;
    let second = run_into(ctx, &tmp.path().join("b"), many)?;
    let serial = run_into(ctx, &tmp.path().join("c"), 1)?;
    let differing: Vec<&String> = first
        .iter()
        .filter(|(name, bytes)| second.get(*name) != Some(bytes) || serial.get(*name) != Some(bytes))
        .map(|(name, _)| name)
        .collect();
    let same_sets = first.keys().eq(second.keys()) && first.keys().eq(serial.keys());
    Ok((
        differing.is_empty() && same_sets && !first.is_empty(),
        format!(
            "{} CSV files compared across two runs with --jobs {many} and one with --jobs 1; differing: {:?}",
            first.len(),
            differing
        ),
    ))
}
