use std::path::PathBuf;

use cqed_core::measurement::linear_fit;
use cqed_core::parametric::g_p_from_flux;
use cqed_core::spectra::crossing::crossing_sweep;
use cqed_core::units::{mhz, to_mhz};
use cqed_core::{Level, PumpSpec, Qubit, RotatingFrame, ShiftCurve};

use super::{flag_str, RunContext};
use crate::config::Grid;
use crate::error::CliResult;
use crate::output::{line_plot, num, opt_num, par_map, write_csv};

pub const HEADER: [&str; 7] = [
    "amplitude_mV",
    "amplitude_Phi0",
    "delta_p_MHz",
    "chi_series_MHz",
    "chi_diag_MHz",
    "series_flag",
    "diag_flag",
];
pub const GP_HEADER: [&str; 5] = ["amplitude_mV", "amplitude_Phi0", "g_p_model_MHz", "g_p_fit_MHz", "g_p_linear_MHz"];
pub const FIT_HEADER: [&str; 3] = ["slope_MHz_per_mV", "intercept_MHz", "r_squared"];

struct AmplitudeResult {
    millivolts: f64,
    amplitude: f64,
    g_model: f64,
    g_fit: Option<f64>,
    series: ShiftCurve,
    diag: ShiftCurve,
}

/// `g_p` from the avoided crossing at `Delta_p = 0` of the `g` ladder.
pub fn fit_coupling(ctx: &RunContext, pump: &PumpSpec, window: f64, points: usize) -> CliResult<f64> {
    let sys = &ctx.system;
    let gap = -sys.detuning(pump.target, sys.static_flux);
    let freqs: Vec<f64> = Grid::new(gap - window, gap + window, points).values();
    let sweep = crossing_sweep(sys, pump, Level::G, &freqs)?;
    Ok(0.5 * sweep.fit_gap()?)
}

/// Parametric shift versus pump detuning for each amplitude, plus the
/// fitted coupling per amplitude and its linear fit.
pub fn run(ctx: &RunContext) -> CliResult<Vec<PathBuf>> {
    let cfg = &ctx.config.chi_sweep;
    let sys = &ctx.system;
    let target: Qubit = cfg.target.into();
    let gap = -sys.detuning(target, sys.static_flux);
    let detunings: Vec<f64> = cfg.detuning_mhz.values().into_iter().map(mhz).collect();
    let alpha = sys.qubit(target).anharmonicity;

    let results = par_map(ctx.jobs, &cfg.amplitudes_mv, |&mv| {
        let amplitude = mv * cfg.flux_per_mv;
        let mut pump = PumpSpec::new(target, gap, amplitude)?;
        pump.instrument_amplitude = Some(mv);
        let g_model = g_p_from_flux(sys, &pump, sys.static_flux)?;
        let rf = RotatingFrame::from_system(sys, &pump)?;
        let rf = rf.with_dims(cfg.m_max + 2, rf.cavity_dim);
        let series = ShiftCurve::series(g_model, alpha, cfg.m_max, &detunings, amplitude);
        let diag = ShiftCurve::diagonalization(&rf, &detunings, amplitude)?;
        let g_fit = match fit_coupling(ctx, &pump, mhz(cfg.fit_window_mhz), cfg.fit_points) {
            Ok(g) => Some(g),
            Err(e) => {
                log::warn!("no crossing fit at {mv} mV: {e}");
                None
            }
        };
        Ok(AmplitudeResult {
            millivolts: mv,
            amplitude,
            g_model,
            g_fit,
            series,
            diag,
        })
    })?;

    let mut rows = Vec::new();
    for r in &results {
        for ((d, s), c) in detunings.iter().zip(&r.series.values).zip(&r.diag.values) {
            rows.push(vec![
                num(r.millivolts),
                num(r.amplitude),
                num(to_mhz(*d)),
                num(to_mhz(s.value)),
                num(to_mhz(c.value)),
                flag_str(s.flag),
                flag_str(c.flag),
            ]);
        }
    }
    let mut written = vec![write_csv(&ctx.file("chi_sweep.csv")?, &HEADER, &rows)?];

    let points: Vec<(f64, f64)> = results
        .iter()
        .filter_map(|r| r.g_fit.map(|g| (r.millivolts, to_mhz(g))))
        .collect();
    let fit = match linear_fit(&points) {
        Ok(f) => Some(f),
        Err(e) => {
            log::warn!("no linear fit of g_p against amplitude: {e}");
            None
        }
    };
    let gp_rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                num(r.millivolts),
                num(r.amplitude),
                num(to_mhz(r.g_model)),
                opt_num(r.g_fit.map(to_mhz)),
                opt_num(fit.map(|f| f.intercept + f.slope * r.millivolts)),
            ]
        })
        .collect();
    written.push(write_csv(&ctx.file("chi_sweep_gp.csv")?, &GP_HEADER, &gp_rows)?);
    let fit_rows: Vec<Vec<String>> = fit
        .iter()
        .map(|f| vec![num(f.slope), num(f.intercept), num(f.r_squared)])
        .collect();
    written.push(write_csv(&ctx.file("chi_sweep_gp_fit.csv")?, &FIT_HEADER, &fit_rows)?);

    if ctx.plot {
        if let Some(last) = results.last() {
            let unflagged = |c: &ShiftCurve| -> Vec<f64> {
                c.values
                    .iter()
                    .map(|e| if e.is_flagged() { f64::NAN } else { to_mhz(e.value) })
                    .collect()
            };
            let x: Vec<f64> = detunings.iter().map(|&d| to_mhz(d)).collect();
            line_plot(
                &ctx.file("chi_sweep.svg")?,
                &format!("chi at {} mV", last.millivolts),
                "pump detuning (MHz)",
                "chi (MHz)",
                &x,
                &[("series", unflagged(&last.series)), ("diag", unflagged(&last.diag))],
            )?;
        }
    }
    Ok(written)
}
