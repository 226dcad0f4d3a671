use std::path::PathBuf;

use cqed_core::measurement::{calibrate_pump, CalibrationSetup, CalibrationTable};
use cqed_core::units::{ghz, to_ghz, to_mhz};
use cqed_core::Qubit;

use super::RunContext;
use crate::error::CliResult;
use crate::output::{line_plot, num, opt_num, write_csv};

pub const HEADER: [&str; 5] = [
    "omega_p_GHz",
    "gain_Phi0_per_mV",
    "delta_omega_MHz",
    "lambda",
    "corrected_delta_omega_MHz",
];
pub const SUMMARY_HEADER: [&str; 5] = [
    "anchor_GHz",
    "lambda0",
    "anchor_delta_omega_MHz",
    "flatness_before",
    "flatness_after",
];

pub fn table(ctx: &RunContext) -> CliResult<CalibrationTable> {
    let cfg = &ctx.config.calibrate;
    let target: Qubit = cfg.target.into();
    let transfer = cfg.transfer.to_transfer()?;
    let setup = CalibrationSetup {
        transfer: &transfer,
        flux_model: &ctx.system.qubit(target).flux_model,
        static_flux: cfg.static_flux,
        instrument_amplitude: cfg.instrument_amplitude_mv,
        lambda0: cfg.lambda0,
        anchor_frequency: ghz(cfg.anchor_ghz),
    };
    let pumps: Vec<f64> = cfg.pump_ghz.values().into_iter().map(ghz).collect();
    Ok(calibrate_pump(&setup, &pumps)?)
}

/// Amplitude correction factors that flatten the pump-induced frequency
/// shift across pump frequency.
pub fn run(ctx: &RunContext) -> CliResult<Vec<PathBuf>> {
    let table = table(ctx)?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                num(to_ghz(r.pump_frequency)),
                num(r.gain),
                num(to_mhz(r.shift)),
                opt_num(r.lambda),
                opt_num(r.corrected_shift.map(to_mhz)),
            ]
        })
        .collect();
    let summary = vec![vec![
        num(to_ghz(table.anchor_frequency)),
        num(table.lambda0),
        num(to_mhz(table.anchor_shift)),
        num(table.flatness_before()),
        num(table.flatness_after()),
    ]];
    let written = vec![
        write_csv(&ctx.file("calibration.csv")?, &HEADER, &rows)?,
        write_csv(&ctx.file("calibration_summary.csv")?, &SUMMARY_HEADER, &summary)?,
    ];
    if ctx.plot {
        let x: Vec<f64> = table.rows.iter().map(|r| to_ghz(r.pump_frequency)).collect();
        let before: Vec<f64> = table.rows.iter().map(|r| to_mhz(r.shift)).collect();
        let after: Vec<f64> = table
            .rows
            .iter()
            .map(|r| r.corrected_shift.map_or(f64::NAN, to_mhz))
            .collect();
        line_plot(
            &ctx.file("calibration.svg")?,
            "pump-induced frequency shift",
            "pump frequency (GHz)",
            "shift (MHz)",
            &x,
            &[("raw", before), ("corrected", after)],
        )?;
    }
    Ok(written)
}
