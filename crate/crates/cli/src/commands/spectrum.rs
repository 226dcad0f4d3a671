use std::path::PathBuf;

use cqed_core::spectra::response::synthesize_cavity_response;
use cqed_core::units::{mhz, to_ghz};
use cqed_core::{PumpSpec, Qubit};

use super::RunContext;
use crate::error::CliResult;
use crate::output::{num, par_map, phase_map, write_csv};

pub const HEADER: [&str; 5] = ["pump_freq_GHz", "probe_freq_GHz", "re", "im", "phase_rad"];

/// Cavity response maps, one CSV per initial state.
pub fn run(ctx: &RunContext) -> CliResult<Vec<PathBuf>> {
    let cfg = &ctx.config.spectrum;
    let sys = &ctx.system;
    let target: Qubit = cfg.target.into();
    let gap = -sys.detuning(target, sys.static_flux);
    let pump = PumpSpec::new(target, gap, cfg.amplitude)?;
    let pumps: Vec<f64> = cfg.pump_detuning_mhz.values().into_iter().map(|d| gap + mhz(d)).collect();
    let wc = sys.cavity.frequency(sys.static_flux);
    let probe: Vec<f64> = cfg.probe_offset_mhz.values().into_iter().map(|d| wc + mhz(d)).collect();

    let mut written = Vec::new();
    for level in cfg.levels()? {
        let rows = par_map(ctx.jobs, &pumps, |&wp| {
            Ok(synthesize_cavity_response(sys, &pump.at_frequency(wp), level, &probe)?)
        })?;
        let mut records = Vec::with_capacity(rows.len() * probe.len());
        for row in &rows {
            for (&w, z) in probe.iter().zip(&row.response) {
                records.push(vec![
                    num(to_ghz(row.pump_frequency)),
                    num(to_ghz(w)),
                    num(z.re),
                    num(z.im),
                    num(z.arg()),
                ]);
            }
        }
        written.push(write_csv(&ctx.file(&format!("spectrum_{level}.csv"))?, &HEADER, &records)?);
        if ctx.plot {
            let phases: Vec<Vec<f64>> = rows.iter().map(|r| r.response.iter().map(|z| z.arg()).collect()).collect();
            phase_map(
                &ctx.file(&format!("spectrum_{level}.svg"))?,
                &format!("cavity phase, qubit in {level}"),
                "pump frequency",
                "probe frequency",
                &phases,
            )?;
        }
    }
    Ok(written)
}
