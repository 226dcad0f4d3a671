use std::path::PathBuf;

use cqed_core::floquet::{floquet_chi, FloquetOptions};
use cqed_core::model::modulation_matched_pump_scale;
use cqed_core::parametric::{chi_parametric_series, g_p_from_flux, DEFAULT_M_MAX};
use cqed_core::spectra::shift::chi_from_diagonalization;
use cqed_core::units::{mhz, to_mhz};
use cqed_core::{PumpSpec, Qubit, SystemSpec};

use super::RunContext;
use crate::config::FloquetCheckConfig;
use crate::error::{CliError, CliResult};
use crate::output::{num, par_map, write_csv};

pub const HEADER: [&str; 9] = [
    "amplitude_Phi0",
    "delta_p_MHz",
    "g_p_MHz",
    "chi_series_MHz",
    "chi_diag_MHz",
    "chi_floquet_MHz",
    "dev_floquet_diag",
    "dev_series_diag",
    "min_overlap",
];

/// The pumped pair as the rotating-frame model sees it: optionally no
/// residual static coupling and a pump scale matched to the coupling law.
pub fn validation_system(sys: &SystemSpec, cfg: &FloquetCheckConfig) -> SystemSpec {
    let target: Qubit = cfg.target.into();
    let mut sys = sys.clone();
    if cfg.match_pump_scale {
        let scale = modulation_matched_pump_scale(&sys, target, sys.static_flux);
        sys.coupler.coupling_mut(target).pump_scale = scale;
    }
    if cfg.zero_residual {
        sys.coupler.coupling_mut(target).residual = 0.0;
    }
    sys
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckPoint {
    pub amplitude: f64,
    pub detuning: f64,
    pub g_p: f64,
    pub chi_series: f64,
    pub chi_diag: f64,
    pub chi_floquet: f64,
    pub min_overlap: f64,
}

impl CheckPoint {
    pub fn deviation(&self) -> f64 {
        (self.chi_floquet - self.chi_diag) / self.chi_diag
    }
}

pub fn evaluate(sys: &SystemSpec, cfg: &FloquetCheckConfig, amplitude: f64, detuning: f64) -> CliResult<CheckPoint> {
    let target: Qubit = cfg.target.into();
    let gap = -sys.detuning(target, sys.static_flux);
    let pump = PumpSpec::new(target, gap + detuning, amplitude)?;
    let g_p = g_p_from_flux(sys, &pump, sys.static_flux)?;
    let alpha = sys.qubit(target).anharmonicity;
    let opts = FloquetOptions {
        steps: cfg.steps,
        scheme: cfg.scheme.into(),
        ..FloquetOptions::default()
    };
    let f = floquet_chi(sys, &pump, &opts)?;
    Ok(CheckPoint {
        amplitude,
        detuning,
        g_p,
        chi_series: chi_parametric_series(g_p, detuning, alpha, DEFAULT_M_MAX).value,
        chi_diag: chi_from_diagonalization(sys, &pump)?.value,
        chi_floquet: f.chi,
        min_overlap: f.min_overlap,
    })
}

/// Compare series, rotating-frame and Floquet shifts; fails with a
/// tolerance error after writing the CSV if any Floquet value strays.
pub fn run(ctx: &RunContext) -> CliResult<Vec<PathBuf>> {
    let cfg = &ctx.config.floquet_check;
    let sys = validation_system(&ctx.system, cfg);
    let grid: Vec<(f64, f64)> = cfg
        .amplitudes
        .iter()
        .flat_map(|&a| cfg.detuning_mhz.iter().map(move |&d| (a, mhz(d))))
        .collect();
    let points = par_map(ctx.jobs, &grid, |&(a, d)| evaluate(&sys, cfg, a, d))?;
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                num(p.amplitude),
                num(to_mhz(p.detuning)),
                num(to_mhz(p.g_p)),
                num(to_mhz(p.chi_series)),
                num(to_mhz(p.chi_diag)),
                num(to_mhz(p.chi_floquet)),
                num(p.deviation()),
                num((p.chi_series - p.chi_diag) / p.chi_diag),
                num(p.min_overlap),
            ]
        })
        .collect();
    let written = vec![write_csv(&ctx.file("floquet_check.csv")?, &HEADER, &rows)?];
    let worst = points.iter().map(|p| p.deviation().abs()).fold(0.0, f64::max);
    if !(worst <= cfg.tolerance) {
        return Err(CliError::Tolerance(format!(
            "Floquet shift deviates from diagonalization by {worst:.3e} (tolerance {})",
            cfg.tolerance
        )));
    }
    Ok(written)
}
