use std::path::PathBuf;

use cqed_core::parametric::chi_static;
use cqed_core::units::{to_ghz, to_mhz};
use cqed_core::Qubit;

use super::RunContext;
use crate::error::CliResult;
use crate::output::{line_plot, num, par_map, write_csv};

pub const HEADER: [&str; 11] = [
    "flux_Phi0",
    "f_L_GHz",
    "f_R_GHz",
    "f_C_GHz",
    "g_sL_MHz",
    "g_sR_MHz",
    "chi_sL_MHz",
    "chi_sR_MHz",
    "df_L_dphi_GHz",
    "df_R_dphi_GHz",
    "df_C_dphi_GHz",
];

/// Mode frequencies, static couplings, static shifts and flux slopes.
pub fn run(ctx: &RunContext) -> CliResult<Vec<PathBuf>> {
    let sys = &ctx.system;
    let flux = ctx.config.fluxmap.flux.values();
    let rows: Vec<[f64; 11]> = par_map(ctx.jobs, &flux, |&phi| {
        let chi = |q: Qubit| {
            chi_static(
                sys.coupler.static_coupling(q, phi),
                sys.detuning(q, phi),
                sys.qubit(q).anharmonicity,
            )
            .value
        };
        Ok([
            phi,
            to_ghz(sys.left.frequency(phi)),
            to_ghz(sys.right.frequency(phi)),
            to_ghz(sys.cavity.frequency(phi)),
            to_mhz(sys.coupler.static_coupling(Qubit::L, phi)),
            to_mhz(sys.coupler.static_coupling(Qubit::R, phi)),
            to_mhz(chi(Qubit::L)),
            to_mhz(chi(Qubit::R)),
            to_ghz(sys.left.flux_model.derivative(phi, 1)?),
            to_ghz(sys.right.flux_model.derivative(phi, 1)?),
            to_ghz(sys.cavity.flux_model.derivative(phi, 1)?),
        ])
    })?;
    let records: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|&v| num(v)).collect()).collect();
    let written = vec![write_csv(&ctx.file("fluxmap.csv")?, &HEADER, &records)?];
    if ctx.plot {
        let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
        line_plot(
            &ctx.file("fluxmap.svg")?,
            "mode frequencies",
            "flux (Phi0)",
            "frequency (GHz)",
            &flux,
            &[("L", col(1)), ("R", col(2)), ("C", col(3))],
        )?;
    }
    Ok(written)
}
