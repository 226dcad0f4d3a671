use std::path::PathBuf;

use cqed_core::measurement::{chi_from_dephasing_slope, dephasing_rate, linear_fit, CoherenceModel};
use cqed_core::parametric::chi_static;
use cqed_core::units::{mhz, to_mhz};
use cqed_core::Qubit;

use super::RunContext;
use crate::error::CliResult;
use crate::output::{num, opt_num, par_map, write_csv};

pub const HEADER: [&str; 7] = [
    "flux_Phi0",
    "n_bar",
    "chi_MHz",
    "gamma_n_MHz",
    "gamma_total_MHz",
    "t2_us",
    "chi_extracted_MHz",
];

/// Photon-shot-noise dephasing and Ramsey times against flux and photon
/// number. `chi_extracted_MHz` inverts the slope of the total rate over the
/// photon numbers at each flux.
pub fn run(ctx: &RunContext) -> CliResult<Vec<PathBuf>> {
    let cfg = &ctx.config.dephasing;
    let sys = &ctx.system;
    let target: Qubit = cfg.target.into();
    let mode = sys.qubit(target);
    let model = CoherenceModel::new(cfg.flux_noise, mhz(cfg.residual_rate_mhz))?;
    let flux = cfg.flux.values();

    let blocks = par_map(ctx.jobs, &flux, |&phi| {
        let chi = chi_static(sys.coupler.static_coupling(target, phi), sys.detuning(target, phi), mode.anharmonicity).value;
        let totals = cfg
            .n_bar
            .iter()
            .map(|&n| model.total_rate(phi, &mode.flux_model, n, sys.kappa, chi))
            .collect::<cqed_core::Result<Vec<f64>>>()?;
        let points: Vec<(f64, f64)> = cfg.n_bar.iter().copied().zip(totals.iter().copied()).collect();
        let extracted = match linear_fit(&points) {
            Ok(fit) => Some(chi_from_dephasing_slope(fit.slope.max(0.0), sys.kappa)?.value),
            Err(_) => None,
        };
        Ok(cfg
            .n_bar
            .iter()
            .zip(&totals)
            .map(|(&n, &total)| {
                let t2 = if total > 0.0 { 1e6 / total } else { f64::INFINITY };
                vec![
                    num(phi),
                    num(n),
                    num(to_mhz(chi)),
                    num(to_mhz(dephasing_rate(n, sys.kappa, chi))),
                    num(to_mhz(total)),
                    num(t2),
                    opt_num(extracted.map(to_mhz)),
                ]
            })
            .collect::<Vec<_>>())
    })?;
    let rows: Vec<Vec<String>> = blocks.into_iter().flatten().collect();
    Ok(vec![write_csv(&ctx.file("dephasing.csv")?, &HEADER, &rows)?])
}
