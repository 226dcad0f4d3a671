//! Shared fixtures for the benchmarks.

use cqed_core::units::mhz;
use cqed_core::{PumpSpec, Qubit, SystemSpec};

/// Pump on the right transmon at `detuning_mhz` from `|Delta_R|`.
pub fn operating_pump(sys: &SystemSpec, detuning_mhz: f64, amplitude: f64) -> PumpSpec {
    let gap = -sys.detuning(Qubit::R, sys.static_flux);
    PumpSpec::new(Qubit::R, gap + mhz(detuning_mhz), amplitude).expect("positive pump frequency")
}
