//! Closed-form dispersive shifts, pump-coupling law, regime classification
//! and shift additivity.

use std::fmt;

use crate::error::Result;
use crate::model::{PumpSpec, SystemSpec};

/// Pole exclusion half-width in units of the coupling.
pub const GUARD_BAND: f64 = 4.0;
/// Number of pole terms kept by default in the parametric series.
pub const DEFAULT_M_MAX: usize = 3;

/// Why a value should not be trusted as-is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    /// Within the guard band of the pole at `Delta = -order * alpha`.
    NearPole { order: usize },
    /// A dressed-state or branch label had weight below one half.
    AmbiguousLabel,
    /// Dephasing slope within 1% of its saturation value.
    NearSaturation,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flag::NearPole { order } => write!(f, "near_pole_{order}"),
            Flag::AmbiguousLabel => f.write_str("ambiguous_label"),
            Flag::NearSaturation => f.write_str("near_saturation"),
        }
    }
}

/// A value together with an optional reliability flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub flag: Option<Flag>,
}

impl Estimate {
    pub fn clean(value: f64) -> Self {
        Self { value, flag: None }
    }

    pub fn flagged(value: f64, flag: Flag) -> Self {
        Self {
            value,
            flag: Some(flag),
        }
    }

    pub fn is_flagged(&self) -> bool {
        self.flag.is_some()
    }
}

/// First pole of `0, -alpha, ..., -m_max alpha` lying within `GUARD_BAND * g`
/// of `delta`.
fn pole_hit(g: f64, delta: f64, alpha: f64, m_max: usize) -> Option<usize> {
    let band = GUARD_BAND * g.abs();
    (0..=m_max).find(|&m| (delta + m as f64 * alpha).abs() <= band)
}

fn finish(value: f64, pole: Option<usize>) -> Estimate {
    match pole {
        Some(order) => Estimate::flagged(value, Flag::NearPole { order }),
        None => Estimate::clean(value),
    }
}

/// `(g^2 / Delta) * alpha / (alpha + Delta)`.
pub fn chi_static(g: f64, delta: f64, alpha: f64) -> Estimate {
    if g == 0.0 {
        return Estimate::clean(0.0);
    }
    let value = g * g / delta * (alpha / (alpha + delta));
    finish(value, pole_hit(g, delta, alpha, 1))
}

/// `(g^2/Delta) [alpha/(alpha+Delta) - sum_{m=2..m_max} Delta/(m alpha + Delta)]`.
///
/// With `m_max = 1` this is [`chi_static`] with `(g, Delta) -> (g_p, Delta_p)`.
pub fn chi_parametric_series(g: f64, delta: f64, alpha: f64, m_max: usize) -> Estimate {
    let m_max = m_max.max(1);
    if g == 0.0 {
        return Estimate::clean(0.0);
    }
    let mut bracket = alpha / (alpha + delta);
    for m in 2..=m_max {
        bracket -= delta / (m as f64 * alpha + delta);
    }
    finish(g * g / delta * bracket, pole_hit(g, delta, alpha, m_max))
}

/// `pump_scale * dphi * sqrt(|omega_k'(phi) omega_C'(phi)|)` for the pumped
/// qubit.
pub fn g_p_from_flux(sys: &SystemSpec, pump: &PumpSpec, phi: f64) -> Result<f64> {
    let qubit_slope = sys.qubit(pump.target).flux_model.derivative(phi, 1)?;
    let cavity_slope = sys.cavity.flux_model.derivative(phi, 1)?;
    let scale = sys.qubit(pump.target).flux_model.scale() * 1e-9;
    if qubit_slope.abs() < scale || cavity_slope.abs() < scale {
        log::info!("flat bias at phi = {phi}: parametric coupling vanishes");
        return Ok(0.0);
    }
    Ok(sys
        .coupler
        .pump_coupling(pump.target, pump.amplitude, qubit_slope, cavity_slope))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Resonant,
    Dispersive,
    Straddling,
    MultiphotonGuard,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Resonant => "resonant",
            Regime::Dispersive => "dispersive",
            Regime::Straddling => "straddling",
            Regime::MultiphotonGuard => "multiphoton_guard",
        })
    }
}

/// Classify a pump detuning against the poles of the dispersive shift.
///
/// Straddling is the window between the two single-photon poles,
/// `0 < Delta_p < -alpha`, where the shift has the opposite sign from the far
/// dispersive regime.
pub fn classify_regime(g: f64, delta_p: f64, alpha: f64) -> Regime {
    let band = GUARD_BAND * g.abs();
    let near = |m: f64| (delta_p + m * alpha).abs() <= band;
    if near(0.0) || near(1.0) {
        Regime::Resonant
    } else if near(2.0) || near(3.0) {
        Regime::MultiphotonGuard
    } else if delta_p > 0.0 && delta_p < -alpha {
        Regime::Straddling
    } else {
        Regime::Dispersive
    }
}

/// `chi_s + sum chi_p`; the first flag found is carried through.
pub fn total_shift(chi_s: Estimate, chi_p: &[Estimate]) -> Estimate {
    let value = chi_s.value + chi_p.iter().map(|c| c.value).sum::<f64>();
    let flag = std::iter::once(&chi_s)
        .chain(chi_p)
        .find_map(|c| c.flag);
    Estimate { value, flag }
}
