use std::fmt;

use crate::error::{Error, Result};
use crate::model::flux::FluxModel;
use crate::units::{ghz, mhz};

/// The three resonant modes. Composite spaces are always ordered L, R, C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeLabel {
    L,
    R,
    C,
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModeLabel::L => "L",
            ModeLabel::R => "R",
            ModeLabel::C => "C",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Qubit {
    L,
    R,
}

impl Qubit {
    pub fn label(self) -> ModeLabel {
        match self {
            Qubit::L => ModeLabel::L,
            Qubit::R => ModeLabel::R,
        }
    }

    pub fn other(self) -> Qubit {
        match self {
            Qubit::L => Qubit::R,
            Qubit::R => Qubit::L,
        }
    }

    fn field(self) -> &'static str {
        match self {
            Qubit::L => "left",
            Qubit::R => "right",
        }
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.label().fmt(f)
    }
}

/// Transmon level, `|g>`, `|e>`, `|f>` and above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(pub usize);

impl Level {
    pub const G: Level = Level(0);
    pub const E: Level = Level(1);
    pub const F: Level = Level(2);

    pub fn parse(s: &str) -> Option<Level> {
        match s {
            "g" => Some(Level::G),
            "e" => Some(Level::E),
            "f" => Some(Level::F),
            _ => s.parse().ok().map(Level),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => f.write_str("g"),
            1 => f.write_str("e"),
            2 => f.write_str("f"),
            n => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpec {
    pub label: ModeLabel,
    pub flux_model: FluxModel,
    /// `omega_ef - omega_ge`; negative for transmons, zero for the cavity.
    pub anharmonicity: f64,
    pub dim: usize,
}

impl ModeSpec {
    pub fn frequency(&self, phi: f64) -> f64 {
        self.flux_model.frequency(phi)
    }

    pub fn slope(&self, phi: f64) -> f64 {
        self.flux_model
            .derivative(phi, 1)
            .expect("first derivative is always defined")
    }

    fn validate(&self, field: &str) -> Result<()> {
        match self.label {
            ModeLabel::C => {
                if self.anharmonicity != 0.0 {
                    return Err(Error::param(
                        format!("{field}.anharmonicity"),
                        "the cavity is linear (anharmonicity 0)",
                    ));
                }
            }
            _ => {
                if !(self.anharmonicity < 0.0 && self.anharmonicity.is_finite()) {
                    return Err(Error::param(
                        format!("{field}.anharmonicity"),
                        "transmon anharmonicity must be negative",
                    ));
                }
            }
        }
        if self.dim < 2 {
            return Err(Error::param(format!("{field}.dim"), "truncation must keep at least 2 levels"));
        }
        if self.flux_model.min_over_period(512) <= 0.0 {
            return Err(Error::param(format!("{field}.flux"), "frequency must stay positive"));
        }
        Ok(())
    }
}

/// Coupler parameters for one transmon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitCoupling {
    /// `d g_s / d phi` of the linearized static coupling law.
    pub static_slope: f64,
    /// Floor on `|g_s|` near the cancellation flux.
    pub residual: f64,
    /// Dimensionless factor in `g_p = c * dphi_p * sqrt(|omega_k' omega_C'|)`.
    pub pump_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplerSpec {
    pub cancellation_flux: f64,
    pub left: QubitCoupling,
    pub right: QubitCoupling,
}

impl CouplerSpec {
    pub fn coupling(&self, qubit: Qubit) -> &QubitCoupling {
        match qubit {
            Qubit::L => &self.left,
            Qubit::R => &self.right,
        }
    }

    pub fn coupling_mut(&mut self, qubit: Qubit) -> &mut QubitCoupling {
        match qubit {
            Qubit::L => &mut self.left,
            Qubit::R => &mut self.right,
        }
    }

    /// `g_s(phi) = s (phi - phi_c)`, magnitude floored at the residual. At the
    /// cancellation flux itself the floor is taken with positive sign.
    ///
    /// `phi - phi_c` is wrapped into `[-1/2, 1/2)` so the law is 1-periodic;
    /// only the sign of `g_s` jumps, half a period away from `phi_c`.
    pub fn static_coupling(&self, qubit: Qubit, phi: f64) -> f64 {
        let c = self.coupling(qubit);
        let offset = phi - self.cancellation_flux;
        let linear = c.static_slope * (offset - (offset + 0.5).floor());
        if linear.abs() >= c.residual {
            linear
        } else if linear < 0.0 {
            -c.residual
        } else {
            c.residual
        }
    }

    /// Pump-induced coupling from the flux slopes of the qubit and cavity.
    pub fn pump_coupling(&self, qubit: Qubit, amplitude: f64, qubit_slope: f64, cavity_slope: f64) -> f64 {
        self.coupling(qubit).pump_scale * amplitude * (qubit_slope * cavity_slope).abs().sqrt()
    }

    fn validate(&self) -> Result<()> {
        if !self.cancellation_flux.is_finite() {
            return Err(Error::param("coupler.cancellation_flux", "must be finite"));
        }
        for q in [Qubit::L, Qubit::R] {
            let c = self.coupling(q);
            let f = q.field();
            if !c.static_slope.is_finite() {
                return Err(Error::param(format!("coupler.{f}.static_slope"), "must be finite"));
            }
            if !(c.residual >= 0.0 && c.residual.is_finite()) {
                return Err(Error::param(format!("coupler.{f}.residual"), "must be non-negative"));
            }
            if !(c.pump_scale >= 0.0 && c.pump_scale.is_finite()) {
                return Err(Error::param(format!("coupler.{f}.pump_scale"), "must be non-negative"));
            }
        }
        Ok(())
    }
}

/// A sinusoidal flux pump `phi(t) = phi_s + amplitude * sin(frequency * t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpSpec {
    pub target: Qubit,
    pub frequency: f64,
    /// Flux-modulation amplitude in flux quanta.
    pub amplitude: f64,
    /// Instrument amplitude (mV) this flux amplitude was derived from, if any.
    pub instrument_amplitude: Option<f64>,
}

impl PumpSpec {
    pub fn new(target: Qubit, frequency: f64, amplitude: f64) -> Result<Self> {
        let pump = Self {
            target,
            frequency,
            amplitude,
            instrument_amplitude: None,
        };
        pump.validate()?;
        Ok(pump)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(Error::param("pump.frequency", "must be positive"));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::param("pump.amplitude", "must be non-negative"));
        }
        if self.amplitude > 0.1 {
            log::warn!(
                "pump amplitude {} flux quanta is not small; linearized pump coupling is unreliable",
                self.amplitude
            );
        }
        Ok(())
    }

    /// Same pump at a different frequency.
    pub fn at_frequency(&self, frequency: f64) -> Self {
        Self {
            frequency,
            ..self.clone()
        }
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        Self {
            amplitude,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub left: ModeSpec,
    pub right: ModeSpec,
    pub cavity: ModeSpec,
    pub coupler: CouplerSpec,
    /// Total cavity linewidth.
    pub kappa: f64,
    /// Static flux bias.
    pub static_flux: f64,
}

impl SystemSpec {
    pub fn qubit(&self, qubit: Qubit) -> &ModeSpec {
        match qubit {
            Qubit::L => &self.left,
            Qubit::R => &self.right,
        }
    }

    pub fn qubit_mut(&mut self, qubit: Qubit) -> &mut ModeSpec {
        match qubit {
            Qubit::L => &mut self.left,
            Qubit::R => &mut self.right,
        }
    }

    pub fn mode(&self, label: ModeLabel) -> &ModeSpec {
        match label {
            ModeLabel::L => &self.left,
            ModeLabel::R => &self.right,
            ModeLabel::C => &self.cavity,
        }
    }

    /// `Delta_k = omega_k - omega_C` at flux `phi`.
    pub fn detuning(&self, qubit: Qubit, phi: f64) -> f64 {
        self.qubit(qubit).frequency(phi) - self.cavity.frequency(phi)
    }

    pub fn validate(&self) -> Result<()> {
        for (mode, field, label) in [
            (&self.left, "left", ModeLabel::L),
            (&self.right, "right", ModeLabel::R),
            (&self.cavity, "cavity", ModeLabel::C),
        ] {
            if mode.label != label {
                return Err(Error::param(format!("{field}.label"), format!("expected {label}")));
            }
            mode.validate(field)?;
        }
        self.coupler.validate()?;
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::param("kappa", "cavity linewidth must be positive"));
        }
        if !self.static_flux.is_finite() {
            return Err(Error::param("static_flux", "must be finite"));
        }
        for q in [Qubit::L, Qubit::R] {
            let delta = self.detuning(q, self.static_flux);
            let g = self.coupler.static_coupling(q, self.static_flux);
            if g.abs() > 0.1 * delta.abs() {
                log::warn!(
                    "qubit {q}: |g_s| = {:.3e} is not small against |Delta| = {:.3e}; dispersive formulas unreliable",
                    g.abs(),
                    delta.abs()
                );
            }
        }
        Ok(())
    }

    /// Parameters matched to the quoted device: maxima 9.4/6.4/5.9 GHz at
    /// zero flux, anharmonicities -180/-220 MHz, kappa 10 MHz and cancellation
    /// flux -0.386. Residual couplings are chosen so that the static shift at
    /// the cancellation flux is 300 kHz (R) and 150 kHz (L); pump scales are
    /// set so the linearized pump law matches the coupling modulation
    /// `s * dphi / 2` of the static law at that bias.
    pub fn paper_defaults() -> SystemSpec {
        let phi_c = -0.386;
        let mut sys = SystemSpec {
            left: ModeSpec {
                label: ModeLabel::L,
                flux_model: FluxModel::squid_like(ghz(5.9), 0.5, 0.0).unwrap(),
                anharmonicity: mhz(-180.0),
                dim: 4,
            },
            right: ModeSpec {
                label: ModeLabel::R,
                flux_model: FluxModel::squid_like(ghz(6.4), 0.55, 0.0).unwrap(),
                anharmonicity: mhz(-220.0),
                dim: 5,
            },
            cavity: ModeSpec {
                label: ModeLabel::C,
                flux_model: FluxModel::squid_like(ghz(9.4), 0.6, 0.0).unwrap(),
                anharmonicity: 0.0,
                dim: 4,
            },
            coupler: CouplerSpec {
                cancellation_flux: phi_c,
                left: QubitCoupling {
                    static_slope: mhz(1800.0),
                    residual: mhz(PAPER_RESIDUAL_L_MHZ),
                    pump_scale: 0.0,
                },
                right: QubitCoupling {
                    static_slope: mhz(2000.0),
                    residual: mhz(PAPER_RESIDUAL_R_MHZ),
                    pump_scale: 0.0,
                },
            },
            kappa: mhz(10.0),
            static_flux: phi_c,
        };
        for q in [Qubit::L, Qubit::R] {
            let scale = modulation_matched_pump_scale(&sys, q, phi_c);
            sys.coupler.coupling_mut(q).pump_scale = (scale * 1e4).round() / 1e4;
        }
        sys
    }
}

pub(crate) const PAPER_RESIDUAL_R_MHZ: f64 = 99.9;
pub(crate) const PAPER_RESIDUAL_L_MHZ: f64 = 93.1;

/// Pump scale for which `c * dphi * sqrt(|omega_k' omega_C'|)` equals the
/// resonant sideband `|s_k| dphi / 2` produced by modulating the linear
/// static coupling law at flux `phi`.
pub fn modulation_matched_pump_scale(sys: &SystemSpec, qubit: Qubit, phi: f64) -> f64 {
    let slopes = (sys.qubit(qubit).slope(phi) * sys.cavity.slope(phi)).abs().sqrt();
    if slopes == 0.0 {
        return 0.0;
    }
    sys.coupler.coupling(qubit).static_slope.abs() / (2.0 * slopes)
}
