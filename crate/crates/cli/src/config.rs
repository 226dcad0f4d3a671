//! TOML run configuration. Frequencies are written in GHz, couplings,
//! detunings and rates in MHz, flux in flux quanta.

use std::path::Path;

use serde::{Deserialize, Serialize};

use cqed_core::measurement::TransferFunction;
use cqed_core::model::{CouplerSpec, QubitCoupling};
use cqed_core::units::{ghz, mhz};
use cqed_core::{FluxModel, Level, ModeLabel, ModeSpec, Qubit, SystemSpec};

use crate::error::{CliError, CliResult};

pub const PAPER_DEFAULTS_TOML: &str = include_str!("../configs/paper_defaults.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QubitName {
    L,
    R,
}

impl From<QubitName> for Qubit {
    fn from(q: QubitName) -> Qubit {
        match q {
            QubitName::L => Qubit::L,
            QubitName::R => Qubit::R,
        }
    }
}

/// Evenly spaced grid, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Self { start, stop, points }
    }

    pub fn validate(&self, field: &str) -> CliResult<()> {
        if self.points == 0 {
            return Err(CliError::config(field, "grid needs at least one point"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::config(field, "grid ends must be finite"));
        }
        if self.points > 1 && self.stop <= self.start {
            return Err(CliError::config(field, "grid must be increasing"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.start + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum FluxConfig {
    SquidLike { f_max_ghz: f64, asymmetry: f64, offset: f64 },
    Tabulated { flux: Vec<f64>, f_ghz: Vec<f64> },
}

impl FluxConfig {
    fn to_model(&self, field: &str) -> CliResult<FluxModel> {
        let model = match self {
            FluxConfig::SquidLike {
                f_max_ghz,
                asymmetry,
                offset,
            } => FluxModel::squid_like(ghz(*f_max_ghz), *asymmetry, *offset),
            FluxConfig::Tabulated { flux, f_ghz } => {
                FluxModel::tabulated(flux.clone(), f_ghz.iter().map(|&f| ghz(f)).collect())
            }
        };
        model.map_err(|e| CliError::nested(field, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub anharmonicity_mhz: f64,
    pub dim: usize,
    pub flux: FluxConfig,
}

impl ModeConfig {
    fn to_spec(&self, label: ModeLabel, field: &str) -> CliResult<ModeSpec> {
        Ok(ModeSpec {
            label,
            flux_model: self.flux.to_model(&format!("{field}.flux"))?,
            anharmonicity: mhz(self.anharmonicity_mhz),
            dim: self.dim,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub static_slope_mhz: f64,
    pub residual_mhz: f64,
    pub pump_scale: f64,
}

impl From<CouplingConfig> for QubitCoupling {
    fn from(c: CouplingConfig) -> Self {
        QubitCoupling {
            static_slope: mhz(c.static_slope_mhz),
            residual: mhz(c.residual_mhz),
            pump_scale: c.pump_scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplerConfig {
    pub cancellation_flux: f64,
    pub left: CouplingConfig,
    pub right: CouplingConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub static_flux: f64,
    pub kappa_mhz: f64,
    pub left: ModeConfig,
    pub right: ModeConfig,
    pub cavity: ModeConfig,
    pub coupler: CouplerConfig,
}

impl SystemConfig {
    pub fn to_spec(&self) -> CliResult<SystemSpec> {
        let spec = SystemSpec {
            left: self.left.to_spec(ModeLabel::L, "system.left")?,
            right: self.right.to_spec(ModeLabel::R, "system.right")?,
            cavity: self.cavity.to_spec(ModeLabel::C, "system.cavity")?,
            coupler: CouplerSpec {
                cancellation_flux: self.coupler.cancellation_flux,
                left: self.coupler.left.into(),
                right: self.coupler.right.into(),
            },
            kappa: mhz(self.kappa_mhz),
            static_flux: self.static_flux,
        };
        spec.validate().map_err(|e| CliError::nested("system", e))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub target: QubitName,
    /// Flux-modulation amplitude in flux quanta.
    pub amplitude: f64,
    pub states: Vec<String>,
    /// Pump detuning from `|Delta|` at the static bias.
    pub pump_detuning_mhz: Grid,
    /// Probe offset from the cavity frequency at the static bias.
    pub probe_offset_mhz: Grid,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            target: QubitName::R,
            amplitude: 0.005,
            states: vec!["g".into(), "e".into(), "f".into()],
            pump_detuning_mhz: Grid::new(-100.0, 540.0, 161),
            probe_offset_mhz: Grid::new(-40.0, 40.0, 161),
        }
    }
}

impl SpectrumConfig {
    pub fn levels(&self) -> CliResult<Vec<Level>> {
        if self.states.is_empty() {
            return Err(CliError::config("spectrum.states", "need at least one initial state"));
        }
        self.states
            .iter()
            .map(|s| {
                Level::parse(s)
                    .filter(|l| l.0 <= 2)
                    .ok_or_else(|| CliError::config("spectrum.states", format!("unknown state {s:?}, expected g, e or f")))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChiSweepConfig {
    pub target: QubitName,
    pub amplitudes_mv: Vec<f64>,
    /// Flux quanta per mV at the device.
    pub flux_per_mv: f64,
    pub detuning_mhz: Grid,
    pub m_max: usize,
    /// Crossing window around `Delta_p = 0` used to fit `g_p`.
    pub fit_window_mhz: f64,
    pub fit_points: usize,
}

impl Default for ChiSweepConfig {
    fn default() -> Self {
        Self {
            target: QubitName::R,
            amplitudes_mv: vec![50.0, 100.0, 150.0, 200.0, 250.0, 300.0],
            flux_per_mv: 0.005 / 300.0,
            detuning_mhz: Grid::new(-600.0, 600.0, 241),
            m_max: 3,
            fit_window_mhz: 40.0,
            fit_points: 81,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluxmapConfig {
    pub flux: Grid,
}

impl Default for FluxmapConfig {
    fn default() -> Self {
        Self {
            flux: Grid::new(-0.5, 0.5, 201),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DephasingConfig {
    pub target: QubitName,
    pub flux: Grid,
    pub n_bar: Vec<f64>,
    /// Flux-noise amplitude in flux quanta.
    pub flux_noise: f64,
    pub residual_rate_mhz: f64,
}

impl Default for DephasingConfig {
    fn default() -> Self {
        Self {
            target: QubitName::R,
            flux: Grid::new(-0.45, -0.3, 31),
            n_bar: vec![0.0, 0.5, 1.0, 2.0],
            flux_noise: 1e-6,
            residual_rate_mhz: 0.005,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferConfig {
    pub frequencies_ghz: Vec<f64>,
    /// Flux quanta per mV.
    pub gains: Vec<f64>,
}

impl TransferConfig {
    /// Two-to-one sinusoidal ripple sampled every 25 MHz.
    pub fn ripple(start_ghz: f64, stop_ghz: f64, mean_gain: f64) -> Self {
        let n = ((stop_ghz - start_ghz) / 0.025).round() as usize + 1;
        let frequencies_ghz: Vec<f64> = Grid::new(start_ghz, stop_ghz, n).values();
        let gains = frequencies_ghz
            .iter()
            .map(|f| mean_gain * (1.0 + (2.0 * std::f64::consts::PI * (f - start_ghz) / 0.3).sin() / 3.0))
            .collect();
        Self { frequencies_ghz, gains }
    }

    pub fn to_transfer(&self) -> CliResult<TransferFunction> {
        TransferFunction::new(self.frequencies_ghz.iter().map(|&f| ghz(f)).collect(), self.gains.clone())
            .map_err(|e| CliError::nested("calibrate.transfer", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrateConfig {
    pub target: QubitName,
    /// Bias of the pumped mode; should sit at a frequency extremum.
    pub static_flux: f64,
    pub instrument_amplitude_mv: f64,
    pub lambda0: f64,
    pub anchor_ghz: f64,
    pub pump_ghz: Grid,
    pub transfer: TransferConfig,
}

impl Default for CalibrateConfig {
    fn default() -> Self {
        Self {
            target: QubitName::R,
            static_flux: 0.0,
            instrument_amplitude_mv: 100.0,
            lambda0: 1.0,
            anchor_ghz: 3.03,
            pump_ghz: Grid::new(2.5, 3.4, 91),
            transfer: TransferConfig::ripple(2.5, 3.4, 1.5e-4),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Midpoint,
    CommutatorFree4,
}

impl From<SchemeName> for cqed_core::floquet::Scheme {
    fn from(s: SchemeName) -> Self {
        match s {
            SchemeName::Midpoint => cqed_core::floquet::Scheme::Midpoint,
            SchemeName::CommutatorFree4 => cqed_core::floquet::Scheme::CommutatorFree4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FloquetCheckConfig {
    pub target: QubitName,
    pub amplitudes: Vec<f64>,
    pub detuning_mhz: Vec<f64>,
    pub steps: usize,
    pub scheme: SchemeName,
    /// Drop the residual static coupling of the pumped qubit so the driven
    /// pair matches the rotating-frame model.
    pub zero_residual: bool,
    /// Replace the pump scale by the modulation-matched value.
    pub match_pump_scale: bool,
    /// Largest accepted `|chi_floquet - chi_diag| / |chi_diag|`.
    pub tolerance: f64,
}

impl Default for FloquetCheckConfig {
    fn default() -> Self {
        Self {
            target: QubitName::R,
            amplitudes: vec![0.005, 0.0025],
            detuning_mhz: vec![-50.0],
            steps: 1024,
            scheme: SchemeName::Midpoint,
            zero_residual: true,
            match_pump_scale: true,
            tolerance: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system: SystemConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub chi_sweep: ChiSweepConfig,
    #[serde(default)]
    pub fluxmap: FluxmapConfig,
    #[serde(default)]
    pub dephasing: DephasingConfig,
    #[serde(default)]
    pub calibrate: CalibrateConfig,
    #[serde(default)]
    pub floquet_check: FloquetCheckConfig,
}

impl Config {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string_pretty(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn paper_defaults() -> Self {
        Self::from_toml(PAPER_DEFAULTS_TOML).expect("bundled configuration is valid")
    }

    pub fn validate(&self) -> CliResult<()> {
        self.system.to_spec()?;
        let s = &self.spectrum;
        s.levels()?;
        s.pump_detuning_mhz.validate("spectrum.pump_detuning_mhz")?;
        s.probe_offset_mhz.validate("spectrum.probe_offset_mhz")?;
        non_negative(s.amplitude, "spectrum.amplitude")?;

        let c = &self.chi_sweep;
        if c.amplitudes_mv.is_empty() {
            return Err(CliError::config("chi_sweep.amplitudes_mv", "need at least one amplitude"));
        }
        for a in &c.amplitudes_mv {
            non_negative(*a, "chi_sweep.amplitudes_mv")?;
        }
        positive(c.flux_per_mv, "chi_sweep.flux_per_mv")?;
        c.detuning_mhz.validate("chi_sweep.detuning_mhz")?;
        if c.m_max == 0 {
            return Err(CliError::config("chi_sweep.m_max", "must be at least 1"));
        }
        positive(c.fit_window_mhz, "chi_sweep.fit_window_mhz")?;
        if c.fit_points < cqed_core::spectra::crossing::FIT_POINTS {
            return Err(CliError::config(
                "chi_sweep.fit_points",
                format!("need at least {} points", cqed_core::spectra::crossing::FIT_POINTS),
            ));
        }

        self.fluxmap.flux.validate("fluxmap.flux")?;

        let d = &self.dephasing;
        d.flux.validate("dephasing.flux")?;
        if d.n_bar.is_empty() {
            return Err(CliError::config("dephasing.n_bar", "need at least one photon number"));
        }
        for n in &d.n_bar {
            non_negative(*n, "dephasing.n_bar")?;
        }
        non_negative(d.flux_noise, "dephasing.flux_noise")?;
        non_negative(d.residual_rate_mhz, "dephasing.residual_rate_mhz")?;

        let k = &self.calibrate;
        k.pump_ghz.validate("calibrate.pump_ghz")?;
        k.transfer.to_transfer()?;
        positive(k.instrument_amplitude_mv, "calibrate.instrument_amplitude_mv")?;
        positive(k.lambda0, "calibrate.lambda0")?;
        positive(k.anchor_ghz, "calibrate.anchor_ghz")?;

        let f = &self.floquet_check;
        if f.amplitudes.is_empty() || f.detuning_mhz.is_empty() {
            return Err(CliError::config("floquet_check", "need at least one amplitude and detuning"));
        }
        for a in &f.amplitudes {
            non_negative(*a, "floquet_check.amplitudes")?;
        }
        if f.steps < cqed_core::floquet::MIN_STEPS {
            return Err(CliError::config(
                "floquet_check.steps",
                format!("need at least {}", cqed_core::floquet::MIN_STEPS),
            ));
        }
        positive(f.tolerance, "floquet_check.tolerance")?;
        Ok(())
    }
}

fn positive(v: f64, field: &str) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(field, "must be positive"))
    }
}

fn non_negative(v: f64, field: &str) -> CliResult<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(field, "must be non-negative"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_defaults_match_core_defaults() {
        let cfg = Config::paper_defaults();
        assert_eq!(cfg.system.to_spec().unwrap(), SystemSpec::paper_defaults());
    }

    #[test]
    fn round_trip_is_identity() {
        let cfg = Config::paper_defaults();
        let text = cfg.to_toml().unwrap();
        assert_eq!(Config::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn grid_values_hit_both_ends() {
        let v = Grid::new(-1.0, 1.0, 5).values();
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(Grid::new(3.0, 3.0, 1).values(), vec![3.0]);
    }

    #[test]
    fn decreasing_grid_rejected_with_path() {
        let mut cfg = Config::paper_defaults();
        cfg.fluxmap.flux = Grid::new(0.5, -0.5, 11);
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("fluxmap.flux"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn bad_system_field_reports_path() {
        let text = PAPER_DEFAULTS_TOML.replace("kappa_mhz = 10.0", "kappa_mhz = -1.0");
        let err = Config::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("kappa"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn unknown_state_rejected() {
        let mut cfg = Config::paper_defaults();
        cfg.spectrum.states = vec!["h".into()];
        assert!(cfg.validate().unwrap_err().to_string().contains("spectrum.states"));
    }

    #[test]
    fn ripple_is_two_to_one() {
        let t = TransferConfig::ripple(2.5, 3.4, 1.0);
        let max = t.gains.iter().copied().fold(f64::MIN, f64::max);
        let min = t.gains.iter().copied().fold(f64::MAX, f64::min);
        assert!((max / min - 2.0).abs() < 1e-9);
        assert_eq!(t.frequencies_ghz.len(), 37);
    }
}
