//! Flux-window averaged frequency and the pump-amplitude calibration built on
//! it.

use crate::error::{Error, Result};
use crate::model::FluxModel;

/// Relative tolerance of the adaptive quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;
/// Shifts below this fraction of the largest are excluded from calibration.
pub const SHIFT_FLOOR: f64 = 1e-6;

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to relative tolerance
/// `rel_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    adaptive(&f, a, b, fa, fm, fb, whole, rel_tol * scale, 40)
}

/// Mean of `omega(phi)` over `[phi_s - dphi/2, phi_s + dphi/2]`.
pub fn time_averaged_frequency(flux_model: &FluxModel, phi_s: f64, dphi: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&dphi) {
        return Err(Error::param("dphi", "window must lie in [0, 0.5)"));
    }
    if dphi == 0.0 {
        return Ok(flux_model.frequency(phi_s));
    }
    let total = integrate(
        |p| flux_model.frequency(p),
        phi_s - 0.5 * dphi,
        phi_s + 0.5 * dphi,
        QUADRATURE_TOL,
    );
    Ok(total / dphi)
}

/// Quadratic approximation `omega + omega'' dphi^2 / 24`.
pub fn time_averaged_frequency_series(flux_model: &FluxModel, phi_s: f64, dphi: f64) -> Result<f64> {
    Ok(flux_model.frequency(phi_s) + flux_model.derivative(phi_s, 2)? * dphi * dphi / 24.0)
}

/// Instrument-to-flux gain versus pump frequency, linearly interpolated and
/// held constant outside the sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    frequencies: Vec<f64>,
    gains: Vec<f64>,
}

impl TransferFunction {
    pub fn new(frequencies: Vec<f64>, gains: Vec<f64>) -> Result<Self> {
        if frequencies.len() != gains.len() {
            return Err(Error::DimensionMismatch {
                expected: frequencies.len(),
                actual: gains.len(),
            });
        }
        if frequencies.is_empty() {
            return Err(Error::param("transfer.frequencies", "need at least one sample"));
        }
        if frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("transfer.frequencies", "must be strictly increasing"));
        }
        if gains.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(Error::param("transfer.gains", "must be positive"));
        }
        Ok(Self { frequencies, gains })
    }

    pub fn flat(gain: f64) -> Result<Self> {
        Self::new(vec![0.0], vec![gain])
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn gain(&self, omega_p: f64) -> f64 {
        let f = &self.frequencies;
        let n = f.len();
        if n == 1 || omega_p <= f[0] {
            return self.gains[0];
        }
        if omega_p >= f[n - 1] {
            return self.gains[n - 1];
        }
        let i = f.partition_point(|&x| x <= omega_p) - 1;
        let t = (omega_p - f[i]) / (f[i + 1] - f[i]);
        self.gains[i] + t * (self.gains[i + 1] - self.gains[i])
    }

    /// Same shape, every gain multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.frequencies.clone(), self.gains.iter().map(|g| g * factor).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRow {
    pub pump_frequency: f64,
    pub gain: f64,
    /// Modeled `omega_bar - omega` with the uncorrected drive.
    pub shift: f64,
    /// `None` when the shift fell below the numerical floor.
    pub lambda: Option<f64>,
    /// Modeled shift after multiplying the drive by `lambda / lambda_0`.
    pub corrected_shift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationTable {
    pub anchor_frequency: f64,
    pub lambda0: f64,
    pub anchor_shift: f64,
    pub rows: Vec<CalibrationRow>,
}

/// `(max - min) / mean` of the absolute values.
fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.map(f64::abs).collect();
    if v.is_empty() {
        return 0.0;
    }
    let max = v.iter().copied().fold(f64::MIN, f64::max);
    let min = v.iter().copied().fold(f64::MAX, f64::min);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    if mean == 0.0 {
        0.0
    } else {
        (max - min) / mean
    }
}

impl CalibrationTable {
    /// Relative spread of the uncorrected shifts.
    pub fn flatness_before(&self) -> f64 {
        spread(self.rows.iter().filter(|r| r.lambda.is_some()).map(|r| r.shift))
    }

    /// Relative spread of the corrected shifts.
    pub fn flatness_after(&self) -> f64 {
        spread(self.rows.iter().filter_map(|r| r.corrected_shift))
    }

    pub fn lambda_at(&self, pump_frequency: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.pump_frequency == pump_frequency)
            .and_then(|r| r.lambda)
    }
}

/// Inputs of [`calibrate_pump`].
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSetup<'a> {
    pub transfer: &'a TransferFunction,
    pub flux_model: &'a FluxModel,
    /// Static bias, at an extremum of the pumped mode's frequency.
    pub static_flux: f64,
    /// Nominal instrument amplitude; the flux amplitude is `gain * amplitude`.
    pub instrument_amplitude: f64,
    pub lambda0: f64,
    pub anchor_frequency: f64,
}

/// Forward-model the average-frequency shift across `pump_frequencies` and
/// derive `lambda_i = lambda_0 sqrt(|shift_anchor| / |shift_i|)`.
pub fn calibrate_pump(setup: &CalibrationSetup<'_>, pump_frequencies: &[f64]) -> Result<CalibrationTable> {
    let fm = setup.flux_model;
    let phi = setup.static_flux;
    if !(setup.lambda0 > 0.0) {
        return Err(Error::param("lambda0", "must be positive"));
    }
    if !(setup.instrument_amplitude > 0.0) {
        return Err(Error::param("instrument_amplitude", "must be positive"));
    }
    let curvature = fm.derivative(phi, 2)?;
    if curvature.abs() < 1e-9 * fm.scale() {
        return Err(Error::Domain("frequency curvature vanishes at the static bias".into()));
    }
    let slope = fm.derivative(phi, 1)?;
    if slope.abs() > 1e-6 * fm.scale() {
        log::warn!("static bias is not at a frequency extremum; parametric coupling will not vanish");
    }

    let base = fm.frequency(phi);
    let shift_for = |gain: f64, factor: f64| -> Result<f64> {
        Ok(time_averaged_frequency(fm, phi, gain * setup.instrument_amplitude * factor)? - base)
    };
    let anchor_shift = shift_for(setup.transfer.gain(setup.anchor_frequency), 1.0)?;
    if anchor_shift == 0.0 {
        return Err(Error::Domain("anchor shift vanishes".into()));
    }

    let raw = pump_frequencies
        .iter()
        .map(|&wp| {
            let gain = setup.transfer.gain(wp);
            Ok((wp, gain, shift_for(gain, 1.0)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let largest = raw.iter().map(|r| r.2.abs()).fold(0.0, f64::max);

    let rows = raw
        .into_iter()
        .map(|(wp, gain, shift)| {
            if shift.abs() < SHIFT_FLOOR * largest || shift == 0.0 {
                return Ok(CalibrationRow {
                    pump_frequency: wp,
                    gain,
                    shift,
                    lambda: None,
                    corrected_shift: None,
                });
            }
            let lambda = setup.lambda0 * (anchor_shift.abs() / shift.abs()).sqrt();
            let corrected = shift_for(gain, lambda / setup.lambda0)?;
            Ok(CalibrationRow {
                pump_frequency: wp,
                gain,
                shift,
                lambda: Some(lambda),
                corrected_shift: Some(corrected),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CalibrationTable {
        anchor_frequency: setup.anchor_frequency,
        lambda0: setup.lambda0,
        anchor_shift,
        rows,
    })
}
