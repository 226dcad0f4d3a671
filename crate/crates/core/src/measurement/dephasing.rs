use crate::error::{Error, Result};
use crate::model::{FluxModel, Qubit};
use crate::parametric::{Estimate, Flag};

/// Photon-shot-noise dephasing `8 n kappa chi^2 / (kappa^2 + 4 chi^2)`.
pub fn dephasing_rate(n_bar: f64, kappa: f64, chi: f64) -> f64 {
    8.0 * n_bar * kappa * chi * chi / (kappa * kappa + 4.0 * chi * chi)
}

/// `|chi|` from the slope of dephasing rate against mean photon number.
///
/// `slope = 8 kappa chi^2 / (kappa^2 + 4 chi^2)` is monotone in `|chi|` with
/// supremum `2 kappa`, so the inverse `chi^2 = slope kappa^2 / (4 (2 kappa - slope))`
/// is unique.
pub fn chi_from_dephasing_slope(slope: f64, kappa: f64) -> Result<Estimate> {
    if !(kappa > 0.0) {
        return Err(Error::param("kappa", "must be positive"));
    }
    if !(slope >= 0.0) {
        return Err(Error::param("slope", "must be non-negative"));
    }
    let limit = 2.0 * kappa;
    if slope >= limit {
        return Err(Error::NoSolution(format!(
            "dephasing slope {slope:.6e} reaches the saturation value 2 kappa = {limit:.6e}"
        )));
    }
    let chi = (slope * kappa * kappa / (4.0 * (limit - slope))).sqrt();
    if slope > 0.99 * limit {
        Ok(Estimate::flagged(chi, Flag::NearSaturation))
    } else {
        Ok(Estimate::clean(chi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", points.len())));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let span = points.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
    if sxx <= 1e-24 * span * span * n || sxx == 0.0 {
        return Err(Error::Fit("x values are degenerate".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Qubit relaxation through the cavity, `(g/Delta)^2 kappa`.
pub fn purcell_rate(g: f64, delta: f64, kappa: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::Domain("Purcell rate is undefined on resonance".into()));
    }
    Ok((g / delta).powi(2) * kappa)
}

/// First-order flux-noise dephasing plus a constant background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceModel {
    /// Dimensionless scale multiplying `|d omega / d phi|`.
    pub flux_noise: f64,
    /// Flux-independent dephasing rate.
    pub residual_rate: f64,
}

impl CoherenceModel {
    pub fn new(flux_noise: f64, residual_rate: f64) -> Result<Self> {
        if !(flux_noise >= 0.0 && flux_noise.is_finite()) {
            return Err(Error::param("flux_noise", "must be non-negative"));
        }
        if !(residual_rate >= 0.0 && residual_rate.is_finite()) {
            return Err(Error::param("residual_rate", "must be non-negative"));
        }
        Ok(Self {
            flux_noise,
            residual_rate,
        })
    }

    /// `Gamma_0 + A |omega'(phi)| + Gamma_n`.
    pub fn total_rate(&self, phi: f64, flux_model: &FluxModel, n_bar: f64, kappa: f64, chi: f64) -> Result<f64> {
        let slope = flux_model.derivative(phi, 1)?;
        Ok(self.residual_rate + self.flux_noise * slope.abs() + dephasing_rate(n_bar, kappa, chi))
    }
}

/// Ramsey `T2*`; infinite when every dephasing channel vanishes.
pub fn ramsey_t2(
    phi: f64,
    model: &CoherenceModel,
    flux_model: &FluxModel,
    n_bar: f64,
    kappa: f64,
    chi: f64,
) -> Result<f64> {
    let rate = model.total_rate(phi, flux_model, n_bar, kappa, chi)?;
    Ok(if rate > 0.0 { 1.0 / rate } else { f64::INFINITY })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingPoint {
    pub qubit: Qubit,
    pub flux: f64,
    pub n_bar: f64,
    pub rate: f64,
}
