//! Flux-periodic frequency laws `omega(phi)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Step for first-derivative central differences, in flux quanta.
pub const FIRST_DERIVATIVE_STEP: f64 = 1e-5;
/// Step for second-derivative central differences. Larger than the
/// first-derivative step: at 1e-5 the round-off of a GHz-scale second
/// difference dominates.
pub const SECOND_DERIVATIVE_STEP: f64 = 1e-3;

/// Frequency of one mode as a function of the applied flux (in flux quanta).
#[derive(Debug, Clone, PartialEq)]
pub enum FluxModel {
    /// `omega_max * (cos^2(pi(phi - offset)) + d^2 sin^2(pi(phi - offset)))^(1/4)`
    SquidLike {
        omega_max: f64,
        asymmetry: f64,
        offset: f64,
    },
    Tabulated(PeriodicSpline),
}

impl FluxModel {
    pub fn squid_like(omega_max: f64, asymmetry: f64, offset: f64) -> Result<Self> {
        if !(omega_max.is_finite() && omega_max > 0.0) {
            return Err(Error::param("omega_max", "must be positive"));
        }
        // d = 0 would put a zero of omega(phi) at offset + 1/2
        if !(asymmetry > 0.0 && asymmetry <= 1.0) {
            return Err(Error::param("asymmetry", "must lie in (0, 1]"));
        }
        if !offset.is_finite() {
            return Err(Error::param("offset", "must be finite"));
        }
        Ok(FluxModel::SquidLike {
            omega_max,
            asymmetry,
            offset,
        })
    }

    /// A flux-independent frequency (symmetric SQUID limit).
    pub fn fixed(omega: f64) -> Result<Self> {
        Self::squid_like(omega, 1.0, 0.0)
    }

    pub fn tabulated(flux: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        Ok(FluxModel::Tabulated(PeriodicSpline::new(flux, omega)?))
    }

    pub fn frequency(&self, phi: f64) -> f64 {
        match self {
            FluxModel::SquidLike {
                omega_max,
                asymmetry,
                offset,
            } => {
                let (s, c) = (PI * (phi - offset)).sin_cos();
                omega_max * (c * c + asymmetry * asymmetry * s * s).powf(0.25)
            }
            FluxModel::Tabulated(spline) => spline.eval(phi),
        }
    }

    /// Upper bound on `omega` over a period, used for scale-relative checks.
    pub fn scale(&self) -> f64 {
        match self {
            FluxModel::SquidLike { omega_max, .. } => *omega_max,
            FluxModel::Tabulated(spline) => spline.values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// Central finite difference of order 1 or 2 with one Richardson step.
    pub fn derivative(&self, phi: f64, order: u8) -> Result<f64> {
        match order {
            1 => {
                let h = FIRST_DERIVATIVE_STEP;
                let d = |h: f64| (self.frequency(phi + h) - self.frequency(phi - h)) / (2.0 * h);
                Ok((4.0 * d(h / 2.0) - d(h)) / 3.0)
            }
            2 => {
                let h = SECOND_DERIVATIVE_STEP;
                if let FluxModel::Tabulated(spline) = self {
                    if spline.distance_to_knot(phi) < 2.0 * h {
                        log::warn!(
                            "second flux derivative evaluated within {:.1e} of a spline knot at phi = {phi}",
                            2.0 * h
                        );
                    }
                }
                let f0 = self.frequency(phi);
                let d = |h: f64| {
                    (self.frequency(phi + h) - 2.0 * f0 + self.frequency(phi - h)) / (h * h)
                };
                Ok((4.0 * d(h / 2.0) - d(h)) / 3.0)
            }
            _ => Err(Error::param("order", "only first and second derivatives are supported")),
        }
    }

    /// Smallest frequency on a uniform grid over one period.
    pub fn min_over_period(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|i| self.frequency(i as f64 / samples as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Periodic (period 1) cubic interpolating spline.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl PeriodicSpline {
    /// `flux` must be strictly increasing and span less than one period.
    pub fn new(flux: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = flux.len();
        if n != values.len() {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: values.len(),
            });
        }
        if n < 3 {
            return Err(Error::param("flux", "need at least 3 samples"));
        }
        if flux.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::param("flux", "samples must be finite"));
        }
        if flux.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("flux", "sample points must be strictly increasing"));
        }
        if flux[n - 1] - flux[0] >= 1.0 {
            return Err(Error::param("flux", "samples must span less than one flux quantum"));
        }

        let h: Vec<f64> = (0..n)
            .map(|i| {
                if i + 1 < n {
                    flux[i + 1] - flux[i]
                } else {
                    flux[0] + 1.0 - flux[n - 1]
                }
            })
            .collect();

        // cyclic tridiagonal system for the knot second derivatives
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut rhs = DVector::<f64>::zeros(n);
        for i in 0..n {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            a[(i, prev)] += h[prev];
            a[(i, i)] += 2.0 * (h[prev] + h[i]);
            a[(i, next)] += h[i];
            rhs[i] = 6.0 * ((values[next] - values[i]) / h[i] - (values[i] - values[prev]) / h[prev]);
        }
        let second = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::param("flux", "spline system is singular"))?;

        Ok(Self {
            knots: flux,
            values,
            second: second.iter().copied().collect(),
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn wrap(&self, phi: f64) -> f64 {
        let x0 = self.knots[0];
        x0 + (phi - x0).rem_euclid(1.0)
    }

    fn distance_to_knot(&self, phi: f64) -> f64 {
        let x = self.wrap(phi);
        self.knots
            .iter()
            .chain(std::iter::once(&(self.knots[0] + 1.0)))
            .map(|k| (x - k).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let n = self.knots.len();
        let x = self.wrap(phi);
        let i = match self.knots.partition_point(|&k| k <= x) {
            0 => 0,
            p => p - 1,
        };
        let j = (i + 1) % n;
        let x_lo = self.knots[i];
        let x_hi = if j == 0 { self.knots[0] + 1.0 } else { self.knots[j] };
        let h = x_hi - x_lo;
        let a = (x_hi - x) / h;
        let b = (x - x_lo) / h;
        a * self.values[i]
            + b * self.values[j]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[j]) * h * h / 6.0
    }
}
