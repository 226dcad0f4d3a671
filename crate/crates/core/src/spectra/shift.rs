use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Level, PumpSpec, RotatingFrame, SystemSpec};
use crate::parametric::{chi_parametric_series, Estimate, Flag, GUARD_BAND};
use crate::spectra::eigen::{diagonalize, EigenSolution};

/// Dressed energy of bare state `|m, n>`, flagged when its label weight is
/// below one half.
fn dressed_energy(sol: &EigenSolution, rf: &RotatingFrame, level: usize, photons: usize) -> (f64, bool) {
    let (k, w) = sol.dressed_index(rf.index(level, photons));
    (sol.energies()[k], w < 0.5)
}

/// `chi = ([E(u,1) - E(u,0)] - [E(l,1) - E(l,0)]) / 2` for the level pair
/// `(lower, upper)` from exact diagonalization of the rotating-frame model.
pub fn chi_from_rotating_frame(rf: &RotatingFrame, lower: Level, upper: Level) -> Result<Estimate> {
    if upper.0 >= rf.qubit_dim || lower.0 >= rf.qubit_dim {
        return Err(Error::param(
            "qubit_dim",
            format!("level {} is outside a {}-level truncation", upper.0.max(lower.0), rf.qubit_dim),
        ));
    }
    if rf.cavity_dim < 2 {
        return Err(Error::InvalidDimension {
            dim: rf.cavity_dim,
            min: 2,
        });
    }
    if rf.coupling == 0.0 {
        return Ok(Estimate::clean(0.0));
    }
    let sol = diagonalize(&rf.hamiltonian()?)?;
    let (u1, a) = dressed_energy(&sol, rf, upper.0, 1);
    let (u0, b) = dressed_energy(&sol, rf, upper.0, 0);
    let (l1, c) = dressed_energy(&sol, rf, lower.0, 1);
    let (l0, d) = dressed_energy(&sol, rf, lower.0, 0);
    let value = 0.5 * ((u1 - u0) - (l1 - l0));
    if a || b || c || d {
        Ok(Estimate::flagged(value, Flag::AmbiguousLabel))
    } else {
        Ok(Estimate::clean(value))
    }
}

/// Parametric `chi` between `|g>` and `|e>` of the pumped qubit at the static
/// bias.
pub fn chi_from_diagonalization(sys: &SystemSpec, pump: &PumpSpec) -> Result<Estimate> {
    let rf = RotatingFrame::from_system(sys, pump)?;
    chi_from_rotating_frame(&rf, Level::G, Level::E)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShiftMethod {
    Series,
    Diagonalization,
    Floquet,
}

impl fmt::Display for ShiftMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShiftMethod::Series => "series",
            ShiftMethod::Diagonalization => "diagonalization",
            ShiftMethod::Floquet => "floquet",
        })
    }
}

/// Dispersive shift sampled over pump detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftCurve {
    pub method: ShiftMethod,
    /// Flux-modulation amplitude the curve was computed at.
    pub amplitude: f64,
    pub detunings: Vec<f64>,
    pub values: Vec<Estimate>,
}

/// Flags a value within the guard band of `Delta_p = -m alpha`, `m < poles`.
fn guard(est: Estimate, g: f64, delta: f64, alpha: f64, poles: usize) -> Estimate {
    if est.is_flagged() {
        return est;
    }
    let band = GUARD_BAND * g.abs();
    match (0..poles).find(|&m| (delta + m as f64 * alpha).abs() <= band) {
        Some(order) => Estimate::flagged(est.value, Flag::NearPole { order }),
        None => est,
    }
}

impl ShiftCurve {
    pub fn series(g: f64, alpha: f64, m_max: usize, detunings: &[f64], amplitude: f64) -> Self {
        Self {
            method: ShiftMethod::Series,
            amplitude,
            detunings: detunings.to_vec(),
            values: detunings
                .iter()
                .map(|&d| chi_parametric_series(g, d, alpha, m_max))
                .collect(),
        }
    }

    /// `g`-`e` shift from diagonalization at each detuning; points inside a
    /// guard band of any pole reachable in the qubit truncation are flagged.
    pub fn diagonalization(rf: &RotatingFrame, detunings: &[f64], amplitude: f64) -> Result<Self> {
        let values = detunings
            .iter()
            .map(|&d| {
                let est = chi_from_rotating_frame(&rf.with_detuning(d), Level::G, Level::E)?;
                Ok(guard(est, rf.coupling, d, rf.anharmonicity, rf.qubit_dim))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            method: ShiftMethod::Diagonalization,
            amplitude,
            detunings: detunings.to_vec(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStep {
    pub qubit_dim: usize,
    pub cavity_dim: usize,
    pub chi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub steps: Vec<ConvergenceStep>,
    /// `|chi(k+1) - chi(k)|` along the ladder.
    pub changes: Vec<f64>,
    /// First ladder entry from which every later change is below 0.1% of
    /// `|chi|`.
    pub converged_at: Option<usize>,
}

impl ConvergenceReport {
    pub fn converged(&self) -> bool {
        self.converged_at.is_some()
    }

    /// Truncation at which convergence was reached.
    pub fn converged_dims(&self) -> Option<(usize, usize)> {
        self.converged_at
            .map(|k| (self.steps[k].qubit_dim, self.steps[k].cavity_dim))
    }
}

/// Relative change accepted as converged.
pub const CONVERGENCE_TOL: f64 = 1e-3;

/// Recompute `chi` between `lower` and `upper` over a ladder of
/// `(qubit_dim, cavity_dim)` truncations.
pub fn convergence_check(
    rf: &RotatingFrame,
    lower: Level,
    upper: Level,
    dims: &[(usize, usize)],
) -> Result<ConvergenceReport> {
    if dims.len() < 3 {
        return Err(Error::param("dims", "need at least three truncation sizes"));
    }
    let steps = dims
        .iter()
        .map(|&(q, c)| {
            let chi = chi_from_rotating_frame(&rf.with_dims(q, c), lower, upper)?.value;
            Ok(ConvergenceStep {
                qubit_dim: q,
                cavity_dim: c,
                chi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let changes: Vec<f64> = steps.windows(2).map(|w| (w[1].chi - w[0].chi).abs()).collect();
    let last = steps.last().map(|s| s.chi.abs()).unwrap_or(0.0);
    let small = |d: f64| d <= CONVERGENCE_TOL * last || d == 0.0;
    let converged_at = (0..steps.len() - 1).find(|&k| changes[k..].iter().all(|&d| small(d)));
    if converged_at.is_none() {
        log::warn!("chi did not converge over {} truncations: changes {changes:?}", steps.len());
    }
    Ok(ConvergenceReport {
        steps,
        changes,
        converged_at,
    })
}
