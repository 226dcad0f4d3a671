//! Simulation of a cavity coupled to two flux-tunable transmons through a
//! modulated coupler.
//!
//! Frequencies and rates are angular (rad/s) throughout; flux is in flux
//! quanta. See [`units`] for conversions.

pub mod error;
pub mod floquet;
pub mod hilbert;
pub mod measurement;
pub mod model;
pub mod parametric;
pub mod spectra;
pub mod units;

pub use error::{Error, Result};
pub use hilbert::{CMatrix, CompositeSpace, FockOperator};
pub use model::{FluxModel, Level, ModeLabel, ModeSpec, PumpSpec, Qubit, RotatingFrame, SystemSpec};
pub use parametric::{Estimate, Flag, Regime};
pub use spectra::{EigenSolution, ShiftCurve, ShiftMethod, SpectrumGrid};
