//! Exact diagonalization, dispersive-shift extraction, crossing analysis and
//! synthesized cavity spectra.

pub mod crossing;
pub mod eigen;
pub mod response;
pub mod shift;

pub use crossing::{crossing_sweep, fit_crossing_gap, track_modes, CrossingSweep, Tracking};
pub use eigen::{diagonalize, EigenSolution, StateLabel};
pub use response::{
    cavity_transitions, frame_offset, lorentzian_response, synthesize_cavity_response, SpectrumGrid, SpectrumRow,
    Transition,
};
pub use shift::{
    chi_from_diagonalization, chi_from_rotating_frame, convergence_check, ConvergenceReport, ConvergenceStep,
    ShiftCurve, ShiftMethod,
};
