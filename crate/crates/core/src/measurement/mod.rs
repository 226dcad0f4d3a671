//! Measurement-side models: photon-shot-noise dephasing, Purcell decay,
//! Ramsey coherence and pump-amplitude calibration.

pub mod calibration;
pub mod dephasing;

pub use calibration::{
    calibrate_pump, integrate, time_averaged_frequency, time_averaged_frequency_series, CalibrationRow,
    CalibrationSetup, CalibrationTable, TransferFunction,
};
pub use dephasing::{
    chi_from_dephasing_slope, dephasing_rate, linear_fit, purcell_rate, ramsey_t2, CoherenceModel, DephasingPoint,
    LinearFit,
};
