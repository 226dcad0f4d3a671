//! System description and Hamiltonian construction.

pub mod flux;
pub mod hamiltonian;
pub mod spec;

pub use flux::{FluxModel, PeriodicSpline};
pub use hamiltonian::{
    lab_hamiltonian, lab_hamiltonian_over, pair_lab_hamiltonian, pump_detuning, rotating_frame_hamiltonian,
    LabHamiltonian, RotatingFrame,
};
pub use spec::{
    modulation_matched_pump_scale, CouplerSpec, Level, ModeLabel, ModeSpec, PumpSpec, Qubit, QubitCoupling,
    SystemSpec,
};
