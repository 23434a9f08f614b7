//! Four-spin NMR register: weak-coupling Hamiltonian, equilibrium and
//! pseudopure preparation, ancilla detection and stick/rendered spectra.

mod prep;
mod spectrum;
mod stages;
mod system;

pub use prep::{invert_populations, pseudopure_prepare, thermal_state, PrepSpec};
pub use spectrum::{
    detect, line_frequency, line_frequency_from_energies, linear_grid, render, rendered_csv, Line,
    Spectrum, DEFAULT_LINEWIDTH,
};
pub use stages::{stage_spectrum, stage_state, Stage};
pub use system::{
    energies, internal_hamiltonian, magnetic_number, spin_operator, Axis, SpinSystem,
    DEFAULT_SYSTEM_TOML,
};
