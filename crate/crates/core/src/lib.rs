//! Simulator for the quantum pigeonhole effect.
//!
//! Two levels are modelled:
//!
//! * the abstract three-particle Mach-Zehnder circuit with an ancilla that
//!   probes whether two particles share a path ([`circuit`], [`pigeonhole`]);
//! * a four-spin NMR register realising it: weak-coupling Hamiltonian,
//!   pseudopure preparation, ancilla spectra ([`nmr`]), refocused CNOT
//!   sequences and GRAPE pulse synthesis ([`control`]).
//!
//! Qubit indices in the API are 0-based. Textual labels such as `U12` or the
//! CLI's `--probe 12` use the 1-based particle numbering.

pub mod bits;
pub mod circuit;
pub mod cli;
pub mod control;
pub mod error;
pub mod format;
pub mod nmr;
pub mod pigeonhole;
pub mod qstate;

pub use bits::BitString;
pub use error::{Error, Result};
