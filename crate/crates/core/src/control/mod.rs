//! Pulse-level gate synthesis: refocused delay sequences, gate fidelities and
//! GRAPE optimization against the internal Hamiltonian.

mod fidelity;
mod grape;
pub mod propagate;
mod sequence;

pub use fidelity::{fidelity_gate, local_z_invariant_fidelity, LocalZCorrection};
pub use grape::{
    analytic_gradient, gradient_check, gradient_check_with_step, grape_optimize, objective, ControlField,
    ControlProblem, GradientCheck, GrapeResult, InitialControls, DEFAULT_MAX_AMPLITUDE,
};
pub use sequence::{
    cnot_reference_sequence, simulate_sequence, PulseSegment, PulseSequence, CNOT_CLOSE_PHASE, CNOT_OPEN_PHASE,
};
