//! Dense complex linear algebra for small qubit registers.
//!
//! Basis index of an `n`-qubit register is big-endian over the declared qubit
//! order: qubit 0 is the most significant bit. When an ancilla is present it
//! is always the last qubit.

mod operator;
mod ops;
mod state;

pub use operator::{OpKind, Operator};
pub use ops::{
    apply, embed, expectation, measure_distribution, overlap, partial_trace, tensor, tensor_all,
    Distribution, QuantumState, Tensor,
};
pub use state::{DensityMatrix, StateVector};

pub use num_complex::Complex64 as C64;

pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

/// Tolerance constants shared by every numerical check.
pub mod tol {
    /// Structural checks: unitarity, projector idempotence, positivity.
    pub const STRUCTURAL: f64 = 1e-10;
    /// Arithmetic identities: norms, traces, Hermiticity of constructed states.
    pub const ARITHMETIC: f64 = 1e-12;
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub(crate) fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

pub(crate) fn log2(n: usize) -> usize {
    n.trailing_zeros() as usize
}
