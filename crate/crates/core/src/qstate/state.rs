use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::SymmetricEigen;

use super::{c, is_power_of_two, log2, max_abs_diff, tol, CMatrix, CVector, C64};
use crate::bits::BitString;
use crate::error::{Error, Result};

/// Pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: CVector,
}

impl StateVector {
    /// Wraps raw amplitudes. The length must be a power of two; the vector
    /// is not normalized.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if !is_power_of_two(amplitudes.len()) {
            return Err(Error::InvalidArgument(format!(
                "state length {} is not a power of two",
                amplitudes.len()
            )));
        }
        Ok(Self::from_vector(CVector::from_vec(amplitudes)))
    }

    pub(crate) fn from_vector(amplitudes: CVector) -> Self {
        Self { n_qubits: log2(amplitudes.len()), amplitudes }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        assert!(index < dim, "basis index {index} out of range");
        let mut amps = CVector::zeros(dim);
        amps[index] = c(1.0, 0.0);
        Self::from_vector(amps)
    }

    pub fn from_bits(bits: &BitString) -> Self {
        Self::basis(bits.len(), bits.value())
    }

    pub fn zero() -> Self {
        Self::basis(1, 0)
    }

    pub fn one() -> Self {
        Self::basis(1, 1)
    }

    /// `(|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        Self::single(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0))
    }

    /// `(|0⟩ - |1⟩)/√2`
    pub fn minus() -> Self {
        Self::single(c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0))
    }

    /// `(|0⟩ + i|1⟩)/√2`
    pub fn plus_i() -> Self {
        Self::single(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2))
    }

    /// `(|0⟩ - i|1⟩)/√2`
    pub fn minus_i() -> Self {
        Self::single(c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2))
    }

    pub fn single(a0: C64, a1: C64) -> Self {
        Self::from_vector(CVector::from_vec(vec![a0, a1]))
    }

    /// `n` copies of `one` tensored together.
    pub fn repeated(one: &StateVector, n: usize) -> Self {
        assert!(n >= 1);
        let parts = vec![one.clone(); n];
        super::tensor_all(&parts)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
        }
        Ok(Self::from_vector(self.amplitudes.unscale(n)))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= tol::ARITHMETIC
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Phase-invariant state fidelity `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Mixed state, or the traceless deviation part of an NMR density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
    is_deviation: bool,
}

impl DensityMatrix {
    /// Validated constructor. Full states need unit trace and a non-negative
    /// spectrum; deviation matrices need zero trace.
    pub fn new(matrix: CMatrix, is_deviation: bool) -> Result<Self> {
        if !matrix.is_square() || !is_power_of_two(matrix.nrows()) {
            return Err(Error::InvalidDensityMatrix("not square with power-of-two dimension".into()));
        }
        if max_abs_diff(&matrix, &matrix.adjoint()) > tol::ARITHMETIC {
            return Err(Error::InvalidDensityMatrix("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if is_deviation {
            if tr.norm() > tol::ARITHMETIC {
                return Err(Error::InvalidDensityMatrix(format!("deviation trace {tr} is not zero")));
            }
        } else {
            if (tr - c(1.0, 0.0)).norm() > tol::ARITHMETIC {
                return Err(Error::InvalidDensityMatrix(format!("trace {tr} is not one")));
            }
            let min = SymmetricEigen::new(matrix.clone()).eigenvalues.min();
            if min < -tol::STRUCTURAL {
                return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min}")));
            }
        }
        Ok(Self::from_parts(matrix, is_deviation))
    }

    pub fn deviation(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, true)
    }

    pub(crate) fn from_parts(matrix: CMatrix, is_deviation: bool) -> Self {
        Self { n_qubits: log2(matrix.nrows()), matrix, is_deviation }
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let a = state.amplitudes();
        Self::from_parts(a * a.adjoint(), false)
    }

    /// Real diagonal deviation matrix.
    pub fn diagonal_deviation(entries: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            entries.len(),
            entries.iter().map(|&x| c(x, 0.0)),
        ));
        Self::deviation(m)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self::from_parts(CMatrix::identity(dim, dim).unscale(dim as f64), false)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_deviation(&self) -> bool {
        self.is_deviation
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    /// Real diagonal (populations).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_parts(self.matrix.scale(factor), self.is_deviation)
    }
}
