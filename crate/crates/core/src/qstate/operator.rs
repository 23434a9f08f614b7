use std::fmt;

use super::{c, is_power_of_two, log2, max_abs_diff, tol, CMatrix, C64};
use crate::error::{Error, Result};

/// Structural tag carried by an [`Operator`]. Constructors verify the tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Unitary,
    Projector,
    Hermitian,
    General,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::Unitary => "unitary",
            OpKind::Projector => "projector",
            OpKind::Hermitian => "hermitian",
            OpKind::General => "general",
        })
    }
}

/// A square complex matrix acting on a power-of-two dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    kind: OpKind,
}

impl Operator {
    pub fn new(matrix: CMatrix, kind: OpKind) -> Result<Self> {
        if !matrix.is_square() || !is_power_of_two(matrix.nrows()) {
            return Err(Error::NotStructured("square with power-of-two dimension"));
        }
        let op = Self { matrix, kind };
        match kind {
            OpKind::Unitary if !op.is_unitary(tol::STRUCTURAL) => Err(Error::NotStructured("unitary")),
            OpKind::Projector if !op.is_projector(tol::STRUCTURAL) => Err(Error::NotStructured("a projector")),
            OpKind::Hermitian if !op.is_hermitian(tol::STRUCTURAL) => Err(Error::NotStructured("Hermitian")),
            _ => Ok(op),
        }
    }

    pub fn unitary(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, OpKind::Unitary)
    }

    pub fn projector(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, OpKind::Projector)
    }

    pub fn hermitian(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, OpKind::Hermitian)
    }

    pub fn general(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, OpKind::General)
    }

    /// Skips validation; callers guarantee the tag.
    pub(crate) fn from_parts(matrix: CMatrix, kind: OpKind) -> Self {
        debug_assert!(matrix.is_square() && is_power_of_two(matrix.nrows()));
        Self { matrix, kind }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(is_power_of_two(dim), "dimension {dim} is not a power of two");
        Self::from_parts(CMatrix::identity(dim, dim), OpKind::Unitary)
    }

    /// Real diagonal operator.
    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            entries.len(),
            entries.iter().map(|&x| c(x, 0.0)),
        ));
        Self::hermitian(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        log2(self.dim())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.matrix.adjoint(), self.kind)
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let kind = match (self.kind, other.kind) {
            (OpKind::Unitary, OpKind::Unitary) => OpKind::Unitary,
            _ => OpKind::General,
        };
        Ok(Self::from_parts(&self.matrix * &other.matrix, kind))
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs_diff(&self.matrix, &self.matrix.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let n = self.dim();
        max_abs_diff(&(self.matrix.adjoint() * &self.matrix), &CMatrix::identity(n, n)) <= tol
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && max_abs_diff(&(&self.matrix * &self.matrix), &self.matrix) <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|col| r == col || self.matrix[(r, col)].norm() <= tol))
    }

    /// Re-tags after an independent check.
    pub fn with_kind(self, kind: OpKind) -> Result<Self> {
        Self::new(self.matrix, kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_tags() {
        assert!(Operator::general(CMatrix::zeros(3, 3)).is_err());
        assert!(Operator::general(CMatrix::zeros(2, 4)).is_err());
        let not_unitary = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(Operator::unitary(not_unitary.clone()).unwrap_err(), Error::NotStructured("unitary"));
        assert!(Operator::hermitian(not_unitary.clone()).is_err());
        assert!(Operator::general(not_unitary).is_ok());
    }

    #[test]
    fn compose_keeps_unitarity_tag() {
        let x = Operator::unitary(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ))
        .unwrap();
        let xx = x.compose(&x).unwrap();
        assert_eq!(xx.kind(), OpKind::Unitary);
        assert!(max_abs_diff(xx.matrix(), Operator::identity(2).matrix()) < 1e-15);
    }
}
