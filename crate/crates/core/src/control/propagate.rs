//! Propagators for delays, ideal hard pulses and piecewise-constant RF.

use nalgebra::SymmetricEigen;

use crate::nmr::{spin_operator, Axis};
use crate::qstate::{c, tensor_all, CMatrix, CVector, OpKind, Operator, C64};

/// `exp(−i θ (cos φ I_x + sin φ I_y))` for one spin-1/2.
pub fn rotation(angle: f64, phase: f64) -> CMatrix {
    let (ch, sh) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    // −i sin(θ/2) (cos φ σx + sin φ σy)
    let off_up = c(-sh * phase.sin(), -sh * phase.cos()); // ⟨0|·|1⟩
    let off_dn = c(sh * phase.sin(), -sh * phase.cos()); // ⟨1|·|0⟩
    CMatrix::from_row_slice(2, 2, &[c(ch, 0.0), off_up, off_dn, c(ch, 0.0)])
}

/// Simultaneous rotations of every spin about the same phase axis.
pub fn hard_pulse(angles: &[f64], phase: f64) -> Operator {
    let parts: Vec<Operator> = angles
        .iter()
        .map(|&a| Operator::from_parts(rotation(a, phase), OpKind::Unitary))
        .collect();
    tensor_all(&parts)
}

/// `exp(−i D t)` for a real diagonal `D` given by its entries.
pub fn diagonal_exp(diag: &[f64], t: f64) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        diag.len(),
        diag.iter().map(|&e| C64::from_polar(1.0, -e * t)),
    ))
}

/// Eigendecomposition of a Hermitian generator with its segment propagator.
pub struct SegmentExp {
    pub eigenvalues: Vec<f64>,
    pub vectors: CMatrix,
    pub propagator: CMatrix,
}

/// `exp(−i H t)` for Hermitian `H` through its eigendecomposition.
pub fn hermitian_exp(h: &CMatrix, t: f64) -> SegmentExp {
    let eig = SymmetricEigen::new(h.clone());
    let vectors = eig.eigenvectors;
    let eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let phases = diagonal_exp(&eigenvalues, t);
    let propagator = &vectors * phases * vectors.adjoint();
    SegmentExp { eigenvalues, vectors, propagator }
}

/// `I_x` and `I_y` of every spin, in channel order `(spin, x), (spin, y)`.
pub fn control_operators(n_spins: usize) -> Vec<CMatrix> {
    (0..n_spins)
        .flat_map(|k| [spin_operator(Axis::X, k, n_spins), spin_operator(Axis::Y, k, n_spins)])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::max_abs_diff;

    #[test]
    fn rotations_match_generators() {
        for &(angle, phase) in &[(std::f64::consts::FRAC_PI_2, 0.0), (std::f64::consts::PI, std::f64::consts::FRAC_PI_2), (0.7, 2.1)] {
            let gen = spin_operator(Axis::X, 0, 1).scale(phase.cos()) + spin_operator(Axis::Y, 0, 1).scale(phase.sin());
            let expect = hermitian_exp(&gen, angle).propagator;
            assert!(max_abs_diff(&rotation(angle, phase), &expect) < 1e-14);
        }
    }

    #[test]
    fn exp_is_unitary() {
        let h = control_operators(2).into_iter().enumerate().fold(CMatrix::zeros(4, 4), |acc, (k, m)| acc + m.scale(k as f64 + 0.3));
        let u = hermitian_exp(&h, 1.7).propagator;
        assert!(Operator::from_parts(u, OpKind::General).is_unitary(1e-13));
    }
}
