use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::qubit_bit;
use crate::error::{Error, Result};
use crate::qstate::{Operator, C64};

fn check_pair(u: &Operator, v: &Operator) -> Result<()> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    Ok(())
}

/// Gate fidelity `|Tr(U†V)|²/d²`; insensitive to a global phase.
pub fn fidelity_gate(u: &Operator, v: &Operator) -> Result<f64> {
    check_pair(u, v)?;
    let d = u.dim() as f64;
    Ok((u.matrix().adjoint() * v.matrix()).trace().norm_sqr() / (d * d))
}

/// Single-qubit z phases applied before and after a gate.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalZCorrection {
    /// `D_L = ⊗_q diag(1, e^{iθ_q})` applied after the gate.
    pub left: Vec<f64>,
    /// `D_R`, applied before the gate.
    pub right: Vec<f64>,
    pub fidelity: f64,
}

/// `max |Tr(U† D_L V D_R)|²/d²` over local diagonal phase gates `D_L`, `D_R`.
///
/// Closed-form coordinate ascent, one phase at a time, from the identity
/// and a few seeded random starts. Starting at the identity makes the result
/// never smaller than [`fidelity_gate`].
pub fn local_z_invariant_fidelity(u: &Operator, v: &Operator) -> Result<LocalZCorrection> {
    check_pair(u, v)?;
    let d = u.dim();
    let n = u.n_qubits();
    // entries of conj(U) ∘ V that can contribute
    let terms: Vec<(usize, usize, C64)> = (0..d)
        .flat_map(|r| (0..d).map(move |col| (r, col)))
        .map(|(r, col)| (r, col, u.get(r, col).conj() * v.get(r, col)))
        .filter(|(_, _, m)| m.norm() > 0.0)
        .collect();
    let bits = |index: usize, q: usize| qubit_bit(index, q, n) == 1;

    let climb = |mut theta: Vec<f64>| -> (Vec<f64>, f64) {
        // theta[..n] left phases, theta[n..] right phases
        let trace = |theta: &[f64]| -> C64 {
            terms
                .iter()
                .map(|&(r, col, m)| {
                    let phase: f64 = (0..n)
                        .map(|q| if bits(r, q) { theta[q] } else { 0.0 } + if bits(col, q) { theta[n + q] } else { 0.0 })
                        .sum();
                    m * C64::from_polar(1.0, phase)
                })
                .sum()
        };
        let mut best = trace(&theta).norm();
        for _sweep in 0..500 {
            let before = best;
            for p in 0..2 * n {
                let (q, on_left) = if p < n { (p, true) } else { (p - n, false) };
                let mut a = C64::default();
                let mut b = C64::default();
                for &(r, col, m) in &terms {
                    let phase: f64 = (0..n)
                        .map(|k| if bits(r, k) { theta[k] } else { 0.0 } + if bits(col, k) { theta[n + k] } else { 0.0 })
                        .sum();
                    let z = m * C64::from_polar(1.0, phase);
                    let hit = if on_left { bits(r, q) } else { bits(col, q) };
                    if hit {
                        b += z;
                    } else {
                        a += z;
                    }
                }
                if b.norm() > 0.0 {
                    let delta = if a.norm() > 0.0 { a.arg() - b.arg() } else { 0.0 };
                    theta[p] += delta;
                    theta[p] = theta[p].rem_euclid(2.0 * PI);
                }
            }
            best = trace(&theta).norm();
            if best - before <= 1e-15 {
                break;
            }
        }
        (theta, best)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut starts = vec![vec![0.0; 2 * n]];
    for _ in 0..8 {
        starts.push((0..2 * n).map(|_| rng.random_range(0.0..2.0 * PI)).collect());
    }
    let (theta, best) = starts
        .into_iter()
        .map(climb)
        .fold((Vec::new(), -1.0), |acc, cand| if cand.1 > acc.1 { cand } else { acc });
    let df = d as f64;
    Ok(LocalZCorrection {
        left: theta[..n].to_vec(),
        right: theta[n..].to_vec(),
        fidelity: (best * best / (df * df)).min(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gates;
    use crate::qstate::{c, tensor, CMatrix, OpKind};

    #[test]
    fn self_fidelity_and_global_phase() {
        let u = gates::cnot();
        assert!((fidelity_gate(&u, &u).unwrap() - 1.0).abs() < 1e-15);
        let shifted = Operator::from_parts(u.matrix().map(|z| z * C64::from_polar(1.0, 0.83)), OpKind::Unitary);
        assert!((fidelity_gate(&u, &shifted).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_vs_cnot() {
        // Tr(CNOT) = 2: only |00⟩ and |01⟩ sit on the diagonal
        assert_eq!(gates::cnot().trace(), c(2.0, 0.0));
        let f = fidelity_gate(&Operator::identity(4), &gates::cnot()).unwrap();
        assert!((f - 0.25).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(fidelity_gate(&Operator::identity(2), &Operator::identity(4)).is_err());
        assert!(local_z_invariant_fidelity(&Operator::identity(2), &Operator::identity(4)).is_err());
    }

    #[test]
    fn local_z_recovers_dressed_cnot() {
        let rz = |t: f64| Operator::from_parts(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), C64::from_polar(1.0, t)])), OpKind::Unitary);
        let left = tensor(&rz(0.4), &rz(-1.3));
        let right = tensor(&rz(2.2), &rz(0.9));
        let dressed = left.compose(&gates::cnot()).unwrap().compose(&right).unwrap();
        let plain = fidelity_gate(&gates::cnot(), &dressed).unwrap();
        let corr = local_z_invariant_fidelity(&gates::cnot(), &dressed).unwrap();
        assert!(plain < 0.9);
        assert!(corr.fidelity > 1.0 - 1e-12, "{}", corr.fidelity);
    }

    #[test]
    fn local_z_cannot_fix_a_controlled_z() {
        // best is |1 + i + i + 1|²/16 = 1/2 at θ = π/2 on both qubits
        let mut cz = CMatrix::identity(4, 4);
        cz[(3, 3)] = c(-1.0, 0.0);
        let cz = Operator::from_parts(cz, OpKind::Unitary);
        let f = local_z_invariant_fidelity(&Operator::identity(4), &cz).unwrap();
        assert!((f.fidelity - 0.5).abs() < 1e-12, "{}", f.fidelity);
    }
}
