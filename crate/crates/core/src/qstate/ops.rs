use super::{tol, CMatrix, CVector, DensityMatrix, OpKind, Operator, StateVector, C64};
use crate::bits::BitString;
use crate::error::{Error, Result};

/// Kronecker product in the fixed big-endian qubit ordering.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        StateVector::from_vector(self.amplitudes().kronecker(other.amplitudes()))
    }
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Self {
        use OpKind::*;
        let kind = match (self.kind(), other.kind()) {
            (Unitary, Unitary) => Unitary,
            (Projector, Projector) => Projector,
            (Hermitian | Projector, Hermitian | Projector) => Hermitian,
            _ => General,
        };
        Operator::from_parts(self.matrix().kronecker(other.matrix()), kind)
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        DensityMatrix::from_parts(
            self.matrix().kronecker(other.matrix()),
            self.is_deviation() || other.is_deviation(),
        )
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Left fold of [`tensor`] over a nonempty list.
pub fn tensor_all<T: Tensor + Clone>(parts: &[T]) -> T {
    let (first, rest) = parts.split_first().expect("tensor_all needs at least one factor");
    rest.iter().fold(first.clone(), |acc, p| acc.tensor(p))
}

/// Anything a gate can act on.
pub trait QuantumState: Sized {
    fn n_qubits(&self) -> usize;

    fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    /// Applies `op` on `targets`; inputs are already validated.
    fn apply_unchecked(&self, op: &Operator, targets: &[usize]) -> Self;

    /// `⟨ψ|M|ψ⟩` or `Tr(ρM)` for a full-register matrix.
    fn expectation_unchecked(&self, m: &CMatrix) -> C64;

    /// Computational-basis populations.
    fn populations(&self) -> Result<Vec<f64>>;
}

impl QuantumState for StateVector {
    fn n_qubits(&self) -> usize {
        StateVector::n_qubits(self)
    }

    fn apply_unchecked(&self, op: &Operator, targets: &[usize]) -> Self {
        let n = self.n_qubits();
        let k = targets.len();
        let local_dim = 1usize << k;
        let offsets: Vec<usize> = (0..local_dim)
            .map(|m| {
                (0..k)
                    .filter(|t| (m >> (k - 1 - t)) & 1 == 1)
                    .map(|t| 1usize << (n - 1 - targets[t]))
                    .sum()
            })
            .collect();
        let target_mask: usize = offsets[local_dim - 1];
        let src = self.amplitudes();
        let mut out = CVector::zeros(src.len());
        let mut block = vec![C64::default(); local_dim];
        for base in (0..src.len()).filter(|b| b & target_mask == 0) {
            for (m, off) in offsets.iter().enumerate() {
                block[m] = src[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                out[base | off] = (0..local_dim).map(|col| op.get(r, col) * block[col]).sum();
            }
        }
        StateVector::from_vector(out)
    }

    fn expectation_unchecked(&self, m: &CMatrix) -> C64 {
        self.amplitudes().dotc(&(m * self.amplitudes()))
    }

    fn populations(&self) -> Result<Vec<f64>> {
        Ok(self.amplitudes().iter().map(|a| a.norm_sqr()).collect())
    }
}

impl QuantumState for DensityMatrix {
    fn n_qubits(&self) -> usize {
        DensityMatrix::n_qubits(self)
    }

    fn apply_unchecked(&self, op: &Operator, targets: &[usize]) -> Self {
        let full = embed_unchecked(op, targets, self.n_qubits());
        let m = &full * self.matrix() * full.adjoint();
        DensityMatrix::from_parts(m, self.is_deviation())
    }

    fn expectation_unchecked(&self, m: &CMatrix) -> C64 {
        (self.matrix() * m).trace()
    }

    fn populations(&self) -> Result<Vec<f64>> {
        if self.is_deviation() {
            return Err(Error::InvalidDensityMatrix(
                "a deviation matrix has no outcome distribution".into(),
            ));
        }
        Ok(self.diagonal())
    }
}

fn check_targets(targets: &[usize], n_qubits: usize) -> Result<()> {
    for (pos, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::QubitOutOfRange { index: t, n_qubits });
        }
        if targets[..pos].contains(&t) {
            return Err(Error::DuplicateQubit(t));
        }
    }
    Ok(())
}

fn embed_unchecked(op: &Operator, targets: &[usize], n_qubits: usize) -> CMatrix {
    let dim = 1usize << n_qubits;
    let k = targets.len();
    let local = |index: usize| -> usize {
        targets
            .iter()
            .fold(0usize, |acc, &t| (acc << 1) | crate::bits::qubit_bit(index, t, n_qubits))
    };
    let target_mask: usize = targets.iter().map(|&t| 1usize << (n_qubits - 1 - t)).sum();
    debug_assert_eq!(op.dim(), 1 << k);
    CMatrix::from_fn(dim, dim, |r, col| {
        if r & !target_mask != col & !target_mask {
            C64::default()
        } else {
            op.get(local(r), local(col))
        }
    })
}

/// Full-register matrix of `op` acting on `targets` of an `n_qubits` register.
pub fn embed(op: &Operator, targets: &[usize], n_qubits: usize) -> Result<Operator> {
    check_targets(targets, n_qubits)?;
    if op.dim() != 1 << targets.len() {
        return Err(Error::DimensionMismatch { expected: 1 << targets.len(), found: op.dim() });
    }
    Ok(Operator::from_parts(embed_unchecked(op, targets, n_qubits), op.kind()))
}

/// Applies `op` on the ordered `targets`. Density matrices transform as
/// `ρ → AρA†`.
pub fn apply<S: QuantumState>(op: &Operator, targets: &[usize], state: &S) -> Result<S> {
    check_targets(targets, state.n_qubits())?;
    if op.dim() != 1 << targets.len() {
        return Err(Error::DimensionMismatch { expected: 1 << targets.len(), found: op.dim() });
    }
    Ok(state.apply_unchecked(op, targets))
}

/// Real expectation value of a Hermitian operator on the whole register.
pub fn expectation<S: QuantumState>(op: &Operator, state: &S) -> Result<f64> {
    if !op.is_hermitian(tol::STRUCTURAL) {
        return Err(Error::NotStructured("Hermitian"));
    }
    if op.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), found: op.dim() });
    }
    let v = state.expectation_unchecked(op.matrix());
    debug_assert!(v.im.abs() < tol::STRUCTURAL * op.matrix().norm().max(1.0), "imaginary residue {}", v.im);
    Ok(v.re)
}

/// `⟨bra|op|ket⟩` with no normalization.
pub fn overlap(bra: &StateVector, op: &Operator, ket: &StateVector) -> Result<C64> {
    if bra.dim() != ket.dim() {
        return Err(Error::DimensionMismatch { expected: bra.dim(), found: ket.dim() });
    }
    if op.dim() != ket.dim() {
        return Err(Error::DimensionMismatch { expected: ket.dim(), found: op.dim() });
    }
    Ok(bra.amplitudes().dotc(&(op.matrix() * ket.amplitudes())))
}

/// Reduced state on `keep`, in the order given.
pub fn partial_trace(state: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = state.n_qubits();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial_trace needs at least one kept qubit".into()));
    }
    check_targets(keep, n)?;
    let keep_mask: usize = keep.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    let local = |index: usize| -> usize {
        keep.iter().fold(0usize, |acc, &q| (acc << 1) | crate::bits::qubit_bit(index, q, n))
    };
    let k = keep.len();
    let mut out = CMatrix::zeros(1 << k, 1 << k);
    let dim = state.dim();
    for r in 0..dim {
        let lr = local(r);
        for col in (0..dim).filter(|col| (r ^ col) & !keep_mask == 0) {
            out[(lr, local(col))] += state.get(r, col);
        }
    }
    Ok(DensityMatrix::from_parts(out, state.is_deviation()))
}

/// Outcome probabilities of a computational-basis measurement of `qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    qubits: Vec<usize>,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    /// Probabilities indexed by the big-endian outcome over `qubits`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, outcome: &BitString) -> f64 {
        assert_eq!(outcome.len(), self.qubits.len(), "outcome width");
        self.probs[outcome.value()]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BitString, f64)> + '_ {
        let k = self.qubits.len();
        self.probs.iter().enumerate().map(move |(v, &p)| (BitString::new(k, v).expect("in range"), p))
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        assert_eq!(self.probs.len(), other.probs.len());
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub fn measure_distribution<S: QuantumState>(state: &S, qubits: &[usize]) -> Result<Distribution> {
    let n = state.n_qubits();
    check_targets(qubits, n)?;
    let pops = state.populations()?;
    let k = qubits.len();
    let mut probs = vec![0.0; 1 << k];
    for (index, p) in pops.iter().enumerate() {
        let outcome = qubits.iter().fold(0usize, |acc, &q| (acc << 1) | crate::bits::qubit_bit(index, q, n));
        probs[outcome] += p;
    }
    Ok(Distribution { qubits: qubits.to_vec(), probs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gates;
    use crate::qstate::{c, max_abs_diff};

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn tensor_basis_and_plus_states() {
        let s = tensor(&StateVector::zero(), &StateVector::zero());
        assert_eq!(s.dim(), 4);
        assert!(close(s.amplitude(0), c(1.0, 0.0)));
        let ppp = StateVector::repeated(&StateVector::plus(), 3);
        let expect = 1.0 / (2.0 * 2f64.sqrt());
        assert!(ppp.amplitudes().iter().all(|a| close(*a, c(expect, 0.0))));
    }

    #[test]
    fn tensor_identity_x_flips_last_qubit() {
        let op = tensor(&Operator::identity(2), &gates::x());
        let out = apply(&op, &[0, 1], &StateVector::basis(2, 0)).unwrap();
        assert!(close(out.amplitude(1), c(1.0, 0.0)));
    }

    #[test]
    fn apply_examples() {
        let plus = apply(&gates::h(), &[0], &StateVector::zero()).unwrap();
        assert!(plus.fidelity(&StateVector::plus()).unwrap() > 1.0 - 1e-15);
        assert!(close(plus.amplitude(0), StateVector::plus().amplitude(0)));

        let flipped = apply(&gates::x(), &[3], &StateVector::basis(4, 0)).unwrap();
        assert!(close(flipped.amplitude(1), c(1.0, 0.0)));
    }

    #[test]
    fn apply_rejects_bad_targets() {
        let s = StateVector::basis(2, 0);
        assert_eq!(apply(&gates::x(), &[2], &s).unwrap_err(), Error::QubitOutOfRange { index: 2, n_qubits: 2 });
        assert_eq!(apply(&gates::cnot(), &[1, 1], &s).unwrap_err(), Error::DuplicateQubit(1));
        assert!(matches!(apply(&gates::cnot(), &[0], &s), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn target_order_matters_for_cnot() {
        // control on qubit 1, target qubit 0: |01⟩ → |11⟩
        let out = apply(&gates::cnot(), &[1, 0], &StateVector::basis(2, 0b01)).unwrap();
        assert!(close(out.amplitude(0b11), c(1.0, 0.0)));
    }

    #[test]
    fn density_apply_matches_pure() {
        let psi = StateVector::repeated(&StateVector::plus_i(), 3);
        let op = gates::cnot();
        let pure = apply(&op, &[2, 0], &psi).unwrap().to_density();
        let mixed = apply(&op, &[2, 0], &psi.to_density()).unwrap();
        assert!(max_abs_diff(pure.matrix(), mixed.matrix()) < 1e-14);
    }

    #[test]
    fn expectation_requires_hermitian() {
        let s = StateVector::zero();
        assert_eq!(expectation(&gates::s(), &s).unwrap_err(), Error::NotStructured("Hermitian"));
        assert!((expectation(&gates::z(), &s).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_identity() {
        let s = StateVector::basis(3, 0);
        let v = overlap(&s, &Operator::identity(8), &s).unwrap();
        assert!(close(v, c(1.0, 0.0)));
        assert!(overlap(&s, &Operator::identity(4), &s).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let rho = StateVector::basis(2, 0b01).to_density();
        let red = partial_trace(&rho, &[1]).unwrap();
        assert!(close(red.get(1, 1), c(1.0, 0.0)) && close(red.get(0, 0), c(0.0, 0.0)));

        let bell = StateVector::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap()
            .normalize()
            .unwrap()
            .to_density();
        let red = partial_trace(&bell, &[0]).unwrap();
        assert!(max_abs_diff(red.matrix(), &CMatrix::identity(2, 2).unscale(2.0)) < 1e-15);

        assert!(partial_trace(&bell, &[]).is_err());
        assert!(partial_trace(&bell, &[2]).is_err());
    }

    #[test]
    fn measure_examples() {
        let d = measure_distribution(&StateVector::basis(3, 0), &[0, 1, 2]).unwrap();
        assert_eq!(d.prob(&"000".parse().unwrap()), 1.0);
        assert!((d.total() - 1.0).abs() < 1e-12);
        let dev = DensityMatrix::diagonal_deviation(&[0.5, -0.5]).unwrap();
        assert!(measure_distribution(&dev, &[0]).is_err());
    }
}
