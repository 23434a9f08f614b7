use super::system::{magnetic_number, SpinSystem};
use crate::bits::{qubit_bit, BitString};
use crate::error::{Error, Result};
use crate::qstate::DensityMatrix;

/// High-temperature equilibrium: purity factor and per-spin relative
/// polarizations.
#[derive(Debug, Clone, PartialEq)]
pub struct PrepSpec {
    pub epsilon: f64,
    /// Defaults to 1 for every spin when `None`.
    pub gamma_weights: Option<Vec<f64>>,
}

impl Default for PrepSpec {
    fn default() -> Self {
        Self { epsilon: 1e-5, gamma_weights: None }
    }
}

impl PrepSpec {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon, gamma_weights: None }
    }

    pub fn with_weights(epsilon: f64, weights: Vec<f64>) -> Self {
        Self { epsilon, gamma_weights: Some(weights) }
    }

    fn weights(&self, n: usize) -> Result<Vec<f64>> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("purity factor {} must be positive", self.epsilon)));
        }
        match &self.gamma_weights {
            None => Ok(vec![1.0; n]),
            Some(w) if w.len() == n => Ok(w.clone()),
            Some(w) => Err(Error::InvalidArgument(format!("{} weights for {n} spins", w.len()))),
        }
    }
}

/// Deviation matrix `ε Σ_i w_i I_zi`.
pub fn thermal_state(sys: &SpinSystem, prep: &PrepSpec) -> Result<DensityMatrix> {
    let n = sys.n_spins();
    let w = prep.weights(n)?;
    let diag: Vec<f64> = (0..1usize << n)
        .map(|b| prep.epsilon * (0..n).map(|k| w[k] * magnetic_number(qubit_bit(b, k, n))).sum::<f64>())
        .collect();
    DensityMatrix::diagonal_deviation(&diag)
}

/// Swaps the populations of two levels; coherences are untouched. Models a
/// transition-selective inversion pulse as an ideal swap.
pub fn invert_populations(state: &DensityMatrix, level_a: &BitString, level_b: &BitString) -> Result<DensityMatrix> {
    let n = state.n_qubits();
    for l in [level_a, level_b] {
        if l.len() != n {
            return Err(Error::InvalidBits(format!("level {l} has {} bits, register has {n}", l.len())));
        }
    }
    if level_a == level_b {
        return Err(Error::InvalidArgument(format!("cannot invert level {level_a} with itself")));
    }
    let (a, b) = (level_a.value(), level_b.value());
    let mut m = state.matrix().clone();
    let tmp = m[(a, a)];
    m[(a, a)] = m[(b, b)];
    m[(b, b)] = tmp;
    Ok(DensityMatrix::from_parts(m, state.is_deviation()))
}

/// Partial pseudopure deviation `ε |0…0⟩⟨0…0| ⊗ σ_z/2` on the particles,
/// obtained as the difference between equilibrium and the state with the
/// two ancilla levels of the all-zero particle state inverted.
pub fn pseudopure_prepare(sys: &SpinSystem, prep: &PrepSpec) -> Result<DensityMatrix> {
    let n = sys.n_spins();
    let eq = thermal_state(sys, prep)?;
    let ground = BitString::zeros(n);
    let flipped = BitString::new(n, 1 << (n - 1 - sys.ancilla_index()))?;
    let inverted = invert_populations(&eq, &ground, &flipped)?;
    let w_anc = prep.weights(n)?[sys.ancilla_index()];
    let diff = (eq.matrix() - inverted.matrix()).unscale(2.0 * w_anc);
    DensityMatrix::deviation(diff)
}
