use crate::bits::BitString;
use crate::circuit::build_mzi;
use crate::error::{Error, Result};
use crate::qstate::{measure_distribution, overlap, Distribution, Operator, StateVector, C64};

/// `P_ij`: projector onto particles `i` and `j` being in the same path,
/// on an `n`-particle register.
pub fn projector_same(i: usize, j: usize, n: usize) -> Result<Operator> {
    check_pair(i, j, n)?;
    let entries: Vec<f64> = (0..1usize << n)
        .map(|b| {
            let same = crate::bits::qubit_bit(b, i, n) == crate::bits::qubit_bit(b, j, n);
            if same {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Operator::diagonal(&entries)?.with_kind(crate::qstate::OpKind::Projector)
}

fn check_pair(i: usize, j: usize, n: usize) -> Result<()> {
    for q in [i, j] {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: n });
        }
    }
    if i == j {
        return Err(Error::DuplicateQubit(i));
    }
    Ok(())
}

/// Pre-phase state selected by a detector outcome: outcome bit 0 (D0)
/// corresponds to `|−i⟩`, bit 1 (D1) to `|+i⟩`.
pub fn post_equivalent_state(outcome: &BitString) -> StateVector {
    let factors: Vec<StateVector> = outcome
        .bits()
        .map(|b| if b { StateVector::plus_i() } else { StateVector::minus_i() })
        .collect();
    crate::qstate::tensor_all(&factors)
}

/// Joint distribution over the `n` particle qubits followed by the ancilla,
/// after the probed interferometer acting on `|0…0⟩|0⟩_a`.
pub fn joint_distribution(n_particles: usize, pair: (usize, usize)) -> Result<Distribution> {
    let circuit = build_mzi(n_particles, Some(pair))?;
    let out = circuit.run(&StateVector::basis(n_particles + 1, 0))?;
    let qubits: Vec<usize> = (0..=n_particles).collect();
    measure_distribution(&out, &qubits)
}

/// Everything measured for one probe pair and one post-selected outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub n_particles: usize,
    /// 0-based particle pair.
    pub pair: (usize, usize),
    /// `|+⟩^⊗n`, the state just after the first beam splitter.
    pub preselected: StateVector,
    pub postselection: BitString,
    /// `⟨φ_post|P_ij|ψ_pre⟩` for the pre-phase state equivalent to the outcome.
    pub overlap_same: C64,
    /// `⟨−i,…,−i|P_ij|ψ_pre⟩` (equivalent to all particles at D0).
    pub overlap_minus_i: C64,
    /// `⟨+i,…,+i|P_ij|ψ_pre⟩` (equivalent to all particles at D1).
    pub overlap_plus_i: C64,
    /// Probability of the post-selected particle outcome.
    pub p_post: f64,
    /// Joint probability of the outcome and a flipped ancilla.
    pub p_joint_flip: f64,
    pub p_ancilla_flip_given_post: f64,
}

impl ProbeReport {
    /// Conditional probability that the pair shares a path.
    pub fn p_same_given_post(&self) -> f64 {
        1.0 - self.p_ancilla_flip_given_post
    }
}

/// Probe report for any particle count `n ≥ 2`.
pub fn probe_report(n_particles: usize, pair: (usize, usize), post: &BitString) -> Result<ProbeReport> {
    if n_particles < 2 {
        return Err(Error::InvalidArgument("a pair probe needs at least two particles".into()));
    }
    check_pair(pair.0, pair.1, n_particles)?;
    if post.len() != n_particles {
        return Err(Error::InvalidBits(format!("{post} has {} bits, expected {n_particles}", post.len())));
    }
    let pre = StateVector::repeated(&StateVector::plus(), n_particles);
    let proj = projector_same(pair.0, pair.1, n_particles)?;
    let overlap_same = overlap(&post_equivalent_state(post), &proj, &pre)?;
    let overlap_minus_i = overlap(&StateVector::repeated(&StateVector::minus_i(), n_particles), &proj, &pre)?;
    let overlap_plus_i = overlap(&StateVector::repeated(&StateVector::plus_i(), n_particles), &proj, &pre)?;

    let joint = joint_distribution(n_particles, pair)?;
    let p_keep = joint.probs()[post.value() << 1];
    let p_flip = joint.probs()[(post.value() << 1) | 1];
    let p_post = p_keep + p_flip;
    let conditional = if p_post > 0.0 { p_flip / p_post } else { 0.0 };

    Ok(ProbeReport {
        n_particles,
        pair,
        preselected: pre,
        postselection: *post,
        overlap_same,
        overlap_minus_i,
        overlap_plus_i,
        p_post,
        p_joint_flip: p_flip,
        p_ancilla_flip_given_post: conditional,
    })
}

/// Three particles, probe `pair`, post-selected on `post`.
pub fn qphe_analysis(pair: (usize, usize), post: &BitString) -> Result<ProbeReport> {
    if post.len() != 3 {
        return Err(Error::InvalidBits(format!("{post} must have 3 bits")));
    }
    probe_report(3, pair, post)
}

/// Same pipeline for `3 ≤ n ≤ 8` particles in two paths.
pub fn generalized_qphe(n_particles: usize, pair: (usize, usize), post: &BitString) -> Result<ProbeReport> {
    if !(3..=8).contains(&n_particles) {
        return Err(Error::TooLarge(format!("{n_particles} particles outside 3..=8")));
    }
    probe_report(n_particles, pair, post)
}
