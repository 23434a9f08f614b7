use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use super::propagate::{control_operators, diagonal_exp, hard_pulse, hermitian_exp};
use crate::error::{Error, Result};
use crate::nmr::{energies, internal_hamiltonian, SpinSystem};
use crate::qstate::{OpKind, Operator};

/// One step of a pulse program.
#[derive(Debug, Clone, PartialEq)]
pub enum PulseSegment {
    /// Free evolution under the internal Hamiltonian.
    Delay { duration: f64 },
    /// Ideal instantaneous rotation: spin `k` turns by `angles[k]` about the
    /// axis at `phase` in the xy-plane. The duration is bookkeeping only.
    HardPulse { duration: f64, angles: Vec<f64>, phase: f64 },
    /// Constant RF amplitudes (rad/s) on top of the internal Hamiltonian.
    RfSlice { duration: f64, ux: Vec<f64>, uy: Vec<f64> },
}

impl PulseSegment {
    pub fn duration(&self) -> f64 {
        match *self {
            PulseSegment::Delay { duration }
            | PulseSegment::HardPulse { duration, .. }
            | PulseSegment::RfSlice { duration, .. } => duration,
        }
    }

    fn validate(&self, n_spins: usize) -> Result<()> {
        let d = self.duration();
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::InvalidArgument(format!("segment duration {d} must be finite and non-negative")));
        }
        let widths: &[usize] = match self {
            PulseSegment::Delay { .. } => &[],
            PulseSegment::HardPulse { angles, .. } => &[angles.len()],
            PulseSegment::RfSlice { ux, uy, .. } => &[ux.len(), uy.len()],
        };
        for &w in widths {
            if w != n_spins {
                return Err(Error::DimensionMismatch { expected: n_spins, found: w });
            }
        }
        Ok(())
    }
}

/// Pulse program for one spin system.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    sys: SpinSystem,
    segments: Vec<PulseSegment>,
}

impl PulseSequence {
    pub fn new(sys: SpinSystem) -> Self {
        PulseSequence { sys, segments: Vec::new() }
    }

    pub fn push(&mut self, segment: PulseSegment) -> Result<()> {
        segment.validate(self.sys.n_spins())?;
        self.segments.push(segment);
        Ok(())
    }

    pub fn with(mut self, segment: PulseSegment) -> Result<Self> {
        self.push(segment)?;
        Ok(self)
    }

    pub fn system(&self) -> &SpinSystem {
        &self.sys
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(PulseSegment::duration).sum()
    }

    /// Sum of delay and RF time, i.e. the time the Hamiltonian acts.
    pub fn evolution_time(&self) -> f64 {
        self.segments
            .iter()
            .filter(|s| !matches!(s, PulseSegment::HardPulse { .. }))
            .map(PulseSegment::duration)
            .sum()
    }

    /// One segment per line:
    ///
    /// ```text
    /// delay <seconds>
    /// hard <seconds> <phase> <angle_0> … <angle_n-1>
    /// rf <seconds> <ux_0> <uy_0> … <ux_n-1> <uy_n-1>
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = format!("# spins {}\n", self.sys.labels().join(" "));
        for seg in &self.segments {
            match seg {
                PulseSegment::Delay { duration } => writeln!(out, "delay {duration:e}"),
                PulseSegment::HardPulse { duration, angles, phase } => {
                    write!(out, "hard {duration:e} {phase:e}").unwrap();
                    angles.iter().for_each(|a| write!(out, " {a:e}").unwrap());
                    writeln!(out)
                }
                PulseSegment::RfSlice { duration, ux, uy } => {
                    write!(out, "rf {duration:e}").unwrap();
                    ux.iter().zip(uy).for_each(|(x, y)| write!(out, " {x:e} {y:e}").unwrap());
                    writeln!(out)
                }
            }
            .unwrap();
        }
        out
    }

    /// Inverse of [`to_text`](Self::to_text); `#` starts a comment.
    pub fn from_text(text: &str, sys: SpinSystem) -> Result<Self> {
        let n = sys.n_spins();
        let mut seq = PulseSequence::new(sys);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: lineno + 1, message };
            let mut words = line.split_whitespace();
            let kind = words.next().unwrap_or_default();
            let nums = words
                .map(|w| w.parse::<f64>().map_err(|e| err(format!("bad number {w:?}: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            let expect = |count: usize| {
                if nums.len() == count {
                    Ok(())
                } else {
                    Err(err(format!("{kind} takes {count} numbers, found {}", nums.len())))
                }
            };
            let segment = match kind {
                "delay" => {
                    expect(1)?;
                    PulseSegment::Delay { duration: nums[0] }
                }
                "hard" => {
                    expect(2 + n)?;
                    PulseSegment::HardPulse { duration: nums[0], phase: nums[1], angles: nums[2..].to_vec() }
                }
                "rf" => {
                    expect(1 + 2 * n)?;
                    let (ux, uy) = nums[1..].chunks(2).map(|p| (p[0], p[1])).unzip();
                    PulseSegment::RfSlice { duration: nums[0], ux, uy }
                }
                other => return Err(err(format!("unknown segment kind {other:?}"))),
            };
            seq.push(segment).map_err(|e| err(e.to_string()))?;
        }
        Ok(seq)
    }
}

/// Ordered product of segment propagators (first segment acts first).
pub fn simulate_sequence(seq: &PulseSequence) -> Operator {
    let sys = &seq.sys;
    let n = sys.n_spins();
    let diag = energies(sys);
    let mut total = Operator::identity(1 << n).into_matrix();
    let mut h_rf = None;
    for seg in &seq.segments {
        let step = match seg {
            PulseSegment::Delay { duration } => diagonal_exp(&diag, *duration),
            PulseSegment::HardPulse { angles, phase, .. } => hard_pulse(angles, *phase).into_matrix(),
            PulseSegment::RfSlice { duration, ux, uy } => {
                let (h0, ops) = h_rf.get_or_insert_with(|| (internal_hamiltonian(sys).into_matrix(), control_operators(n)));
                let mut h = h0.clone();
                for k in 0..n {
                    h += ops[2 * k].scale(ux[k]) + ops[2 * k + 1].scale(uy[k]);
                }
                hermitian_exp(&h, *duration).propagator
            }
        };
        total = step * total;
    }
    Operator::from_parts(total, OpKind::Unitary)
}

/// Phase of the opening ancilla π/2 pulse (about +y).
pub const CNOT_OPEN_PHASE: f64 = FRAC_PI_2;
/// Phase of the closing ancilla π/2 pulse (about +x).
pub const CNOT_CLOSE_PHASE: f64 = 0.0;

/// Walsh sign patterns over the four delays. The control and the ancilla
/// share the first; each spectator gets its own, so every coupling except
/// control–ancilla and every offset averages to zero.
const WALSH: [[i8; 4]; 3] = [[1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]];

/// CNOT from particle `control` (0-based, register index) to the ancilla, up
/// to single-spin z rotations: four delays of `1/(8 J′)`, refocusing π pulses
/// about y, and ancilla π/2 pulses at [`CNOT_OPEN_PHASE`] and
/// [`CNOT_CLOSE_PHASE`]. Supports registers of up to four spins.
pub fn cnot_reference_sequence(control: usize, sys: &SpinSystem) -> Result<PulseSequence> {
    let n = sys.n_spins();
    let a = sys.ancilla_index();
    if control >= n || control == a {
        return Err(Error::InvalidArgument(format!("control spin {control} must be a particle spin")));
    }
    let j = sys.coupling(control, a);
    if j == 0.0 || !j.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "no coupling between {} and the ancilla",
            sys.labels()[control]
        )));
    }
    let spectators: Vec<usize> = (0..n).filter(|&k| k != control && k != a).collect();
    if spectators.len() > 2 {
        return Err(Error::TooLarge(format!("refocusing scheme covers at most 4 spins, got {n}")));
    }
    let mut pattern = vec![[1i8; 4]; n];
    pattern[control] = WALSH[0];
    pattern[a] = WALSH[0];
    for (s, &k) in spectators.iter().enumerate() {
        pattern[k] = WALSH[s + 1];
    }

    let tau = 1.0 / (8.0 * j.abs());
    let pi_on = |flip: &dyn Fn(usize) -> bool| -> Vec<f64> { (0..n).map(|k| if flip(k) { PI } else { 0.0 }).collect() };
    let mut quarter = vec![0.0; n];
    quarter[a] = FRAC_PI_2;

    let mut seq = PulseSequence::new(sys.clone());
    seq.push(PulseSegment::HardPulse { duration: 0.0, angles: quarter.clone(), phase: CNOT_OPEN_PHASE })?;
    for interval in 0..4 {
        seq.push(PulseSegment::Delay { duration: tau })?;
        let angles = if interval < 3 {
            pi_on(&|k| pattern[k][interval] != pattern[k][interval + 1])
        } else {
            // return every spin to its starting orientation
            pi_on(&|k| pattern[k][3] != pattern[k][0])
        };
        if angles.iter().any(|&x| x != 0.0) {
            seq.push(PulseSegment::HardPulse { duration: 0.0, angles, phase: FRAC_PI_2 })?;
        }
    }
    seq.push(PulseSegment::HardPulse { duration: 0.0, angles: quarter, phase: CNOT_CLOSE_PHASE })?;
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gates;
    use crate::control::{fidelity_gate, local_z_invariant_fidelity};
    use crate::qstate::{c, embed, max_abs_diff};

    fn sys() -> SpinSystem {
        SpinSystem::default_four_spin()
    }

    fn ideal_cnot(control: usize) -> Operator {
        embed(&gates::cnot(), &[control, 3], 4).unwrap()
    }

    #[test]
    fn empty_is_identity() {
        let u = simulate_sequence(&PulseSequence::new(sys()));
        assert!(max_abs_diff(u.matrix(), Operator::identity(16).matrix()) < 1e-15);
    }

    #[test]
    fn single_spin_delay_is_z_rotation() {
        let one = SpinSystem::new(vec!["A".into(), "B".into()], vec![130.0, 0.0], vec![vec![0.0; 2]; 2], 1).unwrap();
        let t = 1.3e-3;
        let u = simulate_sequence(&PulseSequence::new(one).with(PulseSegment::Delay { duration: t }).unwrap());
        // H = −2πν I_z: |0⟩ picks up e^{+iπνt}, |1⟩ e^{−iπνt}
        let angle = 2.0 * PI * 130.0 * t;
        let rel = u.get(2, 2) / u.get(0, 0);
        assert!((rel - C64::from_polar(1.0, -angle)).norm() < 1e-12);
        assert!((u.get(1, 1) - u.get(0, 0)).norm() < 1e-15);
        assert!(u.is_diagonal(0.0));
    }

    use crate::qstate::C64;

    #[test]
    fn delays_add() {
        let s = sys();
        let two = PulseSequence::new(s.clone())
            .with(PulseSegment::Delay { duration: 1.7e-4 })
            .unwrap()
            .with(PulseSegment::Delay { duration: 3.1e-4 })
            .unwrap();
        let one = PulseSequence::new(s).with(PulseSegment::Delay { duration: 4.8e-4 }).unwrap();
        assert!(max_abs_diff(simulate_sequence(&two).matrix(), simulate_sequence(&one).matrix()) < 1e-12);
    }

    #[test]
    fn rf_slice_without_amplitude_matches_delay() {
        let s = sys();
        let rf = PulseSequence::new(s.clone())
            .with(PulseSegment::RfSlice { duration: 2e-4, ux: vec![0.0; 4], uy: vec![0.0; 4] })
            .unwrap();
        let d = PulseSequence::new(s).with(PulseSegment::Delay { duration: 2e-4 }).unwrap();
        assert!(max_abs_diff(simulate_sequence(&rf).matrix(), simulate_sequence(&d).matrix()) < 1e-12);
    }

    #[test]
    fn reference_cnots_reach_target() {
        let s = sys();
        for control in 0..3 {
            let seq = cnot_reference_sequence(control, &s).unwrap();
            let u = simulate_sequence(&seq);
            assert!(u.is_unitary(1e-9));
            let f = local_z_invariant_fidelity(&ideal_cnot(control), &u).unwrap();
            assert!(f.fidelity >= 1.0 - 1e-9, "control {control}: {}", f.fidelity);
            let j_time = seq.evolution_time() * s.coupling(control, 3);
            assert!((j_time - 0.5).abs() < 1e-12);
            assert!(fidelity_gate(&ideal_cnot(control), &u).unwrap() <= f.fidelity + 1e-15);
        }
    }

    #[test]
    fn reference_cnot_errors() {
        let s = sys();
        assert!(cnot_reference_sequence(3, &s).is_err());
        assert!(cnot_reference_sequence(7, &s).is_err());
        assert!(cnot_reference_sequence(1, &s.with_coupling(1, 3, 0.0).unwrap()).is_err());
    }

    #[test]
    fn text_round_trip() {
        let s = sys();
        let seq = cnot_reference_sequence(0, &s)
            .unwrap()
            .with(PulseSegment::RfSlice { duration: 4e-6, ux: vec![0.1, -2.0, 3.3e4, 0.0], uy: vec![1.0 / 3.0, 0.0, -7.0, 2.5] })
            .unwrap();
        let back = PulseSequence::from_text(&seq.to_text(), s.clone()).unwrap();
        assert_eq!(back, seq);
        assert!(PulseSequence::from_text("hard 0 0 1\n", s.clone()).is_err());
        assert!(matches!(PulseSequence::from_text("delay 1e-3\nwait 2\n", s.clone()), Err(Error::Parse { line: 2, .. })));
        assert!(PulseSequence::from_text("delay -1\n", s).is_err());
    }

    #[test]
    fn pi_pulse_about_y_flips() {
        let u = hard_pulse(&[PI], FRAC_PI_2);
        assert!((u.get(1, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((u.get(0, 1) - c(-1.0, 0.0)).norm() < 1e-15);
    }
}
