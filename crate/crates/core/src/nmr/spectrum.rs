use std::f64::consts::FRAC_1_SQRT_2;

use super::system::{energies, magnetic_number, SpinSystem};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::format;
use crate::qstate::{c, CMatrix, DensityMatrix, OpKind, Operator, QuantumState};

/// Linewidth (FWHM, Hz) used when a spectrum is rendered without an explicit one.
pub const DEFAULT_LINEWIDTH: f64 = 25.0;

/// One ancilla transition.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    /// Rotating-frame offset in Hz.
    pub frequency: f64,
    pub amplitude: f64,
    /// Particle (non-ancilla) spin states.
    pub label: BitString,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub lines: Vec<Line>,
    pub linewidth: f64,
}

impl Spectrum {
    pub fn line(&self, label: &BitString) -> Option<&Line> {
        self.lines.iter().find(|l| l.label == *label)
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.lines.iter().map(|l| l.amplitude).collect()
    }

    /// Lines whose amplitude exceeds `threshold` in magnitude.
    pub fn nonzero(&self, threshold: f64) -> impl Iterator<Item = &Line> {
        self.lines.iter().filter(move |l| l.amplitude.abs() > threshold)
    }

    /// `label,frequency_hz,amplitude`
    pub fn to_csv(&self) -> Result<String> {
        format::csv_string(
            &["label", "frequency_hz", "amplitude"],
            self.lines.iter().map(|l| [l.label.to_string(), format::num(l.frequency), format::num(l.amplitude)]),
        )
    }

    pub fn render(&self, grid: &[f64]) -> Result<Vec<f64>> {
        render(self, self.linewidth, grid)
    }
}

/// Ancilla transition frequency for a particle-state label, in Hz:
/// `(E(s, ancilla 1) − E(s, ancilla 0)) / 2π = ν_a − Σ_p J′_{p,a} m_p`,
/// with `m_p = +1/2` for bit 0.
pub fn line_frequency(sys: &SpinSystem, label: &BitString) -> Result<f64> {
    let particles = sys.particle_indices();
    if label.len() != particles.len() {
        return Err(Error::InvalidBits(format!(
            "label {label} has {} bits, expected {}",
            label.len(),
            particles.len()
        )));
    }
    let a = sys.ancilla_index();
    let shift: f64 = particles
        .iter()
        .enumerate()
        .map(|(k, &p)| sys.coupling(p, a) * magnetic_number(label.bit(k) as usize))
        .sum();
    Ok(sys.nu()[a] - shift)
}

/// Register index of particle label `label` with the ancilla set to `anc`.
fn register_index(sys: &SpinSystem, label: &BitString, anc: usize) -> usize {
    let n = sys.n_spins();
    let mut bits = Vec::with_capacity(n);
    let mut k = 0;
    for q in 0..n {
        if q == sys.ancilla_index() {
            bits.push(anc == 1);
        } else {
            bits.push(label.bit(k));
            k += 1;
        }
    }
    BitString::from_bits(&bits).value()
}

/// Frequencies from explicit eigenvalue differences of the Hamiltonian.
pub fn line_frequency_from_energies(sys: &SpinSystem, label: &BitString) -> f64 {
    let e = energies(sys);
    (e[register_index(sys, label, 1)] - e[register_index(sys, label, 0)]) / (2.0 * std::f64::consts::PI)
}

/// Ideal 90° ancilla read pulse about +y, `exp(−i π/2 I_y)`.
fn read_pulse() -> Operator {
    let s = FRAC_1_SQRT_2;
    Operator::from_parts(
        CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(-s, 0.0), c(s, 0.0), c(s, 0.0)]),
        OpKind::Unitary,
    )
}

/// Ancilla spectrum after a 90° read pulse. Each particle state `s` gives one
/// line whose amplitude is the real part of the `(s,0)–(s,1)` coherence, so
/// equilibrium magnetization reads as positive absorption.
pub fn detect(state: &DensityMatrix, sys: &SpinSystem) -> Result<Spectrum> {
    if state.n_qubits() != sys.n_spins() {
        return Err(Error::DimensionMismatch { expected: 1 << sys.n_spins(), found: state.dim() });
    }
    let pulsed = state.apply_unchecked(&read_pulse(), &[sys.ancilla_index()]);
    let width = sys.n_spins() - 1;
    let lines = BitString::all(width)
        .map(|label| {
            let (i0, i1) = (register_index(sys, &label, 0), register_index(sys, &label, 1));
            Ok(Line { frequency: line_frequency(sys, &label)?, amplitude: pulsed.get(i0, i1).re, label })
        })
        .collect::<Result<_>>()?;
    Ok(Spectrum { lines, linewidth: DEFAULT_LINEWIDTH })
}

/// Sum of Lorentzians with full width at half maximum `linewidth`; each line
/// peaks at its amplitude.
pub fn render(spec: &Spectrum, linewidth: f64, grid: &[f64]) -> Result<Vec<f64>> {
    if !(linewidth > 0.0) {
        return Err(Error::InvalidArgument(format!("linewidth {linewidth} must be positive")));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty frequency grid".into()));
    }
    let hw2 = (linewidth / 2.0).powi(2);
    Ok(grid
        .iter()
        .map(|&f| spec.lines.iter().map(|l| l.amplitude * hw2 / ((f - l.frequency).powi(2) + hw2)).sum())
        .collect())
}

/// `frequency_hz,intensity`
pub fn rendered_csv(grid: &[f64], intensity: &[f64]) -> Result<String> {
    assert_eq!(grid.len(), intensity.len());
    format::csv_string(
        &["frequency_hz", "intensity"],
        grid.iter().zip(intensity).map(|(f, i)| [format::num(*f), format::num(*i)]),
    )
}

/// Evenly spaced grid over `[start, stop]` with `points ≥ 2` samples.
pub fn linear_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2);
    let step = (stop - start) / (points - 1) as f64;
    (0..points).map(|k| start + step * k as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmr::{pseudopure_prepare, thermal_state, PrepSpec};

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn uncoupled_lines_sit_at_ancilla_offset() {
        let sys = SpinSystem::default_four_spin();
        let mut free = sys.clone();
        for p in 0..3 {
            free = free.with_coupling(p, 3, 0.0).unwrap();
        }
        for label in BitString::all(3) {
            assert_eq!(line_frequency(&free, &label).unwrap(), sys.nu()[3]);
        }
        let spread = line_frequency(&sys, &bits("111")).unwrap() - line_frequency(&sys, &bits("000")).unwrap();
        let sum: f64 = (0..3).map(|p| sys.coupling(p, 3)).sum();
        assert!((spread - sum).abs() < 1e-9);
        assert!(line_frequency(&sys, &bits("00")).is_err());
    }

    #[test]
    fn thermal_lines_positive_and_equal() {
        let sys = SpinSystem::default_four_spin();
        let spec = detect(&thermal_state(&sys, &PrepSpec::new(1e-5)).unwrap(), &sys).unwrap();
        assert_eq!(spec.lines.len(), 8);
        for l in &spec.lines {
            assert!((l.amplitude - 0.5e-5).abs() < 1e-18, "{l:?}");
        }
    }

    #[test]
    fn pseudopure_single_line() {
        let sys = SpinSystem::default_four_spin();
        let spec = detect(&pseudopure_prepare(&sys, &PrepSpec::new(1e-5)).unwrap(), &sys).unwrap();
        let lines: Vec<&Line> = spec.nonzero(1e-15).collect();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].label, bits("000"));
        assert!((lines[0].amplitude - 0.5e-5).abs() < 1e-18);
    }

    #[test]
    fn detect_rejects_wrong_size() {
        let sys = SpinSystem::default_four_spin();
        let rho = DensityMatrix::diagonal_deviation(&[0.5, -0.5]).unwrap();
        assert!(detect(&rho, &sys).is_err());
    }

    #[test]
    fn render_peaks_and_area() {
        let spec = Spectrum {
            lines: vec![
                Line { frequency: 0.0, amplitude: 1.0, label: bits("0") },
                Line { frequency: 1000.0, amplitude: -0.5, label: bits("1") },
            ],
            linewidth: 4.0,
        };
        let y = render(&spec, 4.0, &[0.0, 1000.0]).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-4 && (y[1] + 0.5).abs() < 1e-4);
        let grid = linear_grid(-20000.0, 20000.0, 400_001);
        let y = render(&spec, 4.0, &grid).unwrap();
        let area: f64 = y.iter().sum::<f64>() * (grid[1] - grid[0]);
        let expect = 0.5 * std::f64::consts::PI * 2.0;
        assert!(((area - expect) / expect).abs() < 0.02);
        assert!(render(&spec, 0.0, &grid).is_err());
        assert!(render(&spec, 1.0, &[]).is_err());
    }

    #[test]
    fn csv_columns() {
        let sys = SpinSystem::default_four_spin();
        let spec = detect(&thermal_state(&sys, &PrepSpec::new(1.0)).unwrap(), &sys).unwrap();
        let csv = spec.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("label,frequency_hz,amplitude"));
        assert_eq!(lines.count(), 8);
    }
}
