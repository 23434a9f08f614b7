use std::fmt;
use std::str::FromStr;

use super::{detect, pseudopure_prepare, thermal_state, PrepSpec, Spectrum, SpinSystem};
use crate::circuit::build_mzi;
use crate::error::{Error, Result};
use crate::qstate::DensityMatrix;

/// Points in the experiment where the ancilla spectrum is recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Thermal,
    Pseudopure,
    /// Full interferometer without a probe.
    MziOnly,
    /// Full interferometer with the `U_ij` probe on a 0-based pair.
    Probe(usize, usize),
}

impl Stage {
    /// The six stages of a three-particle run, in display order.
    pub fn standard() -> [Stage; 6] {
        [Stage::Thermal, Stage::Pseudopure, Stage::MziOnly, Stage::Probe(0, 1), Stage::Probe(0, 2), Stage::Probe(1, 2)]
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Thermal => f.write_str("thermal"),
            Stage::Pseudopure => f.write_str("pseudopure"),
            Stage::MziOnly => f.write_str("mzi"),
            Stage::Probe(i, j) => write!(f, "u{}{}", i + 1, j + 1),
        }
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "thermal" => Ok(Stage::Thermal),
            "pseudopure" => Ok(Stage::Pseudopure),
            "mzi" | "mzi-only" => Ok(Stage::MziOnly),
            p if p.len() == 3 && p.starts_with('u') => {
                let d: Vec<usize> = p[1..].chars().filter_map(|c| c.to_digit(10)).map(|d| d as usize).collect();
                match d[..] {
                    [i, j] if i >= 1 && j >= 1 && i != j => Ok(Stage::Probe(i - 1, j - 1)),
                    _ => Err(Error::InvalidArgument(format!("bad stage {s}"))),
                }
            }
            _ => Err(Error::InvalidArgument(format!("unknown stage {s}"))),
        }
    }
}

/// Deviation matrix at a stage. Circuit stages run the ideal interferometer
/// on the pseudopure state; the ancilla must be the last spin.
pub fn stage_state(sys: &SpinSystem, prep: &PrepSpec, stage: Stage) -> Result<DensityMatrix> {
    let n = sys.n_spins();
    match stage {
        Stage::Thermal => thermal_state(sys, prep),
        Stage::Pseudopure => pseudopure_prepare(sys, prep),
        Stage::MziOnly | Stage::Probe(..) => {
            if sys.ancilla_index() != n - 1 {
                return Err(Error::Config("circuit stages need the ancilla as the last spin".into()));
            }
            let probe = match stage {
                Stage::Probe(i, j) => Some((i, j)),
                _ => None,
            };
            let circuit = build_mzi(n - 1, probe)?.padded(n)?;
            circuit.run(&pseudopure_prepare(sys, prep)?)
        }
    }
}

pub fn stage_spectrum(sys: &SpinSystem, prep: &PrepSpec, stage: Stage) -> Result<Spectrum> {
    detect(&stage_state(sys, prep, stage)?, sys)
}
