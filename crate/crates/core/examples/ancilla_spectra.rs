//! Ancilla spectra through the experiment: thermal, pseudopure, the bare
//! interferometer, and each pair probe. Amplitudes are in units of a
//! thermal line.

use qphe::nmr::{stage_spectrum, PrepSpec, SpinSystem, Stage};

fn main() -> qphe::Result<()> {
    let sys = SpinSystem::default_four_spin();
    let prep = PrepSpec::default();
    let unit = prep.epsilon / 2.0;
    println!("{:<11}{}", "stage", ["000", "001", "010", "011", "100", "101", "110", "111"].map(|l| format!("{l:>8}")).concat());
    for stage in Stage::standard() {
        let spec = stage_spectrum(&sys, &prep, stage)?;
        let row: String = spec.lines.iter().map(|l| format!("{:>8.3}", l.amplitude / unit)).collect();
        println!("{:<11}{row}", stage.to_string());
    }
    let spec = stage_spectrum(&sys, &prep, Stage::Thermal)?;
    println!("line positions (Hz):");
    for l in &spec.lines {
        println!("  {}  {:9.1}", l.label, l.frequency);
    }
    Ok(())
}
