//! Load a spin system from TOML and look at its ancilla lines.
//!
//! cargo run --example custom_spin_system -- path/to/system.toml

use qphe::nmr::{line_frequency, line_frequency_from_energies, SpinSystem, DEFAULT_SYSTEM_TOML};
use qphe::BitString;

fn main() -> qphe::Result<()> {
    let sys = match std::env::args().nth(1) {
        Some(path) => SpinSystem::from_file(path.as_ref())?,
        None => SpinSystem::from_toml_str(DEFAULT_SYSTEM_TOML)?,
    };
    println!("spins {:?}, ancilla {}", sys.labels(), sys.labels()[sys.ancilla_index()]);
    for label in BitString::all(sys.n_spins() - 1) {
        println!(
            "  {label}  {:10.2} Hz  (from eigenvalues {:10.2})",
            line_frequency(&sys, &label)?,
            line_frequency_from_energies(&sys, &label)
        );
    }
    print!("{}", sys.to_toml());
    Ok(())
}
