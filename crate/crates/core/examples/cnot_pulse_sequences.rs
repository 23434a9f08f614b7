//! Delay/refocusing sequences for CNOT(F_i → H4): simulate, compare with the
//! ideal gate up to z rotations, and show that spectator couplings drop out.

use qphe::circuit::gates;
use qphe::control::{cnot_reference_sequence, fidelity_gate, local_z_invariant_fidelity, simulate_sequence};
use qphe::nmr::SpinSystem;
use qphe::qstate::embed;

fn main() -> qphe::Result<()> {
    let sys = SpinSystem::default_four_spin();
    let a = sys.ancilla_index();
    for control in sys.particle_indices() {
        let seq = cnot_reference_sequence(control, &sys)?;
        let ideal = embed(&gates::cnot(), &[control, a], sys.n_spins())?;
        let u = simulate_sequence(&seq);
        let lz = local_z_invariant_fidelity(&ideal, &u)?;
        println!(
            "C{}NOT4: tau = {:.1} us, raw fidelity {:.4}, up to z rotations {:.12}",
            control + 1,
            1e6 * seq.evolution_time() / 4.0,
            fidelity_gate(&ideal, &u)?,
            lz.fidelity
        );

        // scramble every coupling the sequence is supposed to refocus
        let mut other = sys.clone();
        for (i, j) in [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)] {
            if (i, j) != (control.min(a), control.max(a)) {
                other = other.with_coupling(i, j, 37.0 * (i + 2 * j) as f64)?;
            }
        }
        let scrambled = simulate_sequence(&cnot_reference_sequence(control, &other)?);
        println!("        spectators scrambled: {:.12}", local_z_invariant_fidelity(&ideal, &scrambled)?.fidelity);
    }
    print!("{}", cnot_reference_sequence(0, &sys)?.to_text());
    Ok(())
}
