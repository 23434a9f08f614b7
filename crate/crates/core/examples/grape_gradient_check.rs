//! Exact GRAPE gradients against central finite differences.

use qphe::circuit::gates;
use qphe::control::{gradient_check_with_step, ControlField, ControlProblem, DEFAULT_MAX_AMPLITUDE};
use qphe::nmr::SpinSystem;
use qphe::qstate::embed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> qphe::Result<()> {
    let sys = SpinSystem::default_four_spin();
    let target = embed(&gates::cnot(), &[0, 3], 4)?;
    let problem = ControlProblem::new(target, 20, 4e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut field = ControlField::zeros(20, 4, 4e-6);
    for k in 0..20 {
        for c in 0..8 {
            field.set(k, c, rng.random_range(-0.5..0.5) * DEFAULT_MAX_AMPLITUDE);
        }
    }
    println!("step/amax   analytic            finite diff         rel. error");
    for step in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
        let chk = gradient_check_with_step(&problem, &sys, &field, 7, 3, step)?;
        println!("{step:<10.0e}  {:<18.10e}  {:<18.10e}  {:.2e}", chk.analytic, chk.finite_difference, chk.relative_error);
    }
    Ok(())
}
