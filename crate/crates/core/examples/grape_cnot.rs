//! GRAPE synthesis of CNOT(F1 → H4) over a ±5 % RF-scale ensemble.
//!
//! cargo run --release --example grape_cnot

use std::time::Instant;

use qphe::circuit::gates;
use qphe::control::{grape_optimize, ControlProblem};
use qphe::nmr::SpinSystem;
use qphe::qstate::embed;

fn main() -> qphe::Result<()> {
    let sys = SpinSystem::default_four_spin();
    let target = embed(&gates::cnot(), &[0, sys.ancilla_index()], sys.n_spins())?;
    let mut problem = ControlProblem::new(target, 150, 4e-6);
    problem.stop_fidelity = 0.995;

    let start = Instant::now();
    let result = grape_optimize(&problem, &sys)?;
    println!("iterations      {}", result.iterations);
    for (s, f) in problem.rf_scales.iter().zip(&result.fidelity_per_scale) {
        println!("scale {s:<5}     {f:.6}");
    }
    println!("average         {:.6}", result.average_fidelity);
    println!("worst case      {:.6}", result.worst_fidelity);
    println!("converged       {}", result.converged);
    println!("elapsed         {:.1?}", start.elapsed());
    Ok(())
}
