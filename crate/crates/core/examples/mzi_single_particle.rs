//! One particle through a Mach–Zehnder interferometer, then three at once.
//!
//! With the phase shifter the particle leaves either port with probability
//! 1/2; three independent particles land in all eight detector patterns
//! equally often.

use qphe::circuit::{build_mzi, Circuit, GateOp};
use qphe::qstate::{measure_distribution, StateVector};

fn main() -> qphe::Result<()> {
    let bare = Circuit::new(1).with(GateOp::h(0))?.with(GateOp::h(0))?;
    let out = bare.run(&StateVector::zero())?;
    println!("H·H |0⟩        -> P(D0) = {:.3}", out.amplitude(0).norm_sqr());

    let mzi = build_mzi(1, None)?;
    let out = mzi.run(&StateVector::zero())?;
    println!("H·S·H |0⟩      -> P(D0) = {:.3}, P(D1) = {:.3}", out.amplitude(0).norm_sqr(), out.amplitude(1).norm_sqr());

    let three = build_mzi(3, None)?;
    let out = three.run(&StateVector::basis(3, 0))?;
    for (outcome, p) in measure_distribution(&out, &[0, 1, 2])?.iter() {
        println!("  {outcome}  {p:.4}");
    }
    print!("{}", three.to_text()?);
    Ok(())
}
