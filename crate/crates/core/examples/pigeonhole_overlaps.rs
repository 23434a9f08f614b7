//! The pigeonhole paradox on paper: each pair shares a path half the time
//! before post-selection, never after.

use qphe::pigeonhole::{all_pairs, projector_same};
use qphe::qstate::{expectation, overlap, StateVector};

fn main() -> qphe::Result<()> {
    let pre = StateVector::repeated(&StateVector::plus(), 3);
    let post_d0 = StateVector::repeated(&StateVector::minus_i(), 3);
    let post_d1 = StateVector::repeated(&StateVector::plus_i(), 3);

    println!("pair  <P_same>  <-i-i-i|P|+++>  <+i+i+i|P|+++>");
    for (i, j) in all_pairs(3) {
        let p = projector_same(i, j, 3)?;
        println!(
            "{}{}    {:.3}     {:.2e}        {:.2e}",
            i + 1,
            j + 1,
            expectation(&p, &pre)?,
            overlap(&post_d0, &p, &pre)?.norm(),
            overlap(&post_d1, &p, &pre)?.norm()
        );
    }
    // without the projector the post-selection itself is allowed
    println!("<-i-i-i|+++> = {:.4}", post_d0.inner(&pre)?.norm());
    Ok(())
}
