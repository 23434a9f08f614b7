//! Ancilla-probed interferometer: U_ij flips the ancilla when particles i
//! and j take different paths. Post-selecting 000 or 111 makes the flip
//! certain for every pair.
//!
//! cargo run --example probe_circuit -- 5 2 4 11111

use qphe::pigeonhole::{all_pairs, joint_distribution, probe_report};
use qphe::BitString;

fn main() -> qphe::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let [n, i, j, post] = &args[..] {
        let n: usize = n.parse().expect("particle count");
        let pair = (i.parse::<usize>().expect("pair") - 1, j.parse::<usize>().expect("pair") - 1);
        let r = probe_report(n, pair, &post.parse()?)?;
        println!("{r:#?}");
        return Ok(());
    }

    for pair in all_pairs(3) {
        println!("U{}{}", pair.0 + 1, pair.1 + 1);
        let joint = joint_distribution(3, pair)?;
        for outcome in BitString::all(3) {
            let keep = joint.probs()[outcome.value() << 1];
            let flip = joint.probs()[(outcome.value() << 1) | 1];
            let r = probe_report(3, pair, &outcome)?;
            println!(
                "  {outcome}  P(keep) {keep:.4}  P(flip) {flip:.4}  P(flip|post) {:.3}",
                r.p_ancilla_flip_given_post
            );
        }
    }
    Ok(())
}
