//! Classical counting vs quantum conditionals, printed as a table.
//!
//! cargo run --example classical_vs_quantum_table -- 4

use qphe::pigeonhole::{build_table, classical_enumeration};

fn main() -> qphe::Result<()> {
    let n = std::env::args().nth(1).map_or(3, |a| a.parse().expect("particle count"));
    let stats = classical_enumeration(n, 2)?;
    println!(
        "{n} particles, 2 boxes: {} assignments, {} with no shared box, {} with all in one",
        stats.total, stats.all_distinct, stats.all_same
    );
    let table = build_table(n)?;
    print!("{}", table.to_text());
    Ok(())
}
