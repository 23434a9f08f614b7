//! Lorentzian rendering of a stick spectrum, written as CSV on stdout.
//!
//! cargo run --example render_spectrum -- u13 15 > u13.csv

use qphe::nmr::{linear_grid, rendered_csv, stage_spectrum, PrepSpec, SpinSystem, Stage};

fn main() -> qphe::Result<()> {
    let mut args = std::env::args().skip(1);
    let stage: Stage = args.next().as_deref().unwrap_or("u13").parse()?;
    let width: f64 = args.next().map_or(25.0, |w| w.parse().expect("linewidth in Hz"));

    let sys = SpinSystem::default_four_spin();
    let spec = stage_spectrum(&sys, &PrepSpec::new(2.0), stage)?;
    let (lo, hi) = spec
        .lines
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), l| (a.min(l.frequency), b.max(l.frequency)));
    let grid = linear_grid(lo - 200.0, hi + 200.0, 1201);
    let y = qphe::nmr::render(&spec, width, &grid)?;
    print!("{}", rendered_csv(&grid, &y)?);
    Ok(())
}
