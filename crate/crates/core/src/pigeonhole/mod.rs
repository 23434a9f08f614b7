//! Pigeonhole analysis: same-path projectors, pre/post-selected probe
//! reports, the classical occupancy oracle and the classical-vs-quantum table.

mod analysis;
mod classical;
mod table;

pub use analysis::{
    generalized_qphe, joint_distribution, post_equivalent_state, probe_report, projector_same,
    qphe_analysis, ProbeReport,
};
pub use classical::{classical_enumeration, count_assignments, OccupancyStats, MAX_ASSIGNMENTS};
pub use table::{build_table, ArrangementRow, ArrangementTable, Possibility};

/// Tolerance for turning conditional probabilities into possibility tags.
pub const TAG_TOLERANCE: f64 = 1e-9;

/// `(i, j)` with `i < j`, both 0-based.
pub fn ordered_pair(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// All pairs of `n` particles in lexicographic order.
pub fn all_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}
