use super::all_pairs;
use crate::error::{Error, Result};

/// Upper bound on `n_boxes^n_particles` for exhaustive enumeration.
pub const MAX_ASSIGNMENTS: u64 = 10_000_000;

/// Counts over every assignment of particles to boxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyStats {
    pub n_particles: usize,
    pub n_boxes: usize,
    pub total: u64,
    /// No two particles share a box.
    pub all_distinct: u64,
    /// At least one box holds more than one particle.
    pub some_shared: u64,
    /// Every particle in one box.
    pub all_same: u64,
    /// Per pair `(i, j)`, assignments where `i` and `j` share a box.
    pub pair_shared: Vec<((usize, usize), u64)>,
}

impl OccupancyStats {
    pub fn pair(&self, i: usize, j: usize) -> Option<u64> {
        let key = super::ordered_pair(i, j);
        self.pair_shared.iter().find(|(p, _)| *p == key).map(|(_, c)| *c)
    }
}

fn total_assignments(n_particles: usize, n_boxes: usize) -> Result<u64> {
    if n_particles == 0 || n_boxes == 0 {
        return Err(Error::InvalidArgument("need at least one particle and one box".into()));
    }
    (n_boxes as u64)
        .checked_pow(n_particles as u32)
        .filter(|&t| t <= MAX_ASSIGNMENTS)
        .ok_or_else(|| Error::TooLarge(format!("{n_boxes}^{n_particles} assignments exceed {MAX_ASSIGNMENTS}")))
}

/// Visits every assignment (`boxes[k]` is the box of particle `k`).
fn for_each_assignment(n_particles: usize, n_boxes: usize, mut f: impl FnMut(&[usize])) {
    let mut boxes = vec![0usize; n_particles];
    loop {
        f(&boxes);
        // odometer increment, last particle fastest
        let mut k = n_particles;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            boxes[k] += 1;
            if boxes[k] < n_boxes {
                break;
            }
            boxes[k] = 0;
        }
    }
}

/// Number of assignments satisfying `pred`.
pub fn count_assignments(n_particles: usize, n_boxes: usize, pred: impl Fn(&[usize]) -> bool) -> Result<u64> {
    total_assignments(n_particles, n_boxes)?;
    let mut count = 0;
    for_each_assignment(n_particles, n_boxes, |a| count += pred(a) as u64);
    Ok(count)
}

/// Exhaustive enumeration of the `n_boxes^n_particles` assignments.
pub fn classical_enumeration(n_particles: usize, n_boxes: usize) -> Result<OccupancyStats> {
    let total = total_assignments(n_particles, n_boxes)?;
    let pairs: Vec<(usize, usize)> = all_pairs(n_particles).collect();
    let mut pair_counts = vec![0u64; pairs.len()];
    let (mut all_distinct, mut all_same, mut seen) = (0u64, 0u64, 0u64);
    let mut occupancy = vec![0usize; n_boxes];
    for_each_assignment(n_particles, n_boxes, |a| {
        seen += 1;
        occupancy.iter_mut().for_each(|o| *o = 0);
        for &b in a {
            occupancy[b] += 1;
        }
        if occupancy.iter().all(|&o| o <= 1) {
            all_distinct += 1;
        }
        if occupancy.contains(&n_particles) {
            all_same += 1;
        }
        for (count, &(i, j)) in pair_counts.iter_mut().zip(&pairs) {
            *count += (a[i] == a[j]) as u64;
        }
    });
    debug_assert_eq!(seen, total);
    Ok(OccupancyStats {
        n_particles,
        n_boxes,
        total,
        all_distinct,
        some_shared: total - all_distinct,
        all_same,
        pair_shared: pairs.into_iter().zip(pair_counts).collect(),
    })
}
