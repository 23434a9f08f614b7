use std::fmt;

use super::{all_pairs, classical_enumeration, joint_distribution, TAG_TOLERANCE};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::format;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Possibility {
    Always,
    Sometimes,
    Never,
}

impl Possibility {
    pub fn from_count(count: u64, total: u64) -> Self {
        match count {
            0 => Possibility::Never,
            c if c == total => Possibility::Always,
            _ => Possibility::Sometimes,
        }
    }

    /// `0 → never`, `1 → always`, anything in between `sometimes`.
    pub fn from_probability(p: f64) -> Self {
        if p.abs() <= TAG_TOLERANCE {
            Possibility::Never
        } else if (p - 1.0).abs() <= TAG_TOLERANCE {
            Possibility::Always
        } else {
            Possibility::Sometimes
        }
    }
}

impl fmt::Display for Possibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Possibility::Always => "always",
            Possibility::Sometimes => "sometimes",
            Possibility::Never => "never",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrangementRow {
    /// Detector outcome the quantum column is conditioned on.
    pub post: BitString,
    pub arrangement: String,
    /// Fraction of classical assignments satisfying the arrangement.
    pub classical_fraction: f64,
    pub classical: Possibility,
    /// Conditional probability from the ancilla probes; for a joint
    /// arrangement, the smallest over the pairs involved.
    pub quantum_probability: f64,
    pub quantum: Possibility,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrangementTable {
    pub n_particles: usize,
    pub rows: Vec<ArrangementRow>,
}

const HEADER: [&str; 6] = ["post", "arrangement", "classical", "classical_fraction", "quantum", "quantum_probability"];

impl ArrangementTable {
    pub fn to_text(&self) -> String {
        let cells: Vec<[String; 6]> = self.rows.iter().map(row_cells).collect();
        let mut widths = HEADER.map(str::len);
        for r in &cells {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let line = |fields: &[String]| {
            let padded: Vec<String> = fields.iter().zip(widths).map(|(f, w)| format!("{f:<w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&HEADER.map(String::from));
        out += &line(&widths.map(|w| "-".repeat(w)));
        for r in &cells {
            out += &line(r);
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        format::csv_string(&HEADER, self.rows.iter().map(row_cells))
    }
}

fn row_cells(r: &ArrangementRow) -> [String; 6] {
    [
        r.post.to_string(),
        r.arrangement.clone(),
        r.classical.to_string(),
        format::num(r.classical_fraction),
        r.quantum.to_string(),
        format::num(r.quantum_probability),
    ]
}

/// Regenerates the classical-vs-quantum table for `n` particles in two paths.
///
/// The outcomes where every particle reaches the same detector come first,
/// each with the joint arrangement "no two share a path". Every other
/// outcome contributes one row per particle pair stating that the pair
/// shares a path.
pub fn build_table(n_particles: usize) -> Result<ArrangementTable> {
    if !(2..=6).contains(&n_particles) {
        return Err(Error::InvalidArgument(format!("{n_particles} particles outside 2..=6")));
    }
    let n = n_particles;
    let classical = classical_enumeration(n, 2)?;
    let total = classical.total;

    // flip[pair][outcome]: conditional ancilla-flip probability
    let pairs: Vec<(usize, usize)> = all_pairs(n).collect();
    let flip: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&pair| {
            let joint = joint_distribution(n, pair)?;
            Ok(BitString::all(n)
                .map(|s| {
                    let keep = joint.probs()[s.value() << 1];
                    let flipped = joint.probs()[(s.value() << 1) | 1];
                    flipped / (keep + flipped)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for post in [BitString::zeros(n), BitString::ones(n)] {
        let p = flip.iter().map(|f| f[post.value()]).fold(f64::INFINITY, f64::min);
        rows.push(ArrangementRow {
            post,
            arrangement: "no two particles share a path".into(),
            classical_fraction: classical.all_distinct as f64 / total as f64,
            classical: Possibility::from_count(classical.all_distinct, total),
            quantum_probability: p,
            quantum: Possibility::from_probability(p),
        });
    }
    for post in BitString::all(n).filter(|s| !s.is_uniform()) {
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let shared = classical.pair_shared[k].1;
            let p_same = 1.0 - flip[k][post.value()];
            rows.push(ArrangementRow {
                post,
                arrangement: format!("particles {} and {} share a path", i + 1, j + 1),
                classical_fraction: shared as f64 / total as f64,
                classical: Possibility::from_count(shared, total),
                quantum_probability: p_same,
                quantum: Possibility::from_probability(p_same),
            });
        }
    }
    Ok(ArrangementTable { n_particles: n, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_rows_show_the_effect() {
        let t = build_table(3).unwrap();
        for row in &t.rows[..2] {
            assert_eq!(row.arrangement, "no two particles share a path");
            assert_eq!(row.classical, Possibility::Never);
            assert_eq!(row.quantum, Possibility::Always);
        }
        assert_eq!(t.rows.len(), 2 + 6 * 3);
        // every other row: classically probabilistic, quantum certain one way or the other
        for row in &t.rows[2..] {
            assert_eq!(row.classical, Possibility::Sometimes);
            assert_ne!(row.quantum, Possibility::Sometimes);
        }
    }

    #[test]
    fn pair_rows_follow_detector_agreement() {
        let t = build_table(3).unwrap();
        for row in &t.rows[2..] {
            let digits: Vec<usize> = row.arrangement.split(' ').filter_map(|w| w.parse().ok()).collect();
            let same_detector = row.post.bit(digits[0] - 1) == row.post.bit(digits[1] - 1);
            let expect = if same_detector { Possibility::Never } else { Possibility::Always };
            assert_eq!(row.quantum, expect, "{row:?}");
        }
    }

    #[test]
    fn two_particle_table() {
        let t = build_table(2).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.rows[0].classical, Possibility::Sometimes);
        assert_eq!(t.rows[2].arrangement, "particles 1 and 2 share a path");
        assert_eq!(t.rows[2].classical, Possibility::Sometimes);
        assert_eq!(t.rows[2].quantum, Possibility::Always);
        assert!(t.to_text().lines().count() == t.rows.len() + 2);
    }

    #[test]
    fn exports_agree() {
        let t = build_table(4).unwrap();
        let text_rows = t.to_text().lines().count() - 2;
        let csv_rows = t.to_csv().unwrap().lines().count() - 1;
        assert_eq!(text_rows, csv_rows);
        assert!(build_table(1).is_err());
        assert!(build_table(7).is_err());
    }

    #[test]
    fn tags() {
        assert_eq!(Possibility::from_count(0, 8), Possibility::Never);
        assert_eq!(Possibility::from_count(8, 8), Possibility::Always);
        assert_eq!(Possibility::from_probability(1.0 - 1e-12), Possibility::Always);
        assert_eq!(Possibility::from_probability(0.5), Possibility::Sometimes);
    }
}
