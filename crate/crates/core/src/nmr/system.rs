use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bits::qubit_bit;
use crate::error::{Error, Result};
use crate::qstate::{c, CMatrix, OpKind, Operator};

/// Shipped default register. Its numbers are placeholders.
pub const DEFAULT_SYSTEM_TOML: &str = include_str!("../../data/spin_system.toml");

/// Resonance offsets and effective couplings of a weakly coupled spin register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct SpinSystem {
    labels: Vec<String>,
    nu: Vec<f64>,
    jp: Vec<Vec<f64>>,
    ancilla_index: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    labels: Vec<String>,
    ancilla_index: usize,
    nu: Vec<f64>,
    jp: Vec<Vec<f64>>,
}

impl TryFrom<RawSystem> for SpinSystem {
    type Error = Error;

    fn try_from(r: RawSystem) -> Result<Self> {
        SpinSystem::new(r.labels, r.nu, r.jp, r.ancilla_index)
    }
}

impl From<SpinSystem> for RawSystem {
    fn from(s: SpinSystem) -> Self {
        RawSystem { labels: s.labels, ancilla_index: s.ancilla_index, nu: s.nu, jp: s.jp }
    }
}

impl SpinSystem {
    pub fn new(labels: Vec<String>, nu: Vec<f64>, jp: Vec<Vec<f64>>, ancilla_index: usize) -> Result<Self> {
        let n = nu.len();
        let bad = |m: String| Err(Error::Config(m));
        if n < 2 {
            return bad(format!("need at least two spins, got {n}"));
        }
        if labels.len() != n {
            return bad(format!("{} labels for {n} spins", labels.len()));
        }
        if jp.len() != n || jp.iter().any(|row| row.len() != n) {
            return bad(format!("coupling matrix must be {n}x{n}"));
        }
        for i in 0..n {
            if jp[i][i] != 0.0 {
                return bad(format!("coupling diagonal entry {i} is {}", jp[i][i]));
            }
            for j in 0..i {
                if jp[i][j] != jp[j][i] {
                    return bad(format!("coupling matrix not symmetric at ({i},{j})"));
                }
            }
        }
        if ancilla_index >= n {
            return bad(format!("ancilla index {ancilla_index} out of range"));
        }
        if nu.iter().chain(jp.iter().flatten()).any(|x| !x.is_finite()) {
            return bad("non-finite parameter".into());
        }
        Ok(Self { labels, nu, jp, ancilla_index })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spin system serializes")
    }

    /// Placeholder four-spin register shipped with the crate.
    pub fn default_four_spin() -> Self {
        Self::from_toml_str(DEFAULT_SYSTEM_TOML).expect("bundled config is valid")
    }

    pub fn n_spins(&self) -> usize {
        self.nu.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.jp[i][j]
    }

    pub fn couplings(&self) -> &[Vec<f64>] {
        &self.jp
    }

    pub fn ancilla_index(&self) -> usize {
        self.ancilla_index
    }

    /// Non-ancilla spins in register order.
    pub fn particle_indices(&self) -> Vec<usize> {
        (0..self.n_spins()).filter(|&k| k != self.ancilla_index).collect()
    }

    pub fn with_coupling(&self, i: usize, j: usize, value: f64) -> Result<Self> {
        let mut jp = self.jp.clone();
        jp[i][j] = value;
        jp[j][i] = value;
        Self::new(self.labels.clone(), self.nu.clone(), jp, self.ancilla_index)
    }

    pub fn with_offsets(&self, nu: Vec<f64>) -> Result<Self> {
        Self::new(self.labels.clone(), nu, self.jp.clone(), self.ancilla_index)
    }

    /// Relabels spins: new spin `k` is old spin `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_spins();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let nu = perm.iter().map(|&p| self.nu[p]).collect();
        let jp = perm.iter().map(|&p| perm.iter().map(|&q| self.jp[p][q]).collect()).collect();
        let ancilla = perm.iter().position(|&p| p == self.ancilla_index).expect("permutation");
        Self::new(labels, nu, jp, ancilla)
    }
}

/// `m = +1/2` for bit 0, `-1/2` for bit 1.
#[inline]
pub fn magnetic_number(bit: usize) -> f64 {
    0.5 - bit as f64
}

/// Diagonal of the weak-coupling Hamiltonian in rad/s.
pub fn energies(sys: &SpinSystem) -> Vec<f64> {
    let n = sys.n_spins();
    (0..1usize << n)
        .map(|b| {
            let m: Vec<f64> = (0..n).map(|k| magnetic_number(qubit_bit(b, k, n))).collect();
            let zeeman: f64 = (0..n).map(|i| sys.nu[i] * m[i]).sum();
            let coupling: f64 = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| sys.jp[i][j] * m[i] * m[j])
                .sum();
            2.0 * PI * (coupling - zeeman)
        })
        .collect()
}

/// `H = −2π Σ ν_i I_zi + 2π Σ_{i<j} J′_ij I_zi I_zj` (rad/s), diagonal in
/// the computational basis.
pub fn internal_hamiltonian(sys: &SpinSystem) -> Operator {
    let e = energies(sys);
    let dim = e.len();
    Operator::from_parts(CMatrix::from_fn(dim, dim, |r, col| if r == col { c(e[r], 0.0) } else { c(0.0, 0.0) }), OpKind::Hermitian)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Spin-1/2 angular momentum component `I_axis` of `spin` in an `n`-spin register.
pub fn spin_operator(axis: Axis, spin: usize, n: usize) -> CMatrix {
    let local = match axis {
        Axis::X => [c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)],
        Axis::Y => [c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)],
        Axis::Z => [c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)],
    };
    let op = Operator::from_parts(CMatrix::from_row_slice(2, 2, &local), OpKind::Hermitian);
    crate::qstate::embed(&op, &[spin], n).expect("spin index in range").into_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_spin(nu: [f64; 2], j: f64) -> SpinSystem {
        SpinSystem::new(vec!["A".into(), "B".into()], nu.to_vec(), vec![vec![0.0, j], vec![j, 0.0]], 1).unwrap()
    }

    #[test]
    fn default_config_parses() {
        let s = SpinSystem::default_four_spin();
        assert_eq!(s.n_spins(), 4);
        assert_eq!(s.ancilla_index(), 3);
        assert_eq!(s.particle_indices(), vec![0, 1, 2]);
        assert_eq!(s.labels()[3], "H4");
        let back = SpinSystem::from_toml_str(&s.to_toml()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_malformed_configs() {
        let asym = "labels=[\"a\",\"b\"]\nancilla_index=1\nnu=[0.0,0.0]\njp=[[0.0,1.0],[2.0,0.0]]";
        assert!(matches!(SpinSystem::from_toml_str(asym), Err(Error::Config(_))));
        let diag = "labels=[\"a\",\"b\"]\nancilla_index=1\nnu=[0.0,0.0]\njp=[[1.0,1.0],[1.0,0.0]]";
        assert!(SpinSystem::from_toml_str(diag).is_err());
        let anc = "labels=[\"a\",\"b\"]\nancilla_index=2\nnu=[0.0,0.0]\njp=[[0.0,1.0],[1.0,0.0]]";
        assert!(SpinSystem::from_toml_str(anc).is_err());
        assert!(SpinSystem::from_toml_str("labels = 3").is_err());
    }

    #[test]
    fn zero_parameters_give_zero_hamiltonian() {
        let h = internal_hamiltonian(&two_spin([0.0, 0.0], 0.0));
        assert!(h.matrix().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn coupling_only_eigenvalues() {
        let h = internal_hamiltonian(&two_spin([0.0, 0.0], 8.0));
        let aligned = 2.0 * PI * 8.0 / 4.0;
        let diag: Vec<f64> = (0..4).map(|i| h.get(i, i).re).collect();
        assert!((diag[0] - aligned).abs() < 1e-12 && (diag[3] - aligned).abs() < 1e-12);
        assert!((diag[1] + aligned).abs() < 1e-12 && (diag[2] + aligned).abs() < 1e-12);
        assert!(h.is_diagonal(0.0));
    }

    #[test]
    fn hamiltonian_matches_operator_sum() {
        let sys = SpinSystem::default_four_spin();
        let n = 4;
        let mut h = CMatrix::zeros(16, 16);
        for i in 0..n {
            h -= spin_operator(Axis::Z, i, n).scale(2.0 * PI * sys.nu()[i]);
            for j in i + 1..n {
                h += (spin_operator(Axis::Z, i, n) * spin_operator(Axis::Z, j, n)).scale(2.0 * PI * sys.coupling(i, j));
            }
        }
        assert!(crate::qstate::max_abs_diff(&h, internal_hamiltonian(&sys).matrix()) < 1e-8);
    }

    #[test]
    fn permutation_moves_ancilla() {
        let s = SpinSystem::default_four_spin();
        let p = s.permuted(&[3, 0, 1, 2]).unwrap();
        assert_eq!(p.ancilla_index(), 0);
        assert_eq!(p.coupling(0, 1), s.coupling(3, 0));
        assert!(s.permuted(&[0, 0, 1, 2]).is_err());
    }
}
