//! Gate library, the Mach-Zehnder probe circuit, and the plain-text gate list.
//!
//! Beam splitters are Hadamard gates and the 90° phase shifter is
//! `S = diag(1, i)`, which maps `|+⟩` to `|+i⟩`. The optional ancilla probe
//! `U_ij` sits between the first Hadamard layer and the phase layer.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qstate::{embed, Operator, QuantumState};

/// Elementary gate matrices.
pub mod gates {
    use std::f64::consts::FRAC_1_SQRT_2;

    use crate::qstate::{c, CMatrix, OpKind, Operator};

    fn unitary(dim: usize, entries: &[(f64, f64)]) -> Operator {
        let data: Vec<_> = entries.iter().map(|&(re, im)| c(re, im)).collect();
        Operator::from_parts(CMatrix::from_row_slice(dim, dim, &data), OpKind::Unitary)
    }

    pub fn h() -> Operator {
        let s = FRAC_1_SQRT_2;
        unitary(2, &[(s, 0.0), (s, 0.0), (s, 0.0), (-s, 0.0)])
    }

    pub fn s() -> Operator {
        unitary(2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 1.0)])
    }

    pub fn x() -> Operator {
        unitary(2, &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
    }

    pub fn y() -> Operator {
        unitary(2, &[(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)])
    }

    pub fn z() -> Operator {
        unitary(2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)])
    }

    /// Control is the first target, the flipped qubit the second.
    pub fn cnot() -> Operator {
        let mut m = CMatrix::identity(4, 4);
        m.swap_rows(2, 3);
        Operator::from_parts(m, OpKind::Unitary)
    }

    /// `U = P_same ⊗ 𝟙 + (𝟙 − P_same) ⊗ X` on local qubits `(i, j, ancilla)`:
    /// the ancilla flips iff qubits `i` and `j` differ.
    pub fn parity_probe() -> Operator {
        let mut m = CMatrix::zeros(8, 8);
        for index in 0..8usize {
            let (i, j) = ((index >> 2) & 1, (index >> 1) & 1);
            let out = if i == j { index } else { index ^ 1 };
            m[(out, index)] = c(1.0, 0.0);
        }
        Operator::from_parts(m, OpKind::Unitary)
    }
}

/// Gate identity, used for display and the text format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateKind {
    H,
    S,
    X,
    Z,
    Cnot,
    /// Ancilla parity probe for a particle pair (0-based).
    Parity(usize, usize),
    Custom(String),
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::H => f.write_str("H"),
            GateKind::S => f.write_str("S"),
            GateKind::X => f.write_str("X"),
            GateKind::Z => f.write_str("Z"),
            GateKind::Cnot => f.write_str("CNOT"),
            GateKind::Parity(i, j) => write!(f, "U{}{}", i + 1, j + 1),
            GateKind::Custom(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    targets: Vec<usize>,
    matrix: Operator,
}

impl GateOp {
    fn named(kind: GateKind, targets: Vec<usize>) -> Self {
        let matrix = match &kind {
            GateKind::H => gates::h(),
            GateKind::S => gates::s(),
            GateKind::X => gates::x(),
            GateKind::Z => gates::z(),
            GateKind::Cnot => gates::cnot(),
            GateKind::Parity(..) => gates::parity_probe(),
            GateKind::Custom(_) => unreachable!("custom gates carry their own matrix"),
        };
        Self { kind, targets, matrix }
    }

    pub fn h(q: usize) -> Self {
        Self::named(GateKind::H, vec![q])
    }

    pub fn s(q: usize) -> Self {
        Self::named(GateKind::S, vec![q])
    }

    pub fn x(q: usize) -> Self {
        Self::named(GateKind::X, vec![q])
    }

    pub fn z(q: usize) -> Self {
        Self::named(GateKind::Z, vec![q])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::named(GateKind::Cnot, vec![control, target])
    }

    /// `U_ij` probing particles `i`, `j` onto `ancilla`.
    pub fn parity(i: usize, j: usize, ancilla: usize) -> Self {
        Self::named(GateKind::Parity(i, j), vec![i, j, ancilla])
    }

    /// Any unitary on the given targets.
    pub fn custom(name: &str, targets: Vec<usize>, matrix: Operator) -> Result<Self> {
        if !matrix.is_unitary(crate::qstate::tol::STRUCTURAL) {
            return Err(Error::NotStructured("unitary"));
        }
        if matrix.dim() != 1 << targets.len() {
            return Err(Error::DimensionMismatch { expected: 1 << targets.len(), found: matrix.dim() });
        }
        Ok(Self { kind: GateKind::Custom(name.to_string()), targets, matrix })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }
}

/// `U_ij = P_ij ⊗ 𝟙_a + (𝟙_s − P_ij) ⊗ X_a` as a full-register operator.
pub fn controlled_parity(i: usize, j: usize, ancilla: usize, n_qubits: usize) -> Result<Operator> {
    if i == j || i == ancilla {
        return Err(Error::DuplicateQubit(i));
    }
    if j == ancilla {
        return Err(Error::DuplicateQubit(j));
    }
    embed(&gates::parity_probe(), &[i, j, ancilla], n_qubits)
}

/// Ordered gate list over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<GateOp>,
    probe: Option<(usize, usize)>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new(), probe: None }
    }

    pub fn push(&mut self, gate: GateOp) -> Result<&mut Self> {
        for (pos, &t) in gate.targets.iter().enumerate() {
            if t >= self.n_qubits {
                return Err(Error::QubitOutOfRange { index: t, n_qubits: self.n_qubits });
            }
            if gate.targets[..pos].contains(&t) {
                return Err(Error::DuplicateQubit(t));
            }
        }
        if let GateKind::Parity(i, j) = gate.kind {
            self.probe = Some((i, j));
        }
        self.gates.push(gate);
        Ok(self)
    }

    pub fn with(mut self, gate: GateOp) -> Result<Self> {
        self.push(gate)?;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn probe(&self) -> Option<(usize, usize)> {
        self.probe
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Same gates on a wider register; the extra qubits are idle.
    pub fn padded(&self, n_qubits: usize) -> Result<Self> {
        if n_qubits < self.n_qubits {
            return Err(Error::InvalidArgument(format!(
                "cannot shrink a {}-qubit circuit to {n_qubits}",
                self.n_qubits
            )));
        }
        Ok(Self { n_qubits, ..self.clone() })
    }

    /// Applies the gates in order.
    pub fn run<S: QuantumState + Clone>(&self, input: &S) -> Result<S> {
        if input.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << self.n_qubits, found: input.dim() });
        }
        let mut state = input.clone();
        for g in &self.gates {
            state = state.apply_unchecked(&g.matrix, &g.targets);
        }
        Ok(state)
    }

    /// Full unitary, last gate leftmost.
    pub fn unitary(&self) -> Operator {
        let dim = 1usize << self.n_qubits;
        self.gates.iter().fold(Operator::identity(dim), |acc, g| {
            let full = embed(&g.matrix, &g.targets, self.n_qubits).expect("targets validated on push");
            full.compose(&acc).expect("same dimension")
        })
    }

    /// One gate per line: `NAME t0[,t1...]`, preceded by a `qubits N` header.
    /// Targets are 0-based. Custom gates have no text form.
    pub fn to_text(&self) -> Result<String> {
        let mut out = format!("qubits {}\n", self.n_qubits);
        for g in &self.gates {
            if let GateKind::Custom(name) = &g.kind {
                return Err(Error::InvalidArgument(format!("custom gate {name} has no text form")));
            }
            let targets: Vec<String> = g.targets.iter().map(|t| t.to_string()).collect();
            out.push_str(&format!("{} {}\n", g.kind, targets.join(",")));
        }
        Ok(out)
    }
}

impl FromStr for Circuit {
    type Err = Error;

    /// Parses [`Circuit::to_text`] output. Without a `qubits` header the
    /// register is sized by the largest target.
    fn from_str(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut parsed = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: lineno + 1, message };
            let (name, rest) = line.split_once(char::is_whitespace).ok_or_else(|| err(format!("missing targets in {line:?}")))?;
            let rest = rest.trim();
            if name.eq_ignore_ascii_case("qubits") {
                declared = Some(rest.parse::<usize>().map_err(|e| err(e.to_string()))?);
                continue;
            }
            let targets = rest
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| err(e.to_string()))?;
            let arity = |n: usize| {
                if targets.len() == n {
                    Ok(())
                } else {
                    Err(err(format!("{name} takes {n} targets, got {}", targets.len())))
                }
            };
            let gate = match name.to_ascii_uppercase().as_str() {
                "H" => arity(1).map(|_| GateOp::h(targets[0]))?,
                "S" => arity(1).map(|_| GateOp::s(targets[0]))?,
                "X" => arity(1).map(|_| GateOp::x(targets[0]))?,
                "Z" => arity(1).map(|_| GateOp::z(targets[0]))?,
                "CNOT" => arity(2).map(|_| GateOp::cnot(targets[0], targets[1]))?,
                u if u.len() == 3 && u.starts_with('U') => {
                    arity(3)?;
                    let digits: Vec<usize> = u[1..]
                        .chars()
                        .map(|ch| ch.to_digit(10).map(|d| d as usize))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| err(format!("bad probe name {name}")))?;
                    if digits[0] != targets[0] + 1 || digits[1] != targets[1] + 1 {
                        return Err(err(format!("{name} does not match targets {rest}")));
                    }
                    GateOp::parity(targets[0], targets[1], targets[2])
                }
                _ => return Err(err(format!("unknown gate {name}"))),
            };
            parsed.push((lineno + 1, gate));
        }
        let inferred = parsed.iter().flat_map(|(_, g)| g.targets.iter()).max().map_or(0, |m| m + 1);
        let mut circuit = Circuit::new(declared.unwrap_or(inferred));
        for (line, gate) in parsed {
            circuit.push(gate).map_err(|e| Error::Parse { line, message: e.to_string() })?;
        }
        Ok(circuit)
    }
}

/// `H^⊗n → [U_probe] → S^⊗n → H^⊗n` on the particle qubits. With a probe,
/// an ancilla is appended as qubit `n_particles`.
pub fn build_mzi(n_particles: usize, probe: Option<(usize, usize)>) -> Result<Circuit> {
    if n_particles == 0 {
        return Err(Error::InvalidArgument("need at least one particle".into()));
    }
    if let Some((i, j)) = probe {
        for q in [i, j] {
            if q >= n_particles {
                return Err(Error::QubitOutOfRange { index: q, n_qubits: n_particles });
            }
        }
        if i == j {
            return Err(Error::DuplicateQubit(i));
        }
    }
    let n_qubits = n_particles + probe.is_some() as usize;
    let mut c = Circuit::new(n_qubits);
    for q in 0..n_particles {
        c.push(GateOp::h(q))?;
    }
    if let Some((i, j)) = probe {
        c.push(GateOp::parity(i, j, n_particles))?;
    }
    for q in 0..n_particles {
        c.push(GateOp::s(q))?;
    }
    for q in 0..n_particles {
        c.push(GateOp::h(q))?;
    }
    Ok(c)
}
