//! Gate circuits over a qubit register: the rotation set produced by the
//! Trotterization plus the Clifford gates and measurement used by the search
//! benchmark.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{re, ComplexMatrix, C64};
use crate::pauli::strings::{PauliAxis, PauliString};

/// Supported gate kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Rz,
    Rzz,
    Rxx,
    Ryy,
    Hadamard,
    PauliX,
    Cz,
    Measure,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rz => "RZ",
            GateKind::Rzz => "RZZ",
            GateKind::Rxx => "RXX",
            GateKind::Ryy => "RYY",
            GateKind::Hadamard => "H",
            GateKind::PauliX => "X",
            GateKind::Cz => "CZ",
            GateKind::Measure => "MEASURE",
        }
    }

    /// Number of qubit operands for fixed-arity gates; `None` for
    /// measurement, which reads out any nonempty set of distinct qubits.
    pub fn fixed_arity(self) -> Option<usize> {
        match self {
            GateKind::Rz | GateKind::Hadamard | GateKind::PauliX => Some(1),
            GateKind::Rzz | GateKind::Rxx | GateKind::Ryy | GateKind::Cz => Some(2),
            GateKind::Measure => None,
        }
    }

    /// Whether the gate carries a rotation angle.
    pub fn takes_angle(self) -> bool {
        matches!(self, GateKind::Rz | GateKind::Rzz | GateKind::Rxx | GateKind::Ryy)
    }
}

/// One gate application.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// Operand qubits, `arity()` of them, distinct.
    pub qubits: Vec<usize>,
    /// Rotation angle (rad); 0 for non-rotation gates.
    pub angle: f64,
    /// Physical duration (s); 0 means instantaneous/virtual.
    pub duration: f64,
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qubits =
            self.qubits.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{} {} {} {}", self.kind.name(), qubits, self.angle, self.duration)
    }
}

/// An ordered gate list over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct GateCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl GateCircuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("register must have at least one qubit".into()));
        }
        Ok(GateCircuit { n_qubits, gates: Vec::new() })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        match gate.kind.fixed_arity() {
            Some(arity) if gate.qubits.len() != arity => {
                return Err(Error::InvalidArgument(format!(
                    "{} takes {} qubit(s), got {}",
                    gate.kind.name(),
                    arity,
                    gate.qubits.len()
                )));
            }
            None if gate.qubits.is_empty() => {
                return Err(Error::InvalidArgument(
                    "measurement needs at least one qubit".into(),
                ));
            }
            _ => {}
        }
        if gate.qubits.iter().any(|q| *q >= self.n_qubits) {
            return Err(Error::InvalidArgument(format!(
                "gate operand outside the {}-qubit register: {:?}",
                self.n_qubits, gate.qubits
            )));
        }
        for (i, q) in gate.qubits.iter().enumerate() {
            if gate.qubits[..i].contains(q) {
                return Err(Error::InvalidArgument(format!(
                    "gate operands must be distinct, got {:?}",
                    gate.qubits
                )));
            }
        }
        if !gate.angle.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite angle {}", gate.angle)));
        }
        if gate.duration.is_nan() || gate.duration < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "duration must be nonnegative, got {}",
                gate.duration
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Sum of gate durations (s).
    pub fn total_duration(&self) -> f64 {
        self.gates.iter().map(|g| g.duration).sum()
    }

    /// One `KIND q[,q2] angle_rad duration_s` line per gate.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&format!("{g}\n"));
        }
        out
    }

    /// Dense unitary of the whole circuit (first gate acts first).
    ///
    /// Measurement gates are skipped: they mark where the caller samples
    /// populations and have no unitary action here.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        let dim = 1usize << self.n_qubits;
        let mut u = ComplexMatrix::identity(dim);
        for gate in &self.gates {
            if gate.kind == GateKind::Measure {
                continue;
            }
            let m = self.gate_matrix(gate)?;
            u = m.matmul(&u)?;
        }
        Ok(u)
    }

    /// Dense matrix of a single gate embedded in the full register.
    pub fn gate_matrix(&self, gate: &Gate) -> Result<ComplexMatrix> {
        match gate.kind {
            GateKind::Rz => {
                rotation_matrix(self.n_qubits, &[(gate.qubits[0], PauliAxis::Z)], gate.angle)
            }
            GateKind::Rzz => rotation_matrix(
                self.n_qubits,
                &[(gate.qubits[0], PauliAxis::Z), (gate.qubits[1], PauliAxis::Z)],
                gate.angle,
            ),
            GateKind::Rxx => rotation_matrix(
                self.n_qubits,
                &[(gate.qubits[0], PauliAxis::X), (gate.qubits[1], PauliAxis::X)],
                gate.angle,
            ),
            GateKind::Ryy => rotation_matrix(
                self.n_qubits,
                &[(gate.qubits[0], PauliAxis::Y), (gate.qubits[1], PauliAxis::Y)],
                gate.angle,
            ),
            GateKind::Hadamard => {
                let inv = std::f64::consts::FRAC_1_SQRT_2;
                let h = ComplexMatrix::from_row_major(
                    2,
                    2,
                    vec![re(inv), re(inv), re(inv), re(-inv)],
                )?;
                embed_single(self.n_qubits, gate.qubits[0], &h)
            }
            GateKind::PauliX => {
                embed_single(self.n_qubits, gate.qubits[0], &PauliAxis::X.matrix())
            }
            GateKind::Cz => {
                let (qa, qb) = (gate.qubits[0], gate.qubits[1]);
                let n = self.n_qubits;
                let dim = 1usize << n;
                // Qubit 0 is the slowest index: qubit q reads from bit n-1-q.
                let diag: Vec<C64> = (0..dim)
                    .map(|idx| {
                        let ba = (idx >> (n - 1 - qa)) & 1;
                        let bb = (idx >> (n - 1 - qb)) & 1;
                        if ba == 1 && bb == 1 {
                            re(-1.0)
                        } else {
                            re(1.0)
                        }
                    })
                    .collect();
                Ok(ComplexMatrix::from_diag(&diag))
            }
            GateKind::Measure => Err(Error::UnsupportedTerm(
                "measurement gate has no unitary matrix".into(),
            )),
        }
    }
}

/// `exp(-i angle/2 * P)` for a Pauli string `P`: since `P^2 = I`, this is
/// `cos(angle/2) I - i sin(angle/2) P`, exactly.
fn rotation_matrix(
    n_qubits: usize,
    axes: &[(usize, PauliAxis)],
    angle: f64,
) -> Result<ComplexMatrix> {
    let mut string = PauliString::identity(n_qubits);
    for (q, a) in axes {
        string.set(*q, *a)?;
    }
    let p = string.to_matrix()?.to_dense();
    let dim = p.nrows();
    let half = 0.5 * angle;
    let mut out = ComplexMatrix::identity(dim).scale(re(half.cos())).to_dense();
    out.axpy(C64::new(0.0, -half.sin()), &p)?;
    Ok(out)
}

/// Embed a 2x2 matrix on one qubit of the register.
fn embed_single(n_qubits: usize, qubit: usize, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::identity(1);
    for q in 0..n_qubits {
        if q == qubit {
            out = out.kron(m);
        } else {
            out = out.kron(&ComplexMatrix::identity(2));
        }
    }
    Ok(out)
}
