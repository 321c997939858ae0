//! Pauli strings and real-coefficient Pauli-sum Hamiltonians over a qubit
//! register.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{re, ComplexMatrix, C64};

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    /// The 2x2 matrix of this Pauli operator.
    pub fn matrix(self) -> ComplexMatrix {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let entries = match self {
            PauliAxis::I => vec![one, z, z, one],
            PauliAxis::X => vec![z, one, one, z],
            PauliAxis::Y => vec![z, -i, i, z],
            PauliAxis::Z => vec![one, z, z, -one],
        };
        ComplexMatrix::from_row_major(2, 2, entries).expect("2x2 literal")
    }

    pub fn symbol(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Paulis, qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(pub Vec<PauliAxis>);

impl PauliString {
    /// All-identity string on `n` qubits.
    pub fn identity(n: usize) -> Self {
        PauliString(vec![PauliAxis::I; n])
    }

    /// Identity except `axis` on one qubit.
    pub fn single(n: usize, qubit: usize, axis: PauliAxis) -> Result<Self> {
        let mut s = Self::identity(n);
        s.set(qubit, axis)?;
        Ok(s)
    }

    /// Identity except two placed axes.
    pub fn pair(n: usize, q1: usize, a1: PauliAxis, q2: usize, a2: PauliAxis) -> Result<Self> {
        if q1 == q2 {
            return Err(Error::InvalidArgument(format!(
                "pair string needs two distinct qubits, got {q1} twice"
            )));
        }
        let mut s = Self::identity(n);
        s.set(q1, a1)?;
        s.set(q2, a2)?;
        Ok(s)
    }

    pub fn set(&mut self, qubit: usize, axis: PauliAxis) -> Result<()> {
        if qubit >= self.0.len() {
            return Err(Error::InvalidArgument(format!(
                "qubit {qubit} outside register of {} qubits",
                self.0.len()
            )));
        }
        self.0[qubit] = axis;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when every qubit carries the identity.
    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|a| *a == PauliAxis::I)
    }

    /// Indices carrying a non-identity Pauli, with their axes.
    pub fn support(&self) -> Vec<(usize, PauliAxis)> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != PauliAxis::I)
            .map(|(q, a)| (q, *a))
            .collect()
    }

    /// Dense matrix over the full register (qubit 0 slowest index).
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::identity(1);
        for axis in &self.0 {
            out = out.kron(&axis.matrix());
        }
        Ok(out)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.0 {
            write!(f, "{}", a.symbol())?;
        }
        Ok(())
    }
}

/// One weighted Pauli string.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    /// Real coefficient, rad/s.
    pub coeff: f64,
    pub string: PauliString,
}

/// A real linear combination of Pauli strings; Hermitian by construction.
///
/// Duplicate strings are merged as terms are added, so the term list is
/// duplicate-free; insertion order is preserved (it defines the gate order
/// of the Trotterization).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliHamiltonian {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("register must have at least one qubit".into()));
        }
        Ok(PauliHamiltonian { n_qubits, terms: Vec::new() })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Add `coeff * string`, merging into an existing identical string.
    /// Zero coefficients are dropped; a merge that cancels exactly removes
    /// the term.
    pub fn add_term(&mut self, coeff: f64, string: PauliString) -> Result<()> {
        if !coeff.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite coefficient {coeff}")));
        }
        if string.len() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "string has {} qubits, register has {}",
                string.len(),
                self.n_qubits
            )));
        }
        if coeff == 0.0 {
            return Ok(());
        }
        if let Some(existing) = self.terms.iter_mut().find(|t| t.string == string) {
            existing.coeff += coeff;
            if existing.coeff == 0.0 {
                self.terms.retain(|t| t.coeff != 0.0);
            }
            return Ok(());
        }
        self.terms.push(PauliTerm { coeff, string });
        Ok(())
    }

    /// Dense matrix sum of all terms (2^n x 2^n).
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let dim = 1usize << self.n_qubits;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for term in &self.terms {
            out.axpy(re(term.coeff), &term.string.to_matrix()?.to_dense())?;
        }
        Ok(out)
    }

    /// One `coeff_rad_s PAULISTRING` line per term, insertion order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for term in &self.terms {
            out.push_str(&format!("{} {}\n", term.coeff, term.string));
        }
        out
    }
}
