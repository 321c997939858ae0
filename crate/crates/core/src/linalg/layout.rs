//! Tensor-product space layouts and mode-local operator embedding.
//!
//! A [`SpaceLayout`] is an ordered list of labeled modes with truncation
//! dimensions. Basis states are indexed row-major in mode order: the first
//! mode varies slowest. Single-mode operators are lifted into the full space
//! with [`embed`].

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::matrix::{re, C64, ComplexMatrix};

/// Physical flavor of a mode. Qubit modes are hard two-level systems;
/// boson modes are truncated oscillators (including weakly anharmonic
/// transmons kept above two levels).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Qubit,
    Boson,
}

/// One labeled mode in a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub label: String,
    pub dim: usize,
    pub kind: ModeKind,
}

/// Ordered collection of modes defining a tensor-product Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceLayout {
    modes: Vec<Mode>,
}

impl SpaceLayout {
    /// Build a layout, validating labels and dimensions.
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument("layout needs at least one mode".into()));
        }
        for m in &modes {
            if m.label.trim().is_empty() {
                return Err(Error::InvalidArgument("mode labels must be nonempty".into()));
            }
            if m.dim < 2 {
                return Err(Error::InvalidArgument(format!(
                    "mode '{}' has dimension {}; every mode needs at least 2 levels",
                    m.label, m.dim
                )));
            }
            if m.kind == ModeKind::Qubit && m.dim != 2 {
                return Err(Error::InvalidArgument(format!(
                    "qubit mode '{}' must have dimension exactly 2, got {}",
                    m.label, m.dim
                )));
            }
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].iter().any(|o| o.label == m.label) {
                return Err(Error::InvalidArgument(format!("duplicate mode label '{}'", m.label)));
            }
        }
        Ok(Self { modes })
    }

    /// Convenience constructor from (label, dim) pairs; dims of 2 become
    /// qubit modes.
    pub fn from_dims(pairs: &[(&str, usize)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(l, d)| Mode {
                    label: l.to_string(),
                    dim: d,
                    kind: if d == 2 { ModeKind::Qubit } else { ModeKind::Boson },
                })
                .collect(),
        )
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    /// Product of all mode dimensions.
    pub fn total_dim(&self) -> usize {
        self.modes.iter().map(|m| m.dim).product()
    }

    /// Position of a mode by label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.modes.iter().position(|m| m.label == label)
    }

    /// Mode metadata by label.
    pub fn mode(&self, label: &str) -> Option<&Mode> {
        self.modes.iter().find(|m| m.label == label)
    }

    /// Basis index of a product state given per-mode occupation numbers.
    pub fn basis_index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.modes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} occupations for {} modes",
                occupations.len(),
                self.modes.len()
            )));
        }
        let mut idx = 0;
        for (m, &occ) in self.modes.iter().zip(occupations) {
            if occ >= m.dim {
                return Err(Error::InvalidArgument(format!(
                    "occupation {} exceeds truncation {} of mode '{}'",
                    occ, m.dim, m.label
                )));
            }
            idx = idx * m.dim + occ;
        }
        Ok(idx)
    }

    /// Per-mode occupations of a basis index (inverse of [`basis_index`]).
    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.modes.len()];
        for (k, m) in self.modes.iter().enumerate().rev() {
            occ[k] = index % m.dim;
            index /= m.dim;
        }
        occ
    }
}

impl fmt::Display for SpaceLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.modes.iter().map(|m| format!("{}:{}", m.label, m.dim)).collect();
        write!(f, "[{}] (dim {})", parts.join(", "), self.total_dim())
    }
}

/// Bosonic annihilation operator truncated to `dim` levels:
/// `a |n> = sqrt(n) |n-1>`.
pub fn destroy(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            re((j as f64).sqrt())
        } else {
            re(0.0)
        }
    })
}

/// Number operator `diag(0, 1, ..., dim-1)`.
pub fn number(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_diag(&(0..dim).map(|n| re(n as f64)).collect::<Vec<C64>>())
}

/// Pauli-Z-like operator `I - 2 n` (equals sigma_z on two levels, and the
/// natural multilevel extension used by the pure-dephasing collapse channel).
pub fn z_like(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_diag(&(0..dim).map(|n| re(1.0 - 2.0 * n as f64)).collect::<Vec<C64>>())
}

/// Lift a single-mode operator into the full tensor-product space:
/// `I (x) ... (x) op (x) ... (x) I` at the position of `label`.
pub fn embed(op: &ComplexMatrix, label: &str, layout: &SpaceLayout) -> Result<ComplexMatrix> {
    let pos = layout
        .index_of(label)
        .ok_or_else(|| Error::InvalidArgument(format!("mode '{label}' not in layout {layout}")))?;
    let mode = &layout.modes()[pos];
    if op.nrows() != mode.dim || op.ncols() != mode.dim {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{} but mode '{}' has dimension {}",
            op.nrows(),
            op.ncols(),
            label,
            mode.dim
        )));
    }
    let dim_before: usize = layout.modes()[..pos].iter().map(|m| m.dim).product();
    let dim_after: usize = layout.modes()[pos + 1..].iter().map(|m| m.dim).product();
    let mut out = ComplexMatrix::identity(dim_before).kron(op);
    out = out.kron(&ComplexMatrix::identity(dim_after));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_mode() -> SpaceLayout {
        SpaceLayout::from_dims(&[("q", 2), ("r", 3)]).unwrap()
    }

    #[test]
    fn dims_and_indexing() {
        let l = two_mode();
        assert_eq!(l.total_dim(), 6);
        // Row-major: |q=1, r=2> -> 1*3 + 2 = 5.
        assert_eq!(l.basis_index(&[1, 2]).unwrap(), 5);
        assert_eq!(l.occupations(5), vec![1, 2]);
        for idx in 0..6 {
            assert_eq!(l.basis_index(&l.occupations(idx)).unwrap(), idx);
        }
    }

    #[test]
    fn validation_rejects_bad_layouts() {
        assert!(SpaceLayout::from_dims(&[]).is_err());
        assert!(SpaceLayout::from_dims(&[("a", 1)]).is_err());
        assert!(SpaceLayout::from_dims(&[("a", 2), ("a", 3)]).is_err());
        let bad_qubit = SpaceLayout::new(vec![Mode {
            label: "q".into(),
            dim: 3,
            kind: ModeKind::Qubit,
        }]);
        assert!(bad_qubit.is_err());
    }

    #[test]
    fn destroy_matrix_elements() {
        let a = destroy(3);
        // a|1> = 1|0>, a|2> = sqrt(2)|1>.
        assert!((a.get(0, 1).re - 1.0).abs() < 1e-15);
        assert!((a.get(1, 2).re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.get(1, 0).re, 0.0);
        // a^dagger a == number operator.
        let n = a.adjoint().matmul(&a).unwrap();
        assert!(n.max_abs_diff(&number(3)).unwrap() < 1e-14);
    }

    #[test]
    fn z_like_is_sigma_z_on_two_levels() {
        let z = z_like(2);
        assert_eq!(z.get(0, 0).re, 1.0);
        assert_eq!(z.get(1, 1).re, -1.0);
    }

    #[test]
    fn embed_acts_on_correct_slot() {
        let l = two_mode();
        let nq = embed(&number(2), "q", &l).unwrap();
        let nr = embed(&number(3), "r", &l).unwrap();
        // <1,2| n_q |1,2> = 1 and <1,2| n_r |1,2> = 2.
        let idx = l.basis_index(&[1, 2]).unwrap();
        assert!((nq.get(idx, idx).re - 1.0).abs() < 1e-15);
        assert!((nr.get(idx, idx).re - 2.0).abs() < 1e-15);
        // Embeddings of different modes commute.
        let ab = nq.matmul(&nr).unwrap();
        let ba = nr.matmul(&nq).unwrap();
        assert!(ab.max_abs_diff(&ba).unwrap() < 1e-14);
    }

    #[test]
    fn embed_rejects_mismatched_operator() {
        let l = two_mode();
        assert!(embed(&number(3), "q", &l).is_err());
        assert!(embed(&number(2), "missing", &l).is_err());
    }
}
