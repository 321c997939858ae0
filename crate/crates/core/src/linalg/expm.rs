//! Hermitian eigendecomposition and unitary propagators `exp(-i H t)`.
//!
//! Hamiltonians carry the reduced Planck constant folded in (units rad/s), so
//! the propagator over an interval `t` is `exp(-i H t)` with the plain
//! matrix exponential. Small systems use an exact eigendecomposition; large
//! ones fall back to scaling-and-squaring with a Taylor series, which avoids
//! an O(n^3) dense eigensolve on matrices that are only ever applied once.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::linalg::matrix::{im, re, C64, ComplexMatrix};

/// Largest dimension at which `expm_unitary` uses the exact eigendecomposition.
pub const EIG_PATH_LIMIT: usize = 512;

/// Relative tolerance for the Hermiticity precondition of the propagator.
const HERMITICITY_RTOL: f64 = 1e-9;

/// Eigenvalues and eigenvectors of a Hermitian matrix, eigenvalues ascending.
///
/// Returns `(eigenvalues, V)` where column `k` of `V` is the eigenvector for
/// `eigenvalues[k]`.
pub fn eigh(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            h.nrows(),
            h.ncols()
        )));
    }
    let dev = h.hermiticity_deviation();
    let scale = h.max_abs().max(1.0);
    if dev > HERMITICITY_RTOL * scale {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = h.nrows();
    // Symmetrize to wash out roundoff asymmetry before handing to the solver.
    let sym = h.add(&h.adjoint())?.scale(re(0.5));
    let dm = DMatrix::<Complex<f64>>::from_fn(n, n, |i, j| {
        let v = sym.get(i, j);
        Complex::new(v.re, v.im)
    });
    let eig = dm.symmetric_eigen();
    // Sort ascending by eigenvalue; keep vector/value pairing.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let vals: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |i, j| {
        let v = eig.eigenvectors[(i, order[j])];
        C64::new(v.re, v.im)
    });
    Ok((vals, vecs))
}

/// Unitary propagator `exp(-i h t)` for a Hermitian `h` (rad/s) over time `t`
/// (seconds).
pub fn expm_unitary(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "propagator of a {}x{} matrix",
            h.nrows(),
            h.ncols()
        )));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument("propagator time must be finite".into()));
    }
    let dev = h.hermiticity_deviation();
    let scale = h.max_abs().max(1.0);
    if dev > HERMITICITY_RTOL * scale {
        return Err(Error::NotHermitian { deviation: dev });
    }
    if h.nrows() <= EIG_PATH_LIMIT {
        expm_unitary_eig(h, t)
    } else {
        expm_taylor_scaled(&h.scale(im(-t)))
    }
}

/// Exact propagator via eigendecomposition: `V exp(-i lambda t) V^dagger`.
fn expm_unitary_eig(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let (vals, vecs) = eigh(h)?;
    let phases: Vec<C64> = vals.iter().map(|&l| im(-l * t).exp()).collect();
    let d = ComplexMatrix::from_diag(&phases);
    vecs.matmul(&d)?.matmul(&vecs.adjoint())
}

/// Scaling-and-squaring Taylor evaluation of `exp(a)` for a general square
/// matrix `a`. Accuracy target is a few ulps of the unit-norm regime the
/// propagator lives in.
pub(crate) fn expm_taylor_scaled(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.nrows();
    let norm = a.gershgorin_bound();
    // Halve until the scaled norm is at most 1/2, then Taylor converges fast.
    let squarings = if norm <= 0.5 {
        0
    } else {
        ((norm / 0.5).log2().ceil() as i32).max(0) as u32
    };
    let b = a.scale(re(1.0 / f64::powi(2.0, squarings as i32))).to_dense();
    let mut sum = ComplexMatrix::identity(n).to_dense();
    let mut term = ComplexMatrix::identity(n).to_dense();
    for k in 1..=30u32 {
        term = term.matmul(&b)?.scale(re(1.0 / k as f64));
        sum.axpy(re(1.0), &term)?;
        if term.max_abs() < 1e-18 * sum.max_abs().max(1.0) {
            break;
        }
    }
    let mut out = sum;
    for _ in 0..squarings {
        out = out.matmul(&out)?;
    }
    Ok(out)
}
