//! Complex matrices with a dense and a compressed-sparse-row representation.
//!
//! Operators in this crate are small enough (dimension at most a few
//! thousand) that a hand-rolled two-representation matrix is simpler and
//! faster to audit than a general sparse-algebra dependency. Dense storage is
//! row-major; sparse storage is classic CSR. Products automatically pick a
//! representation: anything touched by a dense operand densifies, while
//! Kronecker products of large operators stay sparse.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Above this dimension, structural operations (Kronecker products,
/// embeddings) keep results sparse instead of materializing dense storage.
pub const DENSE_DIM_LIMIT: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Dense(Vec<C64>),
    Sparse {
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        vals: Vec<C64>,
    },
}

/// A complex matrix with automatic dense/sparse representation.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    nrows: usize,
    ncols: usize,
    repr: Repr,
}

impl ComplexMatrix {
    // ------------------------------------------------------------------
    // Constructors
    // ------------------------------------------------------------------

    /// Dense zero matrix.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            repr: Repr::Dense(vec![C64::new(0.0, 0.0); nrows * ncols]),
        }
    }

    /// Identity matrix; sparse above [`DENSE_DIM_LIMIT`].
    pub fn identity(n: usize) -> Self {
        if n > DENSE_DIM_LIMIT {
            let row_ptr: Vec<usize> = (0..=n).collect();
            let col_idx: Vec<usize> = (0..n).collect();
            let vals = vec![C64::new(1.0, 0.0); n];
            Self { nrows: n, ncols: n, repr: Repr::Sparse { row_ptr, col_idx, vals } }
        } else {
            let mut m = Self::zeros(n, n);
            for i in 0..n {
                m.set(i, i, C64::new(1.0, 0.0));
            }
            m
        }
    }

    /// Dense matrix from a row-major data vector.
    pub fn from_row_major(nrows: usize, ncols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::DimensionMismatch(format!(
                "row-major data has {} entries, expected {}x{}={}",
                data.len(),
                nrows,
                ncols,
                nrows * ncols
            )));
        }
        Ok(Self { nrows, ncols, repr: Repr::Dense(data) })
    }

    /// Dense matrix with entries produced by `f(row, col)`.
    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, repr: Repr::Dense(data) }
    }

    /// Square diagonal matrix from the given diagonal entries.
    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        if n > DENSE_DIM_LIMIT {
            let row_ptr: Vec<usize> = (0..=n).collect();
            let col_idx: Vec<usize> = (0..n).collect();
            Self { nrows: n, ncols: n, repr: Repr::Sparse { row_ptr, col_idx, vals: diag.to_vec() } }
        } else {
            let mut m = Self::zeros(n, n);
            for (i, &d) in diag.iter().enumerate() {
                m.set(i, i, d);
            }
            m
        }
    }

    /// Sparse matrix from (row, col, value) triplets. Duplicate positions are
    /// summed; explicit zeros are dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); nrows];
        for (r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::DimensionMismatch(format!(
                    "triplet ({r}, {c}) outside {nrows}x{ncols}"
                )));
            }
            rows[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in &mut rows {
            row.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut v = C64::new(0.0, 0.0);
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                if v != C64::new(0.0, 0.0) {
                    col_idx.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self { nrows, ncols, repr: Repr::Sparse { row_ptr, col_idx, vals } })
    }

    // ------------------------------------------------------------------
    // Shape and representation queries
    // ------------------------------------------------------------------

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.repr, Repr::Sparse { .. })
    }

    /// Number of explicitly stored nonzero entries.
    pub fn nnz(&self) -> usize {
        match &self.repr {
            Repr::Dense(d) => d.iter().filter(|v| **v != C64::new(0.0, 0.0)).count(),
            Repr::Sparse { vals, .. } => vals.len(),
        }
    }

    /// Entry accessor (O(1) dense, O(log nnz_row) sparse).
    pub fn get(&self, i: usize, j: usize) -> C64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        match &self.repr {
            Repr::Dense(d) => d[i * self.ncols + j],
            Repr::Sparse { row_ptr, col_idx, vals } => {
                let lo = row_ptr[i];
                let hi = row_ptr[i + 1];
                match col_idx[lo..hi].binary_search(&j) {
                    Ok(k) => vals[lo + k],
                    Err(_) => C64::new(0.0, 0.0),
                }
            }
        }
    }

    /// Entry mutation. Panics if called on a sparse matrix; sparse matrices
    /// are built once from triplets and treated as immutable.
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        let ncols = self.ncols;
        match &mut self.repr {
            Repr::Dense(d) => d[i * ncols + j] = v,
            Repr::Sparse { .. } => panic!("set() on a sparse matrix; densify first"),
        }
    }

    /// Row-major dense copy of the data.
    pub fn to_dense_vec(&self) -> Vec<C64> {
        match &self.repr {
            Repr::Dense(d) => d.clone(),
            Repr::Sparse { row_ptr, col_idx, vals } => {
                let mut out = vec![C64::new(0.0, 0.0); self.nrows * self.ncols];
                for i in 0..self.nrows {
                    for k in row_ptr[i]..row_ptr[i + 1] {
                        out[i * self.ncols + col_idx[k]] = vals[k];
                    }
                }
                out
            }
        }
    }

    /// Dense view of the data when stored densely.
    pub fn dense_data(&self) -> Option<&[C64]> {
        match &self.repr {
            Repr::Dense(d) => Some(d),
            Repr::Sparse { .. } => None,
        }
    }

    /// Force dense representation.
    pub fn to_dense(&self) -> Self {
        Self { nrows: self.nrows, ncols: self.ncols, repr: Repr::Dense(self.to_dense_vec()) }
    }

    /// Force CSR representation (dropping explicit zeros).
    pub fn to_sparse(&self) -> Self {
        match &self.repr {
            Repr::Sparse { .. } => self.clone(),
            Repr::Dense(d) => {
                let mut row_ptr = Vec::with_capacity(self.nrows + 1);
                let mut col_idx = Vec::new();
                let mut vals = Vec::new();
                row_ptr.push(0);
                for i in 0..self.nrows {
                    for j in 0..self.ncols {
                        let v = d[i * self.ncols + j];
                        if v != C64::new(0.0, 0.0) {
                            col_idx.push(j);
                            vals.push(v);
                        }
                    }
                    row_ptr.push(col_idx.len());
                }
                Self { nrows: self.nrows, ncols: self.ncols, repr: Repr::Sparse { row_ptr, col_idx, vals } }
            }
        }
    }

    // ------------------------------------------------------------------
    // Elementwise and structural operations
    // ------------------------------------------------------------------

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        Ok(())
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        if let (Repr::Sparse { .. }, Repr::Sparse { .. }) = (&self.repr, &other.repr) {
            let mut trip = self.triplets();
            trip.extend(other.triplets());
            return Self::from_triplets(self.nrows, self.ncols, trip);
        }
        let mut out = self.to_dense_vec();
        match &other.repr {
            Repr::Dense(d) => {
                for (o, v) in out.iter_mut().zip(d.iter()) {
                    *o += *v;
                }
            }
            Repr::Sparse { row_ptr, col_idx, vals } => {
                for i in 0..other.nrows {
                    for k in row_ptr[i]..row_ptr[i + 1] {
                        out[i * self.ncols + col_idx[k]] += vals[k];
                    }
                }
            }
        }
        Self::from_row_major(self.nrows, self.ncols, out)
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// `alpha * self`.
    pub fn scale(&self, alpha: C64) -> Self {
        let mut out = self.clone();
        match &mut out.repr {
            Repr::Dense(d) => d.iter_mut().for_each(|v| *v *= alpha),
            Repr::Sparse { vals, .. } => vals.iter_mut().for_each(|v| *v *= alpha),
        }
        out
    }

    /// In-place `self += alpha * other` (dense self required).
    pub fn axpy(&mut self, alpha: C64, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        let ncols = self.ncols;
        let dense = match &mut self.repr {
            Repr::Dense(d) => d,
            Repr::Sparse { .. } => {
                return Err(Error::InvalidArgument("axpy target must be dense".into()))
            }
        };
        match &other.repr {
            Repr::Dense(d) => {
                for (o, v) in dense.iter_mut().zip(d.iter()) {
                    *o += alpha * *v;
                }
            }
            Repr::Sparse { row_ptr, col_idx, vals } => {
                for i in 0..other.nrows {
                    for k in row_ptr[i]..row_ptr[i + 1] {
                        dense[i * ncols + col_idx[k]] += alpha * vals[k];
                    }
                }
            }
        }
        Ok(())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        match &self.repr {
            Repr::Dense(d) => {
                let mut out = vec![C64::new(0.0, 0.0); self.nrows * self.ncols];
                for i in 0..self.nrows {
                    for j in 0..self.ncols {
                        out[j * self.nrows + i] = d[i * self.ncols + j].conj();
                    }
                }
                Self { nrows: self.ncols, ncols: self.nrows, repr: Repr::Dense(out) }
            }
            Repr::Sparse { row_ptr, col_idx, vals } => {
                let trip = (0..self.nrows).flat_map(|i| {
                    (row_ptr[i]..row_ptr[i + 1]).map(move |k| (col_idx[k], i, vals[k].conj()))
                });
                // Safe: indices stay in range after transposition.
                Self::from_triplets(self.ncols, self.nrows, trip.collect::<Vec<_>>())
                    .expect("transposed triplets in range")
            }
        }
    }

    /// Nonzero entries as (row, col, value) triplets.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        match &self.repr {
            Repr::Dense(d) => {
                let mut out = Vec::new();
                for i in 0..self.nrows {
                    for j in 0..self.ncols {
                        let v = d[i * self.ncols + j];
                        if v != C64::new(0.0, 0.0) {
                            out.push((i, j, v));
                        }
                    }
                }
                out
            }
            Repr::Sparse { row_ptr, col_idx, vals } => (0..self.nrows)
                .flat_map(|i| {
                    (row_ptr[i]..row_ptr[i + 1]).map(move |k| (i, col_idx[k], vals[k]))
                })
                .collect(),
        }
    }

    /// Kronecker product `self (x) other`. The result stays sparse when the
    /// output dimension exceeds [`DENSE_DIM_LIMIT`] or when both operands are
    /// sparse.
    pub fn kron(&self, other: &Self) -> Self {
        let nrows = self.nrows * other.nrows;
        let ncols = self.ncols * other.ncols;
        let keep_sparse =
            nrows.max(ncols) > DENSE_DIM_LIMIT || (self.is_sparse() && other.is_sparse());
        let trip_a = self.triplets();
        let trip_b = other.triplets();
        let mut trip = Vec::with_capacity(trip_a.len() * trip_b.len());
        for &(ia, ja, va) in &trip_a {
            for &(ib, jb, vb) in &trip_b {
                trip.push((ia * other.nrows + ib, ja * other.ncols + jb, va * vb));
            }
        }
        let sparse = Self::from_triplets(nrows, ncols, trip).expect("kron triplets in range");
        if keep_sparse {
            sparse
        } else {
            sparse.to_dense()
        }
    }

    // ------------------------------------------------------------------
    // Products
    // ------------------------------------------------------------------

    /// Matrix-vector product `self * x`.
    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch(format!(
                "matvec: {}x{} by vector of length {}",
                self.nrows,
                self.ncols,
                x.len()
            )));
        }
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        match &self.repr {
            Repr::Dense(d) => {
                for i in 0..self.nrows {
                    let row = &d[i * self.ncols..(i + 1) * self.ncols];
                    let mut acc = C64::new(0.0, 0.0);
                    for (a, b) in row.iter().zip(x.iter()) {
                        acc += *a * *b;
                    }
                    y[i] = acc;
                }
            }
            Repr::Sparse { row_ptr, col_idx, vals } => {
                for i in 0..self.nrows {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in row_ptr[i]..row_ptr[i + 1] {
                        acc += vals[k] * x[col_idx[k]];
                    }
                    y[i] = acc;
                }
            }
        }
        Ok(y)
    }

    /// Matrix product `self * other`. Result is sparse only when both inputs
    /// are sparse.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} by {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let (m, n) = (self.nrows, other.ncols);
        match (&self.repr, &other.repr) {
            (Repr::Sparse { row_ptr, col_idx, vals }, Repr::Sparse { .. }) => {
                // Row-by-row accumulator product; output stays sparse.
                let bt = other;
                let mut trip = Vec::new();
                let mut acc: Vec<C64> = vec![C64::new(0.0, 0.0); n];
                let mut touched: Vec<usize> = Vec::new();
                for i in 0..m {
                    for k in row_ptr[i]..row_ptr[i + 1] {
                        let a = vals[k];
                        let mid = col_idx[k];
                        if let Repr::Sparse { row_ptr: bp, col_idx: bc, vals: bv } = &bt.repr {
                            for kk in bp[mid]..bp[mid + 1] {
                                let j = bc[kk];
                                if acc[j] == C64::new(0.0, 0.0) {
                                    touched.push(j);
                                }
                                acc[j] += a * bv[kk];
                            }
                        }
                    }
                    for &j in &touched {
                        trip.push((i, j, acc[j]));
                        acc[j] = C64::new(0.0, 0.0);
                    }
                    touched.clear();
                }
                Self::from_triplets(m, n, trip)
            }
            (Repr::Sparse { row_ptr, col_idx, vals }, Repr::Dense(bd)) => {
                let mut out = vec![C64::new(0.0, 0.0); m * n];
                for i in 0..m {
                    for k in row_ptr[i]..row_ptr[i + 1] {
                        let a = vals[k];
                        let brow = &bd[col_idx[k] * n..(col_idx[k] + 1) * n];
                        let orow = &mut out[i * n..(i + 1) * n];
                        for (o, b) in orow.iter_mut().zip(brow.iter()) {
                            *o += a * *b;
                        }
                    }
                }
                Self::from_row_major(m, n, out)
            }
            (Repr::Dense(ad), Repr::Sparse { row_ptr, col_idx, vals }) => {
                let mut out = vec![C64::new(0.0, 0.0); m * n];
                for i in 0..m {
                    for mid in 0..self.ncols {
                        let a = ad[i * self.ncols + mid];
                        if a == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for k in row_ptr[mid]..row_ptr[mid + 1] {
                            out[i * n + col_idx[k]] += a * vals[k];
                        }
                    }
                }
                Self::from_row_major(m, n, out)
            }
            (Repr::Dense(ad), Repr::Dense(bd)) => {
                let mut out = vec![C64::new(0.0, 0.0); m * n];
                for i in 0..m {
                    for mid in 0..self.ncols {
                        let a = ad[i * self.ncols + mid];
                        if a == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let brow = &bd[mid * n..(mid + 1) * n];
                        let orow = &mut out[i * n..(i + 1) * n];
                        for (o, b) in orow.iter_mut().zip(brow.iter()) {
                            *o += a * *b;
                        }
                    }
                }
                Self::from_row_major(m, n, out)
            }
        }
    }

    // ------------------------------------------------------------------
    // Reductions and predicates
    // ------------------------------------------------------------------

    /// Trace (sum of diagonal entries). Requires a square matrix.
    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "trace of a {}x{} matrix",
                self.nrows, self.ncols
            )));
        }
        Ok((0..self.nrows).map(|i| self.get(i, i)).fold(C64::new(0.0, 0.0), |a, b| a + b))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        match &self.repr {
            Repr::Dense(d) => d.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Repr::Sparse { vals, .. } => vals.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    /// Largest entrywise difference `max |self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.sub(other)?.max_abs())
    }

    /// Hermiticity deviation `max |H - H^dagger|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.sub(&self.adjoint()).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)
    }

    /// True when `max |H - H^dagger| <= tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Gershgorin bound on the spectral radius: `max_i sum_j |a_ij|`.
    /// Used to choose integrator steps; exact eigenvalues never exceed it
    /// for Hermitian matrices.
    pub fn gershgorin_bound(&self) -> f64 {
        let mut best: f64 = 0.0;
        match &self.repr {
            Repr::Dense(d) => {
                for i in 0..self.nrows {
                    let s: f64 =
                        d[i * self.ncols..(i + 1) * self.ncols].iter().map(|v| v.norm()).sum();
                    best = best.max(s);
                }
            }
            Repr::Sparse { row_ptr, vals, .. } => {
                for i in 0..self.nrows {
                    let s: f64 = vals[row_ptr[i]..row_ptr[i + 1]].iter().map(|v| v.norm()).sum();
                    best = best.max(s);
                }
            }
        }
        best
    }
}

/// Real-valued helper: build a C64 from a real number.
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Imaginary-unit helper: `im(x) = i x`.
pub fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}
