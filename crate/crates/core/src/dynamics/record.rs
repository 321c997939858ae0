//! Quantum states and time-series records produced by the integrators.

use crate::error::{Error, Result};
use crate::linalg::{re, ComplexMatrix, SpaceLayout, C64};

/// A pure or mixed state over a tensor-space layout.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    layout: SpaceLayout,
    data: StateData,
}

#[derive(Debug, Clone, PartialEq)]
enum StateData {
    Ket(Vec<C64>),
    Density(ComplexMatrix),
}

impl QuantumState {
    /// Product basis state with the given per-mode occupations.
    pub fn basis_ket(layout: &SpaceLayout, occupations: &[usize]) -> Result<Self> {
        let idx = layout.basis_index(occupations)?;
        let mut amps = vec![C64::new(0.0, 0.0); layout.total_dim()];
        amps[idx] = C64::new(1.0, 0.0);
        Ok(QuantumState { layout: layout.clone(), data: StateData::Ket(amps) })
    }

    /// Pure state from amplitude vector (must be normalized within 1e-8).
    pub fn from_ket(layout: &SpaceLayout, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for layout of dimension {}",
                amplitudes.len(),
                layout.total_dim()
            )));
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "ket norm^2 = {norm2}, expected 1 within 1e-8"
            )));
        }
        Ok(QuantumState { layout: layout.clone(), data: StateData::Ket(amplitudes) })
    }

    /// Mixed state from a density matrix (unit trace and Hermitian within
    /// 1e-8).
    pub fn from_density(layout: &SpaceLayout, rho: ComplexMatrix) -> Result<Self> {
        let dim = layout.total_dim();
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} density matrix for layout of dimension {dim}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let tr = rho.trace()?;
        if (tr - re(1.0)).norm() > 1e-8 {
            return Err(Error::InvalidArgument(format!("density trace = {tr}, expected 1")));
        }
        if !rho.is_hermitian(1e-8 * rho.max_abs().max(1.0)) {
            return Err(Error::NotHermitian { deviation: rho.hermiticity_deviation() });
        }
        Ok(QuantumState { layout: layout.clone(), data: StateData::Density(rho) })
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn is_pure_ket(&self) -> bool {
        matches!(self.data, StateData::Ket(_))
    }

    /// Amplitudes of a pure state, if stored as a ket.
    pub fn ket(&self) -> Option<&[C64]> {
        match &self.data {
            StateData::Ket(v) => Some(v),
            StateData::Density(_) => None,
        }
    }

    /// Density-matrix form (projector for kets).
    pub fn density(&self) -> ComplexMatrix {
        match &self.data {
            StateData::Density(m) => m.clone(),
            StateData::Ket(v) => {
                let n = v.len();
                ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
            }
        }
    }

    /// Expectation value `Tr[rho O]`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<C64> {
        match &self.data {
            StateData::Ket(v) => {
                let ov = op.matvec(v)?;
                Ok(v.iter().zip(ov.iter()).map(|(a, b)| a.conj() * b).sum())
            }
            StateData::Density(rho) => rho.matmul(op)?.trace(),
        }
    }

    /// Diagonal of the density matrix (basis populations).
    pub fn populations(&self) -> Vec<f64> {
        match &self.data {
            StateData::Ket(v) => v.iter().map(|a| a.norm_sqr()).collect(),
            StateData::Density(rho) => (0..rho.nrows()).map(|i| rho.get(i, i).re).collect(),
        }
    }

    /// Purity `Tr[rho^2]`; 1 for pure states.
    pub fn purity(&self) -> Result<f64> {
        match &self.data {
            StateData::Ket(_) => Ok(1.0),
            StateData::Density(rho) => Ok(rho.matmul(rho)?.trace()?.re),
        }
    }
}

/// Time series of expectation values plus integration diagnostics.
#[derive(Debug, Clone)]
pub struct EvolutionRecord {
    /// Output grid (seconds), as supplied by the caller.
    pub times: Vec<f64>,
    /// Observable names, parallel to `expectations`.
    pub observable_names: Vec<String>,
    /// `expectations[k][i]` = <O_k>(times[i]).
    pub expectations: Vec<Vec<C64>>,
    /// Final state at `times.last()`.
    pub final_state: QuantumState,
    /// Largest |Tr rho - 1| seen on the output grid.
    pub trace_drift: f64,
    /// Largest Hermiticity deviation of rho seen on the output grid.
    pub hermiticity_drift: f64,
    /// Total number of internal integrator substeps.
    pub steps_taken: u64,
    /// Disagreement of the half-step self-check, when it was requested.
    pub convergence_error: Option<f64>,
}

impl EvolutionRecord {
    /// Expectation series for a named observable.
    pub fn expectation(&self, name: &str) -> Option<&[C64]> {
        self.observable_names
            .iter()
            .position(|n| n == name)
            .map(|k| self.expectations[k].as_slice())
    }

    /// CSV rendering: `t` column followed by re/im pairs per observable.
    /// Floats use the shortest round-trip formatting, so output is
    /// byte-deterministic.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for name in &self.observable_names {
            s.push_str(&format!(",re_{name},im_{name}"));
        }
        s.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            s.push_str(&format!("{t}"));
            for series in &self.expectations {
                s.push_str(&format!(",{},{}", series[i].re, series[i].im));
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{number, SpaceLayout};

    fn layout() -> SpaceLayout {
        SpaceLayout::from_dims(&[("q", 2), ("r", 3)]).unwrap()
    }

    #[test]
    fn basis_ket_population_and_expectation() {
        let l = layout();
        let s = QuantumState::basis_ket(&l, &[1, 2]).unwrap();
        let pops = s.populations();
        assert_eq!(pops.len(), 6);
        assert!((pops[5] - 1.0).abs() < 1e-15);
        let nr = crate::linalg::embed(&number(3), "r", &l).unwrap();
        assert!((s.expectation(&nr).unwrap().re - 2.0).abs() < 1e-12);
        assert!((s.purity().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        let l = layout();
        let s = QuantumState::basis_ket(&l, &[0, 0]).unwrap();
        let rho = s.density();
        let s2 = QuantumState::from_density(&l, rho).unwrap();
        assert!((s2.populations()[0] - 1.0).abs() < 1e-15);
        // Wrong trace is rejected.
        let bad = s.density().scale(re(0.5));
        assert!(QuantumState::from_density(&l, bad).is_err());
        // Wrong length kets are rejected.
        assert!(QuantumState::from_ket(&l, vec![C64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn csv_layout_and_determinism() {
        let l = SpaceLayout::from_dims(&[("q", 2)]).unwrap();
        let state = QuantumState::basis_ket(&l, &[0]).unwrap();
        let rec = EvolutionRecord {
            times: vec![0.0, 1e-9],
            observable_names: vec!["n".into()],
            expectations: vec![vec![C64::new(0.25, -0.5), C64::new(0.125, 0.0)]],
            final_state: state,
            trace_drift: 0.0,
            hermiticity_drift: 0.0,
            steps_taken: 2,
            convergence_error: None,
        };
        let csv = rec.to_csv();
        assert_eq!(csv, rec.to_csv());
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,re_n,im_n");
        assert_eq!(lines.next().unwrap(), "0,0.25,-0.5");
        assert!(rec.expectation("n").is_some());
        assert!(rec.expectation("missing").is_none());
    }
}
