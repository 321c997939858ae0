//! Spin-register mapping of the chip Hamiltonian and its first-order
//! Trotterization into the rotation gate set.
//!
//! Register layout (9 qubits): interior transmons 0-3, exterior transmons
//! 4-7, tunable transmon 8.
//!
//! Mapping rules, with `n = (I - Z)/2` substituted for every occupation
//! operator:
//! - every transmon contributes `(omega/2) Z` (the tunable one at its
//!   flux-dependent frequency);
//! - each interior dispersive strength couples the interior spin to the
//!   tunable spin's occupation: `chi Z_int n_tun = (chi/2) Z_int -
//!   (chi/2) Z_int Z_tun`;
//! - each exterior-interior dispersive strength does the same onto the
//!   paired interior spin;
//! - the shared-readout dispersive strengths have no readout spin in the
//!   register; the ring-partner exterior occupation stands in, giving each
//!   exterior qubit a dispersive link to its neighbor (the vacuum-projection
//!   alternative would erase the term entirely);
//! - the bare readout-resonator energy is a constant in the unpopulated
//!   readout subspace and is dropped;
//! - exchange couplings become `(J/2)(XX + YY)` with `J` the
//!   mediator-eliminated effective exchange of each pair (interior-tunable
//!   and interior-exterior), detunings measured from the pair's coupling
//!   resonator.

use crate::device::{effective_j, tunable_freq, DeviceParams};
use crate::error::{Error, Result};
use crate::pauli::circuit::{Gate, GateCircuit, GateKind};
use crate::pauli::strings::{PauliAxis, PauliHamiltonian, PauliString};

/// Number of spins in the register.
pub const REGISTER_SIZE: usize = 9;

/// Register index of interior transmon `m`.
pub fn interior_qubit(m: usize) -> usize {
    assert!(m < 4, "interior index {m} out of range");
    m
}

/// Register index of exterior transmon `m`.
pub fn exterior_qubit(m: usize) -> usize {
    assert!(m < 4, "exterior index {m} out of range");
    4 + m
}

/// Register index of the tunable transmon.
pub fn tunable_qubit() -> usize {
    8
}

/// Add `chi * Z_a n_b = (chi/2) Z_a - (chi/2) Z_a Z_b` to the Hamiltonian.
fn add_dispersive(
    h: &mut PauliHamiltonian,
    chi: f64,
    spin: usize,
    occupied: usize,
) -> Result<()> {
    h.add_term(0.5 * chi, PauliString::single(REGISTER_SIZE, spin, PauliAxis::Z)?)?;
    h.add_term(
        -0.5 * chi,
        PauliString::pair(REGISTER_SIZE, spin, PauliAxis::Z, occupied, PauliAxis::Z)?,
    )?;
    Ok(())
}

/// Add `(j/2)(XX + YY)` between two spins.
fn add_exchange(h: &mut PauliHamiltonian, j: f64, qa: usize, qb: usize) -> Result<()> {
    h.add_term(0.5 * j, PauliString::pair(REGISTER_SIZE, qa, PauliAxis::X, qb, PauliAxis::X)?)?;
    h.add_term(0.5 * j, PauliString::pair(REGISTER_SIZE, qa, PauliAxis::Y, qb, PauliAxis::Y)?)?;
    Ok(())
}

/// Build the 9-spin Pauli Hamiltonian of the chip at the parameter set's
/// flux bias.
pub fn map_to_pauli(params: &DeviceParams) -> Result<PauliHamiltonian> {
    params.validate()?;
    let mut h = PauliHamiltonian::new(REGISTER_SIZE)?;

    for m in 0..4 {
        h.add_term(
            0.5 * params.interior_freqs[m],
            PauliString::single(REGISTER_SIZE, interior_qubit(m), PauliAxis::Z)?,
        )?;
    }
    for m in 0..4 {
        h.add_term(
            0.5 * params.exterior_freqs[m],
            PauliString::single(REGISTER_SIZE, exterior_qubit(m), PauliAxis::Z)?,
        )?;
    }
    h.add_term(
        0.5 * tunable_freq(params, params.flux),
        PauliString::single(REGISTER_SIZE, tunable_qubit(), PauliAxis::Z)?,
    )?;

    for m in 0..4 {
        add_dispersive(&mut h, params.chi_int_tun[m], interior_qubit(m), tunable_qubit())?;
        add_dispersive(&mut h, params.chi_ext_int[m], exterior_qubit(m), interior_qubit(m))?;
        add_dispersive(
            &mut h,
            params.chi_ext_ring[m],
            exterior_qubit(m),
            exterior_qubit((m + 1) % 4),
        )?;
    }

    for m in 0..4 {
        let med = params.coupler_res_freqs[m];
        // Interior-tunable exchange through coupling resonator m.
        if params.bare_g_tun * params.bare_g_int[m] != 0.0 {
            let j = effective_j(
                params.bare_g_tun,
                params.bare_g_int[m],
                tunable_freq(params, params.flux) - med,
                params.interior_freqs[m] - med,
            )?;
            add_exchange(&mut h, j, interior_qubit(m), tunable_qubit())?;
        }
        // Interior-exterior exchange through the same resonator.
        if params.bare_g_ext[m] * params.bare_g_int[m] != 0.0 {
            let j = effective_j(
                params.bare_g_ext[m],
                params.bare_g_int[m],
                params.exterior_freqs[m] - med,
                params.interior_freqs[m] - med,
            )?;
            add_exchange(&mut h, j, exterior_qubit(m), interior_qubit(m))?;
        }
    }

    Ok(h)
}

/// First-order Trotterization of a Pauli Hamiltonian into rotation gates.
///
/// Each slice applies, in term insertion order, `Rz(2 c dt)` for single-Z
/// terms, `Rzz(2 c dt)` for ZZ, and `Rxx/Ryy(2 c dt)` for XX/YY. Identity
/// strings are global phases and are skipped; any other string has no gate
/// in this set. All gates are emitted with zero duration; callers assign
/// physical timing.
pub fn trotterize(h: &PauliHamiltonian, t: f64, n_steps: usize) -> Result<GateCircuit> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("need at least one Trotter step".into()));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite evolution time {t}")));
    }
    let dt = t / n_steps as f64;
    let mut circuit = GateCircuit::new(h.n_qubits())?;
    for _ in 0..n_steps {
        for term in h.terms() {
            let support = term.string.support();
            let angle = 2.0 * term.coeff * dt;
            let gate = match support.as_slice() {
                [] => continue, // global phase
                [(q, PauliAxis::Z)] => {
                    Gate { kind: GateKind::Rz, qubits: vec![*q], angle, duration: 0.0 }
                }
                [(qa, PauliAxis::Z), (qb, PauliAxis::Z)] => {
                    Gate { kind: GateKind::Rzz, qubits: vec![*qa, *qb], angle, duration: 0.0 }
                }
                [(qa, PauliAxis::X), (qb, PauliAxis::X)] => {
                    Gate { kind: GateKind::Rxx, qubits: vec![*qa, *qb], angle, duration: 0.0 }
                }
                [(qa, PauliAxis::Y), (qb, PauliAxis::Y)] => {
                    Gate { kind: GateKind::Ryy, qubits: vec![*qa, *qb], angle, duration: 0.0 }
                }
                _ => {
                    return Err(Error::UnsupportedTerm(format!(
                        "no gate in the rotation set for the string {}",
                        term.string
                    )))
                }
            };
            circuit.push(gate)?;
        }
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{Preset, TAU};
    use crate::linalg::{eigh, expm_unitary, ComplexMatrix};

    /// Largest singular value of a (small) matrix.
    fn op_norm(m: &ComplexMatrix) -> f64 {
        let gram = m.adjoint().matmul(m).unwrap();
        let (evals, _) = eigh(&gram).unwrap();
        evals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    #[test]
    fn zero_couplings_leave_nine_z_terms() {
        let mut params = DeviceParams::preset(Preset::Baseline);
        params.chi_ext_int = [0.0; 4];
        params.chi_int_tun = [0.0; 4];
        params.chi_ext_ring = [0.0; 4];
        params.bare_g_int = [0.0; 4];
        params.bare_g_ext = [0.0; 4];
        params.bare_g_tun = 0.0;
        let h = map_to_pauli(&params).unwrap();
        assert_eq!(h.terms().len(), 9);
        for term in h.terms() {
            let support = term.string.support();
            assert_eq!(support.len(), 1);
            assert_eq!(support[0].1, PauliAxis::Z);
            assert!(term.coeff > 0.0);
        }
    }

    #[test]
    fn full_map_term_census() {
        let params = DeviceParams::preset(Preset::Baseline);
        let h = map_to_pauli(&params).unwrap();
        // 9 frequency Z terms, merged with 12 dispersive single-Z pieces
        // (which all land on existing spins), plus 12 ZZ, plus 8 exchanges
        // as XX and YY each.
        let single_z = h
            .terms()
            .iter()
            .filter(|t| {
                let s = t.string.support();
                s.len() == 1 && s[0].1 == PauliAxis::Z
            })
            .count();
        let zz = h
            .terms()
            .iter()
            .filter(|t| {
                let s = t.string.support();
                s.len() == 2 && s.iter().all(|(_, a)| *a == PauliAxis::Z)
            })
            .count();
        let xx_yy = h
            .terms()
            .iter()
            .filter(|t| {
                let s = t.string.support();
                s.len() == 2 && s.iter().all(|(_, a)| matches!(a, PauliAxis::X | PauliAxis::Y))
            })
            .count();
        assert_eq!(single_z, 9);
        assert_eq!(zz, 12);
        assert_eq!(xx_yy, 16);
        assert_eq!(h.terms().len(), 9 + 12 + 16);
    }

    #[test]
    fn mapped_matrix_is_hermitian() {
        let params = DeviceParams::preset(Preset::Optimized);
        let h = map_to_pauli(&params).unwrap();
        let m = h.to_matrix().unwrap();
        assert_eq!(m.nrows(), 512);
        assert!(m.hermiticity_deviation() < 1e-6 * m.max_abs());
    }

    #[test]
    fn resonant_mediator_is_rejected() {
        let mut params = DeviceParams::preset(Preset::Baseline);
        // Park interior 2 exactly on its coupling resonator.
        params.coupler_res_freqs[2] = params.interior_freqs[2];
        assert!(matches!(map_to_pauli(&params), Err(Error::DispersiveViolation(_))));
        // With the interior-side couplings off, the resonance is never used.
        params.bare_g_int = [0.0; 4];
        assert!(map_to_pauli(&params).is_ok());
    }

    #[test]
    fn single_term_trotterization_is_exact() {
        let mut h = PauliHamiltonian::new(2).unwrap();
        let c = TAU * 4.0e6;
        h.add_term(c, PauliString::pair(2, 0, PauliAxis::Z, 1, PauliAxis::Z).unwrap())
            .unwrap();
        let t = 80e-9;
        let circuit = trotterize(&h, t, 1).unwrap();
        assert_eq!(circuit.gates().len(), 1);
        assert_eq!(circuit.gates()[0].kind, GateKind::Rzz);
        assert!((circuit.gates()[0].angle - 2.0 * c * t).abs() < 1e-18);
        let exact = expm_unitary(&h.to_matrix().unwrap(), t).unwrap();
        assert!(op_norm(&circuit.unitary().unwrap().sub(&exact).unwrap()) < 1e-12);
    }

    #[test]
    fn exchange_circuit_matches_dense_exponential() {
        // Two-qubit exchange at J = 2 pi x 10 MHz for 50 ns, 64 slices.
        let j = TAU * 10.0e6;
        let mut h = PauliHamiltonian::new(2).unwrap();
        h.add_term(0.5 * j, PauliString::pair(2, 0, PauliAxis::X, 1, PauliAxis::X).unwrap())
            .unwrap();
        h.add_term(0.5 * j, PauliString::pair(2, 0, PauliAxis::Y, 1, PauliAxis::Y).unwrap())
            .unwrap();
        let t = 50e-9;
        let circuit = trotterize(&h, t, 64).unwrap();
        assert_eq!(circuit.gates().len(), 64 * 2);
        let exact = expm_unitary(&h.to_matrix().unwrap(), t).unwrap();
        let err = op_norm(&circuit.unitary().unwrap().sub(&exact).unwrap());
        assert!(err < 1e-6, "operator-norm error {err}");
    }

    #[test]
    fn trotter_error_halves_with_doubled_steps() {
        // Add a detuning Z so the terms genuinely fail to commute.
        let j = TAU * 10.0e6;
        let delta = TAU * 25.0e6;
        let mut h = PauliHamiltonian::new(2).unwrap();
        h.add_term(0.5 * delta, PauliString::single(2, 0, PauliAxis::Z).unwrap()).unwrap();
        h.add_term(0.5 * j, PauliString::pair(2, 0, PauliAxis::X, 1, PauliAxis::X).unwrap())
            .unwrap();
        h.add_term(0.5 * j, PauliString::pair(2, 0, PauliAxis::Y, 1, PauliAxis::Y).unwrap())
            .unwrap();
        let t = 100e-9;
        let exact = expm_unitary(&h.to_matrix().unwrap(), t).unwrap();
        let err_n: Vec<f64> = [32, 64]
            .iter()
            .map(|&n| {
                let u = trotterize(&h, t, n).unwrap().unitary().unwrap();
                op_norm(&u.sub(&exact).unwrap())
            })
            .collect();
        let ratio = err_n[0] / err_n[1];
        assert!(
            (1.7..=2.3).contains(&ratio),
            "first-order scaling: doubling steps gave ratio {ratio} ({err_n:?})"
        );
    }

    #[test]
    fn reversed_circuit_with_negated_angles_inverts_exactly() {
        let params = DeviceParams::preset(Preset::Baseline);
        let mut h = PauliHamiltonian::new(2).unwrap();
        // A small two-qubit slice of the device scale.
        h.add_term(
            0.5 * params.interior_freqs[0],
            PauliString::single(2, 0, PauliAxis::Z).unwrap(),
        )
        .unwrap();
        h.add_term(TAU * 3.0e6, PauliString::pair(2, 0, PauliAxis::X, 1, PauliAxis::X).unwrap())
            .unwrap();
        h.add_term(TAU * 3.0e6, PauliString::pair(2, 0, PauliAxis::Y, 1, PauliAxis::Y).unwrap())
            .unwrap();
        let t = 30e-9;
        let fwd = trotterize(&h, t, 8).unwrap();
        // Each rotation inverts by negating its angle; the circuit inverts
        // by also reversing gate order (negating t alone does not invert a
        // first-order product of non-commuting factors).
        let mut inv = GateCircuit::new(2).unwrap();
        for g in fwd.gates().iter().rev() {
            inv.push(Gate {
                kind: g.kind,
                qubits: g.qubits.clone(),
                angle: -g.angle,
                duration: g.duration,
            })
            .unwrap();
        }
        let prod = inv.unitary().unwrap().matmul(&fwd.unitary().unwrap()).unwrap();
        assert!(prod.max_abs_diff(&ComplexMatrix::identity(4)).unwrap() < 1e-9);
        // With non-commuting terms the naive time reversal must NOT invert.
        let naive = trotterize(&h, -t, 8).unwrap().unitary().unwrap();
        let stale = naive.matmul(&fwd.unitary().unwrap()).unwrap();
        assert!(stale.max_abs_diff(&ComplexMatrix::identity(4)).unwrap() > 1e-3);
    }

    #[test]
    fn unsupported_strings_are_rejected() {
        let mut h = PauliHamiltonian::new(2).unwrap();
        h.add_term(1.0, PauliString::pair(2, 0, PauliAxis::X, 1, PauliAxis::Z).unwrap())
            .unwrap();
        assert!(matches!(trotterize(&h, 1e-9, 1), Err(Error::UnsupportedTerm(_))));
        let mut h3 = PauliHamiltonian::new(3).unwrap();
        let mut s = PauliString::identity(3);
        s.set(0, PauliAxis::Z).unwrap();
        s.set(1, PauliAxis::Z).unwrap();
        s.set(2, PauliAxis::Z).unwrap();
        h3.add_term(1.0, s).unwrap();
        assert!(matches!(trotterize(&h3, 1e-9, 1), Err(Error::UnsupportedTerm(_))));
        let h_empty = PauliHamiltonian::new(2).unwrap();
        assert!(trotterize(&h_empty, 1e-9, 0).is_err());
    }

    #[test]
    fn trotterized_device_slice_runs_on_the_full_register() {
        // The full 9-qubit map must Trotterize without hitting unsupported
        // strings: every term is Z, ZZ, XX, or YY by construction.
        let params = DeviceParams::preset(Preset::Baseline);
        let h = map_to_pauli(&params).unwrap();
        let circuit = trotterize(&h, 1e-9, 2).unwrap();
        assert_eq!(circuit.gates().len(), 2 * h.terms().len());
        assert_eq!(circuit.n_qubits(), REGISTER_SIZE);
    }
}
