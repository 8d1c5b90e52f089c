use super::basis::Truncation;
use super::hamiltonian::Hamiltonian;
use super::state::{QuantumState, StateKind};
use super::{run_protocol, Propagator};
use crate::error::{Error, Result};
use crate::gates::GateSpec;
use crate::pulse::SechypParams;
use crate::register::RegisterConfig;

/// Evolve a pure register state through both pulses in the full truncated
/// basis of `psi0`.
pub fn evolve_schrodinger(
    cfg: &RegisterConfig,
    spec: &GateSpec,
    p: &SechypParams,
    theta: f64,
    psi0: &QuantumState,
    prop: &Propagator,
) -> Result<QuantumState> {
    if psi0.kind() != StateKind::Pure {
        return Err(Error::InvalidState("Schrödinger evolution needs a pure state".into()));
    }
    let expected = Truncation::for_register(cfg)?;
    if psi0.basis().truncation() != expected {
        return Err(Error::config(format!(
            "basis keeps {} excitation(s) but the shifts require {}",
            psi0.basis().truncation().max_excitations(),
            expected.max_excitations()
        )));
    }
    let h = Hamiltonian::new(cfg, spec, psi0.basis())?;
    let y = run_protocol(p, theta, h.diagonal(), psi0.data().to_vec(), prop, |omega, y, dy| {
        h.drive_rhs(omega, y, dy)
    })?;
    Ok(QuantumState::from_parts_unchecked(
        psi0.basis().clone(),
        StateKind::Pure,
        y,
    ))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use num_complex::Complex64;

    use super::super::basis::Basis;
    use super::super::ladder::{reduced_amplitudes, uniform_superposition_error};
    use super::super::state::gate_error;
    use super::*;
    use crate::integrator::IntegratorOptions;
    use crate::register::ShiftMatrix;

    fn prop() -> Propagator {
        Propagator::Adaptive(IntegratorOptions::default())
    }

    #[test]
    fn all_dark_state_is_untouched() {
        let cfg = RegisterConfig::uniform(3, 40.0, f64::INFINITY).unwrap();
        let spec = GateSpec::phase_on_ones(3, PI);
        let basis = Arc::new(Basis::new(3, Truncation::Double).unwrap());
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[7] = Complex64::new(1.0, 0.0);
        let psi0 = QuantumState::from_computational(basis, &amps).unwrap();
        let p = SechypParams::default_family();
        let fin = evolve_schrodinger(&cfg, &spec, &p, PI, &psi0, &prop()).unwrap();
        assert!(gate_error(&fin, &psi0, &spec, PI).unwrap() < 1e-10);
    }

    #[test]
    fn two_qubit_controlled_z() {
        let cfg = RegisterConfig::new(ShiftMatrix::infinite(2), f64::INFINITY, 1.0).unwrap();
        let spec = GateSpec::phase_on_ones(2, PI);
        let basis = Arc::new(Basis::new(2, Truncation::Single).unwrap());
        let psi0 = QuantumState::uniform_superposition(basis).unwrap();
        let p = SechypParams::default_family();
        let fin = evolve_schrodinger(&cfg, &spec, &p, PI, &psi0, &prop()).unwrap();
        assert!((fin.trace() - 1.0).abs() < 1e-9);
        assert!(gate_error(&fin, &psi0, &spec, PI).unwrap() < 1e-3);
    }

    #[test]
    fn full_matches_reduced_for_uniform_shifts() {
        let p = SechypParams::default_family();
        for n in [2, 3] {
            let cfg = RegisterConfig::uniform(n, 30.0, f64::INFINITY).unwrap();
            let spec = GateSpec::phase_on_ones(n, PI);
            let basis = Arc::new(Basis::new(n, Truncation::Double).unwrap());
            let psi0 = QuantumState::uniform_superposition(basis).unwrap();
            let fin = evolve_schrodinger(&cfg, &spec, &p, PI, &psi0, &prop()).unwrap();
            let full = gate_error(&fin, &psi0, &spec, PI).unwrap();
            let amps = reduced_amplitudes(n, &p, 30.0, PI, &prop()).unwrap();
            let reduced = uniform_superposition_error(n, &amps).unwrap();
            assert!((full - reduced).abs() < 1e-6, "n = {n}: {full} vs {reduced}");
        }
    }

    #[test]
    fn wrong_truncation_rejected() {
        let cfg = RegisterConfig::uniform(2, 30.0, f64::INFINITY).unwrap();
        let spec = GateSpec::phase_on_ones(2, PI);
        let basis = Arc::new(Basis::new(2, Truncation::Single).unwrap());
        let psi0 = QuantumState::uniform_superposition(basis).unwrap();
        let p = SechypParams::default_family();
        assert!(evolve_schrodinger(&cfg, &spec, &p, PI, &psi0, &prop()).is_err());
    }
}
