//! Gate error under excited-state dephasing: master equation in the full
//! basis against the sector-block solver.

use std::f64::consts::PI;
use std::sync::Arc;

use blockade_gate::dynamics::{evolve_lindblad, gate_error, uniform_dephasing_error, Basis, QuantumState, Truncation};
use blockade_gate::gates::GateSpec;
use blockade_gate::integrator::IntegratorOptions;
use blockade_gate::pulse::SechypParams;
use blockade_gate::register::{RegisterConfig, ShiftMatrix};

fn main() -> blockade_gate::Result<()> {
    let p = SechypParams::default_family();
    let opts = IntegratorOptions::with_tol(1e-10);
    for t2 in [1e3, 1e4] {
        for n in [2, 3] {
            let cfg = RegisterConfig::new(ShiftMatrix::infinite(n), t2, 1.0)?;
            let basis = Arc::new(Basis::new(n, Truncation::Single)?);
            let psi0 = QuantumState::uniform_superposition(basis)?;
            let spec = GateSpec::phase_on_ones(n, PI);
            let rho = evolve_lindblad(&cfg, &spec, &p, PI, &psi0, &opts)?;
            let full = gate_error(&rho, &psi0, &spec, PI)?;
            let blocks = uniform_dephasing_error(n, &p, PI, t2, &opts)?;
            println!("Omega0 T2 = {t2:.0e}, n = {n}: master eq. {full:.8e}, sector blocks {blocks:.8e}");
        }
    }
    Ok(())
}
