//! Three-level symmetric ladder against the full register, uniform shifts.

use std::f64::consts::PI;
use std::sync::Arc;

use blockade_gate::dynamics::{
    evolve_schrodinger, gate_error, reduced_amplitudes, uniform_superposition_error, Basis, Propagator, QuantumState,
    Truncation,
};
use blockade_gate::gates::GateSpec;
use blockade_gate::integrator::IntegratorOptions;
use blockade_gate::pulse::SechypParams;
use blockade_gate::register::RegisterConfig;

fn main() -> blockade_gate::Result<()> {
    let p = SechypParams::default_family();
    let prop = Propagator::Adaptive(IntegratorOptions::with_tol(1e-10));
    let shift = 40.0;
    let amps = reduced_amplitudes(4, &p, shift, PI, &prop)?;
    for n in 2..=4 {
        let cfg = RegisterConfig::uniform(n, shift, f64::INFINITY)?;
        let basis = Arc::new(Basis::new(n, Truncation::for_register(&cfg)?)?);
        let psi0 = QuantumState::uniform_superposition(basis.clone())?;
        let spec = GateSpec::phase_on_ones(n, PI);
        let fin = evolve_schrodinger(&cfg, &spec, &p, PI, &psi0, &prop)?;
        let full = gate_error(&fin, &psi0, &spec, PI)?;
        let reduced = uniform_superposition_error(n, &amps)?;
        println!(
            "n = {n}: dim {:>3}  full {full:.10e}  ladder {reduced:.10e}",
            basis.len()
        );
    }
    Ok(())
}
