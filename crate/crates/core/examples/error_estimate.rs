//! Closed-form error estimate against the ladder simulation as the register
//! grows, with and without dephasing.

use std::f64::consts::PI;

use blockade_gate::dynamics::{reduced_amplitudes, uniform_superposition_error, Propagator};
use blockade_gate::errmodel::{estimate_uniform, transfer_factors, InitialStateSpec};
use blockade_gate::integrator::IntegratorOptions;
use blockade_gate::pulse::SechypParams;
use blockade_gate::register::RegisterConfig;

fn main() -> blockade_gate::Result<()> {
    let p = SechypParams::default_family();
    let prop = Propagator::Adaptive(IntegratorOptions::with_tol(1e-10));
    let shift = 60.0;
    let transfer = transfer_factors(40, &p, PI, &prop)?;
    let amps = reduced_amplitudes(40, &p, shift, PI, &prop)?;
    println!(
        "{:>3} {:>12} {:>12} {:>12} {:>12}",
        "n", "sim", "estimate", "T2=1e4", "GHZ"
    );
    for n in [2, 5, 10, 20, 40] {
        let sim = uniform_superposition_error(n, &amps)?;
        let coherent = RegisterConfig::uniform(n, shift, f64::INFINITY)?;
        let noisy = RegisterConfig::uniform(n, shift, 1e4)?;
        let est = estimate_uniform(&coherent, &p, &InitialStateSpec::Uniform, &transfer)?;
        let deph = estimate_uniform(&noisy, &p, &InitialStateSpec::Uniform, &transfer)?;
        let ghz = estimate_uniform(&coherent, &p, &InitialStateSpec::Ghz, &transfer)?;
        println!(
            "{n:>3} {sim:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            est.epsilon_total, deph.epsilon_total, ghz.epsilon_total
        );
    }
    Ok(())
}
