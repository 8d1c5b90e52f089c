//! Two-level transfer error of the two-pulse sequence against drive scale.
//!
//! Below `μβ/Ω0 = 1` the passage is no longer adiabatic and the error grows.

use std::f64::consts::PI;

use blockade_gate::dynamics::{two_level_transfer, Propagator};
use blockade_gate::integrator::IntegratorOptions;
use blockade_gate::pulse::{pulse_area_lambda, SechypParams};

fn main() -> blockade_gate::Result<()> {
    let p = SechypParams::default_family();
    let prop = Propagator::Adaptive(IntegratorOptions::with_tol(1e-10));
    println!("t_g = {:.3}, Lambda = {:.4}", p.t_cutoff, pulse_area_lambda(&p));
    println!("{:>6} {:>14} {:>10}", "scale", "1 - |T|^2", "arg T / pi");
    for scale in [0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0] {
        let t = two_level_transfer(&p, scale, PI, &prop)?;
        println!("{scale:>6} {:>14.3e} {:>10.5}", 1.0 - t.norm_sqr(), t.arg() / PI);
    }
    Ok(())
}
