use num_complex::Complex64;
use rayon::prelude::*;

use super::{run_protocol, Propagator};
use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::pulse::SechypParams;

/// Final amplitudes of the symmetric ladder `|Ψ(n0)⟩ → |B_e⟩ → |B_ee⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedLadderState {
    pub n0: usize,
    pub psi: Complex64,
    pub be: Complex64,
    /// Zero when the shift is infinite (level removed).
    pub bee: Complex64,
}

impl ReducedLadderState {
    pub fn norm_sqr(&self) -> f64 {
        self.psi.norm_sqr() + self.be.norm_sqr() + self.bee.norm_sqr()
    }

    /// `A_sim(n0) = c_Ψ e^{iθ}`: the ground amplitude relative to the ideal
    /// outcome.
    pub fn transfer_amplitude(&self, theta: f64) -> Complex64 {
        self.psi * Complex64::from_polar(1.0, theta)
    }
}

/// `T = c_g e^{iθ}` for a two-level system driven by `scale·Ω(t)` through
/// both pulses, starting in the ground state.
pub fn two_level_transfer(p: &SechypParams, scale: f64, theta: f64, prop: &Propagator) -> Result<Complex64> {
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::domain(format!("drive scale must be nonnegative, got {scale}")));
    }
    let y0 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let mi = Complex64::new(0.0, -1.0);
    let y = run_protocol(p, theta, &[0.0, 0.0], y0, prop, |omega, y, dy| {
        let w = omega * (0.5 * scale);
        dy[0] = mi * w.conj() * y[1];
        dy[1] = mi * w * y[0];
    })?;
    Ok(y[0] * Complex64::from_polar(1.0, theta))
}

/// Evolve the three-level ladder for a ground state with `n0` driven qubits
/// and uniform pair shift `delta_omega` (may be infinite).
pub fn evolve_reduced(
    n0: usize,
    p: &SechypParams,
    delta_omega: f64,
    theta: f64,
    prop: &Propagator,
) -> Result<ReducedLadderState> {
    if n0 == 0 {
        return Err(Error::domain("ladder needs n0 ≥ 1"));
    }
    if delta_omega == 0.0 || delta_omega.is_nan() {
        return Err(Error::domain("pair shift must be nonzero"));
    }
    let g1 = (n0 as f64).sqrt() * 0.5;
    let g2 = (2.0 * (n0 as f64 - 1.0)).sqrt() * 0.5;
    let mi = Complex64::new(0.0, -1.0);
    let zero = Complex64::new(0.0, 0.0);
    if delta_omega.is_infinite() || n0 == 1 {
        let y = run_protocol(
            p,
            theta,
            &[0.0, 0.0],
            vec![Complex64::new(1.0, 0.0), zero],
            prop,
            |omega, y, dy| {
                dy[0] = mi * (omega * g1).conj() * y[1];
                dy[1] = mi * omega * g1 * y[0];
            },
        )?;
        return Ok(ReducedLadderState {
            n0,
            psi: y[0],
            be: y[1],
            bee: zero,
        });
    }
    let y = run_protocol(
        p,
        theta,
        &[0.0, 0.0, delta_omega],
        vec![Complex64::new(1.0, 0.0), zero, zero],
        prop,
        |omega, y, dy| {
            let a = omega * g1;
            let b = omega * g2;
            dy[0] = mi * a.conj() * y[1];
            dy[1] = mi * (a * y[0] + b.conj() * y[2]);
            dy[2] = mi * b * y[1];
        },
    )?;
    Ok(ReducedLadderState {
        n0,
        psi: y[0],
        be: y[1],
        bee: y[2],
    })
}

/// `A_sim(n0)` for `n0 = 1..=n_max`, computed in parallel.
pub fn reduced_amplitudes(
    n_max: usize,
    p: &SechypParams,
    delta_omega: f64,
    theta: f64,
    prop: &Propagator,
) -> Result<Vec<Complex64>> {
    (1..=n_max)
        .into_par_iter()
        .map(|n0| Ok(evolve_reduced(n0, p, delta_omega, theta, prop)?.transfer_amplitude(theta)))
        .collect()
}

/// Error of the even superposition given per-sector amplitudes
/// `amps[n0 − 1] = A_sim(n0)`:
/// `ε = 1 − 4^{−n}|1 + Σ C(n, n0) A_sim(n0)|²`.
pub fn uniform_superposition_error(n: usize, amps: &[Complex64]) -> Result<f64> {
    if amps.len() < n {
        return Err(Error::domain(format!("need {n} sector amplitudes, got {}", amps.len())));
    }
    let scale = 0.5f64.powi(n as i32);
    let mut sum = Complex64::new(scale, 0.0);
    for n0 in 1..=n {
        sum += amps[n0 - 1] * (binomial(n, n0) * scale);
    }
    Ok((1.0 - sum.norm_sqr()).clamp(0.0, 1.0))
}
