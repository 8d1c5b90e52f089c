use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::{Basis, Level, Truncation};
use super::hamiltonian::Hamiltonian;
use super::pulse_pair;
use super::state::{QuantumState, StateKind};
use crate::combinatorics::ln_binomial;
use crate::error::{Error, Result};
use crate::gates::GateSpec;
use crate::integrator::{integrate, IntegratorOptions};
use crate::pulse::SechypParams;
use crate::register::RegisterConfig;

/// Decay rates of `ρ_ab` from the per-qubit operators
/// `C = (|e⟩⟨e| − |0⟩⟨0| − |1⟩⟨1|)/√(2T2)`.
///
/// Each `C` is diagonal with entries `±1/√(2T2)`, so the dissipator acts
/// elementwise: `ρ_ab` decays at `(number of qubits excited in exactly one
/// of a, b) / T2`. Returned row-major.
pub fn dephasing_rates(basis: &Basis, t2: f64) -> Vec<f64> {
    let d = basis.len();
    let masks: Vec<u64> = basis
        .states()
        .map(|levels| {
            levels
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == Level::Excited)
                .fold(0u64, |m, (q, _)| m | 1 << q)
        })
        .collect();
    let gamma = if t2.is_infinite() { 0.0 } else { 1.0 / t2 };
    let mut rates = vec![0.0; d * d];
    for a in 0..d {
        for b in 0..d {
            rates[a * d + b] = (masks[a] ^ masks[b]).count_ones() as f64 * gamma;
        }
    }
    rates
}

struct LindbladRhs<'a> {
    h: &'a Hamiltonian,
    rates: Vec<f64>,
    dim: usize,
    scratch: Vec<Complex64>,
}

impl LindbladRhs<'_> {
    fn eval(&mut self, omega: Complex64, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        self.h.apply_left(omega, rho, &mut self.scratch);
        let m = &self.scratch;
        let mi = Complex64::new(0.0, -1.0);
        for r in 0..d {
            for c in 0..d {
                let i = r * d + c;
                // −i(Hρ − ρH) with ρH = (Hρ)†
                out[i] = mi * (m[i] - m[c * d + r].conj()) - rho[i] * self.rates[i];
            }
        }
    }
}

fn density_input(rho0: &QuantumState) -> Result<QuantumState> {
    let rho = rho0.to_density();
    rho.validate()?;
    Ok(rho)
}

/// Evolve a density matrix (a pure input is converted) through both pulses
/// under the master equation with excited-state dephasing.
pub fn evolve_lindblad(
    cfg: &RegisterConfig,
    spec: &GateSpec,
    p: &SechypParams,
    theta: f64,
    rho0: &QuantumState,
    opts: &IntegratorOptions,
) -> Result<QuantumState> {
    let rho0 = density_input(rho0)?;
    let expected = Truncation::for_register(cfg)?;
    if rho0.basis().truncation() != expected {
        return Err(Error::config("basis truncation does not match the shifts"));
    }
    let h = Hamiltonian::new(cfg, spec, rho0.basis())?;
    let d = h.dim();
    let mut rhs = LindbladRhs {
        h: &h,
        rates: dephasing_rates(rho0.basis(), cfg.t2),
        dim: d,
        scratch: vec![Complex64::new(0.0, 0.0); d * d],
    };
    let mut y = rho0.data().to_vec();
    for params in pulse_pair(p, theta) {
        y = integrate(
            |t, y, dy| rhs.eval(params.envelope_clamped(t), y, dy),
            &y,
            0.0,
            params.t_cutoff,
            opts,
        )?;
    }
    Ok(QuantumState::from_parts_unchecked(
        rho0.basis().clone(),
        StateKind::Density,
        y,
    ))
}

/// Undriven evolution (`Ω ≡ 0`) for `duration`: pure dephasing plus the
/// static shifts.
pub fn evolve_lindblad_free(
    cfg: &RegisterConfig,
    rho0: &QuantumState,
    duration: f64,
    opts: &IntegratorOptions,
) -> Result<QuantumState> {
    let rho0 = density_input(rho0)?;
    let spec = GateSpec::phase_on_ones(cfg.n, 0.0);
    let h = Hamiltonian::new(cfg, &spec, rho0.basis())?;
    let d = h.dim();
    let mut rhs = LindbladRhs {
        h: &h,
        rates: dephasing_rates(rho0.basis(), cfg.t2),
        dim: d,
        scratch: vec![Complex64::new(0.0, 0.0); d * d],
    };
    let zero = Complex64::new(0.0, 0.0);
    let y = integrate(|_, y, dy| rhs.eval(zero, y, dy), rho0.data(), 0.0, duration, opts)?;
    Ok(QuantumState::from_parts_unchecked(
        rho0.basis().clone(),
        StateKind::Density,
        y,
    ))
}

/// One block `|Z-sector⟩⟨Z'-sector|` of the density matrix, for the base
/// protocol with infinite shifts. Row index 0 is the ground state, row `i`
/// the state with qubit `i − 1` of `Z` excited; likewise for columns.
struct SectorPairBlock {
    rows: usize,
    cols: usize,
    rates: Vec<f64>,
}

impl SectorPairBlock {
    /// `Z = {0..n0}`, `Z' = {0..k} ∪ {n0..n0+m0−k}`.
    fn new(n0: usize, m0: usize, k: usize, t2: f64) -> Self {
        let gamma = if t2.is_infinite() { 0.0 } else { 1.0 / t2 };
        let col_qubit = |j: usize| if j < k { j } else { n0 + (j - k) };
        let (rows, cols) = (n0 + 1, m0 + 1);
        let mut rates = vec![0.0; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                let differing = match (r, c) {
                    (0, 0) => 0.0,
                    (0, _) | (_, 0) => 1.0,
                    (r, c) => {
                        if r - 1 == col_qubit(c - 1) {
                            0.0
                        } else {
                            2.0
                        }
                    }
                };
                rates[r * cols + c] = differing * gamma;
            }
        }
        Self { rows, cols, rates }
    }

    fn eval(&self, omega: Complex64, x: &[Complex64], out: &mut [Complex64]) {
        let (rows, cols) = (self.rows, self.cols);
        let half = omega * 0.5;
        let half_c = omega.conj() * 0.5;
        let mi = Complex64::new(0.0, -1.0);
        // column sums over excited rows and row sums over excited columns
        for r in 0..rows {
            for c in 0..cols {
                // (H_Z X)_{rc}
                let hx = if r == 0 {
                    half_c * (1..rows).map(|q| x[q * cols + c]).sum::<Complex64>()
                } else {
                    half * x[c]
                };
                // (X H_Z')_{rc}
                let xh = if c == 0 {
                    half * (1..cols).map(|p| x[r * cols + p]).sum::<Complex64>()
                } else {
                    half_c * x[r * cols]
                };
                let i = r * cols + c;
                out[i] = mi * (hx - xh) - x[i] * self.rates[i];
            }
        }
    }
}

/// Gate error of the even superposition under the base protocol with
/// infinite shifts and excited-state dephasing, from the exact decomposition
/// of the one-excitation master equation into sector-pair blocks.
///
/// Dephasing acts elementwise and the drive never mixes ground states, so
/// the block between the sectors of driven sets `Z` and `Z'` evolves on its
/// own and depends only on `(|Z|, |Z'|, |Z ∩ Z'|)`.
pub fn uniform_dephasing_error(
    n: usize,
    p: &SechypParams,
    theta: f64,
    t2: f64,
    opts: &IntegratorOptions,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("need at least one qubit"));
    }
    if !(t2 > 0.0) {
        return Err(Error::domain("T2 must be positive"));
    }
    let mut triples = Vec::new();
    for n0 in 0..=n {
        for m0 in n0..=n {
            let k_lo = (n0 + m0).saturating_sub(n);
            for k in k_lo..=n0.min(m0) {
                triples.push((n0, m0, k));
            }
        }
    }
    let terms: Vec<f64> = triples
        .par_iter()
        .map(|&(n0, m0, k)| -> Result<f64> {
            let block = SectorPairBlock::new(n0, m0, k, t2);
            let mut x = vec![Complex64::new(0.0, 0.0); block.rows * block.cols];
            x[0] = Complex64::new(1.0, 0.0);
            for params in pulse_pair(p, theta) {
                x = integrate(
                    |t, y, dy| block.eval(params.envelope_clamped(t), y, dy),
                    &x,
                    0.0,
                    params.t_cutoff,
                    opts,
                )?;
            }
            let t_of = |s: usize| {
                if s == 0 {
                    Complex64::from_polar(1.0, theta)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            };
            let value = t_of(n0).conj() * x[0] * t_of(m0);
            let ln_w = ln_binomial(n, n0) + ln_binomial(n0, k) + ln_binomial(n - n0, m0 - k)
                - 2.0 * n as f64 * std::f64::consts::LN_2;
            let mult = if n0 == m0 { 1.0 } else { 2.0 };
            Ok(mult * ln_w.exp() * value.re)
        })
        .collect::<Result<_>>()?;
    let mut acc = crate::combinatorics::CompensatedSum::default();
    for t in terms {
        acc.add(t);
    }
    Ok((1.0 - acc.value()).clamp(0.0, 1.0))
}
