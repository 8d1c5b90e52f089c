use num_complex::Complex64;
use rayon::prelude::*;

use super::{run_protocol, Propagator};
use crate::error::{Error, Result};
use crate::gates::GateSpec;
use crate::pulse::SechypParams;
use crate::register::{RegisterConfig, ShiftMatrix};

/// Hamiltonian of one driven subset: the ground state, one singly excited
/// state per driven qubit, and (for finite shifts) one doubly excited state
/// per driven pair, with the pair shift on its diagonal.
///
/// In the bright/dark basis the register Hamiltonian is block diagonal with
/// one such block per set of bright qubits, so these blocks reproduce the
/// full truncated evolution exactly.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    n0: usize,
    /// `(q, p)` for each doubly excited state, lexicographic.
    pairs: Vec<(usize, usize)>,
    diag: Vec<f64>,
}

impl SectorHamiltonian {
    /// `shifts` restricted to the driven qubits.
    pub fn new(shifts: &ShiftMatrix) -> Result<Self> {
        let n0 = shifts.n();
        let mut pairs = Vec::new();
        let mut diag = vec![0.0; 1 + n0];
        if n0 >= 2 {
            if shifts.all_infinite() {
                // one-excitation sector
            } else if shifts.any_infinite() {
                return Err(Error::config("mixed finite and infinite shifts within a driven subset"));
            } else {
                for q in 0..n0 {
                    for p in q + 1..n0 {
                        pairs.push((q, p));
                        diag.push(shifts.get(q, p));
                    }
                }
            }
        }
        Ok(Self { n0, pairs, diag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `dy = −i H_drive y`.
    fn drive(&self, omega: Complex64, y: &[Complex64], dy: &mut [Complex64]) {
        let mi = Complex64::new(0.0, -1.0);
        let up = omega * 0.5 * mi;
        let down = omega.conj() * 0.5 * mi;
        let n0 = self.n0;
        let mut sum_singles = Complex64::new(0.0, 0.0);
        for q in 0..n0 {
            sum_singles += y[1 + q];
            dy[1 + q] = up * y[0];
        }
        dy[0] = down * sum_singles;
        for (k, &(q, p)) in self.pairs.iter().enumerate() {
            let d = 1 + n0 + k;
            dy[d] = up * (y[1 + q] + y[1 + p]);
            let back = down * y[d];
            dy[1 + q] += back;
            dy[1 + p] += back;
        }
    }
}

/// `A_sim = c_g e^{iθ}` for one driven subset with the given restricted
/// shift matrix.
pub fn sector_amplitude(shifts: &ShiftMatrix, p: &SechypParams, theta: f64, prop: &Propagator) -> Result<Complex64> {
    let h = SectorHamiltonian::new(shifts)?;
    let mut y0 = vec![Complex64::new(0.0, 0.0); h.dim()];
    y0[0] = Complex64::new(1.0, 0.0);
    let y = run_protocol(p, theta, &h.diag, y0, prop, |omega, y, dy| h.drive(omega, y, dy))?;
    Ok(y[0] * Complex64::from_polar(1.0, theta))
}

fn subset_members(n: usize, mask: usize) -> Vec<usize> {
    (0..n).filter(|&q| (mask >> (n - 1 - q)) & 1 == 1).collect()
}

/// Relative ground amplitudes `r_Z` for every driven subset `Z`, indexed by
/// mask (bit `n−1−q` set when qubit `q` is driven). `r_∅ = 1`; otherwise
/// `r_Z = A_sim(Z)`.
pub fn subset_amplitudes(
    cfg: &RegisterConfig,
    p: &SechypParams,
    theta: f64,
    prop: &Propagator,
) -> Result<Vec<Complex64>> {
    let n = cfg.n;
    if n > 20 {
        return Err(Error::domain(format!("2^{n} subsets is too many to simulate")));
    }
    (0..1usize << n)
        .into_par_iter()
        .map(|mask| {
            if mask == 0 {
                return Ok(Complex64::new(1.0, 0.0));
            }
            let members = subset_members(n, mask);
            sector_amplitude(&cfg.shifts.restricted(&members), p, theta, prop)
        })
        .collect()
}

/// `ε = 1 − |Σ_Z w_Z r_Z|²` for weights `w_Z = |⟨Z|ψ0⟩|²` in the
/// bright/dark product basis.
pub fn gate_error_from_subsets(amps: &[Complex64], weights: &[f64]) -> Result<f64> {
    if amps.len() != weights.len() {
        return Err(Error::domain("amplitude and weight tables differ in length"));
    }
    let s: Complex64 = amps.iter().zip(weights).map(|(a, w)| a * *w).sum();
    Ok((1.0 - s.norm_sqr()).clamp(0.0, 1.0))
}

/// Populations of `psi0` (given over the `2^n` computational states) in the
/// bright/dark product basis of `spec`, indexed by driven-subset mask.
pub fn dark_bright_weights(spec: &GateSpec, psi0: &[Complex64]) -> Result<Vec<f64>> {
    let n = spec.n();
    if psi0.len() != 1 << n {
        return Err(Error::BasisMismatch(format!(
            "expected {} computational amplitudes, got {}",
            1usize << n,
            psi0.len()
        )));
    }
    let norm: f64 = psi0.iter().map(|a| a.norm_sqr()).sum();
    if !(norm > 0.0) {
        return Err(Error::InvalidState("zero state vector".into()));
    }
    let mut v: Vec<Complex64> = psi0.iter().map(|a| a / norm.sqrt()).collect();
    for q in 0..n {
        let (b, d) = crate::gates::bright_dark(spec.eta[q], spec.gamma[q]);
        // new bit 1 ↔ bright, bit 0 ↔ dark
        let bit = 1 << (n - 1 - q);
        for i in 0..v.len() {
            if i & bit != 0 {
                continue;
            }
            let (a0, a1) = (v[i], v[i | bit]);
            v[i] = d[0].conj() * a0 + d[1].conj() * a1;
            v[i | bit] = b[0].conj() * a0 + b[1].conj() * a1;
        }
    }
    Ok(v.iter().map(|a| a.norm_sqr()).collect())
}
