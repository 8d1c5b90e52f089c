use std::io::Write;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::{Basis, Level};
use crate::error::{Error, Result};
use crate::gates::GateSpec;

const NORM_TOL: f64 = 1e-6;
const EIGEN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    /// Row-major `dim × dim` density matrix.
    Density,
}

/// A pure state or density matrix over a truncated register basis.
#[derive(Debug, Clone)]
pub struct QuantumState {
    basis: Arc<Basis>,
    kind: StateKind,
    data: Vec<Complex64>,
}

impl QuantumState {
    pub fn pure(basis: Arc<Basis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "{} amplitudes for a basis of {} states",
                amplitudes.len(),
                basis.len()
            )));
        }
        let state = Self {
            basis,
            kind: StateKind::Pure,
            data: amplitudes,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn density(basis: Arc<Basis>, rho: Vec<Complex64>) -> Result<Self> {
        let d = basis.len();
        if rho.len() != d * d {
            return Err(Error::BasisMismatch(format!(
                "density matrix with {} entries for a basis of {d} states",
                rho.len()
            )));
        }
        let state = Self {
            basis,
            kind: StateKind::Density,
            data: rho,
        };
        state.validate()?;
        Ok(state)
    }

    /// Embed amplitudes over the `2^n` computational states (index bit
    /// `n−1−q` is qubit `q`, set meaning `|1⟩`). Normalizes the input.
    pub fn from_computational(basis: Arc<Basis>, amplitudes: &[Complex64]) -> Result<Self> {
        let n = basis.n();
        if amplitudes.len() != 1 << n {
            return Err(Error::BasisMismatch(format!(
                "expected {} computational amplitudes, got {}",
                1usize << n,
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let mut data = vec![Complex64::new(0.0, 0.0); basis.len()];
        for (bits, a) in amplitudes.iter().enumerate() {
            data[basis.computational_index(bits)] = a / norm;
        }
        Self::pure(basis, data)
    }

    /// Even superposition of all computational states.
    pub fn uniform_superposition(basis: Arc<Basis>) -> Result<Self> {
        let n = basis.n();
        Self::from_computational(basis, &vec![Complex64::new(1.0, 0.0); 1 << n])
    }

    /// `(|00…0⟩ + |11…1⟩)/√2`.
    pub fn ghz(basis: Arc<Basis>) -> Result<Self> {
        let n = basis.n();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        amps[(1 << n) - 1] = Complex64::new(1.0, 0.0);
        Self::from_computational(basis, &amps)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Amplitudes (pure) or row-major matrix entries (density).
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub(crate) fn from_parts_unchecked(basis: Arc<Basis>, kind: StateKind, data: Vec<Complex64>) -> Self {
        Self { basis, kind, data }
    }

    /// `|ψ⟩⟨ψ|` for pure states; a clone otherwise.
    pub fn to_density(&self) -> Self {
        match self.kind {
            StateKind::Density => self.clone(),
            StateKind::Pure => {
                let d = self.dim();
                let mut rho = vec![Complex64::new(0.0, 0.0); d * d];
                for r in 0..d {
                    for c in 0..d {
                        rho[r * d + c] = self.data[r] * self.data[c].conj();
                    }
                }
                Self::from_parts_unchecked(self.basis.clone(), StateKind::Density, rho)
            }
        }
    }

    /// `‖ψ‖²` or `Tr ρ`.
    pub fn trace(&self) -> f64 {
        match self.kind {
            StateKind::Pure => self.data.iter().map(|a| a.norm_sqr()).sum(),
            StateKind::Density => {
                let d = self.dim();
                (0..d).map(|i| self.data[i * d + i].re).sum()
            }
        }
    }

    pub fn population(&self, i: usize) -> f64 {
        match self.kind {
            StateKind::Pure => self.data[i].norm_sqr(),
            StateKind::Density => self.data[i * self.dim() + i].re,
        }
    }

    /// Norm/trace within 10⁻⁶; density matrices Hermitian with eigenvalues
    /// no lower than −10⁻⁸.
    pub fn validate(&self) -> Result<()> {
        if self.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm/trace {tr} differs from 1")));
        }
        if self.kind == StateKind::Density {
            let d = self.dim();
            let m = DMatrix::from_row_slice(d, d, &self.data);
            let herm = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if herm > 1e-10 {
                return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
            }
            let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
            let min = sym
                .symmetric_eigenvalues()
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if min < -EIGEN_TOL {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(())
    }

    /// Write `label,re,im` rows (pure) or `row,col,re,im` rows (density).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match self.kind {
            StateKind::Pure => {
                w.write_record(["label", "re", "im"])?;
                for (i, a) in self.data.iter().enumerate() {
                    w.write_record([self.basis.label(i), a.re.to_string(), a.im.to_string()])?;
                }
            }
            StateKind::Density => {
                w.write_record(["row", "col", "re", "im"])?;
                let d = self.dim();
                for r in 0..d {
                    for c in 0..d {
                        let z = self.data[r * d + c];
                        w.write_record([
                            self.basis.label(r),
                            self.basis.label(c),
                            z.re.to_string(),
                            z.im.to_string(),
                        ])?;
                    }
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// `|D₁…D_n⟩` embedded in the register basis.
fn dark_vector(basis: &Basis, spec: &GateSpec) -> Vec<Complex64> {
    let darks: Vec<_> = (0..spec.n()).map(|q| spec.dark_state(q)).collect();
    basis
        .states()
        .map(|levels| {
            levels
                .iter()
                .zip(&darks)
                .map(|(l, d)| match l {
                    Level::Zero => d[0],
                    Level::One => d[1],
                    Level::Excited => Complex64::new(0.0, 0.0),
                })
                .product()
        })
        .collect()
}

/// `ε = 1 − ⟨Ψ_t|ρ_f|Ψ_t⟩` where `Ψ_t` is `psi0` with `e^{iθ}` applied to its
/// `|D₁…D_n⟩` component. For a pure final state the global phase is
/// discounted: `ε = 1 − |⟨Ψ_t|ψ_f⟩|²`.
pub fn gate_error(final_state: &QuantumState, psi0: &QuantumState, spec: &GateSpec, theta: f64) -> Result<f64> {
    if !Arc::ptr_eq(&final_state.basis, &psi0.basis) && *final_state.basis != *psi0.basis {
        return Err(Error::BasisMismatch(
            "final and initial states use different bases".into(),
        ));
    }
    if psi0.kind != StateKind::Pure {
        return Err(Error::InvalidState(
            "the initial state must be pure to define a target".into(),
        ));
    }
    if spec.n() != psi0.basis.n() {
        return Err(Error::BasisMismatch("gate spec size differs from the register".into()));
    }
    let dark = dark_vector(&psi0.basis, spec);
    let overlap: Complex64 = dark.iter().zip(&psi0.data).map(|(d, a)| d.conj() * a).sum();
    let kick = (Complex64::from_polar(1.0, theta) - 1.0) * overlap;
    let target: Vec<Complex64> = psi0.data.iter().zip(&dark).map(|(a, d)| a + kick * d).collect();

    let fidelity = match final_state.kind {
        StateKind::Pure => target
            .iter()
            .zip(&final_state.data)
            .map(|(t, f)| t.conj() * f)
            .sum::<Complex64>()
            .norm_sqr(),
        StateKind::Density => {
            let d = final_state.dim();
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..d {
                let mut row = Complex64::new(0.0, 0.0);
                for c in 0..d {
                    row += final_state.data[r * d + c] * target[c];
                }
                acc += target[r].conj() * row;
            }
            acc.re
        }
    };
    Ok((1.0 - fidelity).clamp(0.0, 1.0))
}
