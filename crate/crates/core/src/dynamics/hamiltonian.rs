use num_complex::Complex64;

use super::basis::{excitation_count, Basis, Level};
use crate::error::{Error, Result};
use crate::gates::GateSpec;
use crate::register::RegisterConfig;

/// Matrix-free Hamiltonian of the driven register in the rotating frame.
///
/// `H(t) = Σ_q [Ω(t)(w0_q |e⟩⟨0|_q + w1_q |e⟩⟨1|_q)/2 + h.c.] + Σ_{q<p} Δω_qp P^{ee}_{qp}`
/// where `(w0_q, w1_q)` are the drive weights of [`GateSpec`]. Only the
/// shared envelope `Ω(t)` varies in time, so the action is stored as a list
/// of weighted edges plus a static diagonal.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    dim: usize,
    /// Lower (ground-side) endpoint of each drive edge.
    from: Vec<usize>,
    /// Upper (excited-side) endpoint.
    to: Vec<usize>,
    /// `⟨to|H|from⟩ = Ω(t) · weight / 2`.
    weight: Vec<Complex64>,
    diag: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(cfg: &RegisterConfig, spec: &GateSpec, basis: &Basis) -> Result<Self> {
        if spec.n() != cfg.n || basis.n() != cfg.n {
            return Err(Error::BasisMismatch(format!(
                "register has {} qubits, gate spec {}, basis {}",
                cfg.n,
                spec.n(),
                basis.n()
            )));
        }
        let max_exc = basis.truncation().max_excitations();
        if max_exc >= 2 && cfg.shifts.any_infinite() {
            return Err(Error::config(
                "infinite shifts cannot be represented with doubly excited states",
            ));
        }
        if max_exc < 2 && cfg.n >= 2 && !cfg.shifts.all_infinite() {
            return Err(Error::config("finite shifts need doubly excited states (truncation 2)"));
        }
        let weights: Vec<(Complex64, Complex64)> = (0..cfg.n).map(|q| spec.drive_weights(q)).collect();

        let mut from = Vec::new();
        let mut to = Vec::new();
        let mut weight = Vec::new();
        let mut diag = vec![0.0; basis.len()];
        let mut scratch = Vec::with_capacity(cfg.n);
        for (i, levels) in basis.states().enumerate() {
            let excited: Vec<usize> = (0..cfg.n).filter(|&q| levels[q] == Level::Excited).collect();
            for (a, &q) in excited.iter().enumerate() {
                for &p in &excited[a + 1..] {
                    diag[i] += cfg.shifts.get(q, p);
                }
            }
            if excitation_count(levels) >= max_exc {
                continue;
            }
            for q in 0..cfg.n {
                let w = match levels[q] {
                    Level::Zero => weights[q].0,
                    Level::One => weights[q].1,
                    Level::Excited => continue,
                };
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                scratch.clear();
                scratch.extend_from_slice(levels);
                scratch[q] = Level::Excited;
                let j = basis.index_of(&scratch).expect("excited neighbour within truncation");
                from.push(i);
                to.push(j);
                weight.push(w);
            }
        }
        Ok(Self {
            dim: basis.len(),
            from,
            to,
            weight,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn edge_count(&self) -> usize {
        self.from.len()
    }

    /// `out = H x` for envelope value `omega`.
    pub fn apply(&self, omega: Complex64, x: &[Complex64], out: &mut [Complex64]) {
        for i in 0..self.dim {
            out[i] = x[i] * self.diag[i];
        }
        self.apply_drive_add(omega, x, out, Complex64::new(1.0, 0.0));
    }

    /// `out += scale · H_drive x`.
    fn apply_drive_add(&self, omega: Complex64, x: &[Complex64], out: &mut [Complex64], scale: Complex64) {
        let half = omega * 0.5 * scale;
        let half_c = omega.conj() * 0.5 * scale;
        for k in 0..self.from.len() {
            let (i, j, w) = (self.from[k], self.to[k], self.weight[k]);
            out[j] += half * w * x[i];
            out[i] += half_c * w.conj() * x[j];
        }
    }

    /// Schrödinger right-hand side `dy = −i H y`.
    pub fn rhs(&self, omega: Complex64, y: &[Complex64], dy: &mut [Complex64]) {
        let mi = Complex64::new(0.0, -1.0);
        for i in 0..self.dim {
            dy[i] = mi * self.diag[i] * y[i];
        }
        self.apply_drive_add(omega, y, dy, mi);
    }

    /// Drive-only part `dy = −i H_drive y` (the diagonal is left to an
    /// exponential integrator).
    pub fn drive_rhs(&self, omega: Complex64, y: &[Complex64], dy: &mut [Complex64]) {
        dy.fill(Complex64::new(0.0, 0.0));
        self.apply_drive_add(omega, y, dy, Complex64::new(0.0, -1.0));
    }

    /// `out = H ρ` for a row-major `dim × dim` matrix.
    pub fn apply_left(&self, omega: Complex64, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        for i in 0..d {
            let s = self.diag[i];
            for c in 0..d {
                out[i * d + c] = rho[i * d + c] * s;
            }
        }
        let half = omega * 0.5;
        let half_c = omega.conj() * 0.5;
        for k in 0..self.from.len() {
            let (i, j, w) = (self.from[k], self.to[k], self.weight[k]);
            let up = half * w;
            let down = half_c * w.conj();
            for c in 0..d {
                out[j * d + c] += up * rho[i * d + c];
                out[i * d + c] += down * rho[j * d + c];
            }
        }
    }

    /// Dense matrix for diagnostics and small-instance oracles.
    pub fn to_dense(&self, omega: Complex64) -> Vec<Vec<Complex64>> {
        let mut m = vec![vec![Complex64::new(0.0, 0.0); self.dim]; self.dim];
        for i in 0..self.dim {
            m[i][i] = Complex64::new(self.diag[i], 0.0);
        }
        for k in 0..self.from.len() {
            let (i, j, w) = (self.from[k], self.to[k], self.weight[k]);
            m[j][i] += omega * w * 0.5;
            m[i][j] += (omega * w).conj() * 0.5;
        }
        m
    }
}

/// Build the Hamiltonian action for a register and gate spec. The basis
/// truncation follows the shifts: one excitation when all are infinite, two
/// when all are finite.
pub fn build_hamiltonian(cfg: &RegisterConfig, spec: &GateSpec) -> Result<(Basis, Hamiltonian)> {
    let truncation = super::basis::Truncation::for_register(cfg)?;
    let basis = Basis::new(cfg.n, truncation)?;
    let h = Hamiltonian::new(cfg, spec, &basis)?;
    Ok((basis, h))
}

#[cfg(test)]
mod tests {
    use super::super::basis::Truncation;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn single_qubit_block() {
        let cfg = RegisterConfig::new(crate::register::ShiftMatrix::infinite(1), f64::INFINITY, 1.0).unwrap();
        let spec = GateSpec::phase_on_ones(1, PI);
        let (basis, h) = build_hamiltonian(&cfg, &spec).unwrap();
        assert_eq!(basis.len(), 3);
        let omega = Complex64::new(0.3, 0.4);
        let m = h.to_dense(omega);
        // basis 0, 1, e
        assert_eq!(m[2][0], omega * 0.5);
        assert_eq!(m[0][2], omega.conj() * 0.5);
        assert_eq!(m[2][1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn doubly_excited_state_carries_shift() {
        let cfg = RegisterConfig::uniform(2, 30.0, f64::INFINITY).unwrap();
        let spec = GateSpec::phase_on_ones(2, PI);
        let (basis, h) = build_hamiltonian(&cfg, &spec).unwrap();
        let ee = basis.index_of(&[Level::Excited, Level::Excited]).unwrap();
        assert_eq!(h.diagonal()[ee], 30.0);
        let e0 = basis.index_of(&[Level::Excited, Level::Zero]).unwrap();
        assert_eq!(h.diagonal()[e0], 0.0);
        let m = h.to_dense(Complex64::new(1.0, 0.0));
        assert_eq!(m[ee][e0], Complex64::new(0.5, 0.0));
    }

    #[test]
    fn hermitian_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = RegisterConfig::new(
            crate::register::ShiftMatrix::from_pairs(3, &[20.0, -35.0, 50.0]).unwrap(),
            f64::INFINITY,
            1.0,
        )
        .unwrap();
        let spec = GateSpec::new(vec![1.1, 2.0, PI], vec![0.3, -1.0, 0.0], 1.0).unwrap();
        let (basis, h) = build_hamiltonian(&cfg, &spec).unwrap();
        let omega = Complex64::new(0.7, -0.2);
        for _ in 0..10 {
            let x = random_vec(&mut rng, basis.len());
            let y = random_vec(&mut rng, basis.len());
            let mut hx = vec![Complex64::new(0.0, 0.0); basis.len()];
            let mut hy = hx.clone();
            h.apply(omega, &x, &mut hx);
            h.apply(omega, &y, &mut hy);
            let a: Complex64 = x.iter().zip(&hy).map(|(a, b)| a.conj() * b).sum();
            let b: Complex64 = y.iter().zip(&hx).map(|(a, b)| a.conj() * b).sum();
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn truncation_mismatch_rejected() {
        let cfg = RegisterConfig::uniform(2, 30.0, f64::INFINITY).unwrap();
        let spec = GateSpec::phase_on_ones(2, PI);
        let basis = Basis::new(2, Truncation::Single).unwrap();
        assert!(matches!(Hamiltonian::new(&cfg, &spec, &basis), Err(Error::Config(_))));
        let inf = RegisterConfig::new(crate::register::ShiftMatrix::infinite(2), 1.0, 1.0).unwrap();
        let basis = Basis::new(2, Truncation::Double).unwrap();
        assert!(matches!(Hamiltonian::new(&inf, &spec, &basis), Err(Error::Config(_))));
    }

    #[test]
    fn left_action_matches_vector_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cfg = RegisterConfig::uniform(2, 12.0, 1.0).unwrap();
        let spec = GateSpec::new(vec![0.4, PI], vec![0.2, 0.0], 1.0).unwrap();
        let (basis, h) = build_hamiltonian(&cfg, &spec).unwrap();
        let d = basis.len();
        let rho = random_vec(&mut rng, d * d);
        let omega = Complex64::new(0.1, 0.9);
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        h.apply_left(omega, &rho, &mut out);
        for c in 0..d {
            let col: Vec<_> = (0..d).map(|r| rho[r * d + c]).collect();
            let mut hc = vec![Complex64::new(0.0, 0.0); d];
            h.apply(omega, &col, &mut hc);
            for r in 0..d {
                assert!((hc[r] - out[r * d + c]).norm() < 1e-14);
            }
        }
    }
}
