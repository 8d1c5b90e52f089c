//! Gate-parameter synthesis.
//!
//! A [`GateSpec`] describes the operation "phase θ on `|D₁D₂…D_n⟩`", where
//! each qubit's dark state is fixed by the relative amplitude `η_q` and
//! phase `γ_q` of the two drive fields on its `|0⟩↔|e⟩` and `|1⟩↔|e⟩`
//! transitions.
//!
//! Computational-basis matrices use qubit 0 as the most significant bit.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNITARY_TOL: f64 = 1e-10;

/// Per-qubit dark-state parameters plus the conditional phase.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub eta: Vec<f64>,
    /// Drive relative phases γ_q (not the dephasing exponent).
    pub gamma: Vec<f64>,
    pub theta: f64,
}

impl GateSpec {
    pub fn new(eta: Vec<f64>, gamma: Vec<f64>, theta: f64) -> Result<Self> {
        if eta.len() != gamma.len() || eta.is_empty() {
            return Err(Error::config("gate spec needs equal, non-empty eta and gamma lists"));
        }
        Ok(Self { eta, gamma, theta })
    }

    /// The base protocol: only `|0⟩↔|e⟩` driven, phase θ on `|11…1⟩`.
    pub fn phase_on_ones(n: usize, theta: f64) -> Self {
        Self {
            eta: vec![PI; n],
            gamma: vec![0.0; n],
            theta,
        }
    }

    pub fn n(&self) -> usize {
        self.eta.len()
    }

    /// Drive weights `(sin(η/2), cos(η/2) e^{iγ})` for qubit `q`.
    pub fn drive_weights(&self, q: usize) -> (Complex64, Complex64) {
        drive_fields(self.eta[q], self.gamma[q], Complex64::new(1.0, 0.0))
    }

    pub fn dark_state(&self, q: usize) -> Vector2<Complex64> {
        bright_dark(self.eta[q], self.gamma[q]).1
    }

    /// True when every qubit is driven on `|0⟩↔|e⟩` only (dark state ∝ `|1⟩`).
    pub fn is_base_protocol(&self) -> bool {
        self.eta.iter().all(|&e| (e - PI).abs() < 1e-15)
    }
}

/// `(sin(η/2), cos(η/2))` with rounding residue at `η = 0, π` snapped to
/// zero, so the base protocol leaves `|1⟩` exactly uncoupled.
fn half_angle(eta: f64) -> (f64, f64) {
    let (s, c) = (0.5 * eta).sin_cos();
    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    (snap(s), snap(c))
}

/// `(Ω^{0e}, Ω^{1e}) = (Ω sin(η/2), Ω cos(η/2) e^{iγ})`.
pub fn drive_fields(eta: f64, gamma: f64, omega: Complex64) -> (Complex64, Complex64) {
    let (s, c) = half_angle(eta);
    (omega * s, omega * c * Complex64::from_polar(1.0, gamma))
}

/// Bright and dark single-qubit states for drive parameters `(η, γ)`.
pub fn bright_dark(eta: f64, gamma: f64) -> (Vector2<Complex64>, Vector2<Complex64>) {
    let (s, c) = half_angle(eta);
    let ph = Complex64::from_polar(1.0, -gamma);
    let bright = Vector2::new(Complex64::new(s, 0.0), ph * c);
    let dark = Vector2::new(Complex64::new(c, 0.0), -ph * s);
    (bright, dark)
}

/// Recover `(η, γ)` from an arbitrary dark state, fixing the gauge so the
/// `|0⟩` coefficient is real and nonnegative.
pub fn dark_params(dark: &Vector2<Complex64>) -> Result<(f64, f64)> {
    let norm = (dark[0].norm_sqr() + dark[1].norm_sqr()).sqrt();
    if !(norm > 0.0) {
        return Err(Error::domain("dark state has zero norm"));
    }
    let (d0, d1) = (dark[0] / norm, dark[1] / norm);
    let eta = 2.0 * d1.norm().atan2(d0.norm());
    if d1.norm() < 1e-15 {
        return Ok((eta, 0.0));
    }
    // remove the global phase of d0 (if any) before reading γ from d1
    let gauge = if d0.norm() > 1e-15 {
        Complex64::from_polar(1.0, -d0.arg())
    } else {
        Complex64::new(1.0, 0.0)
    };
    let d1 = d1 * gauge;
    // d1 = −sin(η/2) e^{−iγ}
    let gamma = -(-d1).arg();
    Ok((eta, wrap_angle(gamma)))
}

/// Wrap an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Named gate specification.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedGate {
    pub label: String,
    pub spec: GateSpec,
}

/// n-qubit Toffoli: controls are qubits `0..n−1`, the target is qubit `n−1`.
///
/// The target's dark state is `(|0⟩ − |1⟩)/√2`, i.e. `η = π/2`, `γ = 0`, so
/// that a π phase on `|1…1 D⟩` flips the target.
pub fn toffoli_spec(n: usize) -> Result<NamedGate> {
    if n < 2 {
        return Err(Error::domain("Toffoli needs at least two qubits"));
    }
    let mut eta = vec![PI; n];
    let gamma = vec![0.0; n];
    eta[n - 1] = PI / 2.0;
    Ok(NamedGate {
        label: format!("C^{}-X", n - 1),
        spec: GateSpec::new(eta, gamma, PI)?,
    })
}

/// `C^{n−1}-P(θ)`; θ = π, π/2, π/4 give the Z, S and T variants.
pub fn controlled_phase_spec(n: usize, theta: f64) -> Result<NamedGate> {
    if n < 2 {
        return Err(Error::domain("controlled phase needs at least two qubits"));
    }
    let name = [(PI, "Z"), (PI / 2.0, "S"), (PI / 4.0, "T")]
        .iter()
        .find(|(v, _)| (v - theta).abs() < 1e-12)
        .map(|(_, s)| s.to_string())
        .unwrap_or_else(|| format!("P({:.6}π)", theta / PI));
    Ok(NamedGate {
        label: format!("C^{}-{}", n - 1, name),
        spec: GateSpec::phase_on_ones(n, theta),
    })
}

/// `|D₁…D_n⟩` in the computational basis.
pub fn dark_product(spec: &GateSpec) -> DVector<Complex64> {
    product_state(&(0..spec.n()).map(|q| spec.dark_state(q)).collect::<Vec<_>>())
}

pub fn product_state(factors: &[Vector2<Complex64>]) -> DVector<Complex64> {
    let n = factors.len();
    let dim = 1usize << n;
    DVector::from_fn(dim, |i, _| {
        let mut amp = Complex64::new(1.0, 0.0);
        for (q, f) in factors.iter().enumerate() {
            let bit = (i >> (n - 1 - q)) & 1;
            amp *= f[bit];
        }
        amp
    })
}

/// Ideal gate matrix `I + (e^{iθ} − 1)|D⟩⟨D|` in the computational basis.
pub fn ideal_unitary(spec: &GateSpec) -> DMatrix<Complex64> {
    let d = dark_product(spec);
    let dim = d.len();
    let phase = Complex64::from_polar(1.0, spec.theta) - 1.0;
    DMatrix::identity(dim, dim) + &d * d.adjoint() * phase
}

/// A 2×2 unitary acting on `{|0⟩, |1⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitGate {
    pub matrix: Matrix2<Complex64>,
}

/// `U = e^{iα} R_r̂(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationForm {
    pub alpha: f64,
    pub axis: [f64; 3],
    pub theta: f64,
}

fn pauli() -> [Matrix2<Complex64>; 3] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    [
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

impl SingleQubitGate {
    pub fn new(matrix: Matrix2<Complex64>) -> Result<Self> {
        let dev = (matrix.adjoint() * matrix - Matrix2::identity()).norm();
        if !(dev < UNITARY_TOL) {
            return Err(Error::domain(format!("matrix is not unitary (‖U†U − I‖ = {dev:e})")));
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self {
            matrix: Matrix2::identity(),
        }
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            matrix: Matrix2::new(h, h, h, -h),
        }
    }

    /// `e^{iα}(cos(θ/2) I − i sin(θ/2) r̂·σ)`.
    pub fn from_rotation(form: &RotationForm) -> Result<Self> {
        let [x, y, z] = form.axis;
        let norm = (x * x + y * y + z * z).sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("rotation axis not unit (‖r̂‖ = {norm})")));
        }
        let [px, py, pz] = pauli();
        let (s, c) = (0.5 * form.theta).sin_cos();
        let rs = px * Complex64::new(x, 0.0) + py * Complex64::new(y, 0.0) + pz * Complex64::new(z, 0.0);
        let m = (Matrix2::identity() * Complex64::new(c, 0.0) - rs * Complex64::new(0.0, s))
            * Complex64::from_polar(1.0, form.alpha);
        Ok(Self { matrix: m })
    }

    pub fn inverse(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Decompose as `e^{iα} R_r̂(θ)` with `θ ∈ [0, 2π]` and `α ∈ (−π/2, π/2]`.
    pub fn decompose(&self) -> RotationForm {
        let det = self.matrix.determinant();
        let mut alpha = 0.5 * det.arg();
        if alpha <= -PI / 2.0 {
            alpha += PI;
        }
        let v = self.matrix * Complex64::from_polar(1.0, -alpha);
        let a = v[(0, 0)];
        let b = v[(0, 1)];
        let c = a.re.clamp(-1.0, 1.0);
        let theta = 2.0 * c.acos();
        let s = (0.5 * theta).sin();
        if s.abs() < 1e-14 {
            return RotationForm {
                alpha,
                axis: [0.0, 0.0, 1.0],
                theta,
            };
        }
        let axis = [-b.im / s, -b.re / s, -a.im / s];
        RotationForm { alpha, axis, theta }
    }
}

/// The target-qubit operation when all controls are dark:
/// `U′ = e^{iθ}|D⟩⟨D| + |B⟩⟨B| = e^{iθ/2} R_r̂(θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetOperation {
    pub gate: SingleQubitGate,
    pub rotation: RotationForm,
}

pub fn target_unitary(spec: &GateSpec, target: usize) -> Result<TargetOperation> {
    if target >= spec.n() {
        return Err(Error::domain("target index out of range"));
    }
    let (eta, gamma) = (spec.eta[target], spec.gamma[target]);
    let (b, d) = bright_dark(eta, gamma);
    let m = d * d.adjoint() * Complex64::from_polar(1.0, spec.theta) + b * b.adjoint();
    let (s, c) = (0.5 * eta).sin_cos();
    let axis = [2.0 * s * c * gamma.cos(), -2.0 * s * c * gamma.sin(), 2.0 * s * s - 1.0];
    Ok(TargetOperation {
        gate: SingleQubitGate { matrix: m },
        rotation: RotationForm {
            alpha: 0.5 * spec.theta,
            axis,
            theta: spec.theta,
        },
    })
}

/// Parameters realizing `C^{n−1}-e^{iα}R_r̂(θ)` with qubit `n−1` as target.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationPlan {
    pub spec: GateSpec,
    /// `α′ = α − θ/2`, wrapped into `(−π, π]`.
    pub residual_phase: f64,
    /// `α′ ≡ 0 (mod 2π)`: one operation suffices.
    pub single_operation: bool,
    /// When `α′ ≠ 0`: the control-only operation applying `α′` to the
    /// controls' dark product.
    pub residual_operation: Option<GateSpec>,
}

pub fn controlled_rotation_plan(n: usize, axis: [f64; 3], theta: f64, alpha: f64) -> Result<RotationPlan> {
    if n < 2 {
        return Err(Error::domain("controlled rotation needs at least two qubits"));
    }
    let [x, y, z] = axis;
    let norm = (x * x + y * y + z * z).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!("rotation axis not unit (‖r̂‖ = {norm})")));
    }
    // inverse of r_z = 2 sin²(η/2) − 1 = −cos η, (r_x, r_y) = sin η (cos γ, −sin γ)
    let eta_t = (-z).clamp(-1.0, 1.0).acos();
    let gamma_t = if x.hypot(y) < 1e-15 { 0.0 } else { (-y).atan2(x) };
    let mut eta = vec![PI; n];
    let mut gamma = vec![0.0; n];
    eta[n - 1] = eta_t;
    gamma[n - 1] = gamma_t;
    let spec = GateSpec::new(eta, gamma, theta)?;
    let residual = wrap_angle(alpha - 0.5 * theta);
    let single = residual.abs() < 1e-12;
    let residual_operation = (!single).then(|| GateSpec::phase_on_ones(n - 1, residual));
    Ok(RotationPlan {
        spec,
        residual_phase: residual,
        single_operation: single,
        residual_operation,
    })
}

/// Absorb the single-qubit layer `{A_q}` preceding the operation: the new
/// dark states are `A_q^{−1}|D_q⟩`, so that
/// `U_{D′} ∘ A = A ∘ ...` rearranges as `U_D · A = A · U_{D′}`.
pub fn absorb_single_qubit_gates(pre: &[SingleQubitGate], spec: &GateSpec) -> Result<GateSpec> {
    if pre.len() != spec.n() {
        return Err(Error::domain(format!(
            "need one single-qubit gate per qubit ({} given for {} qubits)",
            pre.len(),
            spec.n()
        )));
    }
    let mut eta = Vec::with_capacity(spec.n());
    let mut gamma = Vec::with_capacity(spec.n());
    for (q, a) in pre.iter().enumerate() {
        SingleQubitGate::new(a.matrix)?;
        let d = a.inverse().matrix * spec.dark_state(q);
        let (e, g) = dark_params(&d)?;
        eta.push(e);
        gamma.push(g);
    }
    GateSpec::new(eta, gamma, spec.theta)
}

/// Tensor product of single-qubit gates (qubit 0 most significant).
pub fn layer_matrix(gates: &[SingleQubitGate]) -> DMatrix<Complex64> {
    gates.iter().fold(DMatrix::identity(1, 1), |acc, g| {
        let m = DMatrix::from_fn(2, 2, |r, c| g.matrix[(r, c)]);
        acc.kronecker(&m)
    })
}

/// Gate spec in config/JSON form: angles in units of π.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSpecFile {
    #[serde(default)]
    pub label: Option<String>,
    pub eta_pi: Vec<f64>,
    pub gamma_pi: Vec<f64>,
    pub theta_pi: f64,
}

impl GateSpecFile {
    pub fn from_spec(spec: &GateSpec, label: Option<String>) -> Self {
        Self {
            label,
            eta_pi: spec.eta.iter().map(|v| v / PI).collect(),
            gamma_pi: spec.gamma.iter().map(|v| v / PI).collect(),
            theta_pi: spec.theta / PI,
        }
    }

    pub fn to_spec(&self) -> Result<GateSpec> {
        GateSpec::new(
            self.eta_pi.iter().map(|v| v * PI).collect(),
            self.gamma_pi.iter().map(|v| v * PI).collect(),
            self.theta_pi * PI,
        )
    }
}

/// `min_φ ‖A − e^{iφ}B‖_max`: distance up to a global phase.
pub fn distance_up_to_phase(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let overlap: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    (a - b * phase).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
