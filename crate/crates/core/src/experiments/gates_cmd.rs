use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::Serialize;

use super::config::{ExperimentConfig, GateKind};
use crate::error::{Error, Result};
use crate::gates::{
    absorb_single_qubit_gates, controlled_phase_spec, controlled_rotation_plan, distance_up_to_phase, ideal_unitary,
    layer_matrix, toffoli_spec, GateSpecFile, SingleQubitGate,
};

/// Parameters of a requested gate and the checks run on them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateReport {
    pub kind: GateKind,
    pub n: usize,
    pub spec: GateSpecFile,
    /// `min_φ ‖U − e^{iφ}U_ref‖_max` against the textbook matrix, where one
    /// is defined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_phase_pi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single_operation: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_operation: Option<GateSpecFile>,
    /// absorb: the spec before absorbing the layer.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub original: Option<GateSpecFile>,
    /// absorb: `‖U_D·A − A·U_D′‖` up to phase.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalence_error: Option<f64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Named single-qubit gate: `id x y z h s t sdg tdg`.
pub fn named_gate(name: &str) -> Result<SingleQubitGate> {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let phase = |a: f64| Matrix2::new(l, o, o, Complex64::from_polar(1.0, a));
    let m = match name.to_ascii_lowercase().as_str() {
        "id" | "i" => return Ok(SingleQubitGate::identity()),
        "h" => return Ok(SingleQubitGate::hadamard()),
        "x" => Matrix2::new(o, l, l, o),
        "y" => Matrix2::new(o, c(0.0, -1.0), c(0.0, 1.0), o),
        "z" => phase(PI),
        "s" => phase(PI / 2.0),
        "sdg" => phase(-PI / 2.0),
        "t" => phase(PI / 4.0),
        "tdg" => phase(-PI / 4.0),
        other => return Err(Error::config(format!("unknown single-qubit gate '{other}'"))),
    };
    SingleQubitGate::new(m)
}

/// Multi-controlled X on the last qubit with controls on `|1⟩`.
fn multi_controlled_x(n: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let mut m = DMatrix::identity(dim, dim);
    let (a, b) = (dim - 2, dim - 1);
    m[(a, a)] = c(0.0, 0.0);
    m[(b, b)] = c(0.0, 0.0);
    m[(a, b)] = c(1.0, 0.0);
    m[(b, a)] = c(1.0, 0.0);
    m
}

pub fn run_gates(cfg: &ExperimentConfig) -> Result<GateReport> {
    cfg.validate()?;
    let g = &cfg.gates;
    let n = g.n;
    let theta = g.theta_pi * PI;
    let report = |spec: &crate::gates::GateSpec, label: String| GateReport {
        kind: g.kind,
        n,
        spec: GateSpecFile::from_spec(spec, Some(label)),
        reference_distance: None,
        residual_phase_pi: None,
        single_operation: None,
        residual_operation: None,
        original: None,
        equivalence_error: None,
    };
    match g.kind {
        GateKind::Toffoli => {
            let named = toffoli_spec(n)?;
            let mut r = report(&named.spec, named.label);
            r.reference_distance = Some(distance_up_to_phase(
                &ideal_unitary(&named.spec),
                &multi_controlled_x(n),
            ));
            Ok(r)
        }
        GateKind::Cphase => {
            let named = controlled_phase_spec(n, theta)?;
            let dim = 1usize << n;
            let mut reference = DMatrix::<Complex64>::identity(dim, dim);
            reference[(dim - 1, dim - 1)] = Complex64::from_polar(1.0, theta);
            let mut r = report(&named.spec, named.label);
            r.reference_distance = Some(distance_up_to_phase(&ideal_unitary(&named.spec), &reference));
            Ok(r)
        }
        GateKind::Crotation => {
            let plan = controlled_rotation_plan(n, g.axis, theta, g.alpha_pi * PI)?;
            let mut r = report(&plan.spec, format!("C^{}-R", n - 1));
            r.residual_phase_pi = Some(plan.residual_phase / PI);
            r.single_operation = Some(plan.single_operation);
            r.residual_operation = plan
                .residual_operation
                .as_ref()
                .map(|s| GateSpecFile::from_spec(s, None));
            Ok(r)
        }
        GateKind::Absorb => {
            if g.pre.len() != n {
                return Err(Error::config(format!(
                    "gates.pre needs {n} entries, got {}",
                    g.pre.len()
                )));
            }
            let pre = g.pre.iter().map(|s| named_gate(s)).collect::<Result<Vec<_>>>()?;
            let base = controlled_phase_spec(n, theta)?;
            let absorbed = absorb_single_qubit_gates(&pre, &base.spec)?;
            let layer = layer_matrix(&pre);
            let lhs = ideal_unitary(&base.spec) * &layer;
            let rhs = &layer * ideal_unitary(&absorbed);
            let mut r = report(&absorbed, format!("{} after [{}]", base.label, g.pre.join(" ")));
            r.original = Some(GateSpecFile::from_spec(&base.spec, Some(base.label)));
            r.equivalence_error = Some(distance_up_to_phase(&lhs, &rhs));
            Ok(r)
        }
    }
}
