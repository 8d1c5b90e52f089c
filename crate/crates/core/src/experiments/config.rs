use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::Propagator;
use crate::errmodel::InitialStateSpec;
use crate::error::{Error, Result};
use crate::integrator::{ExponentialOptions, IntegratorOptions};
use crate::pulse::SechypParams;

/// Full configuration of a run. Every section is optional in the TOML file;
/// unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Relative and absolute tolerance of the adaptive integrator.
    pub tol: f64,
    pub pulse: PulseConfig,
    pub transfer_error: TransferErrorConfig,
    pub sweep_n: SweepConfig,
    pub random_shifts: RandomShiftConfig,
    pub gates: GatesConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            tol: 1e-10,
            pulse: PulseConfig::default(),
            transfer_error: TransferErrorConfig::default(),
            sweep_n: SweepConfig::default(),
            random_shifts: RandomShiftConfig::default(),
            gates: GatesConfig::default(),
        }
    }
}

/// Pulse family with `Ω0 = 1` as the frequency unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    pub mu: f64,
    /// `β/Ω0`.
    pub beta_ratio: f64,
    /// `t_g/t_fwhm`.
    pub tg_ratio: f64,
    /// Gate phase `θ` in units of π.
    pub theta_pi: f64,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self {
            mu: 3.0,
            beta_ratio: 1.0 / 3.0,
            tg_ratio: 6.0,
            theta_pi: 1.0,
        }
    }
}

impl PulseConfig {
    pub fn params(&self) -> Result<SechypParams> {
        SechypParams::from_ratios(1.0, self.mu, self.beta_ratio, self.tg_ratio)
    }

    pub fn theta(&self) -> f64 {
        self.theta_pi * PI
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransferErrorConfig {
    /// Drive scales `|Ω|_max/Ω0`.
    pub ratios: Vec<f64>,
    pub tg_ratios: Vec<f64>,
}

impl Default for TransferErrorConfig {
    fn default() -> Self {
        Self {
            ratios: (5..=70).map(|i| i as f64 / 10.0).collect(),
            tg_ratios: vec![2.0, 4.0, 6.0, 8.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Transfer and AC Stark errors: Schrödinger evolution.
    #[default]
    A,
    /// Transfer and dephasing errors with infinite shifts: master equation.
    B,
    /// All errors, pulse optimized on the estimate.
    C,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub mode: SweepMode,
    /// Register sizes; default depends on the mode.
    pub n: Option<Vec<usize>>,
    /// Mode a: `Δω/Ω0`.
    pub delta_omega: Vec<f64>,
    /// Mode b: `Ω0 T2`.
    pub omega0_t2: Vec<f64>,
    /// Mode c: `Δω T2`.
    pub delta_omega_t2: Vec<f64>,
    pub alpha: f64,
    pub alpha_band: [f64; 2],
    /// Mode a: also run the full register up to this size.
    pub full_max_n: usize,
    /// Mode b: largest register simulated with the master equation.
    pub sim_max_n: usize,
    pub init: InitialStateSpec,
    /// Mode c: transfer-table cache file.
    pub table_path: PathBuf,
    pub table_points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            mode: SweepMode::A,
            n: None,
            delta_omega: vec![30.0, 60.0, 120.0],
            omega0_t2: vec![1e3, 1e4],
            delta_omega_t2: vec![1e3, 1e4, 1e5, 1e6],
            alpha: 1.0,
            alpha_band: [0.9, 1.1],
            full_max_n: 4,
            sim_max_n: 8,
            init: InitialStateSpec::Uniform,
            table_path: PathBuf::from("transfer_table.csv"),
            table_points: 100,
        }
    }
}

impl SweepConfig {
    pub fn sizes(&self) -> Vec<usize> {
        self.n.clone().unwrap_or_else(|| match self.mode {
            SweepMode::A | SweepMode::C => (2..=50).collect(),
            SweepMode::B => (2..=8).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    #[default]
    Positive,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorKind {
    Adaptive,
    /// Fixed-step exponential integrator; the default for random shifts,
    /// whose largest values make adaptive steps stability-limited.
    #[default]
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomShiftConfig {
    pub n: Vec<usize>,
    pub samples: usize,
    pub sign: Sign,
    /// Range of `|Δω|/Ω0`; `1/|Δω|` is drawn uniformly.
    pub min_shift: f64,
    pub max_shift: f64,
    pub integrator: IntegratorKind,
    /// Adaptive tolerance for these runs.
    pub tol: f64,
    /// Exponential-integrator step (units of `1/Ω0`).
    pub step: f64,
    pub init: InitialStateSpec,
}

impl Default for RandomShiftConfig {
    fn default() -> Self {
        Self {
            n: (3..=13).collect(),
            samples: 100,
            sign: Sign::Positive,
            min_shift: 15.0,
            max_shift: 1500.0,
            integrator: IntegratorKind::Exponential,
            tol: 1e-8,
            step: 0.02,
            init: InitialStateSpec::Uniform,
        }
    }
}

impl RandomShiftConfig {
    pub fn propagator(&self) -> Propagator {
        match self.integrator {
            IntegratorKind::Adaptive => Propagator::Adaptive(IntegratorOptions::with_tol(self.tol)),
            IntegratorKind::Exponential => Propagator::Exponential(ExponentialOptions { max_step: self.step }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    #[default]
    Toffoli,
    Cphase,
    Crotation,
    Absorb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GatesConfig {
    pub kind: GateKind,
    pub n: usize,
    /// cphase / crotation angle in units of π.
    pub theta_pi: f64,
    /// crotation axis.
    pub axis: [f64; 3],
    /// crotation global phase `α` in units of π.
    pub alpha_pi: f64,
    /// absorb: one named gate per qubit (`id x y z h s t sdg tdg`).
    pub pre: Vec<String>,
}

impl Default for GatesConfig {
    fn default() -> Self {
        Self {
            kind: GateKind::Toffoli,
            n: 3,
            theta_pi: 1.0,
            axis: [1.0, 0.0, 0.0],
            alpha_pi: 0.5,
            pre: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn adaptive(&self) -> IntegratorOptions {
        IntegratorOptions::with_tol(self.tol)
    }

    /// Check the whole configuration before any computation.
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::config(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        self.pulse.params()?;
        let te = &self.transfer_error;
        if te.ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::config("transfer_error.ratios must be positive and finite"));
        }
        if te.tg_ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::config("transfer_error.tg_ratios must be positive"));
        }
        let s = &self.sweep_n;
        if s.sizes().iter().any(|&n| n == 0 || n > 50) {
            return Err(Error::config("sweep_n.n entries must lie in 1..=50"));
        }
        if s.delta_omega.iter().any(|v| !(*v > 0.0))
            || s.omega0_t2.iter().any(|v| !(*v > 0.0))
            || s.delta_omega_t2.iter().any(|v| !(*v > 0.0))
        {
            return Err(Error::config("sweep_n shift and coherence values must be positive"));
        }
        if !(s.alpha > 0.0 && s.alpha_band[0] > 0.0 && s.alpha_band[0] <= s.alpha_band[1]) {
            return Err(Error::config(
                "sweep_n.alpha and alpha_band must be positive with lo ≤ hi",
            ));
        }
        if s.table_points < 2 {
            return Err(Error::config("sweep_n.table_points must be at least 2"));
        }
        let r = &self.random_shifts;
        if r.n.iter().any(|&n| n < 2 || n > crate::errmodel::MAX_ENUMERATED_QUBITS) {
            return Err(Error::config(format!(
                "random_shifts.n entries must lie in 2..={}",
                crate::errmodel::MAX_ENUMERATED_QUBITS
            )));
        }
        if r.samples == 0 {
            return Err(Error::config("random_shifts.samples must be positive"));
        }
        crate::register::ShiftDistribution::new(r.min_shift, r.max_shift, false, 0)
            .map_err(|e| Error::config(e.to_string()))?;
        if !(r.step > 0.0) || !(r.tol > 0.0) {
            return Err(Error::config("random_shifts.step and tol must be positive"));
        }
        if !(2..=12).contains(&self.gates.n) {
            return Err(Error::config("gates.n must lie in 2..=12 (dense unitaries)"));
        }
        Ok(())
    }
}
