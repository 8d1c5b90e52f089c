//! Experiment drivers behind the command-line tool.
//!
//! Each runner takes an [`ExperimentConfig`] and returns a [`Report`]: a
//! table of rows in deterministic order plus the list of points that failed.

mod config;
mod gates_cmd;
mod random;
mod sweeps;

pub use config::{
    ExperimentConfig, GateKind, GatesConfig, IntegratorKind, PulseConfig, RandomShiftConfig, Sign, SweepConfig,
    SweepMode, TransferErrorConfig,
};
pub use gates_cmd::{named_gate, run_gates, GateReport};
pub use random::{random_shift_samples, run_random_shifts, run_theory_deviation, sample_seed, SampleRecord};
pub use sweeps::{run_sweep_n, run_transfer_error};

use std::io::Write;

use crate::error::Result;

/// Tabular output of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Points that could not be computed, one message each.
    pub failures: Vec<String>,
    /// Extra `key: value` lines for the metadata block.
    pub notes: Vec<(String, String)>,
}

impl Report {
    pub(crate) fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Parsed numeric cell; `None` for empty or non-numeric cells.
    pub fn value(&self, row: usize, name: &str) -> Option<f64> {
        self.rows.get(row)?.get(self.column(name)?)?.parse().ok()
    }

    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }

    /// Write the metadata block (`#` lines) followed by the CSV table.
    pub fn write_csv<W: Write>(&self, command: &str, cfg: &ExperimentConfig, mut out: W) -> Result<()> {
        for line in metadata_lines(command, cfg) {
            writeln!(out, "# {line}")?;
        }
        for (k, v) in &self.notes {
            writeln!(out, "# {k}: {v}")?;
        }
        for f in &self.failures {
            writeln!(out, "# failed: {f}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Lines describing the toolkit version and the effective configuration,
/// enough to repeat a run exactly.
pub fn metadata_lines(command: &str, cfg: &ExperimentConfig) -> Vec<String> {
    let p = &cfg.pulse;
    vec![
        format!("blockade-gate {}", env!("CARGO_PKG_VERSION")),
        format!("command: {command}"),
        format!("seed: {}", cfg.seed),
        format!("rng: {}", crate::register::RNG_NAME),
        format!("tolerance: rtol = atol = {:?}", cfg.tol),
        format!(
            "pulse: omega0 = 1, mu = {}, beta_ratio = {}, tg_ratio = {}, theta = {} pi",
            p.mu, p.beta_ratio, p.tg_ratio, p.theta_pi
        ),
        format!("config: {}", serde_json::to_string(cfg).unwrap_or_default()),
    ]
}

pub(crate) fn fmt_f(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_default()
}
