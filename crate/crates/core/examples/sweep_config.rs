//! Run a register-size sweep from a TOML file and write the CSV report.
//!
//! `cargo run --release --example sweep_config -- examples/configs/dephasing.toml`

use std::path::PathBuf;

use blockade_gate::experiments::{run_sweep_n, ExperimentConfig};

fn main() -> blockade_gate::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/dephasing.toml")));
    let cfg = ExperimentConfig::load(&path)?;
    let report = run_sweep_n(&cfg)?;
    report.write_csv("sweep-n", &cfg, std::io::stdout().lock())
}
