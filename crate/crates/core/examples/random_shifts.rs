//! Random pair shifts: sector simulation against the chain-based estimate,
//! through the same driver the CLI uses.

use blockade_gate::experiments::{random_shift_samples, ExperimentConfig, Sign};

fn main() -> blockade_gate::Result<()> {
    let mut cfg = ExperimentConfig::from_toml_str(
        r#"
        seed = 3
        [random_shifts]
        n = [3, 5, 7]
        samples = 4
        "#,
    )?;
    for sign in [Sign::Positive, Sign::Mixed] {
        cfg.random_shifts.sign = sign;
        let (records, failed) = random_shift_samples(&cfg)?;
        println!("{sign:?} shifts ({} failed)", failed.len());
        for r in records {
            println!(
                "  n = {} #{}: avg |dw| {:7.2}  sim {:.4e}  est {:.4e}  rel {:+.3}",
                r.n,
                r.sample,
                r.avg_abs_shift,
                r.eps_sim,
                r.eps_est,
                r.relative_deviation().unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
