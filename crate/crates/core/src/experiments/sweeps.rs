use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{ExperimentConfig, SweepMode};
use super::{fmt_f, fmt_opt, Report};
use crate::dynamics::{
    evolve_schrodinger, gate_error, reduced_amplitudes, two_level_transfer, uniform_dephasing_error,
    uniform_superposition_error, Basis, Propagator, QuantumState, Truncation,
};
use crate::errmodel::{
    estimate_uniform, load_or_build, total_error_general, transfer_factors, InitialStateSpec, TableGrid,
};
use crate::error::{Error, Result};
use crate::gates::GateSpec;
use crate::optimizer::{gate_error_objective, optimize_gate_params, OptimizeOptions};
use crate::pulse::SechypParams;
use crate::register::{RegisterConfig, ShiftMatrix};

/// Transfer error `1 − |T|²` of the two-pulse sequence on a two-level system
/// over drive scales and cutoff durations.
pub fn run_transfer_error(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let te = &cfg.transfer_error;
    let mut report = Report::new(&["ratio", "tg_ratio", "transfer_error"]);
    let robust = cfg.pulse.mu * cfg.pulse.beta_ratio;
    if let Some(r) = te.ratios.iter().find(|&&r| r < robust) {
        report.notes.push((
            "advisory".into(),
            format!("ratio {r} is below mu*beta/Omega0 = {robust}; transfer is not robust there"),
        ));
    }
    let points: Vec<(f64, f64)> = te
        .ratios
        .iter()
        .flat_map(|&r| te.tg_ratios.iter().map(move |&tg| (r, tg)))
        .collect();
    let prop = Propagator::Adaptive(cfg.adaptive());
    let theta = cfg.pulse.theta();
    let results: Vec<Result<f64>> = points
        .par_iter()
        .map(|&(ratio, tg)| {
            let p = SechypParams::from_ratios(1.0, cfg.pulse.mu, cfg.pulse.beta_ratio, tg)?;
            Ok(1.0 - two_level_transfer(&p, ratio, theta, &prop)?.norm_sqr())
        })
        .collect();
    for ((ratio, tg), r) in points.into_iter().zip(results) {
        match r {
            Ok(e) => report.rows.push(vec![fmt_f(ratio), fmt_f(tg), fmt_f(e)]),
            Err(e) => report.failures.push(format!("ratio = {ratio}, tg_ratio = {tg}: {e}")),
        }
    }
    Ok(report)
}

/// Error as a function of the register size in one of three settings.
pub fn run_sweep_n(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    match cfg.sweep_n.mode {
        SweepMode::A => sweep_stark(cfg),
        SweepMode::B => sweep_dephasing(cfg),
        SweepMode::C => sweep_optimized(cfg),
    }
}

/// Simulated error from exact per-sector amplitudes with `γ = 0`.
fn sector_error(init: &InitialStateSpec, n: usize, amps: &[Complex64]) -> Result<f64> {
    match init {
        InitialStateSpec::Uniform => uniform_superposition_error(n, amps),
        other => total_error_general(other, n, amps, 0.0),
    }
}

fn full_error(
    n: usize,
    shift: f64,
    init: &InitialStateSpec,
    p: &SechypParams,
    theta: f64,
    prop: &Propagator,
) -> Result<Option<f64>> {
    let reg = RegisterConfig::uniform(n, shift, f64::INFINITY)?;
    let basis = Arc::new(Basis::new(n, Truncation::for_register(&reg)?)?);
    let psi0 = match init {
        InitialStateSpec::Uniform => QuantumState::uniform_superposition(basis)?,
        InitialStateSpec::Ghz => QuantumState::ghz(basis)?,
        InitialStateSpec::Sectors(_) => return Ok(None),
    };
    let spec = GateSpec::phase_on_ones(n, theta);
    let fin = evolve_schrodinger(&reg, &spec, p, theta, &psi0, prop)?;
    Ok(Some(gate_error(&fin, &psi0, &spec, theta)?))
}

fn sweep_stark(cfg: &ExperimentConfig) -> Result<Report> {
    let s = &cfg.sweep_n;
    let sizes = s.sizes();
    let n_max = *sizes.iter().max().unwrap_or(&1);
    let p = cfg.pulse.params()?;
    let theta = cfg.pulse.theta();
    let prop = Propagator::Adaptive(cfg.adaptive());
    let transfer = transfer_factors(n_max, &p, theta, &prop)?;
    let mut report = Report::new(&[
        "n",
        "delta_omega",
        "eps_sim",
        "eps_est",
        "eps_full",
        "full_minus_reduced",
    ]);
    for &shift in &s.delta_omega {
        let amps = match reduced_amplitudes(n_max, &p, shift, theta, &prop) {
            Ok(a) => a,
            Err(e) => {
                report.failures.push(format!("delta_omega = {shift}: {e}"));
                continue;
            }
        };
        let rows: Vec<Result<Vec<String>>> = sizes
            .par_iter()
            .map(|&n| {
                let sim = sector_error(&s.init, n, &amps)?;
                let reg = RegisterConfig::uniform(n, shift, f64::INFINITY)?;
                let est = estimate_uniform(&reg, &p, &s.init, &transfer)?.epsilon_total;
                let full = if n >= 2 && n <= s.full_max_n {
                    full_error(n, shift, &s.init, &p, theta, &prop)?
                } else {
                    None
                };
                Ok(vec![
                    n.to_string(),
                    fmt_f(shift),
                    fmt_f(sim),
                    fmt_f(est),
                    fmt_opt(full),
                    fmt_opt(full.map(|f| f - sim)),
                ])
            })
            .collect();
        for (n, r) in sizes.iter().zip(rows) {
            match r {
                Ok(row) => report.rows.push(row),
                Err(e) => report.failures.push(format!("n = {n}, delta_omega = {shift}: {e}")),
            }
        }
    }
    Ok(report)
}

fn sweep_dephasing(cfg: &ExperimentConfig) -> Result<Report> {
    let s = &cfg.sweep_n;
    let sizes = s.sizes();
    let n_max = *sizes.iter().max().unwrap_or(&1);
    let p = cfg.pulse.params()?;
    let theta = cfg.pulse.theta();
    let opts = cfg.adaptive();
    let transfer = transfer_factors(n_max, &p, theta, &Propagator::Adaptive(opts))?;
    let mut report = Report::new(&[
        "n",
        "omega0_t2",
        "eps_sim",
        "eps_est",
        "eps_est_lo",
        "eps_est_hi",
        "in_band",
        "saturating",
    ]);
    report.notes.push((
        "saturating".into(),
        "n >= 10 and eps_est >= 0.9 (1 - exp(-2 gamma)), the large-n dephasing limit".into(),
    ));
    let points: Vec<(f64, usize)> = s
        .omega0_t2
        .iter()
        .flat_map(|&o| sizes.iter().map(move |&n| (o, n)))
        .collect();
    let rows: Vec<Result<Vec<String>>> = points
        .par_iter()
        .map(|&(t2, n)| {
            let est_at = |alpha: f64| -> Result<(f64, f64)> {
                let reg = RegisterConfig::new(ShiftMatrix::infinite(n), t2, alpha)?;
                let e = estimate_uniform(&reg, &p, &s.init, &transfer)?;
                Ok((e.epsilon_total, e.gamma))
            };
            let (est, gamma) = est_at(s.alpha)?;
            let (lo, _) = est_at(s.alpha_band[0])?;
            let (hi, _) = est_at(s.alpha_band[1])?;
            let sim = if n <= s.sim_max_n && s.init == InitialStateSpec::Uniform {
                Some(uniform_dephasing_error(n, &p, theta, t2, &opts)?)
            } else {
                None
            };
            let in_band = sim.map(|v| (lo..=hi).contains(&v).to_string()).unwrap_or_default();
            let saturating = n >= 10 && est >= 0.9 * (1.0 - (-2.0 * gamma).exp());
            Ok(vec![
                n.to_string(),
                fmt_f(t2),
                fmt_opt(sim),
                fmt_f(est),
                fmt_f(lo),
                fmt_f(hi),
                in_band,
                saturating.to_string(),
            ])
        })
        .collect();
    for ((t2, n), r) in points.iter().zip(rows) {
        match r {
            Ok(row) => report.rows.push(row),
            Err(e) => report.failures.push(format!("n = {n}, omega0_t2 = {t2}: {e}")),
        }
    }
    Ok(report)
}

fn sweep_optimized(cfg: &ExperimentConfig) -> Result<Report> {
    let s = &cfg.sweep_n;
    let sizes = s.sizes();
    let grid = TableGrid {
        n_max: 50,
        points: s.table_points,
        ..TableGrid::default()
    };
    let prop = Propagator::Adaptive(cfg.adaptive());
    let (table, rebuilt) = load_or_build(&s.table_path, cfg.pulse.mu, cfg.pulse.beta_ratio, grid, &prop)?;
    if cfg.pulse.theta_pi != 1.0 {
        return Err(Error::config(
            "mode c uses the transfer table, which is tabulated for theta = pi",
        ));
    }
    let mut report = Report::new(&[
        "n",
        "delta_omega_t2",
        "omega0_opt",
        "tg_ratio_opt",
        "eps_min",
        "eps_lo",
        "eps_hi",
        "evaluations",
    ]);
    report.notes.push((
        "transfer_table".into(),
        format!(
            "{} ({})",
            s.table_path.display(),
            if rebuilt { "built" } else { "cached" }
        ),
    ));
    let opts = OptimizeOptions {
        alpha: s.alpha,
        ..OptimizeOptions::default()
    };
    let points: Vec<(f64, usize)> = s
        .delta_omega_t2
        .iter()
        .flat_map(|&d| sizes.iter().map(move |&n| (d, n)))
        .collect();
    let rows: Vec<Result<Vec<String>>> = points
        .par_iter()
        .map(|&(d, n)| {
            let r = optimize_gate_params(n, d, &table, &opts)?;
            let band = |a: f64| gate_error_objective(n, d, a, &table, r.omega0_opt, r.tg_ratio_opt);
            Ok(vec![
                n.to_string(),
                fmt_f(d),
                fmt_f(r.omega0_opt),
                fmt_f(r.tg_ratio_opt),
                fmt_f(r.epsilon_min),
                fmt_f(band(s.alpha_band[0])),
                fmt_f(band(s.alpha_band[1])),
                r.evaluations.to_string(),
            ])
        })
        .collect();
    for ((d, n), r) in points.iter().zip(rows) {
        match r {
            Ok(row) => report.rows.push(row),
            Err(e) => report.failures.push(format!("n = {n}, delta_omega_t2 = {d}: {e}")),
        }
    }
    Ok(report)
}
