//! Optimal drive strength and duration against the coherence budget.
//!
//! Uses a coarse transfer table built in memory; the CLI caches the full one.

use blockade_gate::dynamics::Propagator;
use blockade_gate::errmodel::{build_transfer_table, TableGrid};
use blockade_gate::integrator::IntegratorOptions;
use blockade_gate::optimizer::{optimize_gate_params, OptimizeOptions};

fn main() -> blockade_gate::Result<()> {
    let grid = TableGrid {
        n_max: 10,
        points: 33,
        ..TableGrid::default()
    };
    let prop = Propagator::Adaptive(IntegratorOptions::with_tol(1e-9));
    let table = build_transfer_table(3.0, 1.0 / 3.0, grid, &prop)?;
    let n = 10;
    println!("{:>10} {:>10} {:>8} {:>12}", "dw*T2", "Omega0/dw", "tg/fwhm", "eps_min");
    for d in [1e3, 1e4, 1e5, 1e6] {
        let r = optimize_gate_params(n, d, &table, &OptimizeOptions::default())?;
        println!(
            "{d:>10.0e} {:>10.4} {:>8.3} {:>12.4e}",
            r.omega0_opt, r.tg_ratio_opt, r.epsilon_min
        );
    }
    Ok(())
}
