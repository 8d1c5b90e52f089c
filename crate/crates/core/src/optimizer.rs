//! Derivative-free minimization of the closed-form gate error over the pulse
//! amplitude and duration.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::errmodel::{amplitude_factor, dephasing_exponent, total_error_uniform, TransferTable};
use crate::error::{Error, Result};
use crate::pulse::{pulse_area_lambda, SechypParams};

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions {
    /// Initial simplex offsets per coordinate; `None` uses 5% of each
    /// coordinate (0.00025 for zeros).
    pub steps: Option<Vec<f64>>,
    /// Stop when every vertex lies within `xtol·max(1, |x_best|∞)` of the best.
    pub xtol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            steps: None,
            xtol: 1e-6,
            max_evals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NelderMeadStatus {
    Converged,
    MaxEvaluations,
    /// The objective returned NaN; the best point seen so far is reported.
    NanAborted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub status: NelderMeadStatus,
}

struct Counted<F> {
    f: F,
    evals: usize,
    nan: bool,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            self.nan = true;
        }
        v
    }
}

/// Nelder–Mead simplex search with reflection 1, expansion 2, contraction
/// 0.5 and shrink 0.5.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> Result<NelderMeadResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let k = x0.len();
    if k == 0 {
        return Err(Error::domain("empty starting point"));
    }
    let mut obj = Counted {
        f,
        evals: 0,
        nan: false,
    };
    let f0 = obj.eval(x0);
    if !f0.is_finite() {
        return Err(Error::domain(format!(
            "objective is not finite at the starting point ({f0})"
        )));
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..k {
        let mut x = x0.to_vec();
        let step = match &opts.steps {
            Some(s) => s[i],
            None if x[i] != 0.0 => 0.05 * x[i],
            None => 0.00025,
        };
        x[i] += step;
        let v = obj.eval(&x);
        simplex.push((x, v));
    }

    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect() };
    let status = loop {
        // stable sort keeps x0 first among ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if obj.nan {
            break NelderMeadStatus::NanAborted;
        }
        let best = &simplex[0];
        let scale = best.0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if size <= opts.xtol * scale || simplex.iter().all(|(_, v)| *v == best.1) {
            break NelderMeadStatus::Converged;
        }
        if obj.evals >= opts.max_evals {
            break NelderMeadStatus::MaxEvaluations;
        }

        let mut centroid = vec![0.0; k];
        for (x, _) in &simplex[..k] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / k as f64;
            }
        }
        let (worst, f_worst) = simplex[k].clone();
        let f_second = simplex[k - 1].1;
        let f_best = simplex[0].1;

        let xr = lerp(&centroid, &worst, -1.0);
        let fr = obj.eval(&xr);
        if fr < f_best {
            let xe = lerp(&centroid, &worst, -2.0);
            let fe = obj.eval(&xe);
            simplex[k] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[k] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = lerp(&centroid, &xr, 0.5);
            let fc = obj.eval(&xc);
            (xc, if fc <= fr { fc } else { f64::INFINITY })
        } else {
            let xc = lerp(&centroid, &worst, 0.5);
            let fc = obj.eval(&xc);
            (xc, if fc < f_worst { fc } else { f64::INFINITY })
        };
        if fc.is_finite() {
            simplex[k] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = lerp(&anchor, &vertex.0, 0.5);
            let v = obj.eval(&x);
            *vertex = (x, v);
        }
    };
    let (x, f) = simplex
        .iter()
        .filter(|(_, v)| !v.is_nan())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .unwrap_or((x0.to_vec(), f0));
    Ok(NelderMeadResult {
        x,
        f,
        evaluations: obj.evals,
        status,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    /// Optimal `Ω0` in units of `Δω`.
    pub omega0_opt: f64,
    pub tg_ratio_opt: f64,
    pub epsilon_min: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    /// `α` in `γ = α t_g / T2`.
    pub alpha: f64,
    /// `(Ω0/Δω, t_g/t_fwhm)` starting points; `None` picks four around the
    /// balance of Stark and dephasing errors.
    pub starts: Option<Vec<(f64, f64)>>,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            starts: None,
            nelder_mead: NelderMeadOptions::default(),
        }
    }
}

/// Objective for `n` qubits with `Δω = 1`, `T2 = ΔωT2`: the even-superposition
/// error with interpolated transfer factors. Durations outside the table get
/// `1 + distance`, above any attainable error.
pub fn gate_error_objective(
    n: usize,
    delta_omega_t2: f64,
    alpha: f64,
    table: &TransferTable,
    omega0: f64,
    tg_ratio: f64,
) -> f64 {
    let g = &table.grid;
    if tg_ratio < g.tg_min || tg_ratio > g.tg_max {
        return 1.0 + (g.tg_min - tg_ratio).max(tg_ratio - g.tg_max);
    }
    let Ok(p) = SechypParams::from_ratios(omega0, table.mu, table.beta_ratio, tg_ratio) else {
        return f64::NAN;
    };
    let lambda = pulse_area_lambda(&p);
    let gamma = dephasing_exponent(alpha, p.t_cutoff, delta_omega_t2);
    let a: Result<Vec<Complex64>> = (1..=n)
        .map(|n0| amplitude_factor(n0, table.interpolate(n0 as f64, tg_ratio)?, lambda, 1.0))
        .collect();
    match a.and_then(|a| total_error_uniform(n, &a, gamma)) {
        Ok(e) => e,
        Err(_) => f64::NAN,
    }
}

fn default_starts(delta_omega_t2: f64) -> Vec<(f64, f64)> {
    let base = delta_omega_t2.powf(-1.0 / 3.0);
    let mut starts = Vec::new();
    for scale in [0.5, 2.0] {
        for tg in [4.0, 7.0] {
            starts.push((scale * base, tg));
        }
    }
    starts
}

/// Minimize the estimate over `(ln Ω0, t_g/t_fwhm)` from several starts and
/// keep the best. Units: `Δω = 1`, so `Ω0` is returned relative to `Δω`.
pub fn optimize_gate_params(
    n: usize,
    delta_omega_t2: f64,
    table: &TransferTable,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult> {
    if n == 0 {
        return Err(Error::domain("need at least one qubit"));
    }
    if n > table.grid.n_max {
        return Err(Error::TableMismatch(format!(
            "table covers n0 ≤ {}, but {n} qubits were requested",
            table.grid.n_max
        )));
    }
    if !(delta_omega_t2 > 0.0) {
        return Err(Error::domain("ΔωT2 must be positive"));
    }
    let starts = opts.starts.clone().unwrap_or_else(|| default_starts(delta_omega_t2));
    if starts.is_empty() {
        return Err(Error::domain("no starting points"));
    }
    let objective = |x: &[f64]| gate_error_objective(n, delta_omega_t2, opts.alpha, table, x[0].exp(), x[1]);
    let runs = starts
        .par_iter()
        .map(|&(omega0, tg)| {
            let nm_opts = NelderMeadOptions {
                steps: opts.nelder_mead.steps.clone().or(Some(vec![0.3, 0.5])),
                ..opts.nelder_mead.clone()
            };
            nelder_mead(objective, &[omega0.ln(), tg], &nm_opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.f < a.f { b } else { a })
        .expect("at least one start");
    Ok(OptimizeResult {
        omega0_opt: best.x[0].exp(),
        tg_ratio_opt: best.x[1],
        epsilon_min: best.f,
        evaluations,
    })
}
