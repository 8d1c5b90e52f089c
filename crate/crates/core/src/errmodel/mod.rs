//! Closed-form gate-error estimates.
//!
//! A driven subset of `n0` qubits returns to its ground state with amplitude
//! `A(n0) = T(n0)·exp(i·2(n0−1)Λ/(4Δω_eff))`: a transfer factor from an
//! isolated two-level system driven at `√n0·Ω(t)`, times the AC Stark phase
//! picked up from off-resonant doubly excited states. Dephasing enters
//! through `γ = α t_g / T2`.

mod table;

pub use table::{build_transfer_table, load_or_build, TableGrid, TransferTable};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blockade::subset_effective_shift;
use crate::combinatorics::{ln_binomial, CompensatedSum};
use crate::dynamics::{two_level_transfer, Propagator};
use crate::error::{Error, Result};
use crate::pulse::{pulse_area_lambda, SechypParams};
use crate::register::{average_shift, RegisterConfig};

/// `A(n0) = T·exp(i·2(n0−1)Λ/(4Δω_eff))`; `Δω_eff = ∞` leaves `T`.
pub fn amplitude_factor(n0: usize, t: Complex64, lambda: f64, delta_omega_eff: f64) -> Result<Complex64> {
    if delta_omega_eff == 0.0 || delta_omega_eff.is_nan() {
        return Err(Error::domain(format!(
            "effective shift must be nonzero, got {delta_omega_eff}"
        )));
    }
    if n0 <= 1 || delta_omega_eff.is_infinite() {
        return Ok(t);
    }
    let phase = 2.0 * (n0 as f64 - 1.0) * lambda / (4.0 * delta_omega_eff);
    Ok(t * Complex64::from_polar(1.0, phase))
}

/// `γ = α t_g / T2` (zero for `T2 = ∞`).
pub fn dephasing_exponent(alpha: f64, t_cutoff: f64, t2: f64) -> f64 {
    if t2.is_infinite() {
        0.0
    } else {
        alpha * t_cutoff / t2
    }
}

/// Transfer factors `T(n0)`, `n0 = 1..=n`, simulated directly for pulse `p`.
pub fn transfer_factors(n: usize, p: &SechypParams, theta: f64, prop: &Propagator) -> Result<Vec<Complex64>> {
    (1..=n)
        .into_par_iter()
        .map(|n0| two_level_transfer(p, (n0 as f64).sqrt(), theta, prop))
        .collect()
}

fn check_amplitudes(n: usize, a: &[Complex64], gamma: f64) -> Result<()> {
    if a.len() < n {
        return Err(Error::domain(format!("need {n} sector amplitudes, got {}", a.len())));
    }
    if !(gamma >= 0.0) {
        return Err(Error::domain(format!(
            "dephasing exponent must be nonnegative, got {gamma}"
        )));
    }
    Ok(())
}

/// Error of the even superposition of `n` qubits; `a[n0 − 1] = A(n0)`.
///
/// `ε = 1 − 4^{−n}[1 + Σ C(n,n0)·2e^{−γ}Re A(n0)
///       + Σ_{n0,m0,k} C(n,n0)C(n0,k)C(n−n0,m0−k)·Re[A(n0)A*(m0)]·(k + (n0m0−k)e^{−2γ})/(n0m0)]`
pub fn total_error_uniform(n: usize, a: &[Complex64], gamma: f64) -> Result<f64> {
    check_amplitudes(n, a, gamma)?;
    let ln_c: Vec<Vec<f64>> = (0..=n).map(|m| (0..=m).map(|k| ln_binomial(m, k)).collect()).collect();
    let ln_norm = 2.0 * n as f64 * std::f64::consts::LN_2;
    let (g1, g2) = ((-gamma).exp(), (-2.0 * gamma).exp());

    let mut sum = CompensatedSum::default();
    sum.add((-ln_norm).exp());
    for n0 in 1..=n {
        sum.add(2.0 * g1 * a[n0 - 1].re * (ln_c[n][n0] - ln_norm).exp());
    }
    for n0 in 1..=n {
        for m0 in 1..=n {
            let re = (a[n0 - 1] * a[m0 - 1].conj()).re;
            let nm = (n0 * m0) as f64;
            for k in (n0 + m0).saturating_sub(n)..=n0.min(m0) {
                let ln_w = ln_c[n][n0] + ln_c[n0][k] + ln_c[n - n0][m0 - k] - ln_norm;
                sum.add(re * ln_w.exp() * (k as f64 + (nm - k as f64) * g2) / nm);
            }
        }
    }
    Ok((1.0 - sum.value()).clamp(0.0, 1.0))
}

/// Initial register state, described by the probability `P(n0)` of finding
/// `n0` qubits in the driven ground state.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateSpec {
    /// Even superposition of all computational states.
    #[default]
    Uniform,
    /// `(|0…0⟩ + |1…1⟩)/√2`.
    Ghz,
    /// Explicit `P(n0)` for `n0 = 0..=n`.
    Sectors(Vec<f64>),
}

impl InitialStateSpec {
    pub fn probabilities(&self, n: usize) -> Result<Vec<f64>> {
        let p = match self {
            InitialStateSpec::Uniform => (0..=n)
                .map(|k| (ln_binomial(n, k) - n as f64 * std::f64::consts::LN_2).exp())
                .collect(),
            InitialStateSpec::Ghz => {
                if n == 0 {
                    return Err(Error::domain("GHZ state needs n ≥ 1"));
                }
                let mut p = vec![0.0; n + 1];
                p[0] = 0.5;
                p[n] = 0.5;
                p
            }
            InitialStateSpec::Sectors(p) => {
                if p.len() != n + 1 {
                    return Err(Error::domain(format!(
                        "need {} sector probabilities, got {}",
                        n + 1,
                        p.len()
                    )));
                }
                p.clone()
            }
        };
        if p.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::domain("sector probabilities must be nonnegative"));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("sector probabilities sum to {total}, not 1")));
        }
        Ok(p)
    }
}

/// `ε = 1 − [P(0)² + P(0)ΣP(n0)·2e^{−γ}Re A(n0) + ΣΣP(n0)P(m0)Re[A(n0)A*(m0)]e^{−2γ}]`.
pub fn total_error_general(spec: &InitialStateSpec, n: usize, a: &[Complex64], gamma: f64) -> Result<f64> {
    check_amplitudes(n, a, gamma)?;
    let p = spec.probabilities(n)?;
    let (g1, g2) = ((-gamma).exp(), (-2.0 * gamma).exp());
    let mut coherent = Complex64::new(0.0, 0.0);
    let mut sum = CompensatedSum::default();
    sum.add(p[0] * p[0]);
    for n0 in 1..=n {
        sum.add(2.0 * g1 * p[0] * p[n0] * a[n0 - 1].re);
        coherent += a[n0 - 1] * p[n0];
    }
    sum.add(g2 * coherent.norm_sqr());
    Ok((1.0 - sum.value()).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub epsilon_total: f64,
    pub gamma: f64,
    /// `A(n0)` for `n0 = 1..=n`; with pair-dependent shifts, the mean over the
    /// states of each sector.
    pub amplitudes: Vec<Complex64>,
}

fn sector_error(init: &InitialStateSpec, n: usize, a: &[Complex64], gamma: f64) -> Result<f64> {
    match init {
        InitialStateSpec::Uniform => total_error_uniform(n, a, gamma),
        other => total_error_general(other, n, a, gamma),
    }
}

/// Estimate for a register whose shifts are all equal (or all infinite).
/// `transfer[n0 − 1] = T(n0)`.
pub fn estimate_uniform(
    cfg: &RegisterConfig,
    p: &SechypParams,
    init: &InitialStateSpec,
    transfer: &[Complex64],
) -> Result<ErrorEstimate> {
    let shift = if cfg.shifts.all_infinite() {
        f64::INFINITY
    } else {
        cfg.shifts
            .uniform_value()
            .ok_or_else(|| Error::domain("shifts are not uniform; use estimate_with_arbitrary_shifts"))?
    };
    estimate_at_shift(cfg, p, init, transfer, shift)
}

fn estimate_at_shift(
    cfg: &RegisterConfig,
    p: &SechypParams,
    init: &InitialStateSpec,
    transfer: &[Complex64],
    shift: f64,
) -> Result<ErrorEstimate> {
    let n = cfg.n;
    if transfer.len() < n {
        return Err(Error::domain(format!(
            "need {n} transfer factors, got {}",
            transfer.len()
        )));
    }
    let lambda = pulse_area_lambda(p);
    let amplitudes = (1..=n)
        .map(|n0| amplitude_factor(n0, transfer[n0 - 1], lambda, shift))
        .collect::<Result<Vec<_>>>()?;
    let gamma = dephasing_exponent(cfg.alpha, p.t_cutoff, cfg.t2);
    Ok(ErrorEstimate {
        epsilon_total: sector_error(init, n, &amplitudes, gamma)?,
        gamma,
        amplitudes,
    })
}

/// Options for [`estimate_with_arbitrary_shifts`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ArbitraryShiftOptions {
    /// Replace every effective shift by the harmonic mean of all pair shifts
    /// and use the uniform formulas (meant for positive shifts).
    pub average_shortcut: bool,
}

/// Largest register for which every driven subset gets its own chain.
pub const MAX_ENUMERATED_QUBITS: usize = 20;

/// Estimate for pair-dependent shifts.
///
/// Each computational state with `n0 ≥ 2` driven qubits gets its own
/// `Δω_eff` from the blockade chain and its own `A`. States are then
/// combined with the same overlap counting as the uniform formula: with
/// weights `w_Z = P(|Z|)/C(n,|Z|)`, `S = Σ w_Z A_Z` and
/// `S_q = Σ_{Z∋q} w_Z A_Z/|Z|`,
/// `ε = 1 − [w_∅² + 2e^{−γ}w_∅ Re S + e^{−2γ}|S|² + (1−e^{−2γ})Σ_q|S_q|²]`.
pub fn estimate_with_arbitrary_shifts(
    cfg: &RegisterConfig,
    p: &SechypParams,
    init: &InitialStateSpec,
    transfer: &[Complex64],
    opts: ArbitraryShiftOptions,
) -> Result<ErrorEstimate> {
    let n = cfg.n;
    if opts.average_shortcut {
        let shift = if cfg.shifts.all_infinite() || n < 2 {
            f64::INFINITY
        } else {
            average_shift(&cfg.shifts)?
        };
        return estimate_at_shift(cfg, p, init, transfer, shift);
    }
    if n > MAX_ENUMERATED_QUBITS {
        return Err(Error::domain(format!(
            "{n} qubits need 2^{n} chains; at most {MAX_ENUMERATED_QUBITS} are enumerated (use the average-shift shortcut)"
        )));
    }
    if transfer.len() < n {
        return Err(Error::domain(format!(
            "need {n} transfer factors, got {}",
            transfer.len()
        )));
    }
    let probs = init.probabilities(n)?;
    let lambda = pulse_area_lambda(p);
    let gamma = dephasing_exponent(cfg.alpha, p.t_cutoff, cfg.t2);

    let per_state: Vec<Complex64> = (1usize..1 << n)
        .into_par_iter()
        .map(|mask| {
            let members: Vec<usize> = (0..n).filter(|&q| (mask >> (n - 1 - q)) & 1 == 1).collect();
            let eff = subset_effective_shift(&cfg.shifts, &members)?;
            amplitude_factor(members.len(), transfer[members.len() - 1], lambda, eff)
        })
        .collect::<Result<_>>()?;

    let weight: Vec<f64> = (0..=n).map(|k| probs[k] / ln_binomial(n, k).exp()).collect();
    let (mut s_re, mut s_im) = (CompensatedSum::default(), CompensatedSum::default());
    let mut per_qubit = vec![Complex64::new(0.0, 0.0); n];
    let mut sector_sum = vec![Complex64::new(0.0, 0.0); n];
    for (idx, a) in per_state.iter().enumerate() {
        let mask = idx + 1;
        let n0 = mask.count_ones() as usize;
        let wa = a * weight[n0];
        s_re.add(wa.re);
        s_im.add(wa.im);
        sector_sum[n0 - 1] += a;
        for (q, sq) in per_qubit.iter_mut().enumerate() {
            if (mask >> (n - 1 - q)) & 1 == 1 {
                *sq += wa / n0 as f64;
            }
        }
    }
    let s = Complex64::new(s_re.value(), s_im.value());
    let w0 = probs[0];
    let (g1, g2) = ((-gamma).exp(), (-2.0 * gamma).exp());
    let mut total = CompensatedSum::default();
    total.add(w0 * w0);
    total.add(2.0 * g1 * w0 * s.re);
    total.add(g2 * s.norm_sqr());
    for sq in &per_qubit {
        total.add((1.0 - g2) * sq.norm_sqr());
    }
    let amplitudes = sector_sum
        .iter()
        .enumerate()
        .map(|(i, sum)| sum / ln_binomial(n, i + 1).exp().round())
        .collect();
    Ok(ErrorEstimate {
        epsilon_total: (1.0 - total.value()).clamp(0.0, 1.0),
        gamma,
        amplitudes,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::*;
    use crate::dynamics::{gate_error_from_subsets, subset_amplitudes, uniform_superposition_error};
    use crate::integrator::IntegratorOptions;
    use crate::register::{sample_shifts, ShiftDistribution, ShiftMatrix};

    fn ones(n: usize) -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0); n]
    }

    #[test]
    fn perfect_gate_has_no_error() {
        for n in 1..=50 {
            let e = total_error_uniform(n, &ones(n), 0.0).unwrap();
            assert!(e.abs() < 1e-12, "n = {n}: {e}");
        }
    }

    #[test]
    fn stark_phase_example() {
        let a = amplitude_factor(3, Complex64::new(1.0, 0.0), 6.0, 30.0).unwrap();
        assert!((a - Complex64::from_polar(1.0, 0.2)).norm() < 1e-15);
        let t = Complex64::new(0.6, -0.3);
        assert_eq!(amplitude_factor(1, t, 6.0, 30.0).unwrap(), t);
        assert_eq!(amplitude_factor(4, t, 6.0, f64::INFINITY).unwrap(), t);
        assert!(amplitude_factor(4, t, 6.0, 0.0).is_err());
    }

    #[test]
    fn coherent_limit_matches_superposition_sum() {
        let n = 9;
        let a: Vec<Complex64> = (1..=n)
            .map(|k| Complex64::from_polar(1.0 - 0.01 * k as f64, 0.07 * k as f64))
            .collect();
        let direct = uniform_superposition_error(n, &a).unwrap();
        assert!((total_error_uniform(n, &a, 0.0).unwrap() - direct).abs() < 1e-12);
        assert!((total_error_general(&InitialStateSpec::Uniform, n, &a, 0.0).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn dephasing_limit_for_large_registers() {
        let gamma = 0.01;
        let e = total_error_uniform(50, &ones(50), gamma).unwrap();
        let limit = 1.0 - (-2.0 * gamma).exp();
        assert!((e / limit - 1.0).abs() < 0.05, "{e} vs {limit}");
    }

    #[test]
    fn stark_error_quarters_when_shift_doubles() {
        let p = SechypParams::default_family();
        let lambda = pulse_area_lambda(&p);
        let n = 10;
        let eps = |shift: f64| {
            let a: Vec<Complex64> = (1..=n)
                .map(|k| amplitude_factor(k, Complex64::new(1.0, 0.0), lambda, shift).unwrap())
                .collect();
            total_error_uniform(n, &a, 0.0).unwrap()
        };
        for shift in [30.0, 60.0] {
            let r = eps(shift) / eps(2.0 * shift);
            assert!((3.5..=4.5).contains(&r), "{r}");
        }
    }

    #[test]
    fn sector_probabilities_validated() {
        assert!(InitialStateSpec::Sectors(vec![0.5, 0.6]).probabilities(1).is_err());
        assert!(InitialStateSpec::Sectors(vec![1.0, 0.0]).probabilities(2).is_err());
        assert!(InitialStateSpec::Sectors(vec![1.2, -0.2]).probabilities(1).is_err());
        let p = InitialStateSpec::Uniform.probabilities(50).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_dark_state_has_no_error() {
        let mut p = vec![0.0; 6];
        p[0] = 1.0;
        let a = vec![Complex64::new(0.3, 0.1); 5];
        assert_eq!(
            total_error_general(&InitialStateSpec::Sectors(p), 5, &a, 0.4).unwrap(),
            0.0
        );
    }

    #[test]
    fn uniform_shifts_agree_with_uniform_formula() {
        let p = SechypParams::default_family();
        let t: Vec<Complex64> = (1..=6)
            .map(|k| Complex64::from_polar(0.999 - 1e-3 * k as f64, -0.02 * k as f64))
            .collect();
        let cfg = RegisterConfig::new(ShiftMatrix::uniform(6, 45.0), 3000.0, 1.0).unwrap();
        let uni = estimate_uniform(&cfg, &p, &InitialStateSpec::Uniform, &t).unwrap();
        let arb = estimate_with_arbitrary_shifts(&cfg, &p, &InitialStateSpec::Uniform, &t, Default::default()).unwrap();
        assert!((uni.epsilon_total - arb.epsilon_total).abs() < 1e-12);
        for (a, b) in uni.amplitudes.iter().zip(&arb.amplitudes) {
            assert!((a - b).norm() < 1e-12);
        }
        let short = ArbitraryShiftOptions { average_shortcut: true };
        let avg = estimate_with_arbitrary_shifts(&cfg, &p, &InitialStateSpec::Uniform, &t, short).unwrap();
        assert!((uni.epsilon_total - avg.epsilon_total).abs() < 1e-12);
    }

    #[test]
    fn enumeration_is_guarded() {
        let cfg = RegisterConfig::uniform(21, 30.0, f64::INFINITY).unwrap();
        let p = SechypParams::default_family();
        let t = ones(21);
        assert!(estimate_with_arbitrary_shifts(&cfg, &p, &InitialStateSpec::Uniform, &t, Default::default()).is_err());
        let short = ArbitraryShiftOptions { average_shortcut: true };
        assert!(estimate_with_arbitrary_shifts(&cfg, &p, &InitialStateSpec::Uniform, &t, short).is_ok());
    }

    #[test]
    fn random_shift_estimate_tracks_simulation() {
        let p = SechypParams::default_family();
        let prop = Propagator::Adaptive(IntegratorOptions::default());
        let t = transfer_factors(4, &p, PI, &prop).unwrap();
        let dist = ShiftDistribution::new(15.0, 1500.0, false, 5).unwrap();
        let cfg = RegisterConfig::new(sample_shifts(&dist, 4).unwrap(), f64::INFINITY, 1.0).unwrap();
        let est = estimate_with_arbitrary_shifts(&cfg, &p, &InitialStateSpec::Uniform, &t, Default::default()).unwrap();
        let amps = subset_amplitudes(&cfg, &p, PI, &prop).unwrap();
        let sim = gate_error_from_subsets(&amps, &vec![1.0 / 16.0; 16]).unwrap();
        let rel = (est.epsilon_total - sim) / sim;
        assert!(rel.abs() < 0.3, "estimate {} vs simulation {sim}", est.epsilon_total);
    }

    proptest! {
        #[test]
        fn error_grows_with_dephasing(n in 1usize..20, g in 0.0f64..0.5, dg in 0.0f64..0.5) {
            let a = ones(n);
            let lo = total_error_uniform(n, &a, g).unwrap();
            let hi = total_error_uniform(n, &a, g + dg).unwrap();
            prop_assert!(hi >= lo - 1e-14);
            prop_assert!((0.0..=1.0).contains(&hi));
        }

        #[test]
        fn stark_factor_keeps_modulus(n0 in 1usize..50, re in -1.0f64..1.0, im in -1.0f64..1.0, shift in 1.0f64..1e4) {
            let t = Complex64::new(re, im);
            let a = amplitude_factor(n0, t, 6.0, shift).unwrap();
            prop_assert!((a.norm() - t.norm()).abs() < 1e-14);
        }
    }
}
