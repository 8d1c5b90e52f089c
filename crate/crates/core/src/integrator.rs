//! Time steppers for complex-valued linear systems.
//!
//! [`integrate`] is an adaptive Dormand–Prince 5(4) pair with FSAL, an
//! elementwise scaled max-norm and an elementary step controller
//! (safety 0.9, growth clamped to `[0.2, 5]`).
//!
//! [`integrate_exponential`] is a fixed-step fourth-order exponential
//! time-differencing scheme (Cox–Matthews ETDRK4) for systems of the form
//! `y' = −i·diag(d)·y + N(t, y)` where the diagonal part is propagated
//! exactly. It is used for sectors whose diagonal blockade shifts are far
//! larger than the drive, where an explicit method is limited by stability
//! rather than accuracy.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntegrationError {
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    MaxSteps {
        max_steps: usize,
        t: f64,
        y: Vec<Complex64>,
    },
    #[error("non-finite derivative or state at t = {t}")]
    NonFinite { t: f64 },
    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("invalid integrator options: {0}")]
    InvalidOptions(String),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_steps: 5_000_000,
            initial_step: None,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rel_tol: tol,
            abs_tol: tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), IntegrationError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(IntegrationError::InvalidOptions("tolerances must be positive".into()));
        }
        if let Some(h) = self.initial_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(IntegrationError::InvalidOptions("initial step must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Integrate `y' = rhs(t, y)` from `t0` to `t1` and return `y(t1)`.
///
/// `rhs(t, y, dy)` must write the derivative into `dy`. Backward integration
/// (`t1 < t0`) is supported.
pub fn integrate<F>(
    rhs: F,
    y0: &[Complex64],
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
) -> Result<Vec<Complex64>, IntegrationError>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    integrate_with_stats(rhs, y0, t0, t1, opts).map(|(y, _)| y)
}

pub fn integrate_with_stats<F>(
    mut rhs: F,
    y0: &[Complex64],
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
) -> Result<(Vec<Complex64>, IntegrationStats), IntegrationError>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    opts.validate()?;
    let mut stats = IntegrationStats::default();
    let mut y = y0.to_vec();
    if t1 == t0 {
        return Ok((y, stats));
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let dim = y.len();
    let zero = Complex64::new(0.0, 0.0);

    let mut k1 = vec![zero; dim];
    let mut k2 = vec![zero; dim];
    let mut k3 = vec![zero; dim];
    let mut k4 = vec![zero; dim];
    let mut k5 = vec![zero; dim];
    let mut k6 = vec![zero; dim];
    let mut k7 = vec![zero; dim];
    let mut tmp = vec![zero; dim];
    let mut y_new = vec![zero; dim];

    let mut t = t0;
    rhs(t, &y, &mut k1);
    stats.rhs_evals += 1;
    check_finite(&k1, t)?;

    let mut h = match opts.initial_step {
        Some(h) => h.min(span),
        None => {
            let h = initial_step(&mut rhs, t, &y, &k1, dir, opts, &mut tmp, &mut k2);
            stats.rhs_evals += 1;
            h.min(span)
        }
    };

    let mut steps = 0usize;
    let mut last_rejected = false;
    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        if steps >= opts.max_steps {
            return Err(IntegrationError::MaxSteps {
                max_steps: opts.max_steps,
                t,
                y,
            });
        }
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(span) {
            return Err(IntegrationError::StepUnderflow { t, h });
        }
        let hs = h * dir;

        for i in 0..dim {
            tmp[i] = y[i] + k1[i] * (hs * A21);
        }
        rhs(t + C2 * hs, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * hs;
        }
        rhs(t + C3 * hs, &tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * hs;
        }
        rhs(t + C4 * hs, &tmp, &mut k4);
        for i in 0..dim {
            tmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * hs;
        }
        rhs(t + C5 * hs, &tmp, &mut k5);
        for i in 0..dim {
            tmp[i] = y[i] + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * hs;
        }
        let t_new = if last { t1 } else { t + hs };
        rhs(t_new, &tmp, &mut k6);
        for i in 0..dim {
            y_new[i] = y[i] + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * hs;
        }
        rhs(t_new, &y_new, &mut k7);
        stats.rhs_evals += 6;

        let mut err = 0.0f64;
        for i in 0..dim {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            let scale = opts.abs_tol + opts.rel_tol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / scale);
        }
        if !err.is_finite() {
            return Err(IntegrationError::NonFinite { t });
        }

        steps += 1;
        if err <= 1.0 {
            stats.accepted += 1;
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            let mut factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if last_rejected {
                factor = factor.min(1.0);
            }
            last_rejected = false;
            h *= factor;
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
        }
    }
    check_finite(&y, t)?;
    Ok((y, stats))
}

fn check_finite(v: &[Complex64], t: f64) -> Result<(), IntegrationError> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(IntegrationError::NonFinite { t })
    }
}

/// Starting step from the usual two-derivative heuristic.
#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    rhs: &mut F,
    t: f64,
    y: &[Complex64],
    f0: &[Complex64],
    dir: f64,
    opts: &IntegratorOptions,
    tmp: &mut [Complex64],
    f1: &mut [Complex64],
) -> f64
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let scale = |i: usize| opts.abs_tol + opts.rel_tol * y[i].norm();
    let mut d0 = 0.0f64;
    let mut d1 = 0.0f64;
    for i in 0..y.len() {
        d0 = d0.max(y[i].norm() / scale(i));
        d1 = d1.max(f0[i].norm() / scale(i));
    }
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    for i in 0..y.len() {
        tmp[i] = y[i] + f0[i] * (h0 * dir);
    }
    rhs(t + h0 * dir, tmp, f1);
    let mut d2 = 0.0f64;
    for i in 0..y.len() {
        d2 = d2.max((f1[i] - f0[i]).norm() / scale(i));
    }
    d2 /= h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Options for [`integrate_exponential`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialOptions {
    /// Upper bound on the fixed step; the interval is split into the smallest
    /// number of equal steps not exceeding it.
    pub max_step: f64,
}

impl Default for ExponentialOptions {
    fn default() -> Self {
        Self { max_step: 0.02 }
    }
}

/// Integrate `y' = −i·diag·y + coupling(t, y)` from `t0` to `t1` with fixed-step
/// ETDRK4. The diagonal part is propagated exactly; `coupling` must write
/// `N(t, y)` into its output.
pub fn integrate_exponential<F>(
    diag: &[f64],
    mut coupling: F,
    y0: &[Complex64],
    t0: f64,
    t1: f64,
    opts: &ExponentialOptions,
) -> Result<Vec<Complex64>, IntegrationError>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    if diag.len() != y0.len() {
        return Err(IntegrationError::InvalidOptions(
            "diagonal length differs from state length".into(),
        ));
    }
    if !(opts.max_step > 0.0) {
        return Err(IntegrationError::InvalidOptions("max_step must be positive".into()));
    }
    let mut y = y0.to_vec();
    if t1 == t0 {
        return Ok(y);
    }
    let steps = ((t1 - t0).abs() / opts.max_step).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let coeffs = EtdCoefficients::new(diag, h);

    let dim = y.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut nu = vec![zero; dim];
    let mut na = vec![zero; dim];
    let mut nb = vec![zero; dim];
    let mut nc = vec![zero; dim];
    let mut a = vec![zero; dim];
    let mut b = vec![zero; dim];
    let mut c = vec![zero; dim];

    for step in 0..steps {
        let t = t0 + step as f64 * h;
        let t_half = t + 0.5 * h;
        let t_end = if step + 1 == steps { t1 } else { t + h };
        coupling(t, &y, &mut nu);
        for i in 0..dim {
            a[i] = coeffs.e2[i] * y[i] + coeffs.q[i] * nu[i];
        }
        coupling(t_half, &a, &mut na);
        for i in 0..dim {
            b[i] = coeffs.e2[i] * y[i] + coeffs.q[i] * na[i];
        }
        coupling(t_half, &b, &mut nb);
        for i in 0..dim {
            c[i] = coeffs.e2[i] * a[i] + coeffs.q[i] * (nb[i] * 2.0 - nu[i]);
        }
        coupling(t_end, &c, &mut nc);
        for i in 0..dim {
            y[i] =
                coeffs.e[i] * y[i] + coeffs.f1[i] * nu[i] + coeffs.f2[i] * (na[i] + nb[i]) * 2.0 + coeffs.f3[i] * nc[i];
        }
        check_finite(&y, t_end)?;
    }
    Ok(y)
}

/// Per-component ETDRK4 weights for `L = −i·diag` and step `h`.
struct EtdCoefficients {
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

impl EtdCoefficients {
    fn new(diag: &[f64], h: f64) -> Self {
        let n = diag.len();
        let mut out = Self {
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        // Components frequently share a diagonal value (all ground states sit
        // at zero); reuse the last computed set when possible.
        let mut cache: Vec<(f64, [Complex64; 6])> = Vec::new();
        for &d in diag {
            let set = match cache.iter().find(|(v, _)| *v == d) {
                Some((_, s)) => *s,
                None => {
                    let z = Complex64::new(0.0, -d * h);
                    let [p1, p2, p3] = phi123(z);
                    let [h1, _, _] = phi123(z * 0.5);
                    let s = [
                        z.exp(),
                        (z * 0.5).exp(),
                        h1 * (0.5 * h),
                        (p1 - p2 * 3.0 + p3 * 4.0) * h,
                        (p2 - p3 * 2.0) * h,
                        (p3 * 4.0 - p2) * h,
                    ];
                    cache.push((d, s));
                    s
                }
            };
            out.e.push(set[0]);
            out.e2.push(set[1]);
            out.q.push(set[2]);
            out.f1.push(set[3]);
            out.f2.push(set[4]);
            out.f3.push(set[5]);
        }
        out
    }
}

/// `φ1, φ2, φ3` with `φ_k(z) = Σ_j z^j / (j + k)!`.
fn phi123(z: Complex64) -> [Complex64; 3] {
    if z.norm() < 1.0 {
        phi123_series(z)
    } else {
        phi123_closed(z)
    }
}

fn phi123_series(z: Complex64) -> [Complex64; 3] {
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (k, slot) in out.iter_mut().enumerate() {
        // term_j = z^j / (j + k + 1)!
        let mut fact = (1..=k + 1).map(|v| v as f64).product::<f64>();
        let mut pow = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..30 {
            if j > 0 {
                pow *= z;
                fact *= (j + k + 1) as f64;
            }
            sum += pow / fact;
        }
        *slot = sum;
    }
    out
}

fn phi123_closed(z: Complex64) -> [Complex64; 3] {
    let ez = z.exp();
    let one = Complex64::new(1.0, 0.0);
    let p1 = (ez - one) / z;
    let p2 = (ez - one - z) / (z * z);
    let p3 = (ez - one - z - z * z * 0.5) / (z * z * z);
    [p1, p2, p3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn exponential_decay() {
        let y = integrate(
            |_, y, dy| dy[0] = -y[0],
            &[c(1.0)],
            0.0,
            1.0,
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!((y[0].re - (-1.0f64).exp()).abs() < 1e-9);
        assert!(y[0].im.abs() < 1e-15);
    }

    #[test]
    fn rotation_conserves_norm() {
        let w = 7.0;
        let y = integrate(
            |_, y, dy| dy[0] = Complex64::i() * w * y[0],
            &[Complex64::new(0.6, 0.8)],
            0.0,
            1.0,
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!((y[0].norm() - 1.0).abs() < 1e-9);
        let exact = Complex64::new(0.6, 0.8) * Complex64::from_polar(1.0, w);
        assert!((y[0] - exact).norm() < 1e-8);
    }

    fn rabi_rhs(omega: f64) -> impl FnMut(f64, &[Complex64], &mut [Complex64]) {
        // H = Ω/2 σx, y' = −iHy
        move |_, y, dy| {
            let mi = Complex64::new(0.0, -0.5 * omega);
            dy[0] = mi * y[1];
            dy[1] = mi * y[0];
        }
    }

    /// Classical RK4 with many fixed steps, used as an independent reference.
    fn rk4_fixed<F>(mut f: F, y0: &[Complex64], t0: f64, t1: f64, n: usize) -> Vec<Complex64>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let h = (t1 - t0) / n as f64;
        let d = y0.len();
        let mut y = y0.to_vec();
        let z = Complex64::new(0.0, 0.0);
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![z; d], vec![z; d], vec![z; d], vec![z; d], vec![z; d]);
        for s in 0..n {
            let t = t0 + s as f64 * h;
            f(t, &y, &mut k1);
            for i in 0..d {
                tmp[i] = y[i] + k1[i] * (h / 2.0);
            }
            f(t + h / 2.0, &tmp, &mut k2);
            for i in 0..d {
                tmp[i] = y[i] + k2[i] * (h / 2.0);
            }
            f(t + h / 2.0, &tmp, &mut k3);
            for i in 0..d {
                tmp[i] = y[i] + k3[i] * h;
            }
            f(t + h, &tmp, &mut k4);
            for i in 0..d {
                y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            }
        }
        y
    }

    #[test]
    fn pi_pulse_inverts_population() {
        let omega = 1.3;
        let dur = PI / omega;
        let y0 = [c(1.0), c(0.0)];
        let y = integrate(rabi_rhs(omega), &y0, 0.0, dur, &IntegratorOptions::default()).unwrap();
        assert!((y[1].norm_sqr() - 1.0).abs() < 1e-8);
        let oracle = rk4_fixed(rabi_rhs(omega), &y0, 0.0, dur, 100_000);
        assert!((y[1] - oracle[1]).norm() < 1e-8);
        assert!((oracle[1].norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tighter_tolerance_does_not_increase_error() {
        let omega = 1.3;
        let dur = PI / omega;
        let y0 = [c(1.0), c(0.0)];
        let oracle = rk4_fixed(rabi_rhs(omega), &y0, 0.0, dur, 100_000);
        let mut prev = f64::INFINITY;
        for tol in [1e-4, 5e-5, 2.5e-5, 1.25e-5, 6.25e-6] {
            let y = integrate(rabi_rhs(omega), &y0, 0.0, dur, &IntegratorOptions::with_tol(tol)).unwrap();
            let err = (y[0] - oracle[0]).norm() + (y[1] - oracle[1]).norm();
            assert!(err <= prev * 1.0001, "tol {tol}: {err} > {prev}");
            prev = err;
        }
    }

    #[test]
    fn forward_then_backward_returns_start() {
        let tol = 1e-9;
        let opts = IntegratorOptions::with_tol(tol);
        let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
            let w = Complex64::new(0.0, -(1.0 + 0.5 * t.sin()));
            dy[0] = w * y[1];
            dy[1] = w * y[0] + Complex64::new(0.0, -0.3) * y[1];
        };
        let y0 = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.9)];
        let fwd = integrate(rhs, &y0, 0.0, 5.0, &opts).unwrap();
        let back = integrate(rhs, &fwd, 5.0, 0.0, &opts).unwrap();
        for i in 0..2 {
            assert!((back[i] - y0[i]).norm() < 100.0 * tol, "{:?}", back);
        }
    }

    #[test]
    fn step_budget_exhaustion_reports_state() {
        let opts = IntegratorOptions {
            max_steps: 3,
            ..IntegratorOptions::default()
        };
        let err = integrate(rabi_rhs(50.0), &[c(1.0), c(0.0)], 0.0, 100.0, &opts).unwrap_err();
        match err {
            IntegrationError::MaxSteps { t, y, .. } => {
                assert!(t > 0.0 && t < 100.0);
                assert_eq!(y.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nan_rhs_is_numerical_failure() {
        let err = integrate(
            |_, _, dy| dy[0] = Complex64::new(f64::NAN, 0.0),
            &[c(1.0)],
            0.0,
            1.0,
            &IntegratorOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, IntegrationError::NonFinite { .. }));
    }

    #[test]
    fn zero_length_interval_is_identity() {
        let y = integrate(|_, _, _| {}, &[c(2.0)], 1.0, 1.0, &IntegratorOptions::default()).unwrap();
        assert_eq!(y[0], c(2.0));
    }

    #[test]
    fn bad_options_rejected() {
        let opts = IntegratorOptions {
            rel_tol: 0.0,
            ..IntegratorOptions::default()
        };
        assert!(integrate(|_, _, _| {}, &[c(1.0)], 0.0, 1.0, &opts).is_err());
    }

    #[test]
    fn phi_functions_continuous_across_branch() {
        for ang in [0.0, 0.7, PI / 2.0, 2.5, PI] {
            let z = Complex64::from_polar(1.0, ang);
            let a = phi123_series(z);
            let b = phi123_closed(z);
            for k in 0..3 {
                assert!((a[k] - b[k]).norm() < 1e-13, "{k} {z}: {} {}", a[k], b[k]);
            }
        }
        let p = phi123(Complex64::new(0.0, 0.0));
        assert!((p[0] - 1.0).norm() < 1e-15);
        assert!((p[1] - 0.5).norm() < 1e-15);
        assert!((p[2] - 1.0 / 6.0).norm() < 1e-15);
    }

    #[test]
    fn exponential_matches_dormand_prince_on_stiff_oscillator() {
        // Two ground-like levels coupled slowly to a level with a large shift.
        let shift = 400.0;
        let diag = [0.0, 0.0, shift];
        let coupling = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
            let g = Complex64::new(0.0, -0.5 * (1.0 + 0.3 * (0.7 * t).cos()));
            dy[0] = g * y[1];
            dy[1] = g * (y[0] + y[2]);
            dy[2] = g * y[1];
        };
        let y0 = [c(1.0), c(0.0), c(0.0)];
        let full = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
            coupling(t, y, dy);
            dy[2] += Complex64::new(0.0, -shift) * y[2];
        };
        let dp = integrate(full, &y0, 0.0, 6.0, &IntegratorOptions::with_tol(1e-13)).unwrap();
        let mut last = f64::INFINITY;
        for h in [0.02, 0.01, 0.005, 0.0025] {
            let opts = ExponentialOptions { max_step: h };
            let exp = integrate_exponential(&diag, coupling, &y0, 0.0, 6.0, &opts).unwrap();
            let err = (0..3).map(|i| (exp[i] - dp[i]).norm()).fold(0.0, f64::max);
            assert!(err < last, "h = {h}: {err:e} after {last:e}");
            last = err;
        }
        assert!(last < 1e-8, "{last:e}");
    }
}
