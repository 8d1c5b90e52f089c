//! The complex hyperbolic secant ("sechyp") pulse family.
//!
//! A pulse is `Ω(t) = Ω0 · sech(β(t − t_g/2))^(1 + iμ) · e^{iφ}` on `[0, t_g]`.
//! The chirp lives entirely in the complex phase of `Ω(t)`, so the Hamiltonians
//! built on top of it carry no separate detuning term.
//!
//! The complex power uses the real logarithm of `sech`, which is always
//! positive on the real line:
//! `sech(x)^(1 + iμ) = sech(x) · exp(iμ · ln sech(x))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ln(1 + √2)`, the half-width constant of `sech²`.
pub const LN_1_PLUS_SQRT2: f64 = 0.881_373_587_019_543;

/// Parameters of one sechyp pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SechypParams {
    /// Peak Rabi frequency Ω0 (angular frequency).
    pub omega0: f64,
    /// Dimensionless sweep parameter μ.
    pub mu: f64,
    /// Rate β (angular frequency).
    pub beta: f64,
    /// Cutoff duration t_g.
    pub t_cutoff: f64,
    /// Constant phase added to the drive (radians).
    pub phase_offset: f64,
}

impl SechypParams {
    pub fn new(omega0: f64, mu: f64, beta: f64, t_cutoff: f64) -> Result<Self> {
        let p = Self {
            omega0,
            mu,
            beta,
            t_cutoff,
            phase_offset: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Build a pulse from the dimensionless ratios used in config files:
    /// `beta_ratio = β/Ω0` and `tg_ratio = t_g / t_fwhm`.
    pub fn from_ratios(omega0: f64, mu: f64, beta_ratio: f64, tg_ratio: f64) -> Result<Self> {
        if !(beta_ratio > 0.0) || !(tg_ratio > 0.0) {
            return Err(Error::domain("beta_ratio and tg_ratio must be positive"));
        }
        let beta = beta_ratio * omega0;
        let t_fwhm = fwhm_for_beta(beta);
        Self::new(omega0, mu, beta, tg_ratio * t_fwhm)
    }

    /// The default family: Ω0 = 1, μ = 3, β = Ω0/μ, t_g = 6·t_fwhm.
    pub fn default_family() -> Self {
        Self::from_ratios(1.0, 3.0, 1.0 / 3.0, 6.0).expect("default family is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega0, self.mu, self.beta, self.t_cutoff, self.phase_offset]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::domain("pulse parameters must be finite"));
        }
        if !(self.omega0 > 0.0 && self.beta > 0.0 && self.t_cutoff > 0.0) {
            return Err(Error::domain(format!(
                "pulse requires omega0 > 0, beta > 0, t_cutoff > 0 (got {}, {}, {})",
                self.omega0, self.beta, self.t_cutoff
            )));
        }
        Ok(())
    }

    /// True when the pulse is in the regime where transfer is robust against
    /// Rabi-frequency variations: `Ω0 ≥ μβ` and `μ ≥ 2`.
    pub fn is_robust_regime(&self) -> bool {
        self.omega0 >= self.mu * self.beta && self.mu >= 2.0
    }

    /// Same pulse with the amplitude scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            omega0: self.omega0 * factor,
            ..*self
        }
    }

    /// `t_g / t_fwhm`.
    pub fn tg_ratio(&self) -> f64 {
        self.t_cutoff / derived_widths(self).0
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.t_cutoff).contains(&t) {
            return Err(Error::domain(format!(
                "time {t} outside pulse window [0, {}]",
                self.t_cutoff
            )));
        }
        Ok(())
    }

    /// Envelope without the domain check. Times are clamped into the pulse
    /// window so integrator stage times that overshoot by rounding are safe.
    pub(crate) fn envelope_clamped(&self, t: f64) -> Complex64 {
        let t = t.clamp(0.0, self.t_cutoff);
        let x = self.beta * (t - 0.5 * self.t_cutoff);
        let ln_sech = ln_sech(x);
        Complex64::from_polar(self.omega0 * ln_sech.exp(), self.mu * ln_sech + self.phase_offset)
    }
}

/// `ln sech(x)`, stable for large `|x|`.
fn ln_sech(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return 0.0;
    }
    std::f64::consts::LN_2 - a - (-2.0 * a).exp().ln_1p()
}

/// `t_fwhm = 2 ln(1 + √2) / β`.
pub fn fwhm_for_beta(beta: f64) -> f64 {
    2.0 * LN_1_PLUS_SQRT2 / beta
}

/// Complex Rabi frequency `Ω(t)`.
pub fn envelope(p: &SechypParams, t: f64) -> Result<Complex64> {
    p.check_time(t)?;
    Ok(p.envelope_clamped(t))
}

/// Time derivative of the drive phase, `−μβ tanh(β(t − t_g/2))`.
pub fn instantaneous_detuning(p: &SechypParams, t: f64) -> Result<f64> {
    p.check_time(t)?;
    Ok(-p.mu * p.beta * (p.beta * (t - 0.5 * p.t_cutoff)).tanh())
}

/// `Λ = ∫₀^{t_g} |Ω(t)|² dt = (2Ω0²/β) tanh(β t_g / 2)`.
pub fn pulse_area_lambda(p: &SechypParams) -> f64 {
    2.0 * p.omega0 * p.omega0 / p.beta * (0.5 * p.beta * p.t_cutoff).tanh()
}

/// `(t_fwhm, f_width)`: intensity FWHM and sweep width `μβ/π` (ordinary frequency).
pub fn derived_widths(p: &SechypParams) -> (f64, f64) {
    (fwhm_for_beta(p.beta), p.mu * p.beta / PI)
}

/// The second pulse of the pair: phase shifted by `π + θ`.
pub fn second_pulse(p: &SechypParams, theta: f64) -> SechypParams {
    SechypParams {
        phase_offset: p.phase_offset + PI + theta,
        ..*p
    }
}
