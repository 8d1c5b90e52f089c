//! Register configuration and blockade-shift sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the generator used by [`sample_shifts`], recorded in output metadata.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64)";

/// Symmetric matrix of pairwise blockade shifts `Δω_qp` (angular frequency).
///
/// Entries may be `+∞` (no doubly excited dynamics). The diagonal is unused
/// and stored as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftMatrix {
    n: usize,
    data: Vec<f64>,
}

impl ShiftMatrix {
    pub fn uniform(n: usize, shift: f64) -> Self {
        let mut data = vec![shift; n * n];
        for q in 0..n {
            data[q * n + q] = 0.0;
        }
        Self { n, data }
    }

    pub fn infinite(n: usize) -> Self {
        Self::uniform(n, f64::INFINITY)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::config("shift matrix must be square"));
        }
        let mut data = vec![0.0; n * n];
        for q in 0..n {
            for p in 0..n {
                if q == p {
                    continue;
                }
                let (a, b) = (rows[q][p], rows[p][q]);
                if a != b && !(a.is_nan() && b.is_nan()) {
                    return Err(Error::config(format!(
                        "shift matrix not symmetric at ({q}, {p}): {a} vs {b}"
                    )));
                }
                if a.is_nan() {
                    return Err(Error::config("shift matrix contains NaN"));
                }
                data[q * n + p] = a;
            }
        }
        Ok(Self { n, data })
    }

    /// Build from the upper-triangle pair shifts in `(0,1), (0,2), …, (n−2,n−1)` order.
    pub fn from_pairs(n: usize, pairs: &[f64]) -> Result<Self> {
        if pairs.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::config(format!(
                "expected {} pair shifts for n = {n}, got {}",
                n * n.saturating_sub(1) / 2,
                pairs.len()
            )));
        }
        let mut m = Self::uniform(n, 0.0);
        let mut it = pairs.iter();
        for q in 0..n {
            for p in q + 1..n {
                let v = *it.next().expect("length checked");
                m.data[q * n + p] = v;
                m.data[p * n + q] = v;
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, q: usize, p: usize) -> f64 {
        self.data[q * self.n + p]
    }

    /// Upper-triangle pair shifts in lexicographic pair order.
    pub fn pairs(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for q in 0..self.n {
            for p in q + 1..self.n {
                out.push(self.get(q, p));
            }
        }
        out
    }

    /// Shifts among the qubits in `subset` (ascending indices), as a new matrix.
    pub fn restricted(&self, subset: &[usize]) -> ShiftMatrix {
        let k = subset.len();
        let mut m = Self::uniform(k, 0.0);
        for (i, &q) in subset.iter().enumerate() {
            for (j, &p) in subset.iter().enumerate() {
                if i != j {
                    m.data[i * k + j] = self.get(q, p);
                }
            }
        }
        m
    }

    pub fn all_infinite(&self) -> bool {
        self.pairs().iter().all(|v| v.is_infinite())
    }

    pub fn any_infinite(&self) -> bool {
        self.pairs().iter().any(|v| v.is_infinite())
    }

    /// Returns the common value if every pair has the same shift.
    pub fn uniform_value(&self) -> Option<f64> {
        let pairs = self.pairs();
        let first = *pairs.first()?;
        pairs.iter().all(|&v| v == first).then_some(first)
    }

    pub fn min_abs(&self) -> f64 {
        self.pairs().iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.pairs().iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Apply a qubit relabeling: new qubit `i` is old qubit `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> ShiftMatrix {
        self.restricted(perm)
    }
}

/// Distribution of random pair shifts: `1/|Δω|` uniform on `[1/max_abs, 1/min_abs]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftDistribution {
    pub min_abs: f64,
    pub max_abs: f64,
    /// Mixed-sign mode: each pair's sign is flipped with probability 1/2.
    #[serde(default)]
    pub signed: bool,
    #[serde(default)]
    pub seed: u64,
}

impl ShiftDistribution {
    pub fn new(min_abs: f64, max_abs: f64, signed: bool, seed: u64) -> Result<Self> {
        let d = Self {
            min_abs,
            max_abs,
            signed,
            seed,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_abs > 0.0 && self.max_abs > self.min_abs && self.max_abs.is_finite()) {
            return Err(Error::domain(format!(
                "shift distribution requires 0 < min_abs < max_abs < ∞ (got {}, {})",
                self.min_abs, self.max_abs
            )));
        }
        Ok(())
    }

    /// Draw one pair shift from an existing generator.
    pub fn draw(&self, rng: &mut impl Rng) -> f64 {
        let u = rng.random_range(1.0 / self.max_abs..=1.0 / self.min_abs);
        // guard the endpoints against rounding in 1/u
        let mag = (1.0 / u).clamp(self.min_abs, self.max_abs);
        if self.signed && rng.random_bool(0.5) {
            -mag
        } else {
            mag
        }
    }
}

/// Sample a symmetric shift matrix for `n` qubits, deterministic in `dist.seed`.
///
/// Pairs are drawn in lexicographic `(q, p)` order, `q < p`.
pub fn sample_shifts(dist: &ShiftDistribution, n: usize) -> Result<ShiftMatrix> {
    dist.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(dist.seed);
    let pairs: Vec<f64> = (0..n * n.saturating_sub(1) / 2).map(|_| dist.draw(&mut rng)).collect();
    ShiftMatrix::from_pairs(n, &pairs)
}

/// Harmonic mean of the pair shifts, `1 / ⟨1/Δω⟩`.
pub fn average_shift(shifts: &ShiftMatrix) -> Result<f64> {
    harmonic_mean(&shifts.pairs())
}

pub fn harmonic_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("no pair shifts to average"));
    }
    if values.iter().any(|&v| v == 0.0) {
        return Err(Error::domain("zero blockade shift"));
    }
    let mean_inv = values.iter().map(|v| 1.0 / v).sum::<f64>() / values.len() as f64;
    Ok(1.0 / mean_inv)
}

/// Static description of an excitation-blockaded register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterConfig {
    pub n: usize,
    pub shifts: ShiftMatrix,
    /// Excited-state coherence time (may be infinite).
    pub t2: f64,
    /// Fraction of a pulse duration spent in the excited state, used in the
    /// dephasing exponent `γ = α t_g / T2`.
    pub alpha: f64,
}

impl RegisterConfig {
    pub fn new(shifts: ShiftMatrix, t2: f64, alpha: f64) -> Result<Self> {
        let cfg = Self {
            n: shifts.n(),
            shifts,
            t2,
            alpha,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn uniform(n: usize, shift: f64, t2: f64) -> Result<Self> {
        Self::new(ShiftMatrix::uniform(n, shift), t2, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("register needs at least one qubit"));
        }
        if self.shifts.n() != self.n {
            return Err(Error::config("shift matrix size differs from n"));
        }
        if !(self.t2 > 0.0) {
            return Err(Error::config("t2 must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::config("alpha must be positive"));
        }
        Ok(())
    }

    /// Blockade-regime advisory for a drive with peak `omega0` and sweep
    /// width `mu·beta`: both `√(2(n−1))·Ω0` and `μβ` should be far below the
    /// smallest pair shift. Returns the larger of the two ratios to
    /// `min|Δω|`; values well below one indicate the regime holds.
    pub fn blockade_ratio(&self, omega0: f64, mu: f64, beta: f64) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let min = self.shifts.min_abs();
        let drive = (2.0 * (self.n as f64 - 1.0)).sqrt() * omega0;
        drive.max(mu * beta) / min
    }
}

/// Shift specification as it appears in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShiftSpec {
    Uniform(f64),
    Matrix(Vec<Vec<f64>>),
    Distribution(ShiftDistribution),
}

impl ShiftSpec {
    pub fn realize(&self, n: usize) -> Result<ShiftMatrix> {
        match self {
            ShiftSpec::Uniform(v) => Ok(ShiftMatrix::uniform(n, *v)),
            ShiftSpec::Matrix(rows) => {
                let m = ShiftMatrix::from_rows(rows.clone())?;
                if m.n() != n {
                    return Err(Error::config("shift matrix size differs from n"));
                }
                Ok(m)
            }
            ShiftSpec::Distribution(d) => sample_shifts(d, n),
        }
    }
}

/// Register section of a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterFile {
    pub n: usize,
    pub shifts: ShiftSpec,
    #[serde(default = "infinite")]
    pub t2: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    /// Overrides the distribution seed when present.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn infinite() -> f64 {
    f64::INFINITY
}

fn one() -> f64 {
    1.0
}

impl RegisterFile {
    pub fn build(&self) -> Result<RegisterConfig> {
        let spec = match (&self.shifts, self.seed) {
            (ShiftSpec::Distribution(d), Some(seed)) => ShiftSpec::Distribution(ShiftDistribution { seed, ..*d }),
            (s, _) => s.clone(),
        };
        RegisterConfig::new(spec.realize(self.n)?, self.t2, self.alpha)
    }
}
