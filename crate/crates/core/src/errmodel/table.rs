use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{two_level_transfer, Propagator};
use crate::error::{Error, Result};
use crate::pulse::SechypParams;

const FORMAT_TAG: &str = "blockade-gate transfer table v1";
const NODE_SNAP: f64 = 1e-9;

/// Grid of a transfer table: `n0 = 1..=n_max` and `points` equally spaced
/// values of `t_g/t_fwhm` on `[tg_min, tg_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableGrid {
    pub n_max: usize,
    pub tg_min: f64,
    pub tg_max: f64,
    pub points: usize,
}

impl Default for TableGrid {
    fn default() -> Self {
        Self {
            n_max: 50,
            tg_min: 2.0,
            tg_max: 10.0,
            points: 100,
        }
    }
}

impl TableGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 || self.n_max > 50 {
            return Err(Error::domain(format!(
                "table n_max must lie in 1..=50, got {}",
                self.n_max
            )));
        }
        if !(self.tg_min >= 2.0 && self.tg_max <= 10.0 && self.tg_min < self.tg_max) {
            return Err(Error::domain(format!(
                "table range [{}, {}] must be a nonempty subinterval of [2, 10]",
                self.tg_min, self.tg_max
            )));
        }
        if self.points < 2 {
            return Err(Error::domain("table needs at least two tg_ratio points"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.tg_max - self.tg_min) / (self.points - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j + 1 == self.points {
            self.tg_max
        } else {
            self.tg_min + j as f64 * self.step()
        }
    }
}

/// Tabulated transfer factors `T(n0, t_g/t_fwhm)` for one pulse family
/// (fixed `μ` and `β/Ω0`); `T` does not depend on `Ω0` itself.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferTable {
    pub mu: f64,
    pub beta_ratio: f64,
    pub grid: TableGrid,
    /// Row-major: `values[(n0 − 1)·points + j]`.
    values: Vec<Complex64>,
}

/// Tabulate `T` by simulating a two-level system at drive `√n0·Ω(t)` with
/// `θ = π` for every grid node.
pub fn build_transfer_table(mu: f64, beta_ratio: f64, grid: TableGrid, prop: &Propagator) -> Result<TransferTable> {
    grid.validate()?;
    let values = (0..grid.n_max * grid.points)
        .into_par_iter()
        .map(|idx| {
            let (n0, j) = (idx / grid.points + 1, idx % grid.points);
            let p = SechypParams::from_ratios(1.0, mu, beta_ratio, grid.node(j))?;
            two_level_transfer(&p, (n0 as f64).sqrt(), std::f64::consts::PI, prop)
        })
        .collect::<Result<Vec<_>>>()?;
    let table = TransferTable {
        mu,
        beta_ratio,
        grid,
        values,
    };
    table.check_bounds()?;
    Ok(table)
}

impl TransferTable {
    /// A table with `T ≡ 1`: perfect transfer, leaving only the phase and
    /// dephasing terms of the error.
    pub fn ideal(mu: f64, beta_ratio: f64, grid: TableGrid) -> Result<Self> {
        grid.validate()?;
        Ok(Self {
            mu,
            beta_ratio,
            grid,
            values: vec![Complex64::new(1.0, 0.0); grid.n_max * grid.points],
        })
    }

    fn check_bounds(&self) -> Result<()> {
        if let Some(v) = self.values.iter().find(|v| !(v.norm() <= 1.0 + 1e-8)) {
            return Err(Error::TableMismatch(format!("entry with |T| = {} exceeds 1", v.norm())));
        }
        Ok(())
    }

    pub fn node_value(&self, n0: usize, j: usize) -> Complex64 {
        self.values[(n0 - 1) * self.grid.points + j]
    }

    /// Fail unless the table was built for this pulse family.
    pub fn check_family(&self, mu: f64, beta_ratio: f64) -> Result<()> {
        if self.mu != mu || self.beta_ratio != beta_ratio {
            return Err(Error::TableMismatch(format!(
                "table built for mu = {}, beta_ratio = {}; requested mu = {mu}, beta_ratio = {beta_ratio}",
                self.mu, self.beta_ratio
            )));
        }
        Ok(())
    }

    pub fn contains(&self, n0: f64, tg_ratio: f64) -> bool {
        (1.0..=self.grid.n_max as f64).contains(&n0) && (self.grid.tg_min..=self.grid.tg_max).contains(&tg_ratio)
    }

    /// Bilinear interpolation in `(n0, t_g/t_fwhm)`. Queries outside the grid
    /// are refused.
    pub fn interpolate(&self, n0: f64, tg_ratio: f64) -> Result<Complex64> {
        if !self.contains(n0, tg_ratio) {
            return Err(Error::Extrapolation { n0, ratio: tg_ratio });
        }
        let (i, fi) = split(n0 - 1.0, self.grid.n_max);
        let (j, fj) = split((tg_ratio - self.grid.tg_min) / self.grid.step(), self.grid.points);
        let v = |a: usize, b: usize| self.values[a * self.grid.points + b];
        let lo = if fj == 0.0 {
            v(i, j)
        } else {
            v(i, j) + (v(i, j + 1) - v(i, j)) * fj
        };
        if fi == 0.0 {
            return Ok(lo);
        }
        let hi = if fj == 0.0 {
            v(i + 1, j)
        } else {
            v(i + 1, j) + (v(i + 1, j + 1) - v(i + 1, j)) * fj
        };
        Ok(lo + (hi - lo) * fi)
    }

    /// `T(n0)` for `n0 = 1..=n` at one duration ratio.
    pub fn factors(&self, n: usize, tg_ratio: f64) -> Result<Vec<Complex64>> {
        (1..=n).map(|n0| self.interpolate(n0 as f64, tg_ratio)).collect()
    }

    /// CSV with `#` header lines carrying the family and grid, then
    /// `n0,tg_ratio,re,im` rows in row-major order.
    pub fn to_csv_string(&self) -> String {
        let g = &self.grid;
        let mut s = String::new();
        let _ = writeln!(s, "# {FORMAT_TAG}");
        let _ = writeln!(s, "# mu={}", self.mu);
        let _ = writeln!(s, "# beta_ratio={}", self.beta_ratio);
        let _ = writeln!(s, "# n_max={}", g.n_max);
        let _ = writeln!(s, "# tg_min={}", g.tg_min);
        let _ = writeln!(s, "# tg_max={}", g.tg_max);
        let _ = writeln!(s, "# points={}", g.points);
        s.push_str("n0,tg_ratio,re,im\n");
        for n0 in 1..=g.n_max {
            for j in 0..g.points {
                let v = self.node_value(n0, j);
                let _ = writeln!(s, "{n0},{},{},{}", g.node(j), v.re, v.im);
            }
        }
        s
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut meta = std::collections::HashMap::new();
        let mut tagged = false;
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let body = line.trim_start_matches('#').trim();
            if body == FORMAT_TAG {
                tagged = true;
            } else if let Some((k, v)) = body.split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        if !tagged {
            return Err(Error::TableMismatch(format!("missing '{FORMAT_TAG}' header")));
        }
        let get = |k: &str| -> Result<String> {
            meta.get(k)
                .cloned()
                .ok_or_else(|| Error::TableMismatch(format!("missing header field {k}")))
        };
        let num = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| Error::TableMismatch(format!("bad {k}"))) };
        let int = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| Error::TableMismatch(format!("bad {k}"))) };
        let grid = TableGrid {
            n_max: int("n_max")?,
            tg_min: num("tg_min")?,
            tg_max: num("tg_max")?,
            points: int("points")?,
        };
        grid.validate()?;
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut values = Vec::with_capacity(grid.n_max * grid.points);
        for (idx, rec) in reader.deserialize::<(usize, f64, f64, f64)>().enumerate() {
            let (n0, tg, re, im) = rec?;
            let (want_n0, j) = (idx / grid.points + 1, idx % grid.points);
            if n0 != want_n0 || (tg - grid.node(j)).abs() > 1e-12 * grid.tg_max {
                return Err(Error::TableMismatch(format!("row {idx} is out of order")));
            }
            values.push(Complex64::new(re, im));
        }
        if values.len() != grid.n_max * grid.points {
            return Err(Error::TableMismatch(format!(
                "expected {} rows, found {}",
                grid.n_max * grid.points,
                values.len()
            )));
        }
        let table = Self {
            mu: num("mu")?,
            beta_ratio: num("beta_ratio")?,
            grid,
            values,
        };
        table.check_bounds()?;
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_csv_str(&fs::read_to_string(path)?)
    }
}

/// Reuse the table at `path` if it was built for the same family and grid;
/// otherwise rebuild and overwrite it. The flag is true when a build ran.
pub fn load_or_build(
    path: &Path,
    mu: f64,
    beta_ratio: f64,
    grid: TableGrid,
    prop: &Propagator,
) -> Result<(TransferTable, bool)> {
    if let Ok(t) = TransferTable::load(path) {
        if t.mu == mu && t.beta_ratio == beta_ratio && t.grid == grid {
            return Ok((t, false));
        }
    }
    let t = build_transfer_table(mu, beta_ratio, grid, prop)?;
    t.save(path)?;
    Ok((t, true))
}

/// Integer cell and fraction for coordinate `x ∈ [0, len − 1]`, snapping to
/// nodes so node queries return stored values exactly.
fn split(x: f64, len: usize) -> (usize, f64) {
    let r = x.round();
    let x = if (x - r).abs() < NODE_SNAP { r } else { x };
    let i = (x.floor() as usize).min(len - 1);
    if i == len - 1 {
        return (i, 0.0);
    }
    (i, x - i as f64)
}
