//! Effective blockade shift of the symmetric doubly excited state.
//!
//! The pair-shift operator is diagonal over the `n_ee = n0(n0−1)/2` doubly
//! excited states. Starting from the uniform superposition `d^(1)`, a
//! three-term (Lanczos) chain tridiagonalizes it; the backward continued
//! fraction over the chain gives the effective shift felt by `|B_ee⟩`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::register::ShiftMatrix;

const BREAKDOWN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockadeChain {
    pub n0: usize,
    /// Pair order of the coefficient vectors: `(q, p)`, `q < p`, lexicographic.
    pub pairs: Vec<(usize, usize)>,
    /// Orthonormal `d^(k)`, `k = 1..=K`.
    pub vectors: Vec<Vec<f64>>,
    /// `Δω^(k)`, `k = 1..=K`.
    pub shifts: Vec<f64>,
    /// `Ω^(k)`, `k = 2..=K` (so `couplings[0]` couples levels 1 and 2).
    pub couplings: Vec<f64>,
    /// `max |Δω_qp|`, the scale of the breakdown and singularity tests.
    pub scale: f64,
}

impl BlockadeChain {
    pub fn n_ee(&self) -> usize {
        self.pairs.len()
    }

    /// Chain length `K`.
    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    /// Rows `k,shift,coupling,d_q_p…` for debugging.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["k".to_string(), "shift".into(), "coupling".into()];
        header.extend(self.pairs.iter().map(|(q, p)| format!("d_{q}_{p}")));
        w.write_record(&header)?;
        for k in 0..self.len() {
            let mut row = vec![
                (k + 1).to_string(),
                self.shifts[k].to_string(),
                if k == 0 {
                    String::new()
                } else {
                    self.couplings[k - 1].to_string()
                },
            ];
            row.extend(self.vectors[k].iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Build the chain for the `n0 × n0` shift matrix of the driven qubits.
pub fn build_chain(shifts: &ShiftMatrix) -> Result<BlockadeChain> {
    let n0 = shifts.n();
    if n0 < 2 {
        return Err(Error::domain("a chain needs at least two driven qubits"));
    }
    let mut pairs = Vec::with_capacity(n0 * (n0 - 1) / 2);
    let mut diag = Vec::with_capacity(pairs.capacity());
    for q in 0..n0 {
        for p in q + 1..n0 {
            let v = shifts.get(q, p);
            if !v.is_finite() {
                return Err(Error::domain(format!("pair ({q}, {p}) has non-finite shift {v}")));
            }
            pairs.push((q, p));
            diag.push(v);
        }
    }
    let n_ee = pairs.len();
    let scale = diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let first = vec![1.0 / (n_ee as f64).sqrt(); n_ee];
    let shift_of = |d: &[f64]| d.iter().zip(&diag).map(|(x, w)| x * x * w).sum::<f64>();

    let mut chain = BlockadeChain {
        n0,
        pairs,
        shifts: vec![shift_of(&first)],
        vectors: vec![first],
        couplings: Vec::new(),
        scale,
    };
    while chain.len() < n_ee {
        let prev = chain.vectors.last().unwrap();
        let mut f: Vec<f64> = prev.iter().zip(&diag).map(|(d, w)| d * w).collect();
        // two passes of classical Gram–Schmidt against the whole chain
        for _ in 0..2 {
            for v in &chain.vectors {
                let c = dot(v, &f);
                for (fi, vi) in f.iter_mut().zip(v) {
                    *fi -= c * vi;
                }
            }
        }
        let norm = dot(&f, &f).sqrt();
        if norm < BREAKDOWN_TOL * scale || scale == 0.0 {
            break;
        }
        for fi in f.iter_mut() {
            *fi /= norm;
        }
        let coupling = 2.0 * prev.iter().zip(&f).zip(&diag).map(|((a, b), w)| a * b * w).sum::<f64>();
        chain.couplings.push(coupling);
        chain.shifts.push(shift_of(&f));
        chain.vectors.push(f);
    }
    Ok(chain)
}

/// `Δω_eff^(1)` from `Δω_eff^(K) = Δω^(K)`,
/// `Δω_eff^(k) = Δω^(k) − (Ω^(k+1))² / (4 Δω_eff^(k+1))`.
pub fn effective_shift(chain: &BlockadeChain) -> Result<f64> {
    let k_max = chain.len();
    if k_max == 0 {
        return Err(Error::domain("empty chain"));
    }
    let mut eff = chain.shifts[k_max - 1];
    for k in (0..k_max - 1).rev() {
        if eff.abs() <= BREAKDOWN_TOL * chain.scale {
            return Err(Error::SingularRecursion {
                level: k + 2,
                context: None,
            });
        }
        let c = chain.couplings[k];
        eff = chain.shifts[k] - c * c / (4.0 * eff);
    }
    Ok(eff)
}

/// Effective shift for the driven subset `members` of a register; `∞` when
/// the subset has fewer than two qubits or all its shifts are infinite.
pub fn subset_effective_shift(shifts: &ShiftMatrix, members: &[usize]) -> Result<f64> {
    if members.len() < 2 {
        return Ok(f64::INFINITY);
    }
    let sub = shifts.restricted(members);
    if sub.all_infinite() {
        return Ok(f64::INFINITY);
    }
    let chain = build_chain(&sub)?;
    effective_shift(&chain).map_err(|e| match e {
        Error::SingularRecursion { level, .. } => Error::SingularRecursion {
            level,
            context: Some(format!("driven qubits {members:?}")),
        },
        other => other,
    })
}
