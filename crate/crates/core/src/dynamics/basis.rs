use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::register::RegisterConfig;

/// Local state of one qubit, ordered `0 < 1 < e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Zero = 0,
    One = 1,
    Excited = 2,
}

impl Level {
    pub fn symbol(self) -> char {
        match self {
            Level::Zero => '0',
            Level::One => '1',
            Level::Excited => 'e',
        }
    }
}

/// Maximum number of simultaneously excited qubits kept in the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Single = 1,
    Double = 2,
}

impl Truncation {
    /// One excitation when every shift is infinite, two when all are finite.
    pub fn for_register(cfg: &RegisterConfig) -> Result<Self> {
        if cfg.n < 2 || cfg.shifts.all_infinite() {
            Ok(Truncation::Single)
        } else if !cfg.shifts.any_infinite() {
            Ok(Truncation::Double)
        } else {
            Err(Error::config(
                "mixed finite and infinite shifts: no truncation represents both",
            ))
        }
    }

    pub fn max_excitations(self) -> usize {
        self as usize
    }
}

/// Register configurations over `{0, 1, e}^n` with at most `truncation`
/// excitations, in lexicographic order (qubit 0 most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    n: usize,
    truncation: Truncation,
    states: Vec<Vec<Level>>,
    index: HashMap<Vec<Level>, usize>,
}

impl Basis {
    pub fn new(n: usize, truncation: Truncation) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("basis needs at least one qubit"));
        }
        if n > 24 {
            return Err(Error::domain(format!("full basis for n = {n} is too large")));
        }
        let mut states = Vec::new();
        let mut current = Vec::with_capacity(n);
        fill(n, truncation.max_excitations(), &mut current, &mut states);
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self {
            n,
            truncation,
            states,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &[Level] {
        &self.states[i]
    }

    pub fn states(&self) -> impl Iterator<Item = &[Level]> {
        self.states.iter().map(|s| s.as_slice())
    }

    pub fn index_of(&self, levels: &[Level]) -> Option<usize> {
        self.index.get(levels).copied()
    }

    pub fn label(&self, i: usize) -> String {
        self.states[i].iter().map(|l| l.symbol()).collect()
    }

    /// Index of the computational state `bits` (bit `n−1−q` is qubit `q`).
    pub fn computational_index(&self, bits: usize) -> usize {
        let levels: Vec<Level> = (0..self.n)
            .map(|q| {
                if (bits >> (self.n - 1 - q)) & 1 == 1 {
                    Level::One
                } else {
                    Level::Zero
                }
            })
            .collect();
        self.index[&levels]
    }

    pub fn excitations(&self, i: usize) -> usize {
        excitation_count(&self.states[i])
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} qubits, ≤{} excitation(s), {} states",
            self.n,
            self.truncation.max_excitations(),
            self.len()
        )
    }
}

pub(crate) fn excitation_count(levels: &[Level]) -> usize {
    levels.iter().filter(|&&l| l == Level::Excited).count()
}

fn fill(n: usize, budget: usize, current: &mut Vec<Level>, out: &mut Vec<Vec<Level>>) {
    if current.len() == n {
        out.push(current.clone());
        return;
    }
    for level in [Level::Zero, Level::One, Level::Excited] {
        let used = level == Level::Excited;
        if used && budget == 0 {
            continue;
        }
        current.push(level);
        fill(n, budget - used as usize, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_order() {
        let b = Basis::new(2, Truncation::Single).unwrap();
        let labels: Vec<_> = (0..b.len()).map(|i| b.label(i)).collect();
        assert_eq!(labels, ["00", "01", "0e", "10", "11", "1e", "e0", "e1"]);
        let b = Basis::new(2, Truncation::Double).unwrap();
        assert_eq!(b.len(), 9);
        assert_eq!(b.label(8), "ee");
        // 2^n + n 2^(n-1) + C(n,2) 2^(n-2)
        assert_eq!(Basis::new(5, Truncation::Double).unwrap().len(), 32 + 80 + 80);
    }

    #[test]
    fn computational_lookup() {
        let b = Basis::new(3, Truncation::Double).unwrap();
        assert_eq!(b.label(b.computational_index(0b011)), "011");
        assert_eq!(b.label(b.computational_index(0b100)), "100");
        for i in 0..b.len() {
            assert_eq!(b.index_of(b.state(i)), Some(i));
            assert!(b.excitations(i) <= 2);
        }
    }
}
