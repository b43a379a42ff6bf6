use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Finitely supported real sequence indexed from 1. Zeros are never stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseSequence {
    entries: BTreeMap<usize, f64>,
}

impl SparseSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a sequence from `(index, value)` pairs; later pairs overwrite
    /// earlier ones. Panics on index 0.
    pub fn from_pairs<I: IntoIterator<Item = (usize, f64)>>(pairs: I) -> Self {
        let mut s = Self::new();
        for (i, v) in pairs {
            s.set(i, v);
        }
        s
    }

    /// Sequence with `values[k]` at index `k + 1`.
    pub fn from_dense(values: &[f64]) -> Self {
        Self::from_pairs(values.iter().enumerate().map(|(k, v)| (k + 1, *v)))
    }

    pub fn set(&mut self, index: usize, value: f64) {
        assert!(index >= 1, "sequence indices start at 1");
        if value == 0.0 {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries.get(&index).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(i, v)| (*i, *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest index in the support, 0 for the zero sequence.
    pub fn max_support(&self) -> usize {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_pairs(self.iter().map(|(i, v)| (i, s * v)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, v) in other.iter() {
            let w = out.get(i) + v;
            out.set(i, w);
        }
        out
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        let m = self.sup_norm();
        if m == 0.0 {
            return 0.0;
        }
        if p == 1.0 {
            return self.entries.values().map(|v| v.abs()).sum();
        }
        m * self
            .entries
            .values()
            .map(|v| (v.abs() / m).powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries.values().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}
