use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::state::{SpinState, WORD_BITS};
use crate::error::{Error, Result};

/// Diagonal problem Hamiltonian `Σ h_i z_i + Σ_{i<j} J_ij z_i z_j`.
///
/// Values are dimensionless. The adjacency lists are derived from the
/// coupling map and kept in sync by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemFile", into = "ProblemFile")]
pub struct IsingProblem {
    n: usize,
    h: Vec<f64>,
    couplings: BTreeMap<(usize, usize), f64>,
    #[serde(skip)]
    adjacency: Vec<Vec<(usize, f64)>>,
}

/// On-disk layout: `{"n": .., "h": [..], "couplings": [[i, j, J], ..]}`.
#[derive(Serialize, Deserialize)]
struct ProblemFile {
    n: usize,
    h: Vec<f64>,
    couplings: Vec<(usize, usize, f64)>,
}

impl TryFrom<ProblemFile> for IsingProblem {
    type Error = Error;

    fn try_from(file: ProblemFile) -> Result<Self> {
        IsingProblem::new(file.n, file.h, file.couplings)
    }
}

impl From<IsingProblem> for ProblemFile {
    fn from(p: IsingProblem) -> Self {
        ProblemFile {
            n: p.n,
            h: p.h,
            couplings: p.couplings.into_iter().map(|((i, j), v)| (i, j, v)).collect(),
        }
    }
}

impl IsingProblem {
    /// Pairs may be given in either orientation; they are stored as `i < j`.
    pub fn new(
        n: usize,
        h: Vec<f64>,
        couplings: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::contract("problem needs at least one qubit"));
        }
        if h.len() != n {
            return Err(Error::contract(format!(
                "expected {n} local fields, got {}",
                h.len()
            )));
        }
        if let Some(i) = h.iter().position(|v| !v.is_finite()) {
            return Err(Error::contract(format!("h[{i}] is not finite")));
        }
        let mut map = BTreeMap::new();
        for (a, b, value) in couplings {
            let (i, j) = (a.min(b), a.max(b));
            if i == j || j >= n {
                return Err(Error::contract(format!(
                    "invalid coupling pair ({a}, {b}) for {n} qubits"
                )));
            }
            if !value.is_finite() {
                return Err(Error::contract(format!("J[{i},{j}] is not finite")));
            }
            if map.insert((i, j), value).is_some() {
                return Err(Error::contract(format!("duplicate coupling ({i}, {j})")));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for (&(i, j), &v) in &map {
            adjacency[i].push((j, v));
            adjacency[j].push((i, v));
        }
        Ok(Self {
            n,
            h,
            couplings: map,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.couplings
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0.0)
    }

    /// Neighbors of qubit `i` with their coupling values.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.couplings.keys().copied()
    }

    /// Classical energy of `state`.
    pub fn classical_energy(&self, state: &SpinState) -> Result<f64> {
        if state.len() != self.n {
            return Err(Error::contract(format!(
                "state has {} bits, problem has {} qubits",
                state.len(),
                self.n
            )));
        }
        Ok(self.energy_of_words(state.words()))
    }

    pub(crate) fn energy_of_words(&self, words: &[u64]) -> f64 {
        let z = |i: usize| -> f64 {
            if (words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1 {
                -1.0
            } else {
                1.0
            }
        };
        let field: f64 = self.h.iter().enumerate().map(|(i, h)| h * z(i)).sum();
        let pairs: f64 = self
            .couplings
            .iter()
            .map(|(&(i, j), v)| v * z(i) * z(j))
            .sum();
        field + pairs
    }

    /// Energy of an integer-indexed state (bit `i` of `index` is qubit `i`).
    pub(crate) fn energy_of_index(&self, index: u64) -> f64 {
        self.energy_of_words(&[index])
    }

    /// Effective field on qubit `i`: `h_i + Σ_j J_ij z_j`.
    pub(crate) fn local_field(&self, i: usize, words: &[u64]) -> f64 {
        let mut f = self.h[i];
        for &(j, v) in &self.adjacency[i] {
            let bit = (words[j / WORD_BITS] >> (j % WORD_BITS)) & 1;
            f += if bit == 1 { -v } else { v };
        }
        f
    }

    /// Reorders qubits: new qubit `perm[i]` is old qubit `i`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n || perm.iter().any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::contract("relabeling must be a permutation"));
        }
        let mut h = vec![0.0; self.n];
        for (i, &p) in perm.iter().enumerate() {
            h[p] = self.h[i];
        }
        let couplings = self
            .couplings
            .iter()
            .map(|(&(i, j), &v)| (perm[i], perm[j], v));
        Self::new(self.n, h, couplings)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}
