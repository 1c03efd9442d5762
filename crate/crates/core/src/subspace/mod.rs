//! The subspace of lowest-energy classical states.
//!
//! [`enumerate_low_states`] runs k-best bucket elimination along a min-fill
//! order, so its cost grows with the elimination width instead of the qubit
//! count. [`brute_force_low_states`] is the exhaustive reference.

mod brute;
mod kbest;
mod order;

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ising::{lex_cmp_words, IsingProblem, SpinState};

pub use brute::{brute_force_low_states, BRUTE_FORCE_MAX_QUBITS};
pub use kbest::{enumerate_low_states, enumerate_low_states_with, EnumerationOptions};
pub use order::{choose_elimination_order, induced_width, EliminationOrder};

/// Classical energies closer than this are one degenerate level.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Low-energy classical states in ascending energy, closed under degeneracy
/// at the top level.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    n: usize,
    states: Vec<SpinState>,
    energies: Vec<f64>,
    next_energy: Option<f64>,
    index: HashMap<Box<[u64]>, usize>,
}

#[derive(Serialize)]
struct BasisEntry<'a> {
    bits: String,
    energy: &'a f64,
}

impl SubspaceBasis {
    /// Final step shared by the enumerators.
    ///
    /// `candidates` must contain every state whose energy is within
    /// [`TIE_TOLERANCE`] of the `target`-th lowest, plus the lowest state
    /// beyond that when one exists. `complete` says the candidates are the
    /// whole state space.
    pub(crate) fn from_candidates(
        problem: &IsingProblem,
        candidates: Vec<Box<[u64]>>,
        target: usize,
        complete: bool,
    ) -> Result<Self> {
        if candidates.is_empty() || target == 0 {
            return Err(Error::contract("empty basis"));
        }
        let mut scored: Vec<(f64, Box<[u64]>)> = candidates
            .into_iter()
            .map(|w| (problem.energy_of_words(&w), w))
            .collect();
        sort_with_ties(&mut scored);

        let target = target.min(scored.len());
        let mut cut = target;
        while cut < scored.len() && scored[cut].0 - scored[cut - 1].0 <= TIE_TOLERANCE {
            cut += 1;
        }
        let next_energy = scored.get(cut).map(|(e, _)| *e);
        if next_energy.is_none() && !complete {
            return Err(Error::contract(
                "candidate set ends inside the top degenerate level",
            ));
        }
        scored.truncate(cut);

        let n = problem.n();
        let mut index = HashMap::with_capacity(scored.len());
        let mut states = Vec::with_capacity(scored.len());
        let mut energies = Vec::with_capacity(scored.len());
        for (i, (e, w)) in scored.into_iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::contract("duplicate state in basis"));
            }
            states.push(SpinState::from_words(n, w));
            energies.push(e);
        }
        Ok(Self {
            n,
            states,
            energies,
            next_energy,
            index,
        })
    }

    /// Every state of the problem, ascending.
    pub fn full(problem: &IsingProblem) -> Result<Self> {
        if problem.n() >= 63 {
            return Err(Error::Feasibility("full basis needs n < 63".into()));
        }
        brute_force_low_states(problem, 1usize << problem.n())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[SpinState] {
        &self.states
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn top_energy(&self) -> f64 {
        self.energies[self.energies.len() - 1]
    }

    /// Lowest classical energy outside the basis; `None` when the basis is
    /// the whole space.
    pub fn next_energy(&self) -> Option<f64> {
        self.next_energy
    }

    /// Classical energy spread `max - min` inside the basis.
    pub fn spread(&self) -> f64 {
        self.top_energy() - self.energies[0]
    }

    pub fn position(&self, state: &SpinState) -> Option<usize> {
        self.position_of_words(state.words())
    }

    #[inline]
    pub(crate) fn position_of_words(&self, words: &[u64]) -> Option<usize> {
        self.index.get(words).copied()
    }

    /// Audit dump: `[{"bits": "0110", "energy": -1.0}, ..]`.
    pub fn to_json(&self) -> String {
        let entries: Vec<_> = self
            .states
            .iter()
            .zip(&self.energies)
            .map(|(s, energy)| BasisEntry {
                bits: s.to_bit_string(),
                energy,
            })
            .collect();
        serde_json::to_string_pretty(&entries).expect("basis serializes")
    }

    /// Checks ordering, energies, distinctness and the single-flip
    /// necessary condition for degeneracy closure.
    pub fn validate(&self, problem: &IsingProblem) -> Result<()> {
        let fail = |msg: String| Err(Error::Contract(msg));
        for (i, (s, &e)) in self.states.iter().zip(&self.energies).enumerate() {
            let exact = problem.classical_energy(s)?;
            if exact != e {
                return fail(format!("energy of entry {i} is {e}, state gives {exact}"));
            }
            if i > 0 && self.energies[i - 1] > e + TIE_TOLERANCE {
                return fail(format!("energies not ascending at {i}"));
            }
        }
        if self.index.len() != self.states.len() {
            return fail("states are not distinct".into());
        }
        let top = self.top_energy();
        for s in &self.states {
            for q in 0..self.n {
                let t = s.flipped(q);
                if self.position(&t).is_none() {
                    let e = problem.classical_energy(&t)?;
                    if e <= top + TIE_TOLERANCE {
                        return fail(format!("state {t} at {e} ties the top level {top}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Ascending energy; within a tie cluster, lexicographic by bit string.
pub(crate) fn sort_with_ties(entries: &mut [(f64, Box<[u64]>)]) {
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut start = 0;
    while start < entries.len() {
        let mut end = start + 1;
        while end < entries.len() && entries[end].0 - entries[end - 1].0 <= TIE_TOLERANCE {
            end += 1;
        }
        if end - start > 1 {
            entries[start..end].sort_by(|a, b| match lex_cmp_words(&a.1, &b.1) {
                Ordering::Equal => a.0.total_cmp(&b.0),
                o => o,
            });
        }
        start = end;
    }
}
