//! Single- and double-flip neighbourhoods of the basis states, and the
//! per-level sums built from them.

use crate::error::{Error, Result};
use crate::ising::{IsingProblem, SpinState, WORD_BITS};
use crate::subspace::SubspaceBasis;

const OUTSIDE: u32 = u32::MAX;

/// Level-independent neighbourhood data of a basis.
#[derive(Debug, Clone)]
pub struct FlipStructure {
    n: usize,
    size: usize,
    energies: Vec<f64>,
    /// `e(α ⊕ e_i) - e(α)`, row-major `size × n`.
    flip_delta: Vec<f64>,
    /// Basis position of `α ⊕ e_i`, or `OUTSIDE`.
    flip_member: Vec<u32>,
    spins: Vec<f64>,
    /// Dense couplings `J_ij`, symmetric.
    coupling: Vec<f64>,
    /// Per `α`: pairs `(i, j, β)` with `i < j` and `α ⊕ e_i ⊕ e_j = β` in the basis.
    pair_members: Vec<Vec<(u32, u32, u32)>>,
    states: Vec<SpinState>,
}

impl FlipStructure {
    pub fn new(problem: &IsingProblem, basis: &SubspaceBasis) -> Result<Self> {
        let n = problem.n();
        if basis.n() != n {
            return Err(Error::contract(format!(
                "basis has {} qubits, problem has {n}",
                basis.n()
            )));
        }
        let size = basis.len();
        if size >= OUTSIDE as usize {
            return Err(Error::contract("basis too large"));
        }
        let mut coupling = vec![0.0; n * n];
        for (&(i, j), &v) in problem.couplings() {
            coupling[i * n + j] = v;
            coupling[j * n + i] = v;
        }
        let mut flip_delta = vec![0.0; size * n];
        let mut flip_member = vec![OUTSIDE; size * n];
        let mut spins = vec![0.0; size * n];
        let mut pair_members = vec![Vec::new(); size];
        let mut scratch: Vec<u64> = Vec::new();
        for (a, state) in basis.states().iter().enumerate() {
            let words = state.words();
            let row = a * n;
            for i in 0..n {
                let z = state.spin(i);
                spins[row + i] = z;
                flip_delta[row + i] = -2.0 * z * problem.local_field(i, words);
                scratch.clear();
                scratch.extend_from_slice(words);
                scratch[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
                if let Some(b) = basis.position_of_words(&scratch) {
                    flip_member[row + i] = b as u32;
                }
                for j in i + 1..n {
                    scratch[j / WORD_BITS] ^= 1 << (j % WORD_BITS);
                    if let Some(b) = basis.position_of_words(&scratch) {
                        pair_members[a].push((i as u32, j as u32, b as u32));
                    }
                    scratch[j / WORD_BITS] ^= 1 << (j % WORD_BITS);
                }
            }
        }
        Ok(Self {
            n,
            size,
            energies: basis.energies().to_vec(),
            flip_delta,
            flip_member,
            spins,
            coupling,
            pair_members,
            states: basis.states().to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Basis pairs `(α, β)`, `α < β`, one flip apart.
    pub fn single_flip_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.size {
            for &b in &self.flip_member[a * self.n..(a + 1) * self.n] {
                if b != OUTSIDE && (b as usize) > a {
                    out.push((a, b as usize));
                }
            }
        }
        out
    }

    /// Whether the closed walk `α → α⊕e_i → α⊕e_i⊕e_j → α⊕e_i⊕e_j⊕e_l`
    /// returns to `α`. Used to enumerate third-order diagonal paths.
    fn returns(i: usize, j: usize, l: usize) -> bool {
        let mut parity = std::collections::BTreeMap::new();
        for q in [i, j, l] {
            *parity.entry(q).or_insert(0u8) ^= 1;
        }
        parity.values().all(|&p| p == 0)
    }

    fn pair_energy(&self, a: usize, i: usize, j: usize) -> f64 {
        let row = a * self.n;
        self.energies[a]
            + self.flip_delta[row + i]
            + self.flip_delta[row + j]
            + 4.0 * self.coupling[i * self.n + j] * self.spins[row + i] * self.spins[row + j]
    }

    fn describe(&self, a: usize, flips: &[usize]) -> String {
        let mut s = self.states[a].clone();
        for &q in flips {
            s.flip(q);
        }
        s.to_bit_string()
    }

    /// All sums needed for level `k`, in classical energy units.
    pub fn level_terms(&self, k: usize) -> Result<LevelTerms> {
        if k >= self.size {
            return Err(Error::contract(format!(
                "level {k} outside basis of {}",
                self.size
            )));
        }
        let n = self.n;
        let ek = self.energies[k];
        let mut second = vec![0.0; self.size];
        let mut square = vec![0.0; self.size];
        let mut quartic = vec![0.0; self.size];
        let mut off_second = Vec::new();
        let mut nearest_single: Option<(f64, usize, usize, f64)> = None;
        let mut nearest_pair: Option<(f64, usize, usize, usize)> = None;
        let mut inv = vec![0.0; n];
        for a in 0..self.size {
            let row = a * n;
            for i in 0..n {
                inv[i] = if self.flip_member[row + i] == OUTSIDE {
                    let en = self.energies[a] + self.flip_delta[row + i];
                    let d = ek - en;
                    if nearest_single.is_none_or(|(m, ..)| d.abs() < m) {
                        nearest_single = Some((d.abs(), a, i, en));
                    }
                    1.0 / d
                } else {
                    0.0
                };
            }
            second[a] = inv.iter().sum();
            square[a] = inv.iter().map(|x| x * x).sum();

            let members = &self.pair_members[a];
            let mut next = 0;
            let mut acc = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    if next < members.len()
                        && members[next].0 as usize == i
                        && members[next].1 as usize == j
                    {
                        next += 1;
                        continue;
                    }
                    let w = inv[i] + inv[j];
                    if w == 0.0 {
                        continue;
                    }
                    let d = ek - self.pair_energy(a, i, j);
                    if nearest_pair.is_none_or(|(m, ..)| d.abs() < m) {
                        nearest_pair = Some((d.abs(), a, i, j));
                    }
                    acc += w * w / d;
                }
            }
            quartic[a] = acc;

            for &(i, j, b) in members {
                if (b as usize) > a {
                    let w = inv[i as usize] + inv[j as usize];
                    if w != 0.0 {
                        off_second.push((a, b as usize, w));
                    }
                }
            }
        }
        let ek2 = second[k];
        let fourth = quartic
            .iter()
            .zip(&square)
            .map(|(q, b)| q - ek2 * b)
            .collect();
        let nearest_single = nearest_single.map(|(d, a, i, en)| Nearest {
            gap: d,
            state: self.describe(a, &[i]),
            energy: en,
        });
        let nearest_pair = nearest_pair.map(|(d, a, i, j)| Nearest {
            gap: d,
            state: self.describe(a, &[i, j]),
            energy: self.pair_energy(a, i, j),
        });
        Ok(LevelTerms {
            k,
            e_k: ek,
            energies: self.energies.clone(),
            second,
            fourth,
            off_first: self.single_flip_pairs(),
            off_second,
            nearest_single,
            nearest_pair,
        })
    }

    /// Sum over closed three-flip walks from `α` whose intermediate states
    /// lie outside the basis, in classical units. Every such walk flips some
    /// qubit an odd number of times, so nothing is ever collected.
    pub fn third_order_diagonal(&self, k: usize, a: usize) -> f64 {
        let n = self.n;
        let ek = self.energies[k];
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if !Self::returns(i, j, l) || i == j {
                        continue;
                    }
                    let (lo, hi) = (i.min(j) as u32, i.max(j) as u32);
                    if self.flip_member[a * n + i] != OUTSIDE
                        || self.pair_members[a].iter().any(|p| p.0 == lo && p.1 == hi)
                    {
                        continue;
                    }
                    let first = self.energies[a] + self.flip_delta[a * n + i];
                    let second = self.pair_energy(a, i, j);
                    total += 1.0 / ((ek - first) * (ek - second));
                }
            }
        }
        total
    }
}

/// Closest outside-state denominator found while building a level.
#[derive(Debug, Clone)]
pub(crate) struct Nearest {
    /// `|E_k - E_n|` in classical units.
    pub gap: f64,
    pub state: String,
    pub energy: f64,
}

/// Level-`k` sums, independent of `s`. With `ε = 𝓔/2` and `v = -Δ/2`:
///
/// * diagonal: `ε e_α + (v²/ε) second[α] + (v⁴/ε³) fourth[α]`;
/// * one flip apart: `v`;
/// * two flips apart: `(v²/ε) w` for each `(α, β, w)` in `off_second`.
#[derive(Debug, Clone)]
pub struct LevelTerms {
    k: usize,
    e_k: f64,
    energies: Vec<f64>,
    second: Vec<f64>,
    fourth: Vec<f64>,
    off_first: Vec<(usize, usize)>,
    off_second: Vec<(usize, usize, f64)>,
    nearest_single: Option<Nearest>,
    nearest_pair: Option<Nearest>,
}

impl LevelTerms {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `Σ_n 1/(e_k - e_n)` over outside single flips of each `α`.
    pub fn second(&self) -> &[f64] {
        &self.second
    }

    pub fn fourth(&self) -> &[f64] {
        &self.fourth
    }

    pub fn off_first(&self) -> &[(usize, usize)] {
        &self.off_first
    }

    pub fn off_second(&self) -> &[(usize, usize, f64)] {
        &self.off_second
    }

    pub(crate) fn e_k(&self) -> f64 {
        self.e_k
    }

    pub(crate) fn nearest(&self, with_pairs: bool, with_singles: bool) -> Option<&Nearest> {
        let a = self.nearest_single.as_ref().filter(|_| with_singles);
        let b = self.nearest_pair.as_ref().filter(|_| with_pairs);
        match (a, b) {
            (Some(x), Some(y)) => Some(if y.gap < x.gap { y } else { x }),
            (x, y) => x.or(y),
        }
    }
}
