use super::{SubspaceBasis, TIE_TOLERANCE};
use crate::error::{Error, Result};
use crate::ising::IsingProblem;

pub const BRUTE_FORCE_MAX_QUBITS: usize = 24;

/// Classical energies of all `2^n` states, indexed by state integer.
///
/// Walks a Gray code so each step costs one local-field evaluation.
pub(crate) fn all_energies(problem: &IsingProblem) -> Vec<f64> {
    let n = problem.n();
    let total = 1usize << n;
    let mut energies = vec![0.0; total];
    let mut state = 0u64;
    let mut e = problem.energy_of_index(0);
    energies[0] = e;
    for step in 1..total {
        let bit = step.trailing_zeros() as usize;
        let z = if (state >> bit) & 1 == 1 { -1.0 } else { 1.0 };
        e -= 2.0 * z * problem.local_field(bit, &[state]);
        state ^= 1 << bit;
        energies[state as usize] = e;
    }
    energies
}

/// Exhaustive reference for [`super::enumerate_low_states`].
pub fn brute_force_low_states(problem: &IsingProblem, target_size: usize) -> Result<SubspaceBasis> {
    let n = problem.n();
    if n > BRUTE_FORCE_MAX_QUBITS {
        return Err(Error::Feasibility(format!(
            "brute-force enumeration is limited to {BRUTE_FORCE_MAX_QUBITS} qubits, got {n}"
        )));
    }
    if target_size == 0 {
        return Err(Error::contract("target size must be at least 1"));
    }
    let total = 1usize << n;
    let target = target_size.min(total);
    let energies = all_energies(problem);

    let mut sorted = energies.clone();
    let (_, kth, _) = sorted.select_nth_unstable_by(target - 1, |a, b| a.total_cmp(b));
    // Gray-code accumulation drifts by a few ulps; widen the net and let
    // the exact recomputation in `from_candidates` decide.
    let threshold = *kth + TIE_TOLERANCE + 1e-7;

    let mut candidates = Vec::new();
    let mut beyond: Option<(f64, usize)> = None;
    for (idx, &e) in energies.iter().enumerate() {
        if e <= threshold {
            candidates.push(vec![idx as u64].into_boxed_slice());
        } else if beyond.map_or(true, |(b, _)| e < b) {
            beyond = Some((e, idx));
        }
    }
    let complete = beyond.is_none();
    if let Some((_, idx)) = beyond {
        candidates.push(vec![idx as u64].into_boxed_slice());
    }
    SubspaceBasis::from_candidates(problem, candidates, target, complete)
}
