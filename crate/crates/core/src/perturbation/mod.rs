//! Per-level effective Hamiltonians on a classical subspace.
//!
//! `H = H₀ + V` with `H₀ = (𝓔/2) H_P` diagonal and `V = -(Δ/2) Σ σˣ_i`,
//! which only connects states one bit flip apart. For level `k` the matrix
//! on the subspace `𝓢` has, with denominators `E_kn = E_k⁽⁰⁾ - E_n⁽⁰⁾` over
//! states `n ∉ 𝓢`:
//!
//! ```text
//! H̃_αα = E_α⁽⁰⁾ + Σ_n V_αn V_nα / E_kn
//!        + Σ_{n,m,p} V_αn V_nm V_mp V_pα / (E_kn E_km E_kp)
//!        - E_k⁽²⁾ Σ_n V_αn V_nα / E_kn²
//! H̃_αβ = V_αβ + Σ_n V_αn V_nβ / E_kn
//! ```
//!
//! The third-order diagonal term vanishes because a closed walk of three
//! single flips does not exist.

mod flips;

use serde::Serialize;

pub use flips::{FlipStructure, LevelTerms};

use crate::eigen::{Matrix, SparseSymmetric};
use crate::error::{Error, Result};
use crate::ising::{IsingProblem, Scales, Schedule};
use crate::subspace::SubspaceBasis;

/// `|E_kn|` below this (energy units) is a resonance.
pub const SINGULAR_TOLERANCE: f64 = 1e-8;

/// Truncation orders of the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Orders {
    /// 2 or 4.
    pub diag: u8,
    /// 1 or 2.
    pub offdiag: u8,
}

impl Default for Orders {
    fn default() -> Self {
        Self { diag: 4, offdiag: 2 }
    }
}

impl Orders {
    pub fn new(diag: u8, offdiag: u8) -> Result<Self> {
        if !matches!(diag, 2 | 4) {
            return Err(Error::contract(format!("diagonal order must be 2 or 4, got {diag}")));
        }
        if !matches!(offdiag, 1 | 2) {
            return Err(Error::contract(format!(
                "off-diagonal order must be 1 or 2, got {offdiag}"
            )));
        }
        Ok(Self { diag, offdiag })
    }
}

/// `H₀ = h0_scale · H_P`, `V_αβ = v_amplitude` for single-flip pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSplit {
    pub h0_scale: f64,
    pub v_amplitude: f64,
}

impl PerturbationSplit {
    pub fn new(scales: Scales) -> Self {
        Self {
            h0_scale: 0.5 * scales.eps,
            v_amplitude: -0.5 * scales.delta,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub matrix: Matrix,
    pub k_index: usize,
    pub s: f64,
    pub orders: Orders,
    /// Second-order diagonal contributions.
    pub second_order: Vec<f64>,
    /// Fourth-order diagonal contributions (zero when `orders.diag == 2`).
    pub fourth_order: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallParameterEstimate {
    pub lambda_k: f64,
    /// `None` when the subspace is the whole space.
    pub e_min_outside: Option<f64>,
    /// False when the lowest outside state is not above level `k`.
    pub trusted: bool,
}

pub fn build_effective_hamiltonian(
    problem: &IsingProblem,
    basis: &SubspaceBasis,
    k_index: usize,
    s: f64,
    schedule: &Schedule,
    orders: Orders,
) -> Result<EffectiveHamiltonian> {
    if k_index >= basis.len() {
        return Err(Error::contract(format!(
            "level {k_index} outside basis of {}",
            basis.len()
        )));
    }
    let scales = schedule.at(s)?;
    let terms = FlipStructure::new(problem, basis)?.level_terms(k_index)?;
    assemble(&terms, s, scales, orders)
}

/// Effective Hamiltonian for cached level terms at one schedule point.
pub fn assemble(
    terms: &LevelTerms,
    s: f64,
    scales: Scales,
    orders: Orders,
) -> Result<EffectiveHamiltonian> {
    let parts = Entries::build(terms, scales, orders)?;
    let mut matrix = Matrix::zeros(terms.len());
    for (a, &x) in parts.diag.iter().enumerate() {
        matrix[(a, a)] = x;
    }
    for &(a, b, x) in &parts.upper {
        matrix[(a, b)] = x;
        matrix[(b, a)] = x;
    }
    Ok(EffectiveHamiltonian {
        matrix,
        k_index: terms.k(),
        s,
        orders,
        second_order: parts.second_order,
        fourth_order: parts.fourth_order,
    })
}

/// The same matrix as [`assemble`], in sparse form.
pub fn assemble_sparse(terms: &LevelTerms, scales: Scales, orders: Orders) -> Result<SparseSymmetric> {
    let parts = Entries::build(terms, scales, orders)?;
    SparseSymmetric::new(parts.diag, &parts.upper)
}

struct Entries {
    diag: Vec<f64>,
    upper: Vec<(usize, usize, f64)>,
    second_order: Vec<f64>,
    fourth_order: Vec<f64>,
}

impl Entries {
    fn build(terms: &LevelTerms, scales: Scales, orders: Orders) -> Result<Self> {
        let split = PerturbationSplit::new(scales);
        let eps = split.h0_scale;
        let v = split.v_amplitude;
        let size = terms.len();
        let perturbed = v != 0.0;
        let uses_singles = orders.diag >= 2 || orders.offdiag == 2;
        let uses_pairs = orders.diag == 4;
        let nearest = terms.nearest(uses_pairs, uses_singles);
        // with nothing outside the subspace every resolvent sum is empty
        let resolvent = perturbed && nearest.is_some();
        if resolvent {
            if let Some(near) = nearest {
                if eps * near.gap < SINGULAR_TOLERANCE {
                    return Err(Error::SingularDenominator {
                        k: terms.k(),
                        state: near.state.clone(),
                        e_k: eps * terms.e_k(),
                        e_n: eps * near.energy,
                    });
                }
            }
        }

        let c2 = if resolvent { v * v / eps } else { 0.0 };
        let c4 = if resolvent && orders.diag == 4 { v.powi(4) / eps.powi(3) } else { 0.0 };
        let second_order: Vec<f64> = terms.second().iter().map(|x| c2 * x).collect();
        let fourth_order: Vec<f64> = terms.fourth().iter().map(|x| c4 * x).collect();
        let diag = (0..size)
            .map(|a| eps * terms.energies()[a] + second_order[a] + fourth_order[a])
            .collect();
        let mut upper = Vec::new();
        if perturbed {
            upper.extend(terms.off_first().iter().map(|&(a, b)| (a, b, v)));
            if resolvent && orders.offdiag == 2 {
                upper.extend(terms.off_second().iter().map(|&(a, b, w)| (a, b, c2 * w)));
            }
        }
        Ok(Self {
            diag,
            upper,
            second_order,
            fourth_order,
        })
    }
}

pub fn estimate_small_parameter(
    problem: &IsingProblem,
    basis: &SubspaceBasis,
    k_index: usize,
    s: f64,
    schedule: &Schedule,
) -> Result<SmallParameterEstimate> {
    if k_index >= basis.len() || basis.n() != problem.n() {
        return Err(Error::contract(format!(
            "level {k_index} outside basis of {}",
            basis.len()
        )));
    }
    Ok(small_parameter(basis, k_index, schedule.at(s)?))
}

/// `λ_k = (Δ/2) / ((𝓔/2)(E_min - E_k⁽⁰⁾))` with `E_min` the lowest classical
/// energy outside the basis.
pub fn small_parameter(basis: &SubspaceBasis, k_index: usize, scales: Scales) -> SmallParameterEstimate {
    let e_min = basis.next_energy();
    let Some(e_min) = e_min else {
        return SmallParameterEstimate {
            lambda_k: 0.0,
            e_min_outside: None,
            trusted: true,
        };
    };
    if scales.delta == 0.0 {
        return SmallParameterEstimate {
            lambda_k: 0.0,
            e_min_outside: Some(e_min),
            trusted: true,
        };
    }
    let denom = 0.5 * scales.eps * (e_min - basis.energies()[k_index]);
    if denom > 0.0 {
        SmallParameterEstimate {
            lambda_k: 0.5 * scales.delta / denom,
            e_min_outside: Some(e_min),
            trusted: true,
        }
    } else {
        SmallParameterEstimate {
            lambda_k: f64::INFINITY,
            e_min_outside: Some(e_min),
            trusted: false,
        }
    }
}
