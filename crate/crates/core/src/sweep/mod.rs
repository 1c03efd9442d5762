//! Sweeps over an `s` grid: one effective Hamiltonian per level and point,
//! level selection, gap curve and its minimum.

mod gap;
mod select;

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

pub use gap::min_gap_of_curve;
pub use select::{select_level, LevelSelection, SelectionRule, AMBIGUOUS_OVERLAP};

use crate::eigen::{diagonalize_symmetric, lowest_eigenpairs, EigenDecomposition, LanczosOptions};
use crate::error::{Error, Result};
use crate::ising::{IsingProblem, Scales, Schedule};
use crate::perturbation::{assemble, assemble_sparse, small_parameter, FlipStructure, LevelTerms, Orders, SmallParameterEstimate};
use crate::subspace::{enumerate_low_states_with, EnumerationOptions, SubspaceBasis};

/// Above this size the effective Hamiltonian is kept sparse and only its
/// lowest few eigenpairs are computed, by Lanczos.
pub const FULL_DECOMPOSITION_MAX: usize = 300;

/// Extra eigenpairs beyond `k` kept for overlap tracking.
pub const TRACKING_MARGIN: usize = 8;

/// Extra eigenpairs beyond `k` computed for index selection.
pub const INDEX_MARGIN: usize = 1;

/// Gaps below `-GAP_TOLERANCE * max(|E_0|, 1)` are flagged as negative.
pub const GAP_TOLERANCE: f64 = 1e-10;

/// Auto rule: adjacent levels closer than this many times their last grid
/// step motion are tracked by overlap.
pub const AUTO_SWITCH_FACTOR: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub target_ns: usize,
    pub levels: usize,
    pub s_grid: Vec<f64>,
    pub orders: Orders,
    pub rule: SelectionRule,
    pub enumeration: EnumerationOptions,
    /// Seeds the Lanczos start vectors.
    pub seed: u64,
}

impl SweepConfig {
    pub fn new(target_ns: usize, levels: usize, s_grid: Vec<f64>) -> Self {
        Self {
            target_ns,
            levels,
            s_grid,
            orders: Orders::default(),
            rule: SelectionRule::default(),
            enumeration: EnumerationOptions::default(),
            seed: 0,
        }
    }
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn uniform_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::contract("grid needs at least one point"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i + 1 == count { stop } else { start + step * i as f64 })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WarningCode {
    SingularDenom,
    AmbiguousTrack,
    LambdaUntrusted,
    NegativeGap,
    SolveFailed,
}

impl fmt::Display for WarningCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SingularDenom => "SINGULAR_DENOM",
            Self::AmbiguousTrack => "AMBIGUOUS_TRACK",
            Self::LambdaUntrusted => "LAMBDA_UNTRUSTED",
            Self::NegativeGap => "NEGATIVE_GAP",
            Self::SolveFailed => "SOLVE_FAILED",
        })
    }
}

/// A diagnostic attached to one level at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub code: WarningCode,
    pub level: usize,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.code, self.level)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelResult {
    /// Selected eigenvalue; NaN when the level failed at this point.
    pub energy: f64,
    pub lambda: SmallParameterEstimate,
    pub rule: SelectionRule,
    pub overlap: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub s: f64,
    pub levels: Vec<LevelResult>,
    /// `E_1 - E_0` when both levels were computed.
    pub gap: Option<f64>,
    pub warnings: Vec<Warning>,
}

impl SweepPoint {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// `E_k - E_0`.
    pub fn relative(&self, k: usize) -> f64 {
        self.levels[k].energy - self.levels[0].energy
    }

    pub fn is_complete(&self) -> bool {
        self.levels.iter().all(|l| l.error.is_none())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSweep {
    pub s_grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
    pub levels: usize,
    pub basis_size: usize,
    /// Refined `(s*, g(s*))`.
    pub min_gap: Option<(f64, f64)>,
}

impl SpectrumSweep {
    /// `(s, g(s))` with NaN where the gap is unavailable.
    pub fn gap_curve(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|p| (p.s, p.gap.unwrap_or(f64::NAN)))
            .collect()
    }

    pub fn lambda_estimates(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|p| p.levels.iter().map(|l| l.lambda.lambda_k).collect())
            .collect()
    }
}

pub fn find_min_gap(sweep: &SpectrumSweep) -> Option<(f64, f64)> {
    min_gap_of_curve(&sweep.gap_curve())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::contract("empty s grid"));
    }
    for &s in grid {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("grid point s={s} outside [0, 1]")));
        }
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::contract("s grid must be strictly ascending"));
    }
    Ok(())
}

pub fn run_sweep(problem: &IsingProblem, schedule: &Schedule, config: &SweepConfig) -> Result<SpectrumSweep> {
    check_grid(&config.s_grid)?;
    if config.levels == 0 || config.levels > config.target_ns {
        return Err(Error::contract(format!(
            "level count {} must lie in 1..={}",
            config.levels, config.target_ns
        )));
    }
    let basis = enumerate_low_states_with(problem, config.target_ns, &config.enumeration)?;
    run_sweep_on_basis(problem, &basis, schedule, config)
}

/// As [`run_sweep`] on a given subspace; `config.target_ns` is ignored.
pub fn run_sweep_on_basis(
    problem: &IsingProblem,
    basis: &SubspaceBasis,
    schedule: &Schedule,
    config: &SweepConfig,
) -> Result<SpectrumSweep> {
    check_grid(&config.s_grid)?;
    let m = config.levels;
    if m == 0 || m > basis.len() {
        return Err(Error::contract(format!(
            "level count {m} must lie in 1..={}",
            basis.len()
        )));
    }
    let structure = FlipStructure::new(problem, basis)?;
    let terms: Vec<LevelTerms> = (0..m)
        .into_par_iter()
        .map(|k| structure.level_terms(k))
        .collect::<Result<_>>()?;
    let scales: Vec<Scales> = config
        .s_grid
        .iter()
        .map(|&s| schedule.at(s))
        .collect::<Result<_>>()?;
    let task = Task {
        terms: &terms,
        grid: &config.s_grid,
        scales: &scales,
        orders: config.orders,
        seed: config.seed,
    };

    let grid_len = config.s_grid.len();
    let outcomes: Vec<Vec<Outcome>> = match config.rule {
        SelectionRule::Index => {
            let flat: Vec<Outcome> = (0..grid_len * m)
                .into_par_iter()
                .map(|t| task.solve(t / m, t % m, None).map(Tracked::without_vector))
                .collect();
            flat.chunks(m).map(|c| c.to_vec()).collect()
        }
        SelectionRule::Overlap => {
            let per_level: Vec<Vec<Outcome>> = (0..m)
                .into_par_iter()
                .map(|k| {
                    let mut prev: Option<LevelSelection> = None;
                    (0..grid_len)
                        .map(|i| {
                            let r = task.solve(i, k, prev.as_ref());
                            if let Ok(sel) = &r {
                                prev = Some(sel.clone());
                            }
                            r.map(Tracked::without_vector)
                        })
                        .collect()
                })
                .collect();
            (0..grid_len)
                .map(|i| per_level.iter().map(|lv| lv[i].clone()).collect())
                .collect()
        }
        SelectionRule::Auto => task.run_auto(m),
    };

    let points = outcomes
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let s = config.s_grid[i];
            let mut warnings = Vec::new();
            let levels: Vec<LevelResult> = row
                .into_iter()
                .enumerate()
                .map(|(k, outcome)| {
                    let lambda = small_parameter(basis, k, scales[i]);
                    if !lambda.trusted {
                        warnings.push(Warning { code: WarningCode::LambdaUntrusted, level: k });
                    }
                    match outcome {
                        Ok(t) => {
                            if t.ambiguous {
                                warnings.push(Warning { code: WarningCode::AmbiguousTrack, level: k });
                            }
                            LevelResult {
                                energy: t.eigenvalue,
                                lambda,
                                rule: t.rule,
                                overlap: t.overlap,
                                error: None,
                            }
                        }
                        Err(message) => {
                            let code = if message.singular {
                                WarningCode::SingularDenom
                            } else {
                                WarningCode::SolveFailed
                            };
                            warnings.push(Warning { code, level: k });
                            LevelResult {
                                energy: f64::NAN,
                                lambda,
                                rule: config.rule,
                                overlap: None,
                                error: Some(message.text),
                            }
                        }
                    }
                })
                .collect();
            let gap = if m >= 2 && levels[0].energy.is_finite() && levels[1].energy.is_finite() {
                Some(levels[1].energy - levels[0].energy)
            } else {
                None
            };
            let noise = GAP_TOLERANCE * levels[0].energy.abs().max(1.0);
            if gap.is_some_and(|g| g < -noise) {
                warnings.push(Warning { code: WarningCode::NegativeGap, level: 1 });
            }
            warnings.sort_by_key(|w| (w.level, w.code as u8));
            SweepPoint { s, levels, gap, warnings }
        })
        .collect();

    let mut sweep = SpectrumSweep {
        s_grid: config.s_grid.clone(),
        points,
        levels: m,
        basis_size: basis.len(),
        min_gap: None,
    };
    sweep.min_gap = find_min_gap(&sweep);
    Ok(sweep)
}

/// Per-level failure, kept as text so outcomes stay cloneable.
#[derive(Debug, Clone)]
struct Failure {
    singular: bool,
    text: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            singular: matches!(e, Error::SingularDenominator { .. }),
            text: e.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Tracked {
    eigenvalue: f64,
    rule: SelectionRule,
    overlap: Option<f64>,
    ambiguous: bool,
}

impl Tracked {
    fn without_vector(sel: LevelSelection) -> Self {
        Self {
            eigenvalue: sel.eigenvalue,
            rule: sel.rule,
            overlap: sel.overlap,
            ambiguous: sel.ambiguous,
        }
    }
}

type Outcome = std::result::Result<Tracked, Failure>;

struct Task<'a> {
    terms: &'a [LevelTerms],
    grid: &'a [f64],
    scales: &'a [Scales],
    orders: Orders,
    seed: u64,
}

impl Task<'_> {
    /// Index selection without `previous`, overlap selection with it.
    fn solve(
        &self,
        i: usize,
        k: usize,
        previous: Option<&LevelSelection>,
    ) -> std::result::Result<LevelSelection, Failure> {
        let margin = if previous.is_some() { TRACKING_MARGIN } else { INDEX_MARGIN };
        let seed = self.seed ^ ((i as u64) << 32 | k as u64);
        let dec = decompose_level(&self.terms[k], self.grid[i], self.scales[i], self.orders, margin, seed)?;
        Ok(select_level(&dec, k, previous, SelectionRule::Auto)?)
    }

    fn run_auto(&self, m: usize) -> Vec<Vec<Outcome>> {
        let mut prev: Vec<Option<LevelSelection>> = vec![None; m];
        let mut history: Vec<Vec<f64>> = Vec::with_capacity(self.grid.len());
        let mut out = Vec::with_capacity(self.grid.len());
        for i in 0..self.grid.len() {
            let use_overlap = auto_switch(&history, m);
            let row: Vec<std::result::Result<LevelSelection, Failure>> = (0..m)
                .into_par_iter()
                .map(|k| {
                    let previous = if use_overlap[k] { prev[k].as_ref() } else { None };
                    self.solve(i, k, previous)
                })
                .collect();
            let mut energies = vec![f64::NAN; m];
            let mut tracked = Vec::with_capacity(m);
            for (k, r) in row.into_iter().enumerate() {
                tracked.push(r.map(|sel| {
                    energies[k] = sel.eigenvalue;
                    let t = Tracked::without_vector(sel.clone());
                    prev[k] = Some(sel);
                    t
                }));
            }
            history.push(energies);
            out.push(tracked);
        }
        out
    }
}

/// Levels that should be tracked by overlap at the next point, judged from
/// the last two rows of selected energies.
fn auto_switch(history: &[Vec<f64>], m: usize) -> Vec<bool> {
    let mut flags = vec![false; m];
    let [.., before, last] = history else {
        return flags;
    };
    for k in 0..m.saturating_sub(1) {
        let motion = (last[k] - before[k]).abs().max((last[k + 1] - before[k + 1]).abs());
        let separation = (last[k + 1] - last[k]).abs();
        if separation < AUTO_SWITCH_FACTOR * motion {
            flags[k] = true;
            flags[k + 1] = true;
        }
    }
    flags
}

/// Full dense decomposition for small bases; otherwise the lowest
/// `k + 1 + margin` eigenpairs of the sparse matrix.
fn decompose_level(
    terms: &LevelTerms,
    s: f64,
    scales: Scales,
    orders: Orders,
    margin: usize,
    seed: u64,
) -> Result<EigenDecomposition> {
    if terms.len() <= FULL_DECOMPOSITION_MAX {
        let h = assemble(terms, s, scales, orders)?;
        return diagonalize_symmetric(&h.matrix);
    }
    let op = assemble_sparse(terms, scales, orders)?;
    let options = LanczosOptions {
        seed,
        ..Default::default()
    };
    lowest_eigenpairs(&op, (terms.k() + 1 + margin).min(terms.len()), &options)
}
