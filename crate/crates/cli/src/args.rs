use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use effham::sweep::SelectionRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Sweep,
    Exact,
    Compare,
    Generate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Select {
    Index,
    Overlap,
    Auto,
}

impl From<Select> for SelectionRule {
    fn from(s: Select) -> Self {
        match s {
            Select::Index => SelectionRule::Index,
            Select::Overlap => SelectionRule::Overlap,
            Select::Auto => SelectionRule::Auto,
        }
    }
}

/// Low-energy spectra of transverse-field Ising Hamiltonians from per-level
/// effective Hamiltonians.
#[derive(Debug, Parser)]
#[command(name = "effham", version)]
pub struct Args {
    #[arg(long, value_enum)]
    pub mode: Mode,

    /// Problem JSON (`{"n", "h", "couplings"}`).
    #[arg(long)]
    pub problem: Option<PathBuf>,

    /// Schedule CSV with header `s,delta,eps`; defaults to
    /// `Δ = 10(1-s)`, `𝓔 = 10s`.
    #[arg(long)]
    pub schedule: Option<PathBuf>,

    /// Target subspace size before degeneracy closure.
    #[arg(long)]
    pub ns: Option<usize>,

    #[arg(long, default_value_t = 2)]
    pub levels: usize,

    /// `start:stop:count` or a comma-separated list.
    #[arg(long, default_value = "0:1:21")]
    pub s_grid: String,

    #[arg(long, default_value_t = 4)]
    pub diag_order: u8,

    #[arg(long, default_value_t = 2)]
    pub offdiag_order: u8,

    #[arg(long, value_enum, default_value_t = Select::Index)]
    pub select: Select,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// `path:N`, `ring:N`, `grid:RxC`, `chimera:RxC[xS]` or a topology JSON file.
    #[arg(long)]
    pub topology: Option<String>,

    /// Oracle level count; defaults to `--levels`.
    #[arg(long)]
    pub exact_levels: Option<usize>,
}

/// Parses `start:stop:count` or `a,b,c`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("--s-grid: cannot parse {t:?} as a number"))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [start, stop, count] => {
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| format!("--s-grid: cannot parse count {count:?}"))?;
            effham::sweep::uniform_grid(num(start)?, num(stop)?, count)
                .map_err(|e| format!("--s-grid: {e}"))?
        }
        [list] => list.split(',').map(num).collect::<Result<_, _>>()?,
        _ => return Err("--s-grid: expected start:stop:count or a comma list".into()),
    };
    if grid.iter().any(|s| !(0.0..=1.0).contains(s)) {
        return Err("--s-grid: points must lie in [0, 1]".into());
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err("--s-grid: points must be strictly ascending".into());
    }
    Ok(grid)
}
