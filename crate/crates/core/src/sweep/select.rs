//! Picking the physical eigenvalue of `H̃(k)`.

use serde::{Deserialize, Serialize};

use crate::eigen::matrix::dot;
use crate::eigen::EigenDecomposition;
use crate::error::{Error, Result};

/// Overlap below which a tracked selection is flagged ambiguous.
pub const AMBIGUOUS_OVERLAP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionRule {
    /// The `k`-th smallest eigenvalue.
    #[default]
    Index,
    /// The eigenvector closest to the previous selection.
    Overlap,
    /// Index, switching to overlap for levels that approach each other.
    Auto,
}

impl std::str::FromStr for SelectionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "index" => Ok(Self::Index),
            "overlap" => Ok(Self::Overlap),
            "auto" => Ok(Self::Auto),
            other => Err(Error::Parse(format!("unknown selection rule {other:?}"))),
        }
    }
}

impl std::fmt::Display for SelectionRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Index => "index",
            Self::Overlap => "overlap",
            Self::Auto => "auto",
        })
    }
}

#[derive(Debug, Clone)]
pub struct LevelSelection {
    pub k_index: usize,
    /// Position of the chosen pair in the decomposition.
    pub position: usize,
    pub eigenvalue: f64,
    /// Normalized projected eigenvector `|k⟩_P`.
    pub vector: Vec<f64>,
    /// Rule actually applied: `Index` or `Overlap`.
    pub rule: SelectionRule,
    /// `|⟨v|v_prev⟩|` for overlap selections.
    pub overlap: Option<f64>,
    pub ambiguous: bool,
}

/// With `Auto`, overlap is used when `previous` is given and index otherwise.
pub fn select_level(
    decomposition: &EigenDecomposition,
    k_index: usize,
    previous: Option<&LevelSelection>,
    rule: SelectionRule,
) -> Result<LevelSelection> {
    if k_index >= decomposition.dim() {
        return Err(Error::contract(format!(
            "level {k_index} outside a {}-dimensional decomposition",
            decomposition.dim()
        )));
    }
    let by_overlap = match (rule, previous) {
        (SelectionRule::Index, _) | (SelectionRule::Auto, None) => false,
        (SelectionRule::Overlap, None) => {
            return Err(Error::contract("overlap selection needs a previous selection"))
        }
        (_, Some(_)) => true,
    };
    if !by_overlap {
        let vector = decomposition
            .vector(k_index)
            .ok_or_else(|| Error::contract(format!("no eigenvector computed for level {k_index}")))?
            .to_vec();
        return Ok(LevelSelection {
            k_index,
            position: k_index,
            eigenvalue: decomposition.values()[k_index],
            vector,
            rule: SelectionRule::Index,
            overlap: None,
            ambiguous: false,
        });
    }
    let prev = previous.expect("checked above");
    if prev.vector.len() != decomposition.dim() {
        return Err(Error::contract("previous selection has a different dimension"));
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in decomposition.vectors().iter().enumerate() {
        let o = dot(v, &prev.vector).abs();
        if o > best.1 + 1e-12 {
            best = (i, o);
        }
    }
    let (position, overlap) = best;
    Ok(LevelSelection {
        k_index,
        position,
        eigenvalue: decomposition.values()[position],
        vector: decomposition.vectors()[position].clone(),
        rule: SelectionRule::Overlap,
        overlap: Some(overlap),
        ambiguous: overlap < AMBIGUOUS_OVERLAP,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{diagonalize_symmetric, Matrix};

    fn crossing(s: f64) -> Matrix {
        Matrix::from_rows(&[vec![s - 0.5, 0.01], vec![0.01, 0.5 - s]])
    }

    /// Closed-form lower eigenpair of `[[a, b], [b, -a]]`.
    fn analytic_lower(a: f64, b: f64) -> (f64, [f64; 2]) {
        let r = a.hypot(b);
        let (x, y) = (b, -a - r);
        let nrm = x.hypot(y);
        (-r, [x / nrm, y / nrm])
    }

    #[test]
    fn index_rule_picks_kth() {
        let m = Matrix::from_rows(&[vec![3.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]]);
        let dec = diagonalize_symmetric(&m).unwrap();
        let sel = select_level(&dec, 1, None, SelectionRule::Index).unwrap();
        assert_eq!(sel.eigenvalue, 2.0);
    }

    #[test]
    fn exact_eigenvector_is_matched() {
        let m = Matrix::from_rows(&[vec![1.0, 0.3], vec![0.3, 2.0]]);
        let dec = diagonalize_symmetric(&m).unwrap();
        let prev = select_level(&dec, 1, None, SelectionRule::Index).unwrap();
        let sel = select_level(&dec, 0, Some(&prev), SelectionRule::Overlap).unwrap();
        assert_eq!(sel.position, 1);
        assert!((sel.overlap.unwrap() - 1.0).abs() < 1e-14);
        assert!(!sel.ambiguous);
    }

    #[test]
    fn overlap_follows_diabatic_state_through_avoided_crossing() {
        // grid steps of 0.1 jump the 0.02-wide anticrossing at s = 1/2
        let grid: Vec<f64> = (0..=6).map(|i| 0.25 + 0.1 * i as f64).collect();
        let first = diagonalize_symmetric(&crossing(grid[0])).unwrap();
        let mut tracked = select_level(&first, 0, None, SelectionRule::Index).unwrap();
        for &s in &grid[1..] {
            let dec = diagonalize_symmetric(&crossing(s)).unwrap();
            let indexed = select_level(&dec, 0, None, SelectionRule::Index).unwrap();
            let (lower, lower_vec) = analytic_lower(s - 0.5, 0.01);
            assert!((indexed.eigenvalue - lower).abs() < 1e-14);
            let align = (indexed.vector[0] * lower_vec[0] + indexed.vector[1] * lower_vec[1]).abs();
            assert!((align - 1.0).abs() < 1e-12);

            tracked = select_level(&dec, 0, Some(&tracked), SelectionRule::Overlap).unwrap();
            // the diabatic state (1, 0) has energy s - 1/2
            assert!((tracked.eigenvalue - (s - 0.5)).abs() < 2e-3, "s={s}");
            assert!(!tracked.ambiguous);
        }
        assert_eq!(tracked.position, 1);
    }

    #[test]
    fn overlap_without_previous_is_rejected() {
        let dec = diagonalize_symmetric(&Matrix::identity(2)).unwrap();
        assert!(select_level(&dec, 0, None, SelectionRule::Overlap).is_err());
        assert!(select_level(&dec, 2, None, SelectionRule::Index).is_err());
        assert_eq!(
            select_level(&dec, 0, None, SelectionRule::Auto).unwrap().rule,
            SelectionRule::Index
        );
    }
}
