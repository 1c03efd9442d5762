//! Random instances: `h_i` uniform from `{-1/3, +1/3}`, couplings either
//! fixed at `-1` ("strong") or uniform from `{-1/3, +1/3}` ("random").

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::IsingProblem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Strong,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub n: usize,
    pub edges: Vec<(usize, usize, EdgeKind)>,
}

impl Topology {
    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|i| (i - 1, i, EdgeKind::Random)).collect();
        Self { n, edges }
    }

    pub fn ring(n: usize) -> Self {
        let mut t = Self::path(n);
        if n > 2 {
            t.edges.push((0, n - 1, EdgeKind::Random));
        }
        t
    }

    /// `rows x cols` square lattice, row-major numbering.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        let id = |r: usize, c: usize| r * cols + c;
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((id(r, c), id(r, c + 1), EdgeKind::Random));
                }
                if r + 1 < rows {
                    edges.push((id(r, c), id(r + 1, c), EdgeKind::Random));
                }
            }
        }
        Self { n: rows * cols, edges }
    }

    /// Grid of complete bipartite `K_{shore,shore}` cells.
    ///
    /// Couplers inside a cell are random; couplers between cells are strong.
    /// The first `shore` qubits of a cell connect to the cell below, the
    /// last `shore` to the cell on the right.
    pub fn chimera(rows: usize, cols: usize, shore: usize) -> Self {
        let cell = 2 * shore;
        let base = |r: usize, c: usize| (r * cols + c) * cell;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let b = base(r, c);
                for a in 0..shore {
                    for q in 0..shore {
                        edges.push((b + a, b + shore + q, EdgeKind::Random));
                    }
                }
                if r + 1 < rows {
                    let below = base(r + 1, c);
                    for a in 0..shore {
                        edges.push((b + a, below + a, EdgeKind::Strong));
                    }
                }
                if c + 1 < cols {
                    let right = base(r, c + 1);
                    for q in 0..shore {
                        edges.push((b + shore + q, right + shore + q, EdgeKind::Strong));
                    }
                }
            }
        }
        Self {
            n: rows * cols * cell,
            edges,
        }
    }

    /// Parses `path:N`, `ring:N`, `grid:RxC` or `chimera:RxC[xS]` (shore
    /// defaults to 4).
    pub fn builtin(spec: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognized topology `{spec}`"));
        let (kind, dims) = spec.split_once(':').ok_or_else(bad)?;
        let nums = dims
            .split('x')
            .map(|d| d.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let topo = match (kind, nums.as_slice()) {
            ("path", [n]) => Self::path(*n),
            ("ring", [n]) => Self::ring(*n),
            ("grid", [r, c]) => Self::grid(*r, *c),
            ("chimera", [r, c]) => Self::chimera(*r, *c, 4),
            ("chimera", [r, c, s]) => Self::chimera(*r, *c, *s),
            _ => return Err(bad()),
        };
        if topo.n == 0 {
            return Err(bad());
        }
        Ok(topo)
    }

    /// A built-in spec, or a JSON file `{"n": .., "edges": [[i, j, "strong"|"random"], ..]}`.
    pub fn resolve(spec: &str) -> Result<Self> {
        if Path::new(spec).is_file() {
            let text = std::fs::read_to_string(spec)?;
            Ok(serde_json::from_str(&text)?)
        } else {
            Self::builtin(spec)
        }
    }
}

/// Deterministic random instance on the given edge list.
pub fn generate_instance(
    n: usize,
    edges: &[(usize, usize, EdgeKind)],
    seed: u64,
) -> Result<IsingProblem> {
    for &(i, j, _) in edges {
        if i >= n || j >= n || i == j {
            return Err(Error::contract(format!(
                "edge ({i}, {j}) is invalid for {n} qubits"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let third = 1.0 / 3.0;
    let sign = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { third } else { -third };
    let h = (0..n).map(|_| sign(&mut rng)).collect();
    let couplings: Vec<_> = edges
        .iter()
        .map(|&(i, j, kind)| {
            let v = match kind {
                EdgeKind::Strong => -1.0,
                EdgeKind::Random => sign(&mut rng),
            };
            (i, j, v)
        })
        .collect();
    IsingProblem::new(n, h, couplings)
}

impl Topology {
    pub fn instance(&self, seed: u64) -> Result<IsingProblem> {
        generate_instance(self.n, &self.edges, seed)
    }
}
