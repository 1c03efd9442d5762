//! Greedy elimination orders (min-fill, min-degree tie-break).

use std::collections::BTreeSet;

use crate::ising::IsingProblem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOrder {
    /// Qubits in the order they are eliminated.
    pub order: Vec<usize>,
    /// Largest separator met while eliminating along `order`.
    pub width: usize,
}

pub(crate) fn interaction_graph(problem: &IsingProblem) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); problem.n()];
    for (i, j) in problem.edges() {
        adj[i].insert(j);
        adj[j].insert(i);
    }
    adj
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (a, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[a + 1..] {
            if !adj[x].contains(&y) {
                missing += 1;
            }
        }
    }
    missing
}

/// Removes `v` from the graph after joining its neighbors into a clique.
/// Returns the neighbors, i.e. the separator of `v`.
pub(crate) fn eliminate(adj: &mut [BTreeSet<usize>], v: usize) -> Vec<usize> {
    let nbrs: Vec<usize> = std::mem::take(&mut adj[v]).into_iter().collect();
    for &x in &nbrs {
        adj[x].remove(&v);
    }
    for (a, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[a + 1..] {
            adj[x].insert(y);
            adj[y].insert(x);
        }
    }
    nbrs
}

/// Picks the qubit adding the fewest fill edges at each step; ties go to the
/// smallest current degree, then to the smallest index.
pub fn choose_elimination_order(problem: &IsingProblem) -> EliminationOrder {
    let n = problem.n();
    let mut adj = interaction_graph(problem);
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut width = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (fill_in(&adj, v), adj[v].len(), v))
            .expect("an alive vertex remains");
        alive[v] = false;
        width = width.max(eliminate(&mut adj, v).len());
        order.push(v);
    }
    EliminationOrder { order, width }
}

/// Induced width of an arbitrary order.
pub fn induced_width(problem: &IsingProblem, order: &[usize]) -> usize {
    let mut adj = interaction_graph(problem);
    order
        .iter()
        .map(|&v| eliminate(&mut adj, v).len())
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> IsingProblem {
        IsingProblem::new(n, vec![0.0; n], edges.iter().map(|&(i, j)| (i, j, 1.0))).unwrap()
    }

    fn is_permutation(order: &[usize], n: usize) -> bool {
        let mut seen = vec![false; n];
        order.len() == n && order.iter().all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
    }

    #[test]
    fn path_has_width_one() {
        let p = graph(3, &[(0, 1), (1, 2)]);
        let o = choose_elimination_order(&p);
        assert!(is_permutation(&o.order, 3));
        assert_eq!(o.width, 1);
    }

    #[test]
    fn isolated_vertices_have_width_zero() {
        let o = choose_elimination_order(&graph(5, &[]));
        assert!(is_permutation(&o.order, 5));
        assert_eq!(o.width, 0);
    }

    /// Minimum over all orders, by direct elimination without fill bookkeeping
    /// shortcuts: adjacency matrix, explicit clique join.
    fn min_width_over_all_orders(n: usize, edges: &[(usize, usize)]) -> usize {
        fn permutations(items: Vec<usize>) -> Vec<Vec<usize>> {
            if items.len() <= 1 {
                return vec![items];
            }
            let mut out = Vec::new();
            for i in 0..items.len() {
                let mut rest = items.clone();
                let head = rest.remove(i);
                for mut tail in permutations(rest) {
                    tail.insert(0, head);
                    out.push(tail);
                }
            }
            out
        }
        let mut best = usize::MAX;
        for order in permutations((0..n).collect()) {
            let mut m = vec![vec![false; n]; n];
            for &(i, j) in edges {
                m[i][j] = true;
                m[j][i] = true;
            }
            let mut gone = vec![false; n];
            let mut w = 0;
            for &v in &order {
                let nb: Vec<usize> = (0..n).filter(|&u| !gone[u] && m[v][u]).collect();
                w = w.max(nb.len());
                for &a in &nb {
                    for &b in &nb {
                        if a != b {
                            m[a][b] = true;
                        }
                    }
                }
                gone[v] = true;
            }
            best = best.min(w);
        }
        best
    }

    #[test]
    fn four_cycle_has_width_two() {
        let edges = [(0, 1), (1, 2), (2, 3), (0, 3)];
        assert_eq!(min_width_over_all_orders(4, &edges), 2);
        let o = choose_elimination_order(&graph(4, &edges));
        assert_eq!(o.width, 2);
        assert_eq!(induced_width(&graph(4, &edges), &o.order), 2);
    }

    #[test]
    fn greedy_matches_optimum_on_small_graphs() {
        let cases: [(usize, &[(usize, usize)]); 3] = [
            (5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]),
            (6, &[(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)]),
            (5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (2, 3), (3, 4), (4, 1)]),
        ];
        for (n, edges) in cases {
            let o = choose_elimination_order(&graph(n, edges));
            assert_eq!(o.width, min_width_over_all_orders(n, edges));
        }
    }
}
