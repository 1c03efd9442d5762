//! k-best bucket elimination over the classical energy.
//!
//! Each bucket eliminates one qubit. Its message holds, for every
//! assignment of the separator, the sorted list of the best `k`
//! completions of the already-eliminated part, each remembered as the
//! qubit's value plus one rank into every child message. Lists combine by
//! a best-first walk over rank tuples, and the final states are read back
//! by descending the elimination tree from the root messages.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::order::{choose_elimination_order, eliminate, interaction_graph, EliminationOrder};
use super::{SubspaceBasis, TIE_TOLERANCE};
use crate::error::{Error, Result};
use crate::ising::{words_for, IsingProblem, WORD_BITS};

#[derive(Debug, Clone, Copy)]
pub struct EnumerationOptions {
    /// Largest allowed `2^width * k` for a single message table.
    pub memory_budget: u128,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            memory_budget: 1 << 27,
        }
    }
}

/// The `target_size` lowest classical states, extended to close the top
/// degenerate level.
pub fn enumerate_low_states(problem: &IsingProblem, target_size: usize) -> Result<SubspaceBasis> {
    enumerate_low_states_with(problem, target_size, &EnumerationOptions::default())
}

pub fn enumerate_low_states_with(
    problem: &IsingProblem,
    target_size: usize,
    options: &EnumerationOptions,
) -> Result<SubspaceBasis> {
    if target_size == 0 {
        return Err(Error::contract("target size must be at least 1"));
    }
    let total: u128 = if problem.n() < 127 {
        1u128 << problem.n()
    } else {
        u128::MAX
    };
    let target = (target_size as u128).min(total) as usize;
    let order = choose_elimination_order(problem);
    let plan = Plan::new(problem, &order);

    // A little headroom usually settles the top level in one pass.
    let mut k = ((target + (target / 4).max(16)) as u128).min(total) as usize;
    loop {
        let states = plan.run(problem, k, options.memory_budget)?;
        let complete = states.len() as u128 == total;
        let mut energies: Vec<f64> = states.iter().map(|w| problem.energy_of_words(w)).collect();
        energies.sort_by(f64::total_cmp);
        let top = energies[target - 1];
        let settled = complete || energies[energies.len() - 1] > top + TIE_TOLERANCE;
        if settled {
            return SubspaceBasis::from_candidates(problem, states, target, complete);
        }
        k = ((2 * k) as u128).min(total) as usize;
    }
}

struct Bucket {
    var: usize,
    sep: Vec<usize>,
    children: Vec<usize>,
    /// For each child, where each of its separator qubits sits in this
    /// bucket's frame: `sep.len()` stands for `var` itself.
    child_frames: Vec<Vec<usize>>,
    /// `J(var, sep[b])`, zero for fill edges.
    couplings: Vec<f64>,
}

struct Plan {
    buckets: Vec<Bucket>,
    roots: Vec<usize>,
    width: usize,
}

/// One bucket's message. Entry `e` of the list for separator assignment
/// `a` lives at `offsets[a] + rank`; its choices are
/// `choices[e * stride..(e + 1) * stride]` = `[value, child ranks..]`.
#[derive(Default)]
struct Table {
    offsets: Vec<usize>,
    energies: Vec<f64>,
    choices: Vec<u32>,
    stride: usize,
}

impl Table {
    fn list(&self, assignment: usize) -> &[f64] {
        &self.energies[self.offsets[assignment]..self.offsets[assignment + 1]]
    }
}

impl Plan {
    fn new(problem: &IsingProblem, order: &EliminationOrder) -> Self {
        let n = problem.n();
        let mut position = vec![0; n];
        for (p, &v) in order.order.iter().enumerate() {
            position[v] = p;
        }
        let mut adj = interaction_graph(problem);
        let mut buckets: Vec<Bucket> = Vec::with_capacity(n);
        let mut roots = Vec::new();
        let mut parent_of = Vec::with_capacity(n);
        for (b, &v) in order.order.iter().enumerate() {
            let sep = eliminate(&mut adj, v);
            let couplings = sep.iter().map(|&u| problem.coupling(v, u)).collect();
            match sep.iter().map(|&u| position[u]).min() {
                Some(p) => parent_of.push(Some(p)),
                None => {
                    parent_of.push(None);
                    roots.push(b);
                }
            }
            buckets.push(Bucket {
                var: v,
                sep,
                children: Vec::new(),
                child_frames: Vec::new(),
                couplings,
            });
        }
        for b in 0..n {
            if let Some(p) = parent_of[b] {
                let frame: Vec<usize> = buckets[b]
                    .sep
                    .iter()
                    .map(|&u| {
                        let parent = &buckets[p];
                        if u == parent.var {
                            parent.sep.len()
                        } else {
                            parent
                                .sep
                                .binary_search(&u)
                                .expect("child separator lies in parent scope")
                        }
                    })
                    .collect();
                buckets[p].children.push(b);
                buckets[p].child_frames.push(frame);
            }
        }
        Self {
            buckets,
            roots,
            width: order.width,
        }
    }

    /// The `k` lowest states by DP energy (fewer if the space is smaller).
    fn run(&self, problem: &IsingProblem, k: usize, budget: u128) -> Result<Vec<Box<[u64]>>> {
        let worst = self
            .buckets
            .iter()
            .map(|b| (1u128 << b.sep.len().min(100)) * k as u128)
            .max()
            .unwrap_or(0);
        if self.width >= 100 || worst > budget {
            return Err(Error::Resource {
                width: self.width,
                entries: worst,
                budget,
            });
        }

        let mut tables: Vec<Table> = Vec::with_capacity(self.buckets.len());
        let mut scratch = Scratch::default();
        for bucket in &self.buckets {
            let table = self.eliminate_bucket(problem, bucket, &tables, k, &mut scratch);
            for &c in &bucket.children {
                tables[c].energies = Vec::new();
            }
            tables.push(table);
        }

        let root_lists: Vec<&[f64]> = self.roots.iter().map(|&r| tables[r].list(0)).collect();
        let mut finals = Table {
            offsets: vec![0],
            stride: 1 + root_lists.len(),
            ..Default::default()
        };
        scratch.combine(&[(0, 0.0)], |_| &root_lists, k, &mut finals);
        drop(root_lists);
        for &r in &self.roots {
            tables[r].energies = Vec::new();
        }

        let words = words_for(problem.n());
        let mut states = Vec::with_capacity(finals.choices.len() / finals.stride);
        let mut stack = Vec::new();
        for entry in finals.choices.chunks(finals.stride) {
            let mut state = vec![0u64; words].into_boxed_slice();
            stack.clear();
            for (i, &r) in self.roots.iter().enumerate() {
                stack.push((r, tables[r].offsets[0] + entry[1 + i] as usize));
            }
            while let Some((b, e)) = stack.pop() {
                let bucket = &self.buckets[b];
                let table = &tables[b];
                let picks = &table.choices[e * table.stride..(e + 1) * table.stride];
                if picks[0] == 1 {
                    state[bucket.var / WORD_BITS] |= 1 << (bucket.var % WORD_BITS);
                }
                for (i, &c) in bucket.children.iter().enumerate() {
                    let child = &self.buckets[c];
                    let assignment = child
                        .sep
                        .iter()
                        .enumerate()
                        .map(|(bit, &u)| (((state[u / WORD_BITS] >> (u % WORD_BITS)) & 1) as usize) << bit)
                        .sum::<usize>();
                    stack.push((c, tables[c].offsets[assignment] + picks[1 + i] as usize));
                }
            }
            states.push(state);
        }
        Ok(states)
    }

    fn eliminate_bucket(
        &self,
        problem: &IsingProblem,
        bucket: &Bucket,
        tables: &[Table],
        k: usize,
        scratch: &mut Scratch,
    ) -> Table {
        let w = bucket.sep.len();
        let d = bucket.children.len();
        let mut table = Table {
            offsets: Vec::with_capacity((1 << w) + 1),
            stride: 1 + d,
            ..Default::default()
        };
        table.offsets.push(0);
        let h = problem.h()[bucket.var];
        let mut lists: [Vec<&[f64]>; 2] = [Vec::with_capacity(d), Vec::with_capacity(d)];
        for a in 0..(1usize << w) {
            let mut field = h;
            for (bit, &j) in bucket.couplings.iter().enumerate() {
                field += if (a >> bit) & 1 == 1 { -j } else { j };
            }
            for (x, slot) in lists.iter_mut().enumerate() {
                let frame = a | (x << w);
                slot.clear();
                for (&c, positions) in bucket.children.iter().zip(&bucket.child_frames) {
                    let idx = positions
                        .iter()
                        .enumerate()
                        .map(|(bit, &p)| ((frame >> p) & 1) << bit)
                        .sum::<usize>();
                    slot.push(tables[c].list(idx));
                }
            }
            scratch.combine(&[(0, field), (1, -field)], |x| &lists[x as usize], k, &mut table);
        }
        table
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    energy: f64,
    seq: u64,
    value: u32,
    tuple_at: usize,
    last: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    // reversed: BinaryHeap pops the lowest energy first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .energy
            .total_cmp(&self.energy)
            .then(other.seq.cmp(&self.seq))
    }
}

#[derive(Default)]
struct Scratch {
    heap: BinaryHeap<Candidate>,
    arena: Vec<u32>,
}

impl Scratch {
    /// Appends to `out` the `k` best sums `base + Σ_i lists[i][rank_i]`
    /// over both groups, then closes the list with a new offset.
    ///
    /// Successors of a rank tuple only bump positions at or after its last
    /// bumped one, so every tuple is generated once.
    fn combine<'a, F>(&mut self, groups: &[(u32, f64)], lists_for: F, k: usize, out: &mut Table)
    where
        F: Fn(u32) -> &'a [&'a [f64]],
    {
        self.heap.clear();
        self.arena.clear();
        let mut seq = 0u64;
        let d = out.stride - 1;
        let mut bases = [0.0; 2];
        for &(value, base) in groups {
            bases[value as usize] = base;
            let lists = lists_for(value);
            if lists.iter().any(|l| l.is_empty()) {
                continue;
            }
            let tuple_at = self.arena.len();
            self.arena.extend(std::iter::repeat(0).take(d));
            let energy = base + lists.iter().map(|l| l[0]).sum::<f64>();
            self.heap.push(Candidate { energy, seq, value, tuple_at, last: 0 });
            seq += 1;
        }
        let mut emitted = 0;
        while emitted < k {
            let Some(c) = self.heap.pop() else { break };
            out.energies.push(c.energy);
            out.choices.push(c.value);
            out.choices
                .extend_from_slice(&self.arena[c.tuple_at..c.tuple_at + d]);
            emitted += 1;
            let lists = lists_for(c.value);
            for q in c.last..d {
                let rank = self.arena[c.tuple_at + q] as usize;
                if rank + 1 >= lists[q].len() {
                    continue;
                }
                let tuple_at = self.arena.len();
                self.arena.extend_from_within(c.tuple_at..c.tuple_at + d);
                self.arena[tuple_at + q] += 1;
                let tuple = &self.arena[tuple_at..tuple_at + d];
                let energy = bases[c.value as usize]
                    + lists
                        .iter()
                        .zip(tuple)
                        .map(|(l, &r)| l[r as usize])
                        .sum::<f64>();
                self.heap.push(Candidate { energy, seq, value: c.value, tuple_at, last: q });
                seq += 1;
            }
        }
        out.offsets.push(out.energies.len());
    }
}
