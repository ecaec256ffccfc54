//! Exact S-packing colorability by backtracking.
//!
//! Vertices are assigned in descending-degree order. A vertex may join a
//! class of parameter `s` only if its radius-`s` ball holds no member of the
//! class, and among classes sharing a parameter a vertex may open class `j`
//! only when class `j - 1` is already in use.

use std::time::{Duration, Instant};

use crate::bitset::BitSet;
use crate::graph::Graph;
use crate::packing::{PackingColoring, PackingSequence};
use crate::verify;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 10_000_000,
            max_time: Duration::from_secs(60),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Feasible(PackingColoring),
    Infeasible,
    Timeout,
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible(_))
    }
}

#[derive(Clone, Debug)]
pub struct DecisionResult {
    pub verdict: Verdict,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

/// Decides whether `g` admits a packing coloring for `seq`.
pub fn decide(g: &Graph, seq: &PackingSequence, budget: SearchBudget) -> DecisionResult {
    let start = Instant::now();
    let parameters = seq.expanded();
    let mut search = Search::new(g, &parameters, budget, start);
    let outcome = search.run();
    let verdict = match outcome {
        Outcome::Found => {
            let assignment: Vec<Option<usize>> = search.assignment.clone();
            let mut col = PackingColoring::from_assignment(&parameters, &assignment);
            col.normalize();
            assert!(
                verify::is_valid(g, seq, &col),
                "exact search produced an invalid coloring"
            );
            Verdict::Feasible(col)
        }
        Outcome::Exhausted => Verdict::Infeasible,
        Outcome::OutOfBudget => Verdict::Timeout,
    };
    DecisionResult {
        verdict,
        nodes_explored: search.nodes,
        elapsed: start.elapsed(),
    }
}

enum Outcome {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Search<'a> {
    order: Vec<usize>,
    parameters: &'a [u32],
    /// `balls[slot]` is the conflict ball table for that slot's parameter.
    balls: Vec<std::rc::Rc<Vec<BitSet>>>,
    /// Index of the previous slot with the same parameter.
    prev_same: Vec<Option<usize>>,
    members: Vec<BitSet>,
    sizes: Vec<usize>,
    assignment: Vec<Option<usize>>,
    nodes: u64,
    budget: SearchBudget,
    start: Instant,
}

impl<'a> Search<'a> {
    fn new(g: &Graph, parameters: &'a [u32], budget: SearchBudget, start: Instant) -> Self {
        let n = g.n();
        let mut order: Vec<usize> = g.vertices().collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));

        let mut cache: Vec<(u32, std::rc::Rc<Vec<BitSet>>)> = Vec::new();
        let mut balls = Vec::with_capacity(parameters.len());
        for &s in parameters {
            let table = match cache.iter().find(|(r, _)| *r == s) {
                Some((_, t)) => t.clone(),
                None => {
                    let t = std::rc::Rc::new(g.vertices().map(|v| g.ball(v, s as usize)).collect());
                    cache.push((s, std::rc::Rc::clone(&t)));
                    t
                }
            };
            balls.push(table);
        }
        let prev_same = (0..parameters.len())
            .map(|j| (0..j).rev().find(|&i| parameters[i] == parameters[j]))
            .collect();
        Search {
            order,
            parameters,
            balls,
            prev_same,
            members: vec![BitSet::new(n); parameters.len()],
            sizes: vec![0; parameters.len()],
            assignment: vec![None; n],
            nodes: 0,
            budget,
            start,
        }
    }

    fn run(&mut self) -> Outcome {
        if self.order.is_empty() {
            return Outcome::Found;
        }
        self.place(0)
    }

    fn out_of_budget(&self) -> bool {
        self.nodes >= self.budget.max_nodes
            || (self.nodes.is_multiple_of(1024) && self.start.elapsed() >= self.budget.max_time)
    }

    fn place(&mut self, depth: usize) -> Outcome {
        let v = self.order[depth];
        for slot in 0..self.parameters.len() {
            if self.sizes[slot] == 0 {
                if let Some(p) = self.prev_same[slot] {
                    if self.sizes[p] == 0 {
                        continue;
                    }
                }
            }
            if self.balls[slot][v].intersects(&self.members[slot]) {
                continue;
            }
            self.nodes += 1;
            if self.out_of_budget() {
                return Outcome::OutOfBudget;
            }
            self.members[slot].insert(v);
            self.sizes[slot] += 1;
            self.assignment[v] = Some(slot);
            if depth + 1 == self.order.len() {
                return Outcome::Found;
            }
            match self.place(depth + 1) {
                Outcome::Exhausted => {}
                other => return other,
            }
            self.members[slot].remove(v);
            self.sizes[slot] -= 1;
            self.assignment[v] = None;
        }
        Outcome::Exhausted
    }
}

/// Result of exploring a grid of sequences `(s_1^{a_1}, ..., s_d^{a_d})`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Frontier {
    /// Minimal feasible multiplicity tuples under the componentwise order.
    pub minimal: Vec<Vec<usize>>,
    /// Tuples whose search hit the budget; their status is unknown.
    pub timeouts: Vec<Vec<usize>>,
}

/// Explores every multiplicity tuple with `0 <= a_i <= max_counts[i]` for
/// the given parameters and returns the Pareto frontier of feasible tuples,
/// each certified by [`decide`].
pub fn min_sequence_search(
    g: &Graph,
    parameters: &[u32],
    max_counts: &[usize],
    budget: SearchBudget,
) -> Frontier {
    assert_eq!(parameters.len(), max_counts.len());
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for &max in max_counts {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..=max).map(move |a| {
                    let mut next = t.clone();
                    next.push(a);
                    next
                })
            })
            .collect();
    }
    tuples.sort_by_key(|t| (t.iter().sum::<usize>(), t.clone()));

    let dominates = |a: &[usize], b: &[usize]| a.iter().zip(b).all(|(x, y)| x >= y);
    let mut feasible: Vec<Vec<usize>> = Vec::new();
    let mut infeasible: Vec<Vec<usize>> = Vec::new();
    let mut timeouts = Vec::new();
    for t in tuples {
        if feasible.iter().any(|f| dominates(&t, f)) || infeasible.iter().any(|i| dominates(i, &t))
        {
            continue;
        }
        let seq = PackingSequence::from_counts(parameters.iter().copied().zip(t.iter().copied()));
        match decide(g, &seq, budget).verdict {
            Verdict::Feasible(_) => feasible.push(t),
            Verdict::Infeasible => infeasible.push(t),
            Verdict::Timeout => timeouts.push(t),
        }
    }
    feasible.sort();
    Frontier {
        minimal: feasible,
        timeouts,
    }
}
