//! Weighted independent sets: the φ weight, exchange local search, an exact
//! branch-and-bound solver, iterated layer extraction, and the balanced
//! multi-layer family (maximum total size, then fewest edges to the
//! residual).
//!
//! Weights are integers. The heavy weight goes to vertices whose degree in
//! the *whole* graph equals `k`; everything else gets the light weight. When
//! a search is confined to a residual vertex set the weights are still taken
//! from the original degrees.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bitset::BitSet;
use crate::graph::Graph;

/// Default vertex cap for [`exact_mwis`].
pub const EXACT_CAP: usize = 40;

const ALTERNATING_STEP_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MisError {
    #[error("set is not independent: edge {0}-{1}")]
    NotIndependent(usize, usize),
    #[error("exact solver capped at {cap} vertices, got {n}")]
    TooLarge { n: usize, cap: usize },
    #[error("local search exceeded {0} moves")]
    MoveCapExceeded(usize),
    #[error("invalid weight profile: heavy {heavy} must exceed light {light} > 0")]
    InvalidWeights { heavy: u32, light: u32 },
    #[error("invalid exchange policy: need max_remove >= max_add >= 1")]
    InvalidPolicy,
    #[error("layer count must be at least {min}, got {got}")]
    InvalidLayerCount { got: usize, min: usize },
    #[error("cannot seed {layers} nonempty layers from {n} vertices")]
    TooFewVertices { n: usize, layers: usize },
    #[error("vertex {vertex} has no neighbor in layer {layer}")]
    MissingFather { vertex: usize, layer: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightProfile {
    pub heavy_weight: u32,
    pub light_weight: u32,
    pub k: usize,
}

impl WeightProfile {
    pub fn new(heavy_weight: u32, light_weight: u32, k: usize) -> Result<Self, MisError> {
        if heavy_weight <= light_weight || light_weight == 0 {
            return Err(MisError::InvalidWeights {
                heavy: heavy_weight,
                light: light_weight,
            });
        }
        Ok(WeightProfile {
            heavy_weight,
            light_weight,
            k,
        })
    }

    /// `1 : 0.6`, scaled to `5 : 3`.
    pub fn sparse(k: usize) -> Self {
        WeightProfile {
            heavy_weight: 5,
            light_weight: 3,
            k,
        }
    }

    /// `1 : 0.4`, scaled to `5 : 2`.
    pub fn dense(k: usize) -> Self {
        WeightProfile {
            heavy_weight: 5,
            light_weight: 2,
            k,
        }
    }

    pub fn weight_of_degree(&self, degree: usize) -> u32 {
        if degree == self.k {
            self.heavy_weight
        } else {
            self.light_weight
        }
    }

    pub fn vertex_weights(&self, g: &Graph) -> Vec<u32> {
        g.vertices()
            .map(|v| self.weight_of_degree(g.degree(v)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExchangePolicy {
    pub max_remove: usize,
    pub max_add: usize,
    pub allow_alternating_paths: bool,
    pub tiebreak_seed: u64,
}

impl Default for ExchangePolicy {
    fn default() -> Self {
        ExchangePolicy {
            max_remove: 3,
            max_add: 2,
            allow_alternating_paths: true,
            tiebreak_seed: 0,
        }
    }
}

impl ExchangePolicy {
    pub fn with_seed(seed: u64) -> Self {
        ExchangePolicy {
            tiebreak_seed: seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), MisError> {
        if self.max_add >= 1 && self.max_remove >= self.max_add {
            Ok(())
        } else {
            Err(MisError::InvalidPolicy)
        }
    }
}

/// Weighted size of an independent set.
pub fn phi(g: &Graph, set: &[usize], w: &WeightProfile) -> Result<u64, MisError> {
    if let Some((u, v)) = g.edge_within(set) {
        return Err(MisError::NotIndependent(u, v));
    }
    let mut uniq = set.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    Ok(uniq
        .iter()
        .map(|&v| u64::from(w.weight_of_degree(g.degree(v))))
        .sum())
}

fn full_mask(g: &Graph) -> BitSet {
    BitSet::from_iter_with_len(g.n(), g.vertices())
}

/// Local search to a fixed point of the bounded exchange family: no move
/// removing at most `max_remove` vertices and adding at most `max_add`
/// keeps the set independent and strictly increases φ.
pub fn exchange_optimize(
    g: &Graph,
    w: &WeightProfile,
    policy: &ExchangePolicy,
    start: &[usize],
) -> Result<Vec<usize>, MisError> {
    exchange_optimize_within(g, &full_mask(g), &w.vertex_weights(g), policy, start)
}

/// [`exchange_optimize`] confined to the vertices of `allowed`, with explicit
/// per-vertex weights.
pub fn exchange_optimize_within(
    g: &Graph,
    allowed: &BitSet,
    weights: &[u32],
    policy: &ExchangePolicy,
    start: &[usize],
) -> Result<Vec<usize>, MisError> {
    policy.validate()?;
    if let Some((u, v)) = g.edge_within(start) {
        return Err(MisError::NotIndependent(u, v));
    }
    let mut engine = Exchange::new(g, allowed, weights);
    let seed_set: Vec<usize> = if start.is_empty() {
        greedy_seed(g, allowed, weights, policy.tiebreak_seed)
    } else {
        start
            .iter()
            .copied()
            .filter(|&v| allowed.contains(v))
            .collect()
    };
    engine.apply(&seed_set, &[]);

    let n = allowed.count();
    let cap = 50 * n * n + 50;
    let mut moves = 0;
    loop {
        let step = engine.improving_exchange(policy).or_else(|| {
            if policy.allow_alternating_paths {
                engine.improving_alternating_path()
            } else {
                None
            }
        });
        match step {
            Some((add, remove)) => {
                moves += 1;
                if moves > cap {
                    return Err(MisError::MoveCapExceeded(cap));
                }
                engine.apply(&add, &remove);
            }
            None => break,
        }
    }
    Ok(engine.members())
}

/// Greedy start: heavier first, then lower degree, then lower index; the
/// seed shuffles ties among vertices with equal weight and degree.
fn greedy_seed(g: &Graph, allowed: &BitSet, weights: &[u32], seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = allowed.iter().collect();
    if seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        order.sort_by_key(|&v| (std::cmp::Reverse(weights[v]), g.degree(v)));
    } else {
        order.sort_by_key(|&v| (std::cmp::Reverse(weights[v]), g.degree(v), v));
    }
    let mut blocked = BitSet::new(g.n());
    let mut out = Vec::new();
    for v in order {
        if !blocked.contains(v) {
            out.push(v);
            blocked.insert(v);
            blocked.union_with(g.neighbor_set(v));
        }
    }
    out.sort_unstable();
    out
}

struct Exchange<'a> {
    g: &'a Graph,
    allowed: &'a BitSet,
    weights: &'a [u32],
    in_set: Vec<bool>,
}

impl<'a> Exchange<'a> {
    fn new(g: &'a Graph, allowed: &'a BitSet, weights: &'a [u32]) -> Self {
        Exchange {
            g,
            allowed,
            weights,
            in_set: vec![false; g.n()],
        }
    }

    fn members(&self) -> Vec<usize> {
        (0..self.g.n()).filter(|&v| self.in_set[v]).collect()
    }

    fn apply(&mut self, add: &[usize], remove: &[usize]) {
        for &v in remove {
            self.in_set[v] = false;
        }
        for &v in add {
            self.in_set[v] = true;
        }
    }

    fn set_neighbors(&self, vs: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = vs
            .iter()
            .flat_map(|&v| self.g.neighbors(v).iter().copied())
            .filter(|&u| self.in_set[u])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn weight(&self, vs: &[usize]) -> u64 {
        vs.iter().map(|&v| u64::from(self.weights[v])).sum()
    }

    fn is_candidate(&self, v: usize) -> bool {
        self.allowed.contains(v) && !self.in_set[v]
    }

    /// First improving move in the bounded family. Sets to add are grown
    /// only through shared set-neighbors: if an added set splits into parts
    /// with disjoint removal sets, its gain is the sum of the parts' gains,
    /// so some smaller part already improves.
    fn improving_exchange(&self, policy: &ExchangePolicy) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut level: Vec<Vec<usize>> = Vec::new();
        for a in self.g.vertices().filter(|&a| self.is_candidate(a)) {
            let remove = self.set_neighbors(&[a]);
            if remove.len() <= policy.max_remove
                && u64::from(self.weights[a]) > self.weight(&remove)
            {
                return Some((vec![a], remove));
            }
            level.push(vec![a]);
        }
        for _size in 2..=policy.max_add {
            let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
            let mut next_level = Vec::new();
            for set in &level {
                let anchor = set[0];
                let mut extensions = BTreeSet::new();
                for r in self.set_neighbors(set) {
                    for &b in self.g.neighbors(r) {
                        if b > anchor
                            && self.is_candidate(b)
                            && !set.contains(&b)
                            && set.iter().all(|&x| !self.g.has_edge(x, b))
                        {
                            extensions.insert(b);
                        }
                    }
                }
                for b in extensions {
                    let mut grown = set.clone();
                    grown.push(b);
                    grown.sort_unstable();
                    if !seen.insert(grown.clone()) {
                        continue;
                    }
                    let remove = self.set_neighbors(&grown);
                    if remove.len() <= policy.max_remove
                        && self.weight(&grown) > self.weight(&remove)
                    {
                        return Some((grown, remove));
                    }
                    next_level.push(grown);
                }
            }
            level = next_level;
        }
        None
    }

    fn improving_alternating_path(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let g = self.g;
        augmenting_path(
            g,
            |v| self.in_set[v],
            |v| self.is_candidate(v),
            |v| u64::from(self.weights[v]),
        )
    }
}

/// Searches for an alternating path `x1 u1 x2 u2 ... x_r` whose ends lie
/// outside the set, such that swapping the path's set vertices for its
/// outside vertices keeps the set independent and strictly increases the
/// weight. Every outside vertex on the path must have all of its
/// set-neighbors on the path.
pub(crate) fn augmenting_path(
    g: &Graph,
    in_set: impl Fn(usize) -> bool,
    outside: impl Fn(usize) -> bool,
    weight: impl Fn(usize) -> u64,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let fathers: Vec<Vec<usize>> = g
        .vertices()
        .map(|v| {
            if outside(v) {
                g.neighbors(v)
                    .iter()
                    .copied()
                    .filter(|&u| in_set(u))
                    .collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let mut steps = 0usize;
    for x in g.vertices() {
        if !outside(x) || fathers[x].len() != 1 {
            continue;
        }
        let mut path_out = vec![x];
        let mut path_in = vec![fathers[x][0]];
        if let Some(found) = extend_path(
            g,
            &fathers,
            &outside,
            &weight,
            &mut path_out,
            &mut path_in,
            &mut steps,
        ) {
            return Some(found);
        }
        if steps > ALTERNATING_STEP_CAP {
            return None;
        }
    }
    None
}

fn extend_path(
    g: &Graph,
    fathers: &[Vec<usize>],
    outside: &impl Fn(usize) -> bool,
    weight: &impl Fn(usize) -> u64,
    path_out: &mut Vec<usize>,
    path_in: &mut Vec<usize>,
    steps: &mut usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    *steps += 1;
    if *steps > ALTERNATING_STEP_CAP {
        return None;
    }
    let tip = *path_in.last().unwrap();
    let compatible = |y: usize, path_out: &[usize]| {
        outside(y) && !path_out.contains(&y) && path_out.iter().all(|&x| !g.has_edge(x, y))
    };
    // Close the path at `tip`.
    for &y in g.neighbors(tip) {
        if compatible(y, path_out) && fathers[y].iter().all(|f| path_in.contains(f)) {
            let gain_out: u64 = path_out.iter().map(|&v| weight(v)).sum::<u64>() + weight(y);
            let gain_in: u64 = path_in.iter().map(|&v| weight(v)).sum();
            if gain_out > gain_in {
                let mut add = path_out.clone();
                add.push(y);
                add.sort_unstable();
                let mut remove = path_in.clone();
                remove.sort_unstable();
                return Some((add, remove));
            }
        }
    }
    // Or continue through an outside vertex to a new set vertex.
    for &y in g.neighbors(tip) {
        if !compatible(y, path_out) {
            continue;
        }
        let fresh: Vec<usize> = fathers[y]
            .iter()
            .copied()
            .filter(|f| !path_in.contains(f))
            .collect();
        if fresh.len() != 1 {
            continue;
        }
        path_out.push(y);
        path_in.push(fresh[0]);
        let found = extend_path(g, fathers, outside, weight, path_out, path_in, steps);
        path_out.pop();
        path_in.pop();
        if found.is_some() {
            return found;
        }
        if *steps > ALTERNATING_STEP_CAP {
            return None;
        }
    }
    None
}

/// Exact maximum-φ independent set by branch and bound, for graphs of at
/// most [`EXACT_CAP`] vertices.
pub fn exact_mwis(g: &Graph, w: &WeightProfile) -> Result<(Vec<usize>, u64), MisError> {
    exact_mwis_within(g, &full_mask(g), &w.vertex_weights(g), EXACT_CAP)
}

/// [`exact_mwis`] restricted to `allowed` with explicit weights and cap.
pub fn exact_mwis_within(
    g: &Graph,
    allowed: &BitSet,
    weights: &[u32],
    cap: usize,
) -> Result<(Vec<usize>, u64), MisError> {
    let n = allowed.count();
    if n > cap || n > 128 {
        return Err(MisError::TooLarge {
            n,
            cap: cap.min(128),
        });
    }
    let verts: Vec<usize> = allowed.iter().collect();
    let local_adj: Vec<u128> = verts
        .iter()
        .map(|&v| {
            verts
                .iter()
                .enumerate()
                .filter(|(_, &u)| g.has_edge(u, v))
                .fold(0u128, |acc, (i, _)| acc | (1u128 << i))
        })
        .collect();
    let local_w: Vec<u64> = verts.iter().map(|&v| u64::from(weights[v])).collect();
    let solver = BranchAndBound {
        adj: &local_adj,
        weights: &local_w,
    };
    let all = if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    };
    let (best, mask) = solver.solve(all);
    let set = (0..n)
        .filter(|&i| mask >> i & 1 == 1)
        .map(|i| verts[i])
        .collect();
    Ok((set, best))
}

struct BranchAndBound<'a> {
    adj: &'a [u128],
    weights: &'a [u64],
}

fn bits(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let i = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(i)
    })
}

impl BranchAndBound<'_> {
    fn component_of(&self, cand: u128, start: usize) -> u128 {
        let mut comp = 1u128 << start;
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0;
            for v in bits(frontier) {
                next |= self.adj[v] & cand;
            }
            frontier = next & !comp;
            comp |= next;
        }
        comp
    }

    /// Greedy clique cover: the heaviest vertex of each clique bounds what
    /// an independent set can take from it.
    fn upper_bound(&self, cand: u128) -> u64 {
        let mut rest = cand;
        let mut bound = 0;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            let mut clique_max = self.weights[v];
            let mut common = self.adj[v] & rest;
            rest &= !(1u128 << v);
            while common != 0 {
                let u = common.trailing_zeros() as usize;
                clique_max = clique_max.max(self.weights[u]);
                common &= self.adj[u];
                rest &= !(1u128 << u);
            }
            bound += clique_max;
        }
        bound
    }

    /// Optimum weight and a witness set within `cand`.
    fn solve(&self, cand: u128) -> (u64, u128) {
        if cand == 0 {
            return (0, 0);
        }
        let first = cand.trailing_zeros() as usize;
        let comp = self.component_of(cand, first);
        if comp != cand {
            let (w1, s1) = self.solve(comp);
            let (w2, s2) = self.solve(cand & !comp);
            return (w1 + w2, s1 | s2);
        }
        let v = bits(cand)
            .max_by_key(|&v| ((self.adj[v] & cand).count_ones(), std::cmp::Reverse(v)))
            .unwrap();
        if self.adj[v] & cand == 0 {
            return (self.weights[v], 1u128 << v);
        }
        let (wi, si) = self.solve(cand & !self.adj[v] & !(1u128 << v));
        let include = (wi + self.weights[v], si | 1u128 << v);
        let without = cand & !(1u128 << v);
        if self.upper_bound(without) <= include.0 {
            return include;
        }
        let exclude = self.solve(without);
        if exclude.0 > include.0 {
            exclude
        } else {
            include
        }
    }
}

/// Ordered disjoint independent sets plus the uncovered residual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredFamily {
    pub layers: Vec<Vec<usize>>,
    pub residual: Vec<usize>,
    pub k: usize,
    layer_of: Vec<Option<usize>>,
}

impl LayeredFamily {
    pub fn from_layers(n: usize, k: usize, layers: Vec<Vec<usize>>) -> Self {
        let mut layer_of = vec![None; n];
        let mut layers = layers;
        for (i, layer) in layers.iter_mut().enumerate() {
            layer.sort_unstable();
            for &v in layer.iter() {
                layer_of[v] = Some(i);
            }
        }
        let residual = (0..n).filter(|&v| layer_of[v].is_none()).collect();
        LayeredFamily {
            layers,
            residual,
            k,
            layer_of,
        }
    }

    pub fn n(&self) -> usize {
        self.layer_of.len()
    }

    pub fn layer_of(&self, v: usize) -> Option<usize> {
        self.layer_of[v]
    }

    pub fn in_residual(&self, v: usize) -> bool {
        self.layer_of[v].is_none()
    }

    /// Neighbors of `v` in layer `i`.
    pub fn fathers(&self, g: &Graph, v: usize, i: usize) -> Vec<usize> {
        g.neighbors(v)
            .iter()
            .copied()
            .filter(|&u| self.layer_of[u] == Some(i))
            .collect()
    }

    pub fn covered(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Checks disjointness and independence of the layers.
    pub fn check_layers(&self, g: &Graph) -> Result<(), MisError> {
        for layer in &self.layers {
            if let Some((u, v)) = g.edge_within(layer) {
                return Err(MisError::NotIndependent(u, v));
            }
        }
        Ok(())
    }

    /// Every vertex outside layers `0..=i` has a neighbor in layer `i`, for
    /// each `i`.
    pub fn check_fathers(&self, g: &Graph) -> Result<(), MisError> {
        for v in g.vertices() {
            let below = self.layer_of[v].unwrap_or(self.layers.len());
            for i in 0..below {
                if self.fathers(g, v, i).is_empty() {
                    return Err(MisError::MissingFather {
                        vertex: v,
                        layer: i,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Edges between the layers' union and the residual.
pub fn theta(g: &Graph, fam: &LayeredFamily) -> usize {
    fam.residual
        .iter()
        .map(|&x| {
            g.neighbors(x)
                .iter()
                .filter(|&&u| !fam.in_residual(u))
                .count()
        })
        .sum()
}

/// Builds `m` layers: each is φ-optimized (by local search, or exactly when
/// `use_exact`) on the graph left after removing the earlier layers.
pub fn build_layers(
    g: &Graph,
    m: usize,
    w: &WeightProfile,
    policy: &ExchangePolicy,
    use_exact: bool,
) -> Result<LayeredFamily, MisError> {
    if m < 1 {
        return Err(MisError::InvalidLayerCount { got: m, min: 1 });
    }
    let weights = w.vertex_weights(g);
    let mut allowed = full_mask(g);
    let mut layers = Vec::with_capacity(m);
    for _ in 0..m {
        let layer = if use_exact {
            exact_mwis_within(g, &allowed, &weights, EXACT_CAP)?.0
        } else {
            exchange_optimize_within(g, &allowed, &weights, policy, &[])?
        };
        for &v in &layer {
            allowed.remove(v);
        }
        layers.push(layer);
    }
    let fam = LayeredFamily::from_layers(g.n(), w.k, layers);
    fam.check_layers(g)?;
    fam.check_fathers(g)?;
    Ok(fam)
}

/// `m` disjoint nonempty independent sets, locally optimal for the
/// objective (largest union, then fewest union-residual edges).
pub fn build_balanced_family(
    g: &Graph,
    m: usize,
    policy: &ExchangePolicy,
) -> Result<LayeredFamily, MisError> {
    policy.validate()?;
    if m < 2 {
        return Err(MisError::InvalidLayerCount { got: m, min: 2 });
    }
    if g.n() < m {
        return Err(MisError::TooFewVertices {
            n: g.n(),
            layers: m,
        });
    }
    let mut state = Balanced::seed(g, m);
    let n = g.n();
    let cap = 50 * n * n + 50;
    let mut moves = 0;
    while let Some(mv) = state.next_move(policy) {
        moves += 1;
        if moves > cap {
            return Err(MisError::MoveCapExceeded(cap));
        }
        state.apply(&mv);
    }
    let layers = (0..m)
        .map(|i| {
            g.vertices()
                .filter(|&v| state.layer_of[v] == Some(i))
                .collect()
        })
        .collect();
    let fam = LayeredFamily::from_layers(n, g.max_degree(), layers);
    fam.check_layers(g)?;
    for &x in &fam.residual {
        for i in 0..m {
            if fam.fathers(g, x, i).is_empty() {
                return Err(MisError::MissingFather {
                    vertex: x,
                    layer: i,
                });
            }
        }
    }
    debug_assert!(fam.layers.iter().all(|l| !l.is_empty()));
    Ok(fam)
}

/// A change of layer membership: each entry moves a vertex to a layer
/// (`None` = residual).
#[derive(Clone, Debug, PartialEq, Eq)]
struct Move {
    changes: Vec<(usize, Option<usize>)>,
}

struct Balanced<'a> {
    g: &'a Graph,
    m: usize,
    layer_of: Vec<Option<usize>>,
    sizes: Vec<usize>,
    /// `counts[v * m + i]` = neighbors of `v` in layer `i`.
    counts: Vec<usize>,
}

impl<'a> Balanced<'a> {
    fn seed(g: &'a Graph, m: usize) -> Self {
        let n = g.n();
        let mut state = Balanced {
            g,
            m,
            layer_of: vec![None; n],
            sizes: vec![0; m],
            counts: vec![0; n * m],
        };
        for v in g.vertices() {
            if let Some(i) = (0..m).find(|&i| state.count(v, i) == 0) {
                state.set_layer(v, Some(i));
            }
        }
        // Greedy left a layer empty only if every vertex was placed; split
        // off singletons from the largest layers.
        while let Some(empty) = (0..m).find(|&i| state.sizes[i] == 0) {
            let donor = (0..m)
                .max_by_key(|&i| (state.sizes[i], std::cmp::Reverse(i)))
                .unwrap();
            let v = g
                .vertices()
                .rev()
                .find(|&v| state.layer_of[v] == Some(donor))
                .unwrap();
            state.set_layer(v, Some(empty));
        }
        state
    }

    fn count(&self, v: usize, i: usize) -> usize {
        self.counts[v * self.m + i]
    }

    fn set_layer(&mut self, v: usize, layer: Option<usize>) {
        if let Some(old) = self.layer_of[v] {
            self.sizes[old] -= 1;
            for &u in self.g.neighbors(v) {
                self.counts[u * self.m + old] -= 1;
            }
        }
        if let Some(new) = layer {
            self.sizes[new] += 1;
            for &u in self.g.neighbors(v) {
                self.counts[u * self.m + new] += 1;
            }
        }
        self.layer_of[v] = layer;
    }

    fn apply(&mut self, mv: &Move) {
        // Vacate first so counts never see two members of a layer adjacent.
        for &(v, _) in &mv.changes {
            self.set_layer(v, None);
        }
        for &(v, layer) in &mv.changes {
            if layer.is_some() {
                self.set_layer(v, layer);
            }
        }
    }

    fn in_union(&self, v: usize) -> bool {
        self.layer_of[v].is_some()
    }

    /// (change in union size, change in cut edges) for a move.
    fn evaluate(&self, mv: &Move) -> (i64, i64) {
        let new_in = |v: usize| -> bool {
            match mv.changes.iter().find(|(u, _)| *u == v) {
                Some((_, layer)) => layer.is_some(),
                None => self.in_union(v),
            }
        };
        let mut d_size = 0i64;
        let mut d_cut = 0i64;
        let touched: Vec<usize> = mv.changes.iter().map(|&(v, _)| v).collect();
        for &v in &touched {
            d_size += i64::from(new_in(v)) - i64::from(self.in_union(v));
            for &u in self.g.neighbors(v) {
                if touched.contains(&u) && u < v {
                    continue;
                }
                let before = self.in_union(v) != self.in_union(u);
                let after = new_in(v) != new_in(u);
                d_cut += i64::from(after) - i64::from(before);
            }
        }
        (d_size, d_cut)
    }

    fn improves(&self, mv: &Move) -> bool {
        let (d_size, d_cut) = self.evaluate(mv);
        d_size > 0 || (d_size == 0 && d_cut < 0)
    }

    fn residual(&self) -> impl Iterator<Item = usize> + '_ {
        self.g.vertices().filter(|&v| self.layer_of[v].is_none())
    }

    fn layer_fathers(&self, xs: &[usize], t: usize) -> Vec<usize> {
        let mut out: Vec<usize> = xs
            .iter()
            .flat_map(|&x| self.g.neighbors(x).iter().copied())
            .filter(|&u| self.layer_of[u] == Some(t))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Moves `adds` into layer `t`, relocating each displaced `t`-member to
    /// the lowest other layer where it has no neighbor, or to the residual.
    fn exchange_move(&self, adds: &[usize], t: usize, max_remove: usize) -> Option<Move> {
        let displaced = self.layer_fathers(adds, t);
        if displaced.len() > max_remove {
            return None;
        }
        let mut changes: Vec<(usize, Option<usize>)> = adds.iter().map(|&x| (x, Some(t))).collect();
        for &u in &displaced {
            let target = (0..self.m).find(|&j| j != t && self.count(u, j) == 0);
            changes.push((u, target));
        }
        Some(Move { changes })
    }

    fn improving_without_plateau(&self, policy: &ExchangePolicy) -> Option<Move> {
        // Plain additions.
        for x in self.residual() {
            if let Some(t) = (0..self.m).find(|&t| self.count(x, t) == 0) {
                return Some(Move {
                    changes: vec![(x, Some(t))],
                });
            }
        }
        let residual: Vec<usize> = self.residual().collect();
        // Single-vertex exchanges with relocation of the displaced fathers.
        for &x in &residual {
            for t in 0..self.m {
                if let Some(mv) = self.exchange_move(&[x], t, policy.max_remove) {
                    if self.improves(&mv) {
                        return Some(mv);
                    }
                }
            }
        }
        // Two residual vertices sharing a father.
        if policy.max_add >= 2 {
            for &x in &residual {
                for t in 0..self.m {
                    let mut partners = BTreeSet::new();
                    for u in self.layer_fathers(&[x], t) {
                        for &y in self.g.neighbors(u) {
                            if y > x && self.layer_of[y].is_none() && !self.g.has_edge(x, y) {
                                partners.insert(y);
                            }
                        }
                    }
                    for y in partners {
                        if let Some(mv) = self.exchange_move(&[x, y], t, policy.max_remove) {
                            if self.improves(&mv) {
                                return Some(mv);
                            }
                        }
                    }
                }
            }
        }
        if policy.allow_alternating_paths {
            for t in 0..self.m {
                let found = augmenting_path(
                    self.g,
                    |v| self.layer_of[v] == Some(t),
                    |v| self.layer_of[v].is_none(),
                    |_| 1,
                );
                if let Some((add, remove)) = found {
                    let mut changes: Vec<(usize, Option<usize>)> =
                        add.into_iter().map(|x| (x, Some(t))).collect();
                    changes.extend(remove.into_iter().map(|u| (u, None)));
                    return Some(Move { changes });
                }
            }
        }
        None
    }

    /// Next improving step. If no direct move improves, try each
    /// single-vertex layer change (which leaves the objective unchanged)
    /// followed by an improving move, and return the combination.
    fn next_move(&mut self, policy: &ExchangePolicy) -> Option<Move> {
        if let Some(mv) = self.improving_without_plateau(policy) {
            return Some(mv);
        }
        let members: Vec<(usize, usize)> = self
            .g
            .vertices()
            .filter_map(|v| self.layer_of[v].map(|i| (v, i)))
            .collect();
        for (u, i) in members {
            if self.sizes[i] < 2 {
                continue;
            }
            for t in 0..self.m {
                if t == i || self.count(u, t) != 0 {
                    continue;
                }
                self.set_layer(u, Some(t));
                let follow = self.improving_without_plateau(policy);
                self.set_layer(u, Some(i));
                if let Some(second) = follow {
                    // Compose: the first change, then the follow-up (whose
                    // entries override for any vertex they mention).
                    let mut changes = vec![(u, Some(t))];
                    for &(v, layer) in &second.changes {
                        changes.retain(|(w, _)| *w != v);
                        changes.push((v, layer));
                    }
                    return Some(Move { changes });
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn brute_force_phi(g: &Graph, weights: &[u32]) -> u64 {
        let n = g.n();
        let mut best = 0;
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if g.is_independent(&set) {
                best = best.max(set.iter().map(|&v| u64::from(weights[v])).sum());
            }
        }
        best
    }

    #[test]
    fn phi_examples() {
        let k4 = gen::complete(4);
        let w = WeightProfile::sparse(3);
        assert_eq!(phi(&k4, &[], &w).unwrap(), 0);
        assert_eq!(phi(&k4, &[2], &w).unwrap(), 5);
        assert_eq!(phi(&k4, &[0, 1], &w), Err(MisError::NotIndependent(0, 1)));
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(phi(&star, &[1, 2, 3], &w).unwrap(), 9);
    }

    #[test]
    fn weight_profile_validation() {
        assert!(WeightProfile::new(5, 5, 3).is_err());
        assert!(WeightProfile::new(5, 0, 3).is_err());
        assert_eq!(
            WeightProfile::new(5, 3, 3).unwrap(),
            WeightProfile::sparse(3)
        );
    }

    #[test]
    fn exchange_examples() {
        let c4 = gen::cycle(4).unwrap();
        let w = WeightProfile::sparse(2);
        let s = exchange_optimize(&c4, &w, &ExchangePolicy::default(), &[]).unwrap();
        assert_eq!(phi(&c4, &s, &w).unwrap(), 10);

        let k4 = gen::complete(4);
        let s = exchange_optimize(
            &k4,
            &WeightProfile::sparse(3),
            &ExchangePolicy::default(),
            &[],
        )
        .unwrap();
        assert_eq!(s.len(), 1);

        let e5 = Graph::empty(5);
        let s = exchange_optimize(
            &e5,
            &WeightProfile::sparse(3),
            &ExchangePolicy::default(),
            &[],
        )
        .unwrap();
        assert_eq!(s, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn exchange_improves_a_bad_start() {
        // Star: the center alone is worse than the leaves.
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let w = WeightProfile::sparse(3);
        let s = exchange_optimize(&star, &w, &ExchangePolicy::default(), &[0]).unwrap();
        assert_eq!(s, vec![1, 2, 3]);
        assert!(exchange_optimize(&star, &w, &ExchangePolicy::default(), &[0, 1]).is_err());
        let bad = ExchangePolicy {
            max_remove: 1,
            max_add: 2,
            ..Default::default()
        };
        assert_eq!(
            exchange_optimize(&star, &w, &bad, &[]),
            Err(MisError::InvalidPolicy)
        );
    }

    #[test]
    fn exact_examples() {
        let c5 = gen::cycle(5).unwrap();
        let (s, value) = exact_mwis(&c5, &WeightProfile::sparse(2)).unwrap();
        assert_eq!(value, 10);
        assert_eq!(s.len(), 2);
        let p3 = gen::path(3);
        let (s, value) = exact_mwis(&p3, &WeightProfile::sparse(2)).unwrap();
        assert_eq!((s, value), (vec![0, 2], 6));
        let (s, _) = exact_mwis(&Graph::empty(1), &WeightProfile::sparse(0)).unwrap();
        assert_eq!(s, vec![0]);
        let big = gen::path(41);
        assert_eq!(
            exact_mwis(&big, &WeightProfile::sparse(2)),
            Err(MisError::TooLarge { n: 41, cap: 40 })
        );
    }

    #[test]
    fn exact_matches_brute_force() {
        for seed in 0..40 {
            let g = gen::random_degree_bounded(14, 4, seed);
            let w = WeightProfile::sparse(g.max_degree());
            let weights = w.vertex_weights(&g);
            let (s, value) = exact_mwis(&g, &w).unwrap();
            assert!(g.is_independent(&s));
            assert_eq!(phi(&g, &s, &w).unwrap(), value);
            assert_eq!(value, brute_force_phi(&g, &weights), "seed {seed}");
        }
    }

    #[test]
    fn layers_on_small_graphs() {
        let k4 = gen::complete(4);
        let fam = build_layers(
            &k4,
            2,
            &WeightProfile::sparse(3),
            &ExchangePolicy::default(),
            true,
        )
        .unwrap();
        assert_eq!(fam.layers, vec![vec![0], vec![1]]);
        assert_eq!(fam.residual, vec![2, 3]);

        let c6 = gen::cycle(6).unwrap();
        for exact in [false, true] {
            let fam = build_layers(
                &c6,
                1,
                &WeightProfile::sparse(2),
                &ExchangePolicy::default(),
                exact,
            )
            .unwrap();
            assert_eq!(fam.layers[0].len(), 3);
        }
        assert!(build_layers(
            &c6,
            0,
            &WeightProfile::sparse(2),
            &ExchangePolicy::default(),
            false
        )
        .is_err());
    }

    #[test]
    fn balanced_examples() {
        let policy = ExchangePolicy::default();
        let fam = build_balanced_family(&gen::complete(4), 3, &policy).unwrap();
        assert!(fam.layers.iter().all(|l| l.len() == 1));
        assert_eq!(fam.residual.len(), 1);
        assert_eq!(theta(&gen::complete(4), &fam), 3);

        let c6 = gen::cycle(6).unwrap();
        let fam = build_balanced_family(&c6, 2, &policy).unwrap();
        assert!(fam.residual.is_empty());
        assert_eq!(theta(&c6, &fam), 0);

        let p2 = gen::path(2);
        let fam = build_balanced_family(&p2, 2, &policy).unwrap();
        assert_eq!(fam.layers, vec![vec![0], vec![1]]);

        assert_eq!(
            build_balanced_family(&p2, 3, &policy),
            Err(MisError::TooFewVertices { n: 2, layers: 3 })
        );
    }

    #[test]
    fn theta_on_c5() {
        let c5 = gen::cycle(5).unwrap();
        let fam = LayeredFamily::from_layers(5, 2, vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(theta(&c5, &fam), 2);
        let full = LayeredFamily::from_layers(5, 2, vec![vec![0, 2], vec![1, 3], vec![4]]);
        assert_eq!(theta(&c5, &full), 0);
    }

    #[test]
    fn augmenting_path_swaps_one_for_two() {
        // 0 - 1 - 2 with set {1}: swapping gives {0, 2}.
        let p3 = gen::path(3);
        let found = augmenting_path(&p3, |v| v == 1, |v| v != 1, |_| 1);
        assert_eq!(found, Some((vec![0, 2], vec![1])));
        // Longer path 0-1-2-3-4 with set {1, 3}.
        let p5 = gen::path(5);
        let found = augmenting_path(&p5, |v| v == 1 || v == 3, |v| v % 2 == 0, |_| 1);
        assert_eq!(found, Some((vec![0, 2, 4], vec![1, 3])));
    }
}
