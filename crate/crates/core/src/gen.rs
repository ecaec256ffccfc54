//! Graph generators: the counterexample families, a few named graphs, and
//! seeded random bounded-degree graphs with a prescribed saturation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("no graph with n={n}, k={k}, saturation={t} found after {attempts} attempts")]
    AttemptsExhausted {
        n: usize,
        k: usize,
        t: usize,
        attempts: usize,
    },
    #[error("unknown graph name `{0}`")]
    UnknownName(String),
}

/// Generator selector used by the CLI and bindings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenSpec {
    Gkt {
        k: usize,
        t: usize,
    },
    CliqueBridge {
        k: usize,
    },
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Complete {
        n: usize,
    },
    Petersen,
    RandomDegreeBounded {
        n: usize,
        k: usize,
        seed: u64,
    },
    RandomSaturated {
        n: usize,
        k: usize,
        t: usize,
        seed: u64,
    },
}

impl GenSpec {
    pub fn build(&self) -> Result<Graph, GenError> {
        match *self {
            GenSpec::Gkt { k, t } => gkt(k, t),
            GenSpec::CliqueBridge { k } => clique_bridge(k),
            GenSpec::Path { n } => Ok(path(n)),
            GenSpec::Cycle { n } => cycle(n),
            GenSpec::Complete { n } => Ok(complete(n)),
            GenSpec::Petersen => Ok(petersen()),
            GenSpec::RandomDegreeBounded { n, k, seed } => Ok(random_degree_bounded(n, k, seed)),
            GenSpec::RandomSaturated { n, k, t, seed } => random_saturated(n, k, t, seed),
        }
    }
}

fn invalid(msg: impl Into<String>) -> GenError {
    GenError::InvalidParameters(msg.into())
}

/// `t + 1` copies of `K_k`, every pair of copies joined by one edge between
/// distinct link vertices. Copy `i` occupies vertices `i*k .. (i+1)*k`.
pub fn gkt(k: usize, t: usize) -> Result<Graph, GenError> {
    if k < 3 || t < 1 || t > k {
        return Err(invalid(format!(
            "G(k,t) needs k >= 3 and 1 <= t <= k, got k={k}, t={t}"
        )));
    }
    let copies = t + 1;
    let id = |copy: usize, j: usize| copy * k + j;
    // Slot in copy `a` used for the link towards copy `b`.
    let slot = |a: usize, b: usize| if b < a { b } else { b - 1 };
    let mut edges = Vec::new();
    for c in 0..copies {
        for a in 0..k {
            for b in a + 1..k {
                edges.push((id(c, a), id(c, b)));
            }
        }
    }
    for i in 0..copies {
        for j in i + 1..copies {
            edges.push((id(i, slot(i, j)), id(j, slot(j, i))));
        }
    }
    Ok(Graph::from_edges(copies * k, &edges).expect("valid construction"))
}

/// Two copies of `K_k` whose vertices `0` and `k` are joined through the
/// middle vertex `2k`.
pub fn clique_bridge(k: usize) -> Result<Graph, GenError> {
    if k < 3 {
        return Err(invalid(format!("clique bridge needs k >= 3, got {k}")));
    }
    let mut edges = Vec::new();
    for base in [0, k] {
        for a in 0..k {
            for b in a + 1..k {
                edges.push((base + a, base + b));
            }
        }
    }
    edges.push((0, 2 * k));
    edges.push((2 * k, k));
    Ok(Graph::from_edges(2 * k + 1, &edges).expect("valid construction"))
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).expect("valid construction")
}

pub fn cycle(n: usize) -> Result<Graph, GenError> {
    if n < 3 {
        return Err(invalid(format!("cycle needs n >= 3, got {n}")));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Ok(Graph::from_edges(n, &edges).expect("valid construction"))
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges).expect("valid construction")
}

/// Outer 5-cycle on `0..5`, inner pentagram on `5..10`, spokes `i -- i+5`.
pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
        edges.push((i, i + 5));
    }
    Graph::from_edges(10, &edges).expect("valid construction")
}

/// Looks up a named graph: `petersen`, `path(n)`, `cycle(n)`, `complete(n)`.
pub fn named(name: &str) -> Result<Graph, GenError> {
    let name = name.trim();
    if name.eq_ignore_ascii_case("petersen") {
        return Ok(petersen());
    }
    let (head, rest) = name
        .split_once('(')
        .ok_or_else(|| GenError::UnknownName(name.to_string()))?;
    let n: usize = rest
        .strip_suffix(')')
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| GenError::UnknownName(name.to_string()))?;
    match head.trim() {
        "path" => Ok(path(n)),
        "cycle" => cycle(n),
        "complete" => Ok(complete(n)),
        _ => Err(GenError::UnknownName(name.to_string())),
    }
}

/// Random graph with maximum degree at most `k`: candidate pairs are scanned
/// in a seeded random order and kept while both ends have spare degree.
pub fn random_degree_bounded(n: usize, k: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    pairs.shuffle(&mut rng);
    let target = if n == 0 {
        0
    } else {
        rng.gen_range(n / 2..=n * k / 2)
    };
    let mut degree = vec![0usize; n];
    let mut edges = Vec::new();
    for (u, v) in pairs {
        if edges.len() >= target {
            break;
        }
        if degree[u] < k && degree[v] < k {
            degree[u] += 1;
            degree[v] += 1;
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges).expect("valid construction")
}

const SATURATED_ATTEMPTS: usize = 200;

/// Random graph with maximum degree exactly `k` and saturation exactly `t`.
///
/// Each attempt grows an edge set in random order, rejecting any edge that
/// would push a degree above `k` or give some `k`-vertex more than `t`
/// `k`-neighbors. Attempts whose result misses `k` or `t` exactly are
/// repaired by adding further admissible edges that raise the count of a
/// `k`-vertex's `k`-neighbors, and discarded if that fails.
pub fn random_saturated(n: usize, k: usize, t: usize, seed: u64) -> Result<Graph, GenError> {
    if n < k + 1 {
        return Err(invalid(format!("need n >= k + 1, got n={n}, k={k}")));
    }
    if t > k {
        return Err(invalid(format!("saturation {t} exceeds k={k}")));
    }
    if k == 0 {
        return Ok(Graph::empty(n));
    }
    for attempt in 0..SATURATED_ATTEMPTS {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ attempt as u64);
        let mut b = SaturatedBuilder::new(n, k, t);
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        pairs.shuffle(&mut rng);
        // Stop somewhere between 70% and 100% of a k-regular edge count so
        // instances are not all near-regular.
        let full = n * k / 2;
        let target = rng.gen_range((full * 7 / 10).max(1)..=full);
        for &(u, v) in &pairs {
            if b.edge_count >= target {
                break;
            }
            b.try_add(u, v);
        }
        if !b.hits_exact_saturation() {
            for &(u, v) in &pairs {
                if b.hits_exact_saturation() {
                    break;
                }
                b.try_add(u, v);
            }
        }
        if b.hits_exact_saturation() {
            return Ok(b.finish());
        }
    }
    Err(GenError::AttemptsExhausted {
        n,
        k,
        t,
        attempts: SATURATED_ATTEMPTS,
    })
}

struct SaturatedBuilder {
    k: usize,
    t: usize,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl SaturatedBuilder {
    fn new(n: usize, k: usize, t: usize) -> Self {
        SaturatedBuilder {
            k,
            t,
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    fn k_neighbors(&self, v: usize) -> usize {
        self.adj[v]
            .iter()
            .filter(|&&w| self.adj[w].len() == self.k)
            .count()
    }

    fn saturation_ok_at(&self, v: usize) -> bool {
        self.adj[v].len() != self.k || self.k_neighbors(v) <= self.t
    }

    fn try_add(&mut self, u: usize, v: usize) -> bool {
        if self.adj[u].len() >= self.k || self.adj[v].len() >= self.k || self.adj[u].contains(&v) {
            return false;
        }
        self.adj[u].push(v);
        self.adj[v].push(u);
        let affected: Vec<usize> = [u, v]
            .into_iter()
            .chain(self.adj[u].iter().copied())
            .chain(self.adj[v].iter().copied())
            .collect();
        if affected.iter().all(|&w| self.saturation_ok_at(w)) {
            self.edge_count += 1;
            true
        } else {
            self.adj[u].pop();
            self.adj[v].pop();
            false
        }
    }

    fn hits_exact_saturation(&self) -> bool {
        let mut has_k = false;
        let mut max_sat = 0;
        for v in 0..self.adj.len() {
            if self.adj[v].len() == self.k {
                has_k = true;
                max_sat = max_sat.max(self.k_neighbors(v));
            }
        }
        has_k && max_sat == self.t
    }

    fn finish(self) -> Graph {
        let mut edges = Vec::with_capacity(self.edge_count);
        for (u, list) in self.adj.iter().enumerate() {
            edges.extend(list.iter().filter(|&&w| w > u).map(|&w| (u, w)));
        }
        Graph::from_edges(self.adj.len(), &edges).expect("valid construction")
    }
}
