//! Slow, obviously-correct reference implementations used by the
//! integration tests. Nothing here calls into the library's algorithms.

#![allow(dead_code)]

use packpaint_core::graph::Graph;
use packpaint_core::packing::PackingColoring;

pub const INF: usize = usize::MAX / 4;

/// All-pairs shortest path lengths by Floyd–Warshall.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut d = vec![vec![INF; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for m in 0..n {
        for a in 0..n {
            for b in 0..n {
                let via = d[a][m] + d[m][b];
                if via < d[a][b] {
                    d[a][b] = via;
                }
            }
        }
    }
    d
}

/// Can the classes, given by their parameters, be placed into distinct
/// budget slots, each class into a slot of parameter at most its own?
/// Decided by bipartite matching.
pub fn classes_fit(class_params: &[u32], budget: &[u32]) -> bool {
    fn augment(
        c: usize,
        edges: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &s in &edges[c] {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            if owner[s].is_none() || augment(owner[s].unwrap(), edges, seen, owner) {
                owner[s] = Some(c);
                return true;
            }
        }
        false
    }
    let edges: Vec<Vec<usize>> = class_params
        .iter()
        .map(|&p| (0..budget.len()).filter(|&s| budget[s] <= p).collect())
        .collect();
    let mut owner = vec![None; budget.len()];
    (0..class_params.len()).all(|c| augment(c, &edges, &mut vec![false; budget.len()], &mut owner))
}

/// Reference verdict: every vertex in exactly one class, every class
/// spaced by more than its parameter, nonempty classes fit the budget.
pub fn naive_valid(g: &Graph, budget: &[u32], col: &PackingColoring) -> bool {
    let d = floyd_warshall(g);
    let mut seen = vec![0usize; g.n()];
    for class in &col.classes {
        for &v in &class.vertices {
            if v >= g.n() {
                return false;
            }
            seen[v] += 1;
        }
        for (i, &u) in class.vertices.iter().enumerate() {
            for &v in &class.vertices[i + 1..] {
                if u == v || d[u][v] <= class.parameter as usize {
                    return false;
                }
            }
        }
    }
    let params: Vec<u32> = col
        .classes
        .iter()
        .filter(|c| !c.vertices.is_empty())
        .map(|c| c.parameter)
        .collect();
    seen.iter().all(|&c| c == 1) && classes_fit(&params, budget)
}

/// Exhaustive search over all `p^n` assignments of vertices to the slots of
/// `slots` (one slot per class). Returns a witness assignment.
pub fn naive_decide(g: &Graph, slots: &[u32]) -> Option<Vec<usize>> {
    let n = g.n();
    let p = slots.len();
    if n == 0 {
        return Some(Vec::new());
    }
    if p == 0 {
        return None;
    }
    let d = floyd_warshall(g);
    let mut a = vec![0usize; n];
    loop {
        let ok = (0..n).all(|u| (u + 1..n).all(|v| a[u] != a[v] || d[u][v] > slots[a[u]] as usize));
        if ok {
            return Some(a);
        }
        let mut i = 0;
        while i < n && a[i] == p - 1 {
            a[i] = 0;
            i += 1;
        }
        if i == n {
            return None;
        }
        a[i] += 1;
    }
}

fn is_independent_mask(g: &Graph, mask: u64) -> bool {
    g.edges()
        .iter()
        .all(|&(u, v)| mask >> u & 1 == 0 || mask >> v & 1 == 0)
}

fn mask_weight(mask: u64, weights: &[u32]) -> u64 {
    (0..weights.len())
        .filter(|&v| mask >> v & 1 == 1)
        .map(|v| u64::from(weights[v]))
        .sum()
}

/// Maximum weight over every independent subset.
pub fn brute_mwis(g: &Graph, weights: &[u32]) -> u64 {
    assert!(g.n() <= 20);
    (0u64..1 << g.n())
        .filter(|&m| is_independent_mask(g, m))
        .map(|m| mask_weight(m, weights))
        .max()
        .unwrap_or(0)
}

fn subsets_up_to(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &x in items {
        let grown: Vec<Vec<usize>> = out
            .iter()
            .filter(|s| s.len() < max)
            .map(|s| {
                let mut t = s.clone();
                t.push(x);
                t
            })
            .collect();
        out.extend(grown);
    }
    out
}

/// Literal rescan of the bounded exchange family: any `R` inside the set
/// with `|R| <= max_remove` and `A` outside with `|A| <= max_add` such that
/// `(S \ R) + A` is independent and strictly heavier.
pub fn improving_exchange(
    g: &Graph,
    set: &[usize],
    weights: &[u32],
    max_remove: usize,
    max_add: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let inside: Vec<usize> = set.to_vec();
    let outside: Vec<usize> = g.vertices().filter(|v| !set.contains(v)).collect();
    let base: u64 = set.iter().map(|&v| u64::from(weights[v])).sum();
    let adds = subsets_up_to(&outside, max_add);
    for remove in subsets_up_to(&inside, max_remove) {
        for add in &adds {
            if add.is_empty() {
                continue;
            }
            let next: Vec<usize> = inside
                .iter()
                .copied()
                .filter(|v| !remove.contains(v))
                .chain(add.iter().copied())
                .collect();
            let w: u64 = next.iter().map(|&v| u64::from(weights[v])).sum();
            if w > base && g.is_independent(&next) {
                return Some((remove, add.clone()));
            }
        }
    }
    None
}

/// Every simple path alternating between residual vertices and members of
/// `layer`, starting and ending in the residual, such that trading the
/// path's layer vertices for its residual vertices keeps the layer
/// independent. Returns the first such path.
pub fn augmenting_alternating_path(
    g: &Graph,
    layer: &[usize],
    residual: &[usize],
) -> Option<Vec<usize>> {
    fn extend(
        g: &Graph,
        layer: &[usize],
        residual: &[usize],
        path: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        let tip = *path.last().unwrap();
        let want_residual = layer.contains(&tip);
        for &y in g.neighbors(tip) {
            if path.contains(&y) {
                continue;
            }
            let ok = if want_residual {
                residual.contains(&y)
            } else {
                layer.contains(&y)
            };
            if !ok {
                continue;
            }
            path.push(y);
            if want_residual {
                let next: Vec<usize> = layer
                    .iter()
                    .copied()
                    .filter(|v| !path.contains(v))
                    .chain(path.iter().copied().filter(|v| residual.contains(v)))
                    .collect();
                if g.is_independent(&next) {
                    return Some(path.clone());
                }
            }
            if let Some(found) = extend(g, layer, residual, path) {
                return Some(found);
            }
            path.pop();
        }
        None
    }
    for &x in residual {
        let mut alone = layer.to_vec();
        alone.push(x);
        if g.is_independent(&alone) {
            return Some(vec![x]);
        }
        let mut path = vec![x];
        if let Some(found) = extend(g, layer, residual, &mut path) {
            return Some(found);
        }
    }
    None
}

/// Applies a vertex relabelling `perm` (old -> new).
pub fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    Graph::from_edges(g.n(), &edges).unwrap()
}
