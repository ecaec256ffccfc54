//! Proper vertex coloring within the Brooks bound.
//!
//! A connected component of maximum degree at most `budget` is colored with
//! at most `budget` colors unless it is `K_{budget+1}` or, for budget 2, an
//! odd cycle. Those two cases are reported, never colored past the budget.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperColoring {
    pub assignment: Vec<usize>,
    pub colors_used: usize,
}

impl ProperColoring {
    pub fn is_proper(&self, g: &Graph) -> bool {
        self.assignment.len() == g.n()
            && g.edges()
                .iter()
                .all(|&(u, v)| self.assignment[u] != self.assignment[v])
    }

    /// Vertices grouped by color.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.colors_used];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExceptionKind {
    Complete,
    OddCycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BrooksError {
    #[error("budget {budget} is below the maximum degree {max_degree}")]
    BudgetBelowDegree { budget: usize, max_degree: usize },
    #[error("component {component:?} is a {kind:?} exception for budget {budget}")]
    Exception {
        kind: ExceptionKind,
        component: Vec<usize>,
        budget: usize,
    },
}

/// First-fit coloring along `order`, which must list every vertex once.
pub fn greedy_color(g: &Graph, order: &[usize]) -> ProperColoring {
    let mut perm = order.to_vec();
    perm.sort_unstable();
    assert!(
        perm.len() == g.n() && perm.iter().enumerate().all(|(i, &v)| i == v),
        "order must be a permutation of the vertices"
    );
    let assignment = first_fit(g, order, vec![None; g.n()]);
    compact(assignment.into_iter().map(Option::unwrap).collect())
}

fn first_fit(g: &Graph, order: &[usize], mut colors: Vec<Option<usize>>) -> Vec<Option<usize>> {
    let mut taken = Vec::new();
    for &v in order {
        if colors[v].is_some() {
            continue;
        }
        taken.clear();
        taken.resize(g.degree(v) + 1, false);
        for &u in g.neighbors(v) {
            if let Some(c) = colors[u] {
                if c < taken.len() {
                    taken[c] = true;
                }
            }
        }
        colors[v] = Some(taken.iter().position(|&t| !t).unwrap());
    }
    colors
}

/// Renumbers colors by first appearance in vertex order.
fn compact(raw: Vec<usize>) -> ProperColoring {
    let mut map: Vec<Option<usize>> = Vec::new();
    let mut next = 0;
    let assignment = raw
        .into_iter()
        .map(|c| {
            if c >= map.len() {
                map.resize(c + 1, None);
            }
            *map[c].get_or_insert_with(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    ProperColoring {
        assignment,
        colors_used: next,
    }
}

pub fn brooks_color(g: &Graph, budget: usize) -> Result<ProperColoring, BrooksError> {
    let max_degree = g.max_degree();
    if budget < max_degree {
        return Err(BrooksError::BudgetBelowDegree { budget, max_degree });
    }
    let mut raw = vec![0; g.n()];
    for component in g.components() {
        let sub = g.induced_subgraph(&component);
        let local = color_component(&sub.graph, budget).map_err(|kind| BrooksError::Exception {
            kind,
            component: component.clone(),
            budget,
        })?;
        for (i, c) in local.into_iter().enumerate() {
            raw[sub.to_parent[i]] = c;
        }
    }
    let out = compact(raw);
    debug_assert!(out.is_proper(g) && out.colors_used <= budget.max(usize::from(g.n() > 0)));
    Ok(out)
}

/// Colors a connected graph with at most `budget >= Δ` colors.
fn color_component(g: &Graph, budget: usize) -> Result<Vec<usize>, ExceptionKind> {
    let n = g.n();
    let delta = g.max_degree();
    if n == budget + 1 && g.m() == n * (n - 1) / 2 {
        return Err(ExceptionKind::Complete);
    }
    if delta < budget {
        let order: Vec<usize> = g.vertices().collect();
        return Ok(unwrap_all(first_fit(g, &order, vec![None; n])));
    }
    if let Some(root) = g.vertices().find(|&v| g.degree(v) < delta) {
        return Ok(tree_color(g, root, vec![None; n]));
    }
    // Regular from here on.
    if delta == 2 {
        // A cycle.
        if n % 2 == 1 {
            return Err(ExceptionKind::OddCycle);
        }
        return Ok(tree_color(g, 0, vec![None; n]));
    }
    if let Some(cut) = cut_vertex(g) {
        return Ok(color_across_cut(g, cut));
    }
    let (x, u, v) = brooks_triple(g).expect("2-connected regular non-complete graph has a triple");
    let mut pre = vec![None; n];
    pre[u] = Some(0);
    pre[v] = Some(0);
    let mut order = bfs_order_from(g, x, &[u, v]);
    order.reverse();
    Ok(unwrap_all(first_fit(g, &order, pre)))
}

fn unwrap_all(colors: Vec<Option<usize>>) -> Vec<usize> {
    colors.into_iter().map(Option::unwrap).collect()
}

/// Vertices reachable from `root` avoiding `skip`, by BFS distance then index.
fn bfs_order_from(g: &Graph, root: usize, skip: &[usize]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    for &s in skip {
        dist[s] = 0;
    }
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut reached = vec![root];
    while let Some(a) = queue.pop_front() {
        for &b in g.neighbors(a) {
            if dist[b] == usize::MAX {
                dist[b] = dist[a] + 1;
                reached.push(b);
                queue.push_back(b);
            }
        }
    }
    reached.sort_by_key(|&v| (dist[v], v));
    reached
}

/// First-fit from the leaves of a BFS tree toward `root`: each vertex other
/// than the root still has its parent uncolored when its turn comes.
fn tree_color(g: &Graph, root: usize, pre: Vec<Option<usize>>) -> Vec<usize> {
    let mut order = bfs_order_from(g, root, &[]);
    order.reverse();
    unwrap_all(first_fit(g, &order, pre))
}

fn cut_vertex(g: &Graph) -> Option<usize> {
    let n = g.n();
    if n < 3 {
        return None;
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    // (vertex, parent, next neighbor index)
    let mut stack = vec![(0usize, usize::MAX, 0usize)];
    disc[0] = 0;
    low[0] = 0;
    timer += 1;
    let mut root_children = 0;
    let mut found: Option<usize> = None;
    while let Some(&mut (v, parent, ref mut idx)) = stack.last_mut() {
        if *idx < g.degree(v) {
            let w = g.neighbors(v)[*idx];
            *idx += 1;
            if disc[w] == usize::MAX {
                disc[w] = timer;
                low[w] = timer;
                timer += 1;
                if v == 0 {
                    root_children += 1;
                }
                stack.push((w, v, 0));
            } else if w != parent {
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            if parent != usize::MAX {
                low[parent] = low[parent].min(low[v]);
                if parent != 0 && low[v] >= disc[parent] {
                    found = Some(found.map_or(parent, |f: usize| f.min(parent)));
                }
            }
        }
    }
    if root_children > 1 {
        found = Some(0);
    }
    found
}

/// Splits at `cut`: one side of `G - cut` plus `cut`, and the rest plus
/// `cut`. In each part `cut` loses a neighbor, so the tree method stays in
/// budget; the second part's colors are then permuted to agree at `cut`.
fn color_across_cut(g: &Graph, cut: usize) -> Vec<usize> {
    let side = bfs_order_from(g, *g.neighbors(cut).first().unwrap(), &[cut]);
    let mut in_side = vec![false; g.n()];
    for &v in &side {
        in_side[v] = true;
    }
    let part_a: Vec<usize> = g.vertices().filter(|&v| in_side[v] || v == cut).collect();
    let part_b: Vec<usize> = g.vertices().filter(|&v| !in_side[v]).collect();
    let color_part = |part: &[usize]| {
        let sub = g.induced_subgraph(part);
        let root = sub.to_sub[cut].unwrap();
        let local = tree_color(&sub.graph, root, vec![None; sub.graph.n()]);
        (sub, local)
    };
    let (sa, ca) = color_part(&part_a);
    let (sb, cb) = color_part(&part_b);
    let want = ca[sa.to_sub[cut].unwrap()];
    let have = cb[sb.to_sub[cut].unwrap()];
    let mut out = vec![0; g.n()];
    for (i, &c) in ca.iter().enumerate() {
        out[sa.to_parent[i]] = c;
    }
    for (i, &c) in cb.iter().enumerate() {
        let swapped = if c == have {
            want
        } else if c == want {
            have
        } else {
            c
        };
        out[sb.to_parent[i]] = swapped;
    }
    out
}

/// A vertex `x` with nonadjacent neighbors `u`, `v` such that removing `u`
/// and `v` leaves the graph connected.
fn brooks_triple(g: &Graph) -> Option<(usize, usize, usize)> {
    for x in g.vertices() {
        let nb = g.neighbors(x);
        for (i, &u) in nb.iter().enumerate() {
            for &v in &nb[i + 1..] {
                if g.has_edge(u, v) {
                    continue;
                }
                if bfs_order_from(g, x, &[u, v]).len() == g.n() - 2 {
                    return Some((x, u, v));
                }
            }
        }
    }
    None
}
