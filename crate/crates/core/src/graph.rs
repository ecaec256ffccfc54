//! Simple undirected graphs on dense vertex ids `0..n`.
//!
//! Adjacency is stored twice: a sorted neighbor list per vertex for ordered
//! iteration, and a bitset row per vertex for fast set intersection. Both are
//! built once in the constructor and never mutated afterwards.

use std::collections::VecDeque;

use thiserror::Error;

use crate::bitset::BitSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("subgraph contains a cycle through vertex {0}")]
    Cycle(usize),
    #[error("vertex {0} has degree greater than two")]
    DegreeAboveTwo(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    rows: Vec<BitSet>,
    m: usize,
}

impl Graph {
    /// Graph on `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            rows: vec![BitSet::new(n); n],
            m: 0,
        }
    }

    /// Builds a graph from an edge list. Repeated edges (in either
    /// orientation) are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut m = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            m += list.len();
        }
        let rows = adj
            .iter()
            .map(|list| BitSet::from_iter_with_len(n, list.iter().copied()))
            .collect();
        Ok(Graph {
            adj,
            rows,
            m: m / 2,
        })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn neighbor_set(&self, v: usize) -> &BitSet {
        &self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// All edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.n()
    }

    /// Returns the first edge inside `set`, if any.
    pub fn edge_within(&self, set: &[usize]) -> Option<(usize, usize)> {
        let mask = BitSet::from_iter_with_len(self.n(), set.iter().copied());
        for &u in set {
            if let Some(v) = self.adj[u].iter().copied().find(|&v| mask.contains(v)) {
                return Some((u.min(v), u.max(v)));
            }
        }
        None
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        self.edge_within(set).is_none()
    }

    /// Shortest-path distances from `src`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, src: usize) -> Vec<Option<usize>> {
        self.bfs_bounded(src, usize::MAX)
    }

    /// BFS from `src` that stops expanding at depth `limit`.
    pub fn bfs_bounded(&self, src: usize, limit: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if du >= limit {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices at distance `1..=radius` from `v`.
    pub fn ball(&self, v: usize, radius: usize) -> BitSet {
        let mut set = BitSet::new(self.n());
        if radius == 1 {
            return self.rows[v].clone();
        }
        for (w, d) in self.bfs_bounded(v, radius).into_iter().enumerate() {
            if matches!(d, Some(d) if d >= 1) {
                set.insert(w);
            }
        }
        set
    }

    pub fn eccentricity(&self, v: usize) -> Option<usize> {
        self.bfs_distances(v)
            .into_iter()
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    /// `None` for disconnected graphs.
    pub fn diameter(&self) -> Option<usize> {
        self.vertices()
            .try_fold(0, |acc, v| self.eccentricity(v).map(|e| acc.max(e)))
    }

    /// The `d`-th power: `u ~ v` iff `1 <= dist(u, v) <= d`.
    pub fn power(&self, d: usize) -> Graph {
        assert!(d >= 1, "power exponent must be positive");
        if d == 1 {
            return self.clone();
        }
        let mut edges = Vec::new();
        for u in self.vertices() {
            for (v, dist) in self.bfs_bounded(u, d).into_iter().enumerate() {
                if v > u && dist.is_some() {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(self.n(), &edges).expect("power graph edges are valid")
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let degrees: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let k = degrees.iter().copied().max().unwrap_or(0);
        let saturation = self
            .vertices()
            .filter(|&v| degrees[v] == k && k > 0)
            .map(|v| self.adj[v].iter().filter(|&&w| degrees[w] == k).count())
            .max()
            .unwrap_or(0);
        DegreeProfile {
            k,
            saturation,
            degrees,
        }
    }

    /// Subgraph induced by `set`, relabelled to `0..set.len()` in ascending
    /// order of original id.
    pub fn induced_subgraph(&self, set: &[usize]) -> Induced {
        let mut to_parent: Vec<usize> = set.to_vec();
        to_parent.sort_unstable();
        to_parent.dedup();
        let mut to_sub = vec![None; self.n()];
        for (i, &v) in to_parent.iter().enumerate() {
            to_sub[v] = Some(i);
        }
        let mut edges = Vec::new();
        for (i, &u) in to_parent.iter().enumerate() {
            for &w in &self.adj[u] {
                if let Some(j) = to_sub[w] {
                    if j > i {
                        edges.push((i, j));
                    }
                }
            }
        }
        let graph = Graph::from_edges(to_parent.len(), &edges).expect("induced edges are valid");
        Induced {
            graph,
            to_parent,
            to_sub,
        }
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Decomposes a graph of maximum degree two without cycles into its
    /// maximal paths and isolated vertices.
    pub fn maximal_paths(&self) -> Result<PathDecomposition, GraphError> {
        if let Some(v) = self.vertices().find(|&v| self.degree(v) > 2) {
            return Err(GraphError::DegreeAboveTwo(v));
        }
        let mut seen = vec![false; self.n()];
        let mut paths = Vec::new();
        let mut isolated = Vec::new();
        for s in self.vertices() {
            if seen[s] {
                continue;
            }
            match self.degree(s) {
                0 => {
                    seen[s] = true;
                    isolated.push(s);
                }
                1 => {
                    let mut path = vec![s];
                    seen[s] = true;
                    let mut prev = s;
                    let mut cur = self.adj[s][0];
                    loop {
                        seen[cur] = true;
                        path.push(cur);
                        match self.adj[cur].iter().find(|&&w| w != prev) {
                            Some(&next) => {
                                prev = cur;
                                cur = next;
                            }
                            None => break,
                        }
                    }
                    if path[path.len() - 1] < path[0] {
                        path.reverse();
                    }
                    paths.push(path);
                }
                _ => {}
            }
        }
        // Anything left unvisited lies on a cycle.
        if let Some(v) = seen.iter().position(|&b| !b) {
            return Err(GraphError::Cycle(v));
        }
        paths.sort_by_key(|p| p[0]);
        Ok(PathDecomposition { paths, isolated })
    }

    /// All vertex sets of size `r` inducing a complete graph, each sorted
    /// ascending, in lexicographic order. Meant for bounded-degree inputs.
    pub fn cliques_of_size(&self, r: usize) -> Vec<Vec<usize>> {
        assert!(r >= 1, "clique size must be positive");
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(r);
        for v in self.vertices() {
            let mut cand = self.rows[v].clone();
            // Only extend with larger ids so each clique is produced once.
            for w in 0..=v {
                cand.remove(w);
            }
            current.push(v);
            self.extend_cliques(r, &mut current, cand, &mut out);
            current.pop();
        }
        out
    }

    fn extend_cliques(
        &self,
        r: usize,
        current: &mut Vec<usize>,
        cand: BitSet,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == r {
            out.push(current.clone());
            return;
        }
        if current.len() + cand.count() < r {
            return;
        }
        let members: Vec<usize> = cand.iter().collect();
        for (i, &w) in members.iter().enumerate() {
            let mut next = cand.clone();
            next.intersect_with(&self.rows[w]);
            for &skip in &members[..=i] {
                next.remove(skip);
            }
            current.push(w);
            self.extend_cliques(r, current, next, out);
            current.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    /// Maximum degree.
    pub k: usize,
    /// Largest number of `k`-neighbors of any `k`-vertex; 0 when `k == 0`.
    pub saturation: usize,
    pub degrees: Vec<usize>,
}

impl DegreeProfile {
    pub fn is_k_vertex(&self, v: usize) -> bool {
        self.degrees[v] == self.k
    }
}

/// An induced subgraph plus the maps between its labels and the parent's.
#[derive(Clone, Debug)]
pub struct Induced {
    pub graph: Graph,
    pub to_parent: Vec<usize>,
    pub to_sub: Vec<Option<usize>>,
}

impl Induced {
    pub fn lift(&self, sub_vertices: impl IntoIterator<Item = usize>) -> Vec<usize> {
        sub_vertices
            .into_iter()
            .map(|v| self.to_parent[v])
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PathDecomposition {
    /// Each path listed from its smaller end; sorted by that end.
    pub paths: Vec<Vec<usize>>,
    pub isolated: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn from_edges_triangle() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert!(g.has_edge(2, 1));
    }

    #[test]
    fn from_edges_dedups_reversed_pair() {
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn from_edges_rejects_self_loop_and_range() {
        assert_eq!(
            Graph::from_edges(1, &[(0, 0)]),
            Err(GraphError::SelfLoop(0))
        );
        assert_eq!(
            Graph::from_edges(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange { vertex: 2, n: 2 })
        );
    }

    #[test]
    fn bfs_on_cycle_and_disconnected() {
        assert_eq!(
            cycle(4).bfs_distances(0),
            vec![Some(0), Some(1), Some(2), Some(1)]
        );
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.bfs_distances(0), vec![Some(0), Some(1), None, None]);
        assert_eq!(g.diameter(), None);
    }

    #[test]
    fn power_of_path() {
        let sq = path(4).power(2);
        assert_eq!(sq.edges(), vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(path(4).power(1), path(4));
    }

    #[test]
    fn degree_profiles() {
        let p = complete(4).degree_profile();
        assert_eq!((p.k, p.saturation), (3, 3));
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let p = star.degree_profile();
        assert_eq!((p.k, p.saturation), (4, 0));
        let p = Graph::empty(3).degree_profile();
        assert_eq!((p.k, p.saturation), (0, 0));
    }

    #[test]
    fn induced_subgraphs() {
        let sub = complete(3).induced_subgraph(&[0, 1]);
        assert_eq!(sub.graph.edges(), vec![(0, 1)]);
        assert_eq!(cycle(5).induced_subgraph(&[]).graph.n(), 0);
        // C5 restricted to {0,2,4}: only the wrap-around edge 4-0 survives.
        let sub = cycle(5).induced_subgraph(&[0, 2, 4]);
        assert_eq!(sub.graph.edges(), vec![(0, 2)]);
        assert_eq!(sub.lift([0, 2]), vec![0, 4]);
    }

    #[test]
    fn maximal_paths_cases() {
        // 0-1-2 plus isolated 3
        let g = Graph::from_edges(4, &[(2, 1), (1, 0)]).unwrap();
        let d = g.maximal_paths().unwrap();
        assert_eq!(d.paths, vec![vec![0, 1, 2]]);
        assert_eq!(d.isolated, vec![3]);

        assert!(matches!(
            cycle(4).maximal_paths(),
            Err(GraphError::Cycle(_))
        ));

        let g = Graph::from_edges(4, &[(3, 2), (0, 1)]).unwrap();
        assert_eq!(
            g.maximal_paths().unwrap().paths,
            vec![vec![0, 1], vec![2, 3]]
        );

        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.maximal_paths(), Err(GraphError::DegreeAboveTwo(0)));
    }

    #[test]
    fn path_listed_from_smaller_end() {
        let g = Graph::from_edges(3, &[(2, 0), (0, 1)]).unwrap();
        assert_eq!(g.maximal_paths().unwrap().paths, vec![vec![1, 0, 2]]);
    }

    #[test]
    fn cliques() {
        assert_eq!(complete(4).cliques_of_size(3).len(), 4);
        assert!(cycle(5).cliques_of_size(3).is_empty());
        let two = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(two.cliques_of_size(3), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(cycle(5).cliques_of_size(1).len(), 5);
    }
}
