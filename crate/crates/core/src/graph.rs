//! Undirected simple graphs, the edge-list text format, and generators for
//! the example families (paths, kites, the six-vertex tree, random graphs).

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    IndexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("no connected graph after {attempts} attempts (n = {n}, p = {p})")]
    GenerationFailed { n: usize, p: f64, attempts: usize },
}

/// Undirected simple graph stored as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Duplicate pairs and both orientations
    /// of the same edge collapse to a single undirected edge.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut sets = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::IndexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            sets[u].insert(v);
            sets[v].insert(u);
        }
        Ok(Self {
            adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency
            .get(u)
            .is_some_and(|nb| nb.binary_search(&v).is_ok())
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// `out = A x` using the adjacency lists directly.
    pub fn apply_adjacency(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.vertex_count());
        debug_assert_eq!(out.len(), self.vertex_count());
        for (o, nb) in out.iter_mut().zip(&self.adjacency) {
            *o = nb.iter().map(|&v| x[v]).sum();
        }
    }

    /// Vertices reachable from `v`, ascending.
    pub fn component_of(&self, v: usize) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(u) = stack.pop() {
            for &w in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        (0..self.vertex_count()).filter(|&u| seen[u]).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.component_of(0).len() == self.vertex_count()
    }

    /// Dense row-major adjacency matrix.
    pub fn dense_adjacency(&self) -> Vec<Vec<f64>> {
        let n = self.vertex_count();
        let mut m = vec![vec![0.0; n]; n];
        for (u, v) in self.edges() {
            m[u][v] = 1.0;
            m[v][u] = 1.0;
        }
        m
    }
}

pub fn build_graph(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
    Graph::new(n, edges.iter().copied())
}

/// Parses the edge-list format: `#` comment lines, a header `n <count>`, then
/// one `u v` pair of 0-based vertex indices per line.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut n = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |message: String| GraphError::Parse {
            line: line_no,
            message,
        };
        match n {
            None => {
                if tokens.len() != 2 || tokens[0] != "n" {
                    return Err(parse_err(format!(
                        "expected header `n <count>`, found `{line}`"
                    )));
                }
                let count = tokens[1]
                    .parse::<usize>()
                    .map_err(|e| parse_err(format!("bad vertex count `{}`: {e}", tokens[1])))?;
                n = Some(count);
            }
            Some(count) => {
                if tokens.len() != 2 {
                    return Err(parse_err(format!("expected `u v`, found `{line}`")));
                }
                let mut pair = [0usize; 2];
                for (slot, tok) in pair.iter_mut().zip(&tokens) {
                    *slot = tok
                        .parse::<usize>()
                        .map_err(|e| parse_err(format!("bad vertex `{tok}`: {e}")))?;
                }
                for &w in &pair {
                    if w >= count {
                        return Err(GraphError::IndexOutOfRange {
                            vertex: w,
                            n: count,
                        });
                    }
                }
                edges.push((pair[0], pair[1]));
            }
        }
    }
    let n = n.ok_or_else(|| GraphError::Parse {
        line: text.lines().count(),
        message: "missing header `n <count>`".into(),
    })?;
    Graph::new(n, edges)
}

pub fn emit_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.vertex_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// Path on `n` vertices with edges `(i, i + 1)`.
pub fn gen_path(n: usize) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidSize(
            "path needs at least one vertex".into(),
        ));
    }
    Graph::new(n, (1..n).map(|i| (i - 1, i)))
}

/// Index layout of the kite graph K(k, n).
///
/// Index 0 is the origin, then the axis vertices in `(level, axis)` order,
/// then one diagonal vertex `(l, ..., l)` per odd level `l`. The diagonal
/// vertex is joined to every axis vertex at levels `l` and `l + 2`, so it sits
/// in stratum `l + 1` and the stratum vectors tridiagonalize the adjacency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KiteLayout {
    pub dimension: usize,
    pub levels: usize,
}

impl KiteLayout {
    pub fn new(dimension: usize, levels: usize) -> Result<Self, GraphError> {
        if dimension < 2 {
            return Err(GraphError::InvalidSize(format!(
                "kite dimension must be >= 2, got {dimension}"
            )));
        }
        if levels < 1 {
            return Err(GraphError::InvalidSize(
                "kite needs at least one level".into(),
            ));
        }
        Ok(Self { dimension, levels })
    }

    pub fn origin(&self) -> usize {
        0
    }

    /// Axis vertex with coordinate `level` in slot `axis` (both 1-based).
    pub fn axis_vertex(&self, axis: usize, level: usize) -> usize {
        debug_assert!((1..=self.dimension).contains(&axis));
        debug_assert!((1..=self.levels).contains(&level));
        1 + (level - 1) * self.dimension + (axis - 1)
    }

    /// Diagonal vertex `(level, ..., level)`; `level` must be odd.
    pub fn diagonal_vertex(&self, level: usize) -> Option<usize> {
        (level % 2 == 1 && level <= self.levels)
            .then(|| 1 + self.levels * self.dimension + level / 2)
    }

    pub fn diagonal_count(&self) -> usize {
        self.levels.div_ceil(2)
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.dimension * self.levels + self.diagonal_count()
    }

    pub fn is_diagonal(&self, v: usize) -> bool {
        v > self.dimension * self.levels && v < self.vertex_count()
    }

    pub fn graph(&self) -> Graph {
        let mut edges = Vec::new();
        for axis in 1..=self.dimension {
            edges.push((self.origin(), self.axis_vertex(axis, 1)));
            for level in 1..=self.levels {
                let v = self.axis_vertex(axis, level);
                if level < self.levels {
                    edges.push((v, self.axis_vertex(axis, level + 1)));
                }
                if let Some(d) = self.diagonal_vertex(level) {
                    edges.push((v, d));
                }
                if let Some(d) = level.checked_sub(2).and_then(|l| self.diagonal_vertex(l)) {
                    edges.push((v, d));
                }
            }
        }
        Graph::new(self.vertex_count(), edges).expect("kite edges are in range")
    }
}

pub fn gen_kite(k: usize, n: usize) -> Result<Graph, GraphError> {
    Ok(KiteLayout::new(k, n)?.graph())
}

/// Six-vertex tree: vertex 0 joined to 1, 2, 3; 2–4 and 3–5.
pub fn gen_tree_fig4() -> Graph {
    Graph::new(6, [(0, 1), (0, 2), (0, 3), (2, 4), (3, 5)]).expect("static edge set")
}

const RANDOM_ATTEMPTS: usize = 10_000;

/// Erdős–Rényi G(n, p) from a seeded ChaCha stream, redrawn until connected.
pub fn gen_random(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidSize(
            "random graph needs at least one vertex".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidSize(format!(
            "edge probability {p} not in [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_ATTEMPTS {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GraphError::GenerationFailed {
        n,
        p,
        attempts: RANDOM_ATTEMPTS,
    })
}
