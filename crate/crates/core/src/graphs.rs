//! Max-Cut instances: simple undirected graphs, random 3-regular sampling,
//! cut evaluation and an exhaustive oracle for small instances.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest vertex count accepted by the exhaustive oracles.
pub const BRUTE_FORCE_LIMIT: usize = 28;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("random 3-regular graphs need an even vertex count >= 4, got {0}")]
    InvalidRegularSize(usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("assignment has length {got}, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("exhaustive search is limited to {limit} vertices, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Undirected simple graph. Edge orientation and order are kept exactly as
/// supplied, since the circuit builder emits one phase gate per edge in this
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = GraphError;
    fn try_from(raw: RawGraph) -> Result<Self, Self::Error> {
        Graph::new(raw.n, raw.edges)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph { n: g.n, edges: g.edges }
    }
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut seen = HashSet::with_capacity(edges.len());
        for &(i, j) in &edges {
            for v in [i, j] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(GraphError::DuplicateEdge(i, j));
            }
        }
        Ok(Self { n, edges })
    }

    /// Complete graph on `n` vertices, edges in lexicographic order.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    pub fn is_regular(&self, degree: usize) -> bool {
        self.degrees().iter().all(|&d| d == degree)
    }

    /// Cut size of the assignment encoded in the low `n` bits of `index`
    /// (bit `v` is the color of vertex `v`).
    pub fn cut_of_index(&self, index: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(i, j)| ((index >> i) ^ (index >> j)) & 1 == 1)
            .count()
    }

    /// Cut size of every computational basis index, `2^n` entries.
    pub fn cut_table(&self) -> Vec<f64> {
        (0..1usize << self.n)
            .map(|z| self.cut_of_index(z) as f64)
            .collect()
    }
}

/// Two-coloring of the vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CutAssignment {
    bits: Vec<bool>,
}

impl CutAssignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        Self {
            bits: (0..n).map(|v| (index >> v) & 1 == 1).collect(),
        }
    }

    /// Parses a string of '0'/'1' characters, vertex 0 first.
    pub fn from_bitstring(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (v, &b)| acc | (usize::from(b) << v))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

pub fn cut_value(g: &Graph, a: &CutAssignment) -> Result<usize, GraphError> {
    if a.len() != g.n() {
        return Err(GraphError::LengthMismatch {
            expected: g.n(),
            got: a.len(),
        });
    }
    Ok(g.edges()
        .iter()
        .filter(|&&(i, j)| a.bits[i] != a.bits[j])
        .count())
}

/// Samples a simple 3-regular graph with the pairing (configuration) model,
/// rejecting any pairing that produces a loop or a repeated edge. Edges are
/// returned normalized (`i < j`) and sorted.
pub fn gen_random_3regular(n: usize, seed: u64) -> Result<Graph, GraphError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(GraphError::InvalidRegularSize(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
    loop {
        points.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(points.len() / 2);
        let mut edges = Vec::with_capacity(points.len() / 2);
        let ok = points.chunks_exact(2).all(|pair| {
            let (i, j) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if i == j || !seen.insert((i, j)) {
                return false;
            }
            edges.push((i, j));
            true
        });
        if ok {
            edges.sort_unstable();
            return Graph::new(n, edges);
        }
    }
}

/// Result of exhaustive Max-Cut search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxCutSolution {
    pub k_max: usize,
    /// All maximizing assignments, ordered by basis index.
    pub optima: Vec<CutAssignment>,
}

impl MaxCutSolution {
    pub fn optimal_indices(&self) -> Vec<usize> {
        self.optima.iter().map(CutAssignment::index).collect()
    }
}

/// Enumerates all `2^n` colorings in Gray-code order, updating the cut
/// incrementally on each single-vertex flip.
pub fn brute_force_maxcut(g: &Graph) -> Result<MaxCutSolution, GraphError> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(GraphError::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let adj = g.adjacency();
    let mut state = 0usize;
    let mut cut = 0i64;
    let mut best = 0i64;
    let mut optima = vec![0usize];
    for step in 1..(1usize << n) {
        let v = step.trailing_zeros() as usize;
        // Every incident edge toggles between cut and uncut.
        let mut delta = 0i64;
        for &u in &adj[v] {
            if ((state >> u) ^ (state >> v)) & 1 == 1 {
                delta -= 1;
            } else {
                delta += 1;
            }
        }
        state ^= 1 << v;
        cut += delta;
        if cut > best {
            best = cut;
            optima.clear();
            optima.push(state);
        } else if cut == best {
            optima.push(state);
        }
    }
    optima.sort_unstable();
    Ok(MaxCutSolution {
        k_max: best as usize,
        optima: optima
            .into_iter()
            .map(|z| CutAssignment::from_index(z, n))
            .collect(),
    })
}

/// Parses the edge-list format: a header `n m` followed by `m` lines `i j`.
/// Blank lines and trailing whitespace are ignored.
pub fn read_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let [n, m] = parse_pair(line, header)?;
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let [i, j] = parse_pair(line, l)?;
        edges.push((i, j));
    }
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: 1,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Graph::new(n, edges)
}

fn parse_pair(line: usize, l: &str) -> Result<[usize; 2], GraphError> {
    let parsed: Result<Vec<usize>, _> = l.split_whitespace().map(str::parse).collect();
    match parsed {
        Ok(v) if v.len() == 2 => Ok([v[0], v[1]]),
        _ => Err(GraphError::Parse {
            line,
            msg: format!("expected two non-negative integers, got {l:?}"),
        }),
    }
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.num_edges());
    for &(i, j) in g.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

/// The 8-vertex instance whose full schedule is published alongside the
/// original cost study, edges in the published order.
pub fn reference_instance() -> Graph {
    Graph::new(
        8,
        vec![
            (7, 6),
            (7, 3),
            (5, 3),
            (6, 2),
            (6, 1),
            (5, 2),
            (7, 4),
            (3, 0),
            (1, 0),
            (4, 1),
            (5, 4),
            (2, 0),
        ],
    )
    .expect("reference instance is a simple graph")
}
