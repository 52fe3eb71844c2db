//! Graph families and their Laplacians.
//!
//! Vertex indexing is fixed:
//!
//! * `B_N`: bitstring `(ε_1, …, ε_N)` ↦ `Σ ε_i 2^{N−i}`, so `0…0` is index 0
//!   and `1…1` is index `2^N − 1`.
//! * `B_N ⊢ C_m`: block-major, vertex `v` of block `k` ↦ `k·2^N + index(v)`.
//! * `B_N □ C_m` (and every `cartesian_product(G, H)`): `(g, h)` ↦ `h·|G| + g`,
//!   so each copy of `G` occupies a contiguous index range.

use std::collections::{HashMap, VecDeque};
use std::io::Write;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{RMat, Scalar, SymmetricMatrix};

/// Structured name of a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexLabel {
    /// Position on a cycle.
    Cycle(usize),
    /// Cube vertex as a bitstring, most significant coordinate first.
    Cube(Vec<u8>),
    /// Cube vertex `vertex` inside block `block` of a vertex substitution.
    Block { block: usize, vertex: usize },
    /// Cube vertex `vertex` on slice `slice` of a cube-cycle product.
    Slice { vertex: usize, slice: usize },
    /// Generic product vertex `(g, h)`.
    Pair(usize, usize),
}

/// Which ordering convention a graph's indices follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexIndexing {
    Plain,
    Cycle,
    Cube {
        n: u32,
    },
    /// Blocks of `2^n` consecutive indices, `m` blocks.
    BlockMajor {
        n: u32,
        m: usize,
    },
    /// Slices of `inner` consecutive indices, `outer` slices.
    SliceMajor {
        inner: usize,
        outer: usize,
    },
}

/// Simple undirected graph held as sorted neighbor lists.
#[derive(Clone, Debug)]
pub struct Graph {
    neighbors: Vec<Vec<usize>>,
    indexing: VertexIndexing,
    labels: Option<Vec<VertexLabel>>,
    label_index: Option<HashMap<VertexLabel, usize>>,
}

impl Graph {
    /// Build from an edge list, validating symmetry-free input
    /// (no self-loops, no duplicates, indices in range).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a}, {b}) out of range for {n} vertices")));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at vertex {a}")));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for (v, list) in neighbors.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("duplicate edge at vertex {v}")));
            }
        }
        Ok(Graph {
            neighbors,
            indexing: VertexIndexing::Plain,
            labels: None,
            label_index: None,
        })
    }

    fn with_labels(mut self, indexing: VertexIndexing, labels: Vec<VertexLabel>) -> Self {
        debug_assert_eq!(labels.len(), self.order());
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        self.indexing = indexing;
        self.labels = Some(labels);
        self.label_index = Some(index);
        self
    }

    pub fn order(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn indexing(&self) -> VertexIndexing {
        self.indexing
    }

    pub fn label(&self, v: usize) -> Option<&VertexLabel> {
        self.labels.as_ref().map(|l| &l[v])
    }

    pub fn index_of(&self, label: &VertexLabel) -> Option<usize> {
        self.label_index.as_ref()?.get(label).copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, list) in self.neighbors.iter().enumerate() {
            out.extend(list.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.order();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }

    /// Checks every structural invariant of the representation.
    pub fn validate(&self) -> Result<()> {
        for (v, list) in self.neighbors.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!("neighbor list of {v} not strictly sorted")));
            }
            for &w in list {
                if w == v {
                    return Err(Error::invalid(format!("self-loop at {v}")));
                }
                if !self.has_edge(w, v) {
                    return Err(Error::invalid(format!("asymmetric adjacency {v} -> {w}")));
                }
            }
        }
        Ok(())
    }

    /// `(L f)(v) = Σ_{w∼v} [f(v) − f(w)]`
    pub fn apply_laplacian<T: Scalar>(&self, f: &[T]) -> Result<Vec<T>> {
        if f.len() != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                actual: f.len(),
            });
        }
        Ok(self
            .neighbors
            .iter()
            .enumerate()
            .map(|(v, list)| {
                let mut acc = f[v].scale(list.len() as f64);
                for &w in list {
                    acc -= f[w];
                }
                acc
            })
            .collect())
    }

    /// One `"i j"` pair per line, 0-based, `i < j`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}")?;
        }
        Ok(())
    }

    pub fn read_edge_list(n: usize, text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => edges.push((a, b)),
                _ => return Err(Error::Parse(format!("line {}: expected \"i j\"", lineno + 1))),
            }
        }
        Graph::from_edges(n, &edges)
    }
}

fn require_connected(g: Graph) -> Result<Graph> {
    if g.is_connected() {
        Ok(g)
    } else {
        Err(Error::Disconnected)
    }
}

/// Cube vertex index to its bitstring, most significant coordinate first.
pub fn cube_bits(n: u32, index: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect()
}

/// The `m`-cycle, `ℓ ∼ ℓ ± 1 mod m`.
pub fn cycle_graph(m: usize) -> Result<Graph> {
    if m < 3 {
        return Err(Error::invalid(format!("cycle needs m >= 3, got {m}")));
    }
    let edges: Vec<_> = (0..m).map(|l| (l, (l + 1) % m)).collect();
    let g = Graph::from_edges(m, &edges)?;
    let labels = (0..m).map(VertexLabel::Cycle).collect();
    Ok(g.with_labels(VertexIndexing::Cycle, labels))
}

/// Boolean cube `B_N` on `Z_2^N`; `v ∼ w` iff they differ in one coordinate.
pub fn cube_graph(n: u32) -> Result<Graph> {
    if n == 0 || n > 24 {
        return Err(Error::invalid(format!("cube dimension must be in 1..=24, got {n}")));
    }
    let size = 1usize << n;
    let mut edges = Vec::with_capacity(n as usize * size / 2);
    for v in 0..size {
        for i in 0..n {
            let w = v ^ (1 << i);
            if v < w {
                edges.push((v, w));
            }
        }
    }
    let g = Graph::from_edges(size, &edges)?;
    let labels = (0..size).map(|v| VertexLabel::Cube(cube_bits(n, v))).collect();
    Ok(g.with_labels(VertexIndexing::Cube { n }, labels))
}

/// Cartesian product `G □ H` with `(g, h)` at index `h·|G| + g`.
pub fn cartesian_product(g: &Graph, h: &Graph) -> Result<Graph> {
    let (ng, nh) = (g.order(), h.order());
    let mut edges = Vec::with_capacity(ng * h.edge_count() + nh * g.edge_count());
    for b in 0..nh {
        for (a1, a2) in g.edges() {
            edges.push((b * ng + a1, b * ng + a2));
        }
    }
    for (b1, b2) in h.edges() {
        for a in 0..ng {
            edges.push((b1 * ng + a, b2 * ng + a));
        }
    }
    let out = require_connected(Graph::from_edges(ng * nh, &edges)?)?;
    let cube_cycle = matches!(g.indexing, VertexIndexing::Cube { .. }) && matches!(h.indexing, VertexIndexing::Cycle);
    let labels = (0..ng * nh)
        .map(|i| {
            let (a, b) = (i % ng, i / ng);
            if cube_cycle {
                VertexLabel::Slice { vertex: a, slice: b }
            } else {
                VertexLabel::Pair(a, b)
            }
        })
        .collect();
    Ok(out.with_labels(VertexIndexing::SliceMajor { inner: ng, outer: nh }, labels))
}

/// `B_N □ C_m`, slice-major.
pub fn cube_cycle_product(n: u32, m: usize) -> Result<Graph> {
    cartesian_product(&cube_graph(n)?, &cycle_graph(m)?)
}

/// Vertex substitution `B_N ⊢ C_m`: a cube copy on every cycle vertex, with
/// `v_1^{k} ∼ v_0^{k+1}` joining consecutive blocks.
pub fn vertex_substitution(n: u32, m: usize) -> Result<Graph> {
    if m < 3 {
        return Err(Error::invalid(format!("cycle needs m >= 3, got {m}")));
    }
    let cube = cube_graph(n)?;
    let size = cube.order();
    let mut edges = Vec::with_capacity(m * (cube.edge_count() + 1));
    for k in 0..m {
        for (a, b) in cube.edges() {
            edges.push((k * size + a, k * size + b));
        }
        edges.push((k * size + size - 1, ((k + 1) % m) * size));
    }
    let g = require_connected(Graph::from_edges(m * size, &edges)?)?;
    let labels = (0..m * size)
        .map(|i| VertexLabel::Block {
            block: i / size,
            vertex: i % size,
        })
        .collect();
    Ok(g.with_labels(VertexIndexing::BlockMajor { n, m }, labels))
}

/// Dense unnormalized Laplacian `D − A`.
pub fn laplacian(g: &Graph) -> SymmetricMatrix<f64> {
    let n = g.order();
    let mut l = RMat::zeros(n, n);
    for v in 0..n {
        l[(v, v)] = g.degree(v) as f64;
        for &w in g.neighbors(v) {
            l[(v, w)] = -1.0;
        }
    }
    SymmetricMatrix::new(l).expect("graph Laplacian is symmetric")
}

/// Subgraph induced on a vertex set, re-indexed densely.
#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `original[i]` is the parent index of subgraph vertex `i`.
    pub original: Vec<usize>,
    pub connected: bool,
}

pub fn induced_subgraph(g: &Graph, vertices: &[usize]) -> Result<InducedSubgraph> {
    if vertices.is_empty() {
        return Err(Error::invalid("induced subgraph needs a nonempty vertex set"));
    }
    let mut original = vertices.to_vec();
    original.sort_unstable();
    original.dedup();
    if let Some(&bad) = original.iter().find(|&&v| v >= g.order()) {
        return Err(Error::invalid(format!("vertex {bad} out of range")));
    }
    let position: HashMap<usize, usize> = original.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut edges = Vec::new();
    for (i, &v) in original.iter().enumerate() {
        for &w in g.neighbors(v) {
            if let Some(&j) = position.get(&w) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    let graph = Graph::from_edges(original.len(), &edges)?;
    let connected = graph.is_connected();
    Ok(InducedSubgraph {
        graph,
        original,
        connected,
    })
}

/// Check that `partition` covers `0..n` with disjoint nonempty parts.
pub fn validate_partition(n: usize, partition: &[Vec<usize>]) -> Result<()> {
    let mut owner = vec![usize::MAX; n];
    for (p, part) in partition.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::InvalidPartition(format!("part {p} is empty")));
        }
        for &v in part {
            if v >= n {
                return Err(Error::InvalidPartition(format!("vertex {v} out of range")));
            }
            if owner[v] != usize::MAX {
                return Err(Error::InvalidPartition(format!(
                    "vertex {v} in parts {} and {p}",
                    owner[v]
                )));
            }
            owner[v] = p;
        }
    }
    if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::InvalidPartition(format!("vertex {v} not covered")));
    }
    Ok(())
}

/// Mean intra-cluster degree over mean total degree.
pub fn clusterness_ratio(g: &Graph, partition: &[Vec<usize>]) -> Result<Ratio<u64>> {
    validate_partition(g.order(), partition)?;
    let mut owner = vec![0usize; g.order()];
    for (p, part) in partition.iter().enumerate() {
        for &v in part {
            owner[v] = p;
        }
    }
    let mut intra = 0u64;
    let mut total = 0u64;
    for v in 0..g.order() {
        for &w in g.neighbors(v) {
            total += 1;
            if owner[w] == owner[v] {
                intra += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::invalid("graph has no edges"));
    }
    Ok(Ratio::new(intra, total))
}

/// Contiguous index ranges of size `block` covering `0..n`.
pub fn block_partition(n: usize, block: usize) -> Vec<Vec<usize>> {
    (0..n.div_ceil(block))
        .map(|k| (k * block..((k + 1) * block).min(n)).collect())
        .collect()
}

/// Matrix Market symmetric coordinate export of the Laplacian (lower triangle).
pub fn write_laplacian_matrix_market<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    let n = g.order();
    let nnz = n + g.edge_count();
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{n} {n} {nnz}")?;
    for v in 0..n {
        writeln!(out, "{} {} {}", v + 1, v + 1, g.degree(v))?;
        for &w in g.neighbors(v).iter().filter(|&&w| w > v) {
            writeln!(out, "{} {} -1", w + 1, v + 1)?;
        }
    }
    Ok(())
}
