//! Graphs with per-edge orientation biases, orientations and reachability.
//!
//! Vertices are `0..n`. Every edge is stored as `(low, high, bias)` with
//! `low < high`; `bias` is the probability that the edge points low → high.
//! The position of an edge in [`Graph::edges`] is its bit position in an
//! [`Orientation`].

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub low: VertexId,
    pub high: VertexId,
    /// Probability of the low → high direction.
    pub bias: f64,
}

impl Edge {
    pub fn other(&self, v: VertexId) -> VertexId {
        if v == self.low {
            self.high
        } else {
            self.low
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<Edge>,
    // (neighbour, edge index) per vertex
    incident: Vec<Vec<(VertexId, usize)>>,
}

impl Graph {
    /// Builds a graph from `(u, v, bias)` triples, canonicalizing each pair to
    /// `(min, max)`. The bias keeps referring to the low → high direction.
    pub fn new<I>(vertex_count: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (VertexId, VertexId, f64)>,
    {
        let mut list = Vec::new();
        let mut seen = HashSet::new();
        for (u, v, bias) in edges {
            let edge = check_edge(vertex_count, u, v, bias).map_err(Error::Input)?;
            if !seen.insert((edge.low, edge.high)) {
                return Err(Error::Input(format!(
                    "duplicate edge {} {}",
                    edge.low, edge.high
                )));
            }
            list.push(edge);
        }
        Ok(Self::from_checked(vertex_count, list))
    }

    fn from_checked(vertex_count: usize, edges: Vec<Edge>) -> Graph {
        let mut incident = vec![Vec::new(); vertex_count];
        for (i, e) in edges.iter().enumerate() {
            incident[e.low].push((e.high, i));
            incident[e.high].push((e.low, i));
        }
        Graph {
            vertex_count,
            edges,
            incident,
        }
    }

    /// Parses the edge-list text format:
    ///
    /// ```text
    /// # comment
    /// n 4          (optional header)
    /// 0 1 0.7      (u v p, one edge per line)
    /// ```
    ///
    /// Without a header the vertex count is one more than the largest id.
    pub fn parse(text: &str) -> Result<Graph> {
        let mut declared: Option<(usize, usize)> = None;
        let mut raw: Vec<(usize, VertexId, VertexId, f64)> = Vec::new();

        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            if fields[0] == "n" {
                if fields.len() != 2 {
                    return Err(err("header must be `n <vertex_count>`".into()));
                }
                if declared.is_some() {
                    return Err(err("repeated `n` header".into()));
                }
                if !raw.is_empty() {
                    return Err(err("`n` header must precede the edges".into()));
                }
                let count = fields[1]
                    .parse::<usize>()
                    .map_err(|_| err(format!("bad vertex count `{}`", fields[1])))?;
                declared = Some((count, line_no));
                continue;
            }
            if fields.len() != 3 {
                return Err(err(format!(
                    "expected `u v p`, found {} fields",
                    fields.len()
                )));
            }
            let u = fields[0]
                .parse::<usize>()
                .map_err(|_| err(format!("bad vertex id `{}`", fields[0])))?;
            let v = fields[1]
                .parse::<usize>()
                .map_err(|_| err(format!("bad vertex id `{}`", fields[1])))?;
            let p = fields[2]
                .parse::<f64>()
                .map_err(|_| err(format!("bad probability `{}`", fields[2])))?;
            raw.push((line_no, u, v, p));
        }

        let vertex_count = match declared {
            Some((count, _)) => count,
            None => raw
                .iter()
                .map(|&(_, u, v, _)| u.max(v) + 1)
                .max()
                .unwrap_or(0),
        };

        let mut edges = Vec::with_capacity(raw.len());
        let mut seen = HashSet::new();
        for (line, u, v, p) in raw {
            let edge =
                check_edge(vertex_count, u, v, p).map_err(|message| Error::Parse { line, message })?;
            if !seen.insert((edge.low, edge.high)) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate edge {} {}", edge.low, edge.high),
                });
            }
            edges.push(edge);
        }
        Ok(Self::from_checked(vertex_count, edges))
    }

    /// Serializes to the edge-list format with an explicit header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.vertex_count);
        for e in &self.edges {
            out.push_str(&format!("{} {} {}\n", e.low, e.high, e.bias));
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &Edge {
        &self.edges[index]
    }

    /// `(neighbour, edge index)` pairs around `v`.
    pub fn incident(&self, v: VertexId) -> &[(VertexId, usize)] {
        &self.incident[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incident[v].len()
    }

    /// Same edges, every bias replaced by `bias`.
    pub fn with_uniform_bias(&self, bias: f64) -> Result<Graph> {
        if !(0.0..=1.0).contains(&bias) {
            return Err(Error::Input(format!("bias {bias} outside [0, 1]")));
        }
        let edges = self.edges.iter().map(|e| Edge { bias, ..*e }).collect();
        Ok(Self::from_checked(self.vertex_count, edges))
    }

    /// Same graph plus one edge appended at the end of the bit order.
    pub fn with_edge(&self, u: VertexId, v: VertexId, bias: f64) -> Result<Graph> {
        let triples = self
            .edges
            .iter()
            .map(|e| (e.low, e.high, e.bias))
            .chain(std::iter::once((u, v, bias)));
        Graph::new(self.vertex_count, triples)
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(Error::InvalidVertex {
                vertex: v,
                vertex_count: self.vertex_count,
            })
        }
    }
}

fn check_edge(
    vertex_count: usize,
    u: VertexId,
    v: VertexId,
    bias: f64,
) -> std::result::Result<Edge, String> {
    if u == v {
        return Err(format!("self-loop at vertex {u}"));
    }
    if u >= vertex_count || v >= vertex_count {
        return Err(format!(
            "edge {u} {v} references a vertex outside 0..{vertex_count}"
        ));
    }
    if !(0.0..=1.0).contains(&bias) {
        return Err(format!("bias {bias} outside [0, 1]"));
    }
    Ok(Edge {
        low: u.min(v),
        high: u.max(v),
        bias,
    })
}

/// Fixed-capacity bit set over `0..len`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    words: Vec<u64>,
    len: usize,
}

impl VertexSet {
    pub fn new(len: usize) -> Self {
        VertexSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_slice(len: usize, members: &[VertexId]) -> Self {
        let mut set = Self::new(len);
        for &v in members {
            set.insert(v);
        }
        set
    }

    /// Capacity (the universe size), not the number of members.
    pub fn universe(&self) -> usize {
        self.len
    }

    /// Returns true if `v` was not yet present.
    pub fn insert(&mut self, v: VertexId) -> bool {
        let (w, b) = (v / 64, v % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.len && self.words[v / 64] & (1 << (v % 64)) != 0
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter().chain(std::iter::repeat(&0)))
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }

    /// Low 64 members as a mask; `None` if the universe is wider than 64.
    pub fn as_mask(&self) -> Option<u64> {
        if self.len > 64 {
            None
        } else {
            Some(self.words.first().copied().unwrap_or(0))
        }
    }
}

/// One direction bit per edge, aligned with [`Graph::edges`].
/// `true` means low → high.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation {
    bits: Vec<bool>,
}

impl Orientation {
    pub fn new(bits: Vec<bool>) -> Self {
        Orientation { bits }
    }

    pub fn uniform(edge_count: usize, low_to_high: bool) -> Self {
        Orientation {
            bits: vec![low_to_high; edge_count],
        }
    }

    /// Bit `e` of `mask` is edge `e`.
    pub fn from_mask(mask: u64, edge_count: usize) -> Self {
        Orientation {
            bits: (0..edge_count).map(|e| mask >> e & 1 == 1).collect(),
        }
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

    pub fn low_to_high(&self, edge: usize) -> bool {
        self.bits[edge]
    }

    pub fn set(&mut self, edge: usize, low_to_high: bool) {
        self.bits[edge] = low_to_high;
    }

    pub fn flip(&mut self, edge: usize) {
        self.bits[edge] = !self.bits[edge];
    }

    /// Whether edge `edge` (incident to `from`) is traversable out of `from`.
    #[inline]
    pub fn leaves(&self, graph: &Graph, edge: usize, from: VertexId) -> bool {
        self.bits[edge] == (graph.edges[edge].low == from)
    }

    pub fn check(&self, graph: &Graph) -> Result<()> {
        if self.bits.len() == graph.edge_count() {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "orientation has {} bits, graph has {} edges",
                self.bits.len(),
                graph.edge_count()
            )))
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Draws one orientation: edge `e` is low → high with probability
/// `bias_e`. Consumes exactly one uniform per edge, in edge order.
pub fn sample_orientation(graph: &Graph, stream: &mut RandomStream) -> Orientation {
    Orientation {
        bits: graph
            .edges
            .iter()
            .map(|e| stream.bernoulli(e.bias))
            .collect(),
    }
}

/// Reusable traversal buffers.
#[derive(Clone, Debug)]
pub struct Reacher {
    seen: VertexSet,
    stack: Vec<VertexId>,
}

impl Reacher {
    pub fn new(graph: &Graph) -> Self {
        Reacher {
            seen: VertexSet::new(graph.vertex_count()),
            stack: Vec::new(),
        }
    }

    /// Vertices reachable from `sources` along directed paths (length 0
    /// included). Ids are assumed valid.
    pub fn reach(
        &mut self,
        graph: &Graph,
        orientation: &Orientation,
        sources: &[VertexId],
    ) -> &VertexSet {
        self.seen.clear();
        self.stack.clear();
        for &s in sources {
            if self.seen.insert(s) {
                self.stack.push(s);
            }
        }
        while let Some(v) = self.stack.pop() {
            for &(w, e) in graph.incident(v) {
                if orientation.leaves(graph, e, v) && self.seen.insert(w) {
                    self.stack.push(w);
                }
            }
        }
        &self.seen
    }
}

pub fn reachable_set(
    graph: &Graph,
    orientation: &Orientation,
    sources: &[VertexId],
) -> Result<VertexSet> {
    orientation.check(graph)?;
    if sources.is_empty() {
        return Err(Error::Input("source set is empty".into()));
    }
    for &s in sources {
        graph.check_vertex(s)?;
    }
    Ok(Reacher::new(graph).reach(graph, orientation, sources).clone())
}

/// `source_set → target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub sources: Vec<VertexId>,
    pub target: VertexId,
}

/// Conjunction of connection atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventExpr {
    atoms: Vec<Atom>,
}

impl EventExpr {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Input("event has no atoms".into()));
        }
        if atoms.iter().any(|a| a.sources.is_empty()) {
            return Err(Error::Input("event atom with empty source set".into()));
        }
        Ok(EventExpr { atoms })
    }

    pub fn connection(sources: &[VertexId], target: VertexId) -> Result<Self> {
        Self::new(vec![Atom {
            sources: sources.to_vec(),
            target,
        }])
    }

    /// `sources → a ∩ sources → b`.
    pub fn joint(sources: &[VertexId], a: VertexId, b: VertexId) -> Result<Self> {
        Self::new(vec![
            Atom {
                sources: sources.to_vec(),
                target: a,
            },
            Atom {
                sources: sources.to_vec(),
                target: b,
            },
        ])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn and(mut self, other: EventExpr) -> EventExpr {
        self.atoms.extend(other.atoms);
        self
    }

    pub fn validate(&self, graph: &Graph) -> Result<()> {
        for atom in &self.atoms {
            graph.check_vertex(atom.target)?;
            for &s in &atom.sources {
                graph.check_vertex(s)?;
            }
        }
        Ok(())
    }

    /// Evaluates with caller-supplied buffers; assumes a validated event.
    pub fn holds_with(
        &self,
        reacher: &mut Reacher,
        graph: &Graph,
        orientation: &Orientation,
    ) -> bool {
        self.atoms.iter().all(|atom| {
            atom.sources.contains(&atom.target)
                || reacher
                    .reach(graph, orientation, &atom.sources)
                    .contains(atom.target)
        })
    }
}

pub fn holds(graph: &Graph, orientation: &Orientation, event: &EventExpr) -> Result<bool> {
    orientation.check(graph)?;
    event.validate(graph)?;
    Ok(event.holds_with(&mut Reacher::new(graph), graph, orientation))
}
