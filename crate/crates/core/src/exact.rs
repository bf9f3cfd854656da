//! Exact connection probabilities.
//!
//! Two independent routes:
//!
//! * [`brute_force_prob`] sums the product measure over every orientation.
//! * [`ExactEngine`] conditions on the random out-neighbourhood `O_S` of the
//!   source set. Given `O_S = X`, the vertices reached from `S` are exactly
//!   `S` together with those reached from `X` in `G - S`, and the edges of
//!   `G - S` are independent of the edges touching `S`. Hence
//!
//!   ```text
//!   P_G(S → t) = Σ_{X ⊆ T} P(O_S = X) · P_{G-S}(X → t)
//!   ```
//!
//!   where `T` is the set of outside neighbours of `S`. Subproblems are
//!   memoized on `(remaining vertices, sources, targets)`.
//!
//! Both routes use `u64` vertex masks, so graphs are limited to 64 vertices.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EventExpr, Graph, VertexId};

pub const DEFAULT_EDGE_CAP: usize = 24;
pub const DEFAULT_STATE_CAP: usize = 1 << 22;
pub const MAX_EXACT_VERTICES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Maximum edge count for orientation enumeration.
    pub edge_cap: usize,
    /// Maximum memoized subproblems (and maximum subsets of one `T`).
    pub state_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            edge_cap: DEFAULT_EDGE_CAP,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Enumeration,
    Recursion,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    #[serde(rename = "prob")]
    pub probability: f64,
    pub method: Method,
    /// Orientations visited (enumeration) or subproblems solved (recursion).
    pub states_visited: u64,
}

fn clamp_probability(p: f64) -> f64 {
    debug_assert!(
        (-1e-12..=1.0 + 1e-12).contains(&p),
        "probability {p} outside floating-point dust range"
    );
    p.clamp(0.0, 1.0)
}

pub(crate) fn check_vertex_cap(graph: &Graph) -> Result<()> {
    if graph.vertex_count() > MAX_EXACT_VERTICES {
        Err(Error::VertexCap {
            vertices: graph.vertex_count(),
            cap: MAX_EXACT_VERTICES,
        })
    } else {
        Ok(())
    }
}

pub(crate) fn check_edge_cap(graph: &Graph, cap: usize) -> Result<()> {
    // masks are u64, so 63 is a hard ceiling regardless of the configured cap
    if graph.edge_count() > cap.min(63) {
        Err(Error::EdgeCap {
            edges: graph.edge_count(),
            cap: cap.min(63),
        })
    } else {
        Ok(())
    }
}

/// Validated vertex list as a mask.
pub fn vertex_mask(graph: &Graph, vertices: &[VertexId]) -> Result<u64> {
    check_vertex_cap(graph)?;
    let mut mask = 0u64;
    for &v in vertices {
        graph.check_vertex(v)?;
        mask |= 1 << v;
    }
    Ok(mask)
}

pub(crate) fn mask_members(mask: u64) -> impl Iterator<Item = VertexId> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

#[inline]
fn closure(out: &[u64], sources: u64) -> u64 {
    let mut reach = sources;
    let mut frontier = sources;
    while frontier != 0 {
        let mut next = 0;
        for v in mask_members(frontier) {
            next |= out[v];
        }
        frontier = next & !reach;
        reach |= next;
    }
    reach
}

/// Visits every orientation of positive probability as
/// `(direction mask, out-neighbour masks, weight)`. Bit `e` of the direction
/// mask is edge `e` (set = low → high). Returns the number visited.
pub fn for_each_orientation<F>(graph: &Graph, edge_cap: usize, mut visit: F) -> Result<u64>
where
    F: FnMut(u64, &[u64], f64),
{
    check_vertex_cap(graph)?;
    check_edge_cap(graph, edge_cap)?;

    fn descend<F: FnMut(u64, &[u64], f64)>(
        graph: &Graph,
        e: usize,
        mask: u64,
        weight: f64,
        out: &mut [u64],
        visit: &mut F,
        count: &mut u64,
    ) {
        if e == graph.edge_count() {
            *count += 1;
            visit(mask, out, weight);
            return;
        }
        let edge = graph.edge(e);
        if edge.bias > 0.0 {
            out[edge.low] |= 1 << edge.high;
            descend(graph, e + 1, mask | 1 << e, weight * edge.bias, out, visit, count);
            out[edge.low] &= !(1 << edge.high);
        }
        if edge.bias < 1.0 {
            out[edge.high] |= 1 << edge.low;
            descend(graph, e + 1, mask, weight * (1.0 - edge.bias), out, visit, count);
            out[edge.high] &= !(1 << edge.low);
        }
    }

    let mut out = vec![0u64; graph.vertex_count()];
    let mut count = 0;
    descend(graph, 0, 0, 1.0, &mut out, &mut visit, &mut count);
    Ok(count)
}

pub fn brute_force_prob(graph: &Graph, event: &EventExpr) -> Result<ExactResult> {
    brute_force_prob_with(graph, event, Limits::default())
}

/// Sums `Π_e (bias_e or 1 - bias_e)` over orientations where `event` holds.
pub fn brute_force_prob_with(
    graph: &Graph,
    event: &EventExpr,
    limits: Limits,
) -> Result<ExactResult> {
    event.validate(graph)?;
    check_vertex_cap(graph)?;
    let atoms: Vec<(u64, u64)> = event
        .atoms()
        .iter()
        .map(|a| {
            let src = a.sources.iter().fold(0u64, |m, &s| m | 1 << s);
            (src, 1u64 << a.target)
        })
        .collect();
    let mut total = 0.0;
    let visited = for_each_orientation(graph, limits.edge_cap, |_, out, w| {
        if atoms.iter().all(|&(src, tgt)| closure(out, src) & tgt != 0) {
            total += w;
        }
    })?;
    Ok(ExactResult {
        probability: clamp_probability(total),
        method: Method::Enumeration,
        states_visited: visited,
    })
}

/// Exact law of the reachable set from `sources`, by enumeration. The ground
/// set is every vertex of the graph in id order.
pub fn enumerate_reach_law(
    graph: &Graph,
    sources: &[VertexId],
    limits: Limits,
) -> Result<SubsetDistribution> {
    if sources.is_empty() {
        return Err(Error::Input("source set is empty".into()));
    }
    let src = vertex_mask(graph, sources)?;
    let mut mass: BTreeMap<u64, f64> = BTreeMap::new();
    for_each_orientation(graph, limits.edge_cap, |_, out, w| {
        *mass.entry(closure(out, src)).or_insert(0.0) += w;
    })?;
    Ok(SubsetDistribution {
        ground: (0..graph.vertex_count()).collect(),
        mass,
    })
}

/// Probability mass over subsets of an ordered ground set. Subsets are
/// encoded as bit patterns: bit `i` stands for `ground[i]`. Absent patterns
/// have mass zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetDistribution {
    ground: Vec<VertexId>,
    mass: BTreeMap<u64, f64>,
}

impl SubsetDistribution {
    pub fn new(ground: Vec<VertexId>, mass: BTreeMap<u64, f64>) -> Result<Self> {
        if ground.len() > 64 {
            return Err(Error::Input(format!(
                "ground set of {} elements exceeds 64",
                ground.len()
            )));
        }
        let full = full_mask(ground.len());
        for (&pattern, &p) in &mass {
            if pattern & !full != 0 {
                return Err(Error::Input(format!(
                    "pattern {pattern:#b} is not a subset of the ground set"
                )));
            }
            if p.is_nan() || p < 0.0 {
                return Err(Error::Input(format!("negative mass {p}")));
            }
        }
        Ok(SubsetDistribution { ground, mass })
    }

    pub fn ground(&self) -> &[VertexId] {
        &self.ground
    }

    pub fn mass(&self, pattern: u64) -> f64 {
        self.mass.get(&pattern).copied().unwrap_or(0.0)
    }

    /// Mass of the subset with the given members, or 0 if any member is
    /// outside the ground set.
    pub fn mass_of(&self, members: &[VertexId]) -> f64 {
        self.pattern(members).map_or(0.0, |p| self.mass(p))
    }

    /// Patterns with stored mass, in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.mass.iter().map(|(&k, &v)| (k, v))
    }

    pub fn total(&self) -> f64 {
        self.mass.values().sum()
    }

    pub fn members(&self, pattern: u64) -> Vec<VertexId> {
        mask_members(pattern).map(|i| self.ground[i]).collect()
    }

    pub fn pattern(&self, members: &[VertexId]) -> Option<u64> {
        members.iter().try_fold(0u64, |acc, v| {
            self.ground
                .iter()
                .position(|g| g == v)
                .map(|i| acc | 1 << i)
        })
    }

    /// Number of subsets of the ground set.
    pub fn subset_count(&self) -> u128 {
        1u128 << self.ground.len()
    }

    /// Half the L1 distance; both sides must share the ground order.
    pub fn total_variation(&self, other: &SubsetDistribution) -> Result<f64> {
        if self.ground != other.ground {
            return Err(Error::Input("ground sets differ".into()));
        }
        let mut sum = 0.0;
        for (&k, &p) in &self.mass {
            sum += (p - other.mass(k)).abs();
        }
        for (&k, &q) in &other.mass {
            if !self.mass.contains_key(&k) {
                sum += q;
            }
        }
        Ok(sum / 2.0)
    }
}

fn full_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Outside neighbours `v` of `sources` within `remaining`, each with the
/// probability `p_v` that some edge points from `sources` to `v`. Edges with
/// both ends in `sources` play no role. Sorted by vertex id.
fn out_probabilities(graph: &Graph, remaining: u64, sources: u64) -> Vec<(VertexId, f64)> {
    let outside = remaining & !sources;
    let mut into_sources: BTreeMap<VertexId, f64> = BTreeMap::new();
    for s in mask_members(sources) {
        for &(w, e) in graph.incident(s) {
            if outside >> w & 1 == 0 {
                continue;
            }
            let edge = graph.edge(e);
            let outward = if edge.low == s {
                edge.bias
            } else {
                1.0 - edge.bias
            };
            *into_sources.entry(w).or_insert(1.0) *= 1.0 - outward;
        }
    }
    into_sources
        .into_iter()
        .map(|(v, q)| (v, 1.0 - q))
        .collect()
}

/// Marginals `(v, p_v)` of the out-neighbourhood `O_S` in the whole graph.
pub fn out_neighborhood_marginals(
    graph: &Graph,
    sources: &[VertexId],
) -> Result<Vec<(VertexId, f64)>> {
    if sources.is_empty() {
        return Err(Error::Input("source set is empty".into()));
    }
    let src = vertex_mask(graph, sources)?;
    Ok(out_probabilities(graph, full_mask(graph.vertex_count()), src))
}

pub fn out_neighborhood_distribution(
    graph: &Graph,
    sources: &[VertexId],
) -> Result<SubsetDistribution> {
    out_neighborhood_distribution_with(graph, sources, Limits::default())
}

/// Law of `O_S`: the product measure with marginals `p_v` over subsets of
/// `T`. Ground order is increasing vertex id.
pub fn out_neighborhood_distribution_with(
    graph: &Graph,
    sources: &[VertexId],
    limits: Limits,
) -> Result<SubsetDistribution> {
    let marginals = out_neighborhood_marginals(graph, sources)?;
    let k = marginals.len();
    if k >= 63 || (1usize << k) > limits.state_cap {
        return Err(Error::StateCap {
            cap: limits.state_cap,
        });
    }
    let probs: Vec<f64> = marginals.iter().map(|&(_, p)| p).collect();
    let mut mass = BTreeMap::new();
    for pattern in 0..(1u64 << k) {
        mass.insert(pattern, product_mass(&probs, pattern));
    }
    Ok(SubsetDistribution {
        ground: marginals.into_iter().map(|(v, _)| v).collect(),
        mass,
    })
}

#[inline]
fn product_mass(probs: &[f64], pattern: u64) -> f64 {
    probs
        .iter()
        .enumerate()
        .map(|(i, &p)| if pattern >> i & 1 == 1 { p } else { 1.0 - p })
        .product()
}

/// Memoized recursive evaluator for one graph. The memo persists across
/// queries on the same engine; results are identical to fresh evaluation.
#[derive(Debug)]
pub struct ExactEngine<'g> {
    graph: &'g Graph,
    limits: Limits,
    neighbours: Vec<u64>,
    memo: HashMap<(u64, u64, u64), f64>,
}

impl<'g> ExactEngine<'g> {
    pub fn new(graph: &'g Graph) -> Result<Self> {
        Self::with_limits(graph, Limits::default())
    }

    pub fn with_limits(graph: &'g Graph, limits: Limits) -> Result<Self> {
        check_vertex_cap(graph)?;
        let mut neighbours = vec![0u64; graph.vertex_count()];
        for e in graph.edges() {
            neighbours[e.low] |= 1 << e.high;
            neighbours[e.high] |= 1 << e.low;
        }
        Ok(ExactEngine {
            graph,
            limits,
            neighbours,
            memo: HashMap::new(),
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn all_vertices(&self) -> u64 {
        full_mask(self.graph.vertex_count())
    }

    /// Memoized subproblems so far.
    pub fn states(&self) -> usize {
        self.memo.len()
    }

    pub fn connection(&mut self, sources: &[VertexId], target: VertexId) -> Result<ExactResult> {
        self.conjunction(sources, &[target])
    }

    pub fn joint(&mut self, sources: &[VertexId], a: VertexId, b: VertexId) -> Result<ExactResult> {
        self.conjunction(sources, &[a, b])
    }

    /// `P(sources → t for every t in targets)`.
    pub fn conjunction(&mut self, sources: &[VertexId], targets: &[VertexId]) -> Result<ExactResult> {
        if sources.is_empty() {
            return Err(Error::Input("source set is empty".into()));
        }
        let src = vertex_mask(self.graph, sources)?;
        let tgt = vertex_mask(self.graph, targets)?;
        let before = self.memo.len();
        let p = self.solve(self.all_vertices(), src, tgt)?;
        Ok(ExactResult {
            probability: clamp_probability(p),
            method: Method::Recursion,
            states_visited: (self.memo.len() - before) as u64,
        })
    }

    /// Probability, in the graph induced on `remaining`, that `sources`
    /// reaches every vertex of `targets`. Masks are over vertex ids; both
    /// `sources` and `targets` must lie inside `remaining`. An empty source
    /// set reaches nothing.
    pub fn probability_within(&mut self, remaining: u64, sources: u64, targets: u64) -> Result<f64> {
        let all = self.all_vertices();
        if remaining & !all != 0 || (sources | targets) & !remaining != 0 {
            return Err(Error::Precondition(
                "sources and targets must lie inside the remaining vertex set".into(),
            ));
        }
        Ok(clamp_probability(self.solve(remaining, sources, targets)?))
    }

    fn component(&self, remaining: u64, seed: u64) -> u64 {
        let mut comp = seed;
        let mut frontier = seed;
        while frontier != 0 {
            let mut next = 0;
            for v in mask_members(frontier) {
                next |= self.neighbours[v];
            }
            frontier = next & remaining & !comp;
            comp |= frontier;
        }
        comp
    }

    fn solve(&mut self, remaining: u64, sources: u64, targets: u64) -> Result<f64> {
        let targets = targets & !sources;
        if targets == 0 {
            return Ok(1.0);
        }
        if sources == 0 {
            return Ok(0.0);
        }
        // Vertices outside the undirected component of the sources never
        // matter; dropping them canonicalizes the key.
        let remaining = self.component(remaining, sources);
        if targets & !remaining != 0 {
            return Ok(0.0);
        }
        let key = (remaining, sources, targets);
        if let Some(&p) = self.memo.get(&key) {
            return Ok(p);
        }

        let marginals = out_probabilities(self.graph, remaining, sources);
        let k = marginals.len();
        if k >= 63 || (1usize << k) > self.limits.state_cap {
            return Err(Error::StateCap {
                cap: self.limits.state_cap,
            });
        }
        let probs: Vec<f64> = marginals.iter().map(|&(_, p)| p).collect();
        let rest = remaining & !sources;

        let mut total = 0.0;
        // pattern 0 (O_S empty) contributes nothing: targets lie outside S
        for pattern in 1..(1u64 << k) {
            let mass = product_mass(&probs, pattern);
            if mass == 0.0 {
                continue;
            }
            let next_sources = mask_members(pattern).fold(0u64, |m, i| m | 1 << marginals[i].0);
            total += mass * self.solve(rest, next_sources, targets)?;
        }

        if self.memo.len() >= self.limits.state_cap {
            return Err(Error::StateCap {
                cap: self.limits.state_cap,
            });
        }
        self.memo.insert(key, total);
        Ok(total)
    }
}

pub fn exact_connection_prob(
    graph: &Graph,
    sources: &[VertexId],
    target: VertexId,
) -> Result<ExactResult> {
    ExactEngine::new(graph)?.connection(sources, target)
}

pub fn exact_joint_prob(
    graph: &Graph,
    sources: &[VertexId],
    a: VertexId,
    b: VertexId,
) -> Result<ExactResult> {
    ExactEngine::new(graph)?.joint(sources, a, b)
}
