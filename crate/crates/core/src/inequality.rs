//! Concrete checks of the correlation inequality and the machinery behind it.
//!
//! * [`check_four_functions`] checks the four-functions hypothesis pairwise
//!   and its conclusion for any quadruple of set functions.
//! * [`build_proof_quadruple`] builds the quadruple obtained by conditioning
//!   on the out-neighbourhood `O_S`; its sums are the three connection
//!   probabilities and 1.
//! * [`verify_theorem_1`] / [`verify_theorem_2`] sweep vertex triples and
//!   source sets for negative slack.
//! * [`verify_mcdiarmid`] compares the reachable-set law of an unbiased
//!   orientation with the bond-percolation cluster law at density 1/2.
//! * [`alm_linusson_covariance`] computes `Cov(a→s, s→b)` on unbiased `K_n`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    brute_force_prob_with, check_edge_cap, check_vertex_cap, enumerate_reach_law, mask_members,
    out_neighborhood_distribution_with, vertex_mask, ExactEngine, Limits, SubsetDistribution,
};
use crate::generators::{complete_graph, BiasPolicy};
use crate::graph::{EventExpr, Graph, VertexId};
use crate::monte_carlo::{
    batch_count, batch_of, estimate_covariance, merge_counts, run_streams, summarize_batches,
    McConfig, PairCounts, Z95,
};
use crate::rng::RandomStream;

/// Largest ground set accepted by [`check_four_functions`].
pub const MAX_FOUR_FUNCTIONS_GROUND: usize = 16;

/// Violations need at least this many standard errors below zero in Monte
/// Carlo mode.
pub const NOISE_SIGMAS: f64 = 4.0;

fn format_set(items: impl IntoIterator<Item = VertexId>) -> String {
    let mut out = String::from("{");
    for (i, v) in items.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
    out.push('}');
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub instance: String,
    pub slack: f64,
}

/// Slack estimate for one instance in Monte Carlo mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatedSlack {
    pub instance: String,
    pub estimate: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
}

/// Outcome of a sweep. `violations` is nonempty iff `min_slack` is below
/// `-tolerance`. An empty report has `instances_checked == 0` and
/// `min_slack == 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub instances_checked: u64,
    pub min_slack: f64,
    pub worst_instance: String,
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub estimates: Vec<EstimatedSlack>,
}

impl Default for VerificationReport {
    fn default() -> Self {
        VerificationReport {
            instances_checked: 0,
            min_slack: 0.0,
            worst_instance: String::new(),
            violations: Vec::new(),
            estimates: Vec::new(),
        }
    }
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one instance; `describe` runs only if the instance becomes
    /// the worst one or a violation.
    pub fn record<F: Fn() -> String>(&mut self, slack: f64, tolerance: f64, describe: F) {
        if self.instances_checked == 0 || slack < self.min_slack {
            self.min_slack = slack;
            self.worst_instance = describe();
        }
        self.instances_checked += 1;
        if slack < -tolerance {
            self.violations.push(Violation {
                instance: describe(),
                slack,
            });
        }
    }

    /// Minimum slack wins (ties keep `self`); violations and estimates are
    /// concatenated.
    pub fn merge(mut self, other: VerificationReport) -> VerificationReport {
        if other.instances_checked > 0
            && (self.instances_checked == 0 || other.min_slack < self.min_slack)
        {
            self.min_slack = other.min_slack;
            self.worst_instance = other.worst_instance;
        }
        self.instances_checked += other.instances_checked;
        self.violations.extend(other.violations);
        self.estimates.extend(other.estimates);
        self
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Four nonnegative functions on the subsets of `ground`, each stored as a
/// table indexed by bit pattern (bit `i` = `ground[i]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetFunctionQuadruple {
    ground: Vec<VertexId>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
    delta: Vec<f64>,
}

impl SetFunctionQuadruple {
    pub fn new(
        ground: Vec<VertexId>,
        alpha: Vec<f64>,
        beta: Vec<f64>,
        gamma: Vec<f64>,
        delta: Vec<f64>,
    ) -> Result<Self> {
        if ground.len() >= 32 {
            return Err(Error::Input(format!("ground set of {} elements is too large", ground.len())));
        }
        let size = 1usize << ground.len();
        for (name, table) in [("alpha", &alpha), ("beta", &beta), ("gamma", &gamma), ("delta", &delta)] {
            if table.len() != size {
                return Err(Error::Input(format!(
                    "{name} has {} values, expected {size}",
                    table.len()
                )));
            }
            if let Some((i, v)) = table.iter().enumerate().find(|(_, v)| **v < 0.0 || !v.is_finite()) {
                return Err(Error::Input(format!("{name}({i:#b}) = {v} is not a nonnegative real")));
            }
        }
        Ok(SetFunctionQuadruple {
            ground,
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    /// Quadruple given by closures over bit patterns.
    pub fn from_fn<F>(ground: Vec<VertexId>, mut f: F) -> Result<Self>
    where
        F: FnMut(u64) -> [f64; 4],
    {
        let size = 1u64 << ground.len().min(31);
        let (mut a, mut b, mut c, mut d) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for x in 0..size {
            let [va, vb, vc, vd] = f(x);
            a.push(va);
            b.push(vb);
            c.push(vc);
            d.push(vd);
        }
        Self::new(ground, a, b, c, d)
    }

    pub fn ground(&self) -> &[VertexId] {
        &self.ground
    }

    pub fn alpha(&self, x: u64) -> f64 {
        self.alpha[x as usize]
    }

    pub fn beta(&self, x: u64) -> f64 {
        self.beta[x as usize]
    }

    pub fn gamma(&self, x: u64) -> f64 {
        self.gamma[x as usize]
    }

    pub fn delta(&self, x: u64) -> f64 {
        self.delta[x as usize]
    }

    /// `[Σα, Σβ, Σγ, Σδ]`.
    pub fn sums(&self) -> [f64; 4] {
        [
            self.alpha.iter().sum(),
            self.beta.iter().sum(),
            self.gamma.iter().sum(),
            self.delta.iter().sum(),
        ]
    }

    fn describe(&self, x: u64) -> String {
        format_set(mask_members(x).map(|i| self.ground[i]))
    }
}

/// Checks `α(X₁)β(X₂) ≤ γ(X₁∪X₂)δ(X₁∩X₂)` for all ordered pairs and
/// `ΣαΣβ ≤ ΣγΣδ`. Slack is right-hand side minus left-hand side.
pub fn check_four_functions(q: &SetFunctionQuadruple, tolerance: f64) -> Result<VerificationReport> {
    let k = q.ground.len();
    if k > MAX_FOUR_FUNCTIONS_GROUND {
        return Err(Error::Precondition(format!(
            "ground set of {k} elements exceeds {MAX_FOUR_FUNCTIONS_GROUND}"
        )));
    }
    let size = 1u64 << k;
    let rows: Vec<VerificationReport> = (0..size)
        .into_par_iter()
        .map(|x1| {
            let mut row = VerificationReport::new();
            let a = q.alpha(x1);
            for x2 in 0..size {
                let slack = q.gamma(x1 | x2) * q.delta(x1 & x2) - a * q.beta(x2);
                row.record(slack, tolerance, || {
                    format!("hypothesis X1={} X2={}", q.describe(x1), q.describe(x2))
                });
            }
            row
        })
        .collect();
    let mut report = rows.into_iter().fold(VerificationReport::new(), VerificationReport::merge);
    let [sa, sb, sc, sd] = q.sums();
    report.record(sc * sd - sa * sb, tolerance, || "conclusion".to_string());
    Ok(report)
}

/// Number of hypothesis (pairwise) violations in a four-functions report.
pub fn hypothesis_violations(report: &VerificationReport) -> usize {
    report
        .violations
        .iter()
        .filter(|v| v.instance.starts_with("hypothesis"))
        .count()
}

pub fn build_proof_quadruple(
    graph: &Graph,
    sources: &[VertexId],
    a: VertexId,
    b: VertexId,
) -> Result<SetFunctionQuadruple> {
    build_proof_quadruple_with(graph, sources, a, b, Limits::default())
}

/// For `X ⊆ T` (outside neighbours of `S`), with `H = G - S`:
/// `α = P(O_S=X)·P_H(X→a)`, `β = P(O_S=X)·P_H(X→b)`,
/// `γ = P(O_S=X)·P_H(X→a ∩ X→b)`, `δ = P(O_S=X)`.
pub fn build_proof_quadruple_with(
    graph: &Graph,
    sources: &[VertexId],
    a: VertexId,
    b: VertexId,
    limits: Limits,
) -> Result<SetFunctionQuadruple> {
    let src = vertex_mask(graph, sources)?;
    graph.check_vertex(a)?;
    graph.check_vertex(b)?;
    if src >> a & 1 == 1 || src >> b & 1 == 1 {
        return Err(Error::Precondition(
            "targets must lie outside the source set".into(),
        ));
    }
    let law = out_neighborhood_distribution_with(graph, sources, limits)?;
    let mut engine = ExactEngine::with_limits(graph, limits)?;
    let rest = engine.all_vertices() & !src;
    let ground = law.ground().to_vec();
    let members = |x: u64| mask_members(x).fold(0u64, |m, i| m | 1 << ground[i]);

    let size = 1u64 << ground.len();
    let (mut al, mut be, mut ga, mut de) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for x in 0..size {
        let mass = law.mass(x);
        let xs = members(x);
        al.push(mass * engine.probability_within(rest, xs, 1 << a)?);
        be.push(mass * engine.probability_within(rest, xs, 1 << b)?);
        ga.push(mass * engine.probability_within(rest, xs, 1 << a | 1 << b)?);
        de.push(mass);
    }
    SetFunctionQuadruple::new(ground, al, be, ga, de)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum VerifyMode {
    Exact(Limits),
    MonteCarlo(McConfig),
}

/// Slack `P(s→a ∩ s→b) - P(s→a)P(s→b)` over all ordered triples.
///
/// In Monte Carlo mode each instance is recorded with its noise-adjusted
/// slack `estimate + 4·std_error`, so only estimates at least four standard
/// errors below zero can become violations; raw estimates with 95% intervals
/// are listed in `estimates`.
pub fn verify_theorem_1(
    graph: &Graph,
    mode: VerifyMode,
    tolerance: f64,
) -> Result<VerificationReport> {
    let n = graph.vertex_count();
    match mode {
        VerifyMode::Exact(limits) => {
            check_edge_cap(graph, limits.edge_cap)?;
            let mut engine = ExactEngine::with_limits(graph, limits)?;
            let single = single_source_table(&mut engine)?;
            let mut report = VerificationReport::new();
            for (s, row) in single.iter().enumerate() {
                for a in 0..n {
                    for b in 0..n {
                        let joint = engine.joint(&[s], a, b)?.probability;
                        let slack = joint - row[a] * row[b];
                        report.record(slack, tolerance, || format!("s={s} a={a} b={b}"));
                    }
                }
            }
            Ok(report)
        }
        VerifyMode::MonteCarlo(config) => monte_carlo_triples(graph, config, tolerance),
    }
}

fn single_source_table(engine: &mut ExactEngine<'_>) -> Result<Vec<Vec<f64>>> {
    let n = engine.graph().vertex_count();
    (0..n)
        .map(|s| {
            (0..n)
                .map(|t| engine.connection(&[s], t).map(|r| r.probability))
                .collect()
        })
        .collect()
}

fn monte_carlo_triples(
    graph: &Graph,
    config: McConfig,
    tolerance: f64,
) -> Result<VerificationReport> {
    if config.samples < 2 || config.streams == 0 {
        return Err(Error::Input(
            "Monte Carlo verification needs at least 2 samples and 1 stream".into(),
        ));
    }
    check_vertex_cap(graph)?;
    let n = graph.vertex_count();
    let batches = batch_count(config.samples) as usize;
    let cells = n * n * n;
    // counts[batch][(s * n + a) * n + b]
    let counts = run_streams(
        graph,
        config,
        || vec![PairCounts::default(); batches * cells],
        |acc, reacher, i, o| {
            let base = batch_of(i, config.samples, batches as u64) * cells;
            for s in 0..n {
                let reach = reacher.reach(graph, o, &[s]);
                let mask = reach.as_mask().unwrap_or(0);
                for a in 0..n {
                    let ra = mask >> a & 1 == 1;
                    for b in 0..n {
                        acc[base + (s * n + a) * n + b].add(ra, mask >> b & 1 == 1);
                    }
                }
            }
        },
        merge_counts,
    );

    let mut report = VerificationReport::new();
    for s in 0..n {
        for a in 0..n {
            for b in 0..n {
                let cell = (s * n + a) * n + b;
                let per_batch: Vec<PairCounts> =
                    (0..batches).map(|k| counts[k * cells + cell]).collect();
                let est = summarize_batches(&per_batch, config);
                let describe = || format!("s={s} a={a} b={b}");
                report.record(est.slack + NOISE_SIGMAS * est.std_error, tolerance, describe);
                report.estimates.push(EstimatedSlack {
                    instance: describe(),
                    estimate: est.slack,
                    std_error: est.std_error,
                    ci95: est.ci95(),
                });
            }
        }
    }
    Ok(report)
}

/// Which source sets a set-source sweep visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourcePolicy {
    /// Every nonempty subset with at most this many vertices.
    UpToSize(usize),
    /// `count` uniformly random nonempty subsets drawn from `seed`.
    Random { count: usize, seed: u64 },
}

impl SourcePolicy {
    pub fn source_sets(&self, n: usize) -> Vec<Vec<VertexId>> {
        match *self {
            SourcePolicy::UpToSize(k) => {
                let mut out = Vec::new();
                for size in 1..=k.min(n) {
                    combinations(n, size, &mut Vec::new(), 0, &mut out);
                }
                out
            }
            SourcePolicy::Random { count, seed } => {
                if n == 0 {
                    return Vec::new();
                }
                let mut stream = RandomStream::new(seed, 0);
                (0..count)
                    .map(|_| loop {
                        let set: Vec<_> = (0..n).filter(|_| stream.bernoulli(0.5)).collect();
                        if !set.is_empty() {
                            break set;
                        }
                    })
                    .collect()
            }
        }
    }
}

fn combinations(n: usize, size: usize, cur: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if cur.len() == size {
        out.push(cur.clone());
        return;
    }
    for v in start..n {
        cur.push(v);
        combinations(n, size, cur, v + 1, out);
        cur.pop();
    }
}

/// Slack `P(S→a ∩ S→b) - P(S→a)P(S→b)` over the policy's source sets and
/// all ordered target pairs, computed exactly.
pub fn verify_theorem_2(
    graph: &Graph,
    policy: SourcePolicy,
    limits: Limits,
    tolerance: f64,
) -> Result<VerificationReport> {
    check_edge_cap(graph, limits.edge_cap)?;
    let n = graph.vertex_count();
    let mut engine = ExactEngine::with_limits(graph, limits)?;
    let mut report = VerificationReport::new();
    for set in policy.source_sets(n) {
        let single: Vec<f64> = (0..n)
            .map(|t| engine.connection(&set, t).map(|r| r.probability))
            .collect::<Result<_>>()?;
        for a in 0..n {
            for b in 0..n {
                let joint = engine.joint(&set, a, b)?.probability;
                let slack = joint - single[a] * single[b];
                report.record(slack, tolerance, || {
                    format!("S={} a={a} b={b}", format_set(set.iter().copied()))
                });
            }
        }
    }
    Ok(report)
}

/// Law of the open cluster of `root` when each edge is open independently
/// with probability `density`; enumerates all edge subsets. Ground set is
/// every vertex in id order.
pub fn percolation_cluster_distribution(
    graph: &Graph,
    root: VertexId,
    density: f64,
    limits: Limits,
) -> Result<SubsetDistribution> {
    graph.check_vertex(root)?;
    check_vertex_cap(graph)?;
    check_edge_cap(graph, limits.edge_cap)?;
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Input(format!("density {density} outside [0, 1]")));
    }

    fn cluster(open: &[u64], root: usize) -> u64 {
        let mut comp = 1u64 << root;
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0;
            for v in mask_members(frontier) {
                next |= open[v];
            }
            frontier = next & !comp;
            comp |= next;
        }
        comp
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        graph: &Graph,
        e: usize,
        weight: f64,
        density: f64,
        root: usize,
        open: &mut [u64],
        mass: &mut BTreeMap<u64, f64>,
    ) {
        if e == graph.edge_count() {
            *mass.entry(cluster(open, root)).or_insert(0.0) += weight;
            return;
        }
        let edge = graph.edge(e);
        if density > 0.0 {
            open[edge.low] |= 1 << edge.high;
            open[edge.high] |= 1 << edge.low;
            descend(graph, e + 1, weight * density, density, root, open, mass);
            open[edge.low] &= !(1 << edge.high);
            open[edge.high] &= !(1 << edge.low);
        }
        if density < 1.0 {
            descend(graph, e + 1, weight * (1.0 - density), density, root, open, mass);
        }
    }

    let mut open = vec![0u64; graph.vertex_count()];
    let mut mass = BTreeMap::new();
    descend(graph, 0, 1.0, density, root, &mut open, &mut mass);
    SubsetDistribution::new((0..graph.vertex_count()).collect(), mass)
}

/// Total variation distance between the reachable-set law of `root` under
/// the uniformly random orientation and the cluster law of `root` in bond
/// percolation at density 1/2. The graph's own biases are ignored.
pub fn verify_mcdiarmid(graph: &Graph, root: VertexId, limits: Limits) -> Result<f64> {
    graph.check_vertex(root)?;
    let unbiased = graph.with_uniform_bias(0.5)?;
    let orientation_law = enumerate_reach_law(&unbiased, &[root], limits)?;
    let cluster_law = percolation_cluster_distribution(graph, root, 0.5, limits)?;
    orientation_law.total_variation(&cluster_law)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CovarianceMode {
    Exact(Limits),
    MonteCarlo(McConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub n: usize,
    pub s: VertexId,
    pub a: VertexId,
    pub b: VertexId,
    pub p_a_to_s: f64,
    pub p_s_to_b: f64,
    pub p_joint: f64,
    pub covariance: f64,
    /// Present in Monte Carlo mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci95: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
}

/// `Cov(1[a→s], 1[s→b])` on the unbiased complete graph with `s, a, b =
/// 0, 1, 2`. No sign is asserted.
pub fn alm_linusson_covariance(n: usize, mode: CovarianceMode) -> Result<CovarianceReport> {
    alm_linusson_covariance_for(n, 0, 1, 2, mode)
}

pub fn alm_linusson_covariance_for(
    n: usize,
    s: VertexId,
    a: VertexId,
    b: VertexId,
    mode: CovarianceMode,
) -> Result<CovarianceReport> {
    if n < 3 {
        return Err(Error::Input(format!("need n >= 3, got {n}")));
    }
    if s >= n || a >= n || b >= n || s == a || s == b || a == b {
        return Err(Error::Input("s, a, b must be distinct vertices of K_n".into()));
    }
    let kn = complete_graph(n, BiasPolicy::Constant(0.5), &mut RandomStream::new(0, 0))?;
    let into_s = EventExpr::connection(&[a], s)?;
    let out_of_s = EventExpr::connection(&[s], b)?;
    let mut report = CovarianceReport {
        n,
        s,
        a,
        b,
        p_a_to_s: 0.0,
        p_s_to_b: 0.0,
        p_joint: 0.0,
        covariance: 0.0,
        std_error: None,
        ci95: None,
        samples: None,
    };
    match mode {
        CovarianceMode::Exact(limits) => {
            let p1 = brute_force_prob_with(&kn, &into_s, limits)?.probability;
            let p2 = brute_force_prob_with(&kn, &out_of_s, limits)?.probability;
            let both = into_s.clone().and(out_of_s.clone());
            let pj = brute_force_prob_with(&kn, &both, limits)?.probability;
            report.p_a_to_s = p1;
            report.p_s_to_b = p2;
            report.p_joint = pj;
            report.covariance = pj - p1 * p2;
        }
        CovarianceMode::MonteCarlo(config) => {
            let est = estimate_covariance(&kn, &into_s, &out_of_s, config)?;
            report.p_a_to_s = est.p_first;
            report.p_s_to_b = est.p_second;
            report.p_joint = est.p_both;
            report.covariance = est.slack;
            report.std_error = Some(est.std_error);
            report.ci95 = Some((
                est.slack - Z95 * est.std_error,
                est.slack + Z95 * est.std_error,
            ));
            report.samples = Some(config.samples);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_connection_prob, exact_joint_prob};
    use crate::generators::random_gnm;
    use crate::graph::{reachable_set, Orientation};

    fn triangle() -> Graph {
        Graph::new(3, [(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.5)]).unwrap()
    }

    #[test]
    fn constant_quadruple_is_tight() {
        let q = SetFunctionQuadruple::from_fn(vec![0, 1], |_| [1.0; 4]).unwrap();
        let r = check_four_functions(&q, 0.0).unwrap();
        assert!(r.passed());
        assert_eq!(r.instances_checked, 17);
        assert_eq!(r.min_slack, 0.0);
        assert_eq!(q.sums(), [4.0; 4]);
    }

    #[test]
    fn zero_gamma_violates_everywhere() {
        let q = SetFunctionQuadruple::from_fn(vec![0, 1], |_| [1.0, 1.0, 0.0, 1.0]).unwrap();
        let r = check_four_functions(&q, 1e-12).unwrap();
        assert_eq!(hypothesis_violations(&r), 16);
        assert!(r.violations.iter().any(|v| v.instance == "hypothesis X1={} X2={}"));
        assert!(r.violations.iter().any(|v| v.instance == "conclusion"));
        assert_eq!(r.min_slack, -16.0);
        assert_eq!(r.worst_instance, "conclusion");
    }

    #[test]
    fn quadruple_rejects_bad_tables() {
        assert!(SetFunctionQuadruple::from_fn(vec![0], |_| [1.0, -0.5, 1.0, 1.0]).is_err());
        assert!(SetFunctionQuadruple::new(vec![0], vec![1.0], vec![1.0; 2], vec![1.0; 2], vec![1.0; 2]).is_err());
        let big = SetFunctionQuadruple::from_fn((0..17).collect(), |_| [0.0; 4]).unwrap();
        assert!(matches!(check_four_functions(&big, 0.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn triangle_proof_quadruple() {
        let q = build_proof_quadruple(&triangle(), &[0], 1, 2).unwrap();
        assert_eq!(q.ground(), &[1, 2]);
        for x in 0..4 {
            assert_eq!(q.delta(x), 0.25);
        }
        assert_eq!(q.gamma(0), 0.0);
        let [sa, sb, sc, sd] = q.sums();
        assert!((sa - 0.625).abs() < 1e-12);
        assert!((sb - 0.625).abs() < 1e-12);
        assert!((sc - 0.5).abs() < 1e-12);
        assert!((sd - 1.0).abs() < 1e-12);

        let r = check_four_functions(&q, 1e-12).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.instances_checked, 17);
    }

    /// Hand-derived triangle values: H = {1,2} with one fair edge.
    /// P_H({1}→1)=1, P_H({2}→1)=1/2, P_H({1}→1∩{1}→2)=1/2,
    /// P_H({1,2}→both)=1.
    #[test]
    fn triangle_quadruple_pointwise() {
        let q = build_proof_quadruple(&triangle(), &[0], 1, 2).unwrap();
        let (x1, x2, x12) = (0b01, 0b10, 0b11);
        assert_eq!(q.alpha(x1), 0.25);
        assert_eq!(q.alpha(x2), 0.125);
        assert_eq!(q.alpha(x12), 0.25);
        assert_eq!(q.gamma(x1), 0.125);
        assert_eq!(q.gamma(x2), 0.125);
        assert_eq!(q.gamma(x12), 0.25);
    }

    #[test]
    fn proof_quadruple_precondition() {
        assert!(matches!(
            build_proof_quadruple(&triangle(), &[0, 1], 1, 2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn single_source_sweep_on_triangle() {
        let r = verify_theorem_1(&triangle(), VerifyMode::Exact(Limits::default()), 1e-9).unwrap();
        assert!(r.passed());
        assert_eq!(r.instances_checked, 27);
        assert!(r.min_slack >= -1e-9);
        let t = triangle();
        let mut engine = ExactEngine::new(&t).unwrap();
        let slack = engine.joint(&[0], 1, 2).unwrap().probability
            - engine.connection(&[0], 1).unwrap().probability
                * engine.connection(&[0], 2).unwrap().probability;
        assert!((slack - 0.109375).abs() < 1e-15);
    }

    #[test]
    fn coincident_and_disconnected_triples_have_zero_slack() {
        let g = Graph::new(4, [(0, 1, 0.3), (1, 2, 0.8), (0, 2, 0.6)]).unwrap();
        let mut engine = ExactEngine::new(&g).unwrap();
        for b in 0..4 {
            let j = engine.joint(&[0], 0, b).unwrap().probability;
            let p = engine.connection(&[0], b).unwrap().probability;
            assert_eq!(j - 1.0 * p, 0.0);
        }
        let j = engine.joint(&[0], 3, 2).unwrap().probability;
        assert_eq!(j, 0.0);
        assert_eq!(exact_connection_prob(&g, &[0], 3).unwrap().probability, 0.0);
    }

    #[test]
    fn single_source_monte_carlo_flags_nothing() {
        let g = Graph::new(4, [(0, 1, 0.3), (1, 2, 0.8), (0, 2, 0.6), (2, 3, 0.1)]).unwrap();
        let r = verify_theorem_1(&g, VerifyMode::MonteCarlo(McConfig::new(20_000, 5, 4)), 1e-9).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert_eq!(r.estimates.len(), 64);
        let mut engine = ExactEngine::new(&g).unwrap();
        for est in &r.estimates {
            let nums: Vec<usize> = est
                .instance
                .split(' ')
                .map(|kv| kv[2..].parse().unwrap())
                .collect();
            let (s, a, b) = (nums[0], nums[1], nums[2]);
            let exact = engine.joint(&[s], a, b).unwrap().probability
                - engine.connection(&[s], a).unwrap().probability
                    * engine.connection(&[s], b).unwrap().probability;
            assert!((est.estimate - exact).abs() <= 5.0 * est.std_error + 1e-12, "{est:?} vs {exact}");
        }
    }

    #[test]
    fn set_source_sweep_trivial_cases() {
        let g = Graph::new(4, [(0, 1, 0.3), (1, 2, 0.8), (0, 2, 0.6), (2, 3, 0.1)]).unwrap();
        let all: Vec<usize> = (0..4).collect();
        let mut engine = ExactEngine::new(&g).unwrap();
        for a in 0..4 {
            assert_eq!(engine.connection(&all, a).unwrap().probability, 1.0);
        }
        // S ∋ a
        let j = exact_joint_prob(&g, &[0, 1], 1, 3).unwrap().probability;
        let p = exact_connection_prob(&g, &[0, 1], 3).unwrap().probability;
        assert_eq!(j - p, 0.0);

        let r = verify_theorem_2(&g, SourcePolicy::UpToSize(4), Limits::default(), 1e-9).unwrap();
        assert!(r.passed());
        assert_eq!(r.instances_checked, 15 * 16);
    }

    #[test]
    fn set_source_sweep_random_graphs() {
        for trial in 0..20 {
            let mut stream = RandomStream::new(77, trial);
            let n = 2 + stream.below(5);
            let m = stream.below(n * (n - 1) / 2 + 1);
            let g = random_gnm(n, m, BiasPolicy::Uniform, &mut stream).unwrap();
            let r = verify_theorem_2(&g, SourcePolicy::Random { count: 10, seed: trial }, Limits::default(), 1e-9).unwrap();
            assert!(r.min_slack >= -1e-9, "{r:?}");
        }
    }

    #[test]
    fn source_policies() {
        let sets = SourcePolicy::UpToSize(2).source_sets(4);
        assert_eq!(sets.len(), 4 + 6);
        assert_eq!(sets[4], vec![0, 1]);
        let r1 = SourcePolicy::Random { count: 5, seed: 3 }.source_sets(6);
        let r2 = SourcePolicy::Random { count: 5, seed: 3 }.source_sets(6);
        assert_eq!(r1, r2);
        assert!(r1.iter().all(|s| !s.is_empty()));
    }

    #[test]
    fn report_merge_is_order_independent_on_min() {
        let mut a = VerificationReport::new();
        a.record(0.5, 1e-9, || "a".into());
        let mut b = VerificationReport::new();
        b.record(-1.0, 1e-9, || "b".into());
        let ab = a.clone().merge(b.clone());
        let ba = b.merge(a);
        assert_eq!(ab.min_slack, ba.min_slack);
        assert_eq!(ab.worst_instance, "b");
        assert_eq!(ab.instances_checked, 2);
        assert_eq!(ab.violations.len(), 1);
        assert_eq!(VerificationReport::new().merge(ab.clone()), ab);
    }

    #[test]
    fn percolation_examples() {
        let isolated = Graph::new(2, []).unwrap();
        let d = percolation_cluster_distribution(&isolated, 0, 0.5, Limits::default()).unwrap();
        assert_eq!(d.mass_of(&[0]), 1.0);

        let path = Graph::new(3, [(0, 1, 0.9), (1, 2, 0.1)]).unwrap();
        let full = percolation_cluster_distribution(&path, 0, 1.0, Limits::default()).unwrap();
        assert_eq!(full.mass_of(&[0, 1, 2]), 1.0);

        let half = percolation_cluster_distribution(&path, 0, 0.5, Limits::default()).unwrap();
        assert_eq!(half.mass_of(&[0]), 0.5);
        assert_eq!(half.mass_of(&[0, 1]), 0.25);
        assert_eq!(half.mass_of(&[0, 1, 2]), 0.25);
    }

    #[test]
    fn mcdiarmid_examples() {
        let single = Graph::new(1, []).unwrap();
        assert_eq!(verify_mcdiarmid(&single, 0, Limits::default()).unwrap(), 0.0);

        let path = Graph::new(3, [(0, 1, 0.9), (1, 2, 0.1)]).unwrap();
        let law = enumerate_reach_law(&path.with_uniform_bias(0.5).unwrap(), &[0], Limits::default()).unwrap();
        assert_eq!(law.mass_of(&[0]), 0.5);
        assert_eq!(law.mass_of(&[0, 1]), 0.25);
        assert_eq!(law.mass_of(&[0, 1, 2]), 0.25);
        assert_eq!(verify_mcdiarmid(&path, 0, Limits::default()).unwrap(), 0.0);

        assert!(verify_mcdiarmid(&triangle(), 0, Limits::default()).unwrap() <= 1e-12);
    }

    #[test]
    fn biased_orientation_breaks_the_coupling() {
        // sanity check that the comparison can fail: with bias 0.9 the
        // orientation law differs from the percolation law
        let path = Graph::new(3, [(0, 1, 0.9), (1, 2, 0.9)]).unwrap();
        let law = enumerate_reach_law(&path, &[0], Limits::default()).unwrap();
        let perc = percolation_cluster_distribution(&path, 0, 0.5, Limits::default()).unwrap();
        assert!(law.total_variation(&perc).unwrap() > 0.1);
    }

    /// Independent enumeration over the 8 orientations of K3 for the
    /// complete-graph covariance.
    #[test]
    fn k3_covariance_oracle() {
        let k3 = triangle();
        let (s, a, b) = (0, 1, 2);
        let (mut pa, mut pb, mut pj) = (0.0, 0.0, 0.0);
        for mask in 0..8u64 {
            let o = Orientation::from_mask(mask, 3);
            let from_a = reachable_set(&k3, &o, &[a]).unwrap().contains(s);
            let from_s = reachable_set(&k3, &o, &[s]).unwrap().contains(b);
            pa += from_a as u8 as f64 / 8.0;
            pb += from_s as u8 as f64 / 8.0;
            pj += (from_a && from_s) as u8 as f64 / 8.0;
        }
        assert_eq!(pa, 0.625);
        assert_eq!(pb, 0.625);
        assert_eq!(pj - pa * pb, -1.0 / 64.0);

        let r = alm_linusson_covariance(3, CovarianceMode::Exact(Limits::default())).unwrap();
        assert!((r.covariance + 1.0 / 64.0).abs() < 1e-12);
        assert!((r.p_a_to_s - 0.625).abs() < 1e-12);
        assert!((r.p_s_to_b - 0.625).abs() < 1e-12);
    }

    #[test]
    fn covariance_is_label_invariant() {
        let base = alm_linusson_covariance(5, CovarianceMode::Exact(Limits::default())).unwrap();
        for (s, a, b) in [(4, 2, 0), (1, 3, 2), (2, 0, 4)] {
            let r = alm_linusson_covariance_for(5, s, a, b, CovarianceMode::Exact(Limits::default())).unwrap();
            assert!((r.covariance - base.covariance).abs() < 1e-12);
        }
    }

    #[test]
    fn covariance_rejects_small_n() {
        assert!(alm_linusson_covariance(2, CovarianceMode::Exact(Limits::default())).is_err());
        assert!(alm_linusson_covariance_for(4, 1, 1, 2, CovarianceMode::Exact(Limits::default())).is_err());
    }
}
