//! Seeded Monte Carlo estimation.
//!
//! Sample `i` is drawn from stream `i mod streams` at counter
//! `i div streams`, and every accumulator is an integer count, so a report
//! depends only on `(graph, query, samples, seed, streams)` and never on how
//! rayon schedules the streams.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{sample_orientation, EventExpr, Graph, Orientation, Reacher, VertexId};
use crate::rng::RandomStream;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Batches used for the batch-means standard error of slack estimates.
pub const SLACK_BATCHES: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub streams: u64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64, streams: u64) -> Self {
        McConfig {
            samples,
            seed,
            streams,
        }
    }

    fn check(&self, min_samples: u64) -> Result<()> {
        if self.samples < min_samples {
            return Err(Error::Input(format!(
                "need at least {min_samples} samples, got {}",
                self.samples
            )));
        }
        if self.streams == 0 {
            return Err(Error::Input("stream count must be positive".into()));
        }
        Ok(())
    }
}

/// Runs `visit` on every sample index with its orientation. Each stream is
/// handled by one rayon task with its own accumulator; partial accumulators
/// are combined with `merge`, which must be commutative and associative.
pub fn run_streams<A, I, V, M>(graph: &Graph, config: McConfig, init: I, visit: V, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, &mut Reacher, u64, &Orientation) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    let McConfig {
        samples,
        seed,
        streams,
    } = config;
    (0..streams.min(samples.max(1)))
        .into_par_iter()
        .map(|s| {
            let mut acc = init();
            let mut rng = RandomStream::new(seed, s);
            let mut reacher = Reacher::new(graph);
            let mut i = s;
            while i < samples {
                let o = sample_orientation(graph, &mut rng);
                visit(&mut acc, &mut reacher, i, &o);
                i += streams;
            }
            acc
        })
        .reduce(&init, &merge)
}

/// Orientation for global sample index `i`, reconstructed directly.
pub fn orientation_at(graph: &Graph, config: McConfig, i: u64) -> Orientation {
    let counter = i / config.streams;
    let mut rng = RandomStream::at(
        config.seed,
        i % config.streams,
        counter * graph.edge_count() as u64,
    );
    sample_orientation(graph, &mut rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub samples: u64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    pub seed: u64,
    pub streams: u64,
}

impl EstimateReport {
    fn bernoulli(hits: u64, config: McConfig) -> Self {
        let n = config.samples as f64;
        let estimate = hits as f64 / n;
        let std_error = (estimate * (1.0 - estimate) / n).sqrt();
        let half = Z95 * std_error;
        EstimateReport {
            estimate,
            samples: config.samples,
            std_error,
            ci95: ((estimate - half).max(0.0), (estimate + half).min(1.0)),
            seed: config.seed,
            streams: config.streams,
        }
    }
}

pub fn estimate_event(graph: &Graph, event: &EventExpr, config: McConfig) -> Result<EstimateReport> {
    config.check(1)?;
    event.validate(graph)?;
    let hits = run_streams(
        graph,
        config,
        || 0u64,
        |hits, reacher, _, o| {
            if event.holds_with(reacher, graph, o) {
                *hits += 1;
            }
        },
        |a, b| a + b,
    );
    Ok(EstimateReport::bernoulli(hits, config))
}

/// Paired estimate of `P(A ∩ B) - P(A)·P(B)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackEstimate {
    pub slack: f64,
    /// Batch-means standard error.
    pub std_error: f64,
    pub p_first: f64,
    pub p_second: f64,
    pub p_both: f64,
    pub samples: u64,
    pub batches: u64,
    pub seed: u64,
    pub streams: u64,
}

impl SlackEstimate {
    pub fn ci95(&self) -> (f64, f64) {
        (self.slack - Z95 * self.std_error, self.slack + Z95 * self.std_error)
    }
}

/// Per-batch counts: samples, first, second, both.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct PairCounts {
    pub n: u64,
    pub first: u64,
    pub second: u64,
    pub both: u64,
}

impl PairCounts {
    pub fn add(&mut self, first: bool, second: bool) {
        self.n += 1;
        self.first += first as u64;
        self.second += second as u64;
        self.both += (first && second) as u64;
    }

    pub fn merge(&mut self, other: &PairCounts) {
        self.n += other.n;
        self.first += other.first;
        self.second += other.second;
        self.both += other.both;
    }

    fn slack(&self) -> f64 {
        let n = self.n as f64;
        let (pf, ps, pb) = (self.first as f64 / n, self.second as f64 / n, self.both as f64 / n);
        pb - pf * ps
    }
}

pub(crate) fn batch_count(samples: u64) -> u64 {
    SLACK_BATCHES.min(samples)
}

/// Batch of sample `i`: contiguous, near-equal blocks of the index range.
#[inline]
pub(crate) fn batch_of(i: u64, samples: u64, batches: u64) -> usize {
    (i as u128 * batches as u128 / samples as u128) as usize
}

pub(crate) fn summarize_batches(batches: &[PairCounts], config: McConfig) -> SlackEstimate {
    let mut total = PairCounts::default();
    for b in batches {
        total.merge(b);
    }
    let n = total.n as f64;
    let slack = total.slack();
    let k = batches.len() as f64;
    let per_batch: Vec<f64> = batches.iter().map(PairCounts::slack).collect();
    let mean = per_batch.iter().sum::<f64>() / k;
    let var = per_batch.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    SlackEstimate {
        slack,
        std_error: (var / k).sqrt(),
        p_first: total.first as f64 / n,
        p_second: total.second as f64 / n,
        p_both: total.both as f64 / n,
        samples: config.samples,
        batches: batches.len() as u64,
        seed: config.seed,
        streams: config.streams,
    }
}

/// Paired covariance estimate of two events from the same orientations.
pub fn estimate_covariance(
    graph: &Graph,
    first: &EventExpr,
    second: &EventExpr,
    config: McConfig,
) -> Result<SlackEstimate> {
    config.check(2)?;
    first.validate(graph)?;
    second.validate(graph)?;
    let batches = batch_count(config.samples);
    let counts = run_streams(
        graph,
        config,
        || vec![PairCounts::default(); batches as usize],
        |acc, reacher, i, o| {
            let f = first.holds_with(reacher, graph, o);
            let s = second.holds_with(reacher, graph, o);
            acc[batch_of(i, config.samples, batches)].add(f, s);
        },
        merge_counts,
    );
    Ok(summarize_batches(&counts, config))
}

pub(crate) fn merge_counts(mut a: Vec<PairCounts>, b: Vec<PairCounts>) -> Vec<PairCounts> {
    for (x, y) in a.iter_mut().zip(&b) {
        x.merge(y);
    }
    a
}

/// Slack of `S → a` and `S → b` from one reachability pass per sample.
pub fn estimate_slack(
    graph: &Graph,
    sources: &[VertexId],
    a: VertexId,
    b: VertexId,
    config: McConfig,
) -> Result<SlackEstimate> {
    config.check(2)?;
    let joint = EventExpr::joint(sources, a, b)?;
    joint.validate(graph)?;
    let batches = batch_count(config.samples);
    let counts = run_streams(
        graph,
        config,
        || vec![PairCounts::default(); batches as usize],
        |acc, reacher, i, o| {
            let reach = reacher.reach(graph, o, sources);
            acc[batch_of(i, config.samples, batches)].add(reach.contains(a), reach.contains(b));
        },
        merge_counts,
    );
    Ok(summarize_batches(&counts, config))
}
