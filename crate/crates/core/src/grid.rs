//! Biased orientations of finite boxes of the square lattice.
//!
//! Vertex `(x, y)` has id `y * width + x`, so rightward and upward edges are
//! always low → high and a single bias realizes "right/up with probability
//! p". Boxes have free boundary.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{holds, sample_orientation, EventExpr, Graph, Orientation, Reacher, VertexId};
use crate::monte_carlo::{run_streams, McConfig};
use crate::rng::RandomStream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    /// Probability of the rightward / upward direction.
    pub bias: f64,
}

impl GridSpec {
    pub fn new(width: usize, height: usize, bias: f64) -> Self {
        GridSpec {
            width,
            height,
            bias,
        }
    }

    pub fn id(&self, x: usize, y: usize) -> VertexId {
        y * self.width + x
    }

    pub fn coords(&self, v: VertexId) -> (usize, usize) {
        (v % self.width, v / self.width)
    }

    pub fn vertex_count(&self) -> usize {
        self.width * self.height
    }

    pub fn edge_count(&self) -> usize {
        self.width * (self.height - 1) + (self.width - 1) * self.height
    }

    /// Axis of the edge `low`–`high` of this grid.
    pub fn axis(&self, low: VertexId, high: VertexId) -> Axis {
        if high == low + 1 && low / self.width == high / self.width {
            Axis::Horizontal
        } else {
            Axis::Vertical
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub spec: GridSpec,
    pub graph: Graph,
}

impl Grid {
    pub fn id(&self, x: usize, y: usize) -> VertexId {
        self.spec.id(x, y)
    }

    pub fn coords(&self, v: VertexId) -> (usize, usize) {
        self.spec.coords(v)
    }
}

/// Edges in id order of the lower endpoint: for each vertex its rightward
/// edge, then its upward edge.
pub fn build_grid(spec: GridSpec) -> Result<Grid> {
    if spec.width == 0 || spec.height == 0 {
        return Err(Error::Input(format!(
            "grid dimensions must be positive, got {}x{}",
            spec.width, spec.height
        )));
    }
    if !(0.0..=1.0).contains(&spec.bias) {
        return Err(Error::Input(format!("bias {} outside [0, 1]", spec.bias)));
    }
    let mut edges = Vec::with_capacity(spec.edge_count());
    for y in 0..spec.height {
        for x in 0..spec.width {
            if x + 1 < spec.width {
                edges.push((spec.id(x, y), spec.id(x + 1, y), spec.bias));
            }
            if y + 1 < spec.height {
                edges.push((spec.id(x, y), spec.id(x, y + 1), spec.bias));
            }
        }
    }
    let graph = Graph::new(spec.vertex_count(), edges)?;
    Ok(Grid { spec, graph })
}

/// Reachability statistics from one origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridStats {
    pub p: f64,
    pub width: usize,
    pub height: usize,
    pub samples: u64,
    pub seed: u64,
    pub mean_reach: f64,
    pub max_reach: u64,
    pub mean_radius: f64,
    pub max_radius: u64,
    /// Fraction of samples whose reachable set meets `x = width-1` or
    /// `y = height-1`.
    pub boundary_frac: f64,
    /// Standard error of `mean_reach`; not part of the CSV row.
    #[serde(default)]
    pub reach_std_error: f64,
    /// Standard error of `boundary_frac`; not part of the CSV row.
    #[serde(default)]
    pub boundary_std_error: f64,
}

impl GridStats {
    pub const CSV_HEADER: &'static str =
        "p,width,height,samples,seed,mean_reach,max_reach,mean_radius,max_radius,boundary_frac";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.p,
            self.width,
            self.height,
            self.samples,
            self.seed,
            self.mean_reach,
            self.max_reach,
            self.mean_radius,
            self.max_radius,
            self.boundary_frac
        )
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct ReachTally {
    sum: u64,
    sum_sq: u128,
    max: u64,
    radius_sum: u64,
    radius_max: u64,
    boundary: u64,
}

impl ReachTally {
    fn merge(self, o: ReachTally) -> ReachTally {
        ReachTally {
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
            max: self.max.max(o.max),
            radius_sum: self.radius_sum + o.radius_sum,
            radius_max: self.radius_max.max(o.radius_max),
            boundary: self.boundary + o.boundary,
        }
    }
}

pub fn grid_reach_stats(spec: GridSpec, origin: VertexId, config: McConfig) -> Result<GridStats> {
    let grid = build_grid(spec)?;
    grid.graph.check_vertex(origin)?;
    if config.samples == 0 || config.streams == 0 {
        return Err(Error::Input("need at least one sample and one stream".into()));
    }
    let (ox, oy) = spec.coords(origin);
    let tally = run_streams(
        &grid.graph,
        config,
        ReachTally::default,
        |t, reacher, _, o| {
            let reach = reacher.reach(&grid.graph, o, &[origin]);
            let mut size = 0u64;
            let mut radius = 0u64;
            let mut boundary = false;
            for v in reach.iter() {
                let (x, y) = spec.coords(v);
                size += 1;
                radius = radius.max(x.abs_diff(ox).max(y.abs_diff(oy)) as u64);
                boundary |= x + 1 == spec.width || y + 1 == spec.height;
            }
            t.sum += size;
            t.sum_sq += (size as u128) * (size as u128);
            t.max = t.max.max(size);
            t.radius_sum += radius;
            t.radius_max = t.radius_max.max(radius);
            t.boundary += boundary as u64;
        },
        ReachTally::merge,
    );
    let n = config.samples as f64;
    let mean = tally.sum as f64 / n;
    let var = if config.samples > 1 {
        ((tally.sum_sq as f64 - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let frac = tally.boundary as f64 / n;
    Ok(GridStats {
        p: spec.bias,
        width: spec.width,
        height: spec.height,
        samples: config.samples,
        seed: config.seed,
        mean_reach: mean,
        max_reach: tally.max,
        mean_radius: tally.radius_sum as f64 / n,
        max_radius: tally.radius_max,
        boundary_frac: frac,
        reach_std_error: (var / n).sqrt(),
        boundary_std_error: (frac * (1.0 - frac) / n).sqrt(),
    })
}

/// Direction an edge is switched to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipDirection {
    /// Make the edge point low → high (rightward / upward on a grid).
    TowardHigh,
    /// Make the edge point high → low (leftward / downward on a grid).
    TowardLow,
}

impl FlipDirection {
    pub fn low_to_high(self) -> bool {
        self == FlipDirection::TowardHigh
    }
}

impl FromStr for FlipDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "toward-high" | "high" => Ok(FlipDirection::TowardHigh),
            "toward-low" | "low" => Ok(FlipDirection::TowardLow),
            _ => Err(Error::Input(format!("bad flip direction `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// A flip direction optionally restricted to one edge axis: `right` is
/// toward-high on horizontal edges, `up` toward-high on vertical ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridFlip {
    pub direction: FlipDirection,
    pub axis: Option<Axis>,
}

impl GridFlip {
    pub const RIGHT: GridFlip = GridFlip {
        direction: FlipDirection::TowardHigh,
        axis: Some(Axis::Horizontal),
    };
    pub const LEFT: GridFlip = GridFlip {
        direction: FlipDirection::TowardLow,
        axis: Some(Axis::Horizontal),
    };
}

impl FromStr for GridFlip {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (direction, axis) = match s {
            "right" => (FlipDirection::TowardHigh, Some(Axis::Horizontal)),
            "left" => (FlipDirection::TowardLow, Some(Axis::Horizontal)),
            "up" => (FlipDirection::TowardHigh, Some(Axis::Vertical)),
            "down" => (FlipDirection::TowardLow, Some(Axis::Vertical)),
            other => (other.parse()?, None),
        };
        Ok(GridFlip { direction, axis })
    }
}

impl fmt::Display for FlipDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlipDirection::TowardHigh => "toward-high",
            FlipDirection::TowardLow => "toward-low",
        })
    }
}

/// An orientation in which `a → b` holds, and an edge whose switch to
/// `flip_direction` destroys it: `a → b` is not increasing in that
/// direction of that edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(with = "orientation_bits")]
    pub orientation: Orientation,
    pub edge: usize,
    pub flip_direction: FlipDirection,
    pub a: VertexId,
    pub b: VertexId,
}

impl Witness {
    /// Checks every witness condition against `graph`.
    pub fn new(
        graph: &Graph,
        orientation: Orientation,
        edge: usize,
        flip_direction: FlipDirection,
        a: VertexId,
        b: VertexId,
    ) -> Result<Witness> {
        let w = Witness {
            orientation,
            edge,
            flip_direction,
            a,
            b,
        };
        w.verify(graph)?;
        Ok(w)
    }

    pub fn flipped(&self) -> Orientation {
        let mut o = self.orientation.clone();
        o.set(self.edge, self.flip_direction.low_to_high());
        o
    }

    pub fn verify(&self, graph: &Graph) -> Result<()> {
        if self.edge >= graph.edge_count() {
            return Err(Error::Input(format!("edge {} out of range", self.edge)));
        }
        let event = EventExpr::connection(&[self.a], self.b)?;
        let fail = |why: &str| Err(Error::Precondition(format!("not a witness: {why}")));
        if self.orientation.low_to_high(self.edge) == self.flip_direction.low_to_high() {
            return fail("edge already points in the flip direction");
        }
        if !holds(graph, &self.orientation, &event)? {
            return fail("a does not reach b before the flip");
        }
        if holds(graph, &self.flipped(), &event)? {
            return fail("a still reaches b after the flip");
        }
        Ok(())
    }
}

mod orientation_bits {
    use super::Orientation;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(o: &Orientation, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&o.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Orientation, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(serde::de::Error::custom(format!("bad orientation bit `{c}`"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Orientation::new)
    }
}

/// Outcome of a witness search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSearch {
    pub witness: Option<Witness>,
    /// Orientations sampled (including the successful one).
    pub attempts: u64,
}

/// Samples orientations from stream 0 of `seed` in order; for each where
/// `a → b` holds, scans the edges allowed by `flip` in index order for one
/// whose switch breaks `a → b`. Returns the first hit.
pub fn find_nonmonotonicity_witness(
    spec: GridSpec,
    a: VertexId,
    b: VertexId,
    flip: GridFlip,
    budget: u64,
    seed: u64,
) -> Result<WitnessSearch> {
    let grid = build_grid(spec)?;
    let allowed = |e: usize| {
        let edge = grid.graph.edge(e);
        flip.axis.is_none_or(|axis| spec.axis(edge.low, edge.high) == axis)
    };
    find_witness_in(&grid.graph, a, b, flip.direction, allowed, budget, seed)
}

/// Same search on an arbitrary graph, over edges accepted by `allowed`.
pub fn find_witness_in<F>(
    graph: &Graph,
    a: VertexId,
    b: VertexId,
    flip_direction: FlipDirection,
    allowed: F,
    budget: u64,
    seed: u64,
) -> Result<WitnessSearch>
where
    F: Fn(usize) -> bool,
{
    graph.check_vertex(a)?;
    graph.check_vertex(b)?;
    if budget == 0 {
        return Err(Error::Input("attempt budget must be at least 1".into()));
    }
    let target = flip_direction.low_to_high();
    let mut stream = RandomStream::new(seed, 0);
    let mut reacher = Reacher::new(graph);
    for attempt in 1..=budget {
        let mut o = sample_orientation(graph, &mut stream);
        if !reacher.reach(graph, &o, &[a]).contains(b) {
            continue;
        }
        for e in 0..graph.edge_count() {
            if o.low_to_high(e) == target || !allowed(e) {
                continue;
            }
            o.set(e, target);
            let broken = !reacher.reach(graph, &o, &[a]).contains(b);
            o.set(e, !target);
            if broken {
                let witness = Witness::new(graph, o, e, flip_direction, a, b)?;
                return Ok(WitnessSearch {
                    witness: Some(witness),
                    attempts: attempt,
                });
            }
        }
    }
    Ok(WitnessSearch {
        witness: None,
        attempts: budget,
    })
}
