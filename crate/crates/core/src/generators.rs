//! Built-in graph generators for sweeps.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::RandomStream;

/// How edge biases are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BiasPolicy {
    Constant(f64),
    /// Independent uniform draw in `[0, 1)` per edge.
    Uniform,
}

impl BiasPolicy {
    fn draw(&self, stream: &mut RandomStream) -> f64 {
        match *self {
            BiasPolicy::Constant(p) => p,
            BiasPolicy::Uniform => stream.uniform(),
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            BiasPolicy::Constant(p) if !(0.0..=1.0).contains(&p) => {
                Err(Error::Input(format!("bias {p} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

impl FromStr for BiasPolicy {
    type Err = Error;

    /// `uniform`, `const:<p>` or a bare `<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "uniform" {
            return Ok(BiasPolicy::Uniform);
        }
        let number = s.strip_prefix("const:").unwrap_or(s);
        let p: f64 = number
            .parse()
            .map_err(|_| Error::Input(format!("bad bias policy `{s}`")))?;
        let policy = BiasPolicy::Constant(p);
        policy.check()?;
        Ok(policy)
    }
}

impl fmt::Display for BiasPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BiasPolicy::Constant(p) => write!(f, "const:{p}"),
            BiasPolicy::Uniform => f.write_str("uniform"),
        }
    }
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect()
}

pub fn complete_graph(n: usize, policy: BiasPolicy, stream: &mut RandomStream) -> Result<Graph> {
    policy.check()?;
    let edges: Vec<_> = all_pairs(n)
        .into_iter()
        .map(|(u, v)| (u, v, policy.draw(stream)))
        .collect();
    Graph::new(n, edges)
}

/// `m` distinct edges chosen uniformly among the `n(n-1)/2` pairs. Edge
/// order is increasing `(low, high)`.
pub fn random_gnm(
    n: usize,
    m: usize,
    policy: BiasPolicy,
    stream: &mut RandomStream,
) -> Result<Graph> {
    policy.check()?;
    let mut pairs = all_pairs(n);
    if m > pairs.len() {
        return Err(Error::Input(format!(
            "{m} edges requested but K_{n} has only {}",
            pairs.len()
        )));
    }
    // partial Fisher-Yates
    for i in 0..m {
        let j = i + stream.below(pairs.len() - i);
        pairs.swap(i, j);
    }
    let mut chosen = pairs[..m].to_vec();
    chosen.sort_unstable();
    let edges: Vec<_> = chosen
        .into_iter()
        .map(|(u, v)| (u, v, policy.draw(stream)))
        .collect();
    Graph::new(n, edges)
}

/// Erdős–Rényi `G(n, p)`: each pair present independently with `edge_prob`.
pub fn random_gnp(
    n: usize,
    edge_prob: f64,
    policy: BiasPolicy,
    stream: &mut RandomStream,
) -> Result<Graph> {
    policy.check()?;
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::Input(format!(
            "edge probability {edge_prob} outside [0, 1]"
        )));
    }
    let mut edges = Vec::new();
    for (u, v) in all_pairs(n) {
        if stream.bernoulli(edge_prob) {
            edges.push((u, v, policy.draw(stream)));
        }
    }
    Graph::new(n, edges)
}

/// Random graph family, written `n=5,m=8` or `n=5,p=0.4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RandomFamily {
    Gnm { n: usize, m: usize },
    Gnp { n: usize, p: f64 },
}

impl RandomFamily {
    pub fn generate(&self, policy: BiasPolicy, stream: &mut RandomStream) -> Result<Graph> {
        match *self {
            RandomFamily::Gnm { n, m } => random_gnm(n, m, policy, stream),
            RandomFamily::Gnp { n, p } => random_gnp(n, p, policy, stream),
        }
    }
}

impl FromStr for RandomFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("bad random graph spec `{s}` (want n=<k>,m=<k> or n=<k>,p=<x>)"));
        let mut n = None;
        let mut m = None;
        let mut p = None;
        for part in s.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            match key.trim() {
                "n" => n = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
                "m" => m = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
                "p" => p = Some(value.trim().parse::<f64>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        match (n, m, p) {
            (Some(n), Some(m), None) => Ok(RandomFamily::Gnm { n, m }),
            (Some(n), None, Some(p)) => Ok(RandomFamily::Gnp { n, p }),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_counts() {
        let g = complete_graph(6, BiasPolicy::Constant(0.5), &mut RandomStream::new(0, 0)).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 15);
        assert!(g.edges().iter().all(|e| e.bias == 0.5));
    }

    #[test]
    fn gnm_is_seeded_and_exact() {
        let a = random_gnm(7, 12, BiasPolicy::Uniform, &mut RandomStream::new(5, 1)).unwrap();
        let b = random_gnm(7, 12, BiasPolicy::Uniform, &mut RandomStream::new(5, 1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edge_count(), 12);
        assert!(a.edges().iter().all(|e| (0.0..1.0).contains(&e.bias)));
        assert!(random_gnm(3, 4, BiasPolicy::Uniform, &mut RandomStream::new(5, 1)).is_err());
    }

    #[test]
    fn gnp_extremes() {
        let mut s = RandomStream::new(1, 0);
        assert_eq!(random_gnp(5, 0.0, BiasPolicy::Uniform, &mut s).unwrap().edge_count(), 0);
        assert_eq!(random_gnp(5, 1.0, BiasPolicy::Uniform, &mut s).unwrap().edge_count(), 10);
    }

    #[test]
    fn parse_specs() {
        assert_eq!("n=5,m=8".parse::<RandomFamily>().unwrap(), RandomFamily::Gnm { n: 5, m: 8 });
        assert_eq!("n=4, p=0.5".parse::<RandomFamily>().unwrap(), RandomFamily::Gnp { n: 4, p: 0.5 });
        assert!("n=5".parse::<RandomFamily>().is_err());
        assert!("n=5,m=2,p=0.1".parse::<RandomFamily>().is_err());
        assert_eq!("uniform".parse::<BiasPolicy>().unwrap(), BiasPolicy::Uniform);
        assert_eq!("const:0.25".parse::<BiasPolicy>().unwrap(), BiasPolicy::Constant(0.25));
        assert_eq!("0.75".parse::<BiasPolicy>().unwrap(), BiasPolicy::Constant(0.75));
        assert!("1.5".parse::<BiasPolicy>().is_err());
    }
}
