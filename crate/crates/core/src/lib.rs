//! Connection probabilities in biased random orientations of finite graphs.
//!
//! Each edge `{u, v}` with `u < v` is oriented `u → v` with its own bias and
//! `v → u` otherwise, independently of the other edges. The crate computes
//! probabilities of connection events (`S → t`, and conjunctions of them)
//! exactly, estimates them by seeded Monte Carlo, and checks the positive
//! correlation `P(S→a ∩ S→b) ≥ P(S→a)·P(S→b)` together with the set-function
//! machinery behind it on concrete instances.

pub mod cli;
pub mod error;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod grid;
pub mod inequality;
pub mod monte_carlo;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{
    holds, reachable_set, sample_orientation, Atom, Edge, EventExpr, Graph, Orientation, Reacher,
    VertexId, VertexSet,
};
