//! C ABI over `orient-core`.
//!
//! Graphs are opaque `OrientGraph` handles created by one of the
//! `orient_graph_*` constructors and released with `orient_graph_free`.
//! Every fallible call returns an `OrientStatus`; on failure the message is
//! available from `orient_last_error` on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use orient_core::exact::{brute_force_prob, ExactEngine, Limits};
use orient_core::generators::{complete_graph, BiasPolicy};
use orient_core::grid::{build_grid, GridSpec};
use orient_core::inequality::verify_mcdiarmid;
use orient_core::monte_carlo::{estimate_event, estimate_slack, McConfig};
use orient_core::rng::RandomStream;
use orient_core::{Error, EventExpr, Graph, VertexId};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrientStatus {
    Ok = 0,
    NullArgument = 1,
    Parse = 2,
    InvalidInput = 3,
    InvalidVertex = 4,
    ResourceLimit = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrientMethod {
    Recursion = 0,
    Enumeration = 1,
}

/// Opaque graph handle.
pub struct OrientGraph {
    graph: Graph,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OrientEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OrientSlack {
    pub slack: f64,
    pub std_error: f64,
    pub p_first: f64,
    pub p_second: f64,
    pub p_both: f64,
    pub samples: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> OrientStatus {
    match err {
        Error::Parse { .. } => OrientStatus::Parse,
        Error::InvalidVertex { .. } => OrientStatus::InvalidVertex,
        Error::Io(_) => OrientStatus::Io,
        e if e.is_resource() => OrientStatus::ResourceLimit,
        _ => OrientStatus::InvalidInput,
    }
}

struct Failure(OrientStatus, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure(status_of(&err), err.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(OrientStatus::NullArgument, format!("{what} is null"))
}

fn guard<F>(body: F) -> OrientStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            OrientStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            OrientStatus::Panic
        }
    }
}

unsafe fn graph_ref<'a>(g: *const OrientGraph) -> Result<&'a Graph, Failure> {
    g.as_ref().map(|h| &h.graph).ok_or_else(|| null("graph"))
}

unsafe fn vertices(ptr: *const usize, len: usize, what: &str) -> Result<Vec<VertexId>, Failure> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len).to_vec())
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn boxed(graph: Graph) -> *mut OrientGraph {
    Box::into_raw(Box::new(OrientGraph { graph }))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn orient_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn orient_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses an edge list (`u v bias` per line).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orient_graph_parse(
    text: *const c_char,
    out: *mut *mut OrientGraph,
) -> OrientStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Failure(OrientStatus::InvalidInput, "text is not UTF-8".into()))?;
        let graph = Graph::parse(text)?;
        write_out(out, boxed(graph))
    })
}

/// Builds a graph from parallel edge arrays of length `edge_count`.
///
/// # Safety
/// The three arrays must hold `edge_count` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orient_graph_new(
    vertex_count: usize,
    lows: *const usize,
    highs: *const usize,
    biases: *const f64,
    edge_count: usize,
    out: *mut *mut OrientGraph,
) -> OrientStatus {
    guard(|| {
        let edges = if edge_count == 0 {
            Vec::new()
        } else {
            if lows.is_null() || highs.is_null() || biases.is_null() {
                return Err(null("edge array"));
            }
            let lows = slice::from_raw_parts(lows, edge_count);
            let highs = slice::from_raw_parts(highs, edge_count);
            let biases = slice::from_raw_parts(biases, edge_count);
            (0..edge_count)
                .map(|i| (lows[i], highs[i], biases[i]))
                .collect()
        };
        let graph = Graph::new(vertex_count, edges)?;
        write_out(out, boxed(graph))
    })
}

/// Complete graph on `n` vertices with every bias equal to `bias`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orient_graph_complete(
    n: usize,
    bias: f64,
    out: *mut *mut OrientGraph,
) -> OrientStatus {
    guard(|| {
        let graph = complete_graph(n, BiasPolicy::Constant(bias), &mut RandomStream::new(0, 0))?;
        write_out(out, boxed(graph))
    })
}

/// `width × height` grid; vertex `(x, y)` has id `y * width + x` and `bias`
/// is the probability of the rightward/upward direction.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orient_graph_grid(
    width: usize,
    height: usize,
    bias: f64,
    out: *mut *mut OrientGraph,
) -> OrientStatus {
    guard(|| {
        let grid = build_grid(GridSpec::new(width, height, bias))?;
        write_out(out, boxed(grid.graph))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `graph` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn orient_graph_free(graph: *mut OrientGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn orient_graph_vertex_count(graph: *const OrientGraph) -> usize {
    graph.as_ref().map_or(0, |h| h.graph.vertex_count())
}

/// # Safety
/// `graph` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn orient_graph_edge_count(graph: *const OrientGraph) -> usize {
    graph.as_ref().map_or(0, |h| h.graph.edge_count())
}

/// Exact probability that some source reaches every target. One target
/// gives a connection probability, two a joint one.
///
/// # Safety
/// `graph` must be a live handle, the vertex arrays must hold the stated
/// number of elements, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orient_exact(
    graph: *const OrientGraph,
    method: OrientMethod,
    sources: *const usize,
    source_count: usize,
    targets: *const usize,
    target_count: usize,
    out: *mut f64,
) -> OrientStatus {
    guard(|| {
        let graph = graph_ref(graph)?;
        let sources = vertices(sources, source_count, "sources")?;
        let targets = vertices(targets, target_count, "targets")?;
        let event = conjunction_event(&sources, &targets)?;
        let prob = match method {
            OrientMethod::Recursion => {
                ExactEngine::with_limits(graph, Limits::default())?
                    .conjunction(&sources, &targets)?
                    .probability
            }
            OrientMethod::Enumeration => brute_force_prob(graph, &event)?.probability,
        };
        write_out(out, prob)
    })
}

fn conjunction_event(sources: &[VertexId], targets: &[VertexId]) -> Result<EventExpr, Failure> {
    let mut atoms = targets.iter();
    let first = atoms
        .next()
        .ok_or_else(|| Failure(OrientStatus::InvalidInput, "no targets".into()))?;
    let mut event = EventExpr::connection(sources, *first)?;
    for &t in atoms {
        event = event.and(EventExpr::connection(sources, t)?);
    }
    Ok(event)
}

/// Monte Carlo estimate of the same event as `orient_exact`. Results depend
/// only on `seed`, `streams` and `samples`.
///
/// # Safety
/// As for `orient_exact`.
#[no_mangle]
pub unsafe extern "C" fn orient_mc_estimate(
    graph: *const OrientGraph,
    sources: *const usize,
    source_count: usize,
    targets: *const usize,
    target_count: usize,
    samples: u64,
    seed: u64,
    streams: u64,
    out: *mut OrientEstimate,
) -> OrientStatus {
    guard(|| {
        let graph = graph_ref(graph)?;
        let sources = vertices(sources, source_count, "sources")?;
        let targets = vertices(targets, target_count, "targets")?;
        let event = conjunction_event(&sources, &targets)?;
        let r = estimate_event(graph, &event, McConfig::new(samples, seed, streams))?;
        write_out(
            out,
            OrientEstimate {
                estimate: r.estimate,
                std_error: r.std_error,
                ci_low: r.ci95.0,
                ci_high: r.ci95.1,
                samples: r.samples,
            },
        )
    })
}

/// Monte Carlo estimate of `P(S→a, S→b) - P(S→a)·P(S→b)`.
///
/// # Safety
/// As for `orient_exact`.
#[no_mangle]
pub unsafe extern "C" fn orient_mc_slack(
    graph: *const OrientGraph,
    sources: *const usize,
    source_count: usize,
    a: usize,
    b: usize,
    samples: u64,
    seed: u64,
    streams: u64,
    out: *mut OrientSlack,
) -> OrientStatus {
    guard(|| {
        let graph = graph_ref(graph)?;
        let sources = vertices(sources, source_count, "sources")?;
        let r = estimate_slack(graph, &sources, a, b, McConfig::new(samples, seed, streams))?;
        write_out(
            out,
            OrientSlack {
                slack: r.slack,
                std_error: r.std_error,
                p_first: r.p_first,
                p_second: r.p_second,
                p_both: r.p_both,
                samples: r.samples,
            },
        )
    })
}

/// Total variation distance between the reachable set of `root` under
/// unbiased orientation and its cluster under bond percolation at 1/2.
///
/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn orient_mcdiarmid_tv(
    graph: *const OrientGraph,
    root: usize,
    out: *mut f64,
) -> OrientStatus {
    guard(|| {
        let graph = graph_ref(graph)?;
        let tv = verify_mcdiarmid(graph, root, Limits::default())?;
        write_out(out, tv)
    })
}
