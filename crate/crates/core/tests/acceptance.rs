//! Acceptance suite. Run with
//! `cargo test -p orient-core --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::time::Instant;

use orient_core::exact::{
    brute_force_prob, enumerate_reach_law, out_neighborhood_distribution, ExactEngine, Limits,
    SubsetDistribution,
};
use orient_core::generators::{random_gnm, BiasPolicy};
use orient_core::grid::{build_grid, find_nonmonotonicity_witness, grid_reach_stats, GridFlip, GridSpec};
use orient_core::inequality::{
    alm_linusson_covariance, build_proof_quadruple, check_four_functions, hypothesis_violations,
    verify_mcdiarmid, verify_theorem_1, verify_theorem_2, CovarianceMode, SourcePolicy, VerifyMode,
};
use orient_core::monte_carlo::{estimate_event, McConfig};
use orient_core::rng::RandomStream;
use orient_core::{EventExpr, Graph, VertexId};

const GRAPH_SEED: u64 = 20_240_601;
const WITNESS_SEED: u64 = 1;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// `count` graphs with `2 ≤ n ≤ max_n`, `m ≤ max_m` and uniform biases.
fn sample_graphs(count: u64, max_n: usize, max_m: usize, seed: u64) -> Vec<Graph> {
    (0..count)
        .map(|i| {
            let mut s = RandomStream::new(seed, i);
            let n = 2 + s.below(max_n - 1);
            let m = s.below(max_m.min(n * (n - 1) / 2) + 1);
            random_gnm(n, m, BiasPolicy::Uniform, &mut s).unwrap()
        })
        .collect()
}

fn source_sets(n: usize, max_size: usize) -> Vec<Vec<VertexId>> {
    (1u32..1 << n)
        .filter(|m| m.count_ones() as usize <= max_size)
        .map(|m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
        .collect()
}

fn mass_where(law: &SubsetDistribution, want: u64) -> f64 {
    law.iter().filter(|&(x, _)| x & want == want).map(|(_, p)| p).sum()
}

/// Reachability oracle written independently of the library: iterate over
/// all `2^m` orientations, propagate reach by repeated relaxation.
fn naive_prob(n: usize, edges: &[(usize, usize, f64)], holds: impl Fn(&dyn Fn(usize, usize) -> bool) -> bool) -> f64 {
    let m = edges.len();
    let mut total = 0.0;
    for mask in 0u32..1 << m {
        let mut weight = 1.0;
        let mut arcs = Vec::new();
        for (e, &(u, v, p)) in edges.iter().enumerate() {
            if mask >> e & 1 == 1 {
                weight *= p;
                arcs.push((u, v));
            } else {
                weight *= 1.0 - p;
                arcs.push((v, u));
            }
        }
        let reaches = |from: usize, to: usize| {
            let mut seen = vec![false; n];
            seen[from] = true;
            let mut changed = true;
            while changed {
                changed = false;
                for &(x, y) in &arcs {
                    if seen[x] && !seen[y] {
                        seen[y] = true;
                        changed = true;
                    }
                }
            }
            seen[to]
        };
        if holds(&reaches) {
            total += weight;
        }
    }
    total
}

fn oracle_equivalence() -> Outcome {
    let graphs = sample_graphs(200, 7, 12, GRAPH_SEED);
    let mut worst = 0.0f64;
    let mut queries = 0u64;
    for g in &graphs {
        let n = g.vertex_count();
        let mut engine = ExactEngine::new(g).map_err(|e| e.to_string())?;
        for set in source_sets(n, 3) {
            let law = enumerate_reach_law(g, &set, Limits::default()).map_err(|e| e.to_string())?;
            for a in 0..n {
                let rec = engine.connection(&set, a).unwrap().probability;
                worst = worst.max((rec - mass_where(&law, 1 << a)).abs());
                queries += 1;
                for b in a + 1..n {
                    let rec = engine.joint(&set, a, b).unwrap().probability;
                    worst = worst.max((rec - mass_where(&law, 1 << a | 1 << b)).abs());
                    queries += 1;
                }
            }
        }
        // direct event enumeration on a few queries per graph
        let last = n - 1;
        for (event, rec) in [
            (EventExpr::connection(&[0], last).unwrap(), engine.connection(&[0], last).unwrap()),
            (EventExpr::joint(&[last], 0, 1).unwrap(), engine.joint(&[last], 0, 1).unwrap()),
        ] {
            let brute = brute_force_prob(g, &event).unwrap().probability;
            worst = worst.max((rec.probability - brute).abs());
            queries += 1;
        }
    }
    let detail = format!("{} graphs, {queries} queries, max |diff| = {worst:.3e}", graphs.len());
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn correlation_sweeps() -> Outcome {
    let graphs = sample_graphs(200, 7, 12, GRAPH_SEED);
    let mut min1 = f64::INFINITY;
    let mut min2 = f64::INFINITY;
    let mut instances = 0;
    for g in &graphs {
        let t1 = verify_theorem_1(g, VerifyMode::Exact(Limits::default()), 1e-9).unwrap();
        let t2 = verify_theorem_2(g, SourcePolicy::UpToSize(3), Limits::default(), 1e-9).unwrap();
        if !t1.passed() || !t2.passed() {
            return Err(format!("violation: {} / {}", t1.worst_instance, t2.worst_instance));
        }
        min1 = min1.min(t1.min_slack);
        min2 = min2.min(t2.min_slack);
        instances += t1.instances_checked + t2.instances_checked;
    }
    let detail = format!("{instances} instances, min slack single-source {min1:.3e}, set-source {min2:.3e}");
    if min1 >= -1e-9 && min2 >= -1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn triangle_fixed_points() -> Outcome {
    let edges = [(0, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)];
    let g = Graph::new(3, edges).unwrap();
    let oracle_conn = naive_prob(3, &edges, |r| r(0, 1));
    let oracle_joint = naive_prob(3, &edges, |r| r(0, 1) && r(0, 2));
    let rec_conn = ExactEngine::new(&g).unwrap().connection(&[0], 1).unwrap().probability;
    let rec_joint = ExactEngine::new(&g).unwrap().joint(&[0], 1, 2).unwrap().probability;
    let brute_conn = brute_force_prob(&g, &EventExpr::connection(&[0], 1).unwrap()).unwrap().probability;
    let brute_joint = brute_force_prob(&g, &EventExpr::joint(&[0], 1, 2).unwrap()).unwrap().probability;
    let ok = [oracle_conn, rec_conn, brute_conn].iter().all(|p| (p - 0.625).abs() <= 1e-12)
        && [oracle_joint, rec_joint, brute_joint].iter().all(|p| (p - 0.5).abs() <= 1e-12);
    let detail = format!(
        "connection rec={rec_conn} enum={brute_conn} oracle={oracle_conn}; joint rec={rec_joint} enum={brute_joint} oracle={oracle_joint}"
    );
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn proof_machinery() -> Outcome {
    let mut done = 0;
    let mut attempt = 0u64;
    let mut worst_sum = 0.0f64;
    let mut worst_delta = 0.0f64;
    let mut worst_lattice = 0.0f64;
    while done < 50 {
        let mut s = RandomStream::new(GRAPH_SEED + 4, attempt);
        attempt += 1;
        let n = 3 + s.below(6);
        let m = s.below(14.min(n * (n - 1) / 2) + 1);
        let g = random_gnm(n, m, BiasPolicy::Uniform, &mut s).unwrap();
        let size = 1 + s.below(2);
        let mut sources: Vec<VertexId> = Vec::new();
        while sources.len() < size {
            let v = s.below(n);
            if !sources.contains(&v) {
                sources.push(v);
            }
        }
        let rest: Vec<VertexId> = (0..n).filter(|v| !sources.contains(v)).collect();
        let a = rest[s.below(rest.len())];
        let b = rest[s.below(rest.len())];
        let law = out_neighborhood_distribution(&g, &sources).unwrap();
        if law.ground().len() > 6 {
            continue;
        }
        done += 1;

        let q = build_proof_quadruple(&g, &sources, a, b).unwrap();
        let report = check_four_functions(&q, 1e-12).unwrap();
        let bad = hypothesis_violations(&report);
        if bad > 0 {
            return Err(format!("{bad} hypothesis violations on {sources:?} a={a} b={b}"));
        }
        let [sa, sb, sg, sd] = q.sums();
        let mut engine = ExactEngine::new(&g).unwrap();
        let pa = engine.connection(&sources, a).unwrap().probability;
        let pb = engine.connection(&sources, b).unwrap().probability;
        let pab = engine.joint(&sources, a, b).unwrap().probability;
        worst_delta = worst_delta.max((sd - 1.0).abs());
        worst_sum = worst_sum.max((sa - pa).abs()).max((sb - pb).abs()).max((sg - pab).abs());
        let brute = brute_force_prob(&g, &EventExpr::joint(&sources, a, b).unwrap()).unwrap().probability;
        worst_sum = worst_sum.max((sg - brute).abs());

        let k = law.ground().len();
        for x1 in 0u64..1 << k {
            for x2 in 0u64..1 << k {
                let lhs = law.mass(x1) * law.mass(x2);
                let rhs = law.mass(x1 | x2) * law.mass(x1 & x2);
                worst_lattice = worst_lattice.max((lhs - rhs).abs());
            }
        }
    }
    let detail = format!(
        "{done} instances, |Σδ-1| ≤ {worst_delta:.3e}, sums vs engine/enumeration ≤ {worst_sum:.3e}, lattice ≤ {worst_lattice:.3e}"
    );
    if worst_delta <= 1e-12 && worst_sum <= 1e-9 && worst_lattice <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mcdiarmid_coupling() -> Outcome {
    let graphs = sample_graphs(50, 8, 14, GRAPH_SEED + 5);
    let mut worst = 0.0f64;
    for (i, g) in graphs.iter().enumerate() {
        let root = i % g.vertex_count();
        worst = worst.max(verify_mcdiarmid(g, root, Limits::default()).unwrap());
    }
    let detail = format!("{} graphs, max TV = {worst:.3e}", graphs.len());
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn monte_carlo_calibration() -> Outcome {
    let g = Graph::new(3, [(0, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)]).unwrap();
    let event = EventExpr::connection(&[0], 1).unwrap();
    let hits = (0..100u64)
        .filter(|&seed| {
            let r = estimate_event(&g, &event, McConfig::new(100_000, seed, 1)).unwrap();
            (r.estimate - 0.625).abs() <= 0.006
        })
        .count();
    let mut reproducible = true;
    for streams in [1, 4, 8] {
        let config = McConfig::new(100_000, 42, streams);
        let first = estimate_event(&g, &event, config).unwrap();
        for threads in [1, 3] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let again = pool.install(|| estimate_event(&g, &event, config).unwrap());
            reproducible &= serde_json::to_string(&first).unwrap() == serde_json::to_string(&again).unwrap();
        }
    }
    let detail = format!("{hits}/100 seeds within 0.006, reproducible at streams 1/4/8: {reproducible}");
    if hits >= 95 && reproducible {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn alm_linusson() -> Outcome {
    let edges = [(0, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)];
    // s, a, b = 0, 1, 2
    let p_as = naive_prob(3, &edges, |r| r(1, 0));
    let p_sb = naive_prob(3, &edges, |r| r(0, 2));
    let p_both = naive_prob(3, &edges, |r| r(1, 0) && r(0, 2));
    let oracle = p_both - p_as * p_sb;
    let k3 = alm_linusson_covariance(3, CovarianceMode::Exact(Limits::default())).unwrap();
    if (k3.covariance + 1.0 / 64.0).abs() > 1e-12 || (oracle + 1.0 / 64.0).abs() > 1e-12 {
        return Err(format!("K3 covariance {} (oracle {oracle})", k3.covariance));
    }
    let mut parts = vec![format!("K3 {}", k3.covariance)];
    for n in 4..=6 {
        let exact = alm_linusson_covariance(n, CovarianceMode::Exact(Limits::default())).unwrap();
        let mc = alm_linusson_covariance(n, CovarianceMode::MonteCarlo(McConfig::new(1_000_000, 100 + n as u64, 8)))
            .unwrap();
        let se = mc.std_error.unwrap();
        let z = (mc.covariance - exact.covariance) / se;
        parts.push(format!("K{n} exact {:.6e} mc {:.6e} z={z:.2}", exact.covariance, mc.covariance));
        if z.abs() > 4.0 {
            return Err(parts.join(", "));
        }
    }
    Ok(parts.join(", "))
}

fn grid_witness() -> Outcome {
    let spec = GridSpec::new(8, 7, 0.5);
    let grid = build_grid(spec).unwrap();
    let (a, b) = (spec.id(0, 2), spec.id(7, 4));
    let found = find_nonmonotonicity_witness(spec, a, b, GridFlip::RIGHT, 1_000_000, WITNESS_SEED).unwrap();
    let Some(w) = found.witness else {
        return Err(format!("no witness in {} attempts", found.attempts));
    };
    w.verify(&grid.graph).map_err(|e| e.to_string())?;
    let e = grid.graph.edge(w.edge);
    let (lo, hi) = (spec.coords(e.low), spec.coords(e.high));
    if hi.0 != lo.0 + 1 || w.orientation.low_to_high(w.edge) || !w.flipped().low_to_high(w.edge) {
        return Err(format!("edge {lo:?}-{hi:?} is not a rightward flip"));
    }
    let small = GridSpec::new(2, 1, 0.5);
    let none = find_nonmonotonicity_witness(small, 0, 1, GridFlip::RIGHT, 10_000, WITNESS_SEED).unwrap();
    if none.witness.is_some() {
        return Err("2x1 grid produced a witness".into());
    }
    Ok(format!(
        "seed {WITNESS_SEED}: witness after {} attempts, edge {lo:?}-{hi:?}; 2x1 not found after {}",
        found.attempts, none.attempts
    ))
}

fn grid_determinism() -> Outcome {
    let mut checked = Vec::new();
    for (w, h) in [(1, 1), (1, 5), (4, 1), (3, 3), (5, 8), (8, 7), (12, 12)] {
        let n = (w * h) as f64;
        let full = grid_reach_stats(GridSpec::new(w, h, 1.0), 0, McConfig::new(200, 3, 4)).unwrap();
        let none = grid_reach_stats(GridSpec::new(w, h, 0.0), 0, McConfig::new(200, 3, 4)).unwrap();
        if full.mean_reach != n || full.max_reach as f64 != n || none.mean_reach != 1.0 || none.max_reach != 1 {
            return Err(format!("{w}x{h}: p=1 mean {} p=0 mean {}", full.mean_reach, none.mean_reach));
        }
        checked.push(format!("{w}x{h}"));
    }
    Ok(format!("boxes {}", checked.join(" ")))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 correlation sweeps", correlation_sweeps),
        ("3 triangle fixed points", triangle_fixed_points),
        ("4 proof machinery", proof_machinery),
        ("5 mcdiarmid coupling", mcdiarmid_coupling),
        ("6 monte carlo calibration", monte_carlo_calibration),
        ("7 alm-linusson covariance", alm_linusson),
        ("8 grid witness", grid_witness),
        ("9 grid determinism", grid_determinism),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{name}] {detail} ({secs:.1}s)"),
            Err(detail) => {
                println!("FAIL [{name}] {detail} ({secs:.1}s)");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
