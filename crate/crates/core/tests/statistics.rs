use orient_core::exact::{exact_connection_prob, exact_joint_prob};
use orient_core::grid::{grid_reach_stats, GridSpec};
use orient_core::monte_carlo::{estimate_event, estimate_slack, McConfig};
use orient_core::rng::RandomStream;
use orient_core::{EventExpr, Graph};

/// Union-find over open bonds of a `w × h` box.
struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let next = self.0[x];
            self.0[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Mean size and standard error of the origin's cluster in bond percolation
/// at density 1/2, using an unrelated generator.
fn percolation_mean_cluster(w: usize, h: usize, samples: u64, seed: u64) -> (f64, f64) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let mut dsu = Dsu((0..w * h).collect());
        for y in 0..h {
            for x in 0..w {
                let v = y * w + x;
                if x + 1 < w && rng.gen_bool(0.5) {
                    dsu.union(v, v + 1);
                }
                if y + 1 < h && rng.gen_bool(0.5) {
                    dsu.union(v, v + w);
                }
            }
        }
        let root = dsu.find(0);
        let size = (0..w * h).filter(|&v| dsu.find(v) == root).count() as f64;
        sum += size;
        sum_sq += size * size;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq - n * mean * mean) / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn unbiased_grid_reach_matches_percolation_cluster() {
    let samples = 40_000;
    let stats = grid_reach_stats(GridSpec::new(8, 8, 0.5), 0, McConfig::new(samples, 11, 4)).unwrap();
    let (mean, se) = percolation_mean_cluster(8, 8, samples, 12);
    let combined = (stats.reach_std_error.powi(2) + se.powi(2)).sqrt();
    assert!(
        (stats.mean_reach - mean).abs() < 4.0 * combined,
        "orientation {} vs percolation {mean} (se {combined})",
        stats.mean_reach
    );
}

#[test]
fn boundary_fraction_grows_with_bias() {
    let mut last = -1.0;
    for p in [0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0] {
        let s = grid_reach_stats(GridSpec::new(8, 8, p), 0, McConfig::new(20_000, 5, 4)).unwrap();
        assert!(s.boundary_frac + 4.0 * s.boundary_std_error >= last, "p={p}: {} < {last}", s.boundary_frac);
        last = s.boundary_frac;
    }
    assert_eq!(last, 1.0);
}

#[test]
fn confidence_intervals_cover_the_truth() {
    let g = Graph::new(4, [(0, 1, 0.3), (1, 2, 0.8), (2, 3, 0.6), (0, 3, 0.4), (1, 3, 0.5)]).unwrap();
    let truth = exact_connection_prob(&g, &[0], 2).unwrap().probability;
    let event = EventExpr::connection(&[0], 2).unwrap();
    let covered = (0..200u64)
        .filter(|&seed| {
            let r = estimate_event(&g, &event, McConfig::new(4_000, seed, 2)).unwrap();
            r.ci95.0 <= truth && truth <= r.ci95.1
        })
        .count();
    assert!(covered >= 180, "{covered}/200 intervals covered {truth}");
}

#[test]
fn slack_estimate_tracks_exact_slack() {
    let g = Graph::new(5, [(0, 1, 0.7), (1, 2, 0.2), (2, 3, 0.9), (3, 4, 0.5), (0, 4, 0.35), (1, 3, 0.6)]).unwrap();
    let pa = exact_connection_prob(&g, &[0], 2).unwrap().probability;
    let pb = exact_connection_prob(&g, &[0], 4).unwrap().probability;
    let pab = exact_joint_prob(&g, &[0], 2, 4).unwrap().probability;
    let exact = pab - pa * pb;
    let mut covered = 0;
    for seed in 0..40 {
        let est = estimate_slack(&g, &[0], 2, 4, McConfig::new(20_000, seed, 4)).unwrap();
        let (lo, hi) = est.ci95();
        covered += (lo <= exact && exact <= hi) as usize;
    }
    assert!(covered >= 34, "{covered}/40 slack intervals covered {exact}");
}

#[test]
fn streams_are_independent_of_each_other() {
    // first draws of neighbouring streams should not coincide
    let firsts: Vec<f64> = (0..64).map(|i| RandomStream::new(9, i).uniform()).collect();
    for i in 0..firsts.len() {
        for j in i + 1..firsts.len() {
            assert_ne!(firsts[i], firsts[j]);
        }
    }
}
