//! Shared instance generators for the integration test suites.
//!
//! Each test binary compiles this module separately, so not every item is
//! used by every binary.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use grit_dbscan::oracle::{brute_min_dist, brute_neighbor_grids};
use grit_dbscan::partition::{partition, GridSet};
use grit_dbscan::points::{within_eps, Dataset};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform dataset in `[0, span]^d`; 30% of draws use integer coordinates
/// to exercise exact boundary distances.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize, span: f64) -> Dataset {
    let integer_coords = rng.random::<f64>() < 0.3;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let c = rng.random::<f64>() * span;
                    if integer_coords {
                        c.floor()
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    Dataset::from_rows(d, &rows).unwrap()
}

/// A partitioned random instance: dataset, eps, and its grid set.
pub fn random_grid_instance(rng: &mut ChaCha8Rng, seed_dims: &[usize]) -> (Dataset, f64, GridSet) {
    let d = seed_dims[rng.random_range(0..seed_dims.len())];
    let n = 5 + rng.random_range(0..140);
    let span = 8.0 + rng.random::<f64>() * 20.0;
    let data = random_dataset(rng, n, d, span);
    let eps = 0.5 + rng.random::<f64>() * 5.0;
    let gs = partition(&data, eps);
    (data, eps, gs)
}

/// One merge-test instance: two point sets with grid geometry (each inside
/// a cell of side `eps / sqrt(d)`) from neighboring cells of a partitioned
/// random dataset, restricted to core points by an independent quadratic
/// count.
pub struct PairInstance {
    pub data: Dataset,
    pub set_a: Vec<usize>,
    pub set_b: Vec<usize>,
    pub eps: f64,
}

/// Draws a random neighboring-grid core-set pair; retries internally until
/// one exists.
pub fn neighboring_core_pair(rng: &mut ChaCha8Rng) -> PairInstance {
    loop {
        let d = [2usize, 3, 5][rng.random_range(0..3)];
        let n = 30 + rng.random_range(0..110);
        let eps = 0.5 + rng.random::<f64>() * 2.5;
        let span = eps * (3.0 + rng.random::<f64>() * 6.0);
        let data = random_dataset(rng, n, d, span);
        let min_pts = 2 + rng.random_range(0..5);
        let gs = partition(&data, eps);

        // Independent core flags by quadratic counting.
        let core: Vec<bool> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| within_eps(data.point(i), data.point(j), eps))
                    .count()
                    >= min_pts
            })
            .collect();

        let core_members: Vec<Vec<usize>> = (0..gs.len())
            .map(|g| {
                gs.members(g)
                    .iter()
                    .copied()
                    .filter(|&p| core[p])
                    .collect()
            })
            .collect();

        let mut candidates = Vec::new();
        for gi in 0..gs.len() {
            if core_members[gi].is_empty() {
                continue;
            }
            for gj in brute_neighbor_grids(&gs, gs.id(gi)) {
                if gj > gi && !core_members[gj].is_empty() {
                    candidates.push((gi, gj));
                }
            }
        }
        if candidates.is_empty() {
            continue;
        }
        let (gi, gj) = candidates[rng.random_range(0..candidates.len())];
        return PairInstance {
            set_a: core_members[gi].clone(),
            set_b: core_members[gj].clone(),
            data,
            eps,
        };
    }
}

/// Draws a near-threshold pair: both sets inside cells of side
/// `eps / sqrt(d)`, separated along the first axis, with
/// `|MinDist - eps| >= 1e-6 * eps` but within `1e-2 * eps`. The shift of
/// the second box is binary-searched so the minimum distance lands just
/// off the threshold on a random side.
pub fn adversarial_pair(rng: &mut ChaCha8Rng) -> PairInstance {
    'retry: loop {
        let d = [2usize, 3, 5][rng.random_range(0..3)];
        let eps = 0.8 + rng.random::<f64>() * 1.7;
        let side = eps / (d as f64).sqrt();
        let m_a = 2 + rng.random_range(0..15);
        let m_b = 2 + rng.random_range(0..15);

        let box_point = |rng: &mut ChaCha8Rng, x0: f64| -> Vec<f64> {
            let mut p = vec![x0 + rng.random::<f64>() * side * 0.999];
            for _ in 1..d {
                p.push(rng.random::<f64>() * side * 0.999);
            }
            p
        };
        let a_rows: Vec<Vec<f64>> = (0..m_a).map(|_| box_point(rng, 0.0)).collect();
        let b_rows: Vec<Vec<f64>> = (0..m_b).map(|_| box_point(rng, 0.0)).collect();

        let min_dist_at = |shift: f64| -> f64 {
            let mut best = f64::INFINITY;
            for a in &a_rows {
                for b in &b_rows {
                    let mut sq = (b[0] + shift - a[0]).powi(2);
                    for j in 1..d {
                        sq += (b[j] - a[j]).powi(2);
                    }
                    best = best.min(sq.sqrt());
                }
            }
            best
        };

        // Bracket MinDist = eps with the boxes disjoint along the axis.
        let mut lo = side;
        let mut hi = side + 2.0 * eps;
        if min_dist_at(lo) >= eps || min_dist_at(hi) <= eps {
            continue 'retry;
        }
        for _ in 0..70 {
            let mid = 0.5 * (lo + hi);
            if min_dist_at(mid) <= eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let above = rng.random::<f64>() < 0.5;
        for k in [4.0f64, 16.0, 64.0, 256.0] {
            let shift = if above {
                hi + k * 1e-6 * eps
            } else {
                lo - k * 1e-6 * eps
            };
            if shift < side {
                continue;
            }
            let min_dist = min_dist_at(shift);
            if (min_dist - eps).abs() >= 1e-6 * eps && (min_dist - eps).abs() <= 1e-2 * eps {
                let mut rows = a_rows.clone();
                for b in &b_rows {
                    let mut p = b.clone();
                    p[0] += shift;
                    rows.push(p);
                }
                let data = Dataset::from_rows(d, &rows).unwrap();
                let instance = PairInstance {
                    set_a: (0..m_a).collect(),
                    set_b: (m_a..m_a + m_b).collect(),
                    eps,
                    data,
                };
                // The margin must survive the real distance path.
                let brute = brute_min_dist(&instance.data, &instance.set_a, &instance.set_b);
                if (brute - eps).abs() >= 1e-6 * eps {
                    return instance;
                }
                continue 'retry;
            }
        }
    }
}
