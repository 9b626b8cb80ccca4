//! Set-distance decision for two linearly separable point sets: is the
//! minimum pairwise distance at most `eps`?
//!
//! The procedure alternates between the sets. It picks a point `p`, finds
//! its nearest point `q` on the other side, answers yes when
//! `dist(p, q) <= eps`, and otherwise removes points that provably cannot
//! be within `eps` of the other set before switching sides:
//!
//! * triangle rule: any `x` with `dist(x, p) < dist(p, q) - eps` is at
//!   distance greater than `eps` from every point of the other set;
//! * angle rule: any `x` whose angle to the `p->q` direction exceeds
//!   `lambda = max_y lambda_y` (see [`max_angle`]) lies outside every
//!   tangent cone that could reach an `eps`-ball around a point `y`.
//!
//! Each failed round removes at least the probe point itself, so the loop
//! terminates, and only provably trivial points are ever removed, so the
//! yes/no answer is exact. With a positive slack `delta` the yes test uses
//! `eps + delta` instead, which bounds the number of rounds by a constant
//! at the price of a one-sided error inside `(eps, eps + delta]`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::points::{distance, squared_distance, Dataset};

/// Which of the two candidate sets a pruned point belonged to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeSide {
    A,
    B,
}

/// Hooks into the merge engine for instrumentation; all methods default to
/// no-ops so the engine pays nothing when unobserved.
pub trait MergeObserver {
    /// Called for every per-point maximum angle computed while pruning.
    fn lambda(&mut self, _lambda_y: f64) {}
    /// Called for every point removed by a pruning rule, with its dataset
    /// index and the side it was removed from.
    fn pruned(&mut self, _side: MergeSide, _point: usize) {}
}

impl MergeObserver for () {}

/// Counters for one merge decision.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MergeStats {
    /// Number of alternating rounds (kappa).
    pub iterations: usize,
    /// Point-to-point distance evaluations.
    pub distance_evaluations: u64,
    /// Rounds whose distance evaluations exceeded `3 * (|A| + |B|)`;
    /// recorded rather than enforced.
    pub budget_violations: usize,
}

/// Outcome of a merge decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeDecision {
    /// True iff some cross pair is within the yes radius.
    pub merged: bool,
    /// A witnessing pair `(index in A's set, index in B's set)` when
    /// `merged` is true.
    pub witness: Option<(usize, usize)>,
    pub stats: MergeStats,
}

/// The inputs of one set-distance decision: two non-empty index sets over
/// a shared dataset, the radius, the approximate-mode slack (0 = exact),
/// and the seed for the initial probe choice.
#[derive(Debug, Clone, Copy)]
pub struct MergeCandidate<'a> {
    pub data: &'a Dataset,
    pub set_a: &'a [usize],
    pub set_b: &'a [usize],
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
}

impl<'a> MergeCandidate<'a> {
    pub fn decide(&self) -> MergeDecision {
        self.decide_observed(&mut ())
    }

    pub fn decide_observed<O: MergeObserver>(&self, observer: &mut O) -> MergeDecision {
        assert!(!self.set_a.is_empty(), "set A must be non-empty");
        assert!(!self.set_b.is_empty(), "set B must be non-empty");
        assert!(self.eps > 0.0, "eps must be positive");
        assert!(self.delta >= 0.0, "delta must be non-negative");

        let data = self.data;
        let eps = self.eps;
        let yes_radius = eps + self.delta;
        let budget = 3 * (self.set_a.len() + self.set_b.len()) as u64;

        let mut active_a = self.set_a.to_vec();
        let mut active_b = self.set_b.to_vec();
        let mut stats = MergeStats::default();

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut p = active_a[rng.random_range(0..active_a.len())];

        loop {
            stats.iterations += 1;
            let round_start = stats.distance_evaluations;

            let (q_pos, dists_b) = nearest_with_distances(data, p, &active_b, &mut stats);
            let q = active_b[q_pos];
            let dist_pq = dists_b[q_pos];
            if dist_pq <= yes_radius {
                return MergeDecision {
                    merged: true,
                    witness: Some((p, q)),
                    stats,
                };
            }

            prune_in_place(
                data,
                &mut active_a,
                &active_b,
                &dists_b,
                p,
                q,
                dist_pq,
                eps,
                MergeSide::A,
                observer,
                &mut stats,
            );
            if active_a.is_empty() {
                note_budget(&mut stats, round_start, budget);
                return MergeDecision {
                    merged: false,
                    witness: None,
                    stats,
                };
            }

            let (p_pos, dists_a) = nearest_with_distances(data, q, &active_a, &mut stats);
            let p_next = active_a[p_pos];
            let dist_qp = dists_a[p_pos];
            if dist_qp <= yes_radius {
                return MergeDecision {
                    merged: true,
                    witness: Some((p_next, q)),
                    stats,
                };
            }

            prune_in_place(
                data,
                &mut active_b,
                &active_a,
                &dists_a,
                q,
                p_next,
                dist_qp,
                eps,
                MergeSide::B,
                observer,
                &mut stats,
            );
            note_budget(&mut stats, round_start, budget);
            if active_b.is_empty() {
                return MergeDecision {
                    merged: false,
                    witness: None,
                    stats,
                };
            }

            p = p_next;
        }
    }
}

fn note_budget(stats: &mut MergeStats, round_start: u64, budget: u64) {
    if stats.distance_evaluations - round_start > budget {
        stats.budget_violations += 1;
    }
}

/// Exact decision: yes iff some pair `(p, q)` with `p` in `set_a`, `q` in
/// `set_b` has `dist(p, q) <= eps`. The answer does not depend on `seed`;
/// only the recorded statistics may vary.
pub fn fast_merge(
    data: &Dataset,
    set_a: &[usize],
    set_b: &[usize],
    eps: f64,
    seed: u64,
) -> MergeDecision {
    MergeCandidate {
        data,
        set_a,
        set_b,
        eps,
        delta: 0.0,
        seed,
    }
    .decide()
}

/// Approximate decision with slack `delta > 0`: yes whenever the minimum
/// distance is at most `eps`, no whenever it exceeds `eps + delta`, either
/// answer in between. A yes always carries a witness pair at distance at
/// most `eps + delta`.
pub fn fast_merge_approx(
    data: &Dataset,
    set_a: &[usize],
    set_b: &[usize],
    eps: f64,
    delta: f64,
    seed: u64,
) -> MergeDecision {
    assert!(delta > 0.0, "approximate merge requires delta > 0");
    MergeCandidate {
        data,
        set_a,
        set_b,
        eps,
        delta,
        seed,
    }
    .decide()
}

/// Exact decision with instrumentation hooks.
pub fn fast_merge_observed<O: MergeObserver>(
    data: &Dataset,
    set_a: &[usize],
    set_b: &[usize],
    eps: f64,
    delta: f64,
    seed: u64,
    observer: &mut O,
) -> MergeDecision {
    MergeCandidate {
        data,
        set_a,
        set_b,
        eps,
        delta,
        seed,
    }
    .decide_observed(observer)
}

/// Maximum angle of `y` with respect to `p` and the nearest point `q`:
///
/// `lambda_y = arcsin(eps / dist(p, y)) + angle(pq, py)`
///
/// Any direction from `p` that deviates from `pq` by more than `lambda_y`
/// cannot meet the closed `eps`-ball around `y`. Requires
/// `dist(p, y) > eps` and `dist(p, q) > 0`.
pub fn max_angle(p: &[f64], q: &[f64], y: &[f64], eps: f64) -> f64 {
    let dist_py = distance(p, y);
    let dist_pq = distance(p, q);
    assert!(
        dist_py > eps,
        "max_angle requires dist(p, y) > eps ({dist_py} <= {eps})"
    );
    assert!(dist_pq > 0.0, "max_angle requires p != q");
    lambda_from_parts(eps, dist_pq, dist_py, dot_from(p, q, y))
}

/// Shared angle formula; arcsin/arccos arguments are clamped to [-1, 1]
/// because dot products can drift past the bounds by a few ulps.
#[inline]
fn lambda_from_parts(eps: f64, dist_pq: f64, dist_py: f64, dot_pq_py: f64) -> f64 {
    let sin_arg = (eps / dist_py).clamp(-1.0, 1.0);
    let cos_arg = (dot_pq_py / (dist_pq * dist_py)).clamp(-1.0, 1.0);
    sin_arg.asin() + cos_arg.acos()
}

/// Dot product of the vectors `p->q` and `p->x`.
#[inline]
fn dot_from(p: &[f64], q: &[f64], x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for j in 0..p.len() {
        acc += (q[j] - p[j]) * (x[j] - p[j]);
    }
    acc
}

/// Removes from `active` every point the triangle or angle rule proves to
/// be farther than `eps` from all of `opposing`. `opposing_dists[i]` must
/// hold `dist(probe, opposing[i])`; `dist_pq = dist(probe, nearest)` must
/// exceed `eps`.
#[allow(clippy::too_many_arguments)]
fn prune_in_place<O: MergeObserver>(
    data: &Dataset,
    active: &mut Vec<usize>,
    opposing: &[usize],
    opposing_dists: &[f64],
    probe: usize,
    nearest: usize,
    dist_pq: f64,
    eps: f64,
    side: MergeSide,
    observer: &mut O,
    stats: &mut MergeStats,
) {
    debug_assert!(dist_pq > eps);
    let p = data.point(probe);
    let q = data.point(nearest);

    // lambda = max over the opposing set of the per-point maximum angle,
    // reusing the distances computed while locating the nearest point.
    let mut lambda = 0.0f64;
    for (pos, &y_idx) in opposing.iter().enumerate() {
        let lambda_y = lambda_from_parts(
            eps,
            dist_pq,
            opposing_dists[pos],
            dot_from(p, q, data.point(y_idx)),
        );
        observer.lambda(lambda_y);
        if lambda_y > lambda {
            lambda = lambda_y;
        }
    }

    let sigma = dist_pq - eps;
    let mut i = 0;
    while i < active.len() {
        let x_idx = active[i];
        let x = data.point(x_idx);
        let dist_xp = distance(x, p);
        stats.distance_evaluations += 1;
        let remove = if dist_xp < sigma {
            true
        } else {
            let theta = (dot_from(p, q, x) / (dist_pq * dist_xp))
                .clamp(-1.0, 1.0)
                .acos();
            theta > lambda
        };
        if remove {
            observer.pruned(side, x_idx);
            active.swap_remove(i);
        } else {
            i += 1;
        }
    }
}

/// Removes provably trivial points of `s_i` given a probe `p` (member of
/// `s_i`) whose nearest point in `s_j` is `q` at distance greater than
/// `eps`. Returns the retained subset (order not preserved). The probe
/// itself is always removed.
pub fn prune(
    data: &Dataset,
    s_i: &[usize],
    s_j: &[usize],
    p: usize,
    q: usize,
    eps: f64,
) -> Vec<usize> {
    assert!(s_i.contains(&p), "p must be a member of s_i");
    assert!(s_j.contains(&q), "q must be a member of s_j");
    let mut stats = MergeStats::default();
    let (q_pos, dists) = nearest_with_distances(data, p, s_j, &mut stats);
    assert_eq!(
        s_j[q_pos], q,
        "q must be the nearest point to p in s_j (ties by lowest index)"
    );
    let dist_pq = dists[q_pos];
    assert!(dist_pq > eps, "prune requires dist(p, q) > eps");

    let mut active = s_i.to_vec();
    prune_in_place(
        data,
        &mut active,
        s_j,
        &dists,
        p,
        q,
        dist_pq,
        eps,
        MergeSide::A,
        &mut (),
        &mut stats,
    );
    active
}

/// Nearest point of `s` to point `p`, ties broken by lowest point index.
/// Returns the point index and its distance.
pub fn nearest_in_set(data: &Dataset, p: usize, s: &[usize]) -> (usize, f64) {
    assert!(!s.is_empty(), "nearest_in_set requires a non-empty set");
    let mut stats = MergeStats::default();
    let (pos, dists) = nearest_with_distances(data, p, s, &mut stats);
    (s[pos], dists[pos])
}

/// Scans `s`, returning the position of the nearest point (lowest index on
/// ties) and the full distance vector for reuse by the angle rule.
fn nearest_with_distances(
    data: &Dataset,
    p: usize,
    s: &[usize],
    stats: &mut MergeStats,
) -> (usize, Vec<f64>) {
    let pc = data.point(p);
    let mut best_pos = 0;
    let mut best_sq = f64::INFINITY;
    let mut dists = Vec::with_capacity(s.len());
    for (pos, &idx) in s.iter().enumerate() {
        let sq = squared_distance(pc, data.point(idx));
        stats.distance_evaluations += 1;
        dists.push(sq);
        if sq < best_sq || (sq == best_sq && idx < s[best_pos]) {
            best_sq = sq;
            best_pos = pos;
        }
    }
    for d in dists.iter_mut() {
        *d = d.sqrt();
    }
    (best_pos, dists)
}
