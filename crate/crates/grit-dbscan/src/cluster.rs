//! The full grid-tree clustering pipeline.
//!
//! Stages: partition the points into grids, build the grid tree and
//! precompute each grid's non-empty neighboring grids, identify core
//! points, merge core grids into clusters, and classify the remaining
//! points as border or noise. Grids of side `eps / sqrt(d)` make every
//! populous grid all-core without any distance work, and the merge step
//! only ever tests neighboring core grids, using the pruned set-distance
//! decision of [`crate::merge`].
//!
//! Two merge strategies produce identical partitions: breadth-first
//! expansion over unclassified neighboring core grids, and a
//! low-density-first sweep over a union-find structure that skips pairs
//! already known to be connected.

use std::collections::HashMap;
use std::time::Instant;

use crate::gridtree::{GridTree, Neighbor};
use crate::merge::MergeCandidate;
use crate::partition::{partition, GridCoord, GridSet};
use crate::points::{within_eps, Clustering, Dataset, Params, PointClass, NOISE};
use crate::unionfind::UnionFind;

/// Merge strategy of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Breadth-first expansion over neighboring core grids.
    Bfs,
    /// Low-density-first traversal with union-find.
    Ldf,
}

/// Per-point core flags and, per grid, the core members in ascending
/// point order. A grid is a core grid iff it has at least one core member.
#[derive(Debug, Clone)]
pub struct CoreFlags {
    pub is_core: Vec<bool>,
    pub grid_core_members: Vec<Vec<usize>>,
}

impl CoreFlags {
    pub fn is_core_grid(&self, grid: usize) -> bool {
        !self.grid_core_members[grid].is_empty()
    }

    pub fn core_count(&self, grid: usize) -> usize {
        self.grid_core_members[grid].len()
    }
}

/// Cluster identifier per grid (core grids only).
#[derive(Debug, Clone)]
pub struct GridClusterMap {
    pub cluster_of_grid: Vec<Option<usize>>,
    pub cluster_count: usize,
}

/// Counters accumulated over the merge stage.
#[derive(Debug, Clone, Copy, Default)]
pub struct MergeCounters {
    /// Number of set-distance decisions performed.
    pub merge_tests: usize,
    /// Largest iteration count observed in any single decision.
    pub max_kappa: usize,
    pub distance_evaluations: u64,
    pub budget_violations: usize,
}

/// Per-grid neighboring-grid lists in ascending offset order, the grid
/// itself first. Computed once after the tree build and shared by core
/// identification, merging, and non-core assignment.
pub type NeighborLists = Vec<Vec<Neighbor>>;

pub fn compute_neighbor_lists(grids: &GridSet, tree: &GridTree) -> NeighborLists {
    grids.iter().map(|g| tree.neighbors(&g.id)).collect()
}

/// Flags core points: a populous grid (at least `min_pts` members) is
/// all-core with zero distance evaluations; otherwise each member counts
/// neighbors over the neighboring grids in ascending offset order and
/// stops as soon as the count reaches `min_pts`. The point itself counts.
///
/// Returns the flags and the number of distance evaluations spent.
pub fn identify_core_points(
    data: &Dataset,
    grids: &GridSet,
    neighbors: &NeighborLists,
    params: &Params,
) -> (CoreFlags, u64) {
    let mut is_core = vec![false; data.len()];
    let mut grid_core_members = vec![Vec::new(); grids.len()];
    let mut evals: u64 = 0;

    for gi in 0..grids.len() {
        let members = grids.members(gi);
        if members.len() >= params.min_pts {
            for &p in members {
                is_core[p] = true;
            }
            grid_core_members[gi] = members.to_vec();
            continue;
        }
        for &p in members {
            let pc = data.point(p);
            let mut count = 0usize;
            'scan: for nb in &neighbors[gi] {
                for &q in grids.members(nb.grid) {
                    evals += 1;
                    if within_eps(pc, data.point(q), params.eps) {
                        count += 1;
                        if count >= params.min_pts {
                            is_core[p] = true;
                            grid_core_members[gi].push(p);
                            break 'scan;
                        }
                    }
                }
            }
        }
    }

    (
        CoreFlags {
            is_core,
            grid_core_members,
        },
        evals,
    )
}

/// Deterministic per-pair seed so repeated runs pick the same probes.
fn pair_seed(seed: u64, gi: usize, gj: usize) -> u64 {
    let mut z = seed
        ^ (gi as u64).wrapping_mul(0x9E3779B97F4A7C15)
        ^ (gj as u64).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

#[allow(clippy::too_many_arguments)]
fn decide_pair(
    data: &Dataset,
    core: &CoreFlags,
    gi: usize,
    gj: usize,
    eps: f64,
    delta: f64,
    seed: u64,
    counters: &mut MergeCounters,
) -> bool {
    counters.merge_tests += 1;
    let decision = MergeCandidate {
        data,
        set_a: &core.grid_core_members[gi],
        set_b: &core.grid_core_members[gj],
        eps,
        delta,
        seed: pair_seed(seed, gi, gj),
    }
    .decide();
    counters.max_kappa = counters.max_kappa.max(decision.stats.iterations);
    counters.distance_evaluations += decision.stats.distance_evaluations;
    counters.budget_violations += decision.stats.budget_violations;
    decision.merged
}

/// Breadth-first merge: each unclassified core grid seeds a cluster and
/// the frontier tests every still-unclassified neighboring core grid, so
/// each grid enters the seed list once. Cluster ids follow discovery
/// order.
#[allow(clippy::needless_range_loop)]
pub fn merge_core_grids_bfs(
    data: &Dataset,
    grids: &GridSet,
    neighbors: &NeighborLists,
    core: &CoreFlags,
    eps: f64,
    delta: f64,
    seed: u64,
) -> (GridClusterMap, MergeCounters) {
    let mut map = vec![None; grids.len()];
    let mut classified = vec![false; grids.len()];
    let mut counters = MergeCounters::default();
    let mut cluster_count = 0usize;

    for g in 0..grids.len() {
        if !core.is_core_grid(g) || classified[g] {
            continue;
        }
        classified[g] = true;
        let mut seeds = vec![g];
        let mut pos = 0usize;
        while pos < seeds.len() {
            let cur = seeds[pos];
            pos += 1;
            // The self entry at the front of the list is already
            // classified, so only true neighbors are tested.
            for nb in &neighbors[cur] {
                let other = nb.grid;
                if classified[other] || !core.is_core_grid(other) {
                    continue;
                }
                if decide_pair(data, core, cur, other, eps, delta, seed, &mut counters) {
                    classified[other] = true;
                    seeds.push(other);
                }
            }
        }
        for &s in &seeds {
            map[s] = Some(cluster_count);
        }
        cluster_count += 1;
    }

    (
        GridClusterMap {
            cluster_of_grid: map,
            cluster_count,
        },
        counters,
    )
}

/// Stable ascending sort of the core grids by core-point count, LSD radix
/// over base-256 digits of the count (counts are not bounded by eta, so
/// the byte decomposition replaces identifier-style buckets).
fn sort_core_grids_by_count(core: &CoreFlags, core_grids: &[usize]) -> Vec<usize> {
    let mut order = core_grids.to_vec();
    let max_count = core_grids
        .iter()
        .map(|&g| core.core_count(g))
        .max()
        .unwrap_or(0);
    let mut scratch = vec![0usize; order.len()];
    let mut counts = [0usize; 256];
    let mut shift = 0u32;
    while max_count >> shift > 0 {
        counts.iter_mut().for_each(|c| *c = 0);
        for &g in &order {
            counts[(core.core_count(g) >> shift) & 0xFF] += 1;
        }
        let mut total = 0;
        for c in counts.iter_mut() {
            let here = *c;
            *c = total;
            total += here;
        }
        for &g in &order {
            let digit = (core.core_count(g) >> shift) & 0xFF;
            scratch[counts[digit]] = g;
            counts[digit] += 1;
        }
        std::mem::swap(&mut order, &mut scratch);
        shift += 8;
    }
    order
}

/// Low-density-first merge: core grids are visited in ascending core-count
/// order over a union-find structure. Each unordered neighboring pair is
/// considered once (from its earlier-visited side) and skipped without a
/// test when its grids already share a set. Produces the same partition as
/// the breadth-first variant; cluster ids are assigned in grid index
/// order.
#[allow(clippy::needless_range_loop)]
pub fn merge_core_grids_ldf(
    data: &Dataset,
    grids: &GridSet,
    neighbors: &NeighborLists,
    core: &CoreFlags,
    eps: f64,
    delta: f64,
    seed: u64,
) -> (GridClusterMap, MergeCounters) {
    let mut counters = MergeCounters::default();
    let core_grids: Vec<usize> = (0..grids.len()).filter(|&g| core.is_core_grid(g)).collect();
    let order = sort_core_grids_by_count(core, &core_grids);

    let mut visit_pos = vec![usize::MAX; grids.len()];
    for (pos, &g) in order.iter().enumerate() {
        visit_pos[g] = pos;
    }

    let mut uf = UnionFind::new(grids.len());
    for &gi in &order {
        for nb in &neighbors[gi] {
            let gj = nb.grid;
            if gj == gi || !core.is_core_grid(gj) {
                continue;
            }
            // Each unordered pair is handled once, at its later-visited
            // endpoint: connectivity only grows, so deferring a pair can
            // only turn it into a same-set skip. This is also why the
            // densest grids, visited last, skip most of their checks.
            if visit_pos[gj] > visit_pos[gi] {
                continue;
            }
            if uf.same(gi, gj) {
                continue;
            }
            if decide_pair(data, core, gi, gj, eps, delta, seed, &mut counters) {
                uf.union(gi, gj);
            }
        }
    }

    let mut map = vec![None; grids.len()];
    let mut root_to_id: HashMap<usize, usize> = HashMap::new();
    let mut cluster_count = 0usize;
    for g in 0..grids.len() {
        if !core.is_core_grid(g) {
            continue;
        }
        let root = uf.find(g);
        let id = *root_to_id.entry(root).or_insert_with(|| {
            let id = cluster_count;
            cluster_count += 1;
            id
        });
        map[g] = Some(id);
    }

    (
        GridClusterMap {
            cluster_of_grid: map,
            cluster_count,
        },
        counters,
    )
}

/// Labels every point. Core points take their grid's cluster. A non-core
/// point scans the neighboring grids in ascending offset order (own grid
/// first) and becomes a border point of the first core point found within
/// `eps`, core members in ascending point order; otherwise it is noise.
///
/// Returns the clustering and the number of distance evaluations spent.
#[allow(clippy::needless_range_loop)]
pub fn assign_non_core(
    data: &Dataset,
    grids: &GridSet,
    neighbors: &NeighborLists,
    core: &CoreFlags,
    map: &GridClusterMap,
    eps: f64,
) -> (Clustering, u64) {
    let mut labels = vec![NOISE; data.len()];
    let mut classes = vec![PointClass::Noise; data.len()];
    let mut evals: u64 = 0;

    for gi in 0..grids.len() {
        for &p in grids.members(gi) {
            if core.is_core[p] {
                classes[p] = PointClass::Core;
                labels[p] = map.cluster_of_grid[gi].expect("core grid has a cluster") as i64;
                continue;
            }
            let pc = data.point(p);
            'scan: for nb in &neighbors[gi] {
                for &q in &core.grid_core_members[nb.grid] {
                    evals += 1;
                    if within_eps(pc, data.point(q), eps) {
                        classes[p] = PointClass::Border;
                        labels[p] =
                            map.cluster_of_grid[nb.grid].expect("core grid has a cluster") as i64;
                        break 'scan;
                    }
                }
            }
        }
    }

    (
        Clustering {
            labels,
            classes,
            cluster_count: map.cluster_count,
        },
        evals,
    )
}

/// Observable counters of one pipeline run.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunStats {
    /// Wall time of the partitioning stage, seconds.
    pub t_partition: f64,
    /// Wall time of tree build plus neighboring-grid precompute, seconds.
    pub t_index: f64,
    /// Wall time of core identification, seconds.
    pub t_core: f64,
    /// Wall time of the merge stage, seconds.
    pub t_merge: f64,
    /// Wall time of non-core assignment, seconds.
    pub t_assign: f64,
    /// Total point-to-point distance evaluations across stages.
    pub dist_evals: u64,
    /// Largest merge iteration count observed (kappa).
    pub max_kappa: usize,
    /// Number of set-distance decisions performed.
    pub merge_tests: usize,
    /// Merge rounds that exceeded the per-round distance budget.
    pub budget_violations: usize,
    /// Number of non-empty grids.
    pub grid_count: usize,
    /// Maximum identifier coordinate.
    pub eta: GridCoord,
    /// Number of clusters found.
    pub cluster_count: usize,
}

impl RunStats {
    pub fn t_total(&self) -> f64 {
        self.t_partition + self.t_index + self.t_core + self.t_merge + self.t_assign
    }
}

/// Runs the whole pipeline. `params.delta > 0` switches the merge stage to
/// the approximate decision; 0 keeps it exact.
pub fn grit_dbscan(
    data: &Dataset,
    params: &Params,
    variant: Variant,
    seed: u64,
) -> (Clustering, RunStats) {
    let mut stats = RunStats::default();

    let t = Instant::now();
    let grids = partition(data, params.eps);
    stats.t_partition = t.elapsed().as_secs_f64();
    stats.grid_count = grids.len();
    stats.eta = grids.eta;

    let t = Instant::now();
    let tree =
        GridTree::build(&grids, params.min_pts).expect("partition yields sorted, unique grids");
    let neighbors = compute_neighbor_lists(&grids, &tree);
    stats.t_index = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (core, core_evals) = identify_core_points(data, &grids, &neighbors, params);
    stats.t_core = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (map, counters) = match variant {
        Variant::Bfs => {
            merge_core_grids_bfs(data, &grids, &neighbors, &core, params.eps, params.delta, seed)
        }
        Variant::Ldf => {
            merge_core_grids_ldf(data, &grids, &neighbors, &core, params.eps, params.delta, seed)
        }
    };
    stats.t_merge = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (clustering, assign_evals) =
        assign_non_core(data, &grids, &neighbors, &core, &map, params.eps);
    stats.t_assign = t.elapsed().as_secs_f64();

    stats.dist_evals = core_evals + counters.distance_evaluations + assign_evals;
    stats.max_kappa = counters.max_kappa;
    stats.merge_tests = counters.merge_tests;
    stats.budget_violations = counters.budget_violations;
    stats.cluster_count = map.cluster_count;

    (clustering, stats)
}
