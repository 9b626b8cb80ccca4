//! Independent brute-force references used to test the main pipeline, plus
//! the equivalence comparator the test suites run against them.
//!
//! The oracles deliberately share nothing with the fast path except the
//! core distance predicate, so a bug in the grid machinery and a bug here
//! would have to coincide to go unnoticed.

use std::collections::HashMap;

use crate::partition::{GridId, GridSet};
use crate::points::{within_eps, Clustering, Dataset, Params, PointClass, NOISE};

/// Same shape as [`Clustering`], produced by the quadratic reference.
pub type OracleClustering = Clustering;

/// Reference DBSCAN: quadratic neighborhood counting, flood fill over core
/// points, then border attachment in ascending point order (a border point
/// takes the cluster of the lowest-indexed core point within `eps`).
#[allow(clippy::needless_range_loop)]
pub fn brute_dbscan(data: &Dataset, params: &Params) -> OracleClustering {
    let n = data.len();
    let eps = params.eps;

    // Closed-ball neighbor lists; a point neighbors itself.
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if within_eps(data.point(i), data.point(j), eps) {
                neighbors[i].push(j);
            }
        }
    }
    let is_core: Vec<bool> = neighbors
        .iter()
        .map(|ns| ns.len() >= params.min_pts)
        .collect();

    let mut labels = vec![NOISE; n];
    let mut cluster_count = 0usize;
    for start in 0..n {
        if !is_core[start] || labels[start] != NOISE {
            continue;
        }
        let id = cluster_count as i64;
        cluster_count += 1;
        labels[start] = id;
        let mut queue = vec![start];
        while let Some(c) = queue.pop() {
            for &q in &neighbors[c] {
                if is_core[q] && labels[q] == NOISE {
                    labels[q] = id;
                    queue.push(q);
                }
            }
        }
    }

    let mut classes = vec![PointClass::Noise; n];
    for i in 0..n {
        if is_core[i] {
            classes[i] = PointClass::Core;
            continue;
        }
        for &q in &neighbors[i] {
            if is_core[q] {
                classes[i] = PointClass::Border;
                labels[i] = labels[q];
                break;
            }
        }
    }

    Clustering {
        labels,
        classes,
        cluster_count,
    }
}

/// Minimum distance between two non-empty point sets: the plain double
/// loop over all cross pairs.
pub fn brute_min_dist(data: &Dataset, set_a: &[usize], set_b: &[usize]) -> f64 {
    assert!(!set_a.is_empty(), "set A must be non-empty");
    assert!(!set_b.is_empty(), "set B must be non-empty");
    let mut best = f64::INFINITY;
    for &a in set_a {
        for &b in set_b {
            let sq = crate::points::squared_distance(data.point(a), data.point(b));
            if sq < best {
                best = sq;
            }
        }
    }
    best.sqrt()
}

/// Exhaustive neighboring-grid scan.
///
/// Two cells neighbor each other exactly when the integer offset
/// `sum_j max(|g_j - g'_j| - 1, 0)^2` stays below `d`: at `d` or above,
/// every point pair across the two cells is strictly farther than `eps`
/// because cells are half-open under floor quantization. The rule is
/// integer-exact, so this scan and the grid-tree query admit bit-for-bit
/// comparison.
pub fn brute_neighbor_grids(grids: &GridSet, g: &GridId) -> Vec<usize> {
    let d = g.len() as u64;
    let mut out = Vec::new();
    for (idx, grid) in grids.iter().enumerate() {
        let mut offset: u64 = 0;
        for j in 0..g.len() {
            let gap = grid.id[j].abs_diff(g[j]) as u64;
            let step = gap.saturating_sub(1);
            offset += step * step;
            if offset >= d {
                break;
            }
        }
        if offset < d {
            out.push(idx);
        }
    }
    out
}

/// Result of an equivalence comparison; `detail` points at the first
/// discrepancy when the clusterings differ.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub detail: String,
}

impl EquivalenceReport {
    fn fail(detail: String) -> Self {
        EquivalenceReport {
            equivalent: false,
            detail,
        }
    }
}

/// Compares two clusterings of the same dataset modulo the freedoms the
/// algorithm family genuinely has:
///
/// 1. core flags must be identical;
/// 2. the partitions of core points must agree up to a bijective
///    relabeling;
/// 3. the noise sets must be identical;
/// 4. every border point must be within `eps` of some core point of its
///    assigned cluster (checked in both directions), because a border
///    point reachable from several clusters may be assigned to any one of
///    them.
///
/// Panics if the clusterings have different lengths.
pub fn equivalent(
    data: &Dataset,
    eps: f64,
    a: &Clustering,
    b: &Clustering,
) -> EquivalenceReport {
    assert_eq!(a.len(), b.len(), "clusterings cover different point counts");
    assert_eq!(a.len(), data.len(), "clustering does not match dataset");
    let n = a.len();

    for i in 0..n {
        let ca = a.classes[i] == PointClass::Core;
        let cb = b.classes[i] == PointClass::Core;
        if ca != cb {
            return EquivalenceReport::fail(format!(
                "point {i}: core in {}, non-core in {}",
                if ca { "left" } else { "right" },
                if ca { "right" } else { "left" }
            ));
        }
    }

    for i in 0..n {
        let na = a.classes[i] == PointClass::Noise;
        let nb = b.classes[i] == PointClass::Noise;
        if na != nb {
            return EquivalenceReport::fail(format!("point {i}: noise only in one clustering"));
        }
        if na && (a.labels[i] != NOISE || b.labels[i] != NOISE) {
            return EquivalenceReport::fail(format!("point {i}: noise without NOISE label"));
        }
    }

    // Bijective relabeling over core points.
    let mut fwd: HashMap<i64, i64> = HashMap::new();
    let mut bwd: HashMap<i64, i64> = HashMap::new();
    for i in 0..n {
        if a.classes[i] != PointClass::Core {
            continue;
        }
        let (la, lb) = (a.labels[i], b.labels[i]);
        if la == NOISE || lb == NOISE {
            return EquivalenceReport::fail(format!("core point {i} labeled as noise"));
        }
        match fwd.get(&la) {
            Some(&mapped) if mapped != lb => {
                return EquivalenceReport::fail(format!(
                    "core point {i}: cluster {la} maps to both {mapped} and {lb}"
                ));
            }
            None => {
                fwd.insert(la, lb);
            }
            _ => {}
        }
        match bwd.get(&lb) {
            Some(&mapped) if mapped != la => {
                return EquivalenceReport::fail(format!(
                    "core point {i}: cluster {lb} maps back to both {mapped} and {la}"
                ));
            }
            None => {
                bwd.insert(lb, la);
            }
            _ => {}
        }
    }

    // Border validity, both directions.
    for (name, this, other, map) in [
        ("left", a, b, &fwd),
        ("right", b, a, &bwd),
    ] {
        for i in 0..n {
            if this.classes[i] != PointClass::Border {
                continue;
            }
            let own = this.labels[i];
            if own == NOISE {
                return EquivalenceReport::fail(format!(
                    "border point {i} in {name} carries the noise label"
                ));
            }
            let Some(&expect_other) = map.get(&own) else {
                return EquivalenceReport::fail(format!(
                    "border point {i} in {name}: cluster {own} holds no core point"
                ));
            };
            let ok = (0..n).any(|q| {
                other.classes[q] == PointClass::Core
                    && other.labels[q] == expect_other
                    && within_eps(data.point(i), data.point(q), eps)
            });
            if !ok {
                return EquivalenceReport::fail(format!(
                    "border point {i} in {name}: no core point of its cluster within eps"
                ));
            }
        }
    }

    EquivalenceReport {
        equivalent: true,
        detail: String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::Dataset;

    fn data_of(rows: &[Vec<f64>]) -> Dataset {
        Dataset::from_rows(rows[0].len(), rows).unwrap()
    }

    #[test]
    fn two_points_at_eps_form_one_cluster() {
        let data = data_of(&[vec![0.0, 0.0], vec![1.0, 0.0]]);
        let c = brute_dbscan(&data, &Params::new(1.0, 2).unwrap());
        assert_eq!(c.classes, vec![PointClass::Core, PointClass::Core]);
        assert_eq!(c.labels, vec![0, 0]);
        assert_eq!(c.cluster_count, 1);
    }

    #[test]
    fn all_far_apart_is_all_noise() {
        let data = data_of(&[vec![0.0, 0.0], vec![10.0, 0.0], vec![0.0, 10.0]]);
        let c = brute_dbscan(&data, &Params::new(1.0, 2).unwrap());
        assert!(c.classes.iter().all(|&cl| cl == PointClass::Noise));
        assert!(c.labels.iter().all(|&l| l == NOISE));
        assert_eq!(c.cluster_count, 0);
    }

    /// Second, structurally different oracle: union-find over all
    /// core-core pairs within eps.
    #[allow(clippy::needless_range_loop)]
    fn core_partition_by_union_find(data: &Dataset, params: &Params) -> Vec<Option<usize>> {
        let n = data.len();
        let mut is_core = vec![false; n];
        for i in 0..n {
            let count = (0..n)
                .filter(|&j| within_eps(data.point(i), data.point(j), params.eps))
                .count();
            is_core[i] = count >= params.min_pts;
        }
        let mut uf = crate::unionfind::UnionFind::new(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if is_core[i] && is_core[j] && within_eps(data.point(i), data.point(j), params.eps)
                {
                    uf.union(i, j);
                }
            }
        }
        (0..n)
            .map(|i| if is_core[i] { Some(uf.find(i)) } else { None })
            .collect()
    }

    fn partitions_agree(a: &[Option<i64>], b: &[Option<usize>]) -> bool {
        let mut fwd = HashMap::new();
        let mut bwd = HashMap::new();
        for (&la, &lb) in a.iter().zip(b.iter()) {
            match (la, lb) {
                (None, None) => {}
                (Some(la), Some(lb)) => {
                    if *fwd.entry(la).or_insert(lb) != lb || *bwd.entry(lb).or_insert(la) != la {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        true
    }

    #[test]
    fn flood_fill_and_union_find_oracles_agree() {
        let mut state = 77u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..40 {
            let n = 2 + (next() * 60.0) as usize;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![next() * 10.0, next() * 10.0])
                .collect();
            let data = data_of(&rows);
            let params = Params::new(0.3 + next() * 2.0, 1 + (next() * 5.0) as usize).unwrap();
            let by_flood = brute_dbscan(&data, &params);
            let flood_cores: Vec<Option<i64>> = (0..n)
                .map(|i| {
                    (by_flood.classes[i] == PointClass::Core).then_some(by_flood.labels[i])
                })
                .collect();
            let by_uf = core_partition_by_union_find(&data, &params);
            assert!(partitions_agree(&flood_cores, &by_uf));
        }
    }

    #[test]
    fn core_partition_invariant_under_input_permutation() {
        let rows = vec![
            vec![0.0, 0.0],
            vec![0.5, 0.0],
            vec![1.0, 0.2],
            vec![5.0, 5.0],
            vec![5.4, 5.1],
            vec![9.0, 0.0],
        ];
        let data = data_of(&rows);
        let params = Params::new(0.8, 2).unwrap();
        let base = brute_dbscan(&data, &params);

        let perm = [3usize, 0, 5, 2, 4, 1];
        let permuted_rows: Vec<Vec<f64>> = perm.iter().map(|&i| rows[i].clone()).collect();
        let pdata = data_of(&permuted_rows);
        let pc = brute_dbscan(&pdata, &params);

        // Pull the permuted clustering back into original order and compare
        // with the comparator (which absorbs label renaming).
        let mut labels = vec![0i64; rows.len()];
        let mut classes = vec![PointClass::Noise; rows.len()];
        for (new_pos, &old) in perm.iter().enumerate() {
            labels[old] = pc.labels[new_pos];
            classes[old] = pc.classes[new_pos];
        }
        let pulled = Clustering {
            labels,
            classes,
            cluster_count: pc.cluster_count,
        };
        assert!(equivalent(&data, params.eps, &base, &pulled).equivalent);
    }

    #[test]
    fn min_dist_examples() {
        let data = data_of(&[vec![0.0, 0.0], vec![0.0, 2.0], vec![1.0, 1.0]]);
        assert_eq!(brute_min_dist(&data, &[0], &[1]), 2.0);
        // Overlapping sets sharing a point.
        assert_eq!(brute_min_dist(&data, &[0, 2], &[2, 1]), 0.0);
    }

    #[test]
    fn min_dist_matches_reordered_loop() {
        let mut state = 3u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let n = 2 + (next() * 30.0) as usize;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![next() * 5.0, next() * 5.0, next() * 5.0])
                .collect();
            let data = data_of(&rows);
            let split = 1 + (next() * (n as f64 - 1.0)) as usize;
            let a: Vec<usize> = (0..split).collect();
            let b: Vec<usize> = (split..n).collect();
            // Reordered: iterate b outer, a inner, track plain distances.
            let mut expect = f64::INFINITY;
            for &j in &b {
                for &i in &a {
                    let d = crate::points::distance(data.point(j), data.point(i));
                    if d < expect {
                        expect = d;
                    }
                }
            }
            let got = brute_min_dist(&data, &a, &b);
            assert!((got - expect).abs() <= 1e-12 * expect.max(1.0));
        }
    }

    #[test]
    #[should_panic(expected = "non-empty")]
    fn min_dist_rejects_empty() {
        let data = data_of(&[vec![0.0, 0.0]]);
        brute_min_dist(&data, &[], &[0]);
    }

    #[test]
    fn neighbor_scan_self_only() {
        let data = data_of(&[vec![1.0, 1.0]]);
        let gs = crate::partition::partition(&data, 1.0);
        let out = brute_neighbor_grids(&gs, gs.id(0));
        assert_eq!(out, vec![0]);
    }

    #[test]
    fn neighbor_scan_is_symmetric() {
        let mut state = 11u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let n = 5 + (next() * 80.0) as usize;
            let d = 2 + (next() * 2.0) as usize;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| next() * 20.0).collect())
                .collect();
            let data = data_of(&rows);
            let gs = crate::partition::partition(&data, 0.4 + next() * 3.0);
            let neigh: Vec<Vec<usize>> = (0..gs.len())
                .map(|i| brute_neighbor_grids(&gs, gs.id(i)))
                .collect();
            for (i, ns) in neigh.iter().enumerate() {
                for &j in ns {
                    assert!(neigh[j].contains(&i), "asymmetric neighbor relation");
                }
            }
        }
    }

    #[test]
    fn comparator_reflexive_and_relabel_invariant() {
        let data = data_of(&[
            vec![0.0, 0.0],
            vec![0.5, 0.0],
            vec![5.0, 5.0],
            vec![5.5, 5.0],
            vec![20.0, 20.0],
        ]);
        let params = Params::new(0.8, 2).unwrap();
        let c = brute_dbscan(&data, &params);
        assert!(equivalent(&data, params.eps, &c, &c).equivalent);

        // Swap cluster labels 0 and 1.
        let mut renamed = c.clone();
        for l in renamed.labels.iter_mut() {
            *l = match *l {
                0 => 1,
                1 => 0,
                other => other,
            };
        }
        assert!(equivalent(&data, params.eps, &c, &renamed).equivalent);
        assert!(equivalent(&data, params.eps, &renamed, &c).equivalent);
    }

    #[test]
    #[should_panic(expected = "different point counts")]
    fn comparator_rejects_size_mismatch() {
        let data = data_of(&[vec![0.0, 0.0], vec![0.5, 0.0]]);
        let params = Params::new(1.0, 2).unwrap();
        let c = brute_dbscan(&data, &params);
        let mut short = c.clone();
        short.labels.pop();
        short.classes.pop();
        equivalent(&data, params.eps, &c, &short);
    }

    #[test]
    fn comparator_flags_flipped_core() {
        let data = data_of(&[vec![0.0, 0.0], vec![0.5, 0.0], vec![0.9, 0.1]]);
        let params = Params::new(1.0, 2).unwrap();
        let c = brute_dbscan(&data, &params);
        let mut broken = c.clone();
        broken.classes[1] = PointClass::Border;
        let report = equivalent(&data, params.eps, &c, &broken);
        assert!(!report.equivalent);
        assert!(report.detail.contains("point 1"), "detail: {}", report.detail);
    }
}
