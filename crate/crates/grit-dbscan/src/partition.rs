//! Grid partitioning.
//!
//! Each dimension of the feature space is divided into equal intervals of
//! length `eps / sqrt(d)`, so any two points in the same grid cell are
//! strictly closer than `eps`. A point's cell identifier is the vector of
//! floor-quantized coordinates relative to the per-dimension minima. Points
//! are radix-sorted by identifier (one counting-sort pass per dimension,
//! least-significant dimension first) and the sorted sequence is scanned
//! once to produce the non-empty grids in lexicographic identifier order.

use crate::points::Dataset;

/// One coordinate of a grid identifier.
pub type GridCoord = u32;

/// Identifier of a lattice cell: the d-tuple of interval numbers.
///
/// Ordering is lexicographic (derived from `Vec`'s ordering).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridId(Vec<GridCoord>);

impl GridId {
    pub fn new(coords: Vec<GridCoord>) -> Self {
        GridId(coords)
    }

    pub fn coords(&self) -> &[GridCoord] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for GridId {
    type Output = GridCoord;

    fn index(&self, j: usize) -> &GridCoord {
        &self.0[j]
    }
}

/// A non-empty grid: its identifier and the range of `sorted_order` holding
/// its member point indices.
#[derive(Debug, Clone)]
pub struct Grid {
    pub id: GridId,
    pub(crate) start: usize,
    pub(crate) len: usize,
}

/// The set of non-empty grids produced by [`partition`].
///
/// Grids are in lexicographic identifier order. `sorted_order` is a
/// permutation of point indices grouping same-grid points adjacently; each
/// grid's members are one contiguous slice of it.
#[derive(Debug, Clone)]
pub struct GridSet {
    grids: Vec<Grid>,
    sorted_order: Vec<usize>,
    /// Interval length `eps / sqrt(d)`.
    pub side: f64,
    /// Per-dimension coordinate minima.
    pub mins: Vec<f64>,
    /// Maximum identifier coordinate across all grids and dimensions.
    pub eta: GridCoord,
    dim: usize,
}

impl GridSet {
    pub fn len(&self) -> usize {
        self.grids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self, idx: usize) -> &Grid {
        &self.grids[idx]
    }

    pub fn id(&self, idx: usize) -> &GridId {
        &self.grids[idx].id
    }

    /// Point indices belonging to grid `idx`, in ascending point order.
    pub fn members(&self, idx: usize) -> &[usize] {
        let g = &self.grids[idx];
        &self.sorted_order[g.start..g.start + g.len]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Grid> {
        self.grids.iter()
    }

    pub fn sorted_order(&self) -> &[usize] {
        &self.sorted_order
    }

    /// Index of the grid with the given identifier, if non-empty.
    /// Binary search over the lexicographic order.
    pub fn find(&self, id: &GridId) -> Option<usize> {
        self.grids.binary_search_by(|g| g.id.cmp(id)).ok()
    }
}

/// Cell identifier of a point: coordinate `j` is
/// `floor((p[j] - mins[j]) / side)`.
///
/// Panics if `side <= 0` or if `p` and `mins` have different lengths.
pub fn grid_id(p: &[f64], mins: &[f64], side: f64) -> GridId {
    assert!(side > 0.0, "grid side length must be positive, got {side}");
    assert_eq!(p.len(), mins.len(), "dimension mismatch");
    GridId(
        p.iter()
            .zip(mins.iter())
            .map(|(&c, &mn)| ((c - mn) / side).floor() as GridCoord)
            .collect(),
    )
}

/// Stable lexicographic sort of grid identifiers by LSD radix sort:
/// one counting-sort pass per dimension, starting with the last dimension.
///
/// All identifier coordinates must be `<= eta`. Returns the permutation of
/// input positions; runs in `O(d * (n + eta))` with the count buffer
/// allocated once and reset per pass.
pub fn radix_sort_points(ids: &[GridId], eta: GridCoord) -> Vec<usize> {
    let n = ids.len();
    let mut order: Vec<usize> = (0..n).collect();
    if n == 0 {
        return order;
    }
    let d = ids[0].len();
    let buckets = eta as usize + 1;
    let mut counts = vec![0usize; buckets];
    let mut scratch = vec![0usize; n];

    for dim in (0..d).rev() {
        counts.iter_mut().for_each(|c| *c = 0);
        for &i in &order {
            counts[ids[i][dim] as usize] += 1;
        }
        // Prefix sums give each bucket's start offset.
        let mut total = 0;
        for c in counts.iter_mut() {
            let here = *c;
            *c = total;
            total += here;
        }
        for &i in &order {
            let key = ids[i][dim] as usize;
            scratch[counts[key]] = i;
            counts[key] += 1;
        }
        std::mem::swap(&mut order, &mut scratch);
    }
    order
}

/// Partitions a dataset into non-empty grids of side `eps / sqrt(d)`.
///
/// An empty dataset yields an empty grid set. Panics if `eps <= 0`.
pub fn partition(data: &Dataset, eps: f64) -> GridSet {
    assert!(eps > 0.0, "eps must be positive, got {eps}");
    let d = data.dim();
    let side = eps / (d as f64).sqrt();

    if data.is_empty() {
        return GridSet {
            grids: Vec::new(),
            sorted_order: Vec::new(),
            side,
            mins: vec![0.0; d],
            eta: 0,
            dim: d,
        };
    }

    let mut mins = data.point(0).to_vec();
    for p in data.iter().skip(1) {
        for (mn, &c) in mins.iter_mut().zip(p.iter()) {
            if c < *mn {
                *mn = c;
            }
        }
    }

    // Identifier generation; eta is known before sorting.
    let mut eta: GridCoord = 0;
    let ids: Vec<GridId> = data
        .iter()
        .map(|p| {
            let id = grid_id(p, &mins, side);
            for &c in id.coords() {
                if c > eta {
                    eta = c;
                }
            }
            id
        })
        .collect();

    let sorted_order = radix_sort_points(&ids, eta);

    // One scan over the sorted points closes a grid whenever the
    // identifier changes.
    let mut grids: Vec<Grid> = Vec::new();
    let mut start = 0usize;
    for pos in 1..=sorted_order.len() {
        let boundary =
            pos == sorted_order.len() || ids[sorted_order[pos]] != ids[sorted_order[start]];
        if boundary {
            grids.push(Grid {
                id: ids[sorted_order[start]].clone(),
                start,
                len: pos - start,
            });
            start = pos;
        }
    }

    GridSet {
        grids,
        sorted_order,
        side,
        mins,
        eta,
        dim: d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::{distance, Dataset};

    use crate::reference::{nineteen_point_config, nineteen_point_grid_ids};

    #[test]
    fn minimum_point_maps_to_origin_cell() {
        let mins = vec![-3.0, 4.0, 0.5];
        let id = grid_id(&[-3.0, 4.0, 0.5], &mins, 0.7);
        assert_eq!(id.coords(), &[0, 0, 0]);
    }

    #[test]
    fn direct_floor_evaluation() {
        // side = sqrt(2)/sqrt(2) = 1
        let id = grid_id(&[1.5, 0.2], &[0.0, 0.0], 1.0);
        assert_eq!(id.coords(), &[1, 0]);
    }

    #[test]
    #[should_panic(expected = "side length must be positive")]
    fn zero_side_panics() {
        grid_id(&[1.0, 1.0], &[0.0, 0.0], 0.0);
    }

    #[test]
    fn cell_roundtrip_when_sampling_inside_cell() {
        let mut state = 7u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let side = 0.37;
        let mins = vec![-1.0, 2.0, 0.0];
        for _ in 0..10_000 {
            let cell: Vec<GridCoord> = (0..3).map(|_| (next() * 50.0) as GridCoord).collect();
            // Stay away from the upper cell boundary so rounding cannot
            // push the sample into the next cell.
            let p: Vec<f64> = cell
                .iter()
                .zip(mins.iter())
                .map(|(&c, &mn)| mn + (c as f64 + next() * 0.999) * side)
                .collect();
            assert_eq!(grid_id(&p, &mins, side).coords(), cell.as_slice());
        }
    }

    #[test]
    fn radix_identity_on_sorted_input() {
        let ids: Vec<GridId> = vec![
            GridId::new(vec![0, 1]),
            GridId::new(vec![0, 2]),
            GridId::new(vec![1, 0]),
            GridId::new(vec![2, 2]),
        ];
        assert_eq!(radix_sort_points(&ids, 2), vec![0, 1, 2, 3]);
    }

    #[test]
    fn radix_stability_on_ties() {
        let ids: Vec<GridId> = (0..32).map(|_| GridId::new(vec![3, 1, 4])).collect();
        let order = radix_sort_points(&ids, 4);
        assert_eq!(order, (0..32).collect::<Vec<_>>());
    }

    #[test]
    fn radix_matches_comparison_sort() {
        let mut state = 1234u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as u32
        };
        for _ in 0..50 {
            let d = 2 + (next() % 4) as usize;
            let eta = 1 + next() % 9;
            let n = (next() % 200) as usize;
            let ids: Vec<GridId> = (0..n)
                .map(|_| GridId::new((0..d).map(|_| next() % (eta + 1)).collect()))
                .collect();
            let got = radix_sort_points(&ids, eta);
            let mut expect: Vec<usize> = (0..n).collect();
            expect.sort_by(|&a, &b| ids[a].cmp(&ids[b]).then(a.cmp(&b)));
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn nineteen_points_give_nine_grids_eta_five() {
        let (data, eps) = nineteen_point_config();
        let gs = partition(&data, eps);
        assert_eq!(gs.len(), 9);
        assert_eq!(gs.eta, 5);
        let ids: Vec<&[GridCoord]> = gs.iter().map(|g| g.id.coords()).collect();
        let expect = nineteen_point_grid_ids();
        let expect_refs: Vec<&[GridCoord]> = expect.iter().map(|v| v.as_slice()).collect();
        assert_eq!(ids, expect_refs);
        assert_eq!(gs.iter().map(|g| g.len).sum::<usize>(), 19);
    }

    #[test]
    fn identical_points_collapse_to_one_grid() {
        let rows = vec![vec![4.0, -2.0]; 17];
        let data = Dataset::from_rows(2, &rows).unwrap();
        let gs = partition(&data, 0.5);
        assert_eq!(gs.len(), 1);
        assert_eq!(gs.members(0).len(), 17);
        assert_eq!(gs.eta, 0);
    }

    #[test]
    fn empty_dataset_gives_empty_grid_set() {
        let data = Dataset::empty(3).unwrap();
        let gs = partition(&data, 1.0);
        assert!(gs.is_empty());
        assert_eq!(gs.dim(), 3);
    }

    #[test]
    fn grouping_matches_map_and_group_oracle() {
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..40 {
            let d = 2 + (next() * 3.0) as usize;
            let n = 1 + (next() * 120.0) as usize;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| next() * 30.0 - 10.0).collect())
                .collect();
            let data = Dataset::from_rows(d, &rows).unwrap();
            let eps = 0.3 + next() * 8.0;
            let gs = partition(&data, eps);

            // Oracle: map every point through grid_id and group by exact
            // tuple equality with a BTreeMap (lexicographic key order).
            let mut groups: std::collections::BTreeMap<Vec<GridCoord>, Vec<usize>> =
                std::collections::BTreeMap::new();
            for (i, p) in data.iter().enumerate() {
                let id = grid_id(p, &gs.mins, gs.side);
                groups.entry(id.coords().to_vec()).or_default().push(i);
            }
            assert_eq!(gs.len(), groups.len());
            for (idx, (key, members)) in groups.iter().enumerate() {
                assert_eq!(gs.id(idx).coords(), key.as_slice());
                let mut got = gs.members(idx).to_vec();
                got.sort_unstable();
                assert_eq!(&got, members);
            }
        }
    }

    #[test]
    fn same_grid_points_are_within_eps() {
        let mut state = 5u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..30 {
            let d = 2 + (next() * 3.0) as usize;
            let n = 2 + (next() * 150.0) as usize;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| next() * 12.0).collect())
                .collect();
            let data = Dataset::from_rows(d, &rows).unwrap();
            let eps = 0.5 + next() * 4.0;
            let gs = partition(&data, eps);
            for gi in 0..gs.len() {
                let members = gs.members(gi);
                for (a_pos, &a) in members.iter().enumerate() {
                    for &b in &members[a_pos + 1..] {
                        assert!(distance(data.point(a), data.point(b)) <= eps);
                    }
                }
            }
        }
    }
}
