//! Domain types and metric primitives shared by the whole pipeline.
//!
//! Points live in a [`Dataset`] with flat row-major storage. All neighborhood
//! tests use the closed ball `dist(p, q) <= eps`, and every threshold
//! comparison in the crate goes through [`within_eps`] so that the main
//! algorithm and the brute-force oracles can never disagree on a boundary
//! case by taking different floating-point routes.

use crate::error::{Error, Result};

/// Label value reserved for noise points in cluster label vectors.
///
/// Cluster identifiers are consecutive integers starting at 0, so any
/// negative value is free; -1 keeps label files a single integer column.
pub const NOISE: i64 = -1;

/// Classification of a point after clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    /// At least `min_pts` points (itself included) within `eps`.
    Core,
    /// Non-core, but within `eps` of some core point.
    Border,
    /// Neither core nor border.
    Noise,
}

/// A set of `n` points in `d`-dimensional Euclidean space.
///
/// Coordinates are stored flat (row-major) and are validated to be finite
/// and of uniform dimension at construction. `d >= 2` is required: the
/// angle-based pruning used during merging works with planar angles and
/// one-dimensional inputs are rejected rather than special-cased.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    coords: Vec<f64>,
    dim: usize,
}

impl Dataset {
    /// Builds a dataset from flat row-major coordinates.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter {
                name: "d",
                message: format!("dimension must be at least 2, got {dim}"),
            });
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coords.len() % dim,
            });
        }
        for (i, &c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFiniteCoordinate {
                    point: i / dim,
                    dim: i % dim,
                });
            }
        }
        Ok(Dataset { coords, dim })
    }

    /// Builds a dataset from one row per point, checking that all rows
    /// have the same length.
    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    /// An empty dataset of the given dimension.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Dimension count.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of point `i`.
    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Iterator over all points in index order.
    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// The flat coordinate storage.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Clustering parameters.
///
/// `delta` is the slack of the approximate merge test; 0 selects the exact
/// algorithm and is the default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub eps: f64,
    pub min_pts: usize,
    pub delta: f64,
}

impl Params {
    pub fn new(eps: f64, min_pts: usize) -> Result<Self> {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "eps",
                message: format!("must be a positive finite real, got {eps}"),
            });
        }
        if min_pts < 1 {
            return Err(Error::InvalidParameter {
                name: "min_pts",
                message: "must be at least 1".to_string(),
            });
        }
        Ok(Params {
            eps,
            min_pts,
            delta: 0.0,
        })
    }

    /// Sets the approximate-merge slack.
    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::InvalidParameter {
                name: "delta",
                message: format!("must be a non-negative finite real, got {delta}"),
            });
        }
        self.delta = delta;
        Ok(self)
    }
}

/// Per-point cluster labels and classes.
///
/// Invariants: `labels[i] == NOISE` iff `classes[i] == Noise`, and every
/// cluster id in `0..cluster_count` is carried by at least one core point.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub labels: Vec<i64>,
    pub classes: Vec<PointClass>,
    pub cluster_count: usize,
}

impl Clustering {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Euclidean distance between two points of equal dimension.
///
/// Panics if the slices have different lengths.
#[inline]
pub fn distance(p: &[f64], q: &[f64]) -> f64 {
    squared_distance(p, q).sqrt()
}

/// Squared Euclidean distance; avoids the square root where only
/// comparisons are needed.
///
/// Panics if the slices have different lengths.
#[inline]
pub fn squared_distance(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(
        p.len(),
        q.len(),
        "dimension mismatch: {} vs {}",
        p.len(),
        q.len()
    );
    let mut acc = 0.0;
    for (a, b) in p.iter().zip(q.iter()) {
        let diff = a - b;
        acc += diff * diff;
    }
    acc
}

/// Closed-ball neighborhood test `dist(p, q) <= eps`.
///
/// Single authoritative predicate for every threshold comparison on point
/// pairs in this crate.
#[inline]
pub fn within_eps(p: &[f64], q: &[f64], eps: f64) -> bool {
    squared_distance(p, q).sqrt() <= eps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pythagorean_triple() {
        assert_eq!(distance(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
        assert_eq!(squared_distance(&[0.0, 0.0], &[3.0, 4.0]), 25.0);
    }

    #[test]
    fn identical_points() {
        let p = [1.25, -3.5, 7.0];
        assert_eq!(distance(&p, &p), 0.0);
        assert_eq!(squared_distance(&p, &p), 0.0);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn mismatched_dimensions_panic() {
        distance(&[0.0, 0.0], &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn dataset_rejects_d1() {
        assert!(Dataset::new(1, vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn dataset_rejects_non_finite() {
        let err = Dataset::new(2, vec![0.0, f64::NAN]).unwrap_err();
        assert_eq!(err, Error::NonFiniteCoordinate { point: 0, dim: 1 });
    }

    #[test]
    fn dataset_rejects_ragged_rows() {
        let rows = vec![vec![0.0, 1.0], vec![2.0]];
        assert!(Dataset::from_rows(2, &rows).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(0.0, 3).is_err());
        assert!(Params::new(-1.0, 3).is_err());
        assert!(Params::new(1.0, 0).is_err());
        assert!(Params::new(1.0, 1).is_ok());
        assert!(Params::new(1.0, 1).unwrap().with_delta(-0.5).is_err());
    }

    /// Independently coded evaluation: explicit index loop, squaring via
    /// powi, left-to-right accumulation so rounding is identical.
    fn reference_distance(p: &[f64], q: &[f64]) -> f64 {
        let mut total = 0.0f64;
        for j in 0..p.len() {
            total += (p[j] - q[j]).powi(2);
        }
        total.sqrt()
    }

    #[test]
    fn matches_independent_evaluation_bit_for_bit() {
        // Fixed xorshift stream; no external RNG needed for a
        // deterministic unit test.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 200.0 - 100.0
        };
        for _ in 0..1000 {
            let d = 2 + (next().abs() as usize) % 4;
            let p: Vec<f64> = (0..d).map(|_| next()).collect();
            let q: Vec<f64> = (0..d).map(|_| next()).collect();
            let a = distance(&p, &q);
            let b = reference_distance(&p, &q);
            assert_eq!(a.to_bits(), b.to_bits(), "distance mismatch: {a} vs {b}");
        }
    }

    #[test]
    fn squared_vs_plain_sign_agreement() {
        let mut state = 99u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..2000 {
            let p = [next() * 10.0, next() * 10.0, next() * 10.0];
            let q = [next() * 10.0, next() * 10.0, next() * 10.0];
            let eps = next() * 10.0 + 1e-6;
            let dist = distance(&p, &q);
            if (dist - eps).abs() > 1e-9 * eps {
                let by_sq = squared_distance(&p, &q) <= eps * eps;
                let by_dist = dist <= eps;
                assert_eq!(by_sq, by_dist);
            }
        }
    }
}
