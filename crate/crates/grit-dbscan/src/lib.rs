//! Exact density-based clustering over a grid index.
//!
//! The pipeline partitions the input into cells of side `eps / sqrt(d)`,
//! organizes the non-empty cells in a grid tree for neighboring-grid
//! queries, identifies core points with early exit over offset-ordered
//! neighbor grids, merges neighboring core grids with a pruned
//! set-distance decision, and finally classifies border and noise points.
//! The result is provably identical to the textbook quadratic algorithm;
//! the [`oracle`] module carries brute-force references and an equivalence
//! comparator, and [`datagen`] a seed-spreader generator for clustered
//! test data.

pub mod cluster;
pub mod datagen;
pub mod error;
pub mod gridtree;
pub mod merge;
pub mod oracle;
pub mod partition;
pub mod points;
pub mod reference;
pub mod unionfind;

pub use cluster::{grit_dbscan, RunStats, Variant};
pub use error::{Error, Result};
pub use points::{Clustering, Dataset, Params, PointClass, NOISE};
