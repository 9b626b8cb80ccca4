//! A small hand-placed plane configuration with exactly known grid
//! layout, tree shape, and query results; the golden fixture for the
//! partition and grid tree test suites.
//!
//! With `eps = sqrt(2)` the cell side is 1, the 19 points fall into 9
//! grids with maximum identifier coordinate 5, and building the tree with
//! `min_pts = 3` gives the root exactly six fast-path entries.

use crate::partition::GridCoord;
use crate::points::Dataset;

/// The 19 points and the matching `eps`.
pub fn nineteen_point_config() -> (Dataset, f64) {
    let rows: Vec<Vec<f64>> = vec![
        vec![0.0, 2.5],
        vec![0.5, 2.2],
        vec![1.5, 1.5],
        vec![1.2, 1.8],
        vec![1.5, 3.5],
        vec![1.8, 3.2],
        vec![2.5, 0.0],
        vec![2.2, 0.7],
        vec![2.5, 2.5],
        vec![2.8, 2.2],
        vec![3.5, 3.5],
        vec![3.2, 3.8],
        vec![3.8, 3.2],
        vec![3.5, 4.5],
        vec![3.2, 4.2],
        vec![3.5, 5.5],
        vec![3.8, 5.2],
        vec![5.5, 3.5],
        vec![5.2, 3.2],
    ];
    (Dataset::from_rows(2, &rows).unwrap(), 2.0f64.sqrt())
}

/// The nine grid identifiers of the configuration, in lexicographic order.
pub fn nineteen_point_grid_ids() -> Vec<Vec<GridCoord>> {
    vec![
        vec![0, 2],
        vec![1, 1],
        vec![1, 3],
        vec![2, 0],
        vec![2, 2],
        vec![3, 3],
        vec![3, 4],
        vec![3, 5],
        vec![5, 3],
    ]
}
