//! A (d+1)-level key tree over the non-empty grids, answering
//! neighboring-grid queries.
//!
//! Level 1 is a root without a key; levels 2..=d+1 carry one identifier
//! coordinate each, so the keys along any root-to-leaf path spell the grid
//! identifier of the leaf's grid. Each node chains its children through
//! `next` links in strictly increasing key order. Nodes with more than
//! `min_pts` children additionally get fast-path table entries that map a
//! query key directly to the smallest-keyed child inside the query window,
//! replacing the linear prefix scan.
//!
//! A query for grid `g` walks the tree level by level, keeping only
//! children whose key lies within `ceil(sqrt(d))` of the matching query
//! coordinate and whose accumulated offset stays below `d`. The offset adds
//! `max(|key - g_j| - 1, 0)^2` per level, so `offset * eps^2 / d` is a
//! lower bound on the squared box distance between `g` and every grid in
//! the child's subtree; once it reaches `d`, no grid below can contain a
//! point within `eps` of any point of `g`. Results come back sorted by
//! offset (counting sort), with the queried grid itself first when present.
//!
//! Queries carry offsets in a query-local frontier, never in the shared
//! nodes, so a built tree can serve concurrent queries.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::partition::{GridCoord, GridId, GridSet};

/// Stable serial number of a tree node (index into the node arena; the
/// root is always serial 0 and grids create nodes in lexicographic order).
pub type NodeSerial = u32;

#[derive(Debug, Clone)]
struct Node {
    key: GridCoord,
    first_child: Option<NodeSerial>,
    last_child: Option<NodeSerial>,
    next: Option<NodeSerial>,
    child_count: usize,
    /// Leaf nodes reference the grid they identify.
    grid: Option<usize>,
}

impl Node {
    fn new(key: GridCoord) -> Self {
        Node {
            key,
            first_child: None,
            last_child: None,
            next: None,
            child_count: 0,
            grid: None,
        }
    }
}

/// A non-empty neighboring grid returned by [`GridTree::neighbors`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    /// Index of the grid in the [`GridSet`].
    pub grid: usize,
    /// Accumulated integer offset; `offset * eps^2 / d` lower-bounds the
    /// squared box distance to the queried grid.
    pub offset: u32,
}

/// The grid tree plus its fast-path table.
#[derive(Debug, Clone)]
pub struct GridTree {
    nodes: Vec<Node>,
    table: HashMap<(NodeSerial, GridCoord), NodeSerial>,
    dim: usize,
    eta: GridCoord,
    min_pts: usize,
    /// Query window half-width `ceil(sqrt(d))`.
    window: GridCoord,
}

/// Exact integer `ceil(sqrt(d))`.
fn ceil_sqrt(d: usize) -> GridCoord {
    (1u32..).find(|w| (*w as usize) * (*w as usize) >= d).unwrap()
}

impl GridTree {
    /// Builds the tree over a lexicographically ordered grid set.
    ///
    /// Fails if the grids are out of order or duplicated (both detectable
    /// because a fresh path would need a key not larger than the current
    /// last child).
    pub fn build(grids: &GridSet, min_pts: usize) -> Result<Self> {
        Self::build_with_fast_path(grids, min_pts, true)
    }

    /// As [`build`](Self::build), optionally skipping the fast-path table.
    /// With the table disabled every windowed child lookup falls back to
    /// the linear sibling scan; query results are identical.
    pub fn build_with_fast_path(
        grids: &GridSet,
        min_pts: usize,
        use_fast_path: bool,
    ) -> Result<Self> {
        let ids: Vec<&GridId> = grids.iter().map(|g| &g.id).collect();
        Self::build_from_ids(&ids, grids.dim(), grids.eta, min_pts, use_fast_path)
    }

    pub(crate) fn build_from_ids(
        ids: &[&GridId],
        d: usize,
        eta: GridCoord,
        min_pts: usize,
        use_fast_path: bool,
    ) -> Result<Self> {
        let mut tree = GridTree {
            nodes: vec![Node::new(0)],
            table: HashMap::new(),
            dim: d,
            eta,
            min_pts,
            window: ceil_sqrt(d),
        };

        for (gi, id) in ids.iter().enumerate() {
            let mut t: NodeSerial = 0;
            let mut matched_whole_path = true;
            for j in 0..d {
                let tc = tree.nodes[t as usize].last_child;
                match tc {
                    Some(tc) if tree.nodes[tc as usize].key == id[j] => {
                        t = tc;
                    }
                    _ => {
                        if let Some(tc) = tc {
                            if id[j] < tree.nodes[tc as usize].key {
                                return Err(Error::UnsortedGrids { position: gi });
                            }
                        }
                        // Grow the remaining path down to the leaf. Only
                        // the first new node has a previous sibling.
                        for l in j..d {
                            let nd = tree.push_child(t, id[l]);
                            t = nd;
                        }
                        matched_whole_path = false;
                        break;
                    }
                }
            }
            if matched_whole_path {
                return Err(Error::DuplicateGrid { position: gi });
            }
            tree.nodes[t as usize].grid = Some(gi);
        }

        if use_fast_path {
            tree.populate_fast_path();
        }
        Ok(tree)
    }

    fn push_child(&mut self, parent: NodeSerial, key: GridCoord) -> NodeSerial {
        let serial = self.nodes.len() as NodeSerial;
        self.nodes.push(Node::new(key));
        let p = &mut self.nodes[parent as usize];
        let prev_last = p.last_child;
        p.last_child = Some(serial);
        p.child_count += 1;
        if p.first_child.is_none() {
            p.first_child = Some(serial);
        }
        if let Some(prev) = prev_last {
            self.nodes[prev as usize].next = Some(serial);
        }
        serial
    }

    /// For every node with more than `min_pts` children, map each key in
    /// `0..=eta` covered by some child's window to the smallest-keyed
    /// child whose key lies within `window` of it.
    fn populate_fast_path(&mut self) {
        let w = self.window;
        let mut entries = Vec::new();
        for (serial, node) in self.nodes.iter().enumerate() {
            if node.child_count <= self.min_pts {
                continue;
            }
            let mut nd = node.first_child;
            let mut pos: GridCoord = 0;
            while let Some(c) = nd {
                let key = self.nodes[c as usize].key;
                pos = pos.max(key.saturating_sub(w));
                while pos <= key + w && pos <= self.eta {
                    entries.push(((serial as NodeSerial, pos), c));
                    pos += 1;
                }
                nd = self.nodes[c as usize].next;
            }
        }
        self.table.extend(entries);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Query window half-width `ceil(sqrt(d))`.
    pub fn window(&self) -> GridCoord {
        self.window
    }

    pub fn root(&self) -> NodeSerial {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn key(&self, node: NodeSerial) -> GridCoord {
        self.nodes[node as usize].key
    }

    pub fn child_count(&self, node: NodeSerial) -> usize {
        self.nodes[node as usize].child_count
    }

    /// Number of fast-path table entries.
    pub fn fast_path_len(&self) -> usize {
        self.table.len()
    }

    /// Fast-path entry for `(node, key)`, if present.
    pub fn fast_path_lookup(&self, node: NodeSerial, key: GridCoord) -> Option<NodeSerial> {
        self.table.get(&(node, key)).copied()
    }

    /// Children of `node` with keys in `[key - window, key + window]`, in
    /// increasing key order. Uses the fast-path table when the node has
    /// more than `min_pts` children, the linear sibling scan otherwise;
    /// both paths return the same sequence.
    pub fn children_in_window(&self, node: NodeSerial, key: GridCoord) -> Vec<NodeSerial> {
        let mut out = Vec::new();
        self.for_children_in_window(node, key, |c| out.push(c));
        out
    }

    #[inline]
    fn for_children_in_window<F: FnMut(NodeSerial)>(
        &self,
        node: NodeSerial,
        key: GridCoord,
        mut visit: F,
    ) {
        let lo = key.saturating_sub(self.window);
        let hi = key.saturating_add(self.window);
        let n = &self.nodes[node as usize];
        let start = if n.child_count > self.min_pts {
            match self.table.get(&(node, key)) {
                Some(&c) => Some(c),
                // No entry means no child key falls in the window; the
                // scan below confirms that cheaply.
                None => self.scan_first_in_window(n.first_child, lo),
            }
        } else {
            self.scan_first_in_window(n.first_child, lo)
        };
        let mut nd = start;
        while let Some(c) = nd {
            let node = &self.nodes[c as usize];
            if node.key > hi {
                break;
            }
            visit(c);
            nd = node.next;
        }
    }

    fn scan_first_in_window(
        &self,
        first: Option<NodeSerial>,
        lo: GridCoord,
    ) -> Option<NodeSerial> {
        let mut nd = first;
        while let Some(c) = nd {
            if self.nodes[c as usize].key >= lo {
                return Some(c);
            }
            nd = self.nodes[c as usize].next;
        }
        None
    }

    /// Linear-scan variant of [`children_in_window`](Self::children_in_window),
    /// ignoring the fast-path table. Exposed for equivalence checks.
    pub fn children_in_window_linear(&self, node: NodeSerial, key: GridCoord) -> Vec<NodeSerial> {
        let lo = key.saturating_sub(self.window);
        let hi = key.saturating_add(self.window);
        let mut out = Vec::new();
        let mut nd = self.nodes[node as usize].first_child;
        while let Some(c) = nd {
            let k = self.nodes[c as usize].key;
            if k > hi {
                break;
            }
            if k >= lo {
                out.push(c);
            }
            nd = self.nodes[c as usize].next;
        }
        out
    }

    /// All non-empty grids whose subtree offset stays below `d`, i.e. the
    /// grids that can contain points within `eps` of a point of `g`.
    ///
    /// Sorted ascending by offset; the queried grid itself (offset 0)
    /// comes first when it is non-empty. Callers that need strict
    /// neighbors drop the leading self entry.
    pub fn neighbors(&self, g: &GridId) -> Vec<Neighbor> {
        assert_eq!(g.len(), self.dim, "query dimension mismatch");
        let d = self.dim as u32;

        // (node, offset, exact-prefix-match)
        let mut frontier: Vec<(NodeSerial, u32, bool)> = vec![(0, 0, true)];
        let mut next_frontier = Vec::new();
        for j in 0..self.dim {
            let target = g[j];
            next_frontier.clear();
            for &(nd, off, exact) in &frontier {
                self.for_children_in_window(nd, target, |c| {
                    let key = self.nodes[c as usize].key;
                    let gap = key.abs_diff(target);
                    let step = gap.saturating_sub(1);
                    let off = off + step * step;
                    if off < d {
                        next_frontier.push((c, off, exact && gap == 0));
                    }
                });
            }
            std::mem::swap(&mut frontier, &mut next_frontier);
        }

        // Counting sort over offsets in [0, d); stable, so grids with
        // equal offset keep lexicographic order. The exact-match leaf is
        // promoted to the front of the offset-0 bucket.
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); self.dim];
        let mut self_grid = None;
        for &(nd, off, exact) in &frontier {
            let grid = self.nodes[nd as usize]
                .grid
                .expect("frontier nodes at level d+1 are leaves");
            if exact {
                self_grid = Some(grid);
            } else {
                buckets[off as usize].push(grid);
            }
        }
        let mut out = Vec::with_capacity(frontier.len());
        if let Some(grid) = self_grid {
            out.push(Neighbor { grid, offset: 0 });
        }
        for (off, bucket) in buckets.iter().enumerate() {
            for &grid in bucket {
                out.push(Neighbor {
                    grid,
                    offset: off as u32,
                });
            }
        }
        out
    }

    /// Depth-first readout of the key paths from root to every leaf, in
    /// left-to-right order. Reproduces the grid identifier sequence the
    /// tree was built from.
    pub fn key_paths(&self) -> Vec<Vec<GridCoord>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.dfs(0, &mut path, &mut out);
        out
    }

    fn dfs(&self, node: NodeSerial, path: &mut Vec<GridCoord>, out: &mut Vec<Vec<GridCoord>>) {
        let n = &self.nodes[node as usize];
        if n.grid.is_some() {
            out.push(path.clone());
            return;
        }
        let mut child = n.first_child;
        while let Some(c) = child {
            path.push(self.nodes[c as usize].key);
            self.dfs(c, path, out);
            path.pop();
            child = self.nodes[c as usize].next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{partition, GridId};
    use crate::points::Dataset;

    fn nineteen() -> (crate::partition::GridSet, Dataset) {
        let (data, eps) = crate::reference::nineteen_point_config();
        (partition(&data, eps), data)
    }

    #[test]
    fn root_fast_path_entries_for_nineteen_point_config() {
        let (gs, _) = nineteen();
        let tree = GridTree::build(&gs, 3).unwrap();
        // Root has five children (first-coordinate values 0,1,2,3,5), so
        // with min_pts = 3 it gets fast-path entries; serials follow
        // creation order, t1..t14.
        assert_eq!(tree.child_count(tree.root()), 5);
        let expect = [(0, 1), (1, 1), (2, 1), (3, 3), (4, 6), (5, 9)];
        for (key, serial) in expect {
            assert_eq!(
                tree.fast_path_lookup(tree.root(), key),
                Some(serial),
                "entry for key {key}"
            );
        }
        assert_eq!(tree.fast_path_len(), 6);
        assert_eq!(tree.node_count(), 15); // root + 14
    }

    #[test]
    fn query_3_3_matches_worked_result() {
        let (gs, _) = nineteen();
        let tree = GridTree::build(&gs, 3).unwrap();
        let result = tree.neighbors(&GridId::new(vec![3, 3]));
        // Self grid (3,3) first, then neighbors by ascending offset.
        assert_eq!(gs.id(result[0].grid).coords(), &[3, 3]);
        assert_eq!(result[0].offset, 0);
        let strict: Vec<&[GridCoord]> = result[1..]
            .iter()
            .map(|n| gs.id(n.grid).coords())
            .collect();
        let mut strict_sorted = strict.clone();
        strict_sorted.sort();
        assert_eq!(
            strict_sorted,
            vec![&[1, 3][..], &[2, 2], &[3, 4], &[3, 5], &[5, 3]]
        );
        // Offsets ascend.
        for pair in result.windows(2) {
            assert!(pair[0].offset <= pair[1].offset);
        }
    }

    #[test]
    fn single_grid_tree_and_self_query() {
        let rows = vec![vec![1.0, 2.0, 3.0]; 4];
        let data = Dataset::from_rows(3, &rows).unwrap();
        let gs = partition(&data, 1.0);
        assert_eq!(gs.len(), 1);
        let tree = GridTree::build(&gs, 2).unwrap();
        // Single path: root + d nodes.
        assert_eq!(tree.node_count(), 1 + 3);
        assert_eq!(tree.fast_path_len(), 0);
        let result = tree.neighbors(gs.id(0));
        assert_eq!(result.len(), 1);
        assert_eq!(result[0].grid, 0);
        assert_eq!(result[0].offset, 0);
    }

    #[test]
    fn key_readout_reproduces_identifier_sequence() {
        let (gs, _) = nineteen();
        let tree = GridTree::build(&gs, 3).unwrap();
        let paths = tree.key_paths();
        let expect = crate::reference::nineteen_point_grid_ids();
        assert_eq!(paths, expect);
    }

    #[test]
    fn build_determinism() {
        let (gs, _) = nineteen();
        let a = GridTree::build(&gs, 3).unwrap();
        let b = GridTree::build(&gs, 3).unwrap();
        assert_eq!(a.key_paths(), b.key_paths());
        assert_eq!(a.fast_path_len(), b.fast_path_len());
    }

    #[test]
    fn children_window_example() {
        // Children keys {0, 3, 5}; key 3 with window 2 selects {3, 5}.
        let rows = vec![vec![0.0, 0.0], vec![3.3, 0.0], vec![5.5, 0.0]];
        let data = Dataset::from_rows(2, &rows).unwrap();
        let eps = 2.0f64.sqrt(); // side 1
        let gs = partition(&data, eps);
        let tree = GridTree::build(&gs, 1).unwrap();
        let got: Vec<GridCoord> = tree
            .children_in_window(tree.root(), 3)
            .iter()
            .map(|&c| tree.key(c))
            .collect();
        assert_eq!(got, vec![3, 5]);
        // A window covering no child key.
        assert!(tree.children_in_window(tree.root(), 8).is_empty());
    }

    #[test]
    fn unsorted_grids_rejected() {
        let a = GridId::new(vec![2, 0]);
        let b = GridId::new(vec![1, 3]);
        let err = GridTree::build_from_ids(&[&a, &b], 2, 3, 1, true);
        assert!(matches!(err, Err(Error::UnsortedGrids { position: 1 })));
    }

    #[test]
    fn duplicate_grid_rejected() {
        let a = GridId::new(vec![1, 2]);
        let err = GridTree::build_from_ids(&[&a, &a], 2, 2, 1, true);
        assert!(matches!(err, Err(Error::DuplicateGrid { position: 1 })));
    }
}
