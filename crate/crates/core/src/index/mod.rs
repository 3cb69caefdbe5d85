//! Dynamic orthogonal range search: insert points, ask whether a box is non-empty.

mod kdtree;
mod linear;
mod range_tree;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use kdtree::KdTree;
pub use linear::LinearScan;
pub use range_tree::RangeTree;

pub type RowId = u32;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum IndexError {
    #[error("expected {expected} coordinates, got {found}")]
    Dimension { expected: usize, found: usize },
}

/// Axis-aligned box `lower[i] op1 x[i] op2 upper[i]`, where `op` is `<` when the
/// matching strict flag is set and `≤` otherwise. `None` bounds are infinite.
/// A box whose lower bound exceeds its upper bound is simply empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeQuery<K> {
    pub lower: Vec<Option<K>>,
    pub upper: Vec<Option<K>>,
    pub lower_strict: Vec<bool>,
    pub upper_strict: Vec<bool>,
}

impl<K: Ord + Copy> RangeQuery<K> {
    pub fn unbounded(dim: usize) -> Self {
        RangeQuery {
            lower: vec![None; dim],
            upper: vec![None; dim],
            lower_strict: vec![false; dim],
            upper_strict: vec![false; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn reset(&mut self) {
        self.lower.fill(None);
        self.upper.fill(None);
        self.lower_strict.fill(false);
        self.upper_strict.fill(false);
    }

    #[inline]
    pub fn lower_ok(&self, d: usize, x: K) -> bool {
        match self.lower[d] {
            None => true,
            Some(l) if self.lower_strict[d] => l < x,
            Some(l) => l <= x,
        }
    }

    #[inline]
    pub fn upper_ok(&self, d: usize, x: K) -> bool {
        match self.upper[d] {
            None => true,
            Some(u) if self.upper_strict[d] => x < u,
            Some(u) => x <= u,
        }
    }

    pub fn contains(&self, point: &[K]) -> bool {
        point
            .iter()
            .enumerate()
            .all(|(d, &x)| self.lower_ok(d, x) && self.upper_ok(d, x))
    }

    /// Raises the lower bound of `d` to `v` if that makes the box smaller.
    pub fn tighten_lower(&mut self, d: usize, v: K, strict: bool) {
        match self.lower[d] {
            Some(cur) if cur > v => {}
            Some(cur) if cur == v => self.lower_strict[d] |= strict,
            _ => {
                self.lower[d] = Some(v);
                self.lower_strict[d] = strict;
            }
        }
    }

    /// Lowers the upper bound of `d` to `v` if that makes the box smaller.
    pub fn tighten_upper(&mut self, d: usize, v: K, strict: bool) {
        match self.upper[d] {
            Some(cur) if cur < v => {}
            Some(cur) if cur == v => self.upper_strict[d] |= strict,
            _ => {
                self.upper[d] = Some(v);
                self.upper_strict[d] = strict;
            }
        }
    }

    /// Box with lower and upper bounds swapped per coordinate, so an
    /// unbounded-below side becomes unbounded-above.
    pub fn inverted(&self) -> Self {
        RangeQuery {
            lower: self.upper.clone(),
            upper: self.lower.clone(),
            lower_strict: self.upper_strict.clone(),
            upper_strict: self.lower_strict.clone(),
        }
    }

    /// True when no point can satisfy some coordinate's bounds.
    pub fn is_empty(&self) -> bool {
        (0..self.dim()).any(|d| match (self.lower[d], self.upper[d]) {
            (Some(l), Some(u)) => l > u || (l == u && (self.lower_strict[d] || self.upper_strict[d])),
            _ => false,
        })
    }

    fn check_dim(&self, expected: usize) -> Result<(), IndexError> {
        let found = self.dim();
        if found != expected
            || self.upper.len() != expected
            || self.lower_strict.len() != expected
            || self.upper_strict.len() != expected
        {
            return Err(IndexError::Dimension { expected, found });
        }
        Ok(())
    }
}

pub trait OrthogonalRangeIndex<K: Ord + Copy> {
    fn dimension(&self) -> usize;

    /// Number of points inserted.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert(&mut self, point: &[K], row: RowId) -> Result<(), IndexError>;

    /// Some stored row whose point lies in the box, if any.
    fn find_any(&self, query: &RangeQuery<K>) -> Result<Option<RowId>, IndexError>;

    fn boolean_range_search(&self, query: &RangeQuery<K>) -> Result<bool, IndexError> {
        Ok(self.find_any(query)?.is_some())
    }

    /// Structural size: one per stored point for the scan and the k-d tree,
    /// total entries across all layers for the range tree.
    fn node_count(&self) -> usize;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    #[default]
    RangeTree,
    KdTree,
    Linear,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::RangeTree, Backend::KdTree, Backend::Linear];

    pub fn name(self) -> &'static str {
        match self {
            Backend::RangeTree => "range-tree",
            Backend::KdTree => "kd-tree",
            Backend::Linear => "linear",
        }
    }

    pub fn create<K: Ord + Copy>(self, dim: usize) -> AnyIndex<K> {
        match self {
            Backend::RangeTree => AnyIndex::RangeTree(RangeTree::new(dim)),
            Backend::KdTree => AnyIndex::KdTree(KdTree::new(dim)),
            Backend::Linear => AnyIndex::Linear(LinearScan::new(dim)),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Error, Debug)]
#[error("unknown backend `{0}` (expected range-tree, kd-tree or linear)")]
pub struct UnknownBackend(pub String);

impl FromStr for Backend {
    type Err = UnknownBackend;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "range-tree" | "rangetree" => Ok(Backend::RangeTree),
            "kd-tree" | "kdtree" => Ok(Backend::KdTree),
            "linear" => Ok(Backend::Linear),
            other => Err(UnknownBackend(other.to_string())),
        }
    }
}

/// Enum dispatch over the three backends.
#[derive(Debug)]
pub enum AnyIndex<K> {
    RangeTree(RangeTree<K>),
    KdTree(KdTree<K>),
    Linear(LinearScan<K>),
}

impl<K: Ord + Copy> OrthogonalRangeIndex<K> for AnyIndex<K> {
    fn dimension(&self) -> usize {
        match self {
            AnyIndex::RangeTree(i) => i.dimension(),
            AnyIndex::KdTree(i) => i.dimension(),
            AnyIndex::Linear(i) => i.dimension(),
        }
    }

    fn len(&self) -> usize {
        match self {
            AnyIndex::RangeTree(i) => i.len(),
            AnyIndex::KdTree(i) => i.len(),
            AnyIndex::Linear(i) => i.len(),
        }
    }

    fn insert(&mut self, point: &[K], row: RowId) -> Result<(), IndexError> {
        match self {
            AnyIndex::RangeTree(i) => i.insert(point, row),
            AnyIndex::KdTree(i) => i.insert(point, row),
            AnyIndex::Linear(i) => i.insert(point, row),
        }
    }

    fn find_any(&self, query: &RangeQuery<K>) -> Result<Option<RowId>, IndexError> {
        match self {
            AnyIndex::RangeTree(i) => i.find_any(query),
            AnyIndex::KdTree(i) => i.find_any(query),
            AnyIndex::Linear(i) => i.find_any(query),
        }
    }

    fn node_count(&self) -> usize {
        match self {
            AnyIndex::RangeTree(i) => i.node_count(),
            AnyIndex::KdTree(i) => i.node_count(),
            AnyIndex::Linear(i) => i.node_count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tightening_keeps_the_smaller_box() {
        let mut q = RangeQuery::<i64>::unbounded(1);
        q.tighten_upper(0, 10, false);
        q.tighten_upper(0, 12, true);
        assert_eq!((q.upper[0], q.upper_strict[0]), (Some(10), false));
        q.tighten_upper(0, 10, true);
        assert_eq!((q.upper[0], q.upper_strict[0]), (Some(10), true));
        q.tighten_lower(0, 3, true);
        q.tighten_lower(0, 5, false);
        assert_eq!((q.lower[0], q.lower_strict[0]), (Some(5), false));
        assert!(q.contains(&[5]) && !q.contains(&[10]) && !q.contains(&[4]));
    }

    #[test]
    fn inverted_box_swaps_sides() {
        let mut q = RangeQuery::<i64>::unbounded(2);
        q.tighten_upper(0, 6000, true);
        q.tighten_lower(1, 20, true);
        let inv = q.inverted();
        assert_eq!(inv.lower, vec![Some(6000), None]);
        assert_eq!(inv.upper, vec![None, Some(20)]);
        assert_eq!(inv.lower_strict, vec![true, false]);
        assert_eq!(inv.inverted(), q);
    }

    #[test]
    fn emptiness() {
        let mut q = RangeQuery::<i64>::unbounded(1);
        assert!(!q.is_empty());
        q.tighten_lower(0, 3, false);
        q.tighten_upper(0, 3, false);
        assert!(!q.is_empty());
        q.tighten_upper(0, 3, true);
        assert!(q.is_empty());
    }

    #[test]
    fn backend_names_round_trip() {
        for b in Backend::ALL {
            assert_eq!(b.name().parse::<Backend>().unwrap(), b);
        }
        assert!("btree".parse::<Backend>().is_err());
    }
}
