use super::{IndexError, OrthogonalRangeIndex, RangeQuery, RowId};

/// Unindexed point list; every query scans everything.
#[derive(Debug, Clone)]
pub struct LinearScan<K> {
    dim: usize,
    coords: Vec<K>,
    rows: Vec<RowId>,
}

impl<K: Ord + Copy> LinearScan<K> {
    pub fn new(dim: usize) -> Self {
        LinearScan {
            dim,
            coords: Vec::new(),
            rows: Vec::new(),
        }
    }
}

impl<K: Ord + Copy> OrthogonalRangeIndex<K> for LinearScan<K> {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    fn insert(&mut self, point: &[K], row: RowId) -> Result<(), IndexError> {
        if point.len() != self.dim {
            return Err(IndexError::Dimension {
                expected: self.dim,
                found: point.len(),
            });
        }
        self.coords.extend_from_slice(point);
        self.rows.push(row);
        Ok(())
    }

    fn find_any(&self, query: &RangeQuery<K>) -> Result<Option<RowId>, IndexError> {
        query.check_dim(self.dim)?;
        if self.dim == 0 {
            return Ok(self.rows.first().copied());
        }
        Ok(self
            .coords
            .chunks_exact(self.dim)
            .position(|p| query.contains(p))
            .map(|i| self.rows[i]))
    }

    fn node_count(&self) -> usize {
        self.rows.len()
    }
}
