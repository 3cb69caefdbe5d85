use super::{IndexError, OrthogonalRangeIndex, RangeQuery, RowId};

// Points collected before they are merged into a static part.
const BUFFER: usize = 32;
// Runs shorter than 2^MIN_BLOCK_LOG are scanned instead of descending a level.
const MIN_BLOCK_LOG: u32 = 3;

/// Multi-level range tree made dynamic with the logarithmic method.
///
/// Static parts hold `32·2^i` points each and merge like a binary counter when
/// the insert buffer fills. Within a part, a layer for dimension `d` keeps its
/// points sorted on `d`; every aligned run of `2^j` consecutive points owns a
/// layer for `d + 1` over the same points. A query cuts its `d` interval into
/// `O(log n)` aligned runs and descends into each, so a lookup costs
/// `O(log^k n)` and storage is `O(n log^(k-1) n)`.
#[derive(Debug, Clone)]
pub struct RangeTree<K> {
    dim: usize,
    coords: Vec<K>,
    rows: Vec<RowId>,
    buffer: Vec<u32>,
    parts: Vec<Option<Part<K>>>,
}

#[derive(Debug, Clone)]
struct Part<K> {
    lo: Vec<K>,
    hi: Vec<K>,
    top: Layer<K>,
}

#[derive(Debug, Clone)]
struct Layer<K> {
    pts: Vec<u32>,
    // Coordinates of `pts` on this layer's dimension. Omitted for last-dimension
    // layers below the top, which read them from the point table instead.
    keys: Vec<K>,
    // Smallest and largest coordinate on this layer's dimension.
    ends: Option<(K, K)>,
    // levels[j][b] covers pts[b·2^(j+MIN_BLOCK_LOG) ..][.. 2^(j+MIN_BLOCK_LOG)].
    levels: Vec<Vec<Layer<K>>>,
    // On the second-to-last dimension only: points with the smallest and largest
    // last coordinate over each prefix and suffix of `pts`, so a query that is
    // one-sided on both remaining dimensions costs a single lookup.
    extremes: Vec<Extremes>,
}

#[derive(Debug, Clone, Copy)]
struct Extremes {
    prefix: [u32; 2],
    suffix: [u32; 2],
}

const MIN: usize = 0;
const MAX: usize = 1;

impl<K> Layer<K> {
    fn entries(&self) -> usize {
        self.pts.len() + self.levels.iter().flatten().map(Layer::entries).sum::<usize>()
    }
}

impl<K: Ord + Copy> RangeTree<K> {
    pub fn new(dim: usize) -> Self {
        RangeTree {
            dim,
            coords: Vec::new(),
            rows: Vec::new(),
            buffer: Vec::with_capacity(BUFFER),
            parts: Vec::new(),
        }
    }

    /// Number of static parts currently live.
    pub fn part_count(&self) -> usize {
        self.parts.iter().flatten().count()
    }

    #[inline]
    fn coord(&self, p: u32, d: usize) -> K {
        self.coords[p as usize * self.dim + d]
    }

    fn point(&self, p: u32) -> &[K] {
        let at = p as usize * self.dim;
        &self.coords[at..at + self.dim]
    }

    fn flush(&mut self) {
        let mut carry: Vec<(K, u32)> = self.buffer.iter().map(|&p| (self.coord(p, 0), p)).collect();
        let mut slot = 0;
        loop {
            if slot == self.parts.len() {
                self.parts.push(None);
            }
            match self.parts[slot].take() {
                Some(part) => carry.extend(part.top.keys.iter().copied().zip(part.top.pts.iter().copied())),
                None => break,
            }
            slot += 1;
        }
        self.buffer.clear();
        carry.sort_unstable_by_key(|e| e.0);
        let mut lo = self.point(carry[0].1).to_vec();
        let mut hi = lo.clone();
        for &(_, p) in &carry[1..] {
            for d in 0..self.dim {
                let x = self.coord(p, d);
                lo[d] = lo[d].min(x);
                hi[d] = hi[d].max(x);
            }
        }
        let top = self.build_layer(&carry, 0, true);
        self.parts[slot] = Some(Part { lo, hi, top });
    }

    /// `sorted` holds `(coordinate on d, point)` in coordinate order.
    fn build_layer(&self, sorted: &[(K, u32)], d: usize, top: bool) -> Layer<K> {
        let last = d + 1 == self.dim;
        let keys = if top || !last {
            sorted.iter().map(|e| e.0).collect()
        } else {
            Vec::new()
        };
        let ends = match (sorted.first(), sorted.last()) {
            (Some(a), Some(b)) => Some((a.0, b.0)),
            _ => None,
        };
        let mut levels: Vec<Vec<Layer<K>>> = Vec::new();
        if !last {
            let n = sorted.len();
            let mut prev: Vec<Vec<(K, u32)>> = Vec::new();
            let mut j = MIN_BLOCK_LOG;
            while 1usize << j <= n {
                let size = 1usize << j;
                let runs: Vec<Vec<(K, u32)>> = if prev.is_empty() {
                    sorted
                        .chunks_exact(size)
                        .map(|chunk| {
                            let mut v: Vec<(K, u32)> = chunk.iter().map(|&(_, p)| (self.coord(p, d + 1), p)).collect();
                            v.sort_unstable_by_key(|e| e.0);
                            v
                        })
                        .collect()
                } else {
                    prev.chunks_exact(2).map(|pair| merge(&pair[0], &pair[1])).collect()
                };
                levels.push(runs.iter().map(|run| self.build_layer(run, d + 1, false)).collect());
                prev = runs;
                j += 1;
            }
        }
        let extremes = if d + 2 == self.dim {
            self.extremes(sorted, d + 1)
        } else {
            Vec::new()
        };
        Layer {
            pts: sorted.iter().map(|e| e.1).collect(),
            keys,
            ends,
            levels,
            extremes,
        }
    }

    fn extremes(&self, sorted: &[(K, u32)], e: usize) -> Vec<Extremes> {
        let pick = |best: [u32; 2], p: u32| {
            let x = self.coord(p, e);
            [
                if x < self.coord(best[MIN], e) { p } else { best[MIN] },
                if x > self.coord(best[MAX], e) { p } else { best[MAX] },
            ]
        };
        let Some(&(_, first)) = sorted.first() else {
            return Vec::new();
        };
        let mut out = Vec::with_capacity(sorted.len());
        let mut run = [first; 2];
        for &(_, p) in sorted {
            run = pick(run, p);
            out.push(Extremes {
                prefix: run,
                suffix: run,
            });
        }
        let mut run = [sorted[sorted.len() - 1].1; 2];
        for (i, &(_, p)) in sorted.iter().enumerate().rev() {
            run = pick(run, p);
            out[i].suffix = run;
        }
        out
    }

    /// Answers `pts[a..b]` against the last dimension when the run is a prefix
    /// or suffix and the last bound is one-sided; `None` when it cannot.
    fn find_extreme(&self, layer: &Layer<K>, e: usize, q: &RangeQuery<K>, a: usize, b: usize) -> Option<Option<u32>> {
        if a >= b {
            return Some(None);
        }
        let which = match (q.lower[e].is_some(), q.upper[e].is_some()) {
            (false, false) => return Some(Some(layer.pts[a])),
            (true, true) => return None,
            (false, true) => MIN,
            (true, false) => MAX,
        };
        let p = if a == 0 {
            layer.extremes[b - 1].prefix[which]
        } else if b == layer.pts.len() {
            layer.extremes[a].suffix[which]
        } else {
            return None;
        };
        let x = self.coord(p, e);
        let ok = if which == MIN {
            q.upper_ok(e, x)
        } else {
            q.lower_ok(e, x)
        };
        Some(ok.then_some(p))
    }

    fn find_in(&self, layer: &Layer<K>, d: usize, q: &RangeQuery<K>) -> Option<u32> {
        if d + 1 == self.dim {
            return self.find_last(layer, d, q);
        }
        let a = match q.lower[d] {
            None => 0,
            Some(_) => layer.keys.partition_point(|&x| !q.lower_ok(d, x)),
        };
        let b = match q.upper[d] {
            None => layer.keys.len(),
            Some(_) => layer.keys.partition_point(|&x| q.upper_ok(d, x)),
        };
        if !layer.extremes.is_empty() {
            if let Some(hit) = self.find_extreme(layer, d + 1, q, a, b) {
                return hit;
            }
        }
        let mut i = a;
        while i < b {
            let align = if i == 0 { u32::MAX } else { i.trailing_zeros() };
            let fit = usize::BITS - 1 - (b - i).leading_zeros();
            let j = align.min(fit);
            if j < MIN_BLOCK_LOG {
                let p = layer.pts[i];
                if q.contains(self.point(p)) {
                    return Some(p);
                }
                i += 1;
            } else {
                let block = &layer.levels[(j - MIN_BLOCK_LOG) as usize][i >> j];
                if let Some(p) = self.find_in(block, d + 1, q) {
                    return Some(p);
                }
                i += 1 << j;
            }
        }
        None
    }

    // Every point of `layer` already satisfies the earlier dimensions, so only
    // `d` remains; one-sided bounds need a single comparison at either end.
    fn find_last(&self, layer: &Layer<K>, d: usize, q: &RangeQuery<K>) -> Option<u32> {
        let n = layer.pts.len();
        let (first, last) = layer.ends?;
        let key = |i: usize| {
            if layer.keys.is_empty() {
                self.coord(layer.pts[i], d)
            } else {
                layer.keys[i]
            }
        };
        let hit = match (q.lower[d].is_some(), q.upper[d].is_some()) {
            (false, false) => Some(0),
            (false, true) => q.upper_ok(d, first).then_some(0),
            (true, false) => q.lower_ok(d, last).then_some(n - 1),
            (true, true) => {
                let (mut lo, mut hi) = (0, n);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if q.lower_ok(d, key(mid)) {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                (lo < n && q.upper_ok(d, key(lo))).then_some(lo)
            }
        };
        hit.map(|i| layer.pts[i])
    }
}

impl<K: Ord + Copy> OrthogonalRangeIndex<K> for RangeTree<K> {
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
        let id = self.rows.len() as u32;
        self.coords.extend_from_slice(point);
        self.rows.push(row);
        if self.dim == 0 {
            return Ok(());
        }
        self.buffer.push(id);
        if self.buffer.len() == BUFFER {
            self.flush();
        }
        Ok(())
    }

    fn find_any(&self, query: &RangeQuery<K>) -> Result<Option<RowId>, IndexError> {
        query.check_dim(self.dim)?;
        if self.dim == 0 {
            return Ok(self.rows.first().copied());
        }
        for &p in &self.buffer {
            if query.contains(self.point(p)) {
                return Ok(Some(self.rows[p as usize]));
            }
        }
        for part in self.parts.iter().rev().flatten() {
            let meets = (0..self.dim).all(|d| query.upper_ok(d, part.lo[d]) && query.lower_ok(d, part.hi[d]));
            if meets {
                if let Some(p) = self.find_in(&part.top, 0, query) {
                    return Ok(Some(self.rows[p as usize]));
                }
            }
        }
        Ok(None)
    }

    fn node_count(&self) -> usize {
        if self.dim == 0 {
            return self.rows.len();
        }
        self.buffer.len() + self.parts.iter().flatten().map(|p| p.top.entries()).sum::<usize>()
    }
}

fn merge<K: Ord + Copy>(a: &[(K, u32)], b: &[(K, u32)]) -> Vec<(K, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parts_follow_binary_counter() {
        let mut t = RangeTree::new(2);
        for i in 0..(BUFFER * 5) as i64 {
            t.insert(&[i, i % 7], i as u32).unwrap();
        }
        // 5 = 0b101: parts of 32 and 128 points.
        assert_eq!(t.part_count(), 2);
        assert_eq!(t.len(), BUFFER * 5);
    }

    #[test]
    fn node_count_grows_n_log_n() {
        let mut t = RangeTree::new(2);
        let n = 1usize << 12;
        for i in 0..n as i64 {
            t.insert(&[(i * 7919) % 4096, i], i as u32).unwrap();
        }
        let bound = n * (n as f64).log2() as usize;
        assert!(t.node_count() >= n && t.node_count() <= bound, "{}", t.node_count());
        let one = {
            let mut t = RangeTree::new(1);
            for i in 0..n as i64 {
                t.insert(&[i], i as u32).unwrap();
            }
            t.node_count()
        };
        assert_eq!(one, n);
    }

    #[test]
    fn single_block_queries() {
        let mut t = RangeTree::new(3);
        for i in 0..200i64 {
            t.insert(&[i, 200 - i, i % 10], i as u32).unwrap();
        }
        let mut q = RangeQuery::unbounded(3);
        q.tighten_lower(0, 50, false);
        q.tighten_upper(0, 60, true);
        q.tighten_lower(2, 9, false);
        assert_eq!(t.find_any(&q).unwrap(), Some(59));
        q.tighten_upper(1, 141, true);
        assert_eq!(t.find_any(&q).unwrap(), None);
    }
}
