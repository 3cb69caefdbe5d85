use super::{IndexError, OrthogonalRangeIndex, RangeQuery, RowId};

const NIL: u32 = u32::MAX;
// Subtrees stay within this many points of the 2:1 ratio before a rebuild.
const SLACK: u32 = 4;

#[derive(Debug, Clone, Copy)]
struct Node {
    left: u32,
    right: u32,
    size: u32,
}

/// Dynamic k-d tree with one node per point.
///
/// Node `i` holds the `i`-th inserted point and splits on `depth % k`; the left
/// subtree holds coordinates `≤` the split value and the right `≥`. Each node
/// keeps the bounding box of its subtree. A subtree whose children drift past a
/// 2:1 size ratio is rebuilt around medians, which keeps depth logarithmic.
#[derive(Debug, Clone)]
pub struct KdTree<K> {
    dim: usize,
    coords: Vec<K>,
    lo: Vec<K>,
    hi: Vec<K>,
    rows: Vec<RowId>,
    nodes: Vec<Node>,
    root: u32,
    rebuilds: usize,
}

impl<K: Ord + Copy> KdTree<K> {
    pub fn new(dim: usize) -> Self {
        KdTree {
            dim,
            coords: Vec::new(),
            lo: Vec::new(),
            hi: Vec::new(),
            rows: Vec::new(),
            nodes: Vec::new(),
            root: NIL,
            rebuilds: 0,
        }
    }

    /// Number of subtree rebuilds performed so far.
    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }

    /// Length of the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        fn h(nodes: &[Node], n: u32) -> usize {
            if n == NIL {
                0
            } else {
                let node = nodes[n as usize];
                1 + h(nodes, node.left).max(h(nodes, node.right))
            }
        }
        h(&self.nodes, self.root)
    }

    fn size(&self, n: u32) -> u32 {
        if n == NIL {
            0
        } else {
            self.nodes[n as usize].size
        }
    }

    fn point(&self, n: u32) -> &[K] {
        let at = n as usize * self.dim;
        &self.coords[at..at + self.dim]
    }

    fn box_meets(&self, n: u32, q: &RangeQuery<K>) -> bool {
        let at = n as usize * self.dim;
        (0..self.dim).all(|d| q.upper_ok(d, self.lo[at + d]) && q.lower_ok(d, self.hi[at + d]))
    }

    fn rebuild(&mut self, top: u32, depth: usize, parent: Option<u32>) {
        let mut ids = Vec::with_capacity(self.size(top) as usize);
        let mut stack = vec![top];
        while let Some(n) = stack.pop() {
            ids.push(n);
            let node = self.nodes[n as usize];
            for c in [node.left, node.right] {
                if c != NIL {
                    stack.push(c);
                }
            }
        }
        let new_top = self.build(&mut ids, depth);
        match parent {
            None => self.root = new_top,
            Some(p) => {
                let p = &mut self.nodes[p as usize];
                if p.left == top {
                    p.left = new_top;
                } else {
                    p.right = new_top;
                }
            }
        }
        self.rebuilds += 1;
    }

    fn build(&mut self, ids: &mut [u32], depth: usize) -> u32 {
        if ids.is_empty() {
            return NIL;
        }
        let d = depth % self.dim;
        let mid = ids.len() / 2;
        let coords = &self.coords;
        let dim = self.dim;
        ids.select_nth_unstable_by_key(mid, |&n| coords[n as usize * dim + d]);
        let n = ids[mid];
        let (left_ids, rest) = ids.split_at_mut(mid);
        let left = self.build(left_ids, depth + 1);
        let right = self.build(&mut rest[1..], depth + 1);
        self.nodes[n as usize] = Node {
            left,
            right,
            size: (left_ids.len() + rest.len()) as u32,
        };
        let at = n as usize * dim;
        for d in 0..dim {
            let mut lo = self.coords[at + d];
            let mut hi = lo;
            for c in [left, right] {
                if c != NIL {
                    let ca = c as usize * dim + d;
                    lo = lo.min(self.lo[ca]);
                    hi = hi.max(self.hi[ca]);
                }
            }
            self.lo[at + d] = lo;
            self.hi[at + d] = hi;
        }
        n
    }
}

impl<K: Ord + Copy> OrthogonalRangeIndex<K> for KdTree<K> {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    fn insert(&mut self, point: &[K], row: RowId) -> Result<(), IndexError> {
        if point.len() != self.dim {
            return Err(IndexError::Dimension {
                expected: self.dim,
                found: point.len(),
            });
        }
        let id = self.nodes.len() as u32;
        self.coords.extend_from_slice(point);
        self.lo.extend_from_slice(point);
        self.hi.extend_from_slice(point);
        self.rows.push(row);
        self.nodes.push(Node {
            left: NIL,
            right: NIL,
            size: 1,
        });
        if self.root == NIL {
            self.root = id;
            return Ok(());
        }
        if self.dim == 0 {
            return Ok(());
        }

        let mut path = Vec::with_capacity(48);
        let mut cur = self.root;
        let mut depth = 0;
        loop {
            path.push(cur);
            let at = cur as usize * self.dim;
            for (d, &x) in point.iter().enumerate() {
                if x < self.lo[at + d] {
                    self.lo[at + d] = x;
                }
                if x > self.hi[at + d] {
                    self.hi[at + d] = x;
                }
            }
            let node = self.nodes[cur as usize];
            self.nodes[cur as usize].size += 1;
            let d = depth % self.dim;
            let go_left = match point[d].cmp(&self.coords[at + d]) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => self.size(node.left) <= self.size(node.right),
            };
            let child = if go_left { node.left } else { node.right };
            if child == NIL {
                let slot = &mut self.nodes[cur as usize];
                if go_left {
                    slot.left = id;
                } else {
                    slot.right = id;
                }
                break;
            }
            cur = child;
            depth += 1;
        }

        for (i, &n) in path.iter().enumerate() {
            let node = self.nodes[n as usize];
            let (l, r) = (self.size(node.left), self.size(node.right));
            if l.max(r) > 2 * l.min(r) + SLACK {
                let parent = if i == 0 { None } else { Some(path[i - 1]) };
                self.rebuild(n, i, parent);
                break;
            }
        }
        Ok(())
    }

    fn find_any(&self, query: &RangeQuery<K>) -> Result<Option<RowId>, IndexError> {
        query.check_dim(self.dim)?;
        if self.root == NIL {
            return Ok(None);
        }
        if self.dim == 0 {
            return Ok(Some(self.rows[self.root as usize]));
        }
        if !self.box_meets(self.root, query) {
            return Ok(None);
        }
        let mut stack = Vec::with_capacity(64);
        stack.push(self.root);
        while let Some(n) = stack.pop() {
            if query.contains(self.point(n)) {
                return Ok(Some(self.rows[n as usize]));
            }
            let node = self.nodes[n as usize];
            for c in [node.right, node.left] {
                if c != NIL && self.box_meets(c, query) {
                    stack.push(c);
                }
            }
        }
        Ok(None)
    }

    fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_inserts_stay_shallow() {
        let mut t = KdTree::new(2);
        let n = 1 << 14;
        for i in 0..n {
            t.insert(&[i, -i], i as u32).unwrap();
        }
        assert_eq!(t.node_count(), n as usize);
        assert!(t.rebuilds() > 0);
        assert!(t.height() <= 3 * 14, "height {}", t.height());
    }

    #[test]
    fn duplicates_split_evenly() {
        let mut t = KdTree::new(1);
        for i in 0..1000 {
            t.insert(&[7], i).unwrap();
        }
        assert!(t.height() <= 30, "height {}", t.height());
        let mut q = RangeQuery::unbounded(1);
        q.tighten_lower(0, 7, true);
        assert_eq!(t.find_any(&q).unwrap(), None);
        q.tighten_lower(0, 7, false);
        q.lower_strict[0] = false;
        assert!(t.find_any(&q).unwrap().is_some());
    }

    #[test]
    fn rejects_wrong_dimension() {
        let mut t = KdTree::new(2);
        assert_eq!(t.insert(&[1], 0), Err(IndexError::Dimension { expected: 2, found: 1 }));
        assert!(t.find_any(&RangeQuery::unbounded(3)).is_err());
    }
}
