use std::collections::HashMap;

use crate::dc::{Operator, Predicate, TupleVar};
use crate::index::{AnyIndex, Backend, OrthogonalRangeIndex, RangeQuery, RowId};
use crate::relation::{Key, Relation};

use super::ranges::{classify, distinct, BoxSpec, Ineq};
use super::VerifyStats;

pub(crate) type Witness = (usize, usize);

/// Partition state keyed by the values of the row-homogeneous equality columns.
struct Partitions<S> {
    cols: Vec<usize>,
    map: HashMap<Box<[u64]>, S>,
    buf: Vec<u64>,
}

impl<S> Partitions<S> {
    fn new(cols: Vec<usize>) -> Self {
        Partitions {
            cols,
            map: HashMap::new(),
            buf: Vec::new(),
        }
    }

    /// State for `row`'s partition, created on first use. `None` if a key cell is NULL.
    fn get(&mut self, relation: &Relation, row: usize, init: impl FnOnce() -> S) -> Option<&mut S> {
        self.buf.clear();
        for &c in &self.cols {
            self.buf.push(relation.eq_code(c, row)?);
        }
        if !self.map.contains_key(&self.buf[..]) {
            self.map.insert(self.buf.clone().into_boxed_slice(), init());
        }
        self.map.get_mut(&self.buf[..])
    }

    fn values(&self) -> impl Iterator<Item = &S> {
        self.map.values()
    }
}

fn point(relation: &Relation, row: usize, cols: &[usize], out: &mut Vec<Key>) -> bool {
    out.clear();
    for &c in cols {
        match relation.key(c, row) {
            Some(k) => out.push(k),
            None => return false,
        }
    }
    true
}

fn single_tuple_holds(relation: &Relation, p: &Predicate, row: usize) -> bool {
    match (relation.key(p.left_attr, row), relation.key(p.right_attr, row)) {
        (Some(a), Some(b)) => p.op.test(a, b),
        _ => false,
    }
}

/// Equality-only constraint: any repeated partition key is a violation.
pub(crate) struct CounterChecker {
    seen: Partitions<u32>,
}

impl CounterChecker {
    fn process(&mut self, relation: &Relation, row: usize) -> Option<Witness> {
        let mut fresh = false;
        let first = *self.seen.get(relation, row, || {
            fresh = true;
            row as u32
        })?;
        (!fresh).then_some((first as usize, row))
    }
}

#[derive(Default, Clone, Copy)]
struct Extrema {
    min_a: Option<(Key, u32)>,
    max_a: Option<(Key, u32)>,
    min_b: Option<(Key, u32)>,
    max_b: Option<(Key, u32)>,
}

fn lower(slot: &mut Option<(Key, u32)>, k: Key, row: usize) {
    if slot.is_none_or(|(m, _)| k < m) {
        *slot = Some((k, row as u32));
    }
}

fn raise(slot: &mut Option<(Key, u32)>, k: Key, row: usize) {
    if slot.is_none_or(|(m, _)| k > m) {
        *slot = Some((k, row as u32));
    }
}

/// One ordering predicate `s.A op t.B`: per partition, the extremes of `A`
/// and `B` decide whether any earlier row pairs with the current one.
pub(crate) struct ExtremaChecker {
    ineq: Ineq,
    parts: Partitions<Extrema>,
}

impl ExtremaChecker {
    fn process(&mut self, relation: &Relation, row: usize) -> Option<Witness> {
        let Ineq { left, op, right } = self.ineq;
        let a = relation.key(left, row);
        let b = relation.key(right, row);
        let ext = self.parts.get(relation, row, Extrema::default)?;
        let upward = matches!(op, Operator::Lt | Operator::Le);
        // Earlier row as s, current row as t.
        if let Some(b) = b {
            let best = if upward { ext.min_a } else { ext.max_a };
            if let Some((x, s)) = best {
                if op.test(x, b) {
                    return Some((s as usize, row));
                }
            }
        }
        // Current row as s, earlier row as t.
        if let Some(a) = a {
            let best = if upward { ext.max_b } else { ext.min_b };
            if let Some((y, t)) = best {
                if op.test(a, y) {
                    return Some((row, t as usize));
                }
            }
        }
        if let Some(a) = a {
            lower(&mut ext.min_a, a, row);
            raise(&mut ext.max_a, a, row);
        }
        if let Some(b) = b {
            lower(&mut ext.min_b, b, row);
            raise(&mut ext.max_b, b, row);
        }
        None
    }
}

/// One index per partition over every column the ordering predicates mention;
/// each row queries the forward and inverted boxes, then is inserted.
pub(crate) struct IndexChecker {
    backend: Backend,
    dims: Vec<usize>,
    spec: BoxSpec,
    parts: Partitions<AnyIndex<Key>>,
    q: RangeQuery<Key>,
    p: Vec<Key>,
    built: usize,
    inserted: usize,
}

impl IndexChecker {
    fn process(&mut self, relation: &Relation, row: usize) -> Option<Witness> {
        if !point(relation, row, &self.dims, &mut self.p) {
            return None;
        }
        let (backend, k) = (self.backend, self.dims.len());
        let mut fresh = false;
        let index = self.parts.get(relation, row, || {
            fresh = true;
            backend.create(k)
        })?;
        if fresh {
            self.built += 1;
        }
        if !index.is_empty() {
            if self.spec.forward(relation, row, &mut self.q) && !self.q.is_empty() {
                if let Some(s) = index.find_any(&self.q).expect("dimensions agree") {
                    return Some((s as usize, row));
                }
            }
            if self.spec.inverted(relation, row, &mut self.q) && !self.q.is_empty() {
                if let Some(t) = index.find_any(&self.q).expect("dimensions agree") {
                    return Some((row, t as usize));
                }
            }
        }
        index.insert(&self.p, row as RowId).expect("dimensions agree");
        self.inserted += 1;
        None
    }
}

enum Store {
    First(Option<u32>),
    Index(AnyIndex<Key>),
}

struct PairState {
    s: Store,
    t: Store,
}

/// Separate stores for rows acting as `s` and rows acting as `t`.
///
/// Covers heterogeneous constraints, where the `s` side is indexed on the
/// left-hand columns and the `t` side on the right-hand ones, and mixed
/// constraints, where single-tuple predicates decide which roles a row may take.
pub(crate) struct PairChecker {
    backend: Backend,
    s_filter: Vec<Predicate>,
    t_filter: Vec<Predicate>,
    s_dims: Vec<usize>,
    t_dims: Vec<usize>,
    spec: BoxSpec,
    parts: Partitions<PairState>,
    q_fwd: RangeQuery<Key>,
    q_inv: RangeQuery<Key>,
    p: Vec<Key>,
    built: usize,
    inserted: usize,
}

impl PairChecker {
    fn process(&mut self, relation: &Relation, row: usize) -> Option<Witness> {
        let as_s = self.s_filter.iter().all(|p| single_tuple_holds(relation, p, row))
            && self.s_dims.iter().all(|&c| !relation.is_null(c, row));
        let as_t = self.t_filter.iter().all(|p| single_tuple_holds(relation, p, row))
            && self.t_dims.iter().all(|&c| !relation.is_null(c, row));
        if !as_s && !as_t {
            return None;
        }
        let (backend, ks, kt) = (self.backend, self.s_dims.len(), self.t_dims.len());
        let indexed = !self.spec.ineqs.is_empty();
        let mut fresh = false;
        let state = self.parts.get(relation, row, || {
            fresh = true;
            let store = |k| {
                if indexed {
                    Store::Index(backend.create(k))
                } else {
                    Store::First(None)
                }
            };
            PairState {
                s: store(ks),
                t: store(kt),
            }
        })?;
        if fresh && indexed {
            self.built += 2;
        }

        if as_s {
            let hit = match &state.t {
                Store::First(first) => *first,
                Store::Index(index) if index.is_empty() => None,
                Store::Index(index) => {
                    self.spec.inverted(relation, row, &mut self.q_inv);
                    if self.q_inv.is_empty() {
                        None
                    } else {
                        index.find_any(&self.q_inv).expect("dimensions agree")
                    }
                }
            };
            if let Some(t) = hit {
                return Some((row, t as usize));
            }
        }
        if as_t {
            let hit = match &state.s {
                Store::First(first) => *first,
                Store::Index(index) if index.is_empty() => None,
                Store::Index(index) => {
                    self.spec.forward(relation, row, &mut self.q_fwd);
                    if self.q_fwd.is_empty() {
                        None
                    } else {
                        index.find_any(&self.q_fwd).expect("dimensions agree")
                    }
                }
            };
            if let Some(s) = hit {
                return Some((s as usize, row));
            }
        }

        for (role, store, dims) in [(as_s, &mut state.s, &self.s_dims), (as_t, &mut state.t, &self.t_dims)] {
            if !role {
                continue;
            }
            match store {
                Store::First(first) => {
                    first.get_or_insert(row as u32);
                }
                Store::Index(index) => {
                    point(relation, row, dims, &mut self.p);
                    index.insert(&self.p, row as RowId).expect("dimensions agree");
                    self.inserted += 1;
                }
            }
        }
        None
    }
}

pub(crate) enum Checker {
    Counter(CounterChecker),
    Extrema(ExtremaChecker),
    Index(IndexChecker),
    Pair(PairChecker),
}

impl Checker {
    /// Picks the cheapest strategy for a constraint without two-tuple `≠`.
    pub fn build(predicates: &[Predicate], backend: Backend, general: bool) -> Checker {
        let has_single = predicates.iter().any(Predicate::is_single_tuple);
        let (eq, ineqs) = classify(predicates);
        if has_single {
            return Checker::Pair(Self::pair(predicates, eq, ineqs, backend));
        }
        if ineqs.is_empty() {
            return Checker::Counter(CounterChecker {
                seen: Partitions::new(eq),
            });
        }
        let single = predicates
            .iter()
            .filter(|p| !(p.is_row_homogeneous() && p.op == Operator::Eq))
            .count()
            == 1;
        if single && ineqs.len() == 1 && !general {
            return Checker::Extrema(ExtremaChecker {
                ineq: ineqs[0],
                parts: Partitions::new(eq),
            });
        }
        if ineqs.iter().all(|i| i.left == i.right) {
            let dims = distinct(ineqs.iter().map(|i| i.left));
            return Checker::Index(IndexChecker {
                backend,
                q: RangeQuery::unbounded(dims.len()),
                spec: BoxSpec::shared(ineqs, &dims),
                dims,
                parts: Partitions::new(eq),
                p: Vec::new(),
                built: 0,
                inserted: 0,
            });
        }
        Checker::Pair(Self::pair(predicates, eq, ineqs, backend))
    }

    fn pair(predicates: &[Predicate], eq: Vec<usize>, ineqs: Vec<Ineq>, backend: Backend) -> PairChecker {
        let s_dims = distinct(ineqs.iter().map(|i| i.left));
        let t_dims = distinct(ineqs.iter().map(|i| i.right));
        let filter = |v| {
            predicates
                .iter()
                .filter(|p| p.is_single_tuple() && p.left_var == v)
                .copied()
                .collect()
        };
        PairChecker {
            backend,
            s_filter: filter(TupleVar::S),
            t_filter: filter(TupleVar::T),
            q_fwd: RangeQuery::unbounded(s_dims.len()),
            q_inv: RangeQuery::unbounded(t_dims.len()),
            spec: BoxSpec::split(ineqs, &s_dims, &t_dims),
            s_dims,
            t_dims,
            parts: Partitions::new(eq),
            p: Vec::new(),
            built: 0,
            inserted: 0,
        }
    }

    pub fn process(&mut self, relation: &Relation, row: usize) -> Option<Witness> {
        match self {
            Checker::Counter(c) => c.process(relation, row),
            Checker::Extrema(c) => c.process(relation, row),
            Checker::Index(c) => c.process(relation, row),
            Checker::Pair(c) => c.process(relation, row),
        }
    }

    /// Label of the strategy, or of the index backend when one is used.
    pub fn label(&self) -> &'static str {
        match self {
            Checker::Counter(_) => "counter",
            Checker::Extrema(_) => "min-max",
            Checker::Index(c) => c.backend.name(),
            Checker::Pair(c) if c.spec.ineqs.is_empty() => "counter",
            Checker::Pair(c) => c.backend.name(),
        }
    }

    pub fn add_stats(&self, stats: &mut VerifyStats) {
        match self {
            Checker::Index(c) => {
                stats.indexes_built += c.built;
                stats.points_inserted += c.inserted;
                stats.index_nodes += c.parts.values().map(|i| i.node_count()).sum::<usize>();
            }
            Checker::Pair(c) => {
                stats.indexes_built += c.built;
                stats.points_inserted += c.inserted;
                for st in c.parts.values() {
                    for store in [&st.s, &st.t] {
                        if let Store::Index(i) = store {
                            stats.index_nodes += i.node_count();
                        }
                    }
                }
            }
            Checker::Counter(_) | Checker::Extrema(_) => {}
        }
    }
}
