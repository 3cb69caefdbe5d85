use crate::dc::{DenialConstraint, Operator, Predicate};
use crate::index::RangeQuery;
use crate::relation::{Key, Relation};

use super::VerifyError;

/// Two-tuple ordering predicate `s.left op t.right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Ineq {
    pub left: usize,
    pub op: Operator,
    pub right: usize,
}

/// Splits two-tuple predicates into partition columns (`s.A = t.A`) and
/// ordering predicates. `s.A = t.B` becomes `≤` and `≥`. Callers expand `≠`
/// first; single-tuple predicates are skipped.
pub(crate) fn classify(predicates: &[Predicate]) -> (Vec<usize>, Vec<Ineq>) {
    let mut eq = Vec::new();
    let mut ineqs = Vec::new();
    for p in predicates.iter().filter(|p| p.is_two_tuple()) {
        let ineq = |op| Ineq {
            left: p.left_attr,
            op,
            right: p.right_attr,
        };
        match p.op {
            Operator::Eq if p.is_row_homogeneous() => {
                if !eq.contains(&p.left_attr) {
                    eq.push(p.left_attr);
                }
            }
            Operator::Eq => {
                ineqs.push(ineq(Operator::Le));
                ineqs.push(ineq(Operator::Ge));
            }
            Operator::Neq => unreachable!("disequalities are expanded before classification"),
            op => ineqs.push(ineq(op)),
        }
    }
    (eq, ineqs)
}

pub(crate) fn distinct(cols: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut out = Vec::new();
    for c in cols {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// How a row's values turn into query boxes over one or two indexes.
///
/// The forward box finds a stored `s` with `φ(s, r)`: each `s.C op t.D` bounds
/// coordinate `C` by `r.D`. The inverted box finds a stored `t` with `φ(r, t)`:
/// each bounds coordinate `D` by `r.C` from the other side.
#[derive(Clone, Debug)]
pub(crate) struct BoxSpec {
    pub ineqs: Vec<Ineq>,
    pub fwd_dim: Vec<usize>,
    pub inv_dim: Vec<usize>,
}

impl BoxSpec {
    /// Both boxes over the same coordinates `dims`.
    pub fn shared(ineqs: Vec<Ineq>, dims: &[usize]) -> Self {
        let pos = |c: usize| dims.iter().position(|&d| d == c).expect("column is a dimension");
        BoxSpec {
            fwd_dim: ineqs.iter().map(|i| pos(i.left)).collect(),
            inv_dim: ineqs.iter().map(|i| pos(i.right)).collect(),
            ineqs,
        }
    }

    /// Forward box over `left_dims`, inverted box over `right_dims`.
    pub fn split(ineqs: Vec<Ineq>, left_dims: &[usize], right_dims: &[usize]) -> Self {
        let pos = |dims: &[usize], c: usize| dims.iter().position(|&d| d == c).expect("column is a dimension");
        BoxSpec {
            fwd_dim: ineqs.iter().map(|i| pos(left_dims, i.left)).collect(),
            inv_dim: ineqs.iter().map(|i| pos(right_dims, i.right)).collect(),
            ineqs,
        }
    }

    /// Returns false when a needed cell of `row` is NULL.
    pub fn forward(&self, relation: &Relation, row: usize, q: &mut RangeQuery<Key>) -> bool {
        q.reset();
        for (ineq, &d) in self.ineqs.iter().zip(&self.fwd_dim) {
            let Some(v) = relation.key(ineq.right, row) else {
                return false;
            };
            match ineq.op {
                Operator::Lt => q.tighten_upper(d, v, true),
                Operator::Le => q.tighten_upper(d, v, false),
                Operator::Gt => q.tighten_lower(d, v, true),
                Operator::Ge => q.tighten_lower(d, v, false),
                Operator::Eq | Operator::Neq => unreachable!(),
            }
        }
        true
    }

    pub fn inverted(&self, relation: &Relation, row: usize, q: &mut RangeQuery<Key>) -> bool {
        q.reset();
        for (ineq, &d) in self.ineqs.iter().zip(&self.inv_dim) {
            let Some(v) = relation.key(ineq.left, row) else {
                return false;
            };
            match ineq.op {
                Operator::Lt => q.tighten_lower(d, v, true),
                Operator::Le => q.tighten_lower(d, v, false),
                Operator::Gt => q.tighten_upper(d, v, true),
                Operator::Ge => q.tighten_upper(d, v, false),
                Operator::Eq | Operator::Neq => unreachable!(),
            }
        }
        true
    }
}

/// Query boxes for one row against a single index over `dims`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchRangePair {
    /// Column of each coordinate.
    pub dims: Vec<usize>,
    /// Box of stored rows `s` with `φ(s, row)`.
    pub forward: RangeQuery<Key>,
    /// Box of stored rows `t` with `φ(row, t)`.
    pub inverted: RangeQuery<Key>,
}

/// Builds the forward and inverted boxes of `row` for the ordering predicates
/// of `dc`, one coordinate per distinct column they mention. Row-homogeneous
/// equalities are ignored (they select the partition instead); disequalities
/// must be expanded first.
pub fn create_search_ranges(
    relation: &Relation,
    row: usize,
    dc: &DenialConstraint,
) -> Result<SearchRangePair, VerifyError> {
    if row >= relation.row_count() {
        return Err(VerifyError::RowOutOfRange(row));
    }
    if dc.predicates.iter().any(|p| p.is_two_tuple() && p.op == Operator::Neq) {
        return Err(VerifyError::Dispatch(
            "expand disequalities before building search ranges".into(),
        ));
    }
    let (_, ineqs) = classify(&dc.predicates);
    let dims = distinct(ineqs.iter().flat_map(|i| [i.left, i.right]));
    let spec = BoxSpec::shared(ineqs, &dims);
    let mut forward = RangeQuery::unbounded(dims.len());
    let mut inverted = RangeQuery::unbounded(dims.len());
    if !spec.forward(relation, row, &mut forward) || !spec.inverted(relation, row, &mut inverted) {
        return Err(VerifyError::NullCell { row });
    }
    Ok(SearchRangePair {
        dims,
        forward,
        inverted,
    })
}
