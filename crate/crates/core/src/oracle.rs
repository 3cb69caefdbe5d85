//! Quadratic reference check: every ordered pair of distinct rows.

use std::cmp::Ordering;

use thiserror::Error;

use crate::dc::{DenialConstraint, Predicate, TupleVar};
use crate::relation::{Relation, Value};
use crate::verify::{NullPolicy, Verdict, VerifyStats};

/// Largest relation the oracle accepts unless a caller raises the cap.
pub const DEFAULT_ROW_CAP: usize = 2000;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum OracleError {
    #[error("relation has {rows} rows, oracle cap is {cap}")]
    Cap { rows: usize, cap: usize },
    #[error("tuple pair needs two distinct rows, got {0} twice")]
    SameRow(usize),
    #[error("row {row} out of range for {rows} rows")]
    RowOutOfRange { row: usize, rows: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairEvaluation {
    /// Truth of each predicate on `(s, t)`, in constraint order.
    pub predicates: Vec<bool>,
    /// True when every predicate holds, i.e. the pair violates the constraint.
    pub violates: bool,
}

/// Compares two cells. NULL compares with nothing; categorical cells compare by
/// their strings, numbers and datetimes by value.
fn compare(relation: &Relation, a_col: usize, a_row: usize, b_col: usize, b_row: usize) -> Option<Ordering> {
    let (a, b) = (relation.value(a_col, a_row), relation.value(b_col, b_row));
    match (a, b) {
        (Value::Null, _) | (_, Value::Null) => None,
        (Value::Code(x), Value::Code(y)) => Some(relation.category(a_col, x).cmp(relation.category(b_col, y))),
        (Value::Code(_), _) | (_, Value::Code(_)) => None,
        _ => Some(relation.key(a_col, a_row)?.cmp(&relation.key(b_col, b_row)?)),
    }
}

pub fn predicate_holds(relation: &Relation, p: &Predicate, s: usize, t: usize) -> bool {
    let pick = |v: TupleVar| if v == TupleVar::S { s } else { t };
    compare(relation, p.left_attr, pick(p.left_var), p.right_attr, pick(p.right_var)).is_some_and(|o| p.op.accepts(o))
}

pub fn evaluate_pair(
    relation: &Relation,
    dc: &DenialConstraint,
    s: usize,
    t: usize,
) -> Result<PairEvaluation, OracleError> {
    let rows = relation.row_count();
    for row in [s, t] {
        if row >= rows {
            return Err(OracleError::RowOutOfRange { row, rows });
        }
    }
    if s == t {
        return Err(OracleError::SameRow(s));
    }
    let predicates: Vec<bool> = dc
        .predicates
        .iter()
        .map(|p| predicate_holds(relation, p, s, t))
        .collect();
    let violates = predicates.iter().all(|&b| b);
    Ok(PairEvaluation { predicates, violates })
}

pub fn brute_force_verify(relation: &Relation, dc: &DenialConstraint) -> Result<Verdict, OracleError> {
    brute_force_verify_with(relation, dc, DEFAULT_ROW_CAP, NullPolicy::False)
}

/// Walks `s` in row order and, for each `s`, every `t`; returns the first
/// violating pair. `rows_examined` counts outer rows visited.
pub fn brute_force_verify_with(
    relation: &Relation,
    dc: &DenialConstraint,
    cap: usize,
    nulls: NullPolicy,
) -> Result<Verdict, OracleError> {
    let n = relation.row_count();
    if n > cap {
        return Err(OracleError::Cap { rows: n, cap });
    }
    let attrs = dc.attributes();
    let usable: Vec<bool> = (0..n)
        .map(|r| nulls == NullPolicy::False || attrs.iter().all(|&a| !relation.is_null(a, r)))
        .collect();
    for s in 0..n {
        if !usable[s] {
            continue;
        }
        for (t, &ok) in usable.iter().enumerate() {
            if s == t || !ok {
                continue;
            }
            if dc.predicates.iter().all(|p| predicate_holds(relation, p, s, t)) {
                return Ok(Verdict {
                    holds: false,
                    witness: Some((s, t)),
                    rows_examined: s + 1,
                    backend_used: "oracle".into(),
                    stats: VerifyStats::default(),
                });
            }
        }
    }
    Ok(Verdict {
        holds: true,
        witness: None,
        rows_examined: n,
        backend_used: "oracle".into(),
        stats: VerifyStats::default(),
    })
}

/// Every violating ordered pair, in row-major order.
pub fn all_violations(relation: &Relation, dc: &DenialConstraint) -> Result<Vec<(usize, usize)>, OracleError> {
    let n = relation.row_count();
    if n > DEFAULT_ROW_CAP {
        return Err(OracleError::Cap {
            rows: n,
            cap: DEFAULT_ROW_CAP,
        });
    }
    let mut out = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && dc.predicates.iter().all(|p| predicate_holds(relation, p, s, t)) {
                out.push((s, t));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dc::{Operator, Predicate};
    use crate::relation::RelationBuilder;

    #[test]
    fn pairs_and_nulls() {
        let r = RelationBuilder::new("r")
            .nullable_int("a", [Some(1), Some(1), None])
            .text("b", ["x", "y", "x"])
            .build()
            .unwrap();
        let dc = DenialConstraint::new(vec![Predicate::pair(0, Operator::Eq, 0)]).unwrap();
        assert_eq!(evaluate_pair(&r, &dc, 0, 0), Err(OracleError::SameRow(0)));
        assert!(evaluate_pair(&r, &dc, 0, 1).unwrap().violates);
        assert!(!evaluate_pair(&r, &dc, 0, 2).unwrap().violates);
        let dc = DenialConstraint::new(vec![Predicate::pair(0, Operator::Neq, 0)]).unwrap();
        assert!(brute_force_verify(&r, &dc).unwrap().holds);
        let dc = DenialConstraint::new(vec![Predicate::pair(1, Operator::Eq, 1)]).unwrap();
        assert_eq!(brute_force_verify(&r, &dc).unwrap().witness, Some((0, 2)));
        assert_eq!(all_violations(&r, &dc).unwrap(), vec![(0, 2), (2, 0)]);
    }

    #[test]
    fn cap() {
        let r = RelationBuilder::new("r").int("a", 0..10).build().unwrap();
        let dc = DenialConstraint::new(vec![Predicate::pair(0, Operator::Eq, 0)]).unwrap();
        assert_eq!(
            brute_force_verify_with(&r, &dc, 5, NullPolicy::False).unwrap_err(),
            OracleError::Cap { rows: 10, cap: 5 }
        );
    }
}
