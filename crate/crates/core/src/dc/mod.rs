//! Denial constraints: `¬(p1 ∧ … ∧ pm)` over ordered pairs of distinct tuples.

mod parse;
mod transform;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::relation::{Key, Relation};

pub use parse::{format_dc, format_predicate, parse_dc};
pub use transform::{expand_disequalities, negate_predicate, split_mixed, MixedSplit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Operator {
    pub const ALL: [Operator; 6] = [
        Operator::Eq,
        Operator::Neq,
        Operator::Lt,
        Operator::Le,
        Operator::Gt,
        Operator::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Eq => "==",
            Operator::Neq => "!=",
            Operator::Lt => "<",
            Operator::Le => "<=",
            Operator::Gt => ">",
            Operator::Ge => ">=",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, Operator::Eq | Operator::Neq)
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Operator::Lt | Operator::Gt)
    }

    /// Logical complement: `a op b` is false exactly when `a op.negate() b` holds.
    pub fn negate(self) -> Operator {
        match self {
            Operator::Eq => Operator::Neq,
            Operator::Neq => Operator::Eq,
            Operator::Lt => Operator::Ge,
            Operator::Le => Operator::Gt,
            Operator::Gt => Operator::Le,
            Operator::Ge => Operator::Lt,
        }
    }

    /// Operator with its operands swapped: `a op b` iff `b op.mirror() a`.
    pub fn mirror(self) -> Operator {
        match self {
            Operator::Lt => Operator::Gt,
            Operator::Le => Operator::Ge,
            Operator::Gt => Operator::Lt,
            Operator::Ge => Operator::Le,
            other => other,
        }
    }

    pub fn accepts(self, ord: Ordering) -> bool {
        match self {
            Operator::Eq => ord == Ordering::Equal,
            Operator::Neq => ord != Ordering::Equal,
            Operator::Lt => ord == Ordering::Less,
            Operator::Le => ord != Ordering::Greater,
            Operator::Gt => ord == Ordering::Greater,
            Operator::Ge => ord != Ordering::Less,
        }
    }

    pub fn test(self, left: Key, right: Key) -> bool {
        self.accepts(left.cmp(&right))
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TupleVar {
    S,
    T,
}

impl TupleVar {
    pub fn name(self) -> &'static str {
        match self {
            TupleVar::S => "s",
            TupleVar::T => "t",
        }
    }
}

/// `left_var.left_attr op right_var.right_attr`, with attributes as column indexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub left_var: TupleVar,
    pub left_attr: usize,
    pub op: Operator,
    pub right_var: TupleVar,
    pub right_attr: usize,
}

impl Predicate {
    /// Builds a predicate; a `t … s` predicate is rewritten to the equivalent `s … t` form.
    pub fn new(left_var: TupleVar, left_attr: usize, op: Operator, right_var: TupleVar, right_attr: usize) -> Self {
        if left_var == TupleVar::T && right_var == TupleVar::S {
            Predicate {
                left_var: right_var,
                left_attr: right_attr,
                op: op.mirror(),
                right_var: left_var,
                right_attr: left_attr,
            }
        } else {
            Predicate {
                left_var,
                left_attr,
                op,
                right_var,
                right_attr,
            }
        }
    }

    /// `s.left op t.right`.
    pub fn pair(left_attr: usize, op: Operator, right_attr: usize) -> Self {
        Predicate::new(TupleVar::S, left_attr, op, TupleVar::T, right_attr)
    }

    pub fn is_two_tuple(&self) -> bool {
        self.left_var != self.right_var
    }

    /// `s.A op t.A`.
    pub fn is_row_homogeneous(&self) -> bool {
        self.is_two_tuple() && self.left_attr == self.right_attr
    }

    /// `s.A op t.B` with `A ≠ B`.
    pub fn is_heterogeneous(&self) -> bool {
        self.is_two_tuple() && self.left_attr != self.right_attr
    }

    /// Both operands on the same tuple, e.g. `s.A op s.B`.
    pub fn is_single_tuple(&self) -> bool {
        !self.is_two_tuple()
    }

    pub fn with_op(self, op: Operator) -> Self {
        Predicate { op, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Only `s.A = t.A` predicates.
    EqualityOnly,
    /// Row-homogeneous equalities plus exactly one two-tuple ordering predicate.
    SingleInequality,
    /// Two-tuple predicates over the same attribute on both sides.
    Homogeneous,
    /// At least one two-tuple predicate over different attributes.
    Heterogeneous,
    /// At least one predicate over a single tuple.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DenialConstraint {
    pub predicates: Vec<Predicate>,
}

#[derive(Error, Debug, PartialEq)]
pub enum DcError {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("a denial constraint needs at least one predicate")]
    Empty,
    #[error("operator {op} is not defined on {kind} attribute `{attr}`")]
    IllegalOperator {
        op: Operator,
        attr: String,
        kind: crate::relation::ColumnKind,
    },
    #[error("attributes `{left}` and `{right}` have different kinds")]
    Incomparable { left: String, right: String },
    #[error("attribute index {0} is out of range")]
    AttributeOutOfRange(usize),
}

impl DenialConstraint {
    pub fn new(predicates: Vec<Predicate>) -> Result<Self, DcError> {
        if predicates.is_empty() {
            return Err(DcError::Empty);
        }
        Ok(DenialConstraint { predicates })
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn shape(&self) -> Shape {
        let ps = &self.predicates;
        if ps.iter().any(Predicate::is_single_tuple) {
            return Shape::Mixed;
        }
        let rest: Vec<&Predicate> = ps
            .iter()
            .filter(|p| !(p.is_row_homogeneous() && p.op == Operator::Eq))
            .collect();
        match rest.as_slice() {
            [] => Shape::EqualityOnly,
            [p] if p.op.is_ordering() => Shape::SingleInequality,
            _ if rest.iter().any(|p| p.is_heterogeneous()) => Shape::Heterogeneous,
            _ => Shape::Homogeneous,
        }
    }

    /// Columns referenced by any predicate, in first-use order.
    pub fn attributes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for p in &self.predicates {
            for a in [p.left_attr, p.right_attr] {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }

    /// Checks attribute indexes and operator legality against a relation.
    pub fn validate(&self, relation: &Relation) -> Result<(), DcError> {
        if self.predicates.is_empty() {
            return Err(DcError::Empty);
        }
        for p in &self.predicates {
            for a in [p.left_attr, p.right_attr] {
                if a >= relation.column_count() {
                    return Err(DcError::AttributeOutOfRange(a));
                }
            }
            let (l, r) = (relation.column(p.left_attr), relation.column(p.right_attr));
            if l.kind != r.kind {
                return Err(DcError::Incomparable {
                    left: l.name.clone(),
                    right: r.name.clone(),
                });
            }
            if p.op.is_ordering() && !l.kind.is_ordered() {
                return Err(DcError::IllegalOperator {
                    op: p.op,
                    attr: l.name.clone(),
                    kind: l.kind,
                });
            }
        }
        Ok(())
    }
}

impl From<Predicate> for DenialConstraint {
    fn from(p: Predicate) -> Self {
        DenialConstraint { predicates: vec![p] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Operator::*;

    #[test]
    fn operator_algebra() {
        for op in Operator::ALL {
            assert_eq!(op.negate().negate(), op);
            assert_eq!(op.mirror().mirror(), op);
            for ord in [Ordering::Less, Ordering::Equal, Ordering::Greater] {
                assert_ne!(op.accepts(ord), op.negate().accepts(ord));
                assert_eq!(op.accepts(ord), op.mirror().accepts(ord.reverse()));
            }
        }
    }

    #[test]
    fn t_s_predicates_normalize() {
        let p = Predicate::new(TupleVar::T, 1, Lt, TupleVar::S, 2);
        assert_eq!(p, Predicate::pair(2, Gt, 1));
    }

    #[test]
    fn shapes() {
        let dc = |ps: Vec<Predicate>| DenialConstraint::new(ps).unwrap().shape();
        let single = Predicate::new(TupleVar::S, 0, Ge, TupleVar::S, 1);
        assert_eq!(dc(vec![Predicate::pair(0, Eq, 0)]), Shape::EqualityOnly);
        assert_eq!(
            dc(vec![Predicate::pair(0, Eq, 0), Predicate::pair(1, Lt, 2)]),
            Shape::SingleInequality
        );
        assert_eq!(dc(vec![Predicate::pair(0, Neq, 0)]), Shape::Homogeneous);
        assert_eq!(
            dc(vec![Predicate::pair(0, Lt, 0), Predicate::pair(1, Gt, 1)]),
            Shape::Homogeneous
        );
        assert_eq!(
            dc(vec![Predicate::pair(0, Lt, 0), Predicate::pair(1, Eq, 2)]),
            Shape::Heterogeneous
        );
        assert_eq!(dc(vec![Predicate::pair(0, Eq, 0), single]), Shape::Mixed);
        assert_eq!(DenialConstraint::new(vec![]), Err(DcError::Empty));
    }
}
