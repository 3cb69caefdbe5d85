//! Single-pass verification of denial constraints.
//!
//! Rows are hashed on the columns of `s.A = t.A` predicates; inside a partition
//! each new row asks the stored rows whether any of them pairs with it in
//! either order, then joins the store. The first hit is a violation, so a dirty
//! relation is usually rejected after reading a small prefix.

mod checkers;
mod ranges;

use std::time::Duration;

use thiserror::Error;

use crate::cancel::CancelToken;
use crate::dc::{expand_disequalities, DcError, DenialConstraint, Shape};
use crate::index::{Backend, IndexError};
use crate::relation::Relation;

use checkers::Checker;
pub use ranges::{create_search_ranges, SearchRangePair};

/// How NULL cells take part in predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum NullPolicy {
    /// A predicate touching a NULL is false.
    #[default]
    False,
    /// Rows with a NULL in any referenced column are skipped.
    Drop,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub backend: Backend,
    pub nulls: NullPolicy,
    /// Skip the min/max shortcut for single-inequality constraints.
    pub general_only: bool,
    pub cancel: Option<CancelToken>,
}

impl VerifyOptions {
    pub fn backend(backend: Backend) -> Self {
        VerifyOptions {
            backend,
            ..Default::default()
        }
    }

    pub fn with_nulls(mut self, nulls: NullPolicy) -> Self {
        self.nulls = nulls;
        self
    }

    pub fn with_cancel(mut self, cancel: CancelToken) -> Self {
        self.cancel = Some(cancel);
        self
    }

    pub fn general_only(mut self) -> Self {
        self.general_only = true;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyStats {
    pub indexes_built: usize,
    pub index_nodes: usize,
    pub points_inserted: usize,
    /// Constraints checked after rewriting `≠`.
    pub expansions: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// A violating `(s, t)` pair of row indexes.
    pub witness: Option<(usize, usize)>,
    pub rows_examined: usize,
    pub backend_used: String,
    pub stats: VerifyStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiVerdict {
    pub holds: bool,
    /// Position of the violated constraint in the input list.
    pub violated: Option<usize>,
    pub witness: Option<(usize, usize)>,
    pub rows_examined: usize,
}

#[derive(Error, Debug)]
pub enum VerifyError {
    #[error(transparent)]
    Dc(#[from] DcError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("cancelled after {rows_examined} rows")]
    Cancelled { rows_examined: usize },
    #[error("{0}")]
    Dispatch(String),
    #[error("row {0} is out of range")]
    RowOutOfRange(usize),
    #[error("row {row} has NULL in a column the constraint compares")]
    NullCell { row: usize },
}

fn compile(dc: &DenialConstraint, options: &VerifyOptions) -> Vec<Checker> {
    expand_disequalities(dc)
        .iter()
        .map(|e| Checker::build(&e.predicates, options.backend, options.general_only))
        .collect()
}

struct Driver<'a> {
    relation: &'a Relation,
    cancel: Option<&'a CancelToken>,
    usable: Box<dyn Fn(usize) -> bool + 'a>,
}

impl<'a> Driver<'a> {
    fn new(relation: &'a Relation, dcs: &[&DenialConstraint], options: &'a VerifyOptions) -> Self {
        let usable: Box<dyn Fn(usize) -> bool> = match options.nulls {
            NullPolicy::False => Box::new(|_| true),
            NullPolicy::Drop => {
                let mut attrs: Vec<usize> = dcs.iter().flat_map(|d| d.attributes()).collect();
                attrs.sort_unstable();
                attrs.dedup();
                Box::new(move |row| attrs.iter().all(|&a| !relation.is_null(a, row)))
            }
        };
        Driver {
            relation,
            cancel: options.cancel.as_ref(),
            usable,
        }
    }

    /// Feeds rows to every checker in lockstep. Returns the rows examined and
    /// the first `(checker, witness)` hit.
    #[allow(clippy::type_complexity)]
    fn run(&self, checkers: &mut [Checker]) -> Result<(usize, Option<(usize, (usize, usize))>), VerifyError> {
        for row in 0..self.relation.row_count() {
            if let Some(c) = self.cancel {
                if c.is_flagged() || (row % 1024 == 0 && c.is_cancelled()) {
                    return Err(VerifyError::Cancelled { rows_examined: row });
                }
            }
            if !(self.usable)(row) {
                continue;
            }
            for (i, checker) in checkers.iter_mut().enumerate() {
                if let Some(w) = checker.process(self.relation, row) {
                    return Ok((row + 1, Some((i, w))));
                }
            }
        }
        Ok((self.relation.row_count(), None))
    }
}

fn verdict(checkers: &[Checker], rows_examined: usize, witness: Option<(usize, usize)>) -> Verdict {
    let mut stats = VerifyStats {
        expansions: checkers.len(),
        ..Default::default()
    };
    for c in checkers {
        c.add_stats(&mut stats);
    }
    let labels: Vec<&str> = checkers.iter().map(Checker::label).collect();
    let backend_used = labels
        .iter()
        .find(|l| !matches!(**l, "counter" | "min-max"))
        .or_else(|| labels.iter().find(|l| **l == "min-max"))
        .or(labels.first())
        .copied()
        .unwrap_or("counter")
        .to_string();
    Verdict {
        holds: witness.is_none(),
        witness,
        rows_examined,
        backend_used,
        stats,
    }
}

/// Checks one constraint in a single pass over the rows.
pub fn verify(relation: &Relation, dc: &DenialConstraint, options: &VerifyOptions) -> Result<Verdict, VerifyError> {
    dc.validate(relation)?;
    let mut checkers = compile(dc, options);
    let (rows, hit) = Driver::new(relation, &[dc], options).run(&mut checkers)?;
    Ok(verdict(&checkers, rows, hit.map(|(_, w)| w)))
}

/// Checks several constraints in one pass and stops at the first violation of any.
pub fn verify_all(
    relation: &Relation,
    dcs: &[DenialConstraint],
    options: &VerifyOptions,
) -> Result<MultiVerdict, VerifyError> {
    let mut checkers = Vec::new();
    let mut owner = Vec::new();
    for (i, dc) in dcs.iter().enumerate() {
        dc.validate(relation)?;
        for c in compile(dc, options) {
            checkers.push(c);
            owner.push(i);
        }
    }
    let refs: Vec<&DenialConstraint> = dcs.iter().collect();
    let (rows, hit) = Driver::new(relation, &refs, options).run(&mut checkers)?;
    Ok(MultiVerdict {
        holds: hit.is_none(),
        violated: hit.map(|(c, _)| owner[c]),
        witness: hit.map(|(_, w)| w),
        rows_examined: rows,
    })
}

/// Min/max path for `s.A op t.B` plus row-homogeneous equalities; builds no index.
pub fn verify_single_inequality(relation: &Relation, dc: &DenialConstraint) -> Result<Verdict, VerifyError> {
    if dc.shape() != Shape::SingleInequality {
        return Err(VerifyError::Dispatch(format!(
            "expected one ordering predicate plus equalities, got {:?}",
            dc.shape()
        )));
    }
    verify(relation, dc, &VerifyOptions::default())
}

/// Path for constraints with single-tuple predicates.
pub fn verify_mixed(
    relation: &Relation,
    dc: &DenialConstraint,
    options: &VerifyOptions,
) -> Result<Verdict, VerifyError> {
    if dc.shape() != Shape::Mixed {
        return Err(VerifyError::Dispatch(format!(
            "expected a constraint with single-tuple predicates, got {:?}",
            dc.shape()
        )));
    }
    verify(relation, dc, options)
}

/// Rows read before the verdict was known.
pub fn early_termination_probe(
    relation: &Relation,
    dc: &DenialConstraint,
    backend: Backend,
) -> Result<usize, VerifyError> {
    Ok(verify(relation, dc, &VerifyOptions::backend(backend))?.rows_examined)
}

/// Verification with a wall-clock limit.
pub fn verify_with_timeout(
    relation: &Relation,
    dc: &DenialConstraint,
    options: &VerifyOptions,
    timeout: Duration,
) -> Result<Verdict, VerifyError> {
    let base = options.cancel.clone().unwrap_or_default();
    let cancel = base.deadline(std::time::Instant::now().checked_add(timeout));
    verify(
        relation,
        dc,
        &VerifyOptions {
            cancel: Some(cancel),
            ..options.clone()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dc::{parse_dc, Operator, Predicate};
    use crate::relation::RelationBuilder;

    fn rel() -> Relation {
        RelationBuilder::new("r")
            .int("g", [1, 1, 2, 2, 1])
            .int("a", [1, 2, 3, 4, 5])
            .int("b", [10, 20, 30, 40, 5])
            .build()
            .unwrap()
    }

    #[test]
    fn paths_report_their_label() {
        let r = rel();
        let cases = [
            ("!(s.a == t.a)", "counter", true),
            ("!(s.g == t.g & s.a < t.b)", "min-max", false),
            ("!(s.g == t.g & s.a < t.a & s.b > t.b)", "range-tree", false),
            ("!(s.a < t.b & s.b < t.a)", "range-tree", true),
            ("!(s.a > s.b & s.g == t.g)", "counter", true),
        ];
        for (text, label, holds) in cases {
            let dc = parse_dc(text, &r).unwrap();
            let v = verify(&r, &dc, &VerifyOptions::default()).unwrap();
            assert_eq!((v.backend_used.as_str(), v.holds), (label, holds), "{text}");
        }
    }

    #[test]
    fn single_inequality_builds_no_index() {
        let r = rel();
        let dc = parse_dc("!(s.g == t.g & s.a < t.b)", &r).unwrap();
        let v = verify_single_inequality(&r, &dc).unwrap();
        assert_eq!(v.stats.indexes_built, 0);
        assert_eq!(v.witness, Some((0, 1)));
        let dc = parse_dc("!(s.a < t.a & s.b < t.b)", &r).unwrap();
        assert!(matches!(
            verify_single_inequality(&r, &dc),
            Err(VerifyError::Dispatch(_))
        ));
    }

    #[test]
    fn cancellation_reports_progress() {
        let r = rel();
        let dc = DenialConstraint::from(Predicate::pair(1, Operator::Eq, 1));
        let token = CancelToken::new();
        token.cancel();
        let e = verify(&r, &dc, &VerifyOptions::default().with_cancel(token)).unwrap_err();
        assert!(matches!(e, VerifyError::Cancelled { rows_examined: 0 }));
    }

    #[test]
    fn verify_all_names_the_violated_constraint() {
        let r = rel();
        let dcs = [
            parse_dc("!(s.a == t.a)", &r).unwrap(),
            parse_dc("!(s.g == t.g & s.b > t.b)", &r).unwrap(),
        ];
        let v = verify_all(&r, &dcs, &VerifyOptions::default()).unwrap();
        assert_eq!((v.violated, v.witness), (Some(1), Some((1, 0))));
    }
}
