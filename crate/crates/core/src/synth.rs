//! Synthetic relations and constraints for benchmarks and randomized tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dc::{DenialConstraint, Operator, Predicate, Shape, TupleVar};
use crate::relation::{ColumnKind, Relation, RelationBuilder};

/// `R(A, B)` with `(1, 1)` first and `(1, 2)` everywhere else. The constraint
/// `¬(s.A = t.A ∧ s.B < t.B)` is violated by rows 0 and 1.
pub fn adversarial(rows: usize) -> (Relation, DenialConstraint) {
    let relation = RelationBuilder::new("adversarial")
        .int("A", std::iter::repeat_n(1, rows))
        .int("B", (0..rows).map(|i| if i == 0 { 1 } else { 2 }))
        .build()
        .expect("columns have equal length");
    let dc = DenialConstraint::new(vec![
        Predicate::pair(0, Operator::Eq, 0),
        Predicate::pair(1, Operator::Lt, 1),
    ])
    .expect("non-empty");
    (relation, dc)
}

/// `R(A, B)` with `A` uniform and `B` a nondecreasing function of `A`, so
/// `¬(s.A < t.A ∧ s.B > t.B)` holds and every row must be checked.
pub fn monotone(rows: usize, seed: u64) -> (Relation, DenialConstraint) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<i64> = (0..rows).map(|_| rng.gen_range(0..(rows as i64 * 4).max(1))).collect();
    let b: Vec<i64> = a.iter().map(|&x| x / 3 + 17).collect();
    let relation = RelationBuilder::new("monotone")
        .int("A", a)
        .int("B", b)
        .build()
        .expect("columns have equal length");
    let dc = DenialConstraint::new(vec![
        Predicate::pair(0, Operator::Lt, 0),
        Predicate::pair(1, Operator::Gt, 1),
    ])
    .expect("non-empty");
    (relation, dc)
}

/// `cols` integer columns `c0..` drawn uniformly from `0..domain`.
pub fn uniform(rows: usize, cols: usize, domain: i64, seed: u64) -> Relation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = RelationBuilder::new("uniform");
    for c in 0..cols {
        let values: Vec<i64> = (0..rows).map(|_| rng.gen_range(0..domain.max(1))).collect();
        b = b.int(&format!("c{c}"), values);
    }
    b.build().expect("columns have equal length")
}

/// Shape of a random relation.
#[derive(Clone, Debug)]
pub struct RandomRelationSpec {
    pub rows: usize,
    pub numeric: usize,
    pub categorical: usize,
    /// Numeric values fall in `0..domain`; small domains give many ties.
    pub domain: i64,
    pub null_rate: f64,
    /// Make roughly half the numeric columns floats, some with fractional parts.
    pub floats: bool,
}

impl Default for RandomRelationSpec {
    fn default() -> Self {
        RandomRelationSpec {
            rows: 50,
            numeric: 3,
            categorical: 1,
            domain: 8,
            null_rate: 0.0,
            floats: false,
        }
    }
}

pub fn random_relation<R: Rng>(rng: &mut R, spec: &RandomRelationSpec) -> Relation {
    const WORDS: [&str; 6] = ["ash", "birch", "cedar", "elm", "fir", "oak"];
    let mut b = RelationBuilder::new("random");
    let null = |rng: &mut R| spec.null_rate > 0.0 && rng.gen_bool(spec.null_rate);
    for c in 0..spec.numeric {
        let name = format!("n{c}");
        if spec.floats && rng.gen_bool(0.5) {
            let values: Vec<Option<f64>> = (0..spec.rows)
                .map(|_| {
                    let v = rng.gen_range(0..spec.domain.max(1) * 2) as f64 / 2.0;
                    (!null(rng)).then_some(v)
                })
                .collect();
            b = b.nullable_float(&name, values);
        } else {
            let values: Vec<Option<i64>> = (0..spec.rows)
                .map(|_| {
                    let v = rng.gen_range(0..spec.domain.max(1));
                    (!null(rng)).then_some(v)
                })
                .collect();
            b = b.nullable_int(&name, values);
        }
    }
    for c in 0..spec.categorical {
        let width = rng.gen_range(2..=WORDS.len());
        let values: Vec<Option<&str>> = (0..spec.rows)
            .map(|_| {
                let w = WORDS[rng.gen_range(0..width)];
                (!null(rng)).then_some(w)
            })
            .collect();
        b = b.nullable_text(&format!("c{c}"), values);
    }
    b.build().expect("columns have equal length")
}

fn random_op<R: Rng>(rng: &mut R, ordered: bool) -> Operator {
    if ordered {
        *Operator::ALL.choose(rng).expect("non-empty")
    } else if rng.gen_bool(0.5) {
        Operator::Eq
    } else {
        Operator::Neq
    }
}

/// A column of the same kind as `a`, preferring a different one.
fn partner<R: Rng>(rng: &mut R, relation: &Relation, a: usize) -> usize {
    let kind = relation.column(a).kind;
    let others: Vec<usize> = (0..relation.column_count())
        .filter(|&c| c != a && relation.column(c).kind == kind)
        .collect();
    others.choose(rng).copied().unwrap_or(a)
}

fn random_predicate<R: Rng>(
    rng: &mut R,
    relation: &Relation,
    lv: TupleVar,
    rv: TupleVar,
    same_attr: bool,
) -> Predicate {
    let a = rng.gen_range(0..relation.column_count());
    let b = if same_attr { a } else { partner(rng, relation, a) };
    let op = random_op(rng, relation.column(a).kind != ColumnKind::Categorical);
    Predicate::new(lv, a, op, rv, b)
}

/// Random valid constraint of roughly the requested shape with at most
/// `max_predicates` predicates.
pub fn random_dc<R: Rng>(rng: &mut R, relation: &Relation, shape: Shape, max_predicates: usize) -> DenialConstraint {
    use TupleVar::{S, T};
    let max = max_predicates.max(1);
    let numeric: Vec<usize> = (0..relation.column_count())
        .filter(|&c| relation.column(c).kind.is_ordered())
        .collect();
    let eq = |rng: &mut R| {
        let a = rng.gen_range(0..relation.column_count());
        Predicate::pair(a, Operator::Eq, a)
    };
    let mut ps = Vec::new();
    match shape {
        Shape::EqualityOnly => {
            for _ in 0..rng.gen_range(1..=max.min(3)) {
                ps.push(eq(rng));
            }
        }
        Shape::SingleInequality if !numeric.is_empty() => {
            for _ in 0..rng.gen_range(0..max.min(3)) {
                ps.push(eq(rng));
            }
            let a = *numeric.choose(rng).expect("non-empty");
            let b = if rng.gen_bool(0.5) {
                a
            } else {
                partner(rng, relation, a)
            };
            let op = *[Operator::Lt, Operator::Le, Operator::Gt, Operator::Ge]
                .choose(rng)
                .expect("non-empty");
            ps.push(Predicate::pair(a, op, b));
        }
        Shape::Homogeneous | Shape::SingleInequality => {
            for _ in 0..rng.gen_range(1..=max.min(4)) {
                ps.push(random_predicate(rng, relation, S, T, true));
            }
        }
        Shape::Heterogeneous => {
            ps.push(random_predicate(rng, relation, S, T, false));
            for _ in 1..rng.gen_range(1..=max.min(4)) {
                let same = rng.gen_bool(0.4);
                ps.push(random_predicate(rng, relation, S, T, same));
            }
        }
        Shape::Mixed => {
            let singles = rng.gen_range(1..=max.min(2));
            for _ in 0..singles {
                let v = if rng.gen_bool(0.5) { S } else { T };
                ps.push(random_predicate(rng, relation, v, v, false));
            }
            for _ in singles..rng.gen_range(singles..=max.min(4)) {
                let same = rng.gen_bool(0.6);
                ps.push(random_predicate(rng, relation, S, T, same));
            }
        }
    }
    ps.shuffle(rng);
    DenialConstraint::new(ps).expect("at least one predicate")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{verify, VerifyOptions};

    #[test]
    fn generated_constraints_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = random_relation(&mut rng, &RandomRelationSpec::default());
        for shape in [
            Shape::EqualityOnly,
            Shape::SingleInequality,
            Shape::Homogeneous,
            Shape::Heterogeneous,
            Shape::Mixed,
        ] {
            for _ in 0..50 {
                let dc = random_dc(&mut rng, &r, shape, 4);
                dc.validate(&r).unwrap();
                assert!(dc.len() <= 4);
            }
        }
    }

    #[test]
    fn fixed_generators() {
        let (r, dc) = adversarial(10);
        let v = verify(&r, &dc, &VerifyOptions::default()).unwrap();
        assert_eq!((v.holds, v.rows_examined, v.witness), (false, 2, Some((0, 1))));
        let (r, dc) = monotone(500, 1);
        assert!(verify(&r, &dc, &VerifyOptions::default()).unwrap().holds);
        assert_eq!(uniform(10, 3, 5, 1).column_count(), 3);
    }
}
