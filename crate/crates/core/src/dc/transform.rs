use super::{DenialConstraint, Operator, Predicate};

pub fn negate_predicate(p: &Predicate) -> Predicate {
    p.with_op(p.op.negate())
}

/// Rewrites every two-tuple `≠` as `<` or `>`, returning constraints whose
/// conjunction is equivalent to `dc`.
///
/// When every predicate is `s.A = t.A` or `s.A ≠ t.A`, swapping `s` and `t`
/// maps one expansion onto another, so the last `≠` only expands to `<` and
/// `2^(ℓ-1)` constraints come back instead of `2^ℓ`.
pub fn expand_disequalities(dc: &DenialConstraint) -> Vec<DenialConstraint> {
    let neq: Vec<usize> = dc
        .predicates
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_two_tuple() && p.op == Operator::Neq)
        .map(|(i, _)| i)
        .collect();
    if neq.is_empty() {
        return vec![dc.clone()];
    }
    let symmetric = dc
        .predicates
        .iter()
        .all(|p| p.is_row_homogeneous() && matches!(p.op, Operator::Eq | Operator::Neq));
    let free = if symmetric { neq.len() - 1 } else { neq.len() };
    (0..1usize << free)
        .map(|mask| {
            let mut predicates = dc.predicates.clone();
            for (bit, &i) in neq.iter().enumerate() {
                let gt = bit < free && mask >> (free - 1 - bit) & 1 == 1;
                predicates[i].op = if gt { Operator::Gt } else { Operator::Lt };
            }
            DenialConstraint { predicates }
        })
        .collect()
}

/// Predicates of a constraint grouped by which tuples they mention.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MixedSplit {
    /// Predicates over `s` alone.
    pub s_only: Vec<Predicate>,
    /// Predicates over `t` alone.
    pub t_only: Vec<Predicate>,
    /// Predicates relating `s` and `t`.
    pub both: Vec<Predicate>,
}

pub fn split_mixed(dc: &DenialConstraint) -> MixedSplit {
    let mut split = MixedSplit::default();
    for p in &dc.predicates {
        match (p.left_var, p.right_var) {
            (super::TupleVar::S, super::TupleVar::S) => split.s_only.push(*p),
            (super::TupleVar::T, super::TupleVar::T) => split.t_only.push(*p),
            _ => split.both.push(*p),
        }
    }
    split
}

#[cfg(test)]
mod tests {
    use super::super::TupleVar;
    use super::*;
    use Operator::*;

    fn dc(ps: Vec<Predicate>) -> DenialConstraint {
        DenialConstraint::new(ps).unwrap()
    }

    #[test]
    fn symmetric_expansion_halves() {
        let d = dc(vec![Predicate::pair(0, Eq, 0), Predicate::pair(1, Neq, 1)]);
        let out = expand_disequalities(&d);
        assert_eq!(
            out,
            vec![dc(vec![Predicate::pair(0, Eq, 0), Predicate::pair(1, Lt, 1)])]
        );

        let d = dc(vec![
            Predicate::pair(0, Neq, 0),
            Predicate::pair(1, Neq, 1),
            Predicate::pair(2, Neq, 2),
        ]);
        let ops: Vec<Vec<Operator>> = expand_disequalities(&d)
            .iter()
            .map(|e| e.predicates.iter().map(|p| p.op).collect())
            .collect();
        assert_eq!(
            ops,
            vec![vec![Lt, Lt, Lt], vec![Lt, Gt, Lt], vec![Gt, Lt, Lt], vec![Gt, Gt, Lt]]
        );
    }

    #[test]
    fn asymmetric_expansion_is_full() {
        let d = dc(vec![Predicate::pair(0, Neq, 0), Predicate::pair(1, Lt, 1)]);
        assert_eq!(expand_disequalities(&d).len(), 2);
        let d = dc(vec![Predicate::pair(0, Neq, 1)]);
        assert_eq!(expand_disequalities(&d).len(), 2);
        let single = Predicate::new(TupleVar::S, 0, Neq, TupleVar::S, 1);
        let d = dc(vec![single, Predicate::pair(2, Neq, 2)]);
        let out = expand_disequalities(&d);
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|e| e.predicates[0] == single));
    }

    #[test]
    fn split() {
        let s = Predicate::new(TupleVar::S, 2, Ge, TupleVar::S, 3);
        let t = Predicate::new(TupleVar::T, 1, Eq, TupleVar::T, 1);
        let st = Predicate::pair(0, Eq, 0);
        let parts = split_mixed(&dc(vec![st, s, t]));
        assert_eq!(parts.s_only, vec![s]);
        assert_eq!(parts.t_only, vec![t]);
        assert_eq!(parts.both, vec![st]);
        assert_eq!(negate_predicate(&s).op, Lt);
    }
}
