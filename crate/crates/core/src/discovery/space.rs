use crate::dc::{Operator, Predicate};
use crate::relation::{domain_overlap, ColumnKind, Relation};

/// One slot of the predicate space: `s.left op t.right` for each allowed `op`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceItem {
    pub left: usize,
    pub right: usize,
    pub ops: Vec<Operator>,
}

impl SpaceItem {
    pub fn predicates(&self) -> impl Iterator<Item = Predicate> + '_ {
        self.ops.iter().map(|&op| Predicate::pair(self.left, op, self.right))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredicateSpace {
    pub items: Vec<SpaceItem>,
}

impl PredicateSpace {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn predicate_count(&self) -> usize {
        self.items.iter().map(|i| i.ops.len()).sum()
    }
}

#[derive(Clone, Debug)]
pub struct SpaceConfig {
    /// Columns to draw predicates from; all columns when `None`.
    pub columns: Option<Vec<usize>>,
    /// Add `s.A op t.B` for pairs of comparable columns.
    pub cross_column: bool,
    /// Minimum value overlap for two columns to count as comparable.
    pub overlap_threshold: f64,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig {
            columns: None,
            cross_column: false,
            overlap_threshold: 0.3,
        }
    }
}

fn ops_for(kind: ColumnKind) -> Vec<Operator> {
    if kind.is_ordered() {
        Operator::ALL.to_vec()
    } else {
        vec![Operator::Eq, Operator::Neq]
    }
}

/// Same-column items in column order, then cross-column items for each
/// comparable pair in both directions.
pub fn build_predicate_space(relation: &Relation, config: &SpaceConfig) -> PredicateSpace {
    let cols: Vec<usize> = match &config.columns {
        Some(c) => c.clone(),
        None => (0..relation.column_count()).collect(),
    };
    let mut items: Vec<SpaceItem> = cols
        .iter()
        .map(|&c| SpaceItem {
            left: c,
            right: c,
            ops: ops_for(relation.column(c).kind),
        })
        .collect();
    if config.cross_column {
        for (i, &a) in cols.iter().enumerate() {
            for &b in &cols[i + 1..] {
                let kind = relation.column(a).kind;
                if kind != relation.column(b).kind || domain_overlap(relation, a, b) < config.overlap_threshold {
                    continue;
                }
                for (l, r) in [(a, b), (b, a)] {
                    items.push(SpaceItem {
                        left: l,
                        right: r,
                        ops: ops_for(kind),
                    });
                }
            }
        }
    }
    PredicateSpace { items }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::RelationBuilder;

    #[test]
    fn comparable_pairs_only() {
        let r = RelationBuilder::new("r")
            .int("a", [1, 2, 3, 4])
            .int("b", [3, 4, 5, 6])
            .int("c", [100, 200, 300, 400])
            .text("d", ["x", "y", "x", "y"])
            .build()
            .unwrap();
        let space = build_predicate_space(&r, &SpaceConfig::default());
        assert_eq!(space.len(), 4);
        assert_eq!(space.predicate_count(), 6 * 3 + 2);

        let cross = SpaceConfig {
            cross_column: true,
            ..Default::default()
        };
        let space = build_predicate_space(&r, &cross);
        let pairs: Vec<(usize, usize)> = space.items[4..].iter().map(|i| (i.left, i.right)).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 0)]);
        assert!(space
            .items
            .iter()
            .all(|i| i.ops.len() == 6 || r.column(i.left).kind == ColumnKind::Categorical));
    }
}
