use proptest::prelude::*;

use rangedc::index::{Backend, KdTree, LinearScan, OrthogonalRangeIndex, RangeQuery, RangeTree};

fn query_strategy(dim: usize) -> impl Strategy<Value = RangeQuery<i64>> {
    let bound = prop::option::weighted(0.7, -5i64..25);
    (
        prop::collection::vec(bound.clone(), dim),
        prop::collection::vec(bound, dim),
        prop::collection::vec(any::<bool>(), dim),
        prop::collection::vec(any::<bool>(), dim),
    )
        .prop_map(|(lower, upper, lower_strict, upper_strict)| RangeQuery {
            lower,
            upper,
            lower_strict,
            upper_strict,
        })
}

fn case() -> impl Strategy<Value = (usize, Vec<Vec<i64>>, Vec<RangeQuery<i64>>)> {
    (1usize..=4).prop_flat_map(|dim| {
        (
            Just(dim),
            prop::collection::vec(prop::collection::vec(0i64..20, dim), 0..300),
            prop::collection::vec(query_strategy(dim), 1..20),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn backends_match_linear_scan((dim, points, queries) in case()) {
        let mut linear = LinearScan::new(dim);
        let mut others: Vec<_> = [Backend::RangeTree, Backend::KdTree].iter().map(|b| b.create(dim)).collect();
        for (i, p) in points.iter().enumerate() {
            linear.insert(p, i as u32).unwrap();
            for idx in &mut others {
                idx.insert(p, i as u32).unwrap();
            }
            // Interleave queries with inserts so partially built structures are exercised.
            if i % 37 == 0 {
                for q in &queries {
                    let expected = linear.boolean_range_search(q).unwrap();
                    for idx in &others {
                        prop_assert_eq!(idx.boolean_range_search(q).unwrap(), expected);
                    }
                }
            }
        }
        for q in &queries {
            let expected = linear.boolean_range_search(q).unwrap();
            for idx in &others {
                let hit = idx.find_any(q).unwrap();
                prop_assert_eq!(hit.is_some(), expected);
                if let Some(row) = hit {
                    prop_assert!(q.contains(&points[row as usize]));
                }
            }
        }
    }

    #[test]
    fn kd_tree_has_one_node_per_point(points in prop::collection::vec(prop::collection::vec(-3i64..3, 2), 0..500)) {
        let mut t = KdTree::new(2);
        for (i, p) in points.iter().enumerate() {
            t.insert(p, i as u32).unwrap();
        }
        prop_assert_eq!(t.node_count(), points.len());
        prop_assert_eq!(t.len(), points.len());
    }

    #[test]
    fn inverting_twice_is_identity(q in query_strategy(3)) {
        prop_assert_eq!(q.inverted().inverted(), q);
    }

    #[test]
    fn insert_then_query_finds_the_point(points in prop::collection::vec(prop::collection::vec(-50i64..50, 3), 1..200)) {
        let mut t = RangeTree::new(3);
        for (i, p) in points.iter().enumerate() {
            t.insert(p, i as u32).unwrap();
            let q = RangeQuery {
                lower: p.iter().map(|&x| Some(x)).collect(),
                upper: p.iter().map(|&x| Some(x)).collect(),
                lower_strict: vec![false; 3],
                upper_strict: vec![false; 3],
            };
            prop_assert!(t.boolean_range_search(&q).unwrap());
        }
    }
}
