//! Verifier against the pairwise oracle on random relations and constraints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rangedc::dc::{format_dc, Shape};
use rangedc::index::Backend;
use rangedc::oracle::{brute_force_verify_with, evaluate_pair, DEFAULT_ROW_CAP};
use rangedc::synth::{random_dc, random_relation, RandomRelationSpec};
use rangedc::verify::{verify, NullPolicy, VerifyOptions};

const SHAPES: [Shape; 5] = [
    Shape::EqualityOnly,
    Shape::SingleInequality,
    Shape::Homogeneous,
    Shape::Heterogeneous,
    Shape::Mixed,
];

fn run(seed: u64, cases: usize, nulls: NullPolicy) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let spec = RandomRelationSpec {
            rows: rng.gen_range(0..80),
            numeric: rng.gen_range(1..4),
            categorical: rng.gen_range(0..3),
            domain: rng.gen_range(2..12),
            null_rate: if rng.gen_bool(0.3) { 0.1 } else { 0.0 },
            floats: rng.gen_bool(0.3),
        };
        let r = random_relation(&mut rng, &spec);
        let shape = SHAPES[case % SHAPES.len()];
        let dc = random_dc(&mut rng, &r, shape, 4);
        let expected = brute_force_verify_with(&r, &dc, DEFAULT_ROW_CAP, nulls).unwrap();
        for backend in Backend::ALL {
            let got = verify(&r, &dc, &VerifyOptions::backend(backend).with_nulls(nulls)).unwrap();
            assert_eq!(
                got.holds,
                expected.holds,
                "case {case} {backend}: {} on {} rows",
                format_dc(&dc, &r),
                r.row_count()
            );
            if let Some((s, t)) = got.witness {
                assert!(
                    evaluate_pair(&r, &dc, s, t).unwrap().violates,
                    "case {case}: bad witness"
                );
            }
            assert!(got.rows_examined <= r.row_count());
        }
    }
}

#[test]
fn agrees_with_oracle() {
    run(11, 600, NullPolicy::False);
}

#[test]
fn agrees_with_oracle_when_dropping_nulls() {
    run(12, 200, NullPolicy::Drop);
}
