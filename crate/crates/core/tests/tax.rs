//! The four-row tax relation used throughout the documentation.

mod common;

use common::*;
use rangedc::dc::{format_dc, split_mixed, Shape};
use rangedc::discovery::{discover, DiscoveryConfig, Outcome, SpaceConfig};
use rangedc::index::{Backend, OrthogonalRangeIndex, RangeQuery};
use rangedc::oracle::brute_force_verify;
use rangedc::relation::Key;
use rangedc::verify::{create_search_ranges, verify, verify_mixed, VerifyOptions};

fn k(v: i64) -> Option<Key> {
    Some(Key::Int(v))
}

#[test]
fn all_four_constraints_hold_on_tax() {
    let r = tax();
    for text in [PHI1, PHI2, PHI3, PHI4] {
        let dc = dc(text, &r);
        assert!(brute_force_verify(&r, &dc).unwrap().holds, "{text}");
        for backend in Backend::ALL {
            let v = verify(&r, &dc, &VerifyOptions::backend(backend)).unwrap();
            assert!(v.holds, "{text} on {backend}");
            assert_eq!(v.rows_examined, 4);
        }
    }
}

#[test]
fn raised_tax_rate_violates_phi3() {
    let r = tax_prime();
    let phi3 = dc(PHI3, &r);
    for backend in Backend::ALL {
        let v = verify(&r, &phi3, &VerifyOptions::backend(backend)).unwrap();
        assert!(!v.holds);
        assert!(matches!(v.witness, Some((3, 1)) | Some((3, 2))), "{:?}", v.witness);
    }
    for text in [PHI1, PHI2] {
        assert!(verify(&r, &dc(text, &r), &VerifyOptions::default()).unwrap().holds);
    }
}

#[test]
fn search_ranges_at_t3() {
    let r = tax();
    let ranges = create_search_ranges(&r, 2, &dc(PHI3, &r)).unwrap();
    let salary = r.column_index("Salary").unwrap();
    let rate = r.column_index("FedTaxRate").unwrap();
    assert_eq!(ranges.dims, vec![salary, rate]);
    assert_eq!(ranges.forward.lower, vec![None, k(20)]);
    assert_eq!(ranges.forward.upper, vec![k(6000), None]);
    assert_eq!(ranges.inverted.lower, vec![k(6000), None]);
    assert_eq!(ranges.inverted.upper, vec![None, k(20)]);
    assert!(ranges.forward.upper_strict[0] && ranges.forward.lower_strict[1]);
    assert_eq!(ranges.inverted, ranges.forward.inverted());
}

#[test]
fn search_ranges_at_t4_after_the_raise() {
    let r = tax_prime();
    let ranges = create_search_ranges(&r, 3, &dc(PHI3, &r)).unwrap();
    assert_eq!(ranges.forward.lower, vec![None, k(22)]);
    assert_eq!(ranges.forward.upper, vec![k(4000), None]);
}

#[test]
fn box_query_over_salary_and_rate_returns_t4() {
    let r = tax();
    let q = RangeQuery {
        lower: vec![k(3500), k(5)],
        upper: vec![k(4500), k(22)],
        lower_strict: vec![false; 2],
        upper_strict: vec![false; 2],
    };
    for backend in Backend::ALL {
        let mut index = backend.create(2);
        for row in 0..r.row_count() {
            let p = [r.key(2, row).unwrap(), r.key(3, row).unwrap()];
            index.insert(&p, row as u32).unwrap();
        }
        assert_eq!(index.find_any(&q).unwrap(), Some(3), "{backend}");
    }
}

#[test]
fn mixed_constraint_on_tax() {
    let r = tax();
    let mixed = dc("!(s.SSN == t.SSN & s.Salary >= s.FedTaxRate)", &r);
    assert_eq!(mixed.shape(), Shape::Mixed);
    let parts = split_mixed(&mixed);
    assert_eq!(parts.s_only.len(), 1);
    assert!(parts.t_only.is_empty());
    assert!(verify_mixed(&r, &mixed, &VerifyOptions::default()).unwrap().holds);

    let s_only = dc("!(s.Salary >= s.FedTaxRate)", &r);
    let v = verify_mixed(&r, &s_only, &VerifyOptions::default()).unwrap();
    assert_eq!((v.holds, v.witness), (false, Some((1, 0))));
}

fn three_column_config(r: &rangedc::relation::Relation) -> DiscoveryConfig {
    let cols = ["SSN", "Zip", "State"].map(|c| r.column_index(c).unwrap()).to_vec();
    DiscoveryConfig {
        max_level: 2,
        space: SpaceConfig {
            columns: Some(cols),
            ..Default::default()
        },
        record_log: true,
        ..Default::default()
    }
}

#[test]
fn discovery_emits_key_and_zip_state_in_level_order() {
    let r = tax();
    let summary = discover(&r, &three_column_config(&r), None, |_| {}).unwrap();
    let texts: Vec<String> = summary.emitted.iter().map(|d| format_dc(d, &r)).collect();
    let key = texts
        .iter()
        .position(|t| t == "!(s.SSN == t.SSN)")
        .expect("key emitted");
    let zip = texts
        .iter()
        .position(|t| t == "!(s.Zip == t.Zip & s.State != t.State)")
        .expect("zip emitted");
    assert!(key < zip);
    assert_eq!(summary.levels_completed, 2);
}

#[test]
fn candidates_implied_by_found_constraints_are_never_verified() {
    let r = tax();
    let summary = discover(&r, &three_column_config(&r), None, |_| {}).unwrap();
    let outcome = |text: &str| {
        let target = dc(text, &r);
        summary.log.iter().find(|c| c.dc == target).map(|c| c.outcome)
    };
    assert_eq!(outcome("!(s.SSN != t.SSN)"), Some(Outcome::Pruned));
    assert_eq!(outcome("!(s.SSN != t.SSN & s.Zip == t.Zip)"), Some(Outcome::Pruned));
    assert_eq!(outcome("!(s.SSN != t.SSN & s.State != t.State)"), Some(Outcome::Pruned));
    assert_eq!(outcome("!(s.Zip != t.Zip & s.State != t.State)"), Some(Outcome::Pruned));
    assert_eq!(outcome("!(s.SSN == t.SSN & s.Zip == t.Zip)"), Some(Outcome::NotMinimal));
    assert_eq!(outcome("!(s.Zip == t.Zip & s.State == t.State)"), Some(Outcome::Fails));
}
