#![allow(dead_code)]

use std::path::PathBuf;

use rangedc::dc::{parse_dc, DenialConstraint};
use rangedc::relation::{ingest_csv, IngestOptions, Relation, Schema};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn load(name: &str) -> Relation {
    let options = IngestOptions {
        schema: Some(Schema::from_path(data("tax.schema.json")).unwrap()),
        ..Default::default()
    };
    ingest_csv(data(name), &options).unwrap()
}

pub fn tax() -> Relation {
    load("tax.csv")
}

/// Tax with t4.FedTaxRate raised from 10 to 22.
pub fn tax_prime() -> Relation {
    load("tax_prime.csv")
}

pub fn dc(text: &str, relation: &Relation) -> DenialConstraint {
    parse_dc(text, relation).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub const PHI1: &str = "!(s.SSN == t.SSN)";
pub const PHI2: &str = "!(s.Zip == t.Zip & s.State != t.State)";
pub const PHI3: &str = "!(s.State == t.State & s.Salary < t.Salary & s.FedTaxRate > t.FedTaxRate)";
pub const PHI4: &str = "!(s.Salary < t.FedTaxRate)";
