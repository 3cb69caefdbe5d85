//! Timed verification runs on generated data.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::dc::{DenialConstraint, Operator, Predicate};
use crate::index::Backend;
use crate::relation::Relation;
use crate::synth;
use crate::verify::{verify, VerifyError, VerifyOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Held two-inequality constraint; every row is indexed and queried.
    Monotone,
    /// Violated by the second row.
    Adversarial,
    /// Random integer columns with `¬(s.c0 < t.c0 ∧ s.c1 > t.c1)`.
    Uniform { cols: usize, domain: i64 },
}

#[derive(Error, Debug)]
#[error("unknown generator `{0}` (expected monotone, adversarial or uniform[:COLS[:DOMAIN]])")]
pub struct UnknownGenerator(pub String);

impl FromStr for Generator {
    type Err = UnknownGenerator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(':');
        let bad = || UnknownGenerator(s.to_string());
        let g = match parts.next() {
            Some("monotone") => Generator::Monotone,
            Some("adversarial") => Generator::Adversarial,
            Some("uniform") => {
                let cols = parts.next().map_or(Ok(2), str::parse).map_err(|_| bad())?;
                let domain = parts.next().map_or(Ok(1000), str::parse).map_err(|_| bad())?;
                if cols < 2 || domain < 1 {
                    return Err(bad());
                }
                Generator::Uniform { cols, domain }
            }
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(g)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Monotone => f.write_str("monotone"),
            Generator::Adversarial => f.write_str("adversarial"),
            Generator::Uniform { cols, domain } => write!(f, "uniform:{cols}:{domain}"),
        }
    }
}

pub fn generate(generator: Generator, rows: usize, seed: u64) -> (Relation, DenialConstraint) {
    match generator {
        Generator::Monotone => synth::monotone(rows, seed),
        Generator::Adversarial => synth::adversarial(rows),
        Generator::Uniform { cols, domain } => {
            let r = synth::uniform(rows, cols, domain, seed);
            let dc = DenialConstraint::new(vec![
                Predicate::pair(0, Operator::Lt, 0),
                Predicate::pair(1, Operator::Gt, 1),
            ])
            .expect("non-empty");
            (r, dc)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub rows: usize,
    pub backend: Backend,
    pub elapsed: Duration,
    pub holds: bool,
    pub rows_examined: usize,
    pub indexes_built: usize,
    pub index_nodes: usize,
    pub points_inserted: usize,
}

/// Verifies `dc` on `relation` and times only the verification.
pub fn run(relation: &Relation, dc: &DenialConstraint, backend: Backend) -> Result<BenchReport, VerifyError> {
    let options = VerifyOptions::backend(backend);
    let start = Instant::now();
    let v = verify(relation, dc, &options)?;
    let elapsed = start.elapsed();
    Ok(BenchReport {
        rows: relation.row_count(),
        backend,
        elapsed,
        holds: v.holds,
        rows_examined: v.rows_examined,
        indexes_built: v.stats.indexes_built,
        index_nodes: v.stats.index_nodes,
        points_inserted: v.stats.points_inserted,
    })
}

/// Median of `runs` timed verifications on one generated relation.
pub fn run_median(
    generator: Generator,
    rows: usize,
    backend: Backend,
    seed: u64,
    runs: usize,
) -> Result<BenchReport, VerifyError> {
    let (relation, dc) = generate(generator, rows, seed);
    let mut reports = (0..runs.max(1))
        .map(|_| run(&relation, &dc, backend))
        .collect::<Result<Vec<_>, _>>()?;
    reports.sort_by_key(|r| r.elapsed);
    Ok(reports.swap_remove(reports.len() / 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_names() {
        for g in [
            Generator::Monotone,
            Generator::Adversarial,
            Generator::Uniform { cols: 3, domain: 50 },
        ] {
            assert_eq!(g.to_string().parse::<Generator>().unwrap(), g);
        }
        assert_eq!(
            "uniform".parse::<Generator>().unwrap(),
            Generator::Uniform { cols: 2, domain: 1000 }
        );
        assert!("uniform:1".parse::<Generator>().is_err());
        assert!("zipf".parse::<Generator>().is_err());
    }

    #[test]
    fn report_counts_index_work() {
        let r = run_median(Generator::Monotone, 1000, Backend::KdTree, 3, 3).unwrap();
        assert!(r.holds);
        assert_eq!((r.points_inserted, r.index_nodes, r.indexes_built), (1000, 1000, 1));
    }
}
