//! Anytime discovery of minimal exact denial constraints.
//!
//! Candidates are visited level by level: all constraints with one predicate,
//! then two, and so on. A candidate is verified only if no constraint found so
//! far is contained in it and none implies it by swapping one predicate for its
//! negation. Each constraint that holds is handed to the caller immediately.

mod space;

use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cancel::CancelToken;
use crate::dc::{negate_predicate, DenialConstraint, Predicate};
use crate::index::Backend;
use crate::relation::Relation;
use crate::verify::{verify, NullPolicy, VerifyError, VerifyOptions};

pub use space::{build_predicate_space, PredicateSpace, SpaceConfig, SpaceItem};

#[derive(Clone, Debug)]
pub struct DiscoveryConfig {
    pub max_level: usize,
    pub backend: Backend,
    pub time_budget: Option<Duration>,
    /// Stop after this many candidates have been considered.
    pub candidate_budget: Option<usize>,
    pub space: SpaceConfig,
    /// Reject candidates on a random sample of this many rows before the full check.
    pub sample: Option<usize>,
    pub seed: u64,
    pub nulls: NullPolicy,
    /// Keep the outcome of every candidate in the summary.
    pub record_log: bool,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        DiscoveryConfig {
            max_level: 3,
            backend: Backend::KdTree,
            time_budget: None,
            candidate_budget: None,
            space: SpaceConfig::default(),
            sample: None,
            seed: 0,
            nulls: NullPolicy::False,
            record_log: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Contains an emitted constraint.
    NotMinimal,
    /// Implied by an emitted constraint with one predicate negated.
    Pruned,
    Holds,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateRecord {
    pub dc: DenialConstraint,
    pub level: usize,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Emitted {
    pub dc: DenialConstraint,
    pub level: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Budget,
    Cancelled,
}

#[derive(Clone, Debug, Default)]
pub struct DiscoverySummary {
    pub emitted: Vec<DenialConstraint>,
    pub levels_completed: usize,
    pub candidates_considered: usize,
    pub candidates_verified: usize,
    pub stopped: Option<StopReason>,
    pub elapsed: Duration,
    pub log: Vec<CandidateRecord>,
}

#[derive(Error, Debug)]
pub enum DiscoveryError {
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("column index {0} is out of range")]
    Column(usize),
}

fn subset(small: &[Predicate], big: &[Predicate]) -> bool {
    small.iter().all(|p| big.contains(p))
}

/// False when some found constraint's predicates all appear in `candidate`.
pub fn is_minimal(found: &[DenialConstraint], candidate: &DenialConstraint) -> bool {
    !found.iter().any(|psi| subset(&psi.predicates, &candidate.predicates))
}

/// False when, for some found `ψ = ¬(p1 ∧ … ∧ pm)` and some `j`, the candidate
/// contains every `pi` with `i ≠ j` together with `¬pj`.
pub fn not_pruned(found: &[DenialConstraint], candidate: &DenialConstraint) -> bool {
    !found.iter().any(|psi| {
        (0..psi.predicates.len()).any(|j| {
            psi.predicates.iter().enumerate().all(|(i, p)| {
                let needed = if i == j { negate_predicate(p) } else { *p };
                candidate.predicates.contains(&needed)
            })
        })
    })
}

/// Next combination of `k` indexes out of `n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Next operator choice, last position fastest.
fn next_choice(choice: &mut [usize], limits: &[usize]) -> bool {
    for i in (0..choice.len()).rev() {
        choice[i] += 1;
        if choice[i] < limits[i] {
            return true;
        }
        choice[i] = 0;
    }
    false
}

/// Candidates of one level in visiting order.
pub fn level_candidates(space: &PredicateSpace, k: usize) -> Vec<DenialConstraint> {
    let n = space.items.len();
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let items: Vec<&SpaceItem> = combo.iter().map(|&i| &space.items[i]).collect();
        let limits: Vec<usize> = items.iter().map(|i| i.ops.len()).collect();
        let mut choice = vec![0; k];
        loop {
            let predicates = items
                .iter()
                .zip(&choice)
                .map(|(item, &o)| Predicate::pair(item.left, item.ops[o], item.right))
                .collect();
            out.push(DenialConstraint { predicates });
            if !next_choice(&mut choice, &limits) {
                break;
            }
        }
        if !next_combination(&mut combo, n) {
            break;
        }
    }
    out
}

/// Runs discovery, calling `sink` for each constraint as soon as it is found.
/// The constraints passed to `sink` are also returned in the summary.
pub fn discover(
    relation: &Relation,
    config: &DiscoveryConfig,
    cancel: Option<&CancelToken>,
    mut sink: impl FnMut(&Emitted),
) -> Result<DiscoverySummary, DiscoveryError> {
    let start = Instant::now();
    if let Some(cols) = &config.space.columns {
        if let Some(&bad) = cols.iter().find(|&&c| c >= relation.column_count()) {
            return Err(DiscoveryError::Column(bad));
        }
    }
    let space = build_predicate_space(relation, &config.space);
    let max_level = config.max_level.min(space.len());
    let token = cancel
        .cloned()
        .unwrap_or_default()
        .deadline(config.time_budget.and_then(|b| start.checked_add(b)));
    let options = VerifyOptions {
        backend: config.backend,
        nulls: config.nulls,
        general_only: false,
        cancel: Some(token.clone()),
    };
    let sampled = config.sample.filter(|&m| m < relation.row_count()).map(|m| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut rows = sample(&mut rng, relation.row_count(), m).into_vec();
        rows.sort_unstable();
        relation.take_rows(&rows)
    });

    let mut summary = DiscoverySummary::default();
    'levels: for level in 1..=max_level {
        for candidate in level_candidates(&space, level) {
            let over_budget = config
                .candidate_budget
                .is_some_and(|b| summary.candidates_considered >= b);
            if over_budget || token.is_cancelled() {
                summary.stopped = Some(if token.is_flagged() {
                    StopReason::Cancelled
                } else {
                    StopReason::Budget
                });
                break 'levels;
            }
            summary.candidates_considered += 1;
            let outcome = if !is_minimal(&summary.emitted, &candidate) {
                Outcome::NotMinimal
            } else if !not_pruned(&summary.emitted, &candidate) {
                Outcome::Pruned
            } else {
                summary.candidates_verified += 1;
                let check = |r: &Relation| match verify(r, &candidate, &options) {
                    Ok(v) => Ok(Some(v.holds)),
                    Err(VerifyError::Cancelled { .. }) => Ok(None),
                    Err(e) => Err(e),
                };
                let holds = match &sampled {
                    Some(s) => match check(s)? {
                        Some(true) => check(relation)?,
                        other => other,
                    },
                    None => check(relation)?,
                };
                match holds {
                    Some(true) => Outcome::Holds,
                    Some(false) => Outcome::Fails,
                    None => {
                        summary.stopped = Some(if token.is_flagged() {
                            StopReason::Cancelled
                        } else {
                            StopReason::Budget
                        });
                        break 'levels;
                    }
                }
            };
            if outcome == Outcome::Holds {
                sink(&Emitted {
                    dc: candidate.clone(),
                    level,
                    elapsed: start.elapsed(),
                });
                summary.emitted.push(candidate.clone());
            }
            if config.record_log {
                summary.log.push(CandidateRecord {
                    dc: candidate,
                    level,
                    outcome,
                });
            }
        }
        summary.levels_completed = level;
    }
    summary.elapsed = start.elapsed();
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dc::Operator::*;

    fn dc(ps: &[Predicate]) -> DenialConstraint {
        DenialConstraint::new(ps.to_vec()).unwrap()
    }

    #[test]
    fn minimality_and_pruning() {
        let a_eq = Predicate::pair(0, Eq, 0);
        let b_neq = Predicate::pair(1, Neq, 1);
        let found = vec![dc(&[a_eq, b_neq])];
        assert!(!is_minimal(&found, &dc(&[b_neq, Predicate::pair(2, Lt, 2), a_eq])));
        assert!(is_minimal(&found, &dc(&[a_eq])));
        // Swapping either predicate for its negation is implied.
        assert!(!not_pruned(&found, &dc(&[a_eq, Predicate::pair(1, Eq, 1)])));
        assert!(!not_pruned(&found, &dc(&[Predicate::pair(0, Neq, 0), b_neq])));
        assert!(not_pruned(
            &found,
            &dc(&[Predicate::pair(0, Neq, 0), Predicate::pair(1, Eq, 1)])
        ));
        assert!(!not_pruned(&[dc(&[a_eq])], &dc(&[Predicate::pair(0, Neq, 0)])));
    }

    #[test]
    fn candidate_order() {
        let space = PredicateSpace {
            items: vec![
                SpaceItem {
                    left: 0,
                    right: 0,
                    ops: vec![Eq, Neq],
                },
                SpaceItem {
                    left: 1,
                    right: 1,
                    ops: vec![Eq, Neq],
                },
                SpaceItem {
                    left: 2,
                    right: 2,
                    ops: vec![Eq, Neq],
                },
            ],
        };
        let l1 = level_candidates(&space, 1);
        assert_eq!(l1.len(), 6);
        let l2 = level_candidates(&space, 2);
        assert_eq!(l2.len(), 12);
        assert_eq!(
            l2[1].predicates,
            vec![Predicate::pair(0, Eq, 0), Predicate::pair(1, Neq, 1)]
        );
        assert_eq!(l2[4].predicates[1], Predicate::pair(2, Eq, 2));
        assert_eq!(level_candidates(&space, 3).len(), 8);
        assert!(level_candidates(&space, 4).is_empty());
    }
}
