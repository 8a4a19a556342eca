use std::cmp::Ordering;

use crate::constraints::{Level, PredicateVector};
use crate::planner::CandidateAction;

use super::prove::{build_level_tree, first_unsupported, level_literals, prove_level};
use super::{check_proof, DeductionError, DeductionOutcome};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredCandidate {
    pub action: CandidateAction,
    pub predicates: PredicateVector,
    pub score: f64,
}

/// Higher score first, then lower candidate index.
fn by_preference(a: &ScoredCandidate, b: &ScoredCandidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.action.index.cmp(&b.action.index))
}

/// Tries D1 through D4 in order and returns the best-scoring candidate
/// provable at the first level any candidate reaches.
///
/// When nothing reaches D4 the least-violating candidate is forced out with
/// an unverified D4 tree. Ranking for the forced pick: fewest false D4
/// literals, then collision-free over colliding, then score, then index.
pub fn degrade_and_select(
    candidates: &[ScoredCandidate],
) -> Result<DeductionOutcome, DeductionError> {
    if candidates.is_empty() {
        return Err(DeductionError::NoCandidates);
    }
    for level in Level::ALL {
        let best = candidates
            .iter()
            .filter(|c| first_unsupported(level, c.predicates).is_none())
            .min_by(|a, b| by_preference(a, b));
        if let Some(c) = best {
            let tree = prove_level(&c.action, level, c.predicates)
                .expect("candidate was filtered on level support");
            let verified = check_proof(&tree, c.predicates);
            return Ok(DeductionOutcome {
                action: c.action,
                level,
                predicates: c.predicates,
                tree,
                verified,
                forced: false,
                repaired: false,
            });
        }
    }

    let violations = |c: &ScoredCandidate| {
        level_literals(Level::D4)
            .iter()
            .filter(|l| !l.holds(c.predicates))
            .count()
    };
    let c = candidates
        .iter()
        .min_by(|a, b| {
            violations(a)
                .cmp(&violations(b))
                .then(b.predicates.not_ec.cmp(&a.predicates.not_ec))
                .then(by_preference(a, b))
        })
        .expect("non-empty");
    let tree = build_level_tree(c.action.index, Level::D4);
    let verified = check_proof(&tree, c.predicates);
    debug_assert!(!verified);
    Ok(DeductionOutcome {
        action: c.action,
        level: Level::D4,
        predicates: c.predicates,
        tree,
        verified,
        forced: true,
        repaired: false,
    })
}
