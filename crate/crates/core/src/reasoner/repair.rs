use crate::deduction::{check_proof, prove_level, DeductionOutcome};
use crate::planner::{PlanError, Planner};
use crate::world_model::ObservationFrame;

use super::ActionClaim;

/// Checks a backend's action claim against the constraint and deduction
/// modules. The claim is snapped to the nearest sampled candidate; if the
/// claimed level cannot be proved for it (or there is no claim) the planner's
/// own choice is returned with `repaired` set.
///
/// Only fails when the frame itself cannot be evaluated, e.g. an activity
/// without a preferred distance.
pub fn validate_and_repair(
    claim: Option<&ActionClaim>,
    frame: &ObservationFrame,
    prev: Option<&ObservationFrame>,
    elapsed: f64,
    planner: &Planner,
) -> Result<DeductionOutcome, PlanError> {
    if let Some(claim) = claim {
        let action = planner.nearest_candidate(claim.velocity);
        let eval = planner.evaluate_action(&action, frame, elapsed)?;
        if let Ok(tree) = prove_level(&action, claim.level, eval.predicates) {
            let verified = check_proof(&tree, eval.predicates);
            return Ok(DeductionOutcome {
                action,
                level: claim.level,
                predicates: eval.predicates,
                tree,
                verified,
                forced: false,
                repaired: false,
            });
        }
    }
    let mut outcome = planner.plan_step(frame, prev, elapsed)?;
    outcome.repaired = true;
    Ok(outcome)
}
