//! Proof checker.
//!
//! Re-derives each node from its premises under the rule schemas below and
//! never calls into the prover. Expected formulas (the objective and the
//! level conjunctions) are encoded here a second time from a bitmask table.
//!
//! * assume: no premises. Literal leaves (`Es`, `Ed`, `¬Ec`, `Et` of the
//!   subject) must be true under the facts; hypothesis leaves are either
//!   `∃v. v ∈ A` or `a0 ∈ A` for the subject.
//! * →I: one premise `B`, conclusion `A → B`; or, discharging an
//!   `∃v. v ∈ A` hypothesis `[k]`, conclusion `v ∈ A → Φ(v)`.
//! * ∃E: premises `v ∈ A → B` and `t ∈ A`, conclusion `B[v := t]`.
//! * ∧I: at least two premises, conclusion is their conjunction in order.
//! * →E: premises `A` and `A → B`, conclusion `B`.
//! * verify: root only, one premise, same conclusion.
//!
//! Discharged labels must name assumption leaves in the node's subtree and
//! only →I and ∃E may discharge.

use std::collections::HashSet;

use crate::constraints::{Level, PredicateVector};

use super::formula::{Formula, Predicate, Term};
use super::{InferenceRule, ProofNode, ProofTree};

// Bit order: Es, Ed, ¬Ec, Et.
const LEVEL_MASKS: [u8; 4] = [0b1111, 0b1011, 0b0111, 0b0011];

fn literal_at(bit: usize, t: &Term) -> Formula {
    match bit {
        0 => Formula::Atom(Predicate::Es, t.clone()),
        1 => Formula::Atom(Predicate::Ed, t.clone()),
        2 => Formula::Not(Box::new(Formula::Atom(Predicate::Ec, t.clone()))),
        _ => Formula::Atom(Predicate::Et, t.clone()),
    }
}

fn conjunction_for_mask(mask: u8, t: &Term) -> Formula {
    Formula::And(
        (0..4)
            .filter(|bit| mask & (0b1000 >> bit) != 0)
            .map(|bit| literal_at(bit, t))
            .collect(),
    )
}

fn expected_objective(t: &Term) -> Formula {
    Formula::Or(
        LEVEL_MASKS
            .iter()
            .map(|&m| conjunction_for_mask(m, t))
            .collect(),
    )
}

fn expected_target(level: Level, t: &Term) -> Formula {
    let mask = match level {
        Level::D1 => LEVEL_MASKS[0],
        Level::D2 => LEVEL_MASKS[1],
        Level::D3 => LEVEL_MASKS[2],
        Level::D4 => LEVEL_MASKS[3],
    };
    conjunction_for_mask(mask, t)
}

/// Truth of a literal leaf about `subject`, or `None` when the formula is
/// not such a literal.
fn literal_truth(f: &Formula, subject: &Term, facts: PredicateVector) -> Option<bool> {
    match f {
        Formula::Atom(Predicate::Es, t) if t == subject => Some(facts.es),
        Formula::Atom(Predicate::Ed, t) if t == subject => Some(facts.ed),
        Formula::Atom(Predicate::Et, t) if t == subject => Some(facts.et),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(Predicate::Ec, t) if t == subject => Some(facts.not_ec),
            _ => None,
        },
        _ => None,
    }
}

fn is_space_hypothesis(f: &Formula) -> Option<&str> {
    match f {
        Formula::Exists(v, body) => match body.as_ref() {
            Formula::Atom(Predicate::InActionSpace, Term::Var(w)) if w == v => Some(v),
            _ => None,
        },
        _ => None,
    }
}

fn subtree_labels(node: &ProofNode, out: &mut HashSet<u32>) {
    if node.rule == InferenceRule::Assumption {
        if let Some(l) = node.label {
            out.insert(l);
        }
    }
    for p in &node.premises {
        subtree_labels(p, out);
    }
}

struct Checker {
    subject: Term,
    facts: PredicateVector,
    labels_seen: HashSet<u32>,
}

impl Checker {
    fn node(&mut self, n: &ProofNode, is_root: bool) -> bool {
        if !n.discharged.is_empty() {
            if !matches!(
                n.rule,
                InferenceRule::ImpliesIntro | InferenceRule::ExistsElim
            ) {
                return false;
            }
            let mut below = HashSet::new();
            subtree_labels(n, &mut below);
            if !n.discharged.iter().all(|l| below.contains(l)) {
                return false;
            }
        }
        if n.rule != InferenceRule::Assumption && n.label.is_some() {
            return false;
        }
        let local = match n.rule {
            InferenceRule::Assumption => self.assumption(n),
            InferenceRule::ImpliesIntro => self.implies_intro(n),
            InferenceRule::ExistsElim => self.exists_elim(n),
            InferenceRule::AndIntro => {
                n.premises.len() >= 2
                    && n.conclusion
                        == Formula::And(n.premises.iter().map(|p| p.conclusion.clone()).collect())
            }
            InferenceRule::ImpliesElim => match n.premises.as_slice() {
                [minor, major] => {
                    major.conclusion
                        == Formula::Implies(
                            Box::new(minor.conclusion.clone()),
                            Box::new(n.conclusion.clone()),
                        )
                }
                _ => false,
            },
            InferenceRule::VerificationStep => {
                is_root && n.premises.len() == 1 && n.premises[0].conclusion == n.conclusion
            }
        };
        local && n.premises.iter().all(|p| self.node(p, false))
    }

    fn assumption(&mut self, n: &ProofNode) -> bool {
        let Some(label) = n.label else { return false };
        if !n.premises.is_empty() || !self.labels_seen.insert(label) {
            return false;
        }
        if let Some(truth) = literal_truth(&n.conclusion, &self.subject, self.facts) {
            return truth;
        }
        is_space_hypothesis(&n.conclusion).is_some()
            || n.conclusion == Formula::Atom(Predicate::InActionSpace, self.subject.clone())
    }

    fn implies_intro(&self, n: &ProofNode) -> bool {
        let [premise] = n.premises.as_slice() else {
            return false;
        };
        let Formula::Implies(ante, cons) = &n.conclusion else {
            return false;
        };
        if cons.as_ref() == &premise.conclusion {
            return true;
        }
        // Introduction of the objective from the action-space hypothesis.
        let Some(var) = is_space_hypothesis(&premise.conclusion) else {
            return false;
        };
        let discharges_it = premise.rule == InferenceRule::Assumption
            && premise.label.is_some_and(|l| n.discharged.contains(&l));
        let v = Term::Var(var.to_owned());
        discharges_it
            && ante.as_ref() == &Formula::Atom(Predicate::InActionSpace, v.clone())
            && cons.as_ref() == &expected_objective(&v)
    }

    fn exists_elim(&self, n: &ProofNode) -> bool {
        if n.discharged.is_empty() {
            return false;
        }
        let [general, witness] = n.premises.as_slice() else {
            return false;
        };
        let Formula::Implies(ante, body) = &general.conclusion else {
            return false;
        };
        let Formula::Atom(Predicate::InActionSpace, Term::Var(v)) = ante.as_ref() else {
            return false;
        };
        let Formula::Atom(Predicate::InActionSpace, t @ Term::Action(_)) = &witness.conclusion
        else {
            return false;
        };
        n.conclusion == body.substitute(v, t)
    }
}

/// True iff `tree` is a well-formed derivation of its target level for its
/// subject whose literal leaves all hold under `facts`. Malformed trees are
/// rejected, never panicked on.
pub fn check_proof(tree: &ProofTree, facts: PredicateVector) -> bool {
    let subject = Term::Action(tree.subject);
    if tree.root.rule != InferenceRule::VerificationStep
        || tree.root.conclusion != expected_target(tree.target_level, &subject)
    {
        return false;
    }
    let mut checker = Checker {
        subject,
        facts,
        labels_seen: HashSet::new(),
    };
    checker.node(&tree.root, true)
}
