use std::fmt;

use crate::constraints::{Level, PredicateVector};
use crate::planner::CandidateAction;

use super::formula::{build_objective, Formula, Predicate, Term};
use super::{InferenceRule, ProofNode, ProofTree};

/// The four literals that appear in level conjunctions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Literal {
    Es,
    Ed,
    NotEc,
    Et,
}

impl Literal {
    pub fn holds(self, facts: PredicateVector) -> bool {
        match self {
            Literal::Es => facts.es,
            Literal::Ed => facts.ed,
            Literal::NotEc => facts.not_ec,
            Literal::Et => facts.et,
        }
    }

    pub fn formula(self, t: &Term) -> Formula {
        match self {
            Literal::Es => Formula::atom(Predicate::Es, t.clone()),
            Literal::Ed => Formula::atom(Predicate::Ed, t.clone()),
            Literal::NotEc => Formula::negate(Formula::atom(Predicate::Ec, t.clone())),
            Literal::Et => Formula::atom(Predicate::Et, t.clone()),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Literal::Es => "Es",
            Literal::Ed => "Ed",
            Literal::NotEc => "¬Ec",
            Literal::Et => "Et",
        })
    }
}

pub fn level_literals(level: Level) -> &'static [Literal] {
    use Literal::*;
    match level {
        Level::D1 => &[Es, Ed, NotEc, Et],
        Level::D2 => &[Es, NotEc, Et],
        Level::D3 => &[Ed, NotEc, Et],
        Level::D4 => &[NotEc, Et],
    }
}

pub fn level_conjunction(level: Level, t: &Term) -> Formula {
    Formula::And(level_literals(level).iter().map(|l| l.formula(t)).collect())
}

/// Why a level could not be proved for an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProofFailure {
    pub level: Level,
    /// First literal of the level's conjunction that the facts refute.
    pub falsified: Literal,
}

impl fmt::Display for ProofFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} not provable: {} is false",
            self.level, self.falsified
        )
    }
}

pub(crate) fn first_unsupported(level: Level, facts: PredicateVector) -> Option<Literal> {
    level_literals(level)
        .iter()
        .copied()
        .find(|l| !l.holds(facts))
}

/// Builds the level tree for `subject` without consulting any facts. Leaves
/// carry the literals of `level`; whether they are true is for
/// [`super::check_proof`] to decide.
pub fn build_level_tree(subject: usize, level: Level) -> ProofTree {
    let a = Term::Var("a".into());
    let a0 = Term::Action(subject);
    let in_space = |t: &Term| Formula::atom(Predicate::InActionSpace, t.clone());
    let phi_a0 = build_objective(&a0);

    let hyp = ProofNode::assume(1, Formula::exists("a", in_space(&a)));
    let intro = ProofNode::infer(
        InferenceRule::ImpliesIntro,
        Formula::implies(in_space(&a), build_objective(&a)),
        vec![hyp],
    )
    .discharging(&[1]);
    let witness = ProofNode::assume(2, in_space(&a0));
    let phi = ProofNode::infer(
        InferenceRule::ExistsElim,
        phi_a0.clone(),
        vec![intro, witness],
    )
    .discharging(&[1, 2]);

    let leaves = level_literals(level)
        .iter()
        .zip(3u32..)
        .map(|(lit, label)| ProofNode::assume(label, lit.formula(&a0)))
        .collect();
    let target = level_conjunction(level, &a0);
    let conj = ProofNode::infer(InferenceRule::AndIntro, target.clone(), leaves);
    let cond = ProofNode::infer(
        InferenceRule::ImpliesIntro,
        Formula::implies(phi_a0, target.clone()),
        vec![conj],
    );
    let elim = ProofNode::infer(InferenceRule::ImpliesElim, target.clone(), vec![phi, cond]);
    let root = ProofNode::infer(InferenceRule::VerificationStep, target, vec![elim]);

    ProofTree {
        root,
        target_level: level,
        subject,
    }
}

pub fn prove_level(
    action: &CandidateAction,
    level: Level,
    facts: PredicateVector,
) -> Result<ProofTree, ProofFailure> {
    if let Some(falsified) = first_unsupported(level, facts) {
        return Err(ProofFailure { level, falsified });
    }
    Ok(build_level_tree(action.index, level))
}
