//! Natural-deduction verification of the selected action.
//!
//! The objective `Φ(a)` is the disjunction of the four compliance levels.
//! For a chosen action `a0` and a level `Dk`, [`prove_level`] builds a
//! Gentzen-style tree:
//!
//! ```text
//!  [1] ∃a. a ∈ A
//!  ───────────────── (→I)[1]
//!  a ∈ A → Φ(a)      [2] a0 ∈ A          [3..] literals of Dk over a0
//!  ──────────────────────────── (∃E)[1,2]  ──────────────────────── (∧I)
//!            Φ(a0)                                   Dk
//!                                         ──────────────────────── (→I)
//!                                                 Φ(a0) → Dk
//!  ───────────────────────────────────────────────────────────────── (→E)
//!                                Dk
//!  ───────────────────────────────────────────────────────────────── verification
//!                                Dk
//! ```
//!
//! [`check_proof`] re-derives every node from its premises without sharing
//! construction code with the prover, and [`degrade_and_select`] walks the
//! levels D1 to D4 picking the best provable candidate.

mod check;
mod formula;
mod prove;
mod select;

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{Level, PredicateVector};
use crate::planner::CandidateAction;

pub use check::check_proof;
pub use formula::{build_objective, Formula, Predicate, Term};
pub use prove::{build_level_tree, level_conjunction, level_literals, prove_level, Literal};
pub use select::{degrade_and_select, ScoredCandidate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeductionError {
    #[error("no candidate actions to select from")]
    NoCandidates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InferenceRule {
    /// Leaf: hypothesis or observed fact, optionally labeled.
    Assumption,
    ImpliesIntro,
    ImpliesElim,
    AndIntro,
    ExistsElim,
    VerificationStep,
}

impl InferenceRule {
    pub const ALL: [InferenceRule; 6] = [
        InferenceRule::Assumption,
        InferenceRule::ImpliesIntro,
        InferenceRule::ImpliesElim,
        InferenceRule::AndIntro,
        InferenceRule::ExistsElim,
        InferenceRule::VerificationStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InferenceRule::Assumption => "assume",
            InferenceRule::ImpliesIntro => "→I",
            InferenceRule::ImpliesElim => "→E",
            InferenceRule::AndIntro => "∧I",
            InferenceRule::ExistsElim => "∃E",
            InferenceRule::VerificationStep => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofNode {
    pub conclusion: Formula,
    pub rule: InferenceRule,
    pub premises: Vec<ProofNode>,
    /// Assumption labels discharged at this node.
    pub discharged: Vec<u32>,
    /// Label of an assumption leaf.
    pub label: Option<u32>,
}

impl ProofNode {
    pub fn assume(label: u32, conclusion: Formula) -> Self {
        Self {
            conclusion,
            rule: InferenceRule::Assumption,
            premises: vec![],
            discharged: vec![],
            label: Some(label),
        }
    }

    pub fn infer(rule: InferenceRule, conclusion: Formula, premises: Vec<ProofNode>) -> Self {
        Self {
            conclusion,
            rule,
            premises,
            discharged: vec![],
            label: None,
        }
    }

    pub fn discharging(mut self, labels: &[u32]) -> Self {
        self.discharged = labels.to_vec();
        self
    }

    /// Number of nodes in this subtree.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofNode::size).sum::<usize>()
    }

    /// Pre-order traversal.
    pub fn nodes(&self) -> Vec<&ProofNode> {
        let mut out = vec![self];
        for p in &self.premises {
            out.extend(p.nodes());
        }
        out
    }

    /// Mutable reference to the `n`th node in pre-order.
    pub fn node_mut(&mut self, n: usize) -> Option<&mut ProofNode> {
        fn walk<'a>(node: &'a mut ProofNode, n: &mut usize) -> Option<&'a mut ProofNode> {
            if *n == 0 {
                return Some(node);
            }
            *n -= 1;
            for p in node.premises.iter_mut() {
                if let Some(found) = walk(p, n) {
                    return Some(found);
                }
            }
            None
        }
        let mut n = n;
        walk(self, &mut n)
    }

    fn write_text(&self, depth: usize, out: &mut String) {
        let _ = write!(
            out,
            "{:indent$}{}",
            "",
            self.rule.name(),
            indent = depth * 2
        );
        if let Some(l) = self.label {
            let _ = write!(out, "[{l}]");
        }
        let labels: Vec<String> = self.discharged.iter().map(u32::to_string).collect();
        let _ = writeln!(out, " | {} | [{}]", self.conclusion, labels.join(","));
        for p in &self.premises {
            p.write_text(depth + 1, out);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofTree {
    pub root: ProofNode,
    pub target_level: Level,
    /// Candidate index of the action the proof is about (`a0`).
    pub subject: usize,
}

impl ProofTree {
    /// One node per line, two spaces of indentation per depth level:
    /// `rule[label] | conclusion | [discharged]`.
    pub fn to_text(&self) -> String {
        let mut out = format!("target {} subject a{}\n", self.target_level, self.subject);
        self.root.write_text(0, &mut out);
        out
    }
}

impl fmt::Display for ProofTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The verified (or forced) result of one selection round.
#[derive(Debug, Clone, PartialEq)]
pub struct DeductionOutcome {
    pub action: CandidateAction,
    pub level: Level,
    pub predicates: PredicateVector,
    pub tree: ProofTree,
    pub verified: bool,
    /// No candidate reached D4; the least-violating action is emitted anyway.
    pub forced: bool,
    /// Set by the reasoner when the backend's claim was replaced.
    pub repaired: bool,
}
