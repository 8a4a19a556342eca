use std::fmt;

/// Atomic predicates over an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Predicate {
    Es,
    Ed,
    Ec,
    Et,
    InActionSpace,
}

impl Predicate {
    pub fn name(self) -> &'static str {
        match self {
            Predicate::Es => "Es",
            Predicate::Ed => "Ed",
            Predicate::Ec => "Ec",
            Predicate::Et => "Et",
            Predicate::InActionSpace => "A",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    /// A concrete candidate, by index.
    Action(usize),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Action(i) => write!(f, "a{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Predicate, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(p: Predicate, t: Term) -> Formula {
        Formula::Atom(p, t)
    }

    pub fn negate(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Exists(var.to_owned(), Box::new(body))
    }

    /// Replaces free occurrences of `var` by `term`.
    pub fn substitute(&self, var: &str, term: &Term) -> Formula {
        match self {
            Formula::Atom(p, Term::Var(v)) if v == var => Formula::Atom(*p, term.clone()),
            Formula::Atom(..) => self.clone(),
            Formula::Not(f) => Formula::negate(f.substitute(var, term)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(var, term)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(var, term)).collect()),
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute(var, term), b.substitute(var, term))
            }
            Formula::Exists(v, _) if v == var => self.clone(),
            Formula::Exists(v, body) => Formula::exists(v, body.substitute(var, term)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(..) => 1,
            Formula::Not(f) | Formula::Exists(_, f) => 1 + f.depth(),
            Formula::And(fs) | Formula::Or(fs) => {
                1 + fs.iter().map(Formula::depth).max().unwrap_or(0)
            }
            Formula::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn is_compound(&self) -> bool {
        !matches!(self, Formula::Atom(..) | Formula::Not(_))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |g: &Formula, f: &mut fmt::Formatter<'_>| {
            if g.is_compound() {
                write!(f, "({g})")
            } else {
                write!(f, "{g}")
            }
        };
        match self {
            Formula::Atom(Predicate::InActionSpace, t) => write!(f, "{t} ∈ A"),
            Formula::Atom(p, t) => write!(f, "{}({t})", p.name()),
            Formula::Not(g) => {
                f.write_str("¬")?;
                wrap(g, f)
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let sep = if matches!(self, Formula::And(_)) {
                    " ∧ "
                } else {
                    " ∨ "
                };
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    wrap(g, f)?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => {
                wrap(a, f)?;
                f.write_str(" → ")?;
                wrap(b, f)
            }
            Formula::Exists(v, body) => {
                write!(f, "∃{v}. ")?;
                wrap(body, f)
            }
        }
    }
}

/// `Φ(t)`: the four compliance levels as a disjunction of conjunctions.
pub fn build_objective(t: &Term) -> Formula {
    let es = || Formula::atom(Predicate::Es, t.clone());
    let ed = || Formula::atom(Predicate::Ed, t.clone());
    let not_ec = || Formula::negate(Formula::atom(Predicate::Ec, t.clone()));
    let et = || Formula::atom(Predicate::Et, t.clone());
    Formula::Or(vec![
        Formula::And(vec![es(), ed(), not_ec(), et()]),
        Formula::And(vec![es(), not_ec(), et()]),
        Formula::And(vec![ed(), not_ec(), et()]),
        Formula::And(vec![not_ec(), et()]),
    ])
}
