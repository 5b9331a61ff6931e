use std::collections::BTreeSet;
use std::fmt;

use super::{Ltl, StateF};

/// Run-level formula: LTL combined with flow subformulas `A Φ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FlowCtlStar {
    Ltl(Ltl),
    And(Box<FlowCtlStar>, Box<FlowCtlStar>),
    Or(Box<FlowCtlStar>, Box<FlowCtlStar>),
    Implies(Ltl, Box<FlowCtlStar>),
    Flow(StateF),
}

impl FlowCtlStar {
    pub fn flow(phi: StateF) -> Self {
        FlowCtlStar::Flow(phi)
    }

    pub fn and(a: FlowCtlStar, b: FlowCtlStar) -> Self {
        match (a, b) {
            (FlowCtlStar::Ltl(a), FlowCtlStar::Ltl(b)) => FlowCtlStar::Ltl(Ltl::and(a, b)),
            (a, b) => FlowCtlStar::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: FlowCtlStar, b: FlowCtlStar) -> Self {
        match (a, b) {
            (FlowCtlStar::Ltl(a), FlowCtlStar::Ltl(b)) => FlowCtlStar::Ltl(Ltl::or(a, b)),
            (a, b) => FlowCtlStar::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn implies(a: Ltl, b: FlowCtlStar) -> Self {
        match b {
            FlowCtlStar::Ltl(b) => FlowCtlStar::Ltl(Ltl::implies(a, b)),
            b => FlowCtlStar::Implies(a, Box::new(b)),
        }
    }

    pub fn is_ltl(&self) -> bool {
        matches!(self, FlowCtlStar::Ltl(_))
    }

    /// All atoms, at run level and inside flow subformulas.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            FlowCtlStar::Ltl(l) => out.extend(l.atoms()),
            FlowCtlStar::Implies(l, _) => out.extend(l.atoms()),
            FlowCtlStar::Flow(s) => out.extend(s.atoms()),
            _ => {}
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a FlowCtlStar)) {
        f(self);
        match self {
            FlowCtlStar::And(a, b) | FlowCtlStar::Or(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            FlowCtlStar::Implies(_, b) => b.visit(f),
            _ => {}
        }
    }
}

/// A flow subformula and the atoms it mentions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSub {
    pub formula: StateF,
    pub atoms: BTreeSet<String>,
}

/// Flow subformulas in depth-first, left-to-right order; repeats are kept.
pub fn collect_flow_subformulas(psi: &FlowCtlStar) -> Vec<FlowSub> {
    let mut out = Vec::new();
    psi.visit(&mut |f| {
        if let FlowCtlStar::Flow(s) = f {
            out.push(FlowSub {
                formula: s.clone(),
                atoms: s.atoms(),
            });
        }
    });
    out
}

impl fmt::Display for FlowCtlStar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowCtlStar::Ltl(l) => write!(f, "{l}"),
            FlowCtlStar::And(a, b) => write!(f, "({a} & {b})"),
            FlowCtlStar::Or(a, b) => write!(f, "({a} | {b})"),
            FlowCtlStar::Implies(a, b) => write!(f, "({a} -> {b})"),
            FlowCtlStar::Flow(s) => write!(f, "(A {s})"),
        }
    }
}
