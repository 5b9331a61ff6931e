use std::collections::BTreeSet;
use std::fmt;

/// CTL* state formulas; `A π` is `¬E¬π`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateF {
    True,
    Atom(String),
    Not(Box<StateF>),
    And(Box<StateF>, Box<StateF>),
    Exists(Box<PathF>),
}

/// CTL* path formulas. A state formula used as a path formula is wrapped in `State`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathF {
    State(Box<StateF>),
    Not(Box<PathF>),
    And(Box<PathF>, Box<PathF>),
    Next(Box<PathF>),
    Until(Box<PathF>, Box<PathF>),
}

impl StateF {
    pub fn atom(a: &str) -> StateF {
        StateF::Atom(a.to_string())
    }

    pub fn fals() -> StateF {
        StateF::not(StateF::True)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: StateF) -> StateF {
        StateF::Not(Box::new(a))
    }

    pub fn and(a: StateF, b: StateF) -> StateF {
        StateF::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: StateF, b: StateF) -> StateF {
        StateF::not(StateF::and(StateF::not(a), StateF::not(b)))
    }

    pub fn implies(a: StateF, b: StateF) -> StateF {
        StateF::not(StateF::and(a, StateF::not(b)))
    }

    pub fn iff(a: StateF, b: StateF) -> StateF {
        StateF::and(
            StateF::implies(a.clone(), b.clone()),
            StateF::implies(b, a),
        )
    }

    pub fn exists(p: PathF) -> StateF {
        StateF::Exists(Box::new(p))
    }

    pub fn forall(p: PathF) -> StateF {
        StateF::not(StateF::exists(PathF::not(p)))
    }

    /// `E F a`
    pub fn ef(a: StateF) -> StateF {
        StateF::exists(PathF::eventually(PathF::state(a)))
    }

    /// `A G a`
    pub fn ag(a: StateF) -> StateF {
        StateF::forall(PathF::globally(PathF::state(a)))
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            StateF::True => {}
            StateF::Atom(a) => {
                out.insert(a.clone());
            }
            StateF::Not(a) => a.collect_atoms(out),
            StateF::And(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            StateF::Exists(p) => p.collect_atoms(out),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            StateF::True | StateF::Atom(_) => 1,
            StateF::Not(a) => 1 + a.size(),
            StateF::And(a, b) => 1 + a.size() + b.size(),
            StateF::Exists(p) => 1 + p.size(),
        }
    }
}

impl PathF {
    pub fn state(s: StateF) -> PathF {
        PathF::State(Box::new(s))
    }

    /// Negation; stays a state formula when applied to one.
    #[allow(clippy::should_implement_trait)]
    pub fn not(p: PathF) -> PathF {
        match p {
            PathF::State(s) => PathF::state(StateF::Not(s)),
            p => PathF::Not(Box::new(p)),
        }
    }

    pub fn and(a: PathF, b: PathF) -> PathF {
        match (a, b) {
            (PathF::State(a), PathF::State(b)) => PathF::state(StateF::And(a, b)),
            (a, b) => PathF::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: PathF, b: PathF) -> PathF {
        PathF::not(PathF::and(PathF::not(a), PathF::not(b)))
    }

    pub fn implies(a: PathF, b: PathF) -> PathF {
        PathF::not(PathF::and(a, PathF::not(b)))
    }

    pub fn iff(a: PathF, b: PathF) -> PathF {
        PathF::and(PathF::implies(a.clone(), b.clone()), PathF::implies(b, a))
    }

    pub fn next(a: PathF) -> PathF {
        PathF::Next(Box::new(a))
    }

    pub fn until(a: PathF, b: PathF) -> PathF {
        PathF::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: PathF, b: PathF) -> PathF {
        PathF::not(PathF::until(PathF::not(a), PathF::not(b)))
    }

    pub fn eventually(a: PathF) -> PathF {
        PathF::until(PathF::state(StateF::True), a)
    }

    pub fn globally(a: PathF) -> PathF {
        PathF::not(PathF::eventually(PathF::not(a)))
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            PathF::State(s) => s.collect_atoms(out),
            PathF::Not(a) | PathF::Next(a) => a.collect_atoms(out),
            PathF::And(a, b) | PathF::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PathF::State(s) => s.size(),
            PathF::Not(a) | PathF::Next(a) => 1 + a.size(),
            PathF::And(a, b) | PathF::Until(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Inverse of [`PathF::not`], if `self` is a negation.
    fn negated(&self) -> Option<PathF> {
        match self {
            PathF::Not(p) => Some((**p).clone()),
            PathF::State(s) => match s.as_ref() {
                StateF::Not(inner) => Some(PathF::State(inner.clone())),
                _ => None,
            },
            _ => None,
        }
    }
}

fn state_negated(s: &StateF) -> Option<&StateF> {
    match s {
        StateF::Not(x) => Some(x),
        _ => None,
    }
}

impl fmt::Display for StateF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateF::True => write!(f, "true"),
            StateF::Atom(a) => write!(f, "{a}"),
            StateF::Not(inner) => match inner.as_ref() {
                StateF::True => write!(f, "false"),
                StateF::Exists(p) => match p.negated() {
                    Some(p) => write!(f, "(A {p})"),
                    None => write!(f, "!{inner}"),
                },
                StateF::And(a, b) => match (state_negated(a), state_negated(b)) {
                    (Some(a), Some(b)) => write!(f, "({a} | {b})"),
                    (_, Some(b)) => write!(f, "({a} -> {b})"),
                    _ => write!(f, "!{inner}"),
                },
                _ => write!(f, "!{inner}"),
            },
            StateF::And(a, b) => write!(f, "({a} & {b})"),
            StateF::Exists(p) => write!(f, "(E {p})"),
        }
    }
}

impl fmt::Display for PathF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathF::State(s) => write!(f, "{s}"),
            PathF::Not(inner) => match inner.as_ref() {
                PathF::And(a, b) => match (a.negated(), b.negated()) {
                    (Some(a), Some(b)) => write!(f, "({a} | {b})"),
                    (_, Some(b)) => write!(f, "({a} -> {b})"),
                    _ => write!(f, "!{inner}"),
                },
                PathF::Until(a, b) => match (a.as_ref(), a.negated(), b.negated()) {
                    (PathF::State(t), _, Some(b)) if **t == StateF::True => {
                        write!(f, "(G {b})")
                    }
                    (_, Some(a), Some(b)) => write!(f, "({a} R {b})"),
                    _ => write!(f, "!{inner}"),
                },
                _ => write!(f, "!{inner}"),
            },
            PathF::And(a, b) => write!(f, "({a} & {b})"),
            PathF::Next(a) => write!(f, "(X {a})"),
            PathF::Until(a, b) => match a.as_ref() {
                PathF::State(t) if **t == StateF::True => write!(f, "(F {b})"),
                _ => write!(f, "({a} U {b})"),
            },
        }
    }
}
