use std::collections::BTreeSet;
use std::fmt;

/// LTL over the core connectives; the rest are abbreviations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ltl {
    True,
    Atom(String),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    pub fn atom(a: &str) -> Ltl {
        Ltl::Atom(a.to_string())
    }

    pub fn fals() -> Ltl {
        Ltl::Not(Box::new(Ltl::True))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Ltl) -> Ltl {
        Ltl::Not(Box::new(a))
    }

    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::not(Ltl::and(Ltl::not(a), Ltl::not(b)))
    }

    pub fn implies(a: Ltl, b: Ltl) -> Ltl {
        Ltl::not(Ltl::and(a, Ltl::not(b)))
    }

    pub fn iff(a: Ltl, b: Ltl) -> Ltl {
        Ltl::and(Ltl::implies(a.clone(), b.clone()), Ltl::implies(b, a))
    }

    pub fn next(a: Ltl) -> Ltl {
        Ltl::Next(Box::new(a))
    }

    pub fn until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Ltl, b: Ltl) -> Ltl {
        Ltl::not(Ltl::until(Ltl::not(a), Ltl::not(b)))
    }

    pub fn eventually(a: Ltl) -> Ltl {
        Ltl::until(Ltl::True, a)
    }

    pub fn globally(a: Ltl) -> Ltl {
        Ltl::not(Ltl::eventually(Ltl::not(a)))
    }

    /// Negation that cancels an existing negation.
    pub fn neg(a: Ltl) -> Ltl {
        match a {
            Ltl::Not(x) => *x,
            x => Ltl::not(x),
        }
    }

    /// Disjunction of all items; `false` when empty.
    pub fn any(items: impl IntoIterator<Item = Ltl>) -> Ltl {
        items
            .into_iter()
            .reduce(Ltl::or)
            .unwrap_or_else(Ltl::fals)
    }

    /// Conjunction of all items; `true` when empty.
    pub fn all(items: impl IntoIterator<Item = Ltl>) -> Ltl {
        items.into_iter().reduce(Ltl::and).unwrap_or(Ltl::True)
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Ltl::True => {}
            Ltl::Atom(a) => {
                out.insert(a.clone());
            }
            Ltl::Not(a) | Ltl::Next(a) => a.collect_atoms(out),
            Ltl::And(a, b) | Ltl::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of nodes in the core syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Ltl::True | Ltl::Atom(_) => 1,
            Ltl::Not(a) | Ltl::Next(a) => 1 + a.size(),
            Ltl::And(a, b) | Ltl::Until(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Applies `f` to every atom.
    pub fn map_atoms(&self, f: &mut impl FnMut(&str) -> Ltl) -> Ltl {
        match self {
            Ltl::True => Ltl::True,
            Ltl::Atom(a) => f(a),
            Ltl::Not(a) => Ltl::not(a.map_atoms(f)),
            Ltl::Next(a) => Ltl::next(a.map_atoms(f)),
            Ltl::And(a, b) => Ltl::and(a.map_atoms(f), b.map_atoms(f)),
            Ltl::Until(a, b) => Ltl::until(a.map_atoms(f), b.map_atoms(f)),
        }
    }
}

fn negated(f: &Ltl) -> Option<&Ltl> {
    match f {
        Ltl::Not(x) => Some(x),
        _ => None,
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ltl::True => write!(f, "true"),
            Ltl::Atom(a) => write!(f, "{a}"),
            Ltl::Not(inner) => match inner.as_ref() {
                Ltl::True => write!(f, "false"),
                Ltl::And(a, b) => match (negated(a), negated(b)) {
                    (Some(a), Some(b)) => write!(f, "({a} | {b})"),
                    (_, Some(b)) => write!(f, "({a} -> {b})"),
                    _ => write!(f, "!{inner}"),
                },
                Ltl::Until(a, b) => match (a.as_ref(), negated(b)) {
                    (Ltl::True, Some(b)) => write!(f, "(G {b})"),
                    (Ltl::Not(a), Some(b)) => write!(f, "({a} R {b})"),
                    _ => write!(f, "!{inner}"),
                },
                _ => write!(f, "!{inner}"),
            },
            Ltl::And(a, b) => write!(f, "({a} & {b})"),
            Ltl::Next(a) => write!(f, "(X {a})"),
            Ltl::Until(a, b) => match a.as_ref() {
                Ltl::True => write!(f, "(F {b})"),
                _ => write!(f, "({a} U {b})"),
            },
        }
    }
}
