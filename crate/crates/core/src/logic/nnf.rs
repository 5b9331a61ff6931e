//! Negation normal forms used by the automata constructions.

use std::fmt;

use super::{Ltl, PathF, StateF};

/// LTL in negation normal form over atoms of type `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nnf<A> {
    True,
    False,
    Lit(A, bool),
    And(Box<Nnf<A>>, Box<Nnf<A>>),
    Or(Box<Nnf<A>>, Box<Nnf<A>>),
    Next(Box<Nnf<A>>),
    Until(Box<Nnf<A>>, Box<Nnf<A>>),
    Release(Box<Nnf<A>>, Box<Nnf<A>>),
}

impl<A: Clone> Nnf<A> {
    pub fn and(a: Nnf<A>, b: Nnf<A>) -> Nnf<A> {
        match (a, b) {
            (Nnf::False, _) | (_, Nnf::False) => Nnf::False,
            (Nnf::True, x) | (x, Nnf::True) => x,
            (a, b) => Nnf::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Nnf<A>, b: Nnf<A>) -> Nnf<A> {
        match (a, b) {
            (Nnf::True, _) | (_, Nnf::True) => Nnf::True,
            (Nnf::False, x) | (x, Nnf::False) => x,
            (a, b) => Nnf::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn next(a: Nnf<A>) -> Nnf<A> {
        match a {
            Nnf::True => Nnf::True,
            Nnf::False => Nnf::False,
            a => Nnf::Next(Box::new(a)),
        }
    }

    pub fn until(a: Nnf<A>, b: Nnf<A>) -> Nnf<A> {
        match (a, b) {
            (_, Nnf::True) => Nnf::True,
            (_, Nnf::False) => Nnf::False,
            (Nnf::False, b) => b,
            (a, b) => Nnf::Until(Box::new(a), Box::new(b)),
        }
    }

    pub fn release(a: Nnf<A>, b: Nnf<A>) -> Nnf<A> {
        match (a, b) {
            (_, Nnf::True) => Nnf::True,
            (_, Nnf::False) => Nnf::False,
            (Nnf::True, b) => b,
            (a, b) => Nnf::Release(Box::new(a), Box::new(b)),
        }
    }

    pub fn map_atoms<B: Clone>(&self, f: &mut impl FnMut(&A) -> B) -> Nnf<B> {
        match self {
            Nnf::True => Nnf::True,
            Nnf::False => Nnf::False,
            Nnf::Lit(a, pos) => Nnf::Lit(f(a), *pos),
            Nnf::And(a, b) => Nnf::And(Box::new(a.map_atoms(f)), Box::new(b.map_atoms(f))),
            Nnf::Or(a, b) => Nnf::Or(Box::new(a.map_atoms(f)), Box::new(b.map_atoms(f))),
            Nnf::Next(a) => Nnf::Next(Box::new(a.map_atoms(f))),
            Nnf::Until(a, b) => Nnf::Until(Box::new(a.map_atoms(f)), Box::new(b.map_atoms(f))),
            Nnf::Release(a, b) => {
                Nnf::Release(Box::new(a.map_atoms(f)), Box::new(b.map_atoms(f)))
            }
        }
    }
}

impl Nnf<String> {
    /// NNF of `f` (of `¬f` when `negate` holds).
    pub fn from_ltl(f: &Ltl, negate: bool) -> Self {
        match f {
            Ltl::True => {
                if negate {
                    Nnf::False
                } else {
                    Nnf::True
                }
            }
            Ltl::Atom(a) => Nnf::Lit(a.clone(), !negate),
            Ltl::Not(a) => Nnf::from_ltl(a, !negate),
            Ltl::And(a, b) => {
                let (a, b) = (Nnf::from_ltl(a, negate), Nnf::from_ltl(b, negate));
                if negate {
                    Nnf::or(a, b)
                } else {
                    Nnf::and(a, b)
                }
            }
            Ltl::Next(a) => Nnf::next(Nnf::from_ltl(a, negate)),
            Ltl::Until(a, b) => {
                let (a, b) = (Nnf::from_ltl(a, negate), Nnf::from_ltl(b, negate));
                if negate {
                    Nnf::release(a, b)
                } else {
                    Nnf::until(a, b)
                }
            }
        }
    }
}

impl<A: fmt::Display> fmt::Display for Nnf<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nnf::True => write!(f, "true"),
            Nnf::False => write!(f, "false"),
            Nnf::Lit(a, true) => write!(f, "{a}"),
            Nnf::Lit(a, false) => write!(f, "!{a}"),
            Nnf::And(a, b) => write!(f, "({a} & {b})"),
            Nnf::Or(a, b) => write!(f, "({a} | {b})"),
            Nnf::Next(a) => write!(f, "(X {a})"),
            Nnf::Until(a, b) => write!(f, "({a} U {b})"),
            Nnf::Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}

/// CTL* state formula in negation normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SNnf {
    True,
    False,
    Lit(String, bool),
    And(Box<SNnf>, Box<SNnf>),
    Or(Box<SNnf>, Box<SNnf>),
    E(Box<PNnf>),
    A(Box<PNnf>),
}

/// CTL* path formula in negation normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PNnf {
    State(Box<SNnf>),
    And(Box<PNnf>, Box<PNnf>),
    Or(Box<PNnf>, Box<PNnf>),
    Next(Box<PNnf>),
    Until(Box<PNnf>, Box<PNnf>),
    Release(Box<PNnf>, Box<PNnf>),
}

impl SNnf {
    pub fn from_state(f: &StateF, negate: bool) -> SNnf {
        match f {
            StateF::True => {
                if negate {
                    SNnf::False
                } else {
                    SNnf::True
                }
            }
            StateF::Atom(a) => SNnf::Lit(a.clone(), !negate),
            StateF::Not(a) => SNnf::from_state(a, !negate),
            StateF::And(a, b) => {
                let (a, b) = (SNnf::from_state(a, negate), SNnf::from_state(b, negate));
                if negate {
                    SNnf::Or(Box::new(a), Box::new(b))
                } else {
                    SNnf::And(Box::new(a), Box::new(b))
                }
            }
            StateF::Exists(p) => {
                let p = Box::new(PNnf::from_path(p, negate));
                if negate {
                    SNnf::A(p)
                } else {
                    SNnf::E(p)
                }
            }
        }
    }

    /// Whether every path quantifier is directly applied to `X`, `U` or `R`
    /// over state formulas.
    pub fn is_ctl(&self) -> bool {
        match self {
            SNnf::True | SNnf::False | SNnf::Lit(..) => true,
            SNnf::And(a, b) | SNnf::Or(a, b) => a.is_ctl() && b.is_ctl(),
            SNnf::E(p) | SNnf::A(p) => match p.as_ref() {
                PNnf::State(s) => s.is_ctl(),
                PNnf::Next(a) => a.state_ctl(),
                PNnf::Until(a, b) | PNnf::Release(a, b) => a.state_ctl() && b.state_ctl(),
                PNnf::And(..) | PNnf::Or(..) => false,
            },
        }
    }
}

impl PNnf {
    pub fn from_path(f: &PathF, negate: bool) -> PNnf {
        match f {
            PathF::State(s) => PNnf::State(Box::new(SNnf::from_state(s, negate))),
            PathF::Not(a) => PNnf::from_path(a, !negate),
            PathF::And(a, b) => {
                let (a, b) = (
                    Box::new(PNnf::from_path(a, negate)),
                    Box::new(PNnf::from_path(b, negate)),
                );
                if negate {
                    PNnf::Or(a, b)
                } else {
                    PNnf::And(a, b)
                }
            }
            PathF::Next(a) => PNnf::Next(Box::new(PNnf::from_path(a, negate))),
            PathF::Until(a, b) => {
                let (a, b) = (
                    Box::new(PNnf::from_path(a, negate)),
                    Box::new(PNnf::from_path(b, negate)),
                );
                if negate {
                    PNnf::Release(a, b)
                } else {
                    PNnf::Until(a, b)
                }
            }
        }
    }

    fn state_ctl(&self) -> bool {
        match self {
            PNnf::State(s) => s.is_ctl(),
            _ => false,
        }
    }
}

impl SNnf {
    /// NNF of the negation.
    pub fn negate(&self) -> SNnf {
        match self {
            SNnf::True => SNnf::False,
            SNnf::False => SNnf::True,
            SNnf::Lit(a, p) => SNnf::Lit(a.clone(), !p),
            SNnf::And(a, b) => SNnf::Or(Box::new(a.negate()), Box::new(b.negate())),
            SNnf::Or(a, b) => SNnf::And(Box::new(a.negate()), Box::new(b.negate())),
            SNnf::E(p) => SNnf::A(Box::new(p.negate())),
            SNnf::A(p) => SNnf::E(Box::new(p.negate())),
        }
    }
}

impl PNnf {
    pub fn negate(&self) -> PNnf {
        let b = |x: &PNnf| Box::new(x.negate());
        match self {
            PNnf::State(s) => PNnf::State(Box::new(s.negate())),
            PNnf::And(x, y) => PNnf::Or(b(x), b(y)),
            PNnf::Or(x, y) => PNnf::And(b(x), b(y)),
            PNnf::Next(x) => PNnf::Next(b(x)),
            PNnf::Until(x, y) => PNnf::Release(b(x), b(y)),
            PNnf::Release(x, y) => PNnf::Until(b(x), b(y)),
        }
    }
}

impl fmt::Display for SNnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SNnf::True => write!(f, "true"),
            SNnf::False => write!(f, "false"),
            SNnf::Lit(a, true) => write!(f, "{a}"),
            SNnf::Lit(a, false) => write!(f, "!{a}"),
            SNnf::And(a, b) => write!(f, "({a} & {b})"),
            SNnf::Or(a, b) => write!(f, "({a} | {b})"),
            SNnf::E(p) => write!(f, "(E {p})"),
            SNnf::A(p) => write!(f, "(A {p})"),
        }
    }
}

impl fmt::Display for PNnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PNnf::State(s) => write!(f, "{s}"),
            PNnf::And(a, b) => write!(f, "({a} & {b})"),
            PNnf::Or(a, b) => write!(f, "({a} | {b})"),
            PNnf::Next(a) => write!(f, "(X {a})"),
            PNnf::Until(a, b) => write!(f, "({a} U {b})"),
            PNnf::Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_ctlstar, parse_ltl};

    #[test]
    fn ltl_negation_pushes_inward() {
        let f = parse_ltl("G (a -> F b)").unwrap();
        let n = Nnf::from_ltl(&f, true);
        assert_eq!(n.to_string(), "(true U (a & (false R !b)))");
    }

    #[test]
    fn ctl_detection() {
        let ctl = parse_ctlstar("AG (a -> EF b) & E (a U !b)").unwrap();
        assert!(SNnf::from_state(&ctl, false).is_ctl());
        assert!(SNnf::from_state(&ctl, true).is_ctl());
        let star = parse_ctlstar("A (F a & G b)").unwrap();
        assert!(!SNnf::from_state(&star, false).is_ctl());
        let nested = parse_ctlstar("E F G a").unwrap();
        assert!(!SNnf::from_state(&nested, false).is_ctl());
    }
}
