//! Positive Boolean formulas over atoms.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pbf<A> {
    True,
    False,
    Atom(A),
    And(Vec<Pbf<A>>),
    Or(Vec<Pbf<A>>),
}

impl<A: Clone + Ord> Pbf<A> {
    pub fn and_all(items: impl IntoIterator<Item = Pbf<A>>) -> Pbf<A> {
        let mut out = Vec::new();
        for f in items {
            match f {
                Pbf::True => {}
                Pbf::False => return Pbf::False,
                Pbf::And(v) => out.extend(v),
                f => out.push(f),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => Pbf::True,
            1 => out.pop().unwrap(),
            _ => Pbf::And(out),
        }
    }

    pub fn or_all(items: impl IntoIterator<Item = Pbf<A>>) -> Pbf<A> {
        let mut out = Vec::new();
        for f in items {
            match f {
                Pbf::False => {}
                Pbf::True => return Pbf::True,
                Pbf::Or(v) => out.extend(v),
                f => out.push(f),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => Pbf::False,
            1 => out.pop().unwrap(),
            _ => Pbf::Or(out),
        }
    }

    pub fn and(a: Pbf<A>, b: Pbf<A>) -> Pbf<A> {
        Pbf::and_all([a, b])
    }

    pub fn or(a: Pbf<A>, b: Pbf<A>) -> Pbf<A> {
        Pbf::or_all([a, b])
    }

    pub fn constant(b: bool) -> Pbf<A> {
        if b {
            Pbf::True
        } else {
            Pbf::False
        }
    }

    /// Replaces atoms, simplifying on the way.
    pub fn map<B: Clone + Ord>(&self, f: &mut impl FnMut(&A) -> Pbf<B>) -> Pbf<B> {
        match self {
            Pbf::True => Pbf::True,
            Pbf::False => Pbf::False,
            Pbf::Atom(a) => f(a),
            Pbf::And(v) => Pbf::and_all(v.iter().map(|x| x.map(f)).collect::<Vec<_>>()),
            Pbf::Or(v) => Pbf::or_all(v.iter().map(|x| x.map(f)).collect::<Vec<_>>()),
        }
    }

    pub fn eval(&self, f: &mut impl FnMut(&A) -> bool) -> bool {
        match self {
            Pbf::True => true,
            Pbf::False => false,
            Pbf::Atom(a) => f(a),
            Pbf::And(v) => v.iter().all(|x| x.eval(f)),
            Pbf::Or(v) => v.iter().any(|x| x.eval(f)),
        }
    }

    pub fn atoms(&self) -> BTreeSet<A> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<A>) {
        match self {
            Pbf::Atom(a) => {
                out.insert(a.clone());
            }
            Pbf::And(v) | Pbf::Or(v) => v.iter().for_each(|x| x.collect(out)),
            _ => {}
        }
    }

    /// Minimal satisfying sets, sorted. `False` has none; `True` has the empty set.
    pub fn minimal_models(&self) -> Vec<Vec<A>> {
        let sets = self.models();
        minimize(sets)
    }

    fn models(&self) -> Vec<BTreeSet<A>> {
        match self {
            Pbf::True => vec![BTreeSet::new()],
            Pbf::False => vec![],
            Pbf::Atom(a) => vec![[a.clone()].into()],
            Pbf::Or(v) => {
                let all = v.iter().flat_map(|x| x.models()).collect();
                minimize(all)
                    .into_iter()
                    .map(|m| m.into_iter().collect())
                    .collect()
            }
            Pbf::And(v) => {
                let mut acc = vec![BTreeSet::new()];
                for x in v {
                    let ms = x.models();
                    let mut next = Vec::with_capacity(acc.len() * ms.len());
                    for a in &acc {
                        for m in &ms {
                            next.push(a.union(m).cloned().collect::<BTreeSet<A>>());
                        }
                    }
                    acc = minimize(next)
                        .into_iter()
                        .map(|m| m.into_iter().collect())
                        .collect();
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        }
    }
}

fn minimize<A: Clone + Ord>(mut sets: Vec<BTreeSet<A>>) -> Vec<Vec<A>> {
    sets.sort_by_key(|s| s.len());
    sets.dedup();
    let mut keep: Vec<BTreeSet<A>> = Vec::new();
    for s in sets {
        if !keep.iter().any(|k| k.is_subset(&s)) {
            keep.push(s);
        }
    }
    let mut out: Vec<Vec<A>> = keep.into_iter().map(|s| s.into_iter().collect()).collect();
    out.sort();
    out
}

impl<A: fmt::Display> fmt::Display for Pbf<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, v: &[Pbf<A>], op: &str| {
            write!(f, "(")?;
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        };
        match self {
            Pbf::True => write!(f, "true"),
            Pbf::False => write!(f, "false"),
            Pbf::Atom(a) => write!(f, "{a}"),
            Pbf::And(v) => join(f, v, "&"),
            Pbf::Or(v) => join(f, v, "|"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplifies() {
        let f: Pbf<u8> = Pbf::and(Pbf::True, Pbf::or(Pbf::Atom(1), Pbf::False));
        assert_eq!(f, Pbf::Atom(1));
        assert_eq!(Pbf::<u8>::and_all([]), Pbf::True);
        assert_eq!(Pbf::<u8>::or_all([]), Pbf::False);
    }

    #[test]
    fn minimal_models_absorb() {
        // (1 | 2) & (1 | 3)  ->  {1}, {2,3}
        let f = Pbf::and(
            Pbf::or(Pbf::Atom(1), Pbf::Atom(2)),
            Pbf::or(Pbf::Atom(1), Pbf::Atom(3)),
        );
        assert_eq!(f.minimal_models(), vec![vec![1], vec![2, 3]]);
        assert!(Pbf::<u8>::False.minimal_models().is_empty());
        assert_eq!(Pbf::<u8>::True.minimal_models(), vec![Vec::<u8>::new()]);
    }
}
