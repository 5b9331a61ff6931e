//! LTL to Büchi automata through very weak alternating automata and
//! transition-based generalized Büchi automata.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Display;
use std::hash::Hash;

use fixedbitset::FixedBitSet;

use super::nba::{Guard, Nba};
use crate::logic::{Ltl, Nnf};

type Conj = BTreeSet<usize>;
type Move<A> = (Guard<A>, Conj);

struct Vwaa<A> {
    formulas: Vec<Nnf<A>>,
    index: HashMap<Nnf<A>, usize>,
    memo: HashMap<Nnf<A>, Vec<Move<A>>>,
}

fn product<A: Clone + Ord>(xs: &[Move<A>], ys: &[Move<A>]) -> Vec<Move<A>> {
    prune(product_all(xs, ys))
}

/// Product without pruning. Across a state set, a dominated move may carry
/// acceptance marks the dominating one lacks.
fn product_all<A: Clone + Ord>(xs: &[Move<A>], ys: &[Move<A>]) -> Vec<Move<A>> {
    let mut out = Vec::new();
    for (g1, e1) in xs {
        for (g2, e2) in ys {
            if let Some(g) = g1.meet(g2) {
                out.push((g, e1.union(e2).copied().collect()));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Removes moves implied by a move with a weaker guard and fewer obligations.
fn prune<A: Clone + Ord>(mut moves: Vec<Move<A>>) -> Vec<Move<A>> {
    moves.sort();
    moves.dedup();
    let mut keep: Vec<Move<A>> = Vec::new();
    'outer: for (i, m) in moves.iter().enumerate() {
        for (j, o) in moves.iter().enumerate() {
            if i != j && o.0.weaker_than(&m.0) && o.1.is_subset(&m.1) && o != m {
                continue 'outer;
            }
        }
        keep.push(m.clone());
    }
    keep
}

impl<A: Clone + Ord + Hash> Vwaa<A> {
    fn state(&mut self, f: &Nnf<A>) -> usize {
        if let Some(&i) = self.index.get(f) {
            return i;
        }
        self.formulas.push(f.clone());
        self.index.insert(f.clone(), self.formulas.len() - 1);
        self.formulas.len() - 1
    }

    fn bar(&mut self, f: &Nnf<A>) -> Vec<Conj> {
        match f {
            Nnf::True => vec![Conj::new()],
            Nnf::False => vec![],
            Nnf::And(a, b) => {
                let (xs, ys) = (self.bar(a), self.bar(b));
                let mut out: Vec<Conj> = xs
                    .iter()
                    .flat_map(|x| ys.iter().map(move |y| x.union(y).copied().collect()))
                    .collect();
                out.sort();
                out.dedup();
                out
            }
            Nnf::Or(a, b) => {
                let mut out = self.bar(a);
                out.extend(self.bar(b));
                out.sort();
                out.dedup();
                out
            }
            f => vec![[self.state(f)].into()],
        }
    }

    fn delta(&mut self, f: &Nnf<A>) -> Vec<Move<A>> {
        if let Some(d) = self.memo.get(f) {
            return d.clone();
        }
        let top = || vec![(Guard::top(), Conj::new())];
        let d = match f {
            Nnf::True => top(),
            Nnf::False => vec![],
            Nnf::Lit(a, pos) => vec![(Guard::lit(a.clone(), *pos), Conj::new())],
            Nnf::And(a, b) => {
                let (x, y) = (self.delta(a), self.delta(b));
                product(&x, &y)
            }
            Nnf::Or(a, b) => {
                let mut x = self.delta(a);
                x.extend(self.delta(b));
                prune(x)
            }
            Nnf::Next(a) => self
                .bar(a)
                .into_iter()
                .map(|e| (Guard::top(), e))
                .collect(),
            Nnf::Until(a, b) => {
                let s = self.state(f);
                let mut out = self.delta(b);
                let stay = vec![(Guard::top(), Conj::from([s]))];
                let da = self.delta(a);
                out.extend(product(&da, &stay));
                prune(out)
            }
            Nnf::Release(a, b) => {
                let s = self.state(f);
                let db = self.delta(b);
                let mut alt = self.delta(a);
                alt.push((Guard::top(), Conj::from([s])));
                product(&db, &prune(alt))
            }
        };
        self.memo.insert(f.clone(), d.clone());
        d
    }
}

/// Büchi automaton accepting exactly the words satisfying `f`.
pub fn nnf_to_nba<A: Clone + Ord + Hash + Display>(f: &Nnf<A>) -> Nba<Guard<A>> {
    let mut v = Vwaa {
        formulas: Vec::new(),
        index: HashMap::new(),
        memo: HashMap::new(),
    };
    // generalized automaton over sets of VWAA states
    let init = v.bar(f);
    let mut sets: Vec<Conj> = Vec::new();
    let mut set_ix: HashMap<Conj, usize> = HashMap::new();
    let mut trans: Vec<Vec<Move<A>>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |c: &Conj, sets: &mut Vec<Conj>, queue: &mut VecDeque<usize>| {
        if let Some(&i) = set_ix.get(c) {
            return i;
        }
        sets.push(c.clone());
        set_ix.insert(c.clone(), sets.len() - 1);
        queue.push_back(sets.len() - 1);
        sets.len() - 1
    };
    let init_ids: Vec<usize> = init
        .iter()
        .map(|c| intern(c, &mut sets, &mut queue))
        .collect();
    while let Some(s) = queue.pop_front() {
        let mut moves = vec![(Guard::top(), Conj::new())];
        for q in sets[s].clone() {
            let fq = v.formulas[q].clone();
            let d = v.delta(&fq);
            moves = product_all(&moves, &d);
        }
        for (_, c) in &moves {
            intern(c, &mut sets, &mut queue);
        }
        if trans.len() <= s {
            trans.resize(s + 1, Vec::new());
        }
        trans[s] = moves;
    }
    trans.resize(sets.len(), Vec::new());

    let untils: Vec<usize> = (0..v.formulas.len())
        .filter(|&i| matches!(v.formulas[i], Nnf::Until(..)))
        .collect();
    let k = untils.len();
    let until_moves: Vec<Vec<Move<A>>> = untils
        .iter()
        .map(|&u| {
            let fu = v.formulas[u].clone();
            v.delta(&fu)
        })
        .collect();
    let acc_of = |g: &Guard<A>, target: &Conj| -> FixedBitSet {
        let mut acc = FixedBitSet::with_capacity(k);
        for (j, &u) in untils.iter().enumerate() {
            let ok = !target.contains(&u)
                || until_moves[j]
                    .iter()
                    .any(|(b, e)| b.weaker_than(g) && e.is_subset(target) && !e.contains(&u));
            acc.set(j, ok);
        }
        acc
    };
    // transitions with acceptance, dominated ones removed
    let tgba: Vec<Vec<(Guard<A>, usize, FixedBitSet)>> = trans
        .iter()
        .map(|moves| {
            let all: Vec<(Guard<A>, usize, FixedBitSet)> = moves
                .iter()
                .map(|(g, c)| (g.clone(), set_ix[c], acc_of(g, c)))
                .collect();
            all.iter()
                .enumerate()
                .filter(|(i, t)| {
                    !all.iter().enumerate().any(|(j, o)| {
                        j != *i
                            && o.0.weaker_than(&t.0)
                            && sets[o.1].is_subset(&sets[t.1])
                            && t.2.is_subset(&o.2)
                            && (o.0 != t.0 || o.1 != t.1 || o.2 != t.2 || j < *i)
                    })
                })
                .map(|(_, t)| t.clone())
                .collect()
        })
        .collect();

    // degeneralize
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut states: Vec<(usize, usize)> = Vec::new();
    let mut edges: Vec<Vec<(Guard<A>, usize)>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut get = |key: (usize, usize), states: &mut Vec<(usize, usize)>, queue: &mut VecDeque<usize>| {
        if let Some(&i) = ids.get(&key) {
            return i;
        }
        states.push(key);
        ids.insert(key, states.len() - 1);
        queue.push_back(states.len() - 1);
        states.len() - 1
    };
    let initial: Vec<usize> = init_ids
        .iter()
        .map(|&s| get((s, 0), &mut states, &mut queue))
        .collect();
    while let Some(i) = queue.pop_front() {
        let (s, level) = states[i];
        let base = if level == k { 0 } else { level };
        let mut out = Vec::new();
        for (g, d, acc) in &tgba[s] {
            let mut j = base;
            while j < k && acc.contains(j) {
                j += 1;
            }
            out.push((g.clone(), get((*d, j), &mut states, &mut queue)));
        }
        if edges.len() <= i {
            edges.resize(i + 1, Vec::new());
        }
        edges[i] = out;
    }
    edges.resize(states.len(), Vec::new());
    let names = states
        .iter()
        .map(|(s, l)| {
            let parts: Vec<String> = sets[*s]
                .iter()
                .map(|q| v.formulas[*q].to_string())
                .collect();
            format!("{{{}}}/{l}", parts.join(","))
        })
        .collect();
    let nba = Nba {
        initial,
        accepting: states.iter().map(|&(_, l)| l == k).collect(),
        edges,
        names,
    };
    nba.trim().0
}

/// Generalized Büchi tableau of a formula, explored one concrete letter at
/// a time. States are sets of subformula indices.
pub struct Tableau<A> {
    v: Vwaa<A>,
    initial: Vec<Conj>,
    untils: Vec<usize>,
    delta: Vec<Option<Vec<Move<A>>>>,
}

impl<A: Clone + Ord + Hash> Tableau<A> {
    pub fn new(f: &Nnf<A>) -> Self {
        let mut v = Vwaa {
            formulas: Vec::new(),
            index: HashMap::new(),
            memo: HashMap::new(),
        };
        let initial = v.bar(f);
        // close the state space so every Until is known up front
        let mut i = 0;
        while i < v.formulas.len() {
            let fi = v.formulas[i].clone();
            v.delta(&fi);
            i += 1;
        }
        let untils = (0..v.formulas.len())
            .filter(|&i| matches!(v.formulas[i], Nnf::Until(..)))
            .collect();
        let delta = vec![None; v.formulas.len()];
        Tableau {
            v,
            initial,
            untils,
            delta,
        }
    }

    pub fn initial(&self) -> &[BTreeSet<usize>] {
        &self.initial
    }

    /// Number of acceptance sets; a transition set of all of them is accepting.
    pub fn acceptance_sets(&self) -> usize {
        self.untils.len()
    }

    fn moves(&mut self, q: usize) -> &[Move<A>] {
        if self.delta[q].is_none() {
            let fq = self.v.formulas[q].clone();
            self.delta[q] = Some(self.v.delta(&fq));
        }
        self.delta[q].as_deref().unwrap()
    }

    /// Successor sets under the letter `val`, each with the acceptance sets
    /// the transition belongs to. Dominated successors are dropped.
    pub fn successors(
        &mut self,
        set: &BTreeSet<usize>,
        val: &impl Fn(&A) -> bool,
    ) -> Vec<(BTreeSet<usize>, FixedBitSet)> {
        let mut targets: Vec<Conj> = vec![Conj::new()];
        for &q in set {
            let options: Vec<Conj> = self
                .moves(q)
                .iter()
                .filter(|(g, _)| g.holds(val))
                .map(|(_, e)| e.clone())
                .collect();
            if options.is_empty() {
                return Vec::new();
            }
            let mut next: Vec<Conj> = targets
                .iter()
                .flat_map(|t| options.iter().map(move |e| t.union(e).copied().collect()))
                .collect();
            next.sort();
            next.dedup();
            targets = next;
        }
        let k = self.untils.len();
        let untils = self.untils.clone();
        let mut out: Vec<(Conj, FixedBitSet)> = Vec::new();
        for t in targets {
            let mut acc = FixedBitSet::with_capacity(k);
            for (j, &u) in untils.iter().enumerate() {
                let ok = !t.contains(&u)
                    || self
                        .moves(u)
                        .iter()
                        .any(|(g, e)| g.holds(val) && e.is_subset(&t) && !e.contains(&u));
                acc.set(j, ok);
            }
            out.push((t, acc));
        }
        let keep: Vec<bool> = (0..out.len())
            .map(|i| {
                !out.iter().enumerate().any(|(j, o)| {
                    j != i
                        && o.0.is_subset(&out[i].0)
                        && out[i].1.is_subset(&o.1)
                        && (o.0 != out[i].0 || o.1 != out[i].1 || j < i)
                })
            })
            .collect();
        out.into_iter()
            .zip(keep)
            .filter_map(|(o, k)| k.then_some(o))
            .collect()
    }

    pub fn describe(&self, set: &BTreeSet<usize>) -> String
    where
        A: Display,
    {
        let parts: Vec<String> = set.iter().map(|q| self.v.formulas[*q].to_string()).collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// Büchi automaton for the negation of `phi`.
pub fn ltl_to_nba(phi: &Ltl) -> Nba<Guard<String>> {
    nnf_to_nba(&Nnf::from_ltl(phi, true))
}
