//! Hesitant alternating tree automata for CTL* with variable branching.
//!
//! Transitions are kept as templates and instantiated per letter and arity.

use std::collections::HashMap;

use super::ltl2nba::nnf_to_nba;
use super::pbf::Pbf;
use super::AutomataError;
use crate::logic::{Nnf, PNnf, SNnf, StateF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Existential,
    Universal,
}

/// Layer membership and the hesitant acceptance flag.
///
/// In an existential layer `flag` marks Büchi states; in a universal layer it
/// marks co-Büchi (rejecting) states.
#[derive(Debug, Clone)]
pub struct AtaState {
    pub name: String,
    pub layer: usize,
    pub mode: Mode,
    pub flag: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tmpl {
    True,
    False,
    Lit(usize, bool),
    And(Vec<Tmpl>),
    Or(Vec<Tmpl>),
    /// Some direction continues in the state.
    Any(usize),
    /// Every direction continues in the state.
    All(usize),
}

#[derive(Debug, Clone)]
pub struct Ata {
    pub ap: Vec<String>,
    pub states: Vec<AtaState>,
    pub initial: usize,
    tmpl: Vec<Tmpl>,
}

struct Builder<'a> {
    ap: &'a [String],
    states: Vec<AtaState>,
    tmpl: Vec<Tmpl>,
    layers: usize,
    entries: HashMap<SNnf, Tmpl>,
    next_states: HashMap<SNnf, usize>,
}

impl<'a> Builder<'a> {
    fn alloc(&mut self, name: String, mode: Mode, flag: bool) -> usize {
        self.states.push(AtaState {
            name,
            layer: usize::MAX,
            mode,
            flag,
        });
        self.tmpl.push(Tmpl::False);
        self.states.len() - 1
    }

    fn close_layer(&mut self, members: &[usize]) {
        for &q in members {
            self.states[q].layer = self.layers;
        }
        self.layers += 1;
    }

    fn lit(&self, a: &str, pos: bool) -> Result<Tmpl, AutomataError> {
        let i = self
            .ap
            .iter()
            .position(|x| x == a)
            .ok_or_else(|| AutomataError::UnknownAtom(a.to_string()))?;
        Ok(Tmpl::Lit(i, pos))
    }

    /// Transition template equivalent to `f` holding at the current node.
    fn entry(&mut self, f: &SNnf) -> Result<Tmpl, AutomataError> {
        if let Some(t) = self.entries.get(f) {
            return Ok(t.clone());
        }
        let t = match f {
            SNnf::True => Tmpl::True,
            SNnf::False => Tmpl::False,
            SNnf::Lit(a, pos) => self.lit(a, *pos)?,
            SNnf::And(a, b) => Tmpl::And(vec![self.entry(a)?, self.entry(b)?]),
            SNnf::Or(a, b) => Tmpl::Or(vec![self.entry(a)?, self.entry(b)?]),
            SNnf::E(p) => self.quantified(f, Mode::Existential, p)?,
            SNnf::A(p) => self.quantified(f, Mode::Universal, p)?,
        };
        self.entries.insert(f.clone(), t.clone());
        Ok(t)
    }

    fn dir(mode: Mode, q: usize) -> Tmpl {
        match mode {
            Mode::Existential => Tmpl::Any(q),
            Mode::Universal => Tmpl::All(q),
        }
    }

    /// A transient state whose transition is the entry of `s`.
    fn next_state(&mut self, s: &SNnf) -> Result<usize, AutomataError> {
        if let Some(&q) = self.next_states.get(s) {
            return Ok(q);
        }
        let t = self.entry(s)?;
        let q = self.alloc(s.to_string(), Mode::Existential, false);
        self.tmpl[q] = t;
        self.close_layer(&[q]);
        self.next_states.insert(s.clone(), q);
        Ok(q)
    }

    fn quantified(&mut self, f: &SNnf, mode: Mode, p: &PNnf) -> Result<Tmpl, AutomataError> {
        let state_of = |p: &PNnf| match p {
            PNnf::State(s) => Some((**s).clone()),
            _ => None,
        };
        match p {
            PNnf::State(s) => return self.entry(s),
            PNnf::Next(a) => {
                if let Some(s) = state_of(a) {
                    let q = self.next_state(&s)?;
                    return Ok(Self::dir(mode, q));
                }
            }
            PNnf::Until(a, b) | PNnf::Release(a, b) => {
                if let (Some(sa), Some(sb)) = (state_of(a), state_of(b)) {
                    let until = matches!(p, PNnf::Until(..));
                    let ea = self.entry(&sa)?;
                    let eb = self.entry(&sb)?;
                    // until: rejecting when looping; release: accepting
                    let flag = match mode {
                        Mode::Existential => !until,
                        Mode::Universal => until,
                    };
                    let q = self.alloc(f.to_string(), mode, flag);
                    let step = Self::dir(mode, q);
                    self.tmpl[q] = if until {
                        Tmpl::Or(vec![eb, Tmpl::And(vec![ea, step])])
                    } else {
                        Tmpl::And(vec![eb, Tmpl::Or(vec![ea, step])])
                    };
                    self.close_layer(&[q]);
                    return Ok(self.tmpl[q].clone());
                }
            }
            _ => {}
        }
        self.path_layer(f, mode, p)
    }

    /// General path formula: a Büchi automaton over the maximal state
    /// subformulas, run existentially (E) or dualized (A).
    fn path_layer(&mut self, f: &SNnf, mode: Mode, p: &PNnf) -> Result<Tmpl, AutomataError> {
        let target = match mode {
            Mode::Existential => p.clone(),
            Mode::Universal => p.negate(),
        };
        let mut atoms: Vec<SNnf> = Vec::new();
        let abs = abstract_path(&target, &mut atoms);
        let nba = nnf_to_nba(&abs);
        let mut pos_entry = Vec::new();
        let mut neg_entry = Vec::new();
        for s in &atoms {
            pos_entry.push(self.entry(s)?);
            neg_entry.push(self.entry(&s.negate())?);
        }
        let base = self.states.len();
        for (i, acc) in nba.accepting.iter().enumerate() {
            self.alloc(format!("{f}#{i}"), mode, *acc);
        }
        for n in 0..nba.len() {
            let mut parts = Vec::new();
            for (g, d) in &nba.edges[n] {
                let step = Self::dir(mode, base + d);
                match mode {
                    Mode::Existential => {
                        let mut conj: Vec<Tmpl> = g.pos.iter().map(|&a| pos_entry[a].clone()).collect();
                        conj.extend(g.neg.iter().map(|&a| neg_entry[a].clone()));
                        conj.push(step);
                        parts.push(Tmpl::And(conj));
                    }
                    Mode::Universal => {
                        let mut disj: Vec<Tmpl> = g.pos.iter().map(|&a| neg_entry[a].clone()).collect();
                        disj.extend(g.neg.iter().map(|&a| pos_entry[a].clone()));
                        disj.push(step);
                        parts.push(Tmpl::Or(disj));
                    }
                }
            }
            self.tmpl[base + n] = match mode {
                Mode::Existential => Tmpl::Or(parts),
                Mode::Universal => Tmpl::And(parts),
            };
        }
        let members: Vec<usize> = (base..base + nba.len()).collect();
        self.close_layer(&members);
        let starts: Vec<Tmpl> = nba.initial.iter().map(|&n| self.tmpl[base + n].clone()).collect();
        Ok(match mode {
            Mode::Existential => Tmpl::Or(starts),
            Mode::Universal => Tmpl::And(starts),
        })
    }
}

fn abstract_path(p: &PNnf, atoms: &mut Vec<SNnf>) -> Nnf<usize> {
    let b = |x: &PNnf, atoms: &mut Vec<SNnf>| abstract_path(x, atoms);
    match p {
        PNnf::State(s) => match s.as_ref() {
            SNnf::True => Nnf::True,
            SNnf::False => Nnf::False,
            s => {
                let i = atoms.iter().position(|x| x == s).unwrap_or_else(|| {
                    atoms.push(s.clone());
                    atoms.len() - 1
                });
                Nnf::Lit(i, true)
            }
        },
        PNnf::And(x, y) => Nnf::and(b(x, atoms), b(y, atoms)),
        PNnf::Or(x, y) => Nnf::or(b(x, atoms), b(y, atoms)),
        PNnf::Next(x) => Nnf::next(b(x, atoms)),
        PNnf::Until(x, y) => Nnf::until(b(x, atoms), b(y, atoms)),
        PNnf::Release(x, y) => Nnf::release(b(x, atoms), b(y, atoms)),
    }
}

impl Ata {
    /// Automaton accepting exactly the trees whose root satisfies `phi`.
    pub fn new(phi: &SNnf, ap: &[String]) -> Result<Ata, AutomataError> {
        let mut b = Builder {
            ap,
            states: Vec::new(),
            tmpl: Vec::new(),
            layers: 0,
            entries: HashMap::new(),
            next_states: HashMap::new(),
        };
        let t = b.entry(phi)?;
        let q0 = b.alloc(format!("init:{phi}"), Mode::Existential, false);
        b.tmpl[q0] = t;
        b.close_layer(&[q0]);
        Ok(Ata {
            ap: ap.to_vec(),
            states: b.states,
            initial: q0,
            tmpl: b.tmpl,
        })
    }

    /// Automaton for the negation of a flow subformula.
    pub fn for_negation(phi: &StateF, ap: &[String]) -> Result<Ata, AutomataError> {
        Ata::new(&SNnf::from_state(phi, true), ap)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `δ(q, σ, k)` over atoms `(direction, state)`; `sigma` is a bitmask over `ap`.
    pub fn delta(&self, q: usize, sigma: u64, k: usize) -> Result<Pbf<(usize, usize)>, AutomataError> {
        if k == 0 {
            return Err(AutomataError::EmptyDirections);
        }
        Ok(inst(&self.tmpl[q], sigma, k))
    }
}

fn inst(t: &Tmpl, sigma: u64, k: usize) -> Pbf<(usize, usize)> {
    match t {
        Tmpl::True => Pbf::True,
        Tmpl::False => Pbf::False,
        Tmpl::Lit(i, pos) => Pbf::constant((sigma >> i & 1 == 1) == *pos),
        Tmpl::And(v) => Pbf::and_all(v.iter().map(|x| inst(x, sigma, k)).collect::<Vec<_>>()),
        Tmpl::Or(v) => Pbf::or_all(v.iter().map(|x| inst(x, sigma, k)).collect::<Vec<_>>()),
        Tmpl::Any(q) => Pbf::or_all((0..k).map(|c| Pbf::Atom((c, *q)))),
        Tmpl::All(q) => Pbf::and_all((0..k).map(|c| Pbf::Atom((c, *q)))),
    }
}
