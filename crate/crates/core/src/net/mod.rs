//! Safe Petri nets, transits, inhibitor arcs and firing semantics.

mod graph;
mod text;

pub use graph::{marking_graph, validate_safe, GraphError, GraphNode, MarkingGraph, SafetyReport};
pub use text::{parse_net_text, print_net_text, NetText};

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// A set of marked places, indexed by place position.
pub type Marking = FixedBitSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("invalid identifier `{0}`")]
    BadIdentifier(String),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("arc `{0} -> {1}` must connect a place and a transition")]
    BadArc(String, String),
    #[error("transit of `{transition}` from `{from}` to `{to}`: {reason}")]
    BadTransit {
        transition: String,
        from: String,
        to: String,
        reason: &'static str,
    },
    #[error("{0} are not allowed in this kind of net")]
    NotAllowed(&'static str),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Returns true if `s` is a well-formed identifier.
///
/// Identifiers match `[A-Za-z_][A-Za-z0-9_>\[\],-]*` and never contain `->`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    s.chars().all(is_ident_char) && !s.contains("->")
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '>' | '[' | ']' | ',' | '-')
}

/// Letter of a transition label: an original transition or the stutter symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Transition(String),
    Hash,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Transition(t) => write!(f, "{t}"),
            Label::Hash => write!(f, "#"),
        }
    }
}

/// Incremental description of a net; names are resolved on `build_*`.
#[derive(Debug, Clone, Default)]
pub struct NetBuilder {
    places: Vec<(String, bool)>,
    transitions: Vec<String>,
    arcs: Vec<(String, String)>,
    transits: Vec<(String, Option<String>, String)>,
    inhibitors: Vec<(String, String)>,
    labels: Vec<(String, Label)>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(&mut self, name: &str, initial: bool) -> &mut Self {
        self.places.push((name.to_string(), initial));
        self
    }

    pub fn transition(&mut self, name: &str) -> &mut Self {
        self.transitions.push(name.to_string());
        self
    }

    pub fn arc(&mut self, from: &str, to: &str) -> &mut Self {
        self.arcs.push((from.to_string(), to.to_string()));
        self
    }

    /// Adds a transit of `transition`; `from = None` stands for START.
    pub fn transit(&mut self, transition: &str, from: Option<&str>, to: &str) -> &mut Self {
        self.transits
            .push((transition.to_string(), from.map(str::to_string), to.to_string()));
        self
    }

    pub fn inhibitor(&mut self, place: &str, transition: &str) -> &mut Self {
        self.inhibitors
            .push((place.to_string(), transition.to_string()));
        self
    }

    pub fn label(&mut self, transition: &str, label: Label) -> &mut Self {
        self.labels.push((transition.to_string(), label));
        self
    }

    /// Self-loop shorthand: `arc p -> t` and `arc t -> p`.
    pub fn read_arc(&mut self, place: &str, transition: &str) -> &mut Self {
        self.arc(place, transition).arc(transition, place)
    }

    fn build_net(&self) -> Result<Net, NetError> {
        let mut places: Vec<String> = self.places.iter().map(|(p, _)| p.clone()).collect();
        let mut transitions = self.transitions.clone();
        places.sort();
        transitions.sort();
        let mut place_ix = HashMap::new();
        let mut trans_ix = HashMap::new();
        for (i, p) in places.iter().enumerate() {
            if !is_identifier(p) || p == "START" {
                return Err(NetError::BadIdentifier(p.clone()));
            }
            if place_ix.insert(p.clone(), i).is_some() {
                return Err(NetError::Duplicate(p.clone()));
            }
        }
        for (i, t) in transitions.iter().enumerate() {
            if !is_identifier(t) || t == "START" {
                return Err(NetError::BadIdentifier(t.clone()));
            }
            if place_ix.contains_key(t) || trans_ix.insert(t.clone(), i).is_some() {
                return Err(NetError::Duplicate(t.clone()));
            }
        }
        let np = places.len();
        let nt = transitions.len();
        let mut pre = vec![Vec::new(); nt];
        let mut post = vec![Vec::new(); nt];
        for (a, b) in &self.arcs {
            match (place_ix.get(a), trans_ix.get(b), trans_ix.get(a), place_ix.get(b)) {
                (Some(&p), Some(&t), _, _) => pre[t].push(p),
                (_, _, Some(&t), Some(&p)) => post[t].push(p),
                _ => {
                    if !place_ix.contains_key(a) && !trans_ix.contains_key(a) {
                        return Err(NetError::UnknownNode(a.clone()));
                    }
                    if !place_ix.contains_key(b) && !trans_ix.contains_key(b) {
                        return Err(NetError::UnknownNode(b.clone()));
                    }
                    return Err(NetError::BadArc(a.clone(), b.clone()));
                }
            }
        }
        let mut inhibit = vec![Vec::new(); nt];
        for (p, t) in &self.inhibitors {
            let p = *place_ix
                .get(p)
                .ok_or_else(|| NetError::UnknownPlace(p.clone()))?;
            let t = *trans_ix
                .get(t)
                .ok_or_else(|| NetError::UnknownTransition(t.clone()))?;
            inhibit[t].push(p);
        }
        for v in pre.iter_mut().chain(post.iter_mut()).chain(inhibit.iter_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        let mask = |v: &Vec<usize>| {
            let mut m = FixedBitSet::with_capacity(np);
            for &p in v {
                m.insert(p);
            }
            m
        };
        let pre_mask = pre.iter().map(mask).collect();
        let post_mask = post.iter().map(mask).collect();
        let inhibit_mask = inhibit.iter().map(mask).collect();
        let mut initial = FixedBitSet::with_capacity(np);
        for (p, init) in &self.places {
            if *init {
                initial.insert(place_ix[p]);
            }
        }
        let mut consumers = vec![Vec::new(); np];
        for (t, ps) in pre.iter().enumerate() {
            for &p in ps {
                consumers[p].push(t);
            }
        }
        Ok(Net {
            places,
            transitions,
            place_ix,
            trans_ix,
            pre,
            post,
            inhibit,
            pre_mask,
            post_mask,
            inhibit_mask,
            consumers,
            initial,
        })
    }

    pub fn build_transits(&self) -> Result<PetriNetWithTransits, NetError> {
        if !self.inhibitors.is_empty() {
            return Err(NetError::NotAllowed("inhibitor arcs"));
        }
        if !self.labels.is_empty() {
            return Err(NetError::NotAllowed("labels"));
        }
        let net = self.build_net()?;
        let mut transits = vec![Vec::new(); net.transitions.len()];
        for (t, from, to) in &self.transits {
            let ti = net
                .transition_index(t)
                .ok_or_else(|| NetError::UnknownTransition(t.clone()))?;
            let bad = |reason| NetError::BadTransit {
                transition: t.clone(),
                from: from.clone().unwrap_or_else(|| "START".into()),
                to: to.clone(),
                reason,
            };
            let q = net
                .place_index(to)
                .ok_or_else(|| NetError::UnknownPlace(to.clone()))?;
            if !net.post[ti].contains(&q) {
                return Err(bad("target is not in the postset"));
            }
            let p = match from {
                None => None,
                Some(p) => {
                    let p = net
                        .place_index(p)
                        .ok_or_else(|| NetError::UnknownPlace(p.clone()))?;
                    if !net.pre[ti].contains(&p) {
                        return Err(bad("source is not in the preset"));
                    }
                    Some(p)
                }
            };
            transits[ti].push(Transit { from: p, to: q });
        }
        for v in &mut transits {
            v.sort_unstable();
            v.dedup();
        }
        Ok(PetriNetWithTransits { net, transits })
    }

    pub fn build_inhibitor(&self) -> Result<InhibitorNet, NetError> {
        if !self.transits.is_empty() {
            return Err(NetError::NotAllowed("transits"));
        }
        let net = self.build_net()?;
        let mut labels = vec![None; net.transitions.len()];
        for (t, l) in &self.labels {
            let ti = net
                .transition_index(t)
                .ok_or_else(|| NetError::UnknownTransition(t.clone()))?;
            labels[ti] = Some(l.clone());
        }
        Ok(InhibitorNet { net, labels })
    }
}

/// Places, transitions, flow, inhibitor arcs and the initial marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    places: Vec<String>,
    transitions: Vec<String>,
    place_ix: HashMap<String, usize>,
    trans_ix: HashMap<String, usize>,
    pre: Vec<Vec<usize>>,
    post: Vec<Vec<usize>>,
    inhibit: Vec<Vec<usize>>,
    pre_mask: Vec<Marking>,
    post_mask: Vec<Marking>,
    inhibit_mask: Vec<Marking>,
    consumers: Vec<Vec<usize>>,
    initial: Marking,
}

impl Net {
    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[String] {
        &self.transitions
    }

    pub fn place_index(&self, name: &str) -> Option<usize> {
        self.place_ix.get(name).copied()
    }

    pub fn transition_index(&self, name: &str) -> Option<usize> {
        self.trans_ix.get(name).copied()
    }

    pub fn pre(&self, t: usize) -> &[usize] {
        &self.pre[t]
    }

    pub fn post(&self, t: usize) -> &[usize] {
        &self.post[t]
    }

    pub fn inhibitors(&self, t: usize) -> &[usize] {
        &self.inhibit[t]
    }

    /// Transitions having `p` in their preset.
    pub fn consumers(&self, p: usize) -> &[usize] {
        &self.consumers[p]
    }

    pub fn initial(&self) -> &Marking {
        &self.initial
    }

    pub fn empty_marking(&self) -> Marking {
        FixedBitSet::with_capacity(self.places.len())
    }

    pub fn is_enabled(&self, m: &Marking, t: usize) -> bool {
        self.pre_mask[t].is_subset(m) && self.inhibit_mask[t].is_disjoint(m)
    }

    pub fn enabled(&self, m: &Marking) -> impl Iterator<Item = usize> + '_ {
        let m = m.clone();
        (0..self.transitions.len()).filter(move |&t| self.is_enabled(&m, t))
    }

    /// `(m \ pre(t)) ∪ post(t)`; does not check enabledness.
    pub fn fire(&self, m: &Marking, t: usize) -> Marking {
        let mut next = m.clone();
        next.difference_with(&self.pre_mask[t]);
        next.union_with(&self.post_mask[t]);
        next
    }

    /// True if firing `t` in `m` would put a second token on a place.
    pub fn fire_is_unsafe(&self, m: &Marking, t: usize) -> bool {
        self.post[t]
            .iter()
            .any(|&p| m.contains(p) && !self.pre_mask[t].contains(p))
    }

    pub fn marking_names(&self, m: &Marking) -> Vec<&str> {
        m.ones().map(|p| self.places[p].as_str()).collect()
    }

    /// Resolves an atomic proposition against places and transitions.
    pub fn atom(&self, name: &str) -> AtomRef {
        if let Some(p) = self.place_index(name) {
            AtomRef::Place(p)
        } else if let Some(t) = self.transition_index(name) {
            AtomRef::Transition(t)
        } else {
            AtomRef::Absent
        }
    }
}

/// What an atom refers to in a given net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomRef {
    Place(usize),
    Transition(usize),
    Absent,
}

impl AtomRef {
    pub fn holds(self, marking: &Marking, ingoing: Option<usize>) -> bool {
        match self {
            AtomRef::Place(p) => marking.contains(p),
            AtomRef::Transition(t) => ingoing == Some(t),
            AtomRef::Absent => false,
        }
    }
}

/// One transit `from -> to`; `from = None` is START.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transit {
    pub from: Option<usize>,
    pub to: usize,
}

/// A safe Petri net with a transit relation on each transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNetWithTransits {
    net: Net,
    transits: Vec<Vec<Transit>>,
}

impl PetriNetWithTransits {
    pub fn net(&self) -> &Net {
        &self.net
    }

    pub fn transits(&self, t: usize) -> &[Transit] {
        &self.transits[t]
    }

    /// Targets of transits of `t` leaving `p` (or START when `p` is None), sorted.
    pub fn transit_targets(&self, t: usize, from: Option<usize>) -> Vec<usize> {
        self.transits[t]
            .iter()
            .filter(|tr| tr.from == from)
            .map(|tr| tr.to)
            .collect()
    }

    pub fn to_builder(&self) -> NetBuilder {
        let mut b = builder_of(&self.net);
        for (t, trs) in self.transits.iter().enumerate() {
            for tr in trs {
                b.transit(
                    &self.net.transitions[t],
                    tr.from.map(|p| self.net.places[p].as_str()),
                    &self.net.places[tr.to],
                );
            }
        }
        b
    }
}

impl std::ops::Deref for PetriNetWithTransits {
    type Target = Net;
    fn deref(&self) -> &Net {
        &self.net
    }
}

/// A net with inhibitor arcs and a partial labelling of its transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InhibitorNet {
    net: Net,
    labels: Vec<Option<Label>>,
}

impl InhibitorNet {
    pub fn net(&self) -> &Net {
        &self.net
    }

    pub fn label(&self, t: usize) -> Option<&Label> {
        self.labels[t].as_ref()
    }

    pub fn to_builder(&self) -> NetBuilder {
        let mut b = builder_of(&self.net);
        for (t, ps) in self.net.inhibit.iter().enumerate() {
            for &p in ps {
                b.inhibitor(&self.net.places[p], &self.net.transitions[t]);
            }
        }
        for (t, l) in self.labels.iter().enumerate() {
            if let Some(l) = l {
                b.label(&self.net.transitions[t], l.clone());
            }
        }
        b
    }
}

impl std::ops::Deref for InhibitorNet {
    type Target = Net;
    fn deref(&self) -> &Net {
        &self.net
    }
}

impl From<PetriNetWithTransits> for InhibitorNet {
    /// Forgets the transits; no labels.
    fn from(n: PetriNetWithTransits) -> Self {
        let labels = vec![None; n.net.transitions.len()];
        InhibitorNet { net: n.net, labels }
    }
}

fn builder_of(net: &Net) -> NetBuilder {
    let mut b = NetBuilder::new();
    for (i, p) in net.places.iter().enumerate() {
        b.place(p, net.initial.contains(i));
    }
    for (t, name) in net.transitions.iter().enumerate() {
        b.transition(name);
        for &p in &net.pre[t] {
            b.arc(&net.places[p], name);
        }
        for &p in &net.post[t] {
            b.arc(name, &net.places[p]);
        }
    }
    b
}

/// A lasso-shaped firing sequence from the initial marking.
///
/// An empty `cycle` denotes a run that stops after `stem`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lasso {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("transition `{transition}` is not enabled at step {step}")]
    NotEnabled { step: usize, transition: String },
    #[error("the loop does not return to the marking it started from")]
    LoopNotClosed,
}

/// One position of a trace: the marking and the transition that led to it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceState {
    pub marking: Marking,
    pub ingoing: Option<usize>,
}

/// An ultimately periodic trace; positions `>= loop_start` repeat forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<TraceState>,
    pub loop_start: usize,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Index of the position following `i`.
    pub fn next(&self, i: usize) -> usize {
        if i + 1 == self.states.len() {
            self.loop_start
        } else {
            i + 1
        }
    }
}

impl Lasso {
    pub fn stopped(stem: Vec<usize>) -> Self {
        Lasso {
            stem,
            cycle: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_stopped(&self) -> bool {
        self.cycle.is_empty()
    }

    /// Transition at absolute index `i` (the cycle repeats).
    pub fn transition_at(&self, i: usize) -> usize {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Fires the lasso; returns the markings `M0 .. M_{|stem|+|cycle|}`.
    pub fn replay(&self, net: &Net) -> Result<Vec<Marking>, ReplayError> {
        let mut ms = vec![net.initial().clone()];
        for (step, &t) in self.stem.iter().chain(&self.cycle).enumerate() {
            let m = ms.last().unwrap();
            if !net.is_enabled(m, t) {
                return Err(ReplayError::NotEnabled {
                    step,
                    transition: net.transitions()[t].clone(),
                });
            }
            ms.push(net.fire(m, t));
        }
        if !self.cycle.is_empty() && ms[self.stem.len()] != *ms.last().unwrap() {
            return Err(ReplayError::LoopNotClosed);
        }
        Ok(ms)
    }

    /// The trace `M0, {t0} ∪ M1, ...`; a stopped run stutters its last marking.
    pub fn trace(&self, net: &Net) -> Result<Trace, ReplayError> {
        let ms = self.replay(net)?;
        let k = self.stem.len();
        let mut states = vec![TraceState {
            marking: ms[0].clone(),
            ingoing: None,
        }];
        for (i, &t) in self.stem.iter().chain(&self.cycle).enumerate() {
            states.push(TraceState {
                marking: ms[i + 1].clone(),
                ingoing: Some(t),
            });
        }
        if self.cycle.is_empty() {
            states.push(TraceState {
                marking: ms[k].clone(),
                ingoing: None,
            });
        }
        Ok(Trace {
            states,
            loop_start: k + 1,
        })
    }

    pub fn display(&self, net: &Net) -> String {
        let names = |v: &[usize]| {
            v.iter()
                .map(|&t| net.transitions()[t].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        };
        if self.cycle.is_empty() {
            format!("stem [{}] then stop", names(&self.stem))
        } else {
            format!("stem [{}] loop [{}]", names(&self.stem), names(&self.cycle))
        }
    }
}
