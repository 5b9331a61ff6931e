//! Composition of a net with transits and its chain automata into one
//! inhibitor net, and the matching rewrite of the run formula into LTL.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::automata::{FlowAutomaton, Nba};
use crate::logic::{FlowCtlStar, Ltl};
use crate::net::{InhibitorNet, Label, NetBuilder, NetError, PetriNetWithTransits};

/// Prefix of every generated identifier; user nets may not use it.
pub const RESERVED_PREFIX: &str = "__";

/// Atom that holds when the ingoing transition belongs to the original part
/// and is not the mode switch.
pub const ATOM_M: &str = "__M";
/// Atom that holds when no transition led to the position.
pub const ATOM_I: &str = "__i";
/// Atom for "some transition of the original part".
pub const ATOM_ORIG: &str = "__orig";
/// Atom for "some subnet transition".
pub const ATOM_SUB: &str = "__sub";

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("identifier `{0}` uses the reserved prefix `__`")]
    ReservedName(String),
    #[error("automaton {subnet} reads {found} letters, the net needs {expected}")]
    Alphabet {
        subnet: usize,
        expected: usize,
        found: usize,
    },
    #[error("automaton {subnet} has no start state for transit START -> {place} of `{transition}`")]
    MissingStart {
        subnet: usize,
        transition: String,
        place: String,
    },
    #[error("formula has {formula} flow subformulas but {subnets} subnets were built")]
    SubnetCount { formula: usize, subnets: usize },
    #[error("composed net has {found} places, expected {expected}")]
    PlaceLaw { expected: usize, found: usize },
    #[error(transparent)]
    Net(#[from] NetError),
}

/// A Büchi automaton over `T ∪ {#}` (letter `|T|` is `#`) with a start
/// state for every START transit.
#[derive(Debug, Clone)]
pub struct ChainNba {
    pub nba: Nba<usize>,
    /// `(transition, place) -> state` for each transit `START -> place`.
    pub start: BTreeMap<(usize, usize), usize>,
}

impl FlowAutomaton {
    pub fn chain_nba(&self, net: &PetriNetWithTransits) -> ChainNba {
        let mut start = BTreeMap::new();
        for t in 0..net.transitions().len() {
            for p in net.transit_targets(t, None) {
                start.insert((t, p), self.start_for(net, t, p));
            }
        }
        ChainNba {
            nba: self.nba.clone(),
            start,
        }
    }
}

/// Names of the generated places and transitions of one subnet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubnetMeta {
    pub init: String,
    pub normal: String,
    pub stutter: String,
    pub act_hash: String,
    /// Activation place per original transition, in transition order.
    pub act: Vec<String>,
    /// One place per automaton state.
    pub states: Vec<String>,
    /// Places of accepting states.
    pub buchi: Vec<String>,
    pub switch: String,
    pub start: Vec<String>,
    pub edges: Vec<String>,
    pub skip: Vec<String>,
    pub local_stutter: Vec<String>,
}

impl SubnetMeta {
    /// Every transition except the mode switch.
    pub fn labelled(&self) -> impl Iterator<Item = &String> {
        self.start
            .iter()
            .chain(&self.edges)
            .chain(&self.skip)
            .chain(&self.local_stutter)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionMetadata {
    pub act_o: String,
    pub normal_mode: String,
    pub stutter_mode: String,
    pub t_ns: String,
    pub t_hash: String,
    /// Transitions of the input net.
    pub original: Vec<String>,
    /// Places of the input net.
    pub original_places: Vec<String>,
    pub subnets: Vec<SubnetMeta>,
}

impl ReductionMetadata {
    /// Transitions of the original part, mode switch included.
    pub fn original_part(&self) -> Vec<String> {
        let mut v = self.original.clone();
        v.push(self.t_ns.clone());
        v.push(self.t_hash.clone());
        v
    }

    /// All subnet transitions, mode switches included.
    pub fn subnet_transitions(&self) -> Vec<String> {
        let mut v = Vec::new();
        for s in &self.subnets {
            v.push(s.switch.clone());
            v.extend(s.labelled().cloned());
        }
        v
    }

    /// The ingoing-transition atoms used by [`transform_formula_compact`].
    pub fn macros(&self) -> AtomMacros {
        let mut m = self.original.clone();
        m.push(self.t_hash.clone());
        let mut defs = BTreeMap::new();
        defs.insert(ATOM_M.to_string(), Macro::Ingoing(m));
        defs.insert(ATOM_ORIG.to_string(), Macro::Ingoing(self.original_part()));
        defs.insert(ATOM_SUB.to_string(), Macro::Ingoing(self.subnet_transitions()));
        defs.insert(ATOM_I.to_string(), Macro::NoIngoing);
        AtomMacros(defs)
    }

    /// Expected place count `|P| + 3 + (4 + |T|)·n + Σ|Q_i|`.
    pub fn place_law(&self) -> usize {
        let t = self.original.len();
        self.original_places.len()
            + 3
            + (4 + t) * self.subnets.len()
            + self.subnets.iter().map(|s| s.states.len()).sum::<usize>()
    }
}

/// Atom abbreviations resolved on the ingoing transition of a position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Macro {
    /// Ingoing transition is one of these.
    Ingoing(Vec<String>),
    /// No ingoing transition.
    NoIngoing,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomMacros(pub BTreeMap<String, Macro>);

impl AtomMacros {
    pub fn get(&self, name: &str) -> Option<&Macro> {
        self.0.get(name)
    }

    /// Replaces every macro atom by its definition over transition atoms.
    pub fn expand(&self, phi: &Ltl) -> Ltl {
        phi.map_atoms(&mut |a| match self.0.get(a) {
            Some(Macro::Ingoing(ts)) => Ltl::any(ts.iter().map(|t| Ltl::atom(t))),
            Some(Macro::NoIngoing) => {
                let all: BTreeSet<&String> = self
                    .0
                    .values()
                    .flat_map(|m| match m {
                        Macro::Ingoing(ts) => ts.iter().collect(),
                        Macro::NoIngoing => Vec::new(),
                    })
                    .collect();
                Ltl::not(Ltl::any(all.into_iter().map(|t| Ltl::atom(t))))
            }
            None => Ltl::atom(a),
        })
    }
}

fn check_reserved(net: &PetriNetWithTransits) -> Result<(), ReductionError> {
    for name in net.places().iter().chain(net.transitions()) {
        if name.starts_with(RESERVED_PREFIX) {
            return Err(ReductionError::ReservedName(name.clone()));
        }
    }
    Ok(())
}

/// Builds the composed inhibitor net with one subnet per automaton.
pub fn compose_mc_net(
    net: &PetriNetWithTransits,
    nbas: &[ChainNba],
) -> Result<(InhibitorNet, ReductionMetadata), ReductionError> {
    check_reserved(net)?;
    let places = net.places();
    let trans = net.transitions();
    let nt = trans.len();
    let n = nbas.len();
    let mut b = NetBuilder::new();

    // original part
    let meta_o = ReductionMetadata {
        act_o: "__act_o".into(),
        normal_mode: "__normal".into(),
        stutter_mode: "__stutter".into(),
        t_ns: "__t_ns".into(),
        t_hash: "__t_hash".into(),
        original: trans.to_vec(),
        original_places: places.to_vec(),
        subnets: Vec::new(),
    };
    let m = &meta_o;
    for (i, p) in places.iter().enumerate() {
        b.place(p, net.initial().contains(i));
    }
    b.place(&m.act_o, true)
        .place(&m.normal_mode, true)
        .place(&m.stutter_mode, false);
    for (t, name) in trans.iter().enumerate() {
        b.transition(name);
        for &p in net.pre(t) {
            b.arc(&places[p], name);
        }
        for &p in net.post(t) {
            b.arc(name, &places[p]);
        }
        b.arc(&m.act_o, name).inhibitor(&m.stutter_mode, name);
    }
    b.transition(&m.t_ns)
        .arc(&m.normal_mode, &m.t_ns)
        .arc(&m.t_ns, &m.stutter_mode);
    b.transition(&m.t_hash)
        .arc(&m.act_o, &m.t_hash)
        .inhibitor(&m.normal_mode, &m.t_hash);

    // activation places of subnet i (1-based); n + 1 means back to act_o
    let act_t = |i: usize, t: usize| -> String {
        if i > n {
            "__act_o".into()
        } else {
            format!("__s{i}_act_{}", trans[t])
        }
    };
    let act_h = |i: usize| -> String {
        if i > n {
            "__act_o".into()
        } else {
            format!("__s{i}_act_hash")
        }
    };
    for (t, name) in trans.iter().enumerate() {
        b.arc(name, &act_t(1, t));
    }
    b.arc(&m.t_hash, &act_h(1));

    let mut subnets = Vec::new();
    for (k, chain) in nbas.iter().enumerate() {
        let i = k + 1;
        let nba = &chain.nba;
        let letters = nba
            .edges
            .iter()
            .flatten()
            .map(|&(l, _)| l + 1)
            .max()
            .unwrap_or(0);
        if letters > nt + 1 {
            return Err(ReductionError::Alphabet {
                subnet: k,
                expected: nt + 1,
                found: letters,
            });
        }
        let s = SubnetMeta {
            init: format!("__s{i}_init"),
            normal: format!("__s{i}_normal"),
            stutter: format!("__s{i}_stutter"),
            act_hash: act_h(i),
            act: (0..nt).map(|t| act_t(i, t)).collect(),
            states: (0..nba.len()).map(|q| format!("__s{i}_q{q}")).collect(),
            buchi: (0..nba.len())
                .filter(|&q| nba.accepting[q])
                .map(|q| format!("__s{i}_q{q}"))
                .collect(),
            switch: format!("__s{i}_switch"),
            start: Vec::new(),
            edges: Vec::new(),
            skip: Vec::new(),
            local_stutter: Vec::new(),
        };
        b.place(&s.init, true)
            .place(&s.normal, true)
            .place(&s.stutter, false)
            .place(&s.act_hash, false);
        for a in &s.act {
            b.place(a, false);
        }
        for q in &s.states {
            b.place(q, false);
        }
        let mut s = s;
        b.transition(&s.switch)
            .arc(&s.normal, &s.switch)
            .arc(&s.switch, &s.stutter);

        // letter l of subnet i: input place and successor place
        let input = |l: usize| if l == nt { act_h(i) } else { act_t(i, l) };
        let output = |l: usize| if l == nt { act_h(i + 1) } else { act_t(i + 1, l) };
        let label = |l: usize| {
            if l == nt {
                Label::Hash
            } else {
                Label::Transition(trans[l].clone())
            }
        };
        // the mode a letter's transitions are blocked in
        let blocked_by = |l: usize| if l == nt { s.normal.clone() } else { s.stutter.clone() };

        for t in 0..nt {
            for p in net.transit_targets(t, None) {
                let q = *chain.start.get(&(t, p)).ok_or_else(|| ReductionError::MissingStart {
                    subnet: k,
                    transition: trans[t].clone(),
                    place: places[p].clone(),
                })?;
                let name = format!("__s{i}_start_{}_{}", trans[t], places[p]);
                b.transition(&name)
                    .arc(&s.init, &name)
                    .arc(&input(t), &name)
                    .arc(&name, &s.states[q])
                    .arc(&name, &output(t))
                    .inhibitor(&s.stutter, &name)
                    .label(&name, label(t));
                s.start.push(name);
            }
        }
        let mut has_letter = vec![BTreeSet::new(); nt + 1];
        for (q, es) in nba.edges.iter().enumerate() {
            for &(l, _) in es {
                has_letter[l].insert(q);
            }
        }
        let mut e = 0;
        for (q, es) in nba.edges.iter().enumerate() {
            for &(l, d) in es {
                let name = format!("__s{i}_e{e}");
                e += 1;
                b.transition(&name)
                    .arc(&s.states[q], &name)
                    .arc(&input(l), &name)
                    .arc(&name, &s.states[d])
                    .arc(&name, &output(l))
                    .inhibitor(&blocked_by(l), &name)
                    .label(&name, label(l));
                s.edges.push(name);
            }
        }
        // skipping: only when no active state can read the letter
        for t in 0..nt {
            let name = format!("__s{i}_skip_{}", trans[t]);
            b.transition(&name)
                .arc(&input(t), &name)
                .arc(&name, &output(t))
                .inhibitor(&s.stutter, &name)
                .label(&name, label(t));
            for &q in &has_letter[t] {
                b.inhibitor(&s.states[q], &name);
            }
            s.skip.push(name);
        }
        // global stutter before any chain was started
        let name = format!("__s{i}_idle");
        b.transition(&name)
            .arc(&input(nt), &name)
            .arc(&name, &output(nt))
            .inhibitor(&s.normal, &name)
            .label(&name, Label::Hash);
        for q in &s.states {
            b.inhibitor(q, &name);
        }
        s.skip.push(name);
        // local stutter: a #-edge taken on a letter the state cannot read
        let mut ls = 0;
        for (q, es) in nba.edges.iter().enumerate() {
            for &(l, d) in es {
                if l != nt {
                    continue;
                }
                for t in (0..nt).filter(|t| !has_letter[*t].contains(&q)) {
                    let name = format!("__s{i}_ls{ls}_{}", trans[t]);
                    ls += 1;
                    b.transition(&name)
                        .arc(&s.states[q], &name)
                        .arc(&input(t), &name)
                        .arc(&name, &s.states[d])
                        .arc(&name, &output(t))
                        .inhibitor(&s.normal, &name)
                        .label(&name, label(t));
                    s.local_stutter.push(name);
                }
            }
        }
        subnets.push(s);
    }
    let mcnet = b.build_inhibitor()?;
    let meta = ReductionMetadata { subnets, ..meta_o };
    let expected = meta.place_law();
    if mcnet.places().len() != expected {
        return Err(ReductionError::PlaceLaw {
            expected,
            found: mcnet.places().len(),
        });
    }
    Ok((mcnet, meta))
}

/// The LTL formula for the composed net, written with the macro atoms
/// [`ATOM_M`], [`ATOM_I`], [`ATOM_ORIG`] and [`ATOM_SUB`].
pub fn transform_formula_compact(
    psi: &FlowCtlStar,
    meta: &ReductionMetadata,
) -> Result<Ltl, ReductionError> {
    let original: BTreeSet<&str> = meta.original.iter().map(String::as_str).collect();
    let mut next_flow = 0;
    let body = run_part(psi, meta, &original, &mut next_flow)?;
    if next_flow != meta.subnets.len() {
        return Err(ReductionError::SubnetCount {
            formula: next_flow,
            subnets: meta.subnets.len(),
        });
    }
    let gf = |f: Ltl| Ltl::globally(Ltl::eventually(f));
    let mut premise = gf(Ltl::atom(&meta.act_o));
    if !meta.subnets.is_empty() {
        premise = Ltl::and(premise, gf(Ltl::not(Ltl::atom(ATOM_I))));
    }
    Ok(Ltl::implies(premise, body))
}

/// [`transform_formula_compact`] with the macro atoms expanded.
pub fn transform_formula(psi: &FlowCtlStar, meta: &ReductionMetadata) -> Result<Ltl, ReductionError> {
    Ok(meta.macros().expand(&transform_formula_compact(psi, meta)?))
}

fn run_part(
    psi: &FlowCtlStar,
    meta: &ReductionMetadata,
    original: &BTreeSet<&str>,
    next_flow: &mut usize,
) -> Result<Ltl, ReductionError> {
    Ok(match psi {
        FlowCtlStar::Ltl(f) => rewrite(f, original),
        FlowCtlStar::And(a, b) => Ltl::and(
            run_part(a, meta, original, next_flow)?,
            run_part(b, meta, original, next_flow)?,
        ),
        FlowCtlStar::Or(a, b) => Ltl::or(
            run_part(a, meta, original, next_flow)?,
            run_part(b, meta, original, next_flow)?,
        ),
        FlowCtlStar::Implies(a, b) => Ltl::implies(rewrite(a, original), run_part(b, meta, original, next_flow)?),
        FlowCtlStar::Flow(_) => {
            let k = *next_flow;
            *next_flow += 1;
            let s = meta.subnets.get(k).ok_or(ReductionError::SubnetCount {
                formula: k + 1,
                subnets: meta.subnets.len(),
            })?;
            let b = Ltl::any(s.buchi.iter().map(|q| Ltl::atom(q)));
            Ltl::not(Ltl::globally(Ltl::eventually(b)))
        }
    })
}

fn mentions(f: &Ltl, original: &BTreeSet<&str>) -> bool {
    f.atoms().iter().any(|a| original.contains(a.as_str()))
}

/// Post-order rewrite of the run part.
fn rewrite(f: &Ltl, original: &BTreeSet<&str>) -> Ltl {
    let i = || Ltl::atom(ATOM_I);
    match f {
        Ltl::True | Ltl::Atom(_) => f.clone(),
        Ltl::Not(a) => Ltl::not(rewrite(a, original)),
        Ltl::And(a, b) => Ltl::and(rewrite(a, original), rewrite(b, original)),
        Ltl::Next(a) => {
            let a = rewrite(a, original);
            let orig_or_i = Ltl::or(Ltl::atom(ATOM_ORIG), i());
            Ltl::and(
                Ltl::implies(i(), Ltl::next(a.clone())),
                Ltl::implies(
                    Ltl::not(i()),
                    Ltl::next(Ltl::until(Ltl::atom(ATOM_SUB), Ltl::and(orig_or_i, a))),
                ),
            )
        }
        Ltl::Until(a, b) => {
            let touches = mentions(f, original);
            let (a, b) = (rewrite(a, original), rewrite(b, original));
            if touches {
                let mi = || Ltl::or(Ltl::atom(ATOM_M), i());
                Ltl::until(Ltl::implies(mi(), a), Ltl::and(mi(), b))
            } else {
                Ltl::until(a, b)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_flow, parse_ltl};
    use crate::net::{parse_net_text, NetBuilder};

    fn two_state_nba(letters: usize) -> ChainNba {
        // q0 reads anything and moves to q1; q1 loops
        let mut edges = vec![Vec::new(), Vec::new()];
        for l in 0..letters {
            edges[0].push((l, 1));
            edges[1].push((l, 1));
        }
        ChainNba {
            nba: Nba {
                initial: vec![0],
                accepting: vec![false, true],
                edges,
                names: vec!["q0".into(), "q1".into()],
            },
            start: BTreeMap::new(),
        }
    }

    fn fig2() -> PetriNetWithTransits {
        parse_net_text(crate::fixtures::FIG2_NET)
            .unwrap()
            .build_transits()
            .unwrap()
    }

    #[test]
    fn no_subnets_adds_three_places() {
        let net = fig2();
        let (mc, meta) = compose_mc_net(&net, &[]).unwrap();
        assert_eq!(mc.places().len(), net.places().len() + 3);
        assert_eq!(mc.transitions().len(), net.transitions().len() + 2);
        assert_eq!(meta.place_law(), 10);
    }

    #[test]
    fn one_subnet_place_count() {
        let net = fig2();
        let mut nba = two_state_nba(9);
        let t = net.transition_index("enterHall").unwrap();
        let p = net.place_index("hall").unwrap();
        nba.start.insert((t, p), 0);
        let (mc, _) = compose_mc_net(&net, &[nba]).unwrap();
        assert_eq!(mc.places().len(), 22 + 2);
    }

    #[test]
    fn rejects_reserved_names_and_missing_starts() {
        let mut b = NetBuilder::new();
        b.place("__x", true);
        let net = b.build_transits().unwrap();
        assert!(matches!(
            compose_mc_net(&net, &[]),
            Err(ReductionError::ReservedName(_))
        ));
        let net = fig2();
        assert!(matches!(
            compose_mc_net(&net, &[two_state_nba(9)]),
            Err(ReductionError::MissingStart { .. })
        ));
        assert!(matches!(
            compose_mc_net(&net, &[two_state_nba(11)]),
            Err(ReductionError::Alphabet { .. })
        ));
    }

    #[test]
    fn skip_is_blocked_by_readers() {
        let mut b = NetBuilder::new();
        b.place("a", true).transition("t").read_arc("a", "t");
        b.transit("t", None, "a");
        let net = b.build_transits().unwrap();
        // q0 has no t-edge, q1 has one
        let mut start = BTreeMap::new();
        start.insert((0, 0), 0);
        let chain = ChainNba {
            nba: Nba {
                initial: vec![0],
                accepting: vec![false, true],
                edges: vec![vec![(1, 1)], vec![(0, 1), (1, 1)]],
                names: vec!["q0".into(), "q1".into()],
            },
            start,
        };
        let (mc, _) = compose_mc_net(&net, &[chain]).unwrap();
        let skip = mc.transition_index("__s1_skip_t").unwrap();
        let inh: Vec<&str> = mc
            .inhibitors(skip)
            .iter()
            .map(|&p| mc.places()[p].as_str())
            .collect();
        assert_eq!(inh, ["__s1_q1", "__s1_stutter"]);
        // q0 cannot read t, so one local stutter transition exists
        assert!(mc.transition_index("__s1_ls0_t").is_some());
    }

    #[test]
    fn plain_formula_gets_premise_only() {
        let net = fig2();
        let (_, meta) = compose_mc_net(&net, &[]).unwrap();
        let psi = parse_flow("G F lab").unwrap();
        let got = transform_formula(&psi, &meta).unwrap();
        let want = parse_ltl("(G F __act_o) -> G F lab").unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn next_rewrite_shape() {
        let net = fig2();
        let (_, meta) = compose_mc_net(&net, &[]).unwrap();
        let psi = parse_flow("X lab").unwrap();
        let got = transform_formula_compact(&psi, &meta).unwrap();
        let want = parse_ltl(
            "(G F __act_o) -> ((__i -> X lab) & (!__i -> X (__sub U ((__orig | __i) & lab))))",
        )
        .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn until_rewrite_only_with_transitions() {
        let net = fig2();
        let (_, meta) = compose_mc_net(&net, &[]).unwrap();
        let psi = parse_flow("lab U evening").unwrap();
        let got = transform_formula_compact(&psi, &meta).unwrap();
        let want =
            parse_ltl("(G F __act_o) -> (((__M | __i) -> lab) U ((__M | __i) & evening))").unwrap();
        assert_eq!(got, want);
        let psi = parse_flow("lab U kitchen").unwrap();
        let got = transform_formula_compact(&psi, &meta).unwrap();
        assert_eq!(got, parse_ltl("(G F __act_o) -> (lab U kitchen)").unwrap());
    }

    #[test]
    fn flow_part_becomes_buchi_places() {
        let net = fig2();
        let mut nba = two_state_nba(9);
        let t = net.transition_index("enterHall").unwrap();
        let p = net.place_index("hall").unwrap();
        nba.start.insert((t, p), 0);
        let (_, meta) = compose_mc_net(&net, &[nba]).unwrap();
        let psi = parse_flow("A AG EF lab").unwrap();
        let got = transform_formula_compact(&psi, &meta).unwrap();
        let want = parse_ltl("(G F __act_o & G F !__i) -> !G F __s1_q1").unwrap();
        assert_eq!(got, want);
        let (_, meta0) = compose_mc_net(&net, &[]).unwrap();
        assert!(matches!(
            transform_formula(&psi, &meta0),
            Err(ReductionError::SubnetCount { .. })
        ));
    }
}
