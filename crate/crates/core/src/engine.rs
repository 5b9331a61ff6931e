//! Explicit-state LTL checking of inhibitor nets and the Flow-CTL* driver.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::automata::{build_flow_automaton, AutomataError, FlowAutomaton, FlowStats, Tableau};
use crate::logic::{collect_flow_subformulas, FlowCtlStar, Ltl, Nnf};
use crate::net::{GraphNode, InhibitorNet, Lasso, Net, PetriNetWithTransits, ReplayError};
use crate::oracle::eval_ltl_positions;
use crate::reduction::{
    compose_mc_net, transform_formula_compact, AtomMacros, Macro, ReductionError, ReductionMetadata,
};

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// Maximum number of product states explored by the emptiness check.
    pub state_cap: usize,
    /// Size cap for each automaton construction stage.
    pub automaton_cap: usize,
    /// Threads used to build the flow automata.
    pub workers: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            state_cap: 2_000_000,
            automaton_cap: 5_000,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub product_states: usize,
    pub graph_nodes: usize,
    pub tableau_states: usize,
    pub mc_places: usize,
    pub mc_transitions: usize,
    pub flow: Vec<FlowStats>,
    pub elapsed: Duration,
}

/// A violating run of the checked net and its image in the input net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub composed: Lasso,
    pub original: Lasso,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub stats: Stats,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("flow subformula {index}: {source}")]
    Automata {
        index: usize,
        #[source]
        source: AutomataError,
    },
    #[error("reduction: {0}")]
    Reduction(#[from] ReductionError),
    #[error("model checking: explored more than {cap} product states")]
    StateCap { cap: usize, stats: Stats },
    #[error("model checking: firing `{transition}` at marking {{{marking}}} puts a second token on a place")]
    Unsafe { transition: String, marking: String },
    #[error("witness does not replay: {0}")]
    Replay(#[from] ReplayError),
    #[error("witness does not violate the formula")]
    WitnessCheck,
}

impl EngineError {
    /// CLI exit code: 2 for resource limits and internal failures, 3 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            EngineError::Reduction(ReductionError::ReservedName(_)) | EngineError::Unsafe { .. } => 3,
            EngineError::Automata {
                source: AutomataError::UnknownAtom(_),
                ..
            } => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone)]
enum Resolved {
    Place(usize),
    Ingoing(FixedBitSet),
    NoIngoing,
    Absent,
}

impl Resolved {
    fn new(net: &Net, macros: &AtomMacros, name: &str) -> Resolved {
        match macros.get(name) {
            Some(Macro::Ingoing(ts)) => {
                let mut set = FixedBitSet::with_capacity(net.transitions().len());
                for t in ts.iter().filter_map(|t| net.transition_index(t)) {
                    set.insert(t);
                }
                Resolved::Ingoing(set)
            }
            Some(Macro::NoIngoing) => Resolved::NoIngoing,
            None => match net.atom(name) {
                crate::net::AtomRef::Place(p) => Resolved::Place(p),
                crate::net::AtomRef::Transition(t) => {
                    let mut set = FixedBitSet::with_capacity(net.transitions().len());
                    set.insert(t);
                    Resolved::Ingoing(set)
                }
                crate::net::AtomRef::Absent => Resolved::Absent,
            },
        }
    }

    fn holds(&self, marking: &FixedBitSet, ingoing: Option<usize>) -> bool {
        match self {
            Resolved::Place(p) => marking.contains(*p),
            Resolved::Ingoing(set) => ingoing.is_some_and(|t| set.contains(t)),
            Resolved::NoIngoing => ingoing.is_none(),
            Resolved::Absent => false,
        }
    }
}

/// Checks `net ⊨ phi` over all finite and infinite firing sequences.
pub fn check_ltl(net: &Net, phi: &Ltl, opts: &CheckOptions) -> Result<Verdict, EngineError> {
    check_ltl_with(net, phi, &AtomMacros::default(), opts)
}

/// [`check_ltl`] where some atoms are abbreviations over ingoing transitions.
pub fn check_ltl_with(
    net: &Net,
    phi: &Ltl,
    macros: &AtomMacros,
    opts: &CheckOptions,
) -> Result<Verdict, EngineError> {
    let start = Instant::now();
    let atoms: Vec<String> = phi.atoms().into_iter().collect();
    let nnf = Nnf::from_ltl(phi, true).map_atoms(&mut |a: &String| {
        atoms.binary_search(a).expect("atom of the formula")
    });
    let tableau = Tableau::new(&nnf);
    let resolved: Vec<Resolved> = atoms.iter().map(|a| Resolved::new(net, macros, a)).collect();

    let mut search = Search {
        net,
        resolved: &resolved,
        levels: tableau.acceptance_sets(),
        tableau,
        sets: Vec::new(),
        set_ix: FxHashMap::default(),
        labels: Vec::new(),
        label_ix: FxHashMap::default(),
        moves: FxHashMap::default(),
        nodes: Vec::new(),
        node_ix: FxHashMap::default(),
        node_succ: Vec::new(),
        node_label: Vec::new(),
        states: Vec::new(),
        state_ix: FxHashMap::default(),
        color: Vec::new(),
        red: Vec::new(),
        cap: opts.state_cap,
    };
    let root = search.node(GraphNode::initial(net));
    let mut found = None;
    let inits: Vec<usize> = search
        .tableau
        .initial()
        .to_vec()
        .into_iter()
        .map(|c| search.set(c))
        .collect();
    for q in inits {
        let s = search.state(root, q, 0)?;
        if search.color[s] == Color::White {
            if let Some(cycle) = search.blue(s)? {
                found = Some(cycle);
                break;
            }
        }
    }
    let mut stats = Stats {
        product_states: search.states.len(),
        graph_nodes: search.nodes.len(),
        tableau_states: search.sets.len(),
        mc_places: net.places().len(),
        mc_transitions: net.transitions().len(),
        flow: Vec::new(),
        elapsed: Duration::ZERO,
    };
    let witness = match found {
        None => None,
        Some((path, loop_at)) => {
            let lasso = search.lasso(&path, loop_at);
            let trace = lasso.trace(net)?;
            let atom = |i: usize, a: &str| {
                let s = &trace.states[i];
                Resolved::new(net, macros, a).holds(&s.marking, s.ingoing)
            };
            if eval_ltl_positions(phi, trace.len(), &|i| trace.next(i), &atom)[0] {
                return Err(EngineError::WitnessCheck);
            }
            Some(Witness {
                original: lasso.clone(),
                composed: lasso,
            })
        }
    };
    stats.elapsed = start.elapsed();
    Ok(Verdict {
        holds: witness.is_none(),
        witness,
        stats,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Color {
    White,
    Cyan,
    Blue,
}

type Conj = BTreeSet<usize>;

struct Search<'a> {
    net: &'a Net,
    resolved: &'a [Resolved],
    tableau: Tableau<usize>,
    /// Number of acceptance sets; product states on this level are accepting.
    levels: usize,
    sets: Vec<Conj>,
    set_ix: FxHashMap<Conj, usize>,
    labels: Vec<Vec<bool>>,
    label_ix: FxHashMap<Vec<bool>, usize>,
    moves: FxHashMap<(usize, usize), Vec<(usize, FixedBitSet)>>,
    nodes: Vec<GraphNode>,
    node_ix: FxHashMap<GraphNode, usize>,
    node_succ: Vec<Option<Vec<usize>>>,
    node_label: Vec<usize>,
    states: Vec<(usize, usize, usize)>,
    state_ix: FxHashMap<(usize, usize, usize), usize>,
    color: Vec<Color>,
    red: Vec<bool>,
    cap: usize,
}

impl Search<'_> {
    fn node(&mut self, n: GraphNode) -> usize {
        if let Some(&i) = self.node_ix.get(&n) {
            return i;
        }
        let label: Vec<bool> = self
            .resolved
            .iter()
            .map(|r| r.holds(&n.marking, n.ingoing))
            .collect();
        let next_label = self.labels.len();
        let label = *self.label_ix.entry(label.clone()).or_insert_with(|| {
            self.labels.push(label);
            next_label
        });
        self.nodes.push(n.clone());
        self.node_ix.insert(n, self.nodes.len() - 1);
        self.node_succ.push(None);
        self.node_label.push(label);
        self.nodes.len() - 1
    }

    fn node_successors(&mut self, v: usize) -> Result<Vec<usize>, EngineError> {
        if let Some(s) = &self.node_succ[v] {
            return Ok(s.clone());
        }
        let n = self.nodes[v].clone();
        if !n.stopped {
            for t in self.net.enabled(&n.marking) {
                if self.net.fire_is_unsafe(&n.marking, t) {
                    return Err(EngineError::Unsafe {
                        transition: self.net.transitions()[t].clone(),
                        marking: self.net.marking_names(&n.marking).join(", "),
                    });
                }
            }
        }
        let out: Vec<usize> = n
            .successors(self.net)
            .into_iter()
            .map(|m| self.node(m))
            .collect();
        self.node_succ[v] = Some(out.clone());
        Ok(out)
    }

    fn set(&mut self, c: Conj) -> usize {
        if let Some(&i) = self.set_ix.get(&c) {
            return i;
        }
        self.sets.push(c.clone());
        self.set_ix.insert(c, self.sets.len() - 1);
        self.sets.len() - 1
    }

    fn state(&mut self, v: usize, q: usize, level: usize) -> Result<usize, EngineError> {
        let key = (v, q, level);
        if let Some(&s) = self.state_ix.get(&key) {
            return Ok(s);
        }
        if self.states.len() >= self.cap {
            return Err(EngineError::StateCap {
                cap: self.cap,
                stats: Stats {
                    product_states: self.states.len(),
                    graph_nodes: self.nodes.len(),
                    tableau_states: self.sets.len(),
                    ..Stats::default()
                },
            });
        }
        self.states.push(key);
        self.state_ix.insert(key, self.states.len() - 1);
        self.color.push(Color::White);
        self.red.push(false);
        Ok(self.states.len() - 1)
    }

    /// Tableau moves of set `q` on the label of node `v`.
    fn tableau_moves(&mut self, q: usize, v: usize) -> Vec<(usize, FixedBitSet)> {
        let l = self.node_label[v];
        if let Some(m) = self.moves.get(&(q, l)) {
            return m.clone();
        }
        let label = &self.labels[l];
        let succ = self.tableau.successors(&self.sets[q], &|a: &usize| label[*a]);
        let out: Vec<(usize, FixedBitSet)> = succ
            .into_iter()
            .map(|(c, acc)| (self.set(c), acc))
            .collect();
        self.moves.insert((q, l), out.clone());
        out
    }

    fn successors(&mut self, s: usize) -> Result<Vec<usize>, EngineError> {
        let (v, q, level) = self.states[s];
        let moves = self.tableau_moves(q, v);
        if moves.is_empty() {
            return Ok(Vec::new());
        }
        let next = self.node_successors(v)?;
        let base = if level == self.levels { 0 } else { level };
        let mut out = Vec::with_capacity(moves.len() * next.len());
        for (d, acc) in &moves {
            let mut j = base;
            while j < self.levels && acc.contains(j) {
                j += 1;
            }
            for &w in &next {
                out.push(self.state(w, *d, j)?);
            }
        }
        Ok(out)
    }

    fn accepting(&self, s: usize) -> bool {
        self.states[s].2 == self.levels
    }

    /// Nested depth-first search with cyan detection. Returns the product path
    /// and the index on it where the accepting cycle closes.
    fn blue(&mut self, root: usize) -> Result<Option<(Vec<usize>, usize)>, EngineError> {
        let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        self.color[root] = Color::Cyan;
        let succ = self.successors(root)?;
        stack.push((root, succ, 0));
        while let Some(top) = stack.last_mut() {
            let s = top.0;
            if top.2 < top.1.len() {
                let t = top.1[top.2];
                top.2 += 1;
                match self.color[t] {
                    Color::Cyan if self.accepting(s) || self.accepting(t) => {
                        let path: Vec<usize> = stack.iter().map(|f| f.0).collect();
                        let at = path.iter().position(|&x| x == t).unwrap();
                        return Ok(Some((path, at)));
                    }
                    Color::White => {
                        self.color[t] = Color::Cyan;
                        let succ = self.successors(t)?;
                        stack.push((t, succ, 0));
                    }
                    _ => {}
                }
                continue;
            }
            if self.accepting(s) {
                if let Some(red_path) = self.red_search(s)? {
                    let mut path: Vec<usize> = stack.iter().map(|f| f.0).collect();
                    let target = *red_path.last().unwrap();
                    let at = path.iter().position(|&x| x == target).unwrap();
                    path.extend(&red_path[..red_path.len() - 1]);
                    return Ok(Some((path, at)));
                }
            }
            self.color[s] = Color::Blue;
            stack.pop();
        }
        Ok(None)
    }

    /// Searches from the seed's successors for a cyan state. The returned
    /// path excludes the seed and ends at the cyan state.
    fn red_search(&mut self, seed: usize) -> Result<Option<Vec<usize>>, EngineError> {
        let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        let succ = self.successors(seed)?;
        stack.push((seed, succ, 0));
        while let Some(top) = stack.last_mut() {
            if top.2 >= top.1.len() {
                stack.pop();
                continue;
            }
            let t = top.1[top.2];
            top.2 += 1;
            if self.color[t] == Color::Cyan {
                let mut path: Vec<usize> = stack[1..].iter().map(|f| f.0).collect();
                path.push(t);
                return Ok(Some(path));
            }
            if self.color[t] == Color::Blue && !self.red[t] {
                self.red[t] = true;
                let succ = self.successors(t)?;
                stack.push((t, succ, 0));
            }
        }
        Ok(None)
    }

    /// Firing sequence of a product path whose last state steps back to `path[at]`.
    fn lasso(&self, path: &[usize], at: usize) -> Lasso {
        let nodes: Vec<&GraphNode> = path.iter().map(|&s| &self.nodes[self.states[s].0]).collect();
        let fired = |range: &[&GraphNode]| -> Vec<usize> {
            range.iter().filter_map(|n| n.ingoing).collect()
        };
        if let Some(f) = nodes.iter().position(|n| n.stopped) {
            return Lasso::stopped(fired(&nodes[1..f]));
        }
        let stem = fired(&nodes[1..=at]);
        let mut cycle = fired(&nodes[at + 1..]);
        cycle.push(nodes[at].ingoing.expect("cycles avoid the initial node"));
        Lasso { stem, cycle }
    }
}

/// Everything produced before the final LTL check.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub automata: Vec<FlowAutomaton>,
    pub mcnet: InhibitorNet,
    pub meta: ReductionMetadata,
    /// The LTL formula over macro atoms; see [`ReductionMetadata::macros`].
    pub formula: Ltl,
}

/// Steps 1 to 3: flow automata, composition and formula rewrite.
pub fn reduce(
    net: &PetriNetWithTransits,
    psi: &FlowCtlStar,
    opts: &CheckOptions,
) -> Result<Reduction, EngineError> {
    let subs = collect_flow_subformulas(psi);
    let build = |(i, s): (usize, &crate::logic::FlowSub)| {
        build_flow_automaton(net, s, opts.automaton_cap)
            .map_err(|source| EngineError::Automata { index: i, source })
    };
    let automata: Vec<FlowAutomaton> = if opts.workers > 1 && subs.len() > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .expect("thread pool");
        pool.install(|| subs.par_iter().enumerate().map(build).collect::<Result<_, _>>())?
    } else {
        subs.iter().enumerate().map(build).collect::<Result<_, _>>()?
    };
    let chains: Vec<_> = automata.iter().map(|a| a.chain_nba(net)).collect();
    let (mcnet, meta) = compose_mc_net(net, &chains)?;
    let formula = transform_formula_compact(psi, &meta)?;
    Ok(Reduction {
        automata,
        mcnet,
        meta,
        formula,
    })
}

/// Checks `net ⊨ psi`; witnesses are projected back to the input net.
pub fn check_flow_ctlstar(
    net: &PetriNetWithTransits,
    psi: &FlowCtlStar,
    opts: &CheckOptions,
) -> Result<Verdict, EngineError> {
    let start = Instant::now();
    let r = reduce(net, psi, opts)?;
    check_reduction(net, &r, opts).map(|mut v| {
        v.stats.elapsed = start.elapsed();
        v
    })
}

/// Step 4 on an existing reduction.
pub fn check_reduction(
    net: &PetriNetWithTransits,
    r: &Reduction,
    opts: &CheckOptions,
) -> Result<Verdict, EngineError> {
    let mut v = check_ltl_with(&r.mcnet, &r.formula, &r.meta.macros(), opts)?;
    v.stats.flow = r.automata.iter().map(|a| a.stats).collect();
    if let Some(w) = &mut v.witness {
        w.original = project(&r.mcnet, net, &w.composed);
        w.original.replay(net)?;
    }
    Ok(v)
}

/// Keeps the transitions of the input net; runs without any in their loop stop.
pub fn project(mcnet: &Net, net: &Net, lasso: &Lasso) -> Lasso {
    let map = |v: &[usize]| -> Vec<usize> {
        v.iter()
            .filter_map(|&t| net.transition_index(&mcnet.transitions()[t]))
            .collect()
    };
    let stem = map(&lasso.stem);
    let cycle = map(&lasso.cycle);
    if cycle.is_empty() {
        Lasso::stopped(stem)
    } else {
        Lasso { stem, cycle }
    }
}

/// Witness as text: a `stem:` and a `loop:` section, one transition per line.
pub fn witness_text(net: &Net, lasso: &Lasso) -> String {
    let mut out = String::from("stem:\n");
    for &t in &lasso.stem {
        let _ = writeln!(out, "  {}", net.transitions()[t]);
    }
    if lasso.is_stopped() {
        out.push_str("stop\n");
    } else {
        out.push_str("loop:\n");
        for &t in &lasso.cycle {
            let _ = writeln!(out, "  {}", net.transitions()[t]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_flow, parse_ltl};
    use crate::net::{parse_net_text, NetBuilder};

    fn dead() -> PetriNetWithTransits {
        let mut b = NetBuilder::new();
        b.place("p", true).place("q", false).transition("t");
        b.arc("q", "t");
        b.build_transits().unwrap()
    }

    #[test]
    fn dead_net() {
        let n = dead();
        let o = CheckOptions::default();
        assert!(check_ltl(&n, &parse_ltl("G p").unwrap(), &o).unwrap().holds);
        let v = check_ltl(&n, &parse_ltl("F t").unwrap(), &o).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness.unwrap().composed, Lasso::stopped(vec![]));
    }

    #[test]
    fn fairness_forces_evening() {
        let net = parse_net_text(crate::fixtures::FIG2_NET)
            .unwrap()
            .build_transits()
            .unwrap();
        let o = CheckOptions::default();
        let phi = parse_ltl("(F G (o_hk & hall & lab & kitchen) -> G F evening) -> F c_hk").unwrap();
        assert!(check_ltl(&net, &phi, &o).unwrap().holds);
        let v = check_ltl(&net, &parse_ltl("F c_hk").unwrap(), &o).unwrap();
        assert!(!v.holds);
    }

    #[test]
    fn flow_property_on_a_loop() {
        let mut b = NetBuilder::new();
        b.place("a", true).place("b", false);
        b.transition("go").arc("a", "go").arc("go", "b");
        b.transit("go", Some("a"), "b");
        b.transition("new").read_arc("a", "new").transit("new", None, "a");
        b.transit("new", Some("a"), "a");
        let net = b.build_transits().unwrap();
        let o = CheckOptions::default();
        let v = check_flow_ctlstar(&net, &parse_flow("A EF b").unwrap(), &o).unwrap();
        // a chain started by `new` can stay in a forever when go never fires
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(w.original.stem.iter().chain(&w.original.cycle).all(|&t| t < 2));
        let v = check_flow_ctlstar(&net, &parse_flow("A a").unwrap(), &o).unwrap();
        assert!(v.holds);
    }
}
