//! Bounded brute-force semantics, independent of the automata stack.
//!
//! Runs are enumerated as lassos up to a length bound. Run-level LTL is
//! evaluated directly on the lasso; flow subformulas (CTL only) are labelled
//! on the finite graph of flow chains of the run.

use std::collections::VecDeque;
use std::fmt;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::logic::{FlowCtlStar, Ltl, PNnf, SNnf, StateF};
use crate::net::{Lasso, Net, PetriNetWithTransits, ReplayError, Trace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("the oracle only supports CTL flow subformulas, got `{0}`")]
    Unsupported(String),
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

/// All lassos and stopped runs with at most `k` transitions, in a fixed
/// order: shorter firing sequences first, then by transition index.
pub fn enumerate_lassos(net: &Net, k: usize) -> Vec<Lasso> {
    let mut out = Vec::new();
    let mut layer = vec![(Vec::<usize>::new(), vec![net.initial().clone()])];
    for len in 0..=k {
        let mut next = Vec::new();
        for (seq, ms) in &layer {
            let last = &ms[len];
            for j in 0..len {
                if ms[j] == *last {
                    out.push(Lasso {
                        stem: seq[..j].to_vec(),
                        cycle: seq[j..].to_vec(),
                    });
                }
            }
            out.push(Lasso::stopped(seq.clone()));
            if len < k {
                for t in net.enabled(last) {
                    let mut s = seq.clone();
                    s.push(t);
                    let mut m = ms.clone();
                    m.push(net.fire(last, t));
                    next.push((s, m));
                }
            }
        }
        layer = next;
    }
    out
}

/// Truth values of `phi` at every position of an ultimately periodic word.
pub fn eval_ltl_positions(
    phi: &Ltl,
    len: usize,
    next: &impl Fn(usize) -> usize,
    atom: &impl Fn(usize, &str) -> bool,
) -> Vec<bool> {
    match phi {
        Ltl::True => vec![true; len],
        Ltl::Atom(a) => (0..len).map(|i| atom(i, a)).collect(),
        Ltl::Not(a) => eval_ltl_positions(a, len, next, atom)
            .into_iter()
            .map(|b| !b)
            .collect(),
        Ltl::And(a, b) => {
            let (x, y) = (
                eval_ltl_positions(a, len, next, atom),
                eval_ltl_positions(b, len, next, atom),
            );
            x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
        }
        Ltl::Next(a) => {
            let x = eval_ltl_positions(a, len, next, atom);
            (0..len).map(|i| x[next(i)]).collect()
        }
        Ltl::Until(a, b) => {
            let (x, y) = (
                eval_ltl_positions(a, len, next, atom),
                eval_ltl_positions(b, len, next, atom),
            );
            let mut v = y.clone();
            // least fixpoint; each pass propagates one step backwards
            loop {
                let mut changed = false;
                for i in (0..len).rev() {
                    if !v[i] && x[i] && v[next(i)] {
                        v[i] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            v
        }
    }
}

/// Whether `phi` holds at the first position of `trace`.
pub fn eval_ltl_on_lasso(phi: &Ltl, trace: &Trace, net: &Net) -> bool {
    let atom = |i: usize, a: &str| {
        let s = &trace.states[i];
        net.atom(a).holds(&s.marking, s.ingoing)
    };
    eval_ltl_positions(phi, trace.len(), &|i| trace.next(i), &atom)[0]
}

/// A chain position. Stutter nodes have neither position nor transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainNode {
    pub position: Option<usize>,
    pub transition: Option<usize>,
    pub place: usize,
}

/// The flow chains of one run, folded over the lasso.
#[derive(Debug, Clone, Default)]
pub struct ChainGraph {
    pub nodes: Vec<ChainNode>,
    pub succ: Vec<Vec<usize>>,
    pub roots: Vec<usize>,
}

impl ChainGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Whether atom `a` holds at node `v`.
    pub fn holds(&self, net: &Net, v: usize, a: &str) -> bool {
        let n = &self.nodes[v];
        net.places()[n.place] == a || n.transition.is_some_and(|t| net.transitions()[t] == a)
    }

    pub fn node_name(&self, net: &Net, v: usize) -> String {
        let n = &self.nodes[v];
        match (n.transition, n.position) {
            (Some(t), Some(i)) => format!("({}, {}@{i})", net.transitions()[t], net.places()[n.place]),
            _ => format!("(stutter, {})", net.places()[n.place]),
        }
    }
}

pub fn chain_graph(net: &PetriNetWithTransits, lasso: &Lasso) -> Result<ChainGraph, ReplayError> {
    let trace = lasso.trace(net)?;
    let mut g = ChainGraph::default();
    let mut index: FxHashMap<ChainNode, usize> = FxHashMap::default();
    let mut queue = VecDeque::new();
    let mut id = |g: &mut ChainGraph, queue: &mut VecDeque<usize>, n: ChainNode| {
        *index.entry(n).or_insert_with(|| {
            g.nodes.push(n);
            g.succ.push(Vec::new());
            queue.push_back(g.nodes.len() - 1);
            g.nodes.len() - 1
        })
    };
    for i in 1..trace.len() {
        if let Some(t) = trace.states[i].ingoing {
            for q in net.transit_targets(t, None) {
                let r = id(&mut g, &mut queue, ChainNode {
                    position: Some(i),
                    transition: Some(t),
                    place: q,
                });
                if !g.roots.contains(&r) {
                    g.roots.push(r);
                }
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        let n = g.nodes[v];
        let stutter = ChainNode {
            position: None,
            transition: None,
            place: n.place,
        };
        let Some(mut cur) = n.position else {
            g.succ[v] = vec![v];
            continue;
        };
        let mut seen = vec![false; trace.len()];
        let mut out = Vec::new();
        loop {
            if seen[cur] {
                break;
            }
            seen[cur] = true;
            let nxt = trace.next(cur);
            let Some(t) = trace.states[nxt].ingoing else {
                break;
            };
            if net.pre(t).contains(&n.place) {
                for q in net.transit_targets(t, Some(n.place)) {
                    out.push(ChainNode {
                        position: Some(nxt),
                        transition: Some(t),
                        place: q,
                    });
                }
                break;
            }
            cur = nxt;
        }
        if out.is_empty() {
            out.push(stutter);
        }
        let ids = out.into_iter().map(|m| id(&mut g, &mut queue, m)).collect();
        g.succ[v] = ids;
    }
    Ok(g)
}

fn ctl_nnf(phi: &StateF) -> Result<SNnf, OracleError> {
    let f = SNnf::from_state(phi, false);
    if f.is_ctl() {
        Ok(f)
    } else {
        Err(OracleError::Unsupported(phi.to_string()))
    }
}

/// CTL labelling of every node.
pub fn label_ctl(phi: &StateF, g: &ChainGraph, net: &Net) -> Result<Vec<bool>, OracleError> {
    Ok(label(&ctl_nnf(phi)?, g, net))
}

/// Truth value of a CTL formula at every root.
pub fn eval_ctl_on_chain_graph(phi: &StateF, g: &ChainGraph, net: &Net) -> Result<Vec<bool>, OracleError> {
    let all = label_ctl(phi, g, net)?;
    Ok(g.roots.iter().map(|&r| all[r]).collect())
}

fn label(f: &SNnf, g: &ChainGraph, net: &Net) -> Vec<bool> {
    let n = g.len();
    let state = |p: &PNnf| match p {
        PNnf::State(s) => label(s, g, net),
        _ => unreachable!("not CTL"),
    };
    let pre = |v: &[bool], universal: bool| -> Vec<bool> {
        (0..n)
            .map(|u| {
                if universal {
                    g.succ[u].iter().all(|&w| v[w])
                } else {
                    g.succ[u].iter().any(|&w| v[w])
                }
            })
            .collect()
    };
    let fix = |a: &[bool], b: &[bool], universal: bool, until: bool| -> Vec<bool> {
        let mut v = vec![!until; n];
        loop {
            let x = pre(&v, universal);
            let nv: Vec<bool> = (0..n)
                .map(|u| {
                    if until {
                        b[u] || a[u] && x[u]
                    } else {
                        b[u] && (a[u] || x[u])
                    }
                })
                .collect();
            if nv == v {
                return v;
            }
            v = nv;
        }
    };
    match f {
        SNnf::True => vec![true; n],
        SNnf::False => vec![false; n],
        SNnf::Lit(a, pos) => (0..n).map(|v| g.holds(net, v, a) == *pos).collect(),
        SNnf::And(a, b) => {
            let (x, y) = (label(a, g, net), label(b, g, net));
            x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
        }
        SNnf::Or(a, b) => {
            let (x, y) = (label(a, g, net), label(b, g, net));
            x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
        }
        SNnf::E(p) | SNnf::A(p) => {
            let universal = matches!(f, SNnf::A(_));
            match p.as_ref() {
                PNnf::State(s) => label(s, g, net),
                PNnf::Next(a) => pre(&state(a), universal),
                PNnf::Until(a, b) => fix(&state(a), &state(b), universal, true),
                PNnf::Release(a, b) => fix(&state(a), &state(b), universal, false),
                _ => unreachable!("not CTL"),
            }
        }
    }
}

/// Plain recursive CTL evaluation at one node, used to confirm labellings.
pub fn eval_ctl_recursive(phi: &StateF, g: &ChainGraph, net: &Net, v: usize) -> Result<bool, OracleError> {
    Ok(rec(&ctl_nnf(phi)?, g, net, v))
}

fn rec(f: &SNnf, g: &ChainGraph, net: &Net, v: usize) -> bool {
    match f {
        SNnf::True => true,
        SNnf::False => false,
        SNnf::Lit(a, pos) => g.holds(net, v, a) == *pos,
        SNnf::And(a, b) => rec(a, g, net, v) && rec(b, g, net, v),
        SNnf::Or(a, b) => rec(a, g, net, v) || rec(b, g, net, v),
        SNnf::E(p) | SNnf::A(p) => {
            let universal = matches!(f, SNnf::A(_));
            let st = |p: &PNnf| match p {
                PNnf::State(s) => (**s).clone(),
                _ => unreachable!("not CTL"),
            };
            match p.as_ref() {
                PNnf::State(s) => rec(s, g, net, v),
                PNnf::Next(a) => {
                    let a = st(a);
                    let mut kids = g.succ[v].iter().map(|&w| rec(&a, g, net, w));
                    if universal {
                        kids.all(|b| b)
                    } else {
                        kids.any(|b| b)
                    }
                }
                PNnf::Until(a, b) => path(&st(a), &st(b), universal, true, g, net, v, &mut Vec::new()),
                PNnf::Release(a, b) => path(&st(a), &st(b), universal, false, g, net, v, &mut Vec::new()),
                _ => unreachable!("not CTL"),
            }
        }
    }
}

/// Depth-first unfolding of `a U b` / `a R b`; revisiting a node on the
/// current path closes a loop, which refutes until and satisfies release.
#[allow(clippy::too_many_arguments)]
fn path(a: &SNnf, b: &SNnf, universal: bool, until: bool, g: &ChainGraph, net: &Net, v: usize, stack: &mut Vec<usize>) -> bool {
    if stack.contains(&v) {
        return !until;
    }
    let hb = rec(b, g, net, v);
    let ha = rec(a, g, net, v);
    if until {
        if hb {
            return true;
        }
        if !ha {
            return false;
        }
    } else {
        if !hb {
            return false;
        }
        if ha {
            return true;
        }
    }
    stack.push(v);
    let mut any = false;
    let mut all = true;
    for &w in &g.succ[v] {
        let r = path(a, b, universal, until, g, net, w, stack);
        any |= r;
        all &= r;
    }
    stack.pop();
    if universal {
        all
    } else {
        any
    }
}

/// Evaluates a Flow-CTL* formula on one run.
pub fn eval_flow_on_lasso(net: &PetriNetWithTransits, psi: &FlowCtlStar, lasso: &Lasso) -> Result<bool, OracleError> {
    let trace = lasso.trace(net)?;
    let graph = chain_graph(net, lasso)?;
    eval_run(net, psi, &trace, &graph)
}

fn eval_run(net: &PetriNetWithTransits, psi: &FlowCtlStar, trace: &Trace, g: &ChainGraph) -> Result<bool, OracleError> {
    Ok(match psi {
        FlowCtlStar::Ltl(f) => eval_ltl_on_lasso(f, trace, net),
        FlowCtlStar::And(a, b) => eval_run(net, a, trace, g)? && eval_run(net, b, trace, g)?,
        FlowCtlStar::Or(a, b) => eval_run(net, a, trace, g)? || eval_run(net, b, trace, g)?,
        FlowCtlStar::Implies(a, b) => !eval_ltl_on_lasso(a, trace, net) || eval_run(net, b, trace, g)?,
        FlowCtlStar::Flow(phi) => eval_ctl_on_chain_graph(phi, g, net)?.into_iter().all(|b| b),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    NoViolationUpTo(usize),
    Violation(Lasso),
}

impl fmt::Display for OracleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleVerdict::NoViolationUpTo(k) => write!(f, "no violation up to bound {k}"),
            OracleVerdict::Violation(_) => write!(f, "violation"),
        }
    }
}

/// First violating run in enumeration order, if any.
pub fn oracle_check(net: &PetriNetWithTransits, psi: &FlowCtlStar, k: usize) -> Result<OracleVerdict, OracleError> {
    let check = |f: &StateF| ctl_nnf(f).map(|_| ());
    check_fragment(psi, &check)?;
    for lasso in enumerate_lassos(net, k) {
        if !eval_flow_on_lasso(net, psi, &lasso)? {
            return Ok(OracleVerdict::Violation(lasso));
        }
    }
    Ok(OracleVerdict::NoViolationUpTo(k))
}

fn check_fragment(psi: &FlowCtlStar, check: &impl Fn(&StateF) -> Result<(), OracleError>) -> Result<(), OracleError> {
    match psi {
        FlowCtlStar::Ltl(_) => Ok(()),
        FlowCtlStar::And(a, b) | FlowCtlStar::Or(a, b) => {
            check_fragment(a, check)?;
            check_fragment(b, check)
        }
        FlowCtlStar::Implies(_, b) => check_fragment(b, check),
        FlowCtlStar::Flow(phi) => check(phi),
    }
}

/// Like [`oracle_check`] for pure LTL, over the plain net.
pub fn oracle_check_ltl(net: &Net, phi: &Ltl, k: usize) -> OracleVerdict {
    for lasso in enumerate_lassos(net, k) {
        let trace = lasso.trace(net).expect("enumerated lassos replay");
        if !eval_ltl_on_lasso(phi, &trace, net) {
            return OracleVerdict::Violation(lasso);
        }
    }
    OracleVerdict::NoViolationUpTo(k)
}
