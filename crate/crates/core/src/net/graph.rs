use std::collections::VecDeque;

use rustc_hash::FxHashMap;
use thiserror::Error;

use super::{Marking, Net};

/// Outcome of the reachability-based safety check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SafetyReport {
    Safe { markings: usize },
    Violation { marking: Marking, transition: usize },
    CapExceeded { cap: usize },
}

/// Explores reachable markings and reports the first firing that would double a token.
pub fn validate_safe(net: &Net, cap: usize) -> SafetyReport {
    let mut seen: FxHashMap<Marking, ()> = FxHashMap::default();
    let mut queue = VecDeque::new();
    seen.insert(net.initial().clone(), ());
    queue.push_back(net.initial().clone());
    while let Some(m) = queue.pop_front() {
        for t in net.enabled(&m) {
            if net.fire_is_unsafe(&m, t) {
                return SafetyReport::Violation {
                    marking: m,
                    transition: t,
                };
            }
            let next = net.fire(&m, t);
            if !seen.contains_key(&next) {
                if seen.len() >= cap {
                    return SafetyReport::CapExceeded { cap };
                }
                seen.insert(next.clone(), ());
                queue.push_back(next);
            }
        }
    }
    SafetyReport::Safe {
        markings: seen.len(),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("marking graph exceeds {0} nodes")]
    CapExceeded(usize),
}

/// A node of the marking graph.
///
/// `stopped` nodes are reached through the stop edge and only loop on themselves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphNode {
    pub marking: Marking,
    pub ingoing: Option<usize>,
    pub stopped: bool,
}

impl GraphNode {
    pub fn initial(net: &Net) -> Self {
        GraphNode {
            marking: net.initial().clone(),
            ingoing: None,
            stopped: false,
        }
    }

    /// Successors: one per enabled transition, then the stop edge.
    pub fn successors(&self, net: &Net) -> Vec<GraphNode> {
        if self.stopped {
            return vec![self.clone()];
        }
        let mut out: Vec<GraphNode> = net
            .enabled(&self.marking)
            .map(|t| GraphNode {
                marking: net.fire(&self.marking, t),
                ingoing: Some(t),
                stopped: false,
            })
            .collect();
        out.push(GraphNode {
            marking: self.marking.clone(),
            ingoing: None,
            stopped: true,
        });
        out
    }
}

/// Explicit marking graph; node 0 is initial.
#[derive(Debug, Clone)]
pub struct MarkingGraph {
    pub nodes: Vec<GraphNode>,
    pub succ: Vec<Vec<usize>>,
}

impl MarkingGraph {
    /// Number of distinct reachable markings.
    pub fn marking_count(&self) -> usize {
        let mut ms: Vec<&Marking> = self.nodes.iter().map(|n| &n.marking).collect();
        ms.sort();
        ms.dedup();
        ms.len()
    }
}

pub fn marking_graph(net: &Net, cap: usize) -> Result<MarkingGraph, GraphError> {
    let mut index: FxHashMap<GraphNode, usize> = FxHashMap::default();
    let mut nodes = vec![GraphNode::initial(net)];
    let mut succ = Vec::new();
    index.insert(nodes[0].clone(), 0);
    let mut i = 0;
    while i < nodes.len() {
        let mut out = Vec::new();
        for n in nodes[i].successors(net) {
            let id = match index.get(&n) {
                Some(&id) => id,
                None => {
                    if nodes.len() >= cap {
                        return Err(GraphError::CapExceeded(cap));
                    }
                    index.insert(n.clone(), nodes.len());
                    nodes.push(n);
                    nodes.len() - 1
                }
            };
            out.push(id);
        }
        succ.push(out);
        i += 1;
    }
    Ok(MarkingGraph { nodes, succ })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::NetBuilder;

    #[test]
    fn detects_unsafe_firing() {
        let mut b = NetBuilder::new();
        b.place("a", true).place("b", true).transition("t");
        b.arc("a", "t").arc("t", "b");
        let n = b.build_transits().unwrap();
        assert!(matches!(
            validate_safe(&n, 100),
            SafetyReport::Violation { transition: 0, .. }
        ));
    }

    #[test]
    fn stop_edges_are_closed() {
        let mut b = NetBuilder::new();
        b.place("a", true).transition("t");
        b.read_arc("a", "t");
        let n = b.build_transits().unwrap();
        assert_eq!(validate_safe(&n, 10), SafetyReport::Safe { markings: 1 });
        let g = marking_graph(&n, 100).unwrap();
        // initial, after t, and the stopped node
        assert_eq!(g.nodes.len(), 3);
        for (i, node) in g.nodes.iter().enumerate() {
            if node.stopped {
                assert_eq!(g.succ[i], vec![i]);
            } else {
                assert!(g.succ[i].iter().any(|&j| g.nodes[j].stopped));
            }
        }
        assert_eq!(g.marking_count(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        let mut b = NetBuilder::new();
        b.place("a", true).place("b", false).transition("t").transition("u");
        b.arc("a", "t").arc("t", "b").arc("b", "u").arc("u", "a");
        let n = b.build_transits().unwrap();
        assert_eq!(marking_graph(&n, 2).unwrap_err(), GraphError::CapExceeded(2));
    }
}
