//! Nondeterministic Büchi automata with labelled edges.

use std::fmt::{self, Write};

/// Conjunction of literals over atoms of type `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard<A> {
    pub pos: Vec<A>,
    pub neg: Vec<A>,
}

impl<A: Clone + Ord> Guard<A> {
    pub fn top() -> Self {
        Guard {
            pos: Vec::new(),
            neg: Vec::new(),
        }
    }

    pub fn lit(a: A, positive: bool) -> Self {
        let mut g = Guard::top();
        if positive {
            g.pos.push(a);
        } else {
            g.neg.push(a);
        }
        g
    }

    /// Conjunction; `None` when contradictory.
    pub fn meet(&self, other: &Guard<A>) -> Option<Guard<A>> {
        let mut pos: Vec<A> = self.pos.iter().chain(&other.pos).cloned().collect();
        let mut neg: Vec<A> = self.neg.iter().chain(&other.neg).cloned().collect();
        pos.sort();
        pos.dedup();
        neg.sort();
        neg.dedup();
        if pos.iter().any(|a| neg.binary_search(a).is_ok()) {
            return None;
        }
        Some(Guard { pos, neg })
    }

    /// True if every literal of `self` occurs in `other`.
    pub fn weaker_than(&self, other: &Guard<A>) -> bool {
        self.pos.iter().all(|a| other.pos.binary_search(a).is_ok())
            && self.neg.iter().all(|a| other.neg.binary_search(a).is_ok())
    }

    pub fn holds(&self, mut val: impl FnMut(&A) -> bool) -> bool {
        self.pos.iter().all(&mut val) && !self.neg.iter().any(val)
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<A: fmt::Display> fmt::Display for Guard<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pos.is_empty() && self.neg.is_empty() {
            return write!(f, "true");
        }
        let lits: Vec<String> = self
            .pos
            .iter()
            .map(|a| a.to_string())
            .chain(self.neg.iter().map(|a| format!("!{a}")))
            .collect();
        write!(f, "{}", lits.join("&"))
    }
}

/// Büchi automaton with state-based acceptance.
#[derive(Debug, Clone)]
pub struct Nba<L> {
    pub initial: Vec<usize>,
    pub accepting: Vec<bool>,
    pub edges: Vec<Vec<(L, usize)>>,
    pub names: Vec<String>,
}

impl<L: Clone> Nba<L> {
    pub fn len(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accepting.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// States that can reach an accepting cycle.
    pub fn productive(&self) -> Vec<bool> {
        let n = self.len();
        let comp = scc(n, |v| self.edges[v].iter().map(|e| e.1).collect());
        let mut size = vec![0usize; n];
        for &c in &comp {
            size[c] += 1;
        }
        let mut good = vec![false; n];
        for v in 0..n {
            if self.accepting[v] {
                let cyclic =
                    size[comp[v]] > 1 || self.edges[v].iter().any(|e| e.1 == v);
                if cyclic {
                    good[v] = true;
                }
            }
        }
        // backward closure
        let mut rev = vec![Vec::new(); n];
        for v in 0..n {
            for e in &self.edges[v] {
                rev[e.1].push(v);
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| good[v]).collect();
        while let Some(v) = stack.pop() {
            for &u in &rev[v] {
                if !good[u] {
                    good[u] = true;
                    stack.push(u);
                }
            }
        }
        good
    }

    /// Drops states without an accepting future and unreachable states.
    /// Returns the new automaton and the old-to-new state map.
    pub fn trim(&self) -> (Nba<L>, Vec<Option<usize>>) {
        let good = self.productive();
        let mut order = Vec::new();
        let mut stack: Vec<usize> = self.initial.iter().copied().filter(|&v| good[v]).collect();
        stack.reverse();
        let mut seen = vec![false; self.len()];
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            order.push(v);
            for e in self.edges[v].iter().rev() {
                if good[e.1] && !seen[e.1] {
                    stack.push(e.1);
                }
            }
        }
        order.sort_unstable();
        let mut map = vec![None; self.len()];
        for (i, &v) in order.iter().enumerate() {
            map[v] = Some(i);
        }
        let nba = Nba {
            initial: self.initial.iter().filter_map(|&v| map[v]).collect(),
            accepting: order.iter().map(|&v| self.accepting[v]).collect(),
            edges: order
                .iter()
                .map(|&v| {
                    self.edges[v]
                        .iter()
                        .filter_map(|(l, d)| map[*d].map(|d| (l.clone(), d)))
                        .collect()
                })
                .collect(),
            names: order.iter().map(|&v| self.names[v].clone()).collect(),
        };
        (nba, map)
    }
}

impl Nba<usize> {
    /// Adds a rejecting sink so that every state has an edge for every letter.
    /// Returns the sink index.
    pub fn complete(&mut self, letters: usize) -> usize {
        let sink = self.len();
        self.accepting.push(false);
        self.names.push("sink".into());
        self.edges.push((0..letters).map(|l| (l, sink)).collect());
        for v in 0..sink {
            let mut has = vec![false; letters];
            for e in &self.edges[v] {
                has[e.0] = true;
            }
            for (l, h) in has.iter().enumerate() {
                if !h {
                    self.edges[v].push((l, sink));
                }
            }
            self.edges[v].sort_unstable();
        }
        sink
    }

    /// Whether the automaton accepts `stem · cycle^ω` (cycle non-empty).
    pub fn accepts(&self, stem: &[usize], cycle: &[usize]) -> bool {
        assert!(!cycle.is_empty());
        let word: Vec<usize> = stem.iter().chain(cycle).copied().collect();
        let len = word.len();
        let next = |i: usize| if i + 1 == len { stem.len() } else { i + 1 };
        // product graph over (state, position)
        let n = self.len() * len;
        let id = |q: usize, i: usize| q * len + i;
        let mut reach = vec![false; n];
        let mut stack: Vec<usize> = self.initial.iter().map(|&q| id(q, 0)).collect();
        for &v in &stack {
            reach[v] = true;
        }
        while let Some(v) = stack.pop() {
            let (q, i) = (v / len, v % len);
            for &(l, d) in &self.edges[q] {
                if l == word[i] {
                    let w = id(d, next(i));
                    if !reach[w] {
                        reach[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        let succ = |v: usize| -> Vec<usize> {
            let (q, i) = (v / len, v % len);
            self.edges[q]
                .iter()
                .filter(|e| e.0 == word[i])
                .map(|e| id(e.1, next(i)))
                .collect()
        };
        let comp = scc(n, succ);
        let mut size = vec![0usize; n];
        for &c in &comp {
            size[c] += 1;
        }
        (0..n).any(|v| {
            let (q, _) = (v / len, v % len);
            reach[v]
                && self.accepting[q]
                && (size[comp[v]] > 1 || succ(v).contains(&v))
        })
    }

    pub fn dump(&self, letter_names: &[String]) -> String {
        let mut out = String::from("format-version 1\n");
        for v in 0..self.len() {
            let mut flags = String::new();
            if self.initial.contains(&v) {
                flags.push_str(" initial");
            }
            if self.accepting[v] {
                flags.push_str(" accepting");
            }
            writeln!(out, "state {}{flags} labels={{}}", self.names[v]).unwrap();
        }
        for v in 0..self.len() {
            for (l, d) in &self.edges[v] {
                writeln!(
                    out,
                    "edge {} --{}--> {}",
                    self.names[v], letter_names[*l], self.names[*d]
                )
                .unwrap();
            }
        }
        out
    }
}

/// Tarjan's algorithm, iterative. Returns the component index of each vertex.
pub fn scc(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some((v, ws, i)) = call.last_mut() {
            let v = *v;
            if *i < ws.len() {
                let w = ws[*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    let next = succ(w);
                    call.push((w, next, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some((u, _, _)) = call.last() {
                    low[*u] = low[*u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}
