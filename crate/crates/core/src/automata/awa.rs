//! Alternating word automata over run letters.
//!
//! The product of a tree automaton with the chain structure reads one letter
//! per chain step. `to_buchi` turns the hesitant condition into a Büchi one
//! and `lift` makes the automaton read every transition of the run, including
//! those that leave the chain untouched.

use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use super::ata::{Ata, Mode};
use super::game::{ParityGame, Player};
use super::nba::scc;
use super::pbf::Pbf;
use super::AutomataError;
use crate::kripke::ChainKripke;
use crate::net::Net;

/// Assigns consecutive indices to keys and queues new ones.
struct Interner<K> {
    index: FxHashMap<K, usize>,
    items: Vec<K>,
    queue: VecDeque<usize>,
}

impl<K> Default for Interner<K> {
    fn default() -> Self {
        Interner {
            index: FxHashMap::default(),
            items: Vec::new(),
            queue: VecDeque::new(),
        }
    }
}

impl<K: Copy + Eq + std::hash::Hash> Interner<K> {
    fn id(&mut self, k: K) -> usize {
        if let Some(&i) = self.index.get(&k) {
            return i;
        }
        let i = self.items.len();
        self.index.insert(k, i);
        self.items.push(k);
        self.queue.push_back(i);
        i
    }
}

#[derive(Debug, Clone)]
pub enum Acceptance {
    /// Layered condition: `flag` marks Büchi states of existential layers
    /// and co-Büchi states of universal layers.
    Hesitant {
        layer: Vec<usize>,
        mode: Vec<Mode>,
        flag: Vec<bool>,
    },
    Buchi(Vec<bool>),
}

/// `delta[x][letter]` is `None` when the letter does not move the chain.
#[derive(Debug, Clone)]
pub struct Awa {
    pub names: Vec<String>,
    pub place: Vec<usize>,
    pub initial: Vec<usize>,
    pub delta: Vec<Vec<Option<Pbf<usize>>>>,
    pub acceptance: Acceptance,
}

impl Awa {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn letters(&self) -> usize {
        self.delta.first().map_or(0, Vec::len)
    }

    pub fn is_accepting(&self, x: usize) -> bool {
        match &self.acceptance {
            Acceptance::Buchi(acc) => acc[x],
            Acceptance::Hesitant { .. } => self.priority(x) == 2,
        }
    }

    /// Max-parity priority of a state.
    pub fn priority(&self, x: usize) -> u8 {
        match &self.acceptance {
            Acceptance::Buchi(acc) => {
                if acc[x] {
                    2
                } else {
                    1
                }
            }
            Acceptance::Hesitant { mode, flag, .. } => match (mode[x], flag[x]) {
                (Mode::Existential, true) => 2,
                (Mode::Existential, false) => 1,
                (Mode::Universal, true) => 1,
                (Mode::Universal, false) => 0,
            },
        }
    }

    /// Acceptance of `stem · cycle^ω` from each state in `from`.
    /// Letters without a transition are treated as `false`.
    pub fn accepts_from(&self, from: &[usize], stem: &[usize], cycle: &[usize]) -> Vec<bool> {
        assert!(!cycle.is_empty());
        let word: Vec<usize> = stem.iter().chain(cycle).copied().collect();
        let len = word.len();
        let next = |i: usize| if i + 1 == len { stem.len() } else { i + 1 };
        let mut g = ParityGame::default();
        let win = g.add(Player::Even, 0);
        let lose = g.add(Player::Even, 1);
        g.succ[win] = vec![win];
        g.succ[lose] = vec![lose];
        let mut index: FxHashMap<(usize, usize), usize> = FxHashMap::default();
        let mut queue = VecDeque::new();
        let mut node = |g: &mut ParityGame, queue: &mut VecDeque<(usize, usize)>, x: usize, i: usize| {
            *index.entry((x, i)).or_insert_with(|| {
                queue.push_back((x, i));
                g.add(Player::Even, self.priority(x))
            })
        };
        let roots: Vec<usize> = from.iter().map(|&x| node(&mut g, &mut queue, x, 0)).collect();
        while let Some((x, i)) = queue.pop_front() {
            let v = node(&mut g, &mut queue, x, i);
            let d = self.delta[x][word[i]].clone().unwrap_or(Pbf::False);
            let models = d.minimal_models();
            if models.is_empty() {
                g.succ[v].push(lose);
            }
            for m in models {
                if m.is_empty() {
                    g.succ[v].push(win);
                    continue;
                }
                let a = g.add(Player::Odd, 0);
                g.succ[v].push(a);
                for y in m {
                    let w = node(&mut g, &mut queue, y, next(i));
                    g.succ[a].push(w);
                }
            }
        }
        let won = g.solve();
        roots.iter().map(|&r| won[r]).collect()
    }

    pub fn accepts(&self, stem: &[usize], cycle: &[usize]) -> Vec<bool> {
        self.accepts_from(&self.initial, stem, cycle)
    }
}

/// Product of the tree automaton with the chain structure, one initial
/// state per initial chain state.
pub fn product_awa(ata: &Ata, k: &ChainKripke, cap: usize) -> Result<Awa, AutomataError> {
    let letters = k.letters();
    let mut pairs = Interner::default();
    let initial: Vec<usize> = k.initial.iter().map(|&s| pairs.id((ata.initial, s))).collect();
    let mut delta: Vec<Vec<Option<Pbf<usize>>>> = Vec::new();
    while let Some(x) = pairs.queue.pop_front() {
        if pairs.items.len() > cap {
            return Err(AutomataError::TooLarge {
                stage: "alternating product",
                cap,
            });
        }
        let (q, s) = pairs.items[x];
        let mut row = Vec::with_capacity(letters);
        for l in 0..letters {
            let kids = k.succ(s, l);
            if kids.is_empty() {
                row.push(None);
                continue;
            }
            let d = ata.delta(q, k.label(s), kids.len())?;
            let d = d.map(&mut |&(c, q2)| Pbf::Atom(pairs.id((q2, kids[c]))));
            row.push(Some(d));
        }
        debug_assert_eq!(delta.len(), x);
        delta.push(row);
    }
    let pairs = pairs.items;
    let names = pairs
        .iter()
        .map(|&(q, s)| format!("<{},{}>", ata.states[q].name, k.name(s)))
        .collect();
    let place = pairs.iter().map(|&(_, s)| k.states[s].place).collect();
    Ok(Awa {
        names,
        place,
        initial,
        delta,
        acceptance: Acceptance::Hesitant {
            layer: pairs.iter().map(|&(q, _)| ata.states[q].layer).collect(),
            mode: pairs.iter().map(|&(q, _)| ata.states[q].mode).collect(),
            flag: pairs.iter().map(|&(q, _)| ata.states[q].flag).collect(),
        },
    })
}

/// Büchi automaton for a hesitant one. Strongly connected components of
/// universal layers that mix co-Büchi and other states get ranks `0..=2m`,
/// `m` being the component size.
pub fn to_buchi(awa: &Awa, cap: usize) -> Result<Awa, AutomataError> {
    let Acceptance::Hesitant { mode, flag, .. } = &awa.acceptance else {
        return Ok(awa.clone());
    };
    let n = awa.len();
    // a path eventually stays in one component, so ranks are per component
    let layer = scc(n, |x| {
        awa.delta[x]
            .iter()
            .flatten()
            .flat_map(|d| d.atoms())
            .collect()
    });
    let layers = layer.iter().copied().max().map_or(0, |m| m + 1);
    let mut size = vec![0usize; layers];
    let mut bad = vec![0usize; layers];
    let mut universal = vec![false; layers];
    for x in 0..n {
        size[layer[x]] += 1;
        if flag[x] {
            bad[layer[x]] += 1;
        }
        universal[layer[x]] |= mode[x] == Mode::Universal;
    }
    // maximal rank per layer for ranked layers
    let ranked: Vec<Option<usize>> = (0..layers)
        .map(|l| (universal[l] && bad[l] > 0 && bad[l] < size[l]).then_some(2 * size[l]))
        .collect();
    let allowed = |x: usize, r: usize| !(flag[x] && r % 2 == 1);

    let mut states: Interner<(usize, Option<usize>)> = Interner::default();
    let entry = |states: &mut Interner<_>, y: usize, bound: Option<usize>| -> Pbf<usize> {
        match ranked[layer[y]] {
            None => Pbf::Atom(states.id((y, None))),
            Some(top) => {
                let top = bound.unwrap_or(top);
                Pbf::or_all(
                    (0..=top)
                        .filter(|&r| allowed(y, r))
                        .map(|r| Pbf::Atom(states.id((y, Some(r)))))
                        .collect::<Vec<_>>(),
                )
            }
        }
    };
    let mut initial = Vec::new();
    for &x in &awa.initial {
        match ranked[layer[x]] {
            None => initial.push(states.id((x, None))),
            Some(top) => {
                let r = if allowed(x, top) { top } else { top - 1 };
                initial.push(states.id((x, Some(r))));
            }
        }
    }
    let mut delta = Vec::new();
    while let Some(i) = states.queue.pop_front() {
        if states.items.len() > cap {
            return Err(AutomataError::TooLarge {
                stage: "Büchi conversion",
                cap,
            });
        }
        let (x, r) = states.items[i];
        let row: Vec<Option<Pbf<usize>>> = awa.delta[x]
            .iter()
            .map(|d| {
                d.as_ref().map(|d| {
                    d.map(&mut |&y| {
                        let bound = if layer[y] == layer[x] { r } else { None };
                        entry(&mut states, y, bound)
                    })
                })
            })
            .collect();
        debug_assert_eq!(delta.len(), i);
        delta.push(row);
    }
    let states = states.items;
    let accepting = states
        .iter()
        .map(|&(x, r)| match r {
            Some(r) => r % 2 == 1,
            None => match mode[x] {
                Mode::Existential => flag[x],
                Mode::Universal => bad[layer[x]] == 0,
            },
        })
        .collect();
    let names = states
        .iter()
        .map(|&(x, r)| match r {
            Some(r) => format!("{}^{r}", awa.names[x]),
            None => awa.names[x].clone(),
        })
        .collect();
    Ok(Awa {
        names,
        place: states.iter().map(|&(x, _)| awa.place[x]).collect(),
        initial,
        delta,
        acceptance: Acceptance::Buchi(accepting),
    })
}

/// For every state, whether the automaton accepts `hash^ω` from it.
pub fn stutter_acceptance(awa: &Awa, hash: usize) -> Vec<bool> {
    let all: Vec<usize> = (0..awa.len()).collect();
    awa.accepts_from(&all, &[], &[hash])
}

/// Makes a Büchi automaton read every transition of `net`.
///
/// State `x` becomes `3x` (itself), `3x+1` (waiting, non-accepting) and
/// `3x+2` (the chain never moves again).
pub fn lift(abw: &Awa, net: &Net) -> Awa {
    let n = abw.len();
    let letters = net.transitions().len() + 1;
    debug_assert!(abw.is_empty() || abw.letters() == letters);
    let hash = letters - 1;
    let stutter = stutter_acceptance(abw, hash);
    let consumes = |l: usize, p: usize| l != hash && net.pre(l).contains(&p);
    let mut delta = Vec::with_capacity(3 * n);
    let mut names = Vec::with_capacity(3 * n);
    let mut accepting = Vec::with_capacity(3 * n);
    for x in 0..n {
        let p = abw.place[x];
        let row: Vec<Option<Pbf<usize>>> = (0..letters)
            .map(|l| {
                Some(match &abw.delta[x][l] {
                    Some(d) => d.map(&mut |&y| Pbf::Atom(3 * y)),
                    None if consumes(l, p) => Pbf::constant(stutter[x]),
                    None => Pbf::or(
                        Pbf::Atom(3 * x + 1),
                        if stutter[x] { Pbf::Atom(3 * x + 2) } else { Pbf::False },
                    ),
                })
            })
            .collect();
        let forever: Vec<Option<Pbf<usize>>> = (0..letters)
            .map(|l| {
                Some(if l == hash || consumes(l, p) && abw.delta[x][l].is_none() {
                    Pbf::True
                } else if abw.delta[x][l].is_some() {
                    Pbf::False
                } else {
                    Pbf::Atom(3 * x + 2)
                })
            })
            .collect();
        delta.push(row.clone());
        delta.push(row);
        delta.push(forever);
        names.push(abw.names[x].clone());
        names.push(format!("{}~w", abw.names[x]));
        names.push(format!("{}~inf", abw.names[x]));
        accepting.extend([abw.is_accepting(x), false, true]);
    }
    Awa {
        names,
        place: abw.place.iter().flat_map(|&p| [p, p, p]).collect(),
        initial: abw.initial.iter().map(|&x| 3 * x).collect(),
        delta,
        acceptance: Acceptance::Buchi(accepting),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn buchi(delta: Vec<Vec<Pbf<usize>>>, acc: Vec<bool>) -> Awa {
        let n = acc.len();
        Awa {
            names: (0..n).map(|i| i.to_string()).collect(),
            place: vec![0; n],
            initial: vec![0],
            delta: delta.into_iter().map(|r| r.into_iter().map(Some).collect()).collect(),
            acceptance: Acceptance::Buchi(acc),
        }
    }

    #[test]
    fn universal_buchi_needs_all_branches() {
        // letters a=0, b=1; state 0 on a splits into 0 and 1; 1 requires b next
        let a = buchi(
            vec![
                vec![Pbf::and(Pbf::Atom(0), Pbf::Atom(1)), Pbf::Atom(0)],
                vec![Pbf::False, Pbf::True],
            ],
            vec![true, false],
        );
        assert_eq!(a.accepts(&[], &[0, 1]), vec![true]);
        assert_eq!(a.accepts(&[], &[0]), vec![false]);
        assert_eq!(a.accepts(&[0, 1], &[1]), vec![true]);
    }

    #[test]
    fn hesitant_universal_layer() {
        // one universal co-Büchi state looping on every letter
        let a = Awa {
            names: vec!["u".into()],
            place: vec![0],
            initial: vec![0],
            delta: vec![vec![Some(Pbf::Atom(0)), Some(Pbf::True)]],
            acceptance: Acceptance::Hesitant {
                layer: vec![0],
                mode: vec![Mode::Universal],
                flag: vec![true],
            },
        };
        assert_eq!(a.accepts(&[], &[0]), vec![false]);
        assert_eq!(a.accepts(&[0, 0], &[1]), vec![true]);
        let b = to_buchi(&a, 100).unwrap();
        assert_eq!(b.accepts(&[], &[0]), vec![false]);
        assert_eq!(b.accepts(&[0, 0], &[1]), vec![true]);
    }
}
