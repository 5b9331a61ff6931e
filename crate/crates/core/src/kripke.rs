//! The chain Kripke structure: one state per place a flow chain can occupy,
//! optionally paired with the transition that moved it there.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::net::PetriNetWithTransits;

/// Maximum number of atomic propositions in a label bitmask.
pub const MAX_AP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KripkeError {
    #[error("at most {MAX_AP} atomic propositions are supported, got {0}")]
    TooManyAtoms(usize),
}

/// A chain position: a place, possibly tagged with its ingoing transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KState {
    pub transition: Option<usize>,
    pub place: usize,
}

/// Letters are transition indices; `hash()` is the stutter letter.
#[derive(Debug, Clone)]
pub struct ChainKripke {
    pub ap: Vec<String>,
    pub states: Vec<KState>,
    pub initial: Vec<usize>,
    labels: Vec<u64>,
    succ: Vec<Vec<Vec<usize>>>,
    names: Vec<String>,
    letter_names: Vec<String>,
}

impl ChainKripke {
    pub fn build(
        net: &PetriNetWithTransits,
        ap: &BTreeSet<String>,
    ) -> Result<ChainKripke, KripkeError> {
        if ap.len() > MAX_AP {
            return Err(KripkeError::TooManyAtoms(ap.len()));
        }
        let ap: Vec<String> = ap.iter().cloned().collect();
        let in_ap = |name: &str| ap.iter().any(|a| a == name);
        let nt = net.transitions().len();
        let tagged: Vec<bool> = net.transitions().iter().map(|t| in_ap(t)).collect();
        let lift = |t: usize, q: usize| KState {
            transition: tagged[t].then_some(t),
            place: q,
        };
        let name_of = |s: &KState| match s.transition {
            Some(t) => format!("({},{})", net.transitions()[t], net.places()[s.place]),
            None => net.places()[s.place].clone(),
        };

        let mut initial_states = BTreeSet::new();
        for t in 0..nt {
            for q in net.transit_targets(t, None) {
                initial_states.insert(lift(t, q));
            }
        }
        let mut sorted_initial: Vec<KState> = initial_states.into_iter().collect();
        sorted_initial.sort_by_key(|s| name_of(s));

        let mut index: FxHashMap<KState, usize> = FxHashMap::default();
        let mut states = Vec::new();
        let mut queue = VecDeque::new();
        for s in &sorted_initial {
            index.insert(*s, states.len());
            states.push(*s);
            queue.push_back(*s);
        }
        let mut raw_succ: Vec<Vec<Vec<KState>>> = Vec::new();
        while let Some(s) = queue.pop_front() {
            let mut by_letter = Vec::with_capacity(nt + 1);
            for t in 0..nt {
                let mut out: Vec<KState> = net
                    .transit_targets(t, Some(s.place))
                    .into_iter()
                    .map(|q| lift(t, q))
                    .collect();
                out.sort_by_key(|s| name_of(s));
                by_letter.push(out);
            }
            by_letter.push(vec![KState {
                transition: None,
                place: s.place,
            }]);
            for out in &by_letter {
                for n in out {
                    if !index.contains_key(n) {
                        index.insert(*n, states.len());
                        states.push(*n);
                        queue.push_back(*n);
                    }
                }
            }
            raw_succ.push(by_letter);
        }
        let succ = raw_succ
            .into_iter()
            .map(|by| {
                by.into_iter()
                    .map(|out| out.iter().map(|s| index[s]).collect())
                    .collect()
            })
            .collect();
        let labels = states
            .iter()
            .map(|s| {
                let mut m = 0u64;
                for (i, a) in ap.iter().enumerate() {
                    let hit = *a == net.places()[s.place]
                        || s.transition.is_some_and(|t| *a == net.transitions()[t]);
                    if hit {
                        m |= 1 << i;
                    }
                }
                m
            })
            .collect();
        let names = states.iter().map(name_of).collect();
        let initial = sorted_initial.iter().map(|s| index[s]).collect();
        let mut letter_names: Vec<String> = net.transitions().to_vec();
        letter_names.push("#".into());
        Ok(ChainKripke {
            ap,
            states,
            initial,
            labels,
            succ,
            names,
            letter_names,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Number of letters, including the stutter letter.
    pub fn letters(&self) -> usize {
        self.letter_names.len()
    }

    pub fn hash(&self) -> usize {
        self.letter_names.len() - 1
    }

    pub fn letter_name(&self, l: usize) -> &str {
        &self.letter_names[l]
    }

    /// Successors under `letter`, sorted by state name.
    pub fn succ(&self, s: usize, letter: usize) -> &[usize] {
        &self.succ[s][letter]
    }

    /// Label as a bitmask over `ap`.
    pub fn label(&self, s: usize) -> u64 {
        self.labels[s]
    }

    pub fn label_names(&self, s: usize) -> Vec<&str> {
        (0..self.ap.len())
            .filter(|i| self.labels[s] >> i & 1 == 1)
            .map(|i| self.ap[i].as_str())
            .collect()
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn edge_count(&self) -> usize {
        self.succ
            .iter()
            .map(|by| by.iter().map(Vec::len).sum::<usize>())
            .sum()
    }

    /// Largest number of successors under a single letter.
    pub fn max_branching(&self) -> usize {
        self.succ
            .iter()
            .flat_map(|by| by.iter().map(Vec::len))
            .max()
            .unwrap_or(0)
    }

    pub fn dump(&self) -> String {
        let mut out = String::from("format-version 1\n");
        for s in 0..self.len() {
            let init = if self.initial.contains(&s) {
                " initial"
            } else {
                ""
            };
            writeln!(
                out,
                "state {}{init} labels={{{}}}",
                self.name(s),
                self.label_names(s).join(",")
            )
            .unwrap();
        }
        for s in 0..self.len() {
            for l in 0..self.letters() {
                for &d in self.succ(s, l) {
                    writeln!(
                        out,
                        "edge {} --{}--> {}",
                        self.name(s),
                        self.letter_name(l),
                        self.name(d)
                    )
                    .unwrap();
                }
            }
        }
        out
    }
}
