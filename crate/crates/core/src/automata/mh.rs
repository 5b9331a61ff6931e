//! Alternation elimination for Büchi word automata (breakpoint construction).

use std::collections::{BTreeSet, VecDeque};

use rustc_hash::FxHashMap;

use super::awa::Awa;
use super::nba::Nba;
use super::pbf::Pbf;
use super::AutomataError;

type Macro = (Vec<usize>, Vec<usize>);

/// Nondeterministic automaton with the same language from each initial
/// state. The returned vector maps `abw.initial[i]` to its NBA state.
pub fn eliminate_alternation(abw: &Awa, cap: usize) -> Result<(Nba<usize>, Vec<usize>), AutomataError> {
    let letters = abw.letters();
    let mut index: FxHashMap<Macro, usize> = FxHashMap::default();
    let mut states: Vec<Macro> = Vec::new();
    let mut queue = VecDeque::new();
    let mut id = |m: Macro, states: &mut Vec<Macro>, queue: &mut VecDeque<usize>| {
        *index.entry(m.clone()).or_insert_with(|| {
            states.push(m);
            queue.push_back(states.len() - 1);
            states.len() - 1
        })
    };
    let starts: Vec<usize> = abw
        .initial
        .iter()
        .map(|&x| id((vec![x], vec![]), &mut states, &mut queue))
        .collect();
    let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut models_cache: FxHashMap<(usize, usize), Vec<Vec<usize>>> = FxHashMap::default();
    while let Some(i) = queue.pop_front() {
        if states.len() > cap {
            return Err(AutomataError::TooLarge {
                stage: "alternation elimination",
                cap,
            });
        }
        let (s, o) = states[i].clone();
        let mut out = Vec::new();
        for l in 0..letters {
            for m in successors(abw, &s, &o, l, &mut models_cache, cap)? {
                let d = id(m, &mut states, &mut queue);
                out.push((l, d));
            }
        }
        out.sort_unstable();
        out.dedup();
        debug_assert_eq!(edges.len(), i);
        edges.push(out);
    }
    let show = |v: &[usize]| {
        v.iter()
            .map(|&x| abw.names[x].as_str())
            .collect::<Vec<_>>()
            .join(",")
    };
    let nba = Nba {
        initial: starts.clone(),
        accepting: states.iter().map(|(_, o)| o.is_empty()).collect(),
        names: states
            .iter()
            .map(|(s, o)| format!("[{}|{}]", show(s), show(o)))
            .collect(),
        edges,
    };
    Ok((nba, starts))
}

fn successors(
    abw: &Awa,
    s: &[usize],
    o: &[usize],
    l: usize,
    cache: &mut FxHashMap<(usize, usize), Vec<Vec<usize>>>,
    cap: usize,
) -> Result<Vec<Macro>, AutomataError> {
    let fresh = o.is_empty();
    let mut cands: BTreeSet<(BTreeSet<usize>, BTreeSet<usize>)> = BTreeSet::new();
    cands.insert(Default::default());
    for &x in s {
        let models = cache
            .entry((x, l))
            .or_insert_with(|| {
                abw.delta[x][l]
                    .clone()
                    .unwrap_or(Pbf::False)
                    .minimal_models()
            })
            .clone();
        if models.is_empty() {
            return Ok(Vec::new());
        }
        let tracked = !fresh && o.binary_search(&x).is_ok();
        let mut next = BTreeSet::new();
        for (cs, co) in &cands {
            for y in &models {
                let mut ns = cs.clone();
                ns.extend(y.iter().copied());
                let mut no = co.clone();
                if tracked {
                    no.extend(y.iter().copied().filter(|&z| !abw.is_accepting(z)));
                }
                next.insert((ns, no));
            }
        }
        cands = prune(next);
        if cands.len() > cap {
            return Err(AutomataError::TooLarge {
                stage: "alternation elimination",
                cap,
            });
        }
    }
    let out: BTreeSet<(BTreeSet<usize>, BTreeSet<usize>)> = cands
        .into_iter()
        .map(|(ns, no)| {
            let no = if fresh {
                ns.iter().copied().filter(|&z| !abw.is_accepting(z)).collect()
            } else {
                no
            };
            (ns, no)
        })
        .collect();
    Ok(prune(out)
        .into_iter()
        .map(|(a, b)| (a.into_iter().collect(), b.into_iter().collect()))
        .collect())
}

/// Drops pairs that componentwise contain another pair.
fn prune(
    set: BTreeSet<(BTreeSet<usize>, BTreeSet<usize>)>,
) -> BTreeSet<(BTreeSet<usize>, BTreeSet<usize>)> {
    let v: Vec<_> = set.into_iter().collect();
    let mut keep = BTreeSet::new();
    for (i, (s, o)) in v.iter().enumerate() {
        let dominated = v.iter().enumerate().any(|(j, (s2, o2))| {
            j != i && s2.is_subset(s) && o2.is_subset(o) && (s2 != s || o2 != o)
        });
        if !dominated {
            keep.insert((s.clone(), o.clone()));
        }
    }
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::awa::Acceptance;

    #[test]
    fn universal_split_becomes_nondeterministic() {
        // letters a=0, b=1; from 0 every a spawns a copy that needs a later b
        let abw = Awa {
            names: vec!["x".into(), "y".into()],
            place: vec![0, 0],
            initial: vec![0],
            delta: vec![
                vec![Some(Pbf::and(Pbf::Atom(0), Pbf::Atom(1))), Some(Pbf::Atom(0))],
                vec![Some(Pbf::Atom(1)), Some(Pbf::True)],
            ],
            acceptance: Acceptance::Buchi(vec![true, false]),
        };
        let (nba, starts) = eliminate_alternation(&abw, 1000).unwrap();
        assert_eq!(starts.len(), 1);
        for (stem, cycle) in [
            (vec![], vec![0, 1]),
            (vec![], vec![0]),
            (vec![0, 0], vec![1]),
            (vec![1], vec![0, 0, 1]),
            (vec![0], vec![1, 0]),
        ] {
            assert_eq!(
                nba.accepts(&stem, &cycle),
                abw.accepts(&stem, &cycle)[0],
                "{stem:?} {cycle:?}"
            );
        }
    }
}
