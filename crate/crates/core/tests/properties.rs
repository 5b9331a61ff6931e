mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use flowmc_core::automata::{ltl_to_nba, Guard, Nba};
use flowmc_core::engine::{check_ltl, CheckOptions};
use flowmc_core::frontend::{building_to_pnwt, parse_layout, property_template, PROPERTY_TEMPLATES};
use flowmc_core::logic::{parse_flow, parse_ltl, Ltl};
use flowmc_core::net::{marking_graph, validate_safe, SafetyReport};
use flowmc_core::oracle::{eval_ltl_positions, oracle_check_ltl, OracleVerdict};

const ATOMS: [&str; 3] = ["a", "b", "c"];

fn ltl() -> impl Strategy<Value = Ltl> {
    let leaf = prop_oneof![
        Just(Ltl::True),
        (0..ATOMS.len()).prop_map(|i| Ltl::atom(ATOMS[i])),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Ltl::not),
            inner.clone().prop_map(Ltl::next),
            inner.clone().prop_map(Ltl::eventually),
            inner.clone().prop_map(Ltl::globally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::until(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Ltl::release(a, b)),
        ]
    })
}

/// Letters are bit sets over `ATOMS`.
fn word() -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
    (
        prop::collection::vec(0u8..8, 0..4),
        prop::collection::vec(0u8..8, 1..4),
    )
}

fn holds(letter: u8, atom: &str) -> bool {
    ATOMS.iter().position(|a| *a == atom).is_some_and(|i| letter >> i & 1 == 1)
}

/// Runs a guard-labelled automaton on a lasso word by relabelling edges with positions.
fn nba_accepts(nba: &Nba<Guard<String>>, stem: &[u8], cycle: &[u8]) -> bool {
    let word: Vec<u8> = stem.iter().chain(cycle).copied().collect();
    let edges = nba
        .edges
        .iter()
        .map(|es| {
            let mut out = Vec::new();
            for (g, d) in es {
                for (i, &l) in word.iter().enumerate() {
                    if g.holds(|a| holds(l, a)) {
                        out.push((i, *d));
                    }
                }
            }
            out
        })
        .collect();
    let positional = Nba {
        initial: nba.initial.clone(),
        accepting: nba.accepting.clone(),
        names: nba.names.clone(),
        edges,
    };
    let idx: Vec<usize> = (0..word.len()).collect();
    positional.accepts(&idx[..stem.len()], &idx[stem.len()..])
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 300,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn negation_automaton_matches_semantics(phi in ltl(), (stem, cycle) in word()) {
        let word: Vec<u8> = stem.iter().chain(&cycle).copied().collect();
        let len = word.len();
        let next = |i: usize| if i + 1 == len { stem.len() } else { i + 1 };
        let truth = eval_ltl_positions(&phi, len, &next, &|i, a| holds(word[i], a))[0];
        prop_assert_eq!(nba_accepts(&ltl_to_nba(&phi), &stem, &cycle), !truth);
    }

    #[test]
    fn ltl_display_round_trips(phi in ltl()) {
        prop_assert_eq!(parse_ltl(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn engine_agrees_with_oracle(seed in any::<u64>(), size in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = common::random_net(&mut rng, 3, 3);
        let src = common::random_ltl(&mut rng, &net, size);
        let phi = parse_ltl(&src).unwrap();
        let v = check_ltl(&net, &phi, &CheckOptions::default()).unwrap();
        if let OracleVerdict::Violation(l) = oracle_check_ltl(&net, &phi, 6) {
            prop_assert!(!v.holds, "{} violated by {}", src, l.display(&net));
        }
        if let Some(w) = v.witness {
            prop_assert!(w.composed.replay(&net).is_ok());
        }
    }

    #[test]
    fn templates_round_trip(i in 0..PROPERTY_TEMPLATES.len(), a in 0..3usize, b in 0..3usize) {
        let name = PROPERTY_TEMPLATES[i];
        let args = [ATOMS[a], ATOMS[b]];
        let arity = if matches!(name, "permission" | "persistent_permission" | "prohibition") { 1 } else { 2 };
        let f = property_template(name, &args[..arity]).unwrap();
        prop_assert_eq!(parse_flow(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn encoded_layouts_are_safe_and_exclusive(
        rooms in 1usize..4,
        doors in prop::collection::vec((0usize..4, 0usize..4, any::<bool>(), any::<bool>()), 0..6),
        entry in any::<bool>(),
    ) {
        let mut src = String::new();
        for r in 0..rooms {
            src.push_str(&format!("room r{r}\n"));
        }
        let mut seen = BTreeSet::new();
        let mut controllable = Vec::new();
        for (k, &(f, t, ctrl, open)) in doors.iter().enumerate() {
            let (f, t) = (f % rooms, t % rooms);
            if f == t || !seen.insert((f, t)) {
                continue;
            }
            let flags = match (ctrl, open) {
                (true, true) => " controllable",
                (true, false) => " controllable closed",
                _ => "",
            };
            src.push_str(&format!("door d{k}: r{f} -> r{t}{flags}\n"));
            if ctrl {
                controllable.push(format!("d{k}"));
            }
        }
        if entry {
            src.push_str("door in: OUTSIDE -> r0\nentry in\n");
        }
        if let Some(d) = controllable.first() {
            src.push_str(&format!("update flip: open{{}} close{{{d}}}\n"));
        }
        let enc = building_to_pnwt(&parse_layout(&src).unwrap()).unwrap();
        let net = &enc.net;
        let is_safe = matches!(validate_safe(net, 100_000), SafetyReport::Safe { .. });
        prop_assert!(is_safe);
        let splitting: Vec<(String, usize)> = enc
            .names
            .iter()
            .filter_map(|(t, meaning)| {
                let room = meaning.split(" -> [").next()?;
                let r = net.place_index(room)?;
                meaning.contains(" -> [").then(|| (t.clone(), r))
            })
            .collect();
        let graph = marking_graph(net, 100_000).unwrap();
        for m in graph.nodes.iter().map(|n| &n.marking) {
            for r in 0..rooms {
                let room = net.place_index(&format!("r{r}")).unwrap();
                let enabled = splitting
                    .iter()
                    .filter(|(t, p)| *p == room && net.is_enabled(m, net.transition_index(t).unwrap()))
                    .count();
                prop_assert!(enabled <= 1, "room r{} has {} enabled splits in\n{}", r, enabled, src);
            }
        }
    }
}
