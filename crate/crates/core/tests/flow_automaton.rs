use flowmc_core::automata::{build_flow_automaton, AutomataError};
use flowmc_core::fixtures::fig2_net;
use flowmc_core::logic::{collect_flow_subformulas, parse_flow};
use flowmc_core::net::{Lasso, PetriNetWithTransits};
use flowmc_core::oracle::{chain_graph, enumerate_lassos, label_ctl};

/// Letters read after position `i` of the lasso trace, as stem and cycle.
fn suffix_word(net: &PetriNetWithTransits, lasso: &Lasso, i: usize) -> (Vec<usize>, Vec<usize>) {
    let trace = lasso.trace(net).unwrap();
    let hash = net.transitions().len();
    let mut seen = vec![None; trace.len()];
    let mut word = Vec::new();
    let mut cur = i;
    while seen[cur].is_none() {
        seen[cur] = Some(word.len());
        let nxt = trace.next(cur);
        word.push(trace.states[nxt].ingoing.unwrap_or(hash));
        cur = nxt;
    }
    let split = seen[cur].unwrap();
    (word[..split].to_vec(), word[split..].to_vec())
}

fn agree(net: &PetriNetWithTransits, src: &str, bound: usize) {
    let psi = parse_flow(src).unwrap();
    let sub = &collect_flow_subformulas(&psi)[0];
    let fa = build_flow_automaton(net, sub, 100_000).unwrap();
    let mut checked = 0;
    for lasso in enumerate_lassos(net, bound) {
        let g = chain_graph(net, &lasso).unwrap();
        let lab = label_ctl(&sub.formula, &g, net).unwrap();
        for &r in &g.roots {
            let node = g.nodes[r];
            let (stem, cycle) = suffix_word(net, &lasso, node.position.unwrap());
            let mut nba = fa.nba.clone();
            nba.initial = vec![fa.start_for(net, node.transition.unwrap(), node.place)];
            let violates = nba.accepts(&stem, &cycle);
            assert_eq!(
                violates,
                !lab[r],
                "{src}: root {} of {}",
                g.node_name(net, r),
                lasso.display(net)
            );
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn fig2_flow_automata_match_chain_semantics() {
    let net = fig2_net();
    for src in [
        "A AG EF lab",
        "A EF kitchen",
        "A A ((EF kitchen) U evening)",
        "A AG !kitchen",
        "A EX lab",
        "A E (hall U lab)",
        "A AG (hall -> EF lab)",
        "A AF (lab | evening)",
    ] {
        agree(&net, src, 4);
    }
}

#[test]
fn ctl_star_subformulas_build_within_cap() {
    let net = fig2_net();
    for src in [
        "A A (F lab | G hall)",
        "A E (F lab & G !kitchen)",
        "A A F G !lab",
        "A A (G F lab -> G F kitchen)",
    ] {
        let psi = parse_flow(src).unwrap();
        let sub = &collect_flow_subformulas(&psi)[0];
        assert!(build_flow_automaton(&net, sub, 5_000).is_ok(), "{src}");
    }
}

#[test]
fn mixed_component_blowup_hits_cap() {
    let net = fig2_net();
    let psi = parse_flow("A E G F lab").unwrap();
    let sub = &collect_flow_subformulas(&psi)[0];
    assert!(matches!(
        build_flow_automaton(&net, sub, 5_000),
        Err(AutomataError::TooLarge { .. })
    ));
}
