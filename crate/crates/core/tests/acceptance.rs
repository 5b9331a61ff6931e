//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria whose literal statement is false print FAIL and the run still
//! asserts the observed behavior, so regressions in either direction are
//! caught.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flowmc_core::automata::awa::{lift, product_awa, to_buchi};
use flowmc_core::automata::mh::eliminate_alternation;
use flowmc_core::automata::Ata;
use flowmc_core::engine::{check_flow_ctlstar, check_ltl, reduce, witness_text, CheckOptions};
use flowmc_core::fixtures::{fig2_net, FIG1_LAYOUT, FIG2_NET};
use flowmc_core::frontend::{building_to_pnwt, parse_layout, weak_fairness};
use flowmc_core::kripke::ChainKripke;
use flowmc_core::logic::{parse_ctlstar, parse_flow, parse_ltl, FlowCtlStar};
use flowmc_core::net::{parse_net_text, validate_safe, Lasso, NetBuilder, PetriNetWithTransits, SafetyReport};
use flowmc_core::oracle::{
    chain_graph, eval_flow_on_lasso, eval_ltl_on_lasso, label_ctl, oracle_check, oracle_check_ltl,
    ChainGraph, OracleVerdict,
};

struct Report {
    failed_asserts: Vec<String>,
}

impl Report {
    fn line(&mut self, pass: bool, id: &str, text: &str, took: Duration) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id}: {text} [{:.2}s]", took.as_secs_f64());
    }

    fn require(&mut self, ok: bool, what: String) {
        if !ok {
            println!("  assertion failed: {what}");
            self.failed_asserts.push(what);
        }
    }
}

fn opts() -> CheckOptions {
    CheckOptions::default()
}

fn net_from(src: &str) -> PetriNetWithTransits {
    parse_net_text(src).unwrap().build_transits().unwrap()
}

fn small_nets() -> Vec<PetriNetWithTransits> {
    vec![
        net_from(
            "place a init\nplace b\ntransition go\narc a -> go\narc go -> b\n\
             transition back\narc b -> back\narc back -> a\n\
             transit go: a -> b\ntransit go: START -> b\ntransit back: b -> a\n",
        ),
        net_from(
            "place p init\nplace q\ntransition s\narc p -> s\narc s -> p\narc s -> q\n\
             transit s: p -> p\ntransit s: p -> q\ntransit s: START -> p\n\
             transition d\narc q -> d\n",
        ),
    ]
}

fn criterion_1(r: &mut Report) {
    let t0 = Instant::now();
    let mut cases: Vec<(PetriNetWithTransits, &str)> = vec![
        (fig2_net(), "A AG EF lab"),
        (fig2_net(), "A EF kitchen & A AG (hall -> EF lab)"),
        (fig2_net(), "G F evening -> A A ((EF kitchen) U evening)"),
        (fig2_net(), "F hall"),
    ];
    let small = small_nets();
    cases.push((small[0].clone(), "A AG EF a"));
    cases.push((small[1].clone(), "A EX q | A AF p"));
    let mut ok = true;
    let mut slowest = Duration::ZERO;
    for (net, src) in &cases {
        let start = Instant::now();
        let psi = parse_flow(src).unwrap();
        let red = reduce(net, &psi, &opts()).unwrap();
        slowest = slowest.max(start.elapsed());
        let n = red.automata.len();
        let q: usize = red.automata.iter().map(|a| a.chain_nba(net).nba.len()).sum();
        let expected = net.places().len() + 3 + (4 + net.transitions().len()) * n + q;
        let got = red.mcnet.places().len();
        r.require(got == expected, format!("size law on `{src}`: {got} != {expected}"));
        ok &= got == expected;
    }
    let pass = ok && slowest < Duration::from_secs(1);
    r.line(
        pass,
        "1",
        &format!("place count law exact on {} pipelines, slowest {:.3}s", cases.len(), slowest.as_secs_f64()),
        t0.elapsed(),
    );
    r.require(pass, "criterion 1".into());
}

fn criterion_2(r: &mut Report) {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut nets = Vec::new();
    for _ in 0..40 {
        let net = common::random_net(&mut rng, 4, 4);
        let mut ap: BTreeSet<String> = BTreeSet::new();
        for x in net.places().iter().chain(net.transitions()) {
            if rng.gen_bool(0.5) {
                ap.insert(x.clone());
            }
        }
        nets.push((net, ap));
    }
    let (mut state_ok, mut literal_bad, mut corrected_ok) = (true, 0, true);
    for (net, ap) in &nets {
        let k = ChainKripke::build(net, ap).unwrap();
        let s = k.len();
        let e = k.edge_count();
        let tagged = net.transitions().iter().filter(|t| ap.contains(*t)).count();
        let transits: usize = (0..net.transitions().len()).map(|t| net.transits(t).len()).sum();
        state_ok &= s <= tagged * net.places().len() + net.places().len();
        if e > transits + 2 * s {
            literal_bad += 1;
        }
        corrected_ok &= e <= (tagged + 1) * transits + s;
    }
    // One entry plus three transitions tagged in AP, each looping a chain on p.
    let mut b = NetBuilder::new();
    b.place("p", true).transition("t0").read_arc("p", "t0").transit("t0", None, "p");
    for t in ["t1", "t2", "t3"] {
        b.transition(t).read_arc("p", t).transit(t, Some("p"), "p");
    }
    let cx = b.build_transits().unwrap();
    let ap: BTreeSet<String> = ["t1", "t2", "t3"].iter().map(|s| s.to_string()).collect();
    let k = ChainKripke::build(&cx, &ap).unwrap();
    let (cs, ce) = (k.len(), k.edge_count());
    let hand_literal = ce <= 4 + 2 * cs;
    let hand_corrected = ce <= 4 * 4 + cs;
    r.require(state_ok, "state bound on generated nets".into());
    r.require(corrected_ok && hand_corrected, "edge bound (|AP∩T|+1)·transits + |S|".into());
    r.require(!hand_literal, format!("hand net has |S|={cs}, edges={ce}"));
    r.line(
        state_ok,
        "2 (states)",
        &format!("|S| <= |AP∩T|·|P| + |P| on {} generated nets", nets.len()),
        t0.elapsed(),
    );
    r.line(
        false,
        "2 (edges, literal)",
        &format!(
            "edges <= transits + 2|S| exceeded on {literal_bad}/{} generated nets, \
             but three tagged self-loops on one place give |S|={cs} and {ce} edges > {}",
            nets.len(),
            4 + 2 * cs
        ),
        t0.elapsed(),
    );
    r.line(
        corrected_ok,
        "2 (edges, corrected)",
        "edges <= (|AP∩T|+1)·transits + |S| on all generated nets and the hand net",
        t0.elapsed(),
    );
}

fn criterion_3(r: &mut Report) {
    let t0 = Instant::now();
    let mut fixtures: Vec<(PetriNetWithTransits, &str)> = [
        "AG EF lab",
        "EF kitchen",
        "A ((EF kitchen) U evening)",
        "AG !kitchen",
        "EX lab",
        "E (hall U lab)",
        "AG (hall -> EF lab)",
        "AF (lab | evening)",
        "E (F lab & G !kitchen)",
    ]
    .into_iter()
    .map(|f| (fig2_net(), f))
    .collect();
    let small = small_nets();
    fixtures.push((small[0].clone(), "AG EF a"));
    fixtures.push((small[1].clone(), "A (p U q)"));
    fixtures.push((small[1].clone(), "E G p"));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut disagreements = 0;
    let mut words = 0;
    for (net, src) in &fixtures {
        let phi = parse_ctlstar(src).unwrap();
        let atoms: BTreeSet<String> = phi.atoms();
        let kripke = ChainKripke::build(net, &atoms).unwrap();
        let ata = Ata::for_negation(&phi, &kripke.ap).unwrap();
        let product = product_awa(&ata, &kripke, 5_000).unwrap();
        let abw = to_buchi(&product, 5_000).unwrap();
        let lifted = lift(&abw, net);
        let (nba, starts) = eliminate_alternation(&lifted, 5_000).unwrap();
        let letters = lifted.letters();
        for _ in 0..1000 {
            let stem: Vec<usize> = (0..rng.gen_range(0..=6)).map(|_| rng.gen_range(0..letters)).collect();
            let cycle: Vec<usize> = (0..rng.gen_range(1..=6)).map(|_| rng.gen_range(0..letters)).collect();
            let want = lifted.accepts(&stem, &cycle);
            for (i, &s) in starts.iter().enumerate() {
                let mut single = nba.clone();
                single.initial = vec![s];
                if single.accepts(&stem, &cycle) != want[i] {
                    disagreements += 1;
                }
            }
            words += 1;
        }
    }
    let took = t0.elapsed();
    let pass = disagreements == 0 && took < Duration::from_secs(120);
    r.line(
        pass,
        "3",
        &format!(
            "{} fixtures, {words} words, {disagreements} disagreements between the NBA and the alternating automaton",
            fixtures.len()
        ),
        took,
    );
    r.require(pass, "criterion 3".into());
}

fn criterion_4(r: &mut Report) {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut violations, mut failures, mut pairs) = (0, 0, 0);
    while pairs < 500 {
        let net = common::random_net(&mut rng, 4, 4);
        let size = rng.gen_range(1..=6);
        let src = common::random_ltl(&mut rng, &net, size);
        let phi = parse_ltl(&src).unwrap();
        pairs += 1;
        let v = check_ltl(&net, &phi, &opts()).unwrap();
        let oracle = oracle_check_ltl(&net, &phi, 10);
        if let OracleVerdict::Violation(_) = oracle {
            violations += 1;
            if v.holds {
                failures += 1;
                println!("  mismatch on `{src}`:\n{}", flowmc_core::net::print_net_text(&net));
            }
        }
        if let Some(w) = &v.witness {
            let ok = w
                .composed
                .trace(&net)
                .map(|tr| !eval_ltl_on_lasso(&phi, &tr, &net))
                .unwrap_or(false);
            if !ok {
                failures += 1;
                println!("  witness for `{src}` does not replay as a violation");
            }
        }
    }
    let pass = failures == 0;
    r.line(
        pass,
        "4",
        &format!("{pairs} random pairs, {violations} oracle violations, {failures} failures"),
        t0.elapsed(),
    );
    r.require(pass, "criterion 4".into());
}

const DOORS: [&str; 5] = ["hall_[l,k]", "hall_lab", "hall_kitchen", "lab_hall", "kitchen_hall"];

fn fair(net: &PetriNetWithTransits, extra: &[&str], body: &str) -> FlowCtlStar {
    let ts: Vec<&str> = DOORS.iter().chain(extra).copied().collect();
    let premise = weak_fairness(net, &ts).unwrap();
    FlowCtlStar::implies(premise, parse_flow(body).unwrap())
}

/// Checks a violated verdict against the oracle; returns the witness text.
fn confirm_violation(r: &mut Report, net: &PetriNetWithTransits, psi: &FlowCtlStar, what: &str) -> String {
    let v = check_flow_ctlstar(net, psi, &opts()).unwrap();
    r.require(!v.holds, format!("{what}: engine verdict"));
    let Some(w) = v.witness else {
        return String::new();
    };
    let replays = w.original.replay(net).is_ok();
    let violates = eval_flow_on_lasso(net, psi, &w.original) == Ok(false);
    r.require(replays && violates, format!("{what}: witness replays and violates"));
    format!("{} transitions", w.original.len())
}

/// Shortest violating run found by the oracle, as one line.
fn oracle_witness(r: &mut Report, net: &PetriNetWithTransits, psi: &FlowCtlStar, k: usize, what: &str) -> String {
    match oracle_check(net, psi, k).unwrap() {
        OracleVerdict::Violation(l) => witness_text(net, &l).split_whitespace().collect::<Vec<_>>().join(" "),
        v => {
            r.require(false, format!("{what}: oracle reports {v}"));
            String::new()
        }
    }
}

fn criterion_5(r: &mut Report) {
    let net = fig2_net();

    let t0 = Instant::now();
    let psi = fair(&net, &[], "A AG EF lab");
    let wit = confirm_violation(r, &net, &psi, "5a");
    let oracle = oracle_witness(r, &net, &psi, 5, "5a");
    r.line(
        false,
        "5a",
        &format!(
            "door fairness -> A AG EF lab is violated, not held: leaveHall ends a chain in hall \
             that then cannot reach lab; engine witness of {wit}, oracle witness `{oracle}`"
        ),
        t0.elapsed(),
    );

    let t0 = Instant::now();
    let psi = parse_flow("A AG EF lab").unwrap();
    let wit = confirm_violation(r, &net, &psi, "5b");
    r.line(true, "5b", &format!("A AG EF lab without fairness is violated; replayable witness of {wit}"), t0.elapsed());

    let t0 = Instant::now();
    let psi = fair(&net, &["evening"], "A A ((EF kitchen) U evening)");
    let wit = confirm_violation(r, &net, &psi, "5c");
    let oracle = oracle_witness(r, &net, &psi, 5, "5c");
    r.line(
        false,
        "5c",
        &format!(
            "door and evening fairness -> A A((EF kitchen) U evening) is violated, not held: \
             a chain entering right before evening has no branch to the kitchen, so EF kitchen \
             fails before evening occurs; \
             engine witness of {wit}, oracle witness `{oracle}`"
        ),
        t0.elapsed(),
    );

    let t0 = Instant::now();
    let no_leave: String = FIG2_NET
        .lines()
        .filter(|l| !l.contains("leaveHall"))
        .map(|l| format!("{l}\n"))
        .collect();
    let closed = net_from(&no_leave);
    let psi = fair(&closed, &[], "A AG EF lab");
    let v = check_flow_ctlstar(&closed, &psi, &opts()).unwrap();
    let oracle = oracle_check(&closed, &psi, 5).unwrap();
    let pass = v.holds && oracle == OracleVerdict::NoViolationUpTo(5);
    r.line(
        pass,
        "5a (without leaveHall)",
        "door fairness -> A AG EF lab holds once leaveHall is removed; oracle finds no violation up to bound 5",
        t0.elapsed(),
    );
    r.require(pass, "5a without leaveHall".into());
}

fn criterion_6(r: &mut Report) {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut n, mut contradictions, mut violated) = (0, 0, 0);
    while n < 200 {
        let net = common::random_net(&mut rng, 4, 4);
        let size = rng.gen_range(1..=4);
        let src = format!("A {}", common::random_ctl(&mut rng, &net, size));
        let psi = parse_flow(&src).unwrap();
        n += 1;
        let v = check_flow_ctlstar(&net, &psi, &opts()).unwrap();
        let oracle = oracle_check(&net, &psi, 8).unwrap();
        let bad = match (&v.witness, &oracle) {
            (None, OracleVerdict::Violation(_)) => true,
            (Some(w), _) => eval_flow_on_lasso(&net, &psi, &w.original) != Ok(false),
            _ => false,
        };
        violated += usize::from(!v.holds);
        if bad {
            contradictions += 1;
            println!("  contradiction on `{src}`:\n{}", flowmc_core::net::print_net_text(&net));
        }
    }
    let pass = contradictions == 0;
    r.line(
        pass,
        "6",
        &format!("{n} random instances ({violated} violated), {contradictions} contradictions at bound 8"),
        t0.elapsed(),
    );
    r.require(pass, "criterion 6".into());
}

type Key = (Vec<usize>, Vec<usize>, Vec<(Option<usize>, usize)>);

fn transition_keys(net: &PetriNetWithTransits, map: &[usize]) -> Vec<Key> {
    let mut keys: Vec<Key> = (0..net.transitions().len())
        .map(|t| {
            let img = |v: &[usize]| {
                let mut w: Vec<usize> = v.iter().map(|&p| map[p]).collect();
                w.sort_unstable();
                w
            };
            let mut tr: Vec<(Option<usize>, usize)> = net
                .transits(t)
                .iter()
                .map(|x| (x.from.map(|p| map[p]), map[x.to]))
                .collect();
            tr.sort_unstable();
            (img(net.pre(t)), img(net.post(t)), tr)
        })
        .collect();
    keys.sort();
    keys
}

/// Searches a place bijection under which both nets have the same initial
/// marking and the same multiset of (preset, postset, transits) triples.
fn isomorphic(a: &PetriNetWithTransits, b: &PetriNetWithTransits) -> bool {
    let n = a.places().len();
    if n != b.places().len() || a.transitions().len() != b.transitions().len() {
        return false;
    }
    let ident: Vec<usize> = (0..n).collect();
    let target = transition_keys(b, &ident);
    fn go(a: &PetriNetWithTransits, b: &PetriNetWithTransits, map: &mut Vec<usize>, used: &mut Vec<bool>, target: &[Key]) -> bool {
        let i = map.len();
        if i == a.places().len() {
            return transition_keys(a, map) == target;
        }
        for j in 0..used.len() {
            if !used[j] && a.initial().contains(i) == b.initial().contains(j) {
                used[j] = true;
                map.push(j);
                if go(a, b, map, used, target) {
                    return true;
                }
                map.pop();
                used[j] = false;
            }
        }
        false
    }
    go(a, b, &mut Vec::new(), &mut vec![false; n], &target)
}

fn criterion_7(r: &mut Report) {
    let t0 = Instant::now();
    let enc = building_to_pnwt(&parse_layout(FIG1_LAYOUT).unwrap()).unwrap();
    let fig2 = fig2_net();
    let counts = (enc.net.places().len(), enc.net.transitions().len());
    let iso = isomorphic(&enc.net, &fig2);
    let safe = matches!(validate_safe(&enc.net, 10_000), SafetyReport::Safe { .. });
    let pass = counts == (7, 8) && iso && safe;
    r.line(
        pass,
        "7",
        &format!("encoded layout has {}/{} places/transitions, isomorphic to the reference net: {iso}", counts.0, counts.1),
        t0.elapsed(),
    );
    r.require(pass, "criterion 7".into());
}

/// Chain tree below `v` without stutter continuations, as nested labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Tree(String, Vec<Tree>);

fn unfold(g: &ChainGraph, net: &PetriNetWithTransits, v: usize) -> Tree {
    let n = g.nodes[v];
    let label = format!(
        "({}, {}{})",
        net.transitions()[n.transition.unwrap()],
        net.places()[n.place],
        n.position.unwrap()
    );
    let mut kids: Vec<Tree> = g.succ[v]
        .iter()
        .filter(|&&w| g.nodes[w].position.is_some())
        .map(|&w| unfold(g, net, w))
        .collect();
    kids.sort();
    Tree(label, kids)
}

fn leaf(s: &str) -> Tree {
    Tree(s.into(), vec![])
}

fn node(s: &str, kids: Vec<Tree>) -> Tree {
    let mut kids = kids;
    kids.sort();
    Tree(s.into(), kids)
}

fn criterion_8(r: &mut Report) {
    let t0 = Instant::now();
    let net = fig2_net();
    let run = ["enterHall", "hall_[l,k]", "enterHall", "lab_hall", "kitchen_hall", "evening"];
    let lasso = Lasso::stopped(run.iter().map(|t| net.transition_index(t).unwrap()).collect());
    let g = chain_graph(&net, &lasso).unwrap();
    let tail = || node("(kitchen_hall, hall5)", vec![leaf("(evening, hall6)")]);
    let first = node(
        "(enterHall, hall1)",
        vec![
            node("(hall_[l,k], lab2)", vec![node("(lab_hall, hall4)", vec![tail()])]),
            node("(hall_[l,k], kitchen2)", vec![tail()]),
        ],
    );
    let second = node("(enterHall, hall3)", vec![node("(lab_hall, hall4)", vec![tail()])]);
    let got: BTreeMap<String, Tree> = g
        .roots
        .iter()
        .map(|&v| {
            let t = unfold(&g, &net, v);
            (t.0.clone(), t)
        })
        .collect();
    let want: BTreeMap<String, Tree> = [first, second].into_iter().map(|t| (t.0.clone(), t)).collect();
    let trees_ok = got == want;
    let root = |label: &str| g.roots.iter().copied().find(|&v| unfold(&g, &net, v).0 == label).unwrap();
    let ag_ef_lab = label_ctl(&parse_ctlstar("AG EF lab").unwrap(), &g, &net).unwrap();
    let ef_kitchen = label_ctl(&parse_ctlstar("EF kitchen").unwrap(), &g, &net).unwrap();
    let labels_ok = trees_ok && !ag_ef_lab[root("(enterHall, hall3)")] && ef_kitchen[root("(enterHall, hall1)")];
    let pass = trees_ok && labels_ok;
    r.line(
        pass,
        "8",
        "both flow trees of the six-step run match node for node; AG EF lab fails on the second, EF kitchen holds on the first",
        t0.elapsed(),
    );
    r.require(pass, "criterion 8".into());
}

fn main() {
    let mut r = Report {
        failed_asserts: Vec::new(),
    };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    if !r.failed_asserts.is_empty() {
        eprintln!("{} checks failed", r.failed_asserts.len());
        std::process::exit(1);
    }
}
