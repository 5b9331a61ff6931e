#![allow(dead_code)]

use flowmc_core::net::{validate_safe, NetBuilder, PetriNetWithTransits, SafetyReport};
use rand::seq::SliceRandom;
use rand::Rng;

fn subset<R: Rng>(rng: &mut R, items: &[String], lo: usize, hi: usize) -> Vec<String> {
    let k = rng.gen_range(lo..=hi.min(items.len()));
    items.choose_multiple(rng, k).cloned().collect()
}

/// Random safe net with transits over places `p0..` and transitions `t0..`.
pub fn random_net<R: Rng>(rng: &mut R, max_places: usize, max_transitions: usize) -> PetriNetWithTransits {
    loop {
        let np = rng.gen_range(1..=max_places);
        let nt = rng.gen_range(1..=max_transitions);
        let places: Vec<String> = (0..np).map(|i| format!("p{i}")).collect();
        let mut b = NetBuilder::new();
        for p in &places {
            b.place(p, rng.gen_bool(0.5));
        }
        for i in 0..nt {
            let t = format!("t{i}");
            b.transition(&t);
            let pre = subset(rng, &places, 1, 2);
            let post = subset(rng, &places, 0, 2);
            for p in &pre {
                b.arc(p, &t);
            }
            for q in &post {
                b.arc(&t, q);
                if rng.gen_bool(0.4) {
                    b.transit(&t, None, q);
                }
                for p in &pre {
                    if rng.gen_bool(0.5) {
                        b.transit(&t, Some(p), q);
                    }
                }
            }
        }
        let net = b.build_transits().expect("generated net is well formed");
        if net.initial().count_ones(..) == 0 {
            continue;
        }
        if let SafetyReport::Safe { .. } = validate_safe(&net, 10_000) {
            return net;
        }
    }
}

fn atoms(net: &PetriNetWithTransits, transitions: bool) -> Vec<String> {
    let mut v: Vec<String> = net.places().to_vec();
    if transitions {
        v.extend(net.transitions().iter().cloned());
    }
    v
}

/// Random LTL formula text with at most `size` operators and atoms.
pub fn random_ltl<R: Rng>(rng: &mut R, net: &PetriNetWithTransits, size: usize) -> String {
    let atoms = atoms(net, true);
    ltl_rec(rng, &atoms, size.max(1))
}

fn ltl_rec<R: Rng>(rng: &mut R, atoms: &[String], size: usize) -> String {
    if size == 1 || rng.gen_bool(0.2) {
        return atoms.choose(rng).unwrap().clone();
    }
    if size >= 3 && rng.gen_bool(0.4) {
        let left = rng.gen_range(1..=size - 2);
        let a = ltl_rec(rng, atoms, left);
        let b = ltl_rec(rng, atoms, size - 1 - left);
        let op = ["&", "|", "U", "R", "->"].choose(rng).unwrap();
        return format!("({a} {op} {b})");
    }
    let op = ["!", "X", "F", "G"].choose(rng).unwrap();
    format!("{op} ({})", ltl_rec(rng, atoms, size - 1))
}

/// Random CTL state formula text with at most `size` operators and atoms.
pub fn random_ctl<R: Rng>(rng: &mut R, net: &PetriNetWithTransits, size: usize) -> String {
    let atoms = atoms(net, true);
    ctl_rec(rng, &atoms, size.max(1))
}

fn ctl_rec<R: Rng>(rng: &mut R, atoms: &[String], size: usize) -> String {
    if size == 1 || rng.gen_bool(0.2) {
        return atoms.choose(rng).unwrap().clone();
    }
    if size >= 3 && rng.gen_bool(0.4) {
        let left = rng.gen_range(1..=size - 2);
        let a = ctl_rec(rng, atoms, left);
        let b = ctl_rec(rng, atoms, size - 1 - left);
        return match rng.gen_range(0..4) {
            0 => format!("({a} & {b})"),
            1 => format!("({a} | {b})"),
            2 => format!("E ({a} U {b})"),
            _ => format!("A ({a} U {b})"),
        };
    }
    let op = ["!", "EX", "AX", "EF", "AF", "EG", "AG"].choose(rng).unwrap();
    format!("{op} ({})", ctl_rec(rng, atoms, size - 1))
}
