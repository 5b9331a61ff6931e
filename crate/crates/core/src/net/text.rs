//! Line-oriented net format.
//!
//! ```text
//! place hall init
//! transition enter
//! arc hall -> enter
//! transit enter: START -> hall
//! inhibit stutter -o enter
//! label enter_1 of enter
//! label t_hash_1 hash
//! ```

use std::fmt::Write;

use super::{InhibitorNet, Label, Net, NetBuilder, NetError, PetriNetWithTransits};

/// Parses the net format into a builder. `#` starts a comment.
pub fn parse_net_text(src: &str) -> Result<NetBuilder, NetError> {
    let mut b = NetBuilder::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| NetError::Syntax {
            line: i + 1,
            msg: msg.to_string(),
        };
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "format-version" => {
                if words[1..] != ["1"] {
                    return Err(err("unsupported format version"));
                }
            }
            "place" => match words[1..] {
                [p] => {
                    b.place(p, false);
                }
                [p, "init"] => {
                    b.place(p, true);
                }
                _ => return Err(err("expected `place <id> [init]`")),
            },
            "transition" => match words[1..] {
                [t] => {
                    b.transition(t);
                }
                _ => return Err(err("expected `transition <id>`")),
            },
            "arc" => match words[1..] {
                [a, "->", c] => {
                    b.arc(a, c);
                }
                _ => return Err(err("expected `arc <id> -> <id>`")),
            },
            "inhibit" => match words[1..] {
                [p, "-o", t] => {
                    b.inhibitor(p, t);
                }
                _ => return Err(err("expected `inhibit <place> -o <transition>`")),
            },
            "label" => match words[1..] {
                [t, "hash"] => {
                    b.label(t, Label::Hash);
                }
                [t, "of", l] => {
                    b.label(t, Label::Transition(l.to_string()));
                }
                _ => return Err(err("expected `label <id> of <id>` or `label <id> hash`")),
            },
            "transit" => {
                let rest = line["transit".len()..].trim();
                let (t, body) = rest
                    .split_once(':')
                    .ok_or_else(|| err("expected `transit <t>: <p>|START -> <q>`"))?;
                let parts: Vec<&str> = body.split_whitespace().collect();
                match parts[..] {
                    [from, "->", to] => {
                        let from = if from == "START" { None } else { Some(from) };
                        b.transit(t.trim(), from, to);
                    }
                    _ => return Err(err("expected `transit <t>: <p>|START -> <q>`")),
                }
            }
            other => return Err(err(&format!("unknown directive `{other}`"))),
        }
    }
    Ok(b)
}

/// Renders nets in the text format.
pub trait NetText {
    fn to_text(&self) -> String;
}

fn write_base(net: &Net, out: &mut String) {
    for (i, p) in net.places().iter().enumerate() {
        if net.initial().contains(i) {
            writeln!(out, "place {p} init").unwrap();
        } else {
            writeln!(out, "place {p}").unwrap();
        }
    }
    for t in net.transitions() {
        writeln!(out, "transition {t}").unwrap();
    }
    for (ti, t) in net.transitions().iter().enumerate() {
        for &p in net.pre(ti) {
            writeln!(out, "arc {} -> {t}", net.places()[p]).unwrap();
        }
        for &p in net.post(ti) {
            writeln!(out, "arc {t} -> {}", net.places()[p]).unwrap();
        }
    }
}

impl NetText for PetriNetWithTransits {
    fn to_text(&self) -> String {
        let mut out = String::new();
        write_base(self.net(), &mut out);
        for (ti, t) in self.transitions().iter().enumerate() {
            for tr in self.transits(ti) {
                let from = tr.from.map_or("START", |p| self.places()[p].as_str());
                writeln!(out, "transit {t}: {from} -> {}", self.places()[tr.to]).unwrap();
            }
        }
        out
    }
}

impl NetText for InhibitorNet {
    fn to_text(&self) -> String {
        let mut out = String::new();
        write_base(self.net(), &mut out);
        for (ti, t) in self.transitions().iter().enumerate() {
            for &p in self.inhibitors(ti) {
                writeln!(out, "inhibit {} -o {t}", self.places()[p]).unwrap();
            }
        }
        for (ti, t) in self.transitions().iter().enumerate() {
            match self.label(ti) {
                Some(Label::Hash) => writeln!(out, "label {t} hash").unwrap(),
                Some(Label::Transition(l)) => writeln!(out, "label {t} of {l}").unwrap(),
                None => {}
            }
        }
        out
    }
}

pub fn print_net_text(net: &impl NetText) -> String {
    net.to_text()
}
