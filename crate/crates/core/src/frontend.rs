//! Building layouts, their encoding as nets with transits, and formula
//! templates for access-control properties and run assumptions.
//!
//! Layout format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! room hall
//! door enterHall: OUTSIDE -> hall
//! door hall_lab: hall -> lab controllable
//! door hall_kitchen: hall -> kitchen controllable closed
//! entry enterHall
//! exit leaveHall
//! update evening: open{} close{hall_kitchen}
//! ```

use std::collections::BTreeSet;

use thiserror::Error;

use crate::logic::{parse_flow, FlowCtlStar, Ltl, ParseError};
use crate::net::{is_identifier, Net, NetBuilder, NetError, PetriNetWithTransits};

pub const OUTSIDE: &str = "OUTSIDE";

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown room `{0}`")]
    UnknownRoom(String),
    #[error("unknown door `{0}`")]
    UnknownDoor(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("door `{0}` connects OUTSIDE but is not declared as entry or exit")]
    Undeclared(String),
    #[error("door `{door}` cannot be an {role}")]
    BadRole { door: String, role: &'static str },
    #[error("update `{update}` changes door `{door}`, which is not controllable")]
    NotControllable { update: String, door: String },
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Door {
    pub id: String,
    pub from: String,
    pub to: String,
    pub controllable: bool,
    /// Initial state of a controllable door.
    pub open: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Update {
    pub name: String,
    pub open: Vec<String>,
    pub close: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildingLayout {
    pub rooms: Vec<String>,
    pub doors: Vec<Door>,
    pub entries: BTreeSet<String>,
    pub exits: BTreeSet<String>,
    pub updates: Vec<Update>,
}

impl BuildingLayout {
    pub fn door(&self, id: &str) -> Option<&Door> {
        self.doors.iter().find(|d| d.id == id)
    }

    fn validate(&self) -> Result<(), LayoutError> {
        let rooms: BTreeSet<&str> = self.rooms.iter().map(String::as_str).collect();
        for d in &self.doors {
            for end in [&d.from, &d.to] {
                if end != OUTSIDE && !rooms.contains(end.as_str()) {
                    return Err(LayoutError::UnknownRoom(end.clone()));
                }
            }
            let from_out = d.from == OUTSIDE;
            let to_out = d.to == OUTSIDE;
            if from_out && to_out {
                return Err(LayoutError::BadRole {
                    door: d.id.clone(),
                    role: "inner door",
                });
            }
            if (from_out && !self.entries.contains(&d.id)) || (to_out && !self.exits.contains(&d.id)) {
                return Err(LayoutError::Undeclared(d.id.clone()));
            }
        }
        for (set, role, outside_end) in [(&self.entries, "entry", true), (&self.exits, "exit", false)] {
            for id in set {
                let d = self
                    .door(id)
                    .ok_or_else(|| LayoutError::UnknownDoor(id.clone()))?;
                let end = if outside_end { &d.from } else { &d.to };
                if end != OUTSIDE {
                    return Err(LayoutError::BadRole {
                        door: id.clone(),
                        role,
                    });
                }
            }
        }
        for u in &self.updates {
            for id in u.open.iter().chain(&u.close) {
                let d = self
                    .door(id)
                    .ok_or_else(|| LayoutError::UnknownDoor(id.clone()))?;
                if !d.controllable {
                    return Err(LayoutError::NotControllable {
                        update: u.name.clone(),
                        door: id.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

pub fn parse_layout(src: &str) -> Result<BuildingLayout, LayoutError> {
    let mut l = BuildingLayout::default();
    let mut names = BTreeSet::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| LayoutError::Syntax {
            line: i + 1,
            msg: msg.to_string(),
        };
        let ident = |s: &str| -> Result<String, LayoutError> {
            if is_identifier(s) {
                Ok(s.to_string())
            } else {
                Err(err(&format!("invalid identifier `{s}`")))
            }
        };
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match kw {
            "room" => {
                let r = ident(rest)?;
                if r == OUTSIDE || !names.insert(r.clone()) {
                    return Err(LayoutError::Duplicate(r));
                }
                l.rooms.push(r);
            }
            "door" => {
                let (id, body) = rest
                    .split_once(':')
                    .ok_or_else(|| err("expected `door <id>: <from> -> <to>`"))?;
                let id = ident(id.trim())?;
                let (from, tail) = body
                    .split_once("->")
                    .ok_or_else(|| err("expected `->`"))?;
                let mut words = tail.split_whitespace();
                let to = words.next().ok_or_else(|| err("missing target room"))?;
                let mut controllable = false;
                let mut open = true;
                for w in words {
                    match w {
                        "controllable" => controllable = true,
                        "closed" => open = false,
                        _ => return Err(err(&format!("unexpected `{w}`"))),
                    }
                }
                if !open && !controllable {
                    return Err(err("only controllable doors can start closed"));
                }
                if !names.insert(id.clone()) {
                    return Err(LayoutError::Duplicate(id));
                }
                l.doors.push(Door {
                    id,
                    from: ident(from.trim())?,
                    to: ident(to)?,
                    controllable,
                    open,
                });
            }
            "entry" | "exit" => {
                let set = if kw == "entry" { &mut l.entries } else { &mut l.exits };
                if !set.insert(ident(rest)?) {
                    return Err(LayoutError::Duplicate(rest.to_string()));
                }
            }
            "update" => {
                let (name, body) = rest
                    .split_once(':')
                    .ok_or_else(|| err("expected `update <name>: open{..} close{..}`"))?;
                let name = ident(name.trim())?;
                if !names.insert(name.clone()) {
                    return Err(LayoutError::Duplicate(name));
                }
                let group = |key: &str| -> Result<Vec<String>, LayoutError> {
                    let Some(start) = body.find(&format!("{key}{{")) else {
                        return Ok(Vec::new());
                    };
                    let inner = &body[start + key.len() + 1..];
                    let end = inner.find('}').ok_or_else(|| err("missing `}`"))?;
                    inner[..end]
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|s| !s.is_empty())
                        .map(ident)
                        .collect()
                };
                l.updates.push(Update {
                    name,
                    open: group("open")?,
                    close: group("close")?,
                });
            }
            _ => return Err(err(&format!("unknown declaration `{kw}`"))),
        }
    }
    l.validate()?;
    Ok(l)
}

/// Net for a layout plus a table from generated transition names to the
/// doors they stand for.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub net: PetriNetWithTransits,
    pub names: Vec<(String, String)>,
}

impl Encoding {
    /// Comment lines for the net text format.
    pub fn name_table(&self) -> String {
        let mut out = String::from("# Name mangling:\n");
        for (name, meaning) in &self.names {
            out.push_str(&format!("#   {name} = {meaning}\n"));
        }
        out
    }
}

fn open_place(d: &str) -> String {
    format!("o_{d}")
}

fn closed_place(d: &str) -> String {
    format!("c_{d}")
}

/// Encodes a layout: rooms become marked places, doors and updates transitions.
///
/// Each room gets one splitting transition per nonempty set of open outgoing
/// doors. Its guard reads `o_` of the open and `c_` of the closed
/// controllable doors, so at most one of them is enabled.
pub fn building_to_pnwt(layout: &BuildingLayout) -> Result<Encoding, LayoutError> {
    layout.validate()?;
    let mut b = NetBuilder::new();
    let mut names = Vec::new();
    for r in &layout.rooms {
        b.place(r, true);
    }
    for d in layout.doors.iter().filter(|d| d.controllable) {
        b.place(&open_place(&d.id), d.open);
        b.place(&closed_place(&d.id), !d.open);
    }
    for d in &layout.doors {
        if layout.entries.contains(&d.id) {
            b.transition(&d.id).read_arc(&d.to, &d.id);
            b.transit(&d.id, None, &d.to).transit(&d.id, Some(&d.to), &d.to);
        } else if layout.exits.contains(&d.id) {
            b.transition(&d.id).read_arc(&d.from, &d.id);
        } else {
            continue;
        }
        if d.controllable {
            b.read_arc(&open_place(&d.id), &d.id);
        }
        names.push((d.id.clone(), format!("{} -> {}", d.from, d.to)));
    }
    for room in &layout.rooms {
        let out: Vec<&Door> = layout
            .doors
            .iter()
            .filter(|d| &d.from == room && d.to != OUTSIDE)
            .collect();
        let (fixed, ctrl): (Vec<&Door>, Vec<&Door>) = out.iter().partition(|d| !d.controllable);
        for mask in 0u64..(1 << ctrl.len()) {
            let open: Vec<&Door> = out
                .iter()
                .copied()
                .filter(|d| {
                    fixed.iter().any(|f| f.id == d.id)
                        || ctrl
                            .iter()
                            .position(|c| c.id == d.id)
                            .is_some_and(|i| mask >> i & 1 == 1)
                })
                .collect();
            if open.is_empty() {
                continue;
            }
            let name = if open.len() == 1 {
                open[0].id.clone()
            } else {
                let ts: Vec<&str> = open.iter().map(|d| d.to.as_str()).collect();
                format!("{room}_[{}]", ts.join(","))
            };
            b.transition(&name).read_arc(room, &name);
            for (i, c) in ctrl.iter().enumerate() {
                let place = if mask >> i & 1 == 1 {
                    open_place(&c.id)
                } else {
                    closed_place(&c.id)
                };
                b.read_arc(&place, &name);
            }
            let targets: BTreeSet<&str> = open.iter().map(|d| d.to.as_str()).collect();
            for t in &targets {
                if *t != room {
                    b.read_arc(t, &name);
                }
                b.transit(&name, Some(room), t);
                if *t != room {
                    b.transit(&name, Some(t), t);
                }
            }
            let ts: Vec<&str> = open.iter().map(|d| d.to.as_str()).collect();
            names.push((name, format!("{room} -> [{}]", ts.join(","))));
        }
    }
    for u in &layout.updates {
        b.transition(&u.name);
        for d in &u.open {
            b.arc(&closed_place(d), &u.name).arc(&u.name, &open_place(d));
        }
        for d in &u.close {
            b.arc(&open_place(d), &u.name).arc(&u.name, &closed_place(d));
        }
        for r in &layout.rooms {
            b.read_arc(r, &u.name).transit(&u.name, Some(r), r);
        }
        names.push((u.name.clone(), "policy update".into()));
    }
    Ok(Encoding {
        net: b.build_transits()?,
        names,
    })
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("unknown template `{0}`")]
    Unknown(String),
    #[error("template `{name}` takes {expected} arguments, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Names accepted by [`property_template`].
pub const PROPERTY_TEMPLATES: [&str; 7] = [
    "permission",
    "persistent_permission",
    "prohibition",
    "blocking",
    "waypointing",
    "policy_update",
    "emergency",
];

/// Access-control property from a template. Arguments are CTL* state
/// formulas in the usual syntax.
pub fn property_template(name: &str, args: &[&str]) -> Result<FlowCtlStar, TemplateError> {
    let want = match name {
        "permission" | "persistent_permission" | "prohibition" => 1,
        "blocking" | "waypointing" | "policy_update" | "emergency" => 2,
        _ => return Err(TemplateError::Unknown(name.to_string())),
    };
    if args.len() != want {
        return Err(TemplateError::Arity {
            name: name.to_string(),
            expected: want,
            got: args.len(),
        });
    }
    let a = |i: usize| format!("({})", args[i]);
    let text = match name {
        "permission" => format!("A EF {}", a(0)),
        "persistent_permission" => format!("A AG EF {}", a(0)),
        "prohibition" => format!("A AG !{}", a(0)),
        "blocking" => format!("A AG ({} -> AG !{})", a(0), a(1)),
        "waypointing" => format!("A {} AR !{}", a(0), a(1)),
        "policy_update" => format!("A AG ({} -> EF {})", a(0), a(1)),
        _ => format!("A (AG !{}) AU (X {})", a(0), a(1)),
    };
    Ok(parse_flow(&text)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assumption {
    InterleavingMax,
    ConcurrencyMax,
    WeakFair(String),
    StrongFair(String),
}

fn pre(net: &Net, t: usize) -> Ltl {
    Ltl::all(net.pre(t).iter().map(|&p| Ltl::atom(&net.places()[p])))
}

fn gf(f: Ltl) -> Ltl {
    Ltl::globally(Ltl::eventually(f))
}

fn fg(f: Ltl) -> Ltl {
    Ltl::eventually(Ltl::globally(f))
}

/// Run assumption as an LTL formula; `pre(t)` is the conjunction of the preset.
pub fn assumption_template(kind: &Assumption, net: &Net) -> Result<Ltl, TemplateError> {
    let index = |t: &str| {
        net.transition_index(t)
            .ok_or_else(|| TemplateError::UnknownTransition(t.to_string()))
    };
    let all = 0..net.transitions().len();
    let name = |t: usize| Ltl::atom(&net.transitions()[t]);
    Ok(match kind {
        Assumption::WeakFair(t) => {
            let t = index(t)?;
            Ltl::implies(fg(pre(net, t)), gf(name(t)))
        }
        Assumption::StrongFair(t) => {
            let t = index(t)?;
            Ltl::implies(gf(pre(net, t)), gf(name(t)))
        }
        Assumption::InterleavingMax => Ltl::globally(Ltl::implies(
            Ltl::any(all.clone().map(|t| pre(net, t))),
            Ltl::any(all.map(|t| Ltl::next(name(t)))),
        )),
        Assumption::ConcurrencyMax => Ltl::all(all.map(|t| {
            let rivals: BTreeSet<usize> = net
                .pre(t)
                .iter()
                .flat_map(|&p| net.consumers(p).iter().copied())
                .collect();
            Ltl::implies(fg(pre(net, t)), gf(Ltl::any(rivals.into_iter().map(name))))
        })),
    })
}

/// Weak fairness for every listed transition, as one conjunction.
pub fn weak_fairness(net: &Net, transitions: &[&str]) -> Result<Ltl, TemplateError> {
    let parts = transitions
        .iter()
        .map(|t| assumption_template(&Assumption::WeakFair(t.to_string()), net))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Ltl::all(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_ltl;

    #[test]
    fn single_room_with_entry() {
        let l = parse_layout("room r\ndoor in: OUTSIDE -> r\nentry in\n").unwrap();
        let e = building_to_pnwt(&l).unwrap();
        let n = &e.net;
        assert_eq!(n.places(), ["r"]);
        assert_eq!(n.transitions(), ["in"]);
        assert_eq!(n.transit_targets(0, None), vec![0]);
    }

    #[test]
    fn two_open_doors_split() {
        let l = parse_layout("room a\nroom b\nroom c\ndoor ab: a -> b\ndoor ac: a -> c\n").unwrap();
        let n = building_to_pnwt(&l).unwrap().net;
        assert_eq!(n.transitions(), ["a_[b,c]"]);
        let a = n.place_index("a").unwrap();
        assert_eq!(n.transit_targets(0, Some(a)).len(), 2);
    }

    #[test]
    fn layout_errors() {
        assert!(matches!(
            parse_layout("room a\ndoor d: OUTSIDE -> a\n"),
            Err(LayoutError::Undeclared(_))
        ));
        assert!(matches!(
            parse_layout("room a\ndoor d: a -> b\n"),
            Err(LayoutError::UnknownRoom(_))
        ));
        assert!(matches!(
            parse_layout("room a\nroom b\ndoor d: a -> b\nupdate u: close{d}\n"),
            Err(LayoutError::NotControllable { .. })
        ));
        assert!(matches!(
            parse_layout("room a\nroom a\n"),
            Err(LayoutError::Duplicate(_))
        ));
        assert!(matches!(parse_layout("hall\n"), Err(LayoutError::Syntax { line: 1, .. })));
    }

    #[test]
    fn templates() {
        let f = property_template("permission", &["lab"]).unwrap();
        assert_eq!(f, parse_flow("A EF lab").unwrap());
        let f = property_template("emergency", &["kitchen", "emergency_t"]).unwrap();
        assert_eq!(f, parse_flow("A (AG !kitchen) AU (X emergency_t)").unwrap());
        let f = property_template("blocking", &["labA", "labB"]).unwrap();
        assert_eq!(f, parse_flow("A AG (labA -> AG !labB)").unwrap());
        assert!(matches!(
            property_template("nope", &[]),
            Err(TemplateError::Unknown(_))
        ));
        assert!(matches!(
            property_template("blocking", &["a"]),
            Err(TemplateError::Arity { .. })
        ));
    }

    #[test]
    fn assumptions() {
        let mut b = NetBuilder::new();
        b.place("p", true).place("q", false).transition("t").transition("u");
        b.arc("p", "t").arc("t", "q");
        let n = b.build_transits().unwrap();
        let wf = assumption_template(&Assumption::WeakFair("t".into()), &n).unwrap();
        assert_eq!(wf, parse_ltl("F G p -> G F t").unwrap());
        let sf = assumption_template(&Assumption::StrongFair("u".into()), &n).unwrap();
        assert_eq!(sf, parse_ltl("G F true -> G F u").unwrap());
        assert!(assumption_template(&Assumption::WeakFair("x".into()), &n).is_err());
        let cm = assumption_template(&Assumption::ConcurrencyMax, &n).unwrap();
        assert_eq!(cm, parse_ltl("(F G p -> G F t) & (F G true -> G F false)").unwrap());
    }
}
