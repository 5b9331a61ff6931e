//! Concrete syntax shared by LTL, CTL* and Flow-CTL*.
//!
//! Precedence, loosest first: `->`/`<->` (right-associative), `|`, `&`,
//! `U`/`R` (right-associative), then unary operators. A lone `A` or `E`
//! scopes over everything to its right; `AG`, `EF` and friends are unary.
//! Infix `AU`, `EU`, `AR`, `ER` quantify the until/release they form.

use thiserror::Error;

use super::{FlowCtlStar, Ltl, PathF, StateF};
use crate::net::is_ident_char;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quant {
    A,
    E,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    X,
    F,
    G,
    U,
    R,
    Q(Quant),
    QUntil(Quant),
    QRelease(Quant),
    Glued(Quant, Temp),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Temp {
    X,
    F,
    G,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two: String = bytes[i..(i + 2).min(bytes.len())].iter().collect();
        let three: String = bytes[i..(i + 3).min(bytes.len())].iter().collect();
        if three == "<->" {
            out.push((start, Tok::Iff));
            i += 3;
            continue;
        }
        if two == "->" {
            out.push((start, Tok::Implies));
            i += 2;
            continue;
        }
        match c {
            '!' => out.push((start, Tok::Not)),
            '&' => out.push((start, Tok::And)),
            '|' => out.push((start, Tok::Or)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i + 1;
                while j < bytes.len()
                    && is_ident_char(bytes[j])
                    && !(bytes[j] == '-' && bytes.get(j + 1) == Some(&'>'))
                {
                    j += 1;
                }
                let word: String = bytes[i..j].iter().collect();
                i = j;
                let toks: &[Tok] = match word.as_str() {
                    "true" => &[Tok::True],
                    "false" => &[Tok::False],
                    "X" => &[Tok::X],
                    "F" => &[Tok::F],
                    "G" => &[Tok::G],
                    "U" => &[Tok::U],
                    "R" => &[Tok::R],
                    "A" => &[Tok::Q(Quant::A)],
                    "E" => &[Tok::Q(Quant::E)],
                    "AU" => &[Tok::QUntil(Quant::A)],
                    "EU" => &[Tok::QUntil(Quant::E)],
                    "AR" => &[Tok::QRelease(Quant::A)],
                    "ER" => &[Tok::QRelease(Quant::E)],
                    _ => &[],
                };
                if !toks.is_empty() {
                    out.push((start, toks[0].clone()));
                    continue;
                }
                // AG, EF, ... are a quantifier glued to a unary temporal operator
                if word.len() == 2 {
                    let mut cs = word.chars();
                    let (q, t) = (cs.next().unwrap(), cs.next().unwrap());
                    if matches!(q, 'A' | 'E') && matches!(t, 'X' | 'F' | 'G') {
                        let q = if q == 'A' { Quant::A } else { Quant::E };
                        let t = match t {
                            'X' => Temp::X,
                            'F' => Temp::F,
                            _ => Temp::G,
                        };
                        out.push((start, Tok::Glued(q, t)));
                        continue;
                    }
                }
                out.push((start, Tok::Ident(word)));
                continue;
            }
            other => {
                return Err(ParseError {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Untyped syntax tree; typed trees are derived from it.
#[derive(Debug, Clone)]
enum Raw {
    True,
    False,
    Atom(String),
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Implies(Box<Raw>, Box<Raw>),
    Iff(Box<Raw>, Box<Raw>),
    X(Box<Raw>),
    F(Box<Raw>),
    G(Box<Raw>),
    U(Box<Raw>, Box<Raw>),
    R(Box<Raw>, Box<Raw>),
    Q(Quant, Box<Raw>),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        match self.toks.get(self.pos) {
            Some((o, _)) => *o,
            None => self.end,
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.offset(),
            msg: msg.to_string(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn implies(&mut self) -> Result<Raw, ParseError> {
        let lhs = self.or()?;
        match self.peek() {
            Some(Tok::Implies) => {
                self.bump();
                Ok(Raw::Implies(Box::new(lhs), Box::new(self.implies()?)))
            }
            Some(Tok::Iff) => {
                self.bump();
                Ok(Raw::Iff(Box::new(lhs), Box::new(self.implies()?)))
            }
            _ => Ok(lhs),
        }
    }

    fn or(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            lhs = Raw::Or(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            lhs = Raw::And(Box::new(lhs), Box::new(self.until()?));
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Raw, ParseError> {
        let lhs = self.unary()?;
        let mk = |q: Option<Quant>, r: Raw| match q {
            Some(q) => Raw::Q(q, Box::new(r)),
            None => r,
        };
        match self.peek().cloned() {
            Some(Tok::U) => {
                self.bump();
                Ok(Raw::U(Box::new(lhs), Box::new(self.until()?)))
            }
            Some(Tok::R) => {
                self.bump();
                Ok(Raw::R(Box::new(lhs), Box::new(self.until()?)))
            }
            Some(Tok::QUntil(q)) => {
                self.bump();
                let rhs = self.until()?;
                Ok(mk(Some(q), Raw::U(Box::new(lhs), Box::new(rhs))))
            }
            Some(Tok::QRelease(q)) => {
                self.bump();
                let rhs = self.until()?;
                Ok(mk(Some(q), Raw::R(Box::new(lhs), Box::new(rhs))))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Raw, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.bump();
                Ok(Raw::Not(Box::new(self.unary()?)))
            }
            Some(Tok::X) => {
                self.bump();
                Ok(Raw::X(Box::new(self.unary()?)))
            }
            Some(Tok::F) => {
                self.bump();
                Ok(Raw::F(Box::new(self.unary()?)))
            }
            Some(Tok::G) => {
                self.bump();
                Ok(Raw::G(Box::new(self.unary()?)))
            }
            Some(Tok::Q(q)) => {
                self.bump();
                Ok(Raw::Q(q, Box::new(self.implies()?)))
            }
            Some(Tok::Glued(q, t)) => {
                self.bump();
                let body = Box::new(self.unary()?);
                let inner = match t {
                    Temp::X => Raw::X(body),
                    Temp::F => Raw::F(body),
                    Temp::G => Raw::G(body),
                };
                Ok(Raw::Q(q, Box::new(inner)))
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.implies()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => {
                        self.pos -= 1;
                        self.err("expected `)`")
                    }
                }
            }
            Some(Tok::True) => {
                self.bump();
                Ok(Raw::True)
            }
            Some(Tok::False) => {
                self.bump();
                Ok(Raw::False)
            }
            Some(Tok::Ident(a)) => {
                self.bump();
                Ok(Raw::Atom(a))
            }
            Some(t) => self.err(&format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

fn parse_raw(src: &str) -> Result<Raw, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    let r = p.implies()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(r)
}

fn perr<T>(msg: &str) -> Result<T, ParseError> {
    Err(ParseError {
        pos: 0,
        msg: msg.to_string(),
    })
}

fn has_quant(r: &Raw) -> bool {
    match r {
        Raw::True | Raw::False | Raw::Atom(_) => false,
        Raw::Q(..) => true,
        Raw::Not(a) | Raw::X(a) | Raw::F(a) | Raw::G(a) => has_quant(a),
        Raw::And(a, b)
        | Raw::Or(a, b)
        | Raw::Implies(a, b)
        | Raw::Iff(a, b)
        | Raw::U(a, b)
        | Raw::R(a, b) => has_quant(a) || has_quant(b),
    }
}

/// True if no temporal operator occurs outside a quantifier.
fn is_state(r: &Raw) -> bool {
    match r {
        Raw::True | Raw::False | Raw::Atom(_) | Raw::Q(..) => true,
        Raw::X(_) | Raw::F(_) | Raw::G(_) | Raw::U(..) | Raw::R(..) => false,
        Raw::Not(a) => is_state(a),
        Raw::And(a, b) | Raw::Or(a, b) | Raw::Implies(a, b) | Raw::Iff(a, b) => {
            is_state(a) && is_state(b)
        }
    }
}

fn to_ltl(r: &Raw) -> Result<Ltl, ParseError> {
    let b = |x: &Raw| to_ltl(x);
    Ok(match r {
        Raw::True => Ltl::True,
        Raw::False => Ltl::fals(),
        Raw::Atom(a) => Ltl::atom(a),
        Raw::Not(a) => Ltl::not(b(a)?),
        Raw::And(x, y) => Ltl::and(b(x)?, b(y)?),
        Raw::Or(x, y) => Ltl::or(b(x)?, b(y)?),
        Raw::Implies(x, y) => Ltl::implies(b(x)?, b(y)?),
        Raw::Iff(x, y) => Ltl::iff(b(x)?, b(y)?),
        Raw::X(a) => Ltl::next(b(a)?),
        Raw::F(a) => Ltl::eventually(b(a)?),
        Raw::G(a) => Ltl::globally(b(a)?),
        Raw::U(x, y) => Ltl::until(b(x)?, b(y)?),
        Raw::R(x, y) => Ltl::release(b(x)?, b(y)?),
        Raw::Q(..) => return perr("path quantifiers are not allowed in LTL"),
    })
}

fn to_state(r: &Raw) -> Result<StateF, ParseError> {
    let s = |x: &Raw| to_state(x);
    Ok(match r {
        Raw::True => StateF::True,
        Raw::False => StateF::fals(),
        Raw::Atom(a) => StateF::atom(a),
        Raw::Not(a) => StateF::not(s(a)?),
        Raw::And(x, y) => StateF::and(s(x)?, s(y)?),
        Raw::Or(x, y) => StateF::or(s(x)?, s(y)?),
        Raw::Implies(x, y) => StateF::implies(s(x)?, s(y)?),
        Raw::Iff(x, y) => StateF::iff(s(x)?, s(y)?),
        Raw::Q(Quant::E, body) => StateF::exists(to_path(body)?),
        Raw::Q(Quant::A, body) => StateF::forall(to_path(body)?),
        Raw::X(_) | Raw::F(_) | Raw::G(_) | Raw::U(..) | Raw::R(..) => {
            return perr("temporal operator outside a path quantifier")
        }
    })
}

fn to_path(r: &Raw) -> Result<PathF, ParseError> {
    if is_state(r) {
        return Ok(PathF::state(to_state(r)?));
    }
    let p = |x: &Raw| to_path(x);
    Ok(match r {
        Raw::Not(a) => PathF::not(p(a)?),
        Raw::And(x, y) => PathF::and(p(x)?, p(y)?),
        Raw::Or(x, y) => PathF::or(p(x)?, p(y)?),
        Raw::Implies(x, y) => PathF::implies(p(x)?, p(y)?),
        Raw::Iff(x, y) => PathF::iff(p(x)?, p(y)?),
        Raw::X(a) => PathF::next(p(a)?),
        Raw::F(a) => PathF::eventually(p(a)?),
        Raw::G(a) => PathF::globally(p(a)?),
        Raw::U(x, y) => PathF::until(p(x)?, p(y)?),
        Raw::R(x, y) => PathF::release(p(x)?, p(y)?),
        _ => unreachable!("state formulas handled above"),
    })
}

const GRAMMAR: &str = "ψ ::= φ | ψ & ψ | ψ | ψ | φ -> ψ | A Φ";

fn to_flow(r: &Raw) -> Result<FlowCtlStar, ParseError> {
    if !has_quant(r) {
        return Ok(FlowCtlStar::Ltl(to_ltl(r)?));
    }
    match r {
        Raw::And(a, b) => Ok(FlowCtlStar::and(to_flow(a)?, to_flow(b)?)),
        Raw::Or(a, b) => Ok(FlowCtlStar::or(to_flow(a)?, to_flow(b)?)),
        Raw::Implies(a, b) => {
            if has_quant(a) {
                return perr(&format!(
                    "a flow formula may not appear left of `->` at run level ({GRAMMAR})"
                ));
            }
            Ok(FlowCtlStar::implies(to_ltl(a)?, to_flow(b)?))
        }
        Raw::Q(Quant::A, body) => {
            if is_state(body) {
                Ok(FlowCtlStar::Flow(to_state(body)?))
            } else {
                Ok(FlowCtlStar::Flow(to_state(r)?))
            }
        }
        Raw::Q(Quant::E, _) => perr(&format!(
            "flow formulas start with `A`; `E` is not allowed at run level ({GRAMMAR})"
        )),
        Raw::Not(_) => perr(&format!(
            "negation of a flow formula at run level is not in the grammar ({GRAMMAR})"
        )),
        Raw::Iff(..) => perr(&format!(
            "`<->` over a flow formula at run level is not in the grammar ({GRAMMAR})"
        )),
        _ => perr(&format!(
            "temporal operator over a flow formula at run level is not in the grammar ({GRAMMAR})"
        )),
    }
}

pub fn parse_ltl(src: &str) -> Result<Ltl, ParseError> {
    to_ltl(&parse_raw(src)?)
}

/// Parses a CTL* state formula.
pub fn parse_ctlstar(src: &str) -> Result<StateF, ParseError> {
    to_state(&parse_raw(src)?)
}

pub fn parse_flow(src: &str) -> Result<FlowCtlStar, ParseError> {
    to_flow(&parse_raw(src)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let f = parse_ltl("a U b & c | d -> e").unwrap();
        let want = Ltl::implies(
            Ltl::or(
                Ltl::and(Ltl::until(Ltl::atom("a"), Ltl::atom("b")), Ltl::atom("c")),
                Ltl::atom("d"),
            ),
            Ltl::atom("e"),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse_ltl("a -> b -> c").unwrap();
        let want = Ltl::implies(
            Ltl::atom("a"),
            Ltl::implies(Ltl::atom("b"), Ltl::atom("c")),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn identifiers_with_brackets() {
        let f = parse_ltl("hall_[l,k] -> X hall_lab").unwrap();
        assert_eq!(
            f,
            Ltl::implies(Ltl::atom("hall_[l,k]"), Ltl::next(Ltl::atom("hall_lab")))
        );
    }

    #[test]
    fn glued_quantifiers_are_tight() {
        let f = parse_ctlstar("EF a & EF b").unwrap();
        assert_eq!(
            f,
            StateF::and(StateF::ef(StateF::atom("a")), StateF::ef(StateF::atom("b")))
        );
    }

    #[test]
    fn flow_top_level() {
        let f = parse_flow("A AG EF lab").unwrap();
        assert_eq!(
            f,
            FlowCtlStar::Flow(StateF::ag(StateF::ef(StateF::atom("lab"))))
        );
        let g = parse_flow("G a -> A AG b").unwrap();
        assert!(matches!(g, FlowCtlStar::Implies(..)));
    }

    #[test]
    fn flow_infix_quantifier() {
        let f = parse_flow("A (EF kitchen) AU evening").unwrap();
        let want = StateF::forall(PathF::until(
            PathF::state(StateF::ef(StateF::atom("kitchen"))),
            PathF::state(StateF::atom("evening")),
        ));
        assert_eq!(f, FlowCtlStar::Flow(want));
    }

    #[test]
    fn run_level_negation_rejected() {
        let e = parse_flow("!(A AG a)").unwrap_err();
        assert!(e.msg.contains("ψ ::="), "{}", e.msg);
        assert!(parse_flow("E F a").is_err());
        assert!(parse_flow("(A AG a) -> b").is_err());
        assert!(parse_flow("G (A AG a)").is_err());
    }

    #[test]
    fn plain_ltl_connectives_fold() {
        let f = parse_flow("a & b").unwrap();
        assert!(f.is_ltl());
    }

    #[test]
    fn errors_have_offsets() {
        let e = parse_ltl("a & (b | ").unwrap_err();
        assert_eq!(e.pos, 9);
        assert!(parse_ltl("a $ b").is_err());
        assert!(parse_ltl("a b").is_err());
    }

    #[test]
    fn printing_round_trips() {
        for src in [
            "G (a -> F b)",
            "a R (b U X !c)",
            "!(a & !b) | false",
            "G F a <-> F G b",
        ] {
            let f = parse_ltl(src).unwrap();
            assert_eq!(parse_ltl(&f.to_string()).unwrap(), f, "{src}");
        }
        for src in [
            "A AG EF lab",
            "A (G a | X E (b U c))",
            "G a -> A A(F b) ",
            "(A AG a) | (A EF b) & G c",
            "A (AG !x) AU (X em)",
        ] {
            let f = parse_flow(src).unwrap();
            assert_eq!(parse_flow(&f.to_string()).unwrap(), f, "{src}");
        }
    }
}
