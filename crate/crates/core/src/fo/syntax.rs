use std::collections::BTreeSet;
use std::fmt;

use crate::error::ParseError;
use crate::lex::{Cursor, Tok};
use crate::structure::Structure;

/// The three binary predicate symbols. `R` is the whole relation, `S` and
/// `P` its split into non-hub and hub-touching edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pred {
    R,
    S,
    P,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// The constant `d_<hub>`; the payload is the hub name.
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn hub(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(h) => write!(f, "d_{h}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FoFormula {
    True,
    False,
    Rel(Pred, Term, Term),
    Eq(Term, Term),
    /// A unary predicate, used by the standard translation for modal variables.
    Unary(String, Term),
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Exists(String, Box<FoFormula>),
    Forall(String, Box<FoFormula>),
}

use FoFormula as F;

impl FoFormula {
    pub fn rel(p: Pred, a: Term, b: Term) -> F {
        F::Rel(p, a, b)
    }

    pub fn eq(a: Term, b: Term) -> F {
        F::Eq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: F) -> F {
        F::Not(Box::new(f))
    }

    pub fn and(a: F, b: F) -> F {
        F::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: F, b: F) -> F {
        F::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: F, b: F) -> F {
        F::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, body: F) -> F {
        F::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<String>, body: F) -> F {
        F::Forall(v.into(), Box::new(body))
    }

    pub fn exists_many(vars: impl IntoIterator<Item = String>, body: F) -> F {
        let vars: Vec<String> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |acc, v| F::exists(v, acc))
    }

    /// Left-nested conjunction; `True` when empty.
    pub fn conj(parts: impl IntoIterator<Item = F>) -> F {
        parts.into_iter().reduce(F::and).unwrap_or(F::True)
    }

    /// Left-nested disjunction; `False` when empty.
    pub fn disj(parts: impl IntoIterator<Item = F>) -> F {
        parts.into_iter().reduce(F::or).unwrap_or(F::False)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn term(t: &Term, bound: &[String], out: &mut BTreeSet<String>) {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        }
        fn go(f: &F, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                F::True | F::False => {}
                F::Rel(_, a, b) | F::Eq(a, b) => {
                    term(a, bound, out);
                    term(b, bound, out);
                }
                F::Unary(_, t) => term(t, bound, out),
                F::Not(a) => go(a, bound, out),
                F::And(a, b) | F::Or(a, b) | F::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                F::Exists(v, a) | F::Forall(v, a) => {
                    bound.push(v.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn quantifier_rank(&self) -> usize {
        match self {
            F::True | F::False | F::Rel(..) | F::Eq(..) | F::Unary(..) => 0,
            F::Not(a) => a.quantifier_rank(),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) => a.quantifier_rank().max(b.quantifier_rank()),
            F::Exists(_, a) | F::Forall(_, a) => 1 + a.quantifier_rank(),
        }
    }

    pub fn predicates(&self) -> BTreeSet<Pred> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let F::Rel(p, ..) = f {
                out.insert(*p);
            }
        });
        out
    }

    /// Hub names of all constants used.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            let mut add = |t: &Term| {
                if let Term::Const(h) = t {
                    out.insert(h.clone());
                }
            };
            match f {
                F::Rel(_, a, b) | F::Eq(a, b) => {
                    add(a);
                    add(b);
                }
                F::Unary(_, t) => add(t),
                _ => {}
            }
        });
        out
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&F)) {
        f(self);
        match self {
            F::Not(a) | F::Exists(_, a) | F::Forall(_, a) => a.visit(f),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    fn prec(&self) -> u8 {
        match self {
            F::Implies(..) => 1,
            F::Or(..) => 2,
            F::And(..) => 3,
            F::Exists(..) | F::Forall(..) => 0,
            _ => 4,
        }
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Quantifier bodies extend to the right as far as possible, so a
        // quantifier is bracketed whenever it is not the whole formula or a
        // quantifier body.
        fn child(f: &mut fmt::Formatter<'_>, x: &F, min: u8) -> fmt::Result {
            if x.prec() < min {
                write!(f, "({x})")
            } else {
                write!(f, "{x}")
            }
        }
        match self {
            F::True => f.write_str("true"),
            F::False => f.write_str("false"),
            F::Rel(p, a, b) => write!(f, "{p:?}({a},{b})"),
            F::Eq(a, b) => write!(f, "{a} = {b}"),
            F::Unary(p, t) => write!(f, "{p}({t})"),
            F::Not(a) => {
                f.write_str("~")?;
                match **a {
                    F::Eq(..) => write!(f, "({a})"),
                    _ => child(f, a, 4),
                }
            }
            F::And(a, b) => {
                child(f, a, 3)?;
                f.write_str(" & ")?;
                child(f, b, 4)
            }
            F::Or(a, b) => {
                child(f, a, 2)?;
                f.write_str(" | ")?;
                child(f, b, 3)
            }
            F::Implies(a, b) => {
                child(f, a, 2)?;
                f.write_str(" -> ")?;
                child(f, b, 1)
            }
            F::Exists(v, a) => write!(f, "exists {v}. {a}"),
            F::Forall(v, a) => write!(f, "forall {v}. {a}"),
        }
    }
}

/// Parses the first-order grammar. Constants are `d_<hub>`; unary
/// predicates are lowercase identifiers applied to one term.
pub fn parse_fo(text: &str) -> Result<FoFormula, ParseError> {
    let mut c = Cursor::new(text)?;
    let f = implies(&mut c)?;
    if *c.peek() != Tok::End {
        return Err(c.error(format!("unexpected {} after formula", c.peek().describe())));
    }
    Ok(f)
}

/// [`parse_fo`], additionally rejecting constants that `s` does not have.
pub fn parse_fo_for(text: &str, s: &Structure) -> crate::error::Result<FoFormula> {
    let f = parse_fo(text)?;
    for h in f.constants() {
        s.constant(&format!("d_{h}"))?;
    }
    Ok(f)
}

/// `exists x. exists y. (R(x,x) & R(x,y) & ~R(y,y))`: a reflexive point
/// seeing an irreflexive one.
pub fn phi_star() -> FoFormula {
    let (x, y) = (|| Term::var("x"), || Term::var("y"));
    F::exists(
        "x",
        F::exists(
            "y",
            F::conj([F::rel(Pred::R, x(), x()), F::rel(Pred::R, x(), y()), F::not(F::rel(Pred::R, y(), y()))]),
        ),
    )
}

fn implies(c: &mut Cursor) -> Result<F, ParseError> {
    let lhs = or(c)?;
    if c.eat(&Tok::Implies) {
        Ok(F::implies(lhs, implies(c)?))
    } else {
        Ok(lhs)
    }
}

fn or(c: &mut Cursor) -> Result<F, ParseError> {
    let mut lhs = and(c)?;
    while c.eat(&Tok::Or) {
        lhs = F::or(lhs, and(c)?);
    }
    Ok(lhs)
}

fn and(c: &mut Cursor) -> Result<F, ParseError> {
    let mut lhs = unary(c)?;
    while c.eat(&Tok::And) {
        lhs = F::and(lhs, unary(c)?);
    }
    Ok(lhs)
}

fn is_var(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase()) && !s.starts_with("d_")
}

fn unary(c: &mut Cursor) -> Result<F, ParseError> {
    match c.peek().clone() {
        Tok::Not => {
            c.next();
            Ok(F::not(unary(c)?))
        }
        Tok::LParen => {
            c.next();
            let f = implies(c)?;
            c.expect(&Tok::RParen)?;
            Ok(f)
        }
        Tok::Ident(kw) if kw == "exists" || kw == "forall" => {
            c.next();
            let v = match c.next() {
                Tok::Ident(v) if is_var(&v) => v,
                t => return Err(c.error(format!("expected a variable after `{kw}`, found {}", t.describe()))),
            };
            c.expect(&Tok::Dot)?;
            let body = implies(c)?;
            Ok(if kw == "exists" { F::exists(v, body) } else { F::forall(v, body) })
        }
        Tok::Ident(kw) if kw == "true" => {
            c.next();
            Ok(F::True)
        }
        Tok::Ident(kw) if kw == "false" => {
            c.next();
            Ok(F::False)
        }
        Tok::Ident(name) if matches!(name.as_str(), "R" | "S" | "P") && *c.peek_at(1) == Tok::LParen => {
            c.next();
            c.next();
            let a = term(c)?;
            c.expect(&Tok::Comma)?;
            let b = term(c)?;
            c.expect(&Tok::RParen)?;
            let p = match name.as_str() {
                "R" => Pred::R,
                "S" => Pred::S,
                _ => Pred::P,
            };
            Ok(F::Rel(p, a, b))
        }
        Tok::Ident(name) if is_var(&name) && *c.peek_at(1) == Tok::LParen => {
            c.next();
            c.next();
            let t = term(c)?;
            c.expect(&Tok::RParen)?;
            Ok(F::Unary(name, t))
        }
        Tok::Ident(_) => {
            let a = term(c)?;
            c.expect(&Tok::Eq)?;
            let b = term(c)?;
            Ok(F::Eq(a, b))
        }
        t => Err(c.error(format!("expected a formula, found {}", t.describe()))),
    }
}

fn term(c: &mut Cursor) -> Result<Term, ParseError> {
    let col = c.col();
    match c.next() {
        Tok::Ident(s) => {
            if let Some(hub) = s.strip_prefix("d_") {
                if hub.is_empty() {
                    return Err(crate::error::ParseError::new(1, col, "constant `d_` names no hub"));
                }
                Ok(Term::Const(hub.to_string()))
            } else if is_var(&s) && !matches!(s.as_str(), "exists" | "forall" | "true" | "false") {
                Ok(Term::Var(s))
            } else {
                Err(crate::error::ParseError::new(1, col, format!("`{s}` is not a term")))
            }
        }
        t => Err(crate::error::ParseError::new(1, col, format!("expected a term, found {}", t.describe()))),
    }
}
