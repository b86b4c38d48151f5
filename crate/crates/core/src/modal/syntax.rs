use std::collections::BTreeSet;
use std::fmt;

use crate::error::ParseError;
use crate::lex::{Cursor, Tok};

/// Modal formulas. `Box` is kept as its own node so printing preserves
/// the input form; semantically it is `~<>~`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModalFormula {
    True,
    False,
    Var(String),
    Not(Box<ModalFormula>),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    Implies(Box<ModalFormula>, Box<ModalFormula>),
    Diamond(Box<ModalFormula>),
    Box(Box<ModalFormula>),
}

use ModalFormula as M;

impl ModalFormula {
    pub fn var(name: impl Into<String>) -> M {
        M::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: M) -> M {
        M::Not(Box::new(a))
    }

    pub fn and(a: M, b: M) -> M {
        M::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: M, b: M) -> M {
        M::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: M, b: M) -> M {
        M::Implies(Box::new(a), Box::new(b))
    }

    pub fn dia(a: M) -> M {
        M::Diamond(Box::new(a))
    }

    pub fn boxed(a: M) -> M {
        M::Box(Box::new(a))
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            M::True | M::False => {}
            M::Var(v) => {
                out.insert(v.clone());
            }
            M::Not(a) | M::Diamond(a) | M::Box(a) => a.collect_vars(out),
            M::And(a, b) | M::Or(a, b) | M::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            M::True | M::False | M::Var(_) => 0,
            M::Not(a) => a.modal_depth(),
            M::Diamond(a) | M::Box(a) => 1 + a.modal_depth(),
            M::And(a, b) | M::Or(a, b) | M::Implies(a, b) => a.modal_depth().max(b.modal_depth()),
        }
    }

    /// Replaces every occurrence of variable `var` by `by`.
    pub fn substitute(&self, var: &str, by: &M) -> M {
        let s = |x: &M| Box::new(x.substitute(var, by));
        match self {
            M::Var(v) if v == var => by.clone(),
            M::True | M::False | M::Var(_) => self.clone(),
            M::Not(a) => M::Not(s(a)),
            M::Diamond(a) => M::Diamond(s(a)),
            M::Box(a) => M::Box(s(a)),
            M::And(a, b) => M::And(s(a), s(b)),
            M::Or(a, b) => M::Or(s(a), s(b)),
            M::Implies(a, b) => M::Implies(s(a), s(b)),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            M::Implies(..) => 1,
            M::Or(..) => 2,
            M::And(..) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for ModalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, x: &M, min: u8) -> fmt::Result {
            if x.prec() < min {
                write!(f, "({x})")
            } else {
                write!(f, "{x}")
            }
        }
        match self {
            M::True => f.write_str("true"),
            M::False => f.write_str("false"),
            M::Var(v) => f.write_str(v),
            M::Not(a) => {
                f.write_str("~")?;
                child(f, a, 4)
            }
            M::Diamond(a) => {
                f.write_str("<>")?;
                child(f, a, 4)
            }
            M::Box(a) => {
                f.write_str("[]")?;
                child(f, a, 4)
            }
            M::And(a, b) => {
                child(f, a, 3)?;
                f.write_str(" & ")?;
                child(f, b, 4)
            }
            M::Or(a, b) => {
                child(f, a, 2)?;
                f.write_str(" | ")?;
                child(f, b, 3)
            }
            M::Implies(a, b) => {
                child(f, a, 2)?;
                f.write_str(" -> ")?;
                child(f, b, 1)
            }
        }
    }
}

pub fn parse_modal(text: &str) -> Result<ModalFormula, ParseError> {
    let mut c = Cursor::new(text)?;
    let f = implies(&mut c)?;
    if *c.peek() != Tok::End {
        return Err(c.error(format!("unexpected {} after formula", c.peek().describe())));
    }
    Ok(f)
}

fn implies(c: &mut Cursor) -> Result<M, ParseError> {
    let lhs = or(c)?;
    if c.eat(&Tok::Implies) {
        Ok(M::implies(lhs, implies(c)?))
    } else {
        Ok(lhs)
    }
}

fn or(c: &mut Cursor) -> Result<M, ParseError> {
    let mut lhs = and(c)?;
    while c.eat(&Tok::Or) {
        lhs = M::or(lhs, and(c)?);
    }
    Ok(lhs)
}

fn and(c: &mut Cursor) -> Result<M, ParseError> {
    let mut lhs = unary(c)?;
    while c.eat(&Tok::And) {
        lhs = M::and(lhs, unary(c)?);
    }
    Ok(lhs)
}

fn unary(c: &mut Cursor) -> Result<M, ParseError> {
    let col = c.col();
    match c.next() {
        Tok::Not => Ok(M::not(unary(c)?)),
        Tok::Diamond => Ok(M::dia(unary(c)?)),
        Tok::Box => Ok(M::boxed(unary(c)?)),
        Tok::LParen => {
            let f = implies(c)?;
            c.expect(&Tok::RParen)?;
            Ok(f)
        }
        Tok::Ident(s) if s == "true" => Ok(M::True),
        Tok::Ident(s) if s == "false" => Ok(M::False),
        Tok::Ident(s) if s.starts_with(|ch: char| ch.is_ascii_lowercase()) => Ok(M::Var(s)),
        t => Err(ParseError::new(1, col, format!("expected a formula, found {}", t.describe()))),
    }
}
