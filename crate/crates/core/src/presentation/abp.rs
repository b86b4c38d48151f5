//! The `.abp` text format.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{Block, Exception, ExceptionOp, Flag, Origin, Presentation};
use crate::card::Card;
use crate::error::ParseError;
use crate::lex::is_ident;

fn mult_text(c: Card) -> String {
    match c {
        Card::Fin(n) => n.to_string(),
        Card::Aleph0 => "omega".into(),
        Card::Continuum => "continuum".into(),
        Card::PowerContinuum => "powcont".into(),
    }
}

/// Prints hubs, hub edges, blocks by id and exceptions, each sorted.
/// Pattern positions keep declaration order.
pub fn print_presentation(p: &Presentation) -> String {
    let mut out = String::new();
    for h in &p.hubs {
        let _ = writeln!(out, "hub {h}");
    }
    for (a, b) in &p.hub_edges {
        let _ = writeln!(out, "hubedge {a} {b}");
    }
    for b in p.blocks.values() {
        let _ = writeln!(out, "block {} mult {}", b.id, mult_text(b.multiplicity));
        for pos in &b.positions {
            let _ = writeln!(out, "  pnode {pos}");
        }
        for (x, y) in &b.pattern {
            let _ = writeln!(out, "  pedge {x} {y}");
        }
        for (h, pos) in &b.out_flags {
            let _ = writeln!(out, "  pflag out {h} {pos}");
        }
        for (pos, h) in &b.in_flags {
            let _ = writeln!(out, "  pflag in {pos} {h}");
        }
        if b.origin == Origin::NonPrincipal {
            out.push_str("  origin nonprincipal\n");
        }
    }
    for e in &p.exceptions {
        let op = match e.op {
            ExceptionOp::Add => "add",
            ExceptionOp::Drop => "drop",
        };
        let flag = match &e.flag {
            Flag::Out { hub, pos } => format!("out {hub} {pos}"),
            Flag::In { pos, hub } => format!("in {pos} {hub}"),
        };
        let _ = writeln!(out, "exception {} {} {op} {flag}", e.block, e.copy);
    }
    out
}

struct Line<'a> {
    no: usize,
    raw: &'a str,
    words: Vec<&'a str>,
    indented: bool,
}

impl Line<'_> {
    fn err(&self, word: usize, msg: impl Into<String>) -> ParseError {
        let base = self.raw.as_ptr() as usize;
        let col = self.words.get(word).map(|w| w.as_ptr() as usize - base + 1);
        ParseError::new(self.no, col.unwrap_or(1), msg)
    }

    fn ident(&self, i: usize, what: &str) -> Result<String, ParseError> {
        let w = self.words[i];
        if is_ident(w) {
            Ok(w.to_string())
        } else {
            Err(self.err(i, format!("{what} `{w}` is not an identifier")))
        }
    }

    fn arity(&self, n: usize) -> Result<(), ParseError> {
        if self.words.len() == n {
            Ok(())
        } else {
            Err(self.err(0, format!("`{}` takes {} arguments, found {}", self.words[0], n - 1, self.words.len() - 1)))
        }
    }
}

/// Parses `.abp` text. Checks syntax, duplicate names and dangling
/// references; semantic checks are left to [`Presentation::validate`].
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut p = Presentation::default();
    let mut current: Option<Block> = None;
    let mut pending_exceptions: Vec<(Exception, usize)> = Vec::new();
    let mut block_lines: Vec<(String, usize)> = Vec::new();

    let finish = |b: Option<Block>, p: &mut Presentation| {
        if let Some(b) = b {
            p.blocks.insert(b.id.clone(), b);
        }
    };

    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let line = Line { no: i + 1, raw, words, indented: content.starts_with([' ', '\t']) };
        let kw = line.words[0];
        if line.indented {
            let Some(b) = current.as_mut() else {
                return Err(line.err(0, "indented line outside a block"));
            };
            match kw {
                "pnode" => {
                    line.arity(2)?;
                    let pos = line.ident(1, "position")?;
                    if b.positions.contains(&pos) {
                        return Err(line.err(1, format!("duplicate position `{pos}` in block `{}`", b.id)));
                    }
                    b.positions.push(pos);
                }
                "pedge" => {
                    line.arity(3)?;
                    let x = line.ident(1, "position")?;
                    let y = line.ident(2, "position")?;
                    for (k, v) in [(1, &x), (2, &y)] {
                        if !b.positions.contains(v) {
                            return Err(line.err(k, format!("undeclared position `{v}`")));
                        }
                    }
                    b.pattern.insert((x, y));
                }
                "pflag" => {
                    line.arity(4)?;
                    let (hub_at, pos_at) = match line.words[1] {
                        "out" => (2, 3),
                        "in" => (3, 2),
                        w => return Err(line.err(1, format!("expected `out` or `in`, found `{w}`"))),
                    };
                    let hub = line.ident(hub_at, "hub")?;
                    let pos = line.ident(pos_at, "position")?;
                    if !p.hubs.contains(&hub) {
                        return Err(line.err(hub_at, format!("undeclared hub `{hub}`")));
                    }
                    if !b.positions.contains(&pos) {
                        return Err(line.err(pos_at, format!("undeclared position `{pos}`")));
                    }
                    if line.words[1] == "out" {
                        b.out_flags.insert((hub, pos));
                    } else {
                        b.in_flags.insert((pos, hub));
                    }
                }
                "origin" => {
                    line.arity(2)?;
                    b.origin = match line.words[1] {
                        "nonprincipal" => Origin::NonPrincipal,
                        "principal" => Origin::Principal,
                        w => return Err(line.err(1, format!("unknown origin `{w}`"))),
                    };
                }
                _ => return Err(line.err(0, format!("unknown block line `{kw}`"))),
            }
            continue;
        }
        finish(current.take(), &mut p);
        match kw {
            "hub" => {
                line.arity(2)?;
                let h = line.ident(1, "hub")?;
                if !p.hubs.insert(h.clone()) {
                    return Err(line.err(1, format!("duplicate hub `{h}`")));
                }
            }
            "hubedge" => {
                line.arity(3)?;
                let a = line.ident(1, "hub")?;
                let b = line.ident(2, "hub")?;
                for (k, h) in [(1, &a), (2, &b)] {
                    if !p.hubs.contains(h) {
                        return Err(line.err(k, format!("undeclared hub `{h}`")));
                    }
                }
                p.hub_edges.insert((a, b));
            }
            "block" => {
                line.arity(4)?;
                let id = line.ident(1, "block id")?;
                if line.words[2] != "mult" {
                    return Err(line.err(2, "expected `mult`"));
                }
                let multiplicity = match line.words[3] {
                    "omega" => Card::Aleph0,
                    "powcont" => Card::PowerContinuum,
                    w => w.parse::<u64>().map(Card::Fin).map_err(|_| line.err(3, format!("bad multiplicity `{w}`")))?,
                };
                if p.blocks.contains_key(&id) || block_lines.iter().any(|(b, _)| *b == id) {
                    return Err(line.err(1, format!("duplicate block `{id}`")));
                }
                block_lines.push((id.clone(), line.no));
                current = Some(Block {
                    id,
                    positions: Vec::new(),
                    pattern: BTreeSet::new(),
                    multiplicity,
                    out_flags: BTreeSet::new(),
                    in_flags: BTreeSet::new(),
                    origin: Origin::Principal,
                });
            }
            "exception" => {
                line.arity(7)?;
                let block = line.ident(1, "block id")?;
                let copy = line.words[2].parse::<u64>().map_err(|_| line.err(2, "copy index must be a nonnegative integer"))?;
                let op = match line.words[3] {
                    "add" => ExceptionOp::Add,
                    "drop" => ExceptionOp::Drop,
                    w => return Err(line.err(3, format!("expected `add` or `drop`, found `{w}`"))),
                };
                let flag = match line.words[4] {
                    "out" => Flag::Out { hub: line.ident(5, "hub")?, pos: line.ident(6, "position")? },
                    "in" => Flag::In { pos: line.ident(5, "position")?, hub: line.ident(6, "hub")? },
                    w => return Err(line.err(4, format!("expected `out` or `in`, found `{w}`"))),
                };
                pending_exceptions.push((Exception { block, copy, op, flag }, line.no));
            }
            _ => return Err(line.err(0, format!("unknown directive `{kw}`"))),
        }
    }
    finish(current.take(), &mut p);
    for (e, no) in pending_exceptions {
        let b = p
            .blocks
            .get(&e.block)
            .ok_or_else(|| ParseError::new(no, 1, format!("exception names undeclared block `{}`", e.block)))?;
        let (hub, pos) = e.flag.parts();
        if !p.hubs.contains(hub) {
            return Err(ParseError::new(no, 1, format!("exception names undeclared hub `{hub}`")));
        }
        if !b.positions.iter().any(|x| x == pos) {
            return Err(ParseError::new(no, 1, format!("exception names undeclared position `{pos}`")));
        }
        if !p.exceptions.insert(e) {
            return Err(ParseError::new(no, 1, "duplicate exception"));
        }
    }
    Ok(p)
}
