//! Finite presentations of countable almost-bounded structures.
//!
//! A presentation lists hubs (the only nodes of infinite degree), edges
//! among hubs, and blocks: a finite pattern repeated with some multiplicity,
//! each copy wired to the hubs by flags. Finitely many per-copy flag
//! overrides (exceptions) are allowed.

mod abp;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub use abp::{parse_presentation, print_presentation};

use crate::canon::{self, LabeledDigraph};
use crate::card::Card;
use crate::error::{Error, Result};
use crate::neighborhood::{self, Annotation, Direction, Neighborhood};
use crate::structure::Structure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Principal,
    NonPrincipal,
}

/// A pattern repeated `multiplicity` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub id: String,
    /// Positions in declaration order.
    pub positions: Vec<String>,
    /// S-edges inside each copy.
    pub pattern: BTreeSet<(String, String)>,
    pub multiplicity: Card,
    /// `(hub, pos)`: edge hub → pos in every copy.
    pub out_flags: BTreeSet<(String, String)>,
    /// `(pos, hub)`: edge pos → hub in every copy.
    pub in_flags: BTreeSet<(String, String)>,
    pub origin: Origin,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flag {
    Out { hub: String, pos: String },
    In { pos: String, hub: String },
}

impl Flag {
    /// `(hub, pos)` regardless of direction.
    pub fn parts(&self) -> (&str, &str) {
        match self {
            Flag::Out { hub, pos } | Flag::In { pos, hub } => (hub, pos),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExceptionOp {
    Add,
    Drop,
}

/// A flag override for one copy of one block.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exception {
    pub block: String,
    pub copy: u64,
    pub op: ExceptionOp,
    pub flag: Flag,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Presentation {
    pub hubs: BTreeSet<String>,
    pub hub_edges: BTreeSet<(String, String)>,
    pub blocks: BTreeMap<String, Block>,
    pub exceptions: BTreeSet<Exception>,
}

/// Outcome of [`Presentation::validate`]; empty means PASS.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Flags of one copy after exceptions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CopyFlags {
    pub out_flags: BTreeSet<(String, String)>,
    pub in_flags: BTreeSet<(String, String)>,
}

impl Block {
    pub fn has_position(&self, pos: &str) -> bool {
        self.positions.iter().any(|p| p == pos)
    }

    pub fn uniform_flags(&self) -> CopyFlags {
        CopyFlags { out_flags: self.out_flags.clone(), in_flags: self.in_flags.clone() }
    }

    pub fn looped_positions(&self) -> usize {
        self.positions.iter().filter(|p| self.pattern.contains(&(p.to_string(), p.to_string()))).count()
    }

    /// Annotations of `pos` under `flags`.
    fn annotations(&self, flags: &CopyFlags, pos: &str) -> BTreeSet<Annotation> {
        let mut set = BTreeSet::new();
        for (h, q) in &flags.out_flags {
            if q == pos {
                set.insert(Annotation::new(Direction::In, h.clone()));
            }
        }
        for (q, h) in &flags.in_flags {
            if q == pos {
                set.insert(Annotation::new(Direction::Out, h.clone()));
            }
        }
        set
    }

    /// Isomorphism-type key of (pattern, flags), no root.
    pub fn type_key(&self, flags: &CopyFlags) -> String {
        let idx = |p: &str| self.positions.iter().position(|x| x == p).expect("declared position");
        let labels = self
            .positions
            .iter()
            .map(|p| {
                let a: Vec<String> = self
                    .annotations(flags, p)
                    .iter()
                    .map(|a| format!("{}.{}", if a.dir == Direction::In { "in" } else { "out" }, a.hub))
                    .collect();
                a.join("+")
            })
            .collect();
        let edges = self.pattern.iter().map(|(a, b)| (idx(a), idx(b))).collect();
        let code = canon::canonical_labeling(&LabeledDigraph { labels, edges }).code;
        format!("{:?}", (code.labels, code.edges))
    }

    /// The pattern component of `pos` as a neighborhood of radius equal to
    /// its diameter, annotated with `flags`.
    pub fn component_neighborhood(&self, hubs: &BTreeSet<String>, flags: &CopyFlags, pos: &str) -> Neighborhood {
        let mut order = vec![pos.to_string()];
        let mut queue = VecDeque::from([pos.to_string()]);
        while let Some(x) = queue.pop_front() {
            let mut next: Vec<&String> = self
                .positions
                .iter()
                .filter(|y| self.pattern.contains(&(x.clone(), y.to_string())) || self.pattern.contains(&(y.to_string(), x.clone())))
                .collect();
            next.sort_by_key(|y| self.positions.iter().position(|p| p == *y));
            for y in next {
                if !order.contains(y) {
                    order.push(y.clone());
                    queue.push_back(y.clone());
                }
            }
        }
        let at = |p: &str| order.iter().position(|x| x == p);
        let s_edges = self.pattern.iter().filter_map(|(a, b)| Some((at(a)?, at(b)?))).collect();
        let mut nb = Neighborhood {
            root: 0,
            nodes: order.clone(),
            s_edges,
            annotations: order.iter().map(|p| self.annotations(flags, p)).collect(),
            hub: vec![None; order.len()],
            radius: 0,
            hubs: hubs.clone(),
        };
        nb.radius = order.len().saturating_sub(1);
        let diameter = (0..nb.len()).map(|r| {
            let mut t = nb.clone();
            t.root = r;
            (0..=nb.len()).find(|&n| t.truncate(n).len() == nb.len()).unwrap_or(0)
        });
        nb.radius = diameter.max().unwrap_or(0);
        nb
    }
}

impl Presentation {
    /// Distinct exceptional copy indices of a block.
    pub fn exceptional_copies(&self, block: &str) -> BTreeSet<u64> {
        self.exceptions.iter().filter(|e| e.block == block).map(|e| e.copy).collect()
    }

    /// Flags of `copy` of `block` with exceptions applied.
    pub fn copy_flags(&self, block: &Block, copy: u64) -> CopyFlags {
        let mut f = block.uniform_flags();
        for e in self.exceptions.iter().filter(|e| e.block == block.id && e.copy == copy) {
            match (&e.op, &e.flag) {
                (ExceptionOp::Add, Flag::Out { hub, pos }) => {
                    f.out_flags.insert((hub.clone(), pos.clone()));
                }
                (ExceptionOp::Drop, Flag::Out { hub, pos }) => {
                    f.out_flags.remove(&(hub.clone(), pos.clone()));
                }
                (ExceptionOp::Add, Flag::In { pos, hub }) => {
                    f.in_flags.insert((pos.clone(), hub.clone()));
                }
                (ExceptionOp::Drop, Flag::In { pos, hub }) => {
                    f.in_flags.remove(&(pos.clone(), hub.clone()));
                }
            }
        }
        f
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        for (a, b) in &self.hub_edges {
            for h in [a, b] {
                if !self.hubs.contains(h) {
                    v.push(format!("hub edge ({a},{b}) names undeclared hub `{h}`"));
                }
            }
        }
        for b in self.blocks.values() {
            let mut seen = BTreeSet::new();
            for p in &b.positions {
                if !seen.insert(p) {
                    v.push(format!("block {}: duplicate position `{p}`", b.id));
                }
            }
            for (x, y) in &b.pattern {
                if !b.has_position(x) || !b.has_position(y) {
                    v.push(format!("block {}: pattern edge ({x},{y}) names an undeclared position", b.id));
                }
            }
            for (h, p) in b.out_flags.iter().map(|(h, p)| (h, p)).chain(b.in_flags.iter().map(|(p, h)| (h, p))) {
                if !self.hubs.contains(h) {
                    v.push(format!("block {}: flag names undeclared hub `{h}`", b.id));
                }
                if !b.has_position(p) {
                    v.push(format!("block {}: flag names undeclared position `{p}`", b.id));
                }
            }
            match (b.multiplicity, b.origin) {
                (Card::Continuum, _) => v.push(format!("block {}: multiplicity continuum is not supported", b.id)),
                (Card::PowerContinuum, Origin::Principal) => {
                    v.push(format!("block {}: multiplicity powcont requires origin nonprincipal", b.id))
                }
                (Card::Fin(_) | Card::Aleph0, Origin::NonPrincipal) => {
                    v.push(format!("block {}: nonprincipal blocks must have multiplicity powcont", b.id))
                }
                _ => {}
            }
        }
        let mut seen_flags = BTreeMap::new();
        for e in &self.exceptions {
            let Some(b) = self.blocks.get(&e.block) else {
                v.push(format!("exception names undeclared block `{}`", e.block));
                continue;
            };
            if b.origin == Origin::NonPrincipal {
                v.push(format!("block {}: exceptions are not allowed on nonprincipal blocks", b.id));
            }
            if let Card::Fin(m) = b.multiplicity {
                if e.copy >= m {
                    v.push(format!("block {}: exception copy index {} is not below multiplicity {m}", b.id, e.copy));
                }
            }
            let (h, p) = e.flag.parts();
            if !self.hubs.contains(h) || !b.has_position(p) {
                v.push(format!("block {}: exception names an undeclared hub or position", b.id));
            }
            if let Some(prev) = seen_flags.insert((&e.block, e.copy, &e.flag), e.op) {
                if prev != e.op {
                    v.push(format!("block {}: copy {} both adds and drops the same flag", b.id, e.copy));
                }
            }
        }
        for h in &self.hubs {
            let touched = self.blocks.values().any(|b| {
                b.multiplicity.is_infinite()
                    && (b.out_flags.iter().any(|(x, _)| x == h) || b.in_flags.iter().any(|(_, x)| x == h))
            });
            if !touched {
                v.push(format!("hub {h} has finite degree: no infinite block carries a uniform flag to it"));
            }
        }
        ValidationReport { violations: v }
    }

    pub fn is_extension(&self) -> bool {
        self.blocks.values().any(|b| b.origin == Origin::NonPrincipal)
    }

    /// Copy indices materialized by [`expand`](Self::expand) for `block`.
    pub fn materialized_copies(&self, block: &Block, k: u64) -> Result<Vec<u64>> {
        let exc = self.exceptional_copies(&block.id);
        if (exc.len() as u64) > k {
            return Err(Error::Input(format!(
                "k = {k} cannot host the {} exceptional copies of block {}",
                exc.len(),
                block.id
            )));
        }
        if let (Card::Fin(m), Some(&max)) = (block.multiplicity, exc.last()) {
            if max >= m {
                return Err(Error::Input(format!("block {}: exception copy {max} beyond multiplicity {m}", block.id)));
            }
        }
        let count = block.multiplicity.truncate(k + exc.len() as u64);
        let uniform = count.saturating_sub(exc.len() as u64);
        let mut copies: Vec<u64> = exc.iter().copied().collect();
        copies.extend((0..).filter(|c| !exc.contains(c)).take(uniform as usize));
        copies.sort_unstable();
        Ok(copies)
    }

    /// Node name of position `pos` in copy `copy` of `block`.
    pub fn node_name(block: &str, copy: u64, pos: &str) -> String {
        format!("{block}.{copy}.{pos}")
    }

    /// The finite truncation: hubs, then each block's materialized copies.
    pub fn expand(&self, k: u64) -> Result<Structure> {
        self.expand_with(k, None)
    }

    /// As [`expand`](Self::expand), but nonprincipal blocks get exactly
    /// `bundles` copies when given.
    pub fn expand_with(&self, k: u64, bundles: Option<u64>) -> Result<Structure> {
        let mut names: Vec<String> = self.hubs.iter().cloned().collect();
        let mut index: BTreeMap<String, usize> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut edges = Vec::new();
        for (a, b) in &self.hub_edges {
            let (Some(&x), Some(&y)) = (index.get(a), index.get(b)) else {
                return Err(Error::Input(format!("hub edge ({a},{b}) names an undeclared hub")));
            };
            edges.push((x, y));
        }
        for b in self.blocks.values() {
            let copies = match (b.origin, bundles) {
                (Origin::NonPrincipal, Some(n)) => (0..n).collect(),
                _ => self.materialized_copies(b, k)?,
            };
            for c in copies {
                let base = names.len();
                for pos in &b.positions {
                    let name = Self::node_name(&b.id, c, pos);
                    index.insert(name.clone(), names.len());
                    names.push(name);
                }
                let at = |p: &str| b.positions.iter().position(|x| x == p).map(|i| base + i);
                let hub = |h: &str| index.get(h).copied().filter(|&i| i < self.hubs.len());
                for (x, y) in &b.pattern {
                    edges.push((at(x).ok_or_else(|| undeclared(b, x))?, at(y).ok_or_else(|| undeclared(b, y))?));
                }
                let flags = self.copy_flags(b, c);
                for (h, p) in &flags.out_flags {
                    let hi = hub(h).ok_or_else(|| Error::Input(format!("undeclared hub `{h}`")))?;
                    edges.push((hi, at(p).ok_or_else(|| undeclared(b, p))?));
                }
                for (p, h) in &flags.in_flags {
                    let hi = hub(h).ok_or_else(|| Error::Input(format!("undeclared hub `{h}`")))?;
                    edges.push((at(p).ok_or_else(|| undeclared(b, p))?, hi));
                }
            }
        }
        let hubs = 0..self.hubs.len();
        Structure::new(names, edges, hubs)
    }

    /// The presentation of the ultrafilter extension: the input plus one
    /// nonprincipal block per P-isomorphism type of ω-blocks.
    pub fn extend(&self) -> Result<Presentation> {
        let report = self.validate();
        if !report.passed() {
            return Err(Error::Invalid(report.violations.join("; ")));
        }
        let mut out = self.clone();
        let mut known: BTreeSet<String> = self
            .blocks
            .values()
            .filter(|b| b.origin == Origin::NonPrincipal)
            .map(|b| b.type_key(&b.uniform_flags()))
            .collect();
        // blocks are visited in id order, so each group's representative is its least id
        for b in self.blocks.values() {
            if b.origin != Origin::Principal || b.multiplicity != Card::Aleph0 {
                continue;
            }
            if !known.insert(b.type_key(&b.uniform_flags())) {
                continue;
            }
            let mut id = format!("{}_ue", b.id);
            let mut n = 2;
            while out.blocks.contains_key(&id) {
                id = format!("{}_ue{n}", b.id);
                n += 1;
            }
            let block = Block { id: id.clone(), multiplicity: Card::PowerContinuum, origin: Origin::NonPrincipal, ..b.clone() };
            out.blocks.insert(id, block);
        }
        Ok(out)
    }

    /// Reflexive points per origin: hubs with a hub self-edge and every
    /// copy of a looped pattern position.
    pub fn count_reflexive(&self) -> Vec<(Origin, Card)> {
        let hub_loops = self.hub_edges.iter().filter(|(a, b)| a == b).count() as u64;
        let per = |o: Origin| -> Card {
            self.blocks
                .values()
                .filter(|b| b.origin == o)
                .map(|b| b.multiplicity * Card::Fin(b.looped_positions() as u64))
                .sum()
        };
        vec![
            (Origin::Principal, Card::Fin(hub_loops) + per(Origin::Principal)),
            (Origin::NonPrincipal, per(Origin::NonPrincipal)),
        ]
    }

    /// Out-degree of a hub in the denoted structure.
    pub fn hub_out_degree(&self, hub: &str) -> Card {
        let mut total = Card::Fin(self.hub_edges.iter().filter(|(a, _)| a == hub).count() as u64);
        for b in self.blocks.values() {
            let uniform = b.out_flags.iter().filter(|(h, _)| h == hub).count() as u64;
            let exc = self.exceptional_copies(&b.id);
            let plain = match b.multiplicity {
                Card::Fin(m) => Card::Fin(m.saturating_sub(exc.len() as u64)),
                c => c,
            };
            total = total + plain * Card::Fin(uniform);
            for &c in &exc {
                let n = self.copy_flags(b, c).out_flags.iter().filter(|(h, _)| h == hub).count();
                total = total + Card::Fin(n as u64);
            }
        }
        total
    }

    /// Splits a node name of [`expand`](Self::expand) into `(block, copy, pos)`.
    pub fn locate<'a>(&self, name: &'a str) -> Option<(&'a str, u64, &'a str)> {
        let mut parts = name.splitn(3, '.');
        let (b, c, p) = (parts.next()?, parts.next()?, parts.next()?);
        let block = self.blocks.get(b)?;
        block.has_position(p).then_some(())?;
        Some((b, c.parse().ok()?, p))
    }

    /// The singleton neighborhood of a hub.
    pub fn hub_neighborhood(&self, hub: &str) -> Neighborhood {
        let mut ann = BTreeSet::new();
        for (a, b) in &self.hub_edges {
            if a == hub {
                ann.insert(Annotation::new(Direction::Out, b.clone()));
            }
            if b == hub {
                ann.insert(Annotation::new(Direction::In, a.clone()));
            }
        }
        Neighborhood {
            root: 0,
            nodes: vec![hub.to_string()],
            s_edges: BTreeSet::new(),
            annotations: vec![ann],
            hub: vec![Some(hub.to_string())],
            radius: 0,
            hubs: self.hubs.clone(),
        }
    }

    /// Number of points of the extension whose whole S-component, rooted at
    /// the point, is P-isomorphic to `nb`. A match by the uniform copies of
    /// an infinite block counts 2^2^ℵ₀.
    pub fn count_neighborhood_type(&self, nb: &Neighborhood) -> Card {
        let target = neighborhood::canonical_form(nb).digest;
        let matches = |cand: &Neighborhood| neighborhood::canonical_form(cand).digest == target;
        let mut total = Card::ZERO;
        for h in &self.hubs {
            if matches(&self.hub_neighborhood(h)) {
                total = total + Card::Fin(1);
            }
        }
        for b in self.blocks.values() {
            let exc = self.exceptional_copies(&b.id);
            let uniform = b.uniform_flags();
            let uniform_hits = b.positions.iter().filter(|p| matches(&b.component_neighborhood(&self.hubs, &uniform, p))).count() as u64;
            if uniform_hits > 0 {
                let copies = match b.multiplicity {
                    Card::Fin(m) => Card::Fin(m - exc.len() as u64),
                    _ => Card::PowerContinuum,
                };
                total = total + copies * Card::Fin(uniform_hits);
            }
            for &c in &exc {
                let flags = self.copy_flags(b, c);
                let hits = b.positions.iter().filter(|p| matches(&b.component_neighborhood(&self.hubs, &flags, p))).count();
                total = total + Card::Fin(hits as u64);
            }
        }
        total
    }
}

fn undeclared(b: &Block, p: &str) -> Error {
    Error::Input(format!("block {}: undeclared position `{p}`", b.id))
}
