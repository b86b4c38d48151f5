//! Points of the ultrafilter extension of a presented structure and the
//! edge relation between them.

use std::fmt;

use crate::card::Card;
use crate::error::{Error, Result};
use crate::presentation::{Block, Origin, Presentation};

/// A point of the presented base structure.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Hub(String),
    Copy { block: String, copy: u64, pos: String },
}

/// A point of the extension: a principal ultrafilter over a base element,
/// or a nonprincipal one identified by its block, position and bundle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolicUltrafilter {
    Principal(Element),
    NonPrincipal { block: String, pos: String, bundle: u64 },
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Hub(h) => f.write_str(h),
            Element::Copy { block, copy, pos } => f.write_str(&Presentation::node_name(block, *copy, pos)),
        }
    }
}

impl fmt::Display for SymbolicUltrafilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicUltrafilter::Principal(e) => write!(f, "pi({e})"),
            SymbolicUltrafilter::NonPrincipal { block, pos, bundle } => write!(f, "{block}[{bundle}].{pos}"),
        }
    }
}

impl SymbolicUltrafilter {
    /// Node name of this point in `expand_with(k, Some(bundles))` of the
    /// extension presentation, when it is materialized there.
    pub fn finite_name(&self) -> String {
        match self {
            SymbolicUltrafilter::Principal(e) => e.to_string(),
            SymbolicUltrafilter::NonPrincipal { block, pos, bundle } => Presentation::node_name(block, *bundle, pos),
        }
    }
}

fn block<'a>(p: &'a Presentation, id: &str, origin: Origin) -> Result<&'a Block> {
    let b = p.blocks.get(id).ok_or_else(|| Error::Input(format!("unknown block `{id}`")))?;
    if b.origin != origin {
        let want = if origin == Origin::Principal { "principal" } else { "nonprincipal" };
        return Err(Error::Input(format!("block `{id}` is not {want}")));
    }
    Ok(b)
}

fn resolve(p: &Presentation, u: &SymbolicUltrafilter) -> Result<()> {
    match u {
        SymbolicUltrafilter::Principal(Element::Hub(h)) => {
            if !p.hubs.contains(h) {
                return Err(Error::Input(format!("unknown hub `{h}`")));
            }
        }
        SymbolicUltrafilter::Principal(Element::Copy { block: id, copy, pos }) => {
            let b = block(p, id, Origin::Principal)?;
            if let Card::Fin(m) = b.multiplicity {
                if *copy >= m {
                    return Err(Error::Input(format!("block `{id}` has no copy {copy}")));
                }
            }
            if !b.has_position(pos) {
                return Err(Error::Input(format!("block `{id}` has no position `{pos}`")));
            }
        }
        SymbolicUltrafilter::NonPrincipal { block: id, pos, .. } => {
            if !block(p, id, Origin::NonPrincipal)?.has_position(pos) {
                return Err(Error::Input(format!("block `{id}` has no position `{pos}`")));
            }
        }
    }
    Ok(())
}

/// `R^ue(u, v)` over an extension presentation.
///
/// Principal pairs follow the base relation. A hub sees a nonprincipal
/// point (or is seen by it) exactly through the block's uniform flags;
/// other principal points are never adjacent to nonprincipal ones. Two
/// nonprincipal points are adjacent only inside one bundle of one block,
/// along a pattern edge.
pub fn symbolic_ue_related(p: &Presentation, u: &SymbolicUltrafilter, v: &SymbolicUltrafilter) -> Result<bool> {
    use Element::{Copy, Hub};
    use SymbolicUltrafilter::{NonPrincipal, Principal};
    resolve(p, u)?;
    resolve(p, v)?;
    let pair = |a: &str, b: &str| (a.to_string(), b.to_string());
    Ok(match (u, v) {
        (Principal(Hub(a)), Principal(Hub(b))) => p.hub_edges.contains(&pair(a, b)),
        (Principal(Hub(h)), Principal(Copy { block, copy, pos })) => {
            p.copy_flags(&p.blocks[block], *copy).out_flags.contains(&pair(h, pos))
        }
        (Principal(Copy { block, copy, pos }), Principal(Hub(h))) => {
            p.copy_flags(&p.blocks[block], *copy).in_flags.contains(&pair(pos, h))
        }
        (Principal(Copy { block: b1, copy: c1, pos: x }), Principal(Copy { block: b2, copy: c2, pos: y })) => {
            b1 == b2 && c1 == c2 && p.blocks[b1].pattern.contains(&pair(x, y))
        }
        (Principal(Hub(h)), NonPrincipal { block, pos, .. }) => p.blocks[block].out_flags.contains(&pair(h, pos)),
        (NonPrincipal { block, pos, .. }, Principal(Hub(h))) => p.blocks[block].in_flags.contains(&pair(pos, h)),
        (Principal(Copy { .. }), NonPrincipal { .. }) | (NonPrincipal { .. }, Principal(Copy { .. })) => false,
        (NonPrincipal { block: b1, pos: x, bundle: n1 }, NonPrincipal { block: b2, pos: y, bundle: n2 }) => {
            b1 == b2 && n1 == n2 && p.blocks[b1].pattern.contains(&pair(x, y))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn fan_ext() -> Presentation {
        parse_presentation("hub h\nblock f mult omega\n  pnode a\n  pflag out h a\n").unwrap().extend().unwrap()
    }

    fn np(pos: &str, bundle: u64) -> SymbolicUltrafilter {
        SymbolicUltrafilter::NonPrincipal { block: "f_ue".into(), pos: pos.into(), bundle }
    }

    #[test]
    fn hub_sees_nonprincipal() {
        let p = fan_ext();
        let h = SymbolicUltrafilter::Principal(Element::Hub("h".into()));
        assert!(symbolic_ue_related(&p, &h, &np("a", 0)).unwrap());
        assert!(!symbolic_ue_related(&p, &np("a", 0), &h).unwrap());
        assert!(!symbolic_ue_related(&p, &np("a", 0), &np("a", 1)).unwrap());
        let c = SymbolicUltrafilter::Principal(Element::Copy { block: "f".into(), copy: 7, pos: "a".into() });
        assert!(symbolic_ue_related(&p, &h, &c).unwrap());
        assert!(!symbolic_ue_related(&p, &c, &np("a", 0)).unwrap());
    }

    #[test]
    fn dangling_references() {
        let p = fan_ext();
        let bad = SymbolicUltrafilter::Principal(Element::Hub("g".into()));
        assert!(symbolic_ue_related(&p, &bad, &np("a", 0)).is_err());
        assert!(symbolic_ue_related(&p, &np("b", 0), &np("a", 0)).is_err());
        let wrong = SymbolicUltrafilter::NonPrincipal { block: "f".into(), pos: "a".into(), bundle: 0 };
        assert!(symbolic_ue_related(&p, &wrong, &np("a", 0)).is_err());
    }
}
