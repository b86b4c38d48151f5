//! Pointwise validity of `Alt_n ∨ phi` over presented structures.
//!
//! A point validates `Alt_n ∨ phi` iff its out-degree is at most `n` or it
//! satisfies `(∗∗)`, because the two disjuncts share no variables. Both
//! clauses are decided on `expand(p, 2)`: uniform copies of a block are
//! interchangeable, so two of them exhibit every path shape that the
//! infinite structure has, while hub out-degrees come from the flag tables.

use std::fmt;

use super::conditions::StarStarParts;
use super::formulas::{alt_n, alt_or_phi, phi_formula};
use super::semantics::{check, local_counterexample, Valuation, ValidityLimits};
use crate::card::Card;
use crate::error::{Error, Result};
use crate::nodeset::NodeId;
use crate::presentation::{Origin, Presentation};
use crate::structure::Structure;

/// A point of a presented structure.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointRef {
    Hub(String),
    Copy { block: String, copy: u64, pos: String },
    Bundle { block: String, bundle: u64, pos: String },
}

impl fmt::Display for PointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointRef::Hub(h) => f.write_str(h),
            PointRef::Copy { block, copy, pos } => write!(f, "{block}.{copy}.{pos}"),
            PointRef::Bundle { block, bundle, pos } => write!(f, "{block}[{bundle}].{pos}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CriterionVerdict {
    Valid,
    Invalid { at: PointRef, out_degree: Card },
}

fn point_ref(p: &Presentation, s: &Structure, w: NodeId) -> PointRef {
    let name = s.name(w);
    if s.is_hub(w) {
        return PointRef::Hub(name.to_string());
    }
    let (block, copy, pos) = p.locate(name).expect("expand names every copy node");
    if p.blocks[block].origin == Origin::NonPrincipal {
        PointRef::Bundle { block: block.into(), bundle: copy, pos: pos.into() }
    } else {
        PointRef::Copy { block: block.into(), copy, pos: pos.into() }
    }
}

fn refuse_invalid(p: &Presentation) -> Result<()> {
    let report = p.validate();
    if !report.passed() {
        return Err(Error::Invalid(report.violations.join("; ")));
    }
    Ok(())
}

/// Out-degree of a point: symbolic for hubs, read off the frame otherwise.
fn out_degree(p: &Presentation, s: &Structure, w: NodeId) -> Card {
    if s.is_hub(w) {
        p.hub_out_degree(s.name(w))
    } else {
        Card::Fin(s.successors(w).len() as u64)
    }
}

fn holds_at(p: &Presentation, s: &Structure, w: NodeId, n: usize) -> (bool, Card) {
    let deg = out_degree(p, s, w);
    let ok = deg <= Card::Fin(n as u64) || StarStarParts::of(s, w).holds_with(deg > Card::Fin(1));
    (ok, deg)
}

/// Decides `p ⊩ Alt_n ∨ phi`, reporting the first failing point (hubs in
/// name order, then copies in expansion order).
pub fn criterion_validity(p: &Presentation, n: usize) -> Result<CriterionVerdict> {
    refuse_invalid(p)?;
    let s = p.expand(2)?;
    for w in 0..s.len() {
        let (ok, deg) = holds_at(p, &s, w, n);
        if !ok {
            return Ok(CriterionVerdict::Invalid { at: point_ref(p, &s, w), out_degree: deg });
        }
    }
    Ok(CriterionVerdict::Valid)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyKCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyKReport {
    pub checks: Vec<FamilyKCheck>,
    /// A hub witnessing the finite-intersection clause.
    pub designated: Option<String>,
}

impl FamilyKReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: &'static str, pass: bool, detail: impl Into<String>) {
        self.checks.push(FamilyKCheck { name, pass, detail: detail.into() });
    }
}

/// Hubs `h'` with `R[w] ∩ R[h']` infinite: some infinite block carries
/// uniform out-flags from both to one position.
fn shared_infinite_successors(p: &Presentation, w: &str, other: &str) -> bool {
    p.blocks.values().any(|b| {
        b.multiplicity.is_infinite()
            && b.out_flags.iter().any(|(h, pos)| h == w && b.out_flags.contains(&(other.to_string(), pos.clone())))
    })
}

fn common_successors(s: &Structure, a: &str, b: &str) -> Result<usize> {
    let (x, y) = (s.node(a)?, s.node(b)?);
    Ok(s.successors(x).intersection(s.successors(y)).len())
}

/// Membership of `p` in the class of almost bounded structures whose
/// infinite-degree points satisfy `(∗∗)` and which have an infinite-degree
/// point `w` with `R[w] ∩ R[v]` finite for every `v ∈ R[w]`.
pub fn family_k_check(p: &Presentation) -> Result<FamilyKReport> {
    let mut report = FamilyKReport::default();
    let validation = p.validate();
    report.push("almost bounded", validation.passed(), validation.violations.join("; "));
    if !validation.passed() {
        return Ok(report);
    }
    let infinite: Vec<&String> = p.hubs.iter().filter(|h| p.hub_out_degree(h).is_infinite()).collect();
    report.push(
        "infinite out-degree",
        !infinite.is_empty(),
        if infinite.is_empty() { "no hub has infinite out-degree".to_string() } else { format!("hubs {infinite:?}") },
    );

    let s = p.expand(2)?;
    let failing: Vec<&String> =
        infinite.iter().copied().filter(|h| !StarStarParts::of(&s, s.node(h).expect("hub")).holds_with(true)).collect();
    report.push(
        "(**) at infinite out-degree",
        failing.is_empty(),
        if failing.is_empty() { String::new() } else { format!("fails at {failing:?}") },
    );

    let (s4, s5) = (p.expand(4)?, p.expand(5)?);
    let mut agree = true;
    let mut detail = Vec::new();
    for w in &infinite {
        let mut ok = true;
        for (_, v) in p.hub_edges.iter().filter(|(a, _)| a == *w) {
            let symbolic = shared_infinite_successors(p, w, v);
            let grows = common_successors(&s5, w, v)? > common_successors(&s4, w, v)?;
            if symbolic != grows {
                agree = false;
                detail.push(format!("{w},{v}: flag tables and truncations disagree"));
            }
            if symbolic {
                ok = false;
                detail.push(format!("R[{w}] and R[{v}] share infinitely many successors"));
            }
        }
        if ok && report.designated.is_none() {
            report.designated = Some(w.to_string());
        }
    }
    report.push("finite intersections", report.designated.is_some(), detail.join("; "));
    report.push("truncation cross-check", agree, "");
    Ok(report)
}

/// A finite frame, valuation and point refuting `Alt_n ∨ phi`.
#[derive(Clone, Debug)]
pub struct Countermodel {
    pub frame: Structure,
    pub valuation: Valuation,
    pub node: NodeId,
}

/// Builds `expand_with(k, 1)` and searches it for a valuation refuting
/// `Alt_n ∨ phi` at `hub`. The two disjuncts are searched separately,
/// since their variables are disjoint, and the merged valuation is
/// re-checked.
pub fn counterexample_frame(p: &Presentation, hub: &str, n: usize, k: u64, limits: ValidityLimits) -> Result<Countermodel> {
    refuse_invalid(p)?;
    if !p.hubs.contains(hub) {
        return Err(Error::UnknownNode(hub.to_string()));
    }
    let base = p.expand(2)?;
    let (ok, _) = holds_at(p, &base, base.node(hub)?, n);
    if ok {
        return Err(Error::Precondition(format!("{hub} satisfies the pointwise criterion for Alt_{n} | phi")));
    }
    let frame = p.expand_with(k, Some(1))?;
    let w = frame.node(hub)?;
    let degree = frame.successors(w).len();
    if degree <= n {
        return Err(Error::Precondition(format!("{hub} has out-degree {degree} <= {n} at k = {k}; raise k")));
    }
    let alt = local_counterexample(&frame, &alt_n(n), w, limits)?;
    let phi = local_counterexample(&frame, &phi_formula(), w, limits)?;
    let (Some(mut valuation), Some(v2)) = (alt, phi) else {
        return Err(Error::Precondition(format!("no refuting valuation at {hub} on expand_with({k}, 1)")));
    };
    valuation.merge(&v2);
    if check(&frame, &valuation, w, &alt_or_phi(n))? {
        return Err(Error::Disagreement("merged valuation does not refute Alt_n | phi".into()));
    }
    Ok(Countermodel { frame, valuation, node: w })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    const ONE_WAY: &str = "hub h\nblock f mult omega\n  pnode a\n  pflag out h a\n";
    const MUTUAL: &str = "hub w\nblock f mult omega\n  pnode a\n  pflag out w a\n  pflag in a w\n";

    #[test]
    fn one_way_fan_fails_at_hub() {
        let p = parse_presentation(ONE_WAY).unwrap();
        let v = criterion_validity(&p, 1).unwrap();
        assert_eq!(v, CriterionVerdict::Invalid { at: PointRef::Hub("h".into()), out_degree: Card::Aleph0 });
        let ext = p.extend().unwrap();
        let cm = counterexample_frame(&ext, "h", 1, 3, ValidityLimits::default()).unwrap();
        assert_eq!(cm.frame.len(), 5);
        assert!(!check(&cm.frame, &cm.valuation, cm.node, &alt_or_phi(1)).unwrap());
    }

    #[test]
    fn mutual_fan() {
        let p = parse_presentation(MUTUAL).unwrap();
        assert_eq!(criterion_validity(&p, 1).unwrap(), CriterionVerdict::Valid);
        let k = family_k_check(&p).unwrap();
        assert!(k.passed(), "{k:?}");
        assert_eq!(k.designated.as_deref(), Some("w"));
        assert!(counterexample_frame(&p, "w", 1, 3, ValidityLimits::default()).is_err());
    }

    #[test]
    fn bounded_and_hubless() {
        let p = parse_presentation("block f mult 4\n  pnode a\n  pnode b\n  pedge a b\n").unwrap();
        assert_eq!(criterion_validity(&p, 1).unwrap(), CriterionVerdict::Valid);
        let k = family_k_check(&p).unwrap();
        assert!(!k.passed());
        assert!(!k.checks[1].pass);
        assert!(criterion_validity(&parse_presentation("hub h\n").unwrap(), 1).is_err());
    }

    #[test]
    fn shared_successors_break_disjointness() {
        let p = parse_presentation(
            "hub g\nhub w\nhubedge w g\nhubedge g w\nblock f mult omega\n  pnode a\n  pflag out w a\n  pflag out g a\n  pflag in a w\n",
        )
        .unwrap();
        let k = family_k_check(&p).unwrap();
        let clause = k.checks.iter().find(|c| c.name == "finite intersections").unwrap();
        assert!(!clause.pass);
        assert!(k.checks.iter().find(|c| c.name == "truncation cross-check").unwrap().pass);
    }
}
