//! Ultrafilters over finite universes, evaluated through their set families.
//!
//! Every ultrafilter over a finite set is principal, so a value stores only
//! its generator. The relational definitions are nonetheless evaluated by
//! enumerating all subsets, which is what the principal shortcuts are
//! checked against.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nodeset::{NodeId, NodeSet, Relation};
use crate::structure::{Road, Structure};

/// Largest universe for subset enumeration.
pub const MAX_UNIVERSE: usize = 20;
/// Largest universe for [`Ultrafilter::satisfies_axioms`], which looks at pairs of subsets.
pub const MAX_AXIOM_UNIVERSE: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ultrafilter {
    universe: usize,
    generator: NodeId,
}

fn limit(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Limit { what, needed: n as u128, cap: cap as u128 });
    }
    Ok(())
}

impl Ultrafilter {
    pub fn principal(universe: usize, generator: NodeId) -> Result<Self> {
        if generator >= universe {
            return Err(Error::Input(format!("node {generator} outside a universe of {universe}")));
        }
        Ok(Ultrafilter { universe, generator })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn generator(&self) -> NodeId {
        self.generator
    }

    pub fn contains(&self, x: &NodeSet) -> Result<bool> {
        x.check_universe(self.universe)?;
        Ok(x.contains(self.generator))
    }

    fn contains_mask(&self, x: u32) -> bool {
        x >> self.generator & 1 == 1
    }

    /// All members, in increasing bitmask order.
    pub fn family(&self) -> Result<Vec<NodeSet>> {
        limit("ultrafilter universe", self.universe, MAX_UNIVERSE)?;
        Ok((0..1u32 << self.universe)
            .filter(|&x| self.contains_mask(x))
            .map(|x| NodeSet::from_mask(self.universe, x as u128))
            .collect())
    }

    /// Upward closure, closure under intersection, and exactly one of
    /// `X`, `A \ X`, checked over every subset (and pair of subsets).
    pub fn satisfies_axioms(&self) -> Result<bool> {
        limit("ultrafilter axiom universe", self.universe, MAX_AXIOM_UNIVERSE)?;
        let full = (1u32 << self.universe) - 1;
        let member = |x: u32| self.contains_mask(x);
        let ok = (0..=full).into_par_iter().all(|x| {
            if member(x) == member(full & !x) {
                return false;
            }
            !member(x)
                || (0..=full).all(|y| {
                    let up = x & !y != 0 || member(y);
                    let meet = !member(y) || member(x & y);
                    up && meet
                })
        });
        Ok(ok)
    }
}

fn check_pair(q: &Relation, u: &Ultrafilter, v: &Ultrafilter) -> Result<()> {
    for w in [u, v] {
        if w.universe != q.universe() {
            return Err(Error::UniverseMismatch { expected: q.universe(), found: w.universe });
        }
    }
    limit("ultrafilter universe", q.universe(), MAX_UNIVERSE)
}

fn masks(q: &Relation) -> (Vec<u32>, Vec<u32>) {
    let m = |sets: Vec<&NodeSet>| sets.iter().map(|s| s.iter().fold(0u32, |acc, i| acc | 1 << i)).collect();
    let n = q.universe();
    (m((0..n).map(|w| q.successors(w)).collect()), m((0..n).map(|w| q.predecessors(w)).collect()))
}

fn image_mask(succ: &[u32], x: u32) -> u32 {
    (0..succ.len()).filter(|&w| x >> w & 1 == 1).fold(0, |acc, w| acc | succ[w])
}

/// `{⟨Q⟩(X) : X ∈ v} ⊆ u`, by enumeration of every `X`.
fn by_diamonds(pred: &[u32], u: &Ultrafilter, v: &Ultrafilter) -> bool {
    all_subsets(pred.len(), |x| !v.contains_mask(x) || u.contains_mask(image_mask(pred, x)))
}

/// `{Q[X] : X ∈ u} ⊆ v`, by enumeration of every `X`.
fn by_images(succ: &[u32], u: &Ultrafilter, v: &Ultrafilter) -> bool {
    all_subsets(succ.len(), |x| !u.contains_mask(x) || v.contains_mask(image_mask(succ, x)))
}

/// Parallel only where the enumeration outweighs scheduling.
fn all_subsets(n: usize, pred: impl Fn(u32) -> bool + Sync + Send) -> bool {
    if n >= 12 {
        (0..1u32 << n).into_par_iter().all(pred)
    } else {
        (0..1u32 << n).all(pred)
    }
}

/// `Q^ue(u, v)`. Both set-family characterizations are evaluated and a
/// disagreement between them is an error.
pub fn ue_related_by(q: &Relation, u: &Ultrafilter, v: &Ultrafilter) -> Result<bool> {
    check_pair(q, u, v)?;
    let (succ, pred) = masks(q);
    let a = by_diamonds(&pred, u, v);
    let b = by_images(&succ, u, v);
    if a != b {
        return Err(Error::Disagreement(format!(
            "diamond and image characterizations differ on ({}, {})",
            u.generator, v.generator
        )));
    }
    Ok(a)
}

pub fn ue_related(s: &Structure, u: &Ultrafilter, v: &Ultrafilter) -> Result<bool> {
    ue_related_by(s.relation(), u, v)
}

/// `{x : {y : R(x,y)} ∈ v} ∈ u`.
pub fn tilde_related(s: &Structure, u: &Ultrafilter, v: &Ultrafilter) -> Result<bool> {
    check_pair(s.relation(), u, v)?;
    let mut inner = NodeSet::empty(s.len());
    for x in 0..s.len() {
        if v.contains(s.successors(x))? {
            inner.insert(x);
        }
    }
    u.contains(&inner)
}

/// The ultrafilter extension of a finite structure together with the map
/// `w ↦ π_w`.
#[derive(Clone, Debug)]
pub struct UeExtension {
    /// Node `i` is `π_{witness⁻¹(i)}`, named `pi(<name>)`.
    pub structure: Structure,
    /// `witness[w]` is the extension node of `π_w`.
    pub witness: Vec<NodeId>,
}

pub fn ue_extension_finite(s: &Structure) -> Result<UeExtension> {
    let n = s.len();
    limit("ultrafilter universe", n, MAX_UNIVERSE)?;
    let points: Vec<Ultrafilter> = (0..n).map(|w| Ultrafilter { universe: n, generator: w }).collect();
    let mut edges = Vec::new();
    for (i, u) in points.iter().enumerate() {
        for (j, v) in points.iter().enumerate() {
            if ue_related(s, u, v)? {
                edges.push((i, j));
            }
        }
    }
    let names = s.names().iter().map(|a| format!("pi({a})")).collect();
    let structure = Structure::new(names, edges, s.hubs().iter())?;
    Ok(UeExtension { structure, witness: (0..n).collect() })
}

/// `map` is a bijection from `a` onto `b` preserving edges both ways.
pub fn is_isomorphism(a: &Structure, b: &Structure, map: &[NodeId]) -> bool {
    if a.len() != b.len() || map.len() != a.len() {
        return false;
    }
    let mut hit = vec![false; b.len()];
    for &m in map {
        if m >= b.len() || std::mem::replace(&mut hit[m], true) {
            return false;
        }
    }
    (0..a.len()).all(|x| (0..a.len()).all(|y| a.edge(x, y) == b.edge(map[x], map[y])))
}

/// Pairwise disjoint sets with `D_j ∈ u_i` iff `i = j`.
pub fn distinguishing_sets(us: &[Ultrafilter]) -> Result<Vec<NodeSet>> {
    let Some(first) = us.first() else {
        return Ok(Vec::new());
    };
    let n = first.universe;
    for (i, u) in us.iter().enumerate() {
        if u.universe != n {
            return Err(Error::UniverseMismatch { expected: n, found: u.universe });
        }
        if us[..i].contains(u) {
            return Err(Error::Input(format!("ultrafilter pi({}) is listed twice", u.generator)));
        }
    }
    if us.len() == 1 {
        return Ok(vec![NodeSet::full(n)]);
    }
    Ok(us.iter().map(|u| NodeSet::singleton(n, u.generator)).collect())
}

/// A road whose stops are ultrafilters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltrafilterRoad {
    pub stops: Vec<Ultrafilter>,
    /// `forward[i]`: step `i` follows `Q^ue`, otherwise its converse.
    pub forward: Vec<bool>,
}

impl UltrafilterRoad {
    /// Lifts a road of nodes to the principal ultrafilters over them.
    pub fn principal(road: &Road, universe: usize) -> Result<Self> {
        Ok(UltrafilterRoad {
            stops: road.nodes.iter().map(|&w| Ultrafilter::principal(universe, w)).collect::<Result<_>>()?,
            forward: road.forward.clone(),
        })
    }
}

/// `Δ(X, road)`: `Δ_0 = X`, then `Q[Δ_i] ∩ D_{i+1}` on a forward step and
/// `⟨Q⟩(Δ_i) ∩ D_{i+1}` on a backward one.
pub fn ultrafilter_road_delta(
    q: &Relation,
    x: &NodeSet,
    road: &UltrafilterRoad,
    dsets: &[NodeSet],
) -> Result<NodeSet> {
    let n = q.universe();
    x.check_universe(n)?;
    let Some(first) = road.stops.first() else {
        return Err(Error::Precondition("empty road".into()));
    };
    if road.forward.len() + 1 != road.stops.len() {
        return Err(Error::Precondition("road needs one direction per step".into()));
    }
    if dsets.len() != road.stops.len() {
        return Err(Error::Precondition(format!("{} stops but {} distinguishing sets", road.stops.len(), dsets.len())));
    }
    for d in dsets {
        d.check_universe(n)?;
    }
    for (i, u) in road.stops.iter().enumerate() {
        for (j, d) in dsets.iter().enumerate() {
            if u.contains(d)? != (i == j) {
                return Err(Error::Precondition(format!("set {j} does not distinguish stop {i}")));
            }
            if i < j && d.intersects(&dsets[i]) {
                return Err(Error::Precondition(format!("distinguishing sets {i} and {j} overlap")));
            }
        }
    }
    if !first.contains(x)? {
        return Err(Error::Precondition("X is not in the road's first ultrafilter".into()));
    }
    let mut delta = x.clone();
    for (i, &fwd) in road.forward.iter().enumerate() {
        let (a, b) = (&road.stops[i], &road.stops[i + 1]);
        let ok = if fwd { ue_related_by(q, a, b)? } else { ue_related_by(q, b, a)? };
        if !ok {
            return Err(Error::Precondition(format!("step {i} is not an edge of the extension")));
        }
        let moved = if fwd { q.image(&delta)? } else { q.preimage(&delta)? };
        delta = moved.intersection(&dsets[i + 1]);
    }
    Ok(delta)
}
