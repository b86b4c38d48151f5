use std::collections::BTreeSet;

use super::semantics::Valuation;
use crate::nodeset::{NodeId, NodeSet};
use crate::structure::Structure;

/// A Kripke model: a frame with a valuation.
#[derive(Clone, Copy, Debug)]
pub struct Model<'a> {
    pub frame: &'a Structure,
    pub valuation: &'a Valuation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bisimulation {
    pub pairs: BTreeSet<(NodeId, NodeId)>,
}

impl Bisimulation {
    pub fn contains(&self, x: NodeId, y: NodeId) -> bool {
        self.pairs.contains(&(x, y))
    }

    /// Every node of the left model is related to something.
    pub fn is_total(&self, left: &Structure) -> bool {
        (0..left.len()).all(|x| self.pairs.iter().any(|&(a, _)| a == x))
    }

    /// Every node of the right model is related to something.
    pub fn is_surjective(&self, right: &Structure) -> bool {
        (0..right.len()).all(|y| self.pairs.iter().any(|&(_, b)| b == y))
    }
}

fn variables(m1: &Model, m2: &Model) -> BTreeSet<String> {
    m1.valuation.iter().chain(m2.valuation.iter()).map(|(k, _)| k.clone()).collect()
}

fn holds(m: &Model, var: &str, w: NodeId) -> bool {
    m.valuation.get(var).is_some_and(|s| s.contains(w))
}

fn harmony(m1: &Model, m2: &Model, vars: &BTreeSet<String>, x: NodeId, y: NodeId) -> bool {
    vars.iter().all(|p| holds(m1, p, x) == holds(m2, p, y))
}

/// The greatest bisimulation, by shrinking the atomic-harmony relation
/// until forth and back both hold. Variables missing from a valuation are
/// read as empty.
pub fn largest_bisimulation(m1: Model, m2: Model) -> Bisimulation {
    let (a, b) = (m1.frame, m2.frame);
    let vars = variables(&m1, &m2);
    let mut z: Vec<NodeSet> = (0..a.len())
        .map(|x| NodeSet::from_nodes(b.len(), (0..b.len()).filter(|&y| harmony(&m1, &m2, &vars, x, y))))
        .collect();
    loop {
        let mut changed = false;
        for x in 0..a.len() {
            let keep: Vec<NodeId> = z[x]
                .iter()
                .filter(|&y| {
                    let forth = a.successors(x).iter().all(|x2| z[x2].intersects(b.successors(y)));
                    let back = b.successors(y).iter().all(|y2| a.successors(x).iter().any(|x2| z[x2].contains(y2)));
                    forth && back
                })
                .collect();
            if keep.len() != z[x].len() {
                z[x] = NodeSet::from_nodes(b.len(), keep);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Bisimulation { pairs: z.iter().enumerate().flat_map(|(x, ys)| ys.iter().map(move |y| (x, y))).collect() }
}

/// Atomic harmony, forth and back for every pair.
pub fn is_bisimulation(m1: Model, m2: Model, z: &Bisimulation) -> bool {
    let vars = variables(&m1, &m2);
    z.pairs.iter().all(|&(x, y)| {
        x < m1.frame.len()
            && y < m2.frame.len()
            && harmony(&m1, &m2, &vars, x, y)
            && m1.frame.successors(x).iter().all(|x2| m2.frame.successors(y).iter().any(|y2| z.contains(x2, y2)))
            && m2.frame.successors(y).iter().all(|y2| m1.frame.successors(x).iter().any(|x2| z.contains(x2, y2)))
    })
}
