use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::semantics::{MaskFrame, MaskProgram, ValidityLimits};
use super::syntax::ModalFormula;
use crate::error::{Error, Result};
use crate::nodeset::{NodeId, NodeSet};
use crate::structure::Structure;

/// Nodes reachable from `from` by a path of length ≥ 1 whose intermediate
/// nodes all lie in `allowed`.
fn reach_through(s: &Structure, from: NodeId, allowed: &NodeSet) -> NodeSet {
    let mut seen = NodeSet::empty(s.len());
    let mut stack: Vec<NodeId> = s.successors(from).iter().collect();
    for &x in &stack {
        seen.insert(x);
    }
    while let Some(x) = stack.pop() {
        if !allowed.contains(x) {
            continue;
        }
        for y in s.successors(x).iter() {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

fn connected_via(s: &Structure, w: NodeId, allowed: &NodeSet) -> bool {
    let succ = s.successors(w);
    succ.iter().all(|u| {
        let r = reach_through(s, u, allowed);
        succ.iter().all(|v| u == v || r.contains(v))
    })
}

/// Every ordered pair of distinct successors of `w` is joined by a forward
/// path whose intermediate nodes lie in `R[w] ∪ {w}`.
///
/// Allowing `w` itself as an intermediate is what makes this, together
/// with the reflexivity clause of [`star_star_condition`], the exact local
/// correspondent of [`phi_formula`](super::phi_formula).
pub fn star_condition(s: &Structure, w: NodeId) -> bool {
    let mut allowed = s.successors(w).clone();
    allowed.insert(w);
    connected_via(s, w, &allowed)
}

/// The stricter reading of [`star_condition`] with intermediates confined
/// to `R[w]`. It differs only at irreflexive `w` whose successors can get
/// back to `w`, and there it is not a correspondent of `phi`: on
/// `w→a, w→b, a→w, b→w` the formula is valid at `w` while this fails.
pub fn star_condition_within(s: &Structure, w: NodeId) -> bool {
    connected_via(s, w, s.successors(w))
}

/// The clauses of [`star_star_condition`], evaluated separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarStarParts {
    pub star: bool,
    pub irreflexive: bool,
    pub successors: usize,
    pub mutual_partner: bool,
}

impl StarStarParts {
    pub fn of(s: &Structure, w: NodeId) -> Self {
        let succ = s.successors(w);
        StarStarParts {
            star: star_condition(s, w),
            irreflexive: !succ.contains(w),
            successors: succ.len(),
            mutual_partner: succ.iter().any(|v| v != w && s.edge(v, w)),
        }
    }

    /// Combines the clauses; `many_successors` overrides the finite count
    /// when the true out-degree is known to exceed one.
    pub fn holds_with(&self, many_successors: bool) -> bool {
        self.star && (self.irreflexive || !many_successors || self.mutual_partner)
    }

    pub fn holds(&self) -> bool {
        self.holds_with(self.successors > 1)
    }
}

/// `(∗)` and (`w` irreflexive, or `|R[w]| ≤ 1`, or some `v ≠ w` in `R[w]` with `R(v,w)`).
pub fn star_star_condition(s: &Structure, w: NodeId) -> bool {
    StarStarParts::of(s, w).holds()
}

/// Frame sizes and sampling for [`correspondence_test`].
#[derive(Clone, Copy, Debug)]
pub struct CorrespondenceConfig {
    /// Every frame with 1..=this many nodes is checked.
    pub exhaustive_max_nodes: usize,
    /// Random frames are drawn with sizes above the exhaustive bound up to this.
    pub sampled_max_nodes: usize,
    pub samples: usize,
    pub seed: u64,
    pub limits: ValidityLimits,
}

impl Default for CorrespondenceConfig {
    fn default() -> Self {
        CorrespondenceConfig {
            exhaustive_max_nodes: 4,
            sampled_max_nodes: 7,
            samples: 200,
            seed: 0x5eed,
            limits: ValidityLimits::default(),
        }
    }
}

/// A point where local validity and the condition disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub nodes: usize,
    pub edges: Vec<(NodeId, NodeId)>,
    pub node: NodeId,
    pub formula_valid: bool,
    pub condition: bool,
}

impl Violation {
    pub fn frame(&self) -> Structure {
        Structure::anonymous(self.nodes, self.edges.iter().copied())
    }
}

#[derive(Clone, Debug, Default)]
pub struct CorrespondenceReport {
    pub frames_checked: usize,
    pub points_checked: usize,
    pub violations: Vec<Violation>,
}

fn check_frame<C>(n: usize, bits: u64, prog: &MaskProgram, condition: &C) -> Vec<Violation>
where
    C: Fn(&Structure, NodeId) -> bool + Sync,
{
    let frame = MaskFrame::from_bits(n, bits);
    let valid = frame.local_validity(prog);
    let edges: Vec<(NodeId, NodeId)> =
        (0..n * n).filter(|b| bits >> b & 1 == 1).map(|b| (b / n, b % n)).collect();
    let s = Structure::anonymous(n, edges.iter().copied());
    (0..n)
        .filter_map(|w| {
            let fv = valid >> w & 1 == 1;
            let c = condition(&s, w);
            (fv != c).then(|| Violation { nodes: n, edges: edges.clone(), node: w, formula_valid: fv, condition: c })
        })
        .collect()
}

/// Compares local validity of `formula` with `condition` at every point
/// of every frame in the configured corpus and reports each disagreement.
pub fn correspondence_test<C>(cfg: &CorrespondenceConfig, formula: &ModalFormula, condition: C) -> Result<CorrespondenceReport>
where
    C: Fn(&Structure, NodeId) -> bool + Sync,
{
    let prog = MaskProgram::compile(formula);
    let vars = prog.vars.len();
    let largest = cfg.exhaustive_max_nodes.max(if cfg.samples > 0 { cfg.sampled_max_nodes } else { 0 });
    let needed = largest * vars;
    if needed > cfg.limits.max_val_bits.min(62) || cfg.exhaustive_max_nodes > 5 || largest > 8 {
        return Err(Error::Limit {
            what: "correspondence corpus valuation bits",
            needed: needed as u128,
            cap: cfg.limits.max_val_bits as u128,
        });
    }
    let mut report = CorrespondenceReport::default();
    for n in 1..=cfg.exhaustive_max_nodes {
        let total = 1u64 << (n * n);
        let mut found: Vec<Violation> =
            (0..total).into_par_iter().flat_map_iter(|bits| check_frame(n, bits, &prog, &condition)).collect();
        report.frames_checked += total as usize;
        report.points_checked += total as usize * n;
        report.violations.append(&mut found);
    }
    if cfg.samples > 0 && cfg.sampled_max_nodes > cfg.exhaustive_max_nodes {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let frames: Vec<(usize, u64)> = (0..cfg.samples)
            .map(|_| {
                let n = rng.gen_range(cfg.exhaustive_max_nodes + 1..=cfg.sampled_max_nodes);
                let density: f64 = rng.gen_range(0.15..0.6);
                let bits = (0..n * n).fold(0u64, |acc, b| if rng.gen_bool(density) { acc | 1 << b } else { acc });
                (n, bits)
            })
            .collect();
        let mut found: Vec<Violation> =
            frames.par_iter().flat_map_iter(|&(n, bits)| check_frame(n, bits, &prog, &condition)).collect();
        report.frames_checked += frames.len();
        report.points_checked += frames.iter().map(|f| f.0).sum::<usize>();
        report.violations.append(&mut found);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(names: &[&str], edges: &[(&str, &str)]) -> (Structure, impl Fn(&str) -> NodeId) {
        let s = Structure::new(
            names.iter().map(|n| n.to_string()).collect(),
            edges.iter().map(|(a, b)| {
                (names.iter().position(|x| x == a).unwrap(), names.iter().position(|x| x == b).unwrap())
            }),
            [],
        )
        .unwrap();
        let owned: Vec<String> = names.iter().map(|n| n.to_string()).collect();
        (s, move |n: &str| owned.iter().position(|x| x == n).unwrap())
    }

    #[test]
    fn star_examples() {
        let (s, id) = named(&["w"], &[]);
        assert!(star_condition(&s, id("w")));
        assert!(star_star_condition(&s, id("w")));
        let (s, id) = named(&["w", "a", "b"], &[("w", "a"), ("w", "b")]);
        assert!(!star_condition(&s, id("w")));
        let (s, id) = named(&["w", "a", "b", "c"], &[("w", "a"), ("w", "b"), ("w", "c"), ("a", "b"), ("b", "c"), ("c", "a")]);
        assert!(star_condition(&s, id("w")));
    }

    #[test]
    fn star_star_examples() {
        let (s, id) = named(&["w", "v"], &[("w", "w"), ("w", "v")]);
        assert!(!star_condition(&s, id("w")));
        assert!(!star_star_condition(&s, id("w")));
        let (s, id) = named(&["w", "v"], &[("w", "w"), ("w", "v"), ("v", "w")]);
        assert!(star_star_condition(&s, id("w")));
    }

    #[test]
    fn return_through_root_separates_readings() {
        let (s, id) = named(&["w", "a", "b"], &[("w", "a"), ("w", "b"), ("a", "w"), ("b", "w")]);
        assert!(star_condition(&s, id("w")));
        assert!(!star_condition_within(&s, id("w")));
    }
}
