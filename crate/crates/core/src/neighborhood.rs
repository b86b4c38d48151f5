//! Rooted neighborhoods with hub annotations, their P-isomorphism, and the
//! first-order formulas describing them.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::canon::{self, LabeledDigraph};
use crate::error::{Error, Result};
use crate::fo::{FoFormula, Pred, Term};
use crate::nodeset::{NodeId, NodeSet, Relation};
use crate::structure::Structure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// An edge from the hub to the node.
    In,
    /// An edge from the node to the hub.
    Out,
}

/// A P-edge between a neighborhood node and a hub.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Annotation {
    pub dir: Direction,
    pub hub: String,
}

impl Annotation {
    pub fn new(dir: Direction, hub: impl Into<String>) -> Self {
        Annotation { dir, hub: hub.into() }
    }

    fn render(&self) -> String {
        match self.dir {
            Direction::In => format!("in.{}", self.hub),
            Direction::Out => format!("out.{}", self.hub),
        }
    }
}

/// A rooted finite digraph of S-edges with per-node hub annotations.
///
/// `hub[i]` names the hub that node `i` is, if it is one; a hub has no
/// S-edges, so it only ever occurs as a singleton neighborhood.
/// `hubs` is the vocabulary: neighborhoods over different hub sets are
/// never P-isomorphic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhood {
    pub root: usize,
    pub nodes: Vec<String>,
    pub s_edges: BTreeSet<(usize, usize)>,
    pub annotations: Vec<BTreeSet<Annotation>>,
    pub hub: Vec<Option<String>>,
    pub radius: usize,
    pub hubs: BTreeSet<String>,
}

/// Canonical relabeling of a neighborhood. The root is always node 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    /// `order[i]` is the original node at canonical position `i`.
    pub order: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub annotations: Vec<BTreeSet<Annotation>>,
    pub hub: Vec<Option<String>>,
    pub digest: String,
}

/// Digest format version prefix.
pub const DIGEST_PREFIX: &str = "nbhd/1";

impl Neighborhood {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn graph(&self, with_annotations: bool) -> LabeledDigraph {
        let labels = (0..self.len())
            .map(|i| {
                let root = if i == self.root { "0" } else { "1" };
                if !with_annotations {
                    return root.to_string();
                }
                let hub = self.hub[i].as_deref().unwrap_or("-");
                let ann: Vec<String> = self.annotations[i].iter().map(Annotation::render).collect();
                format!("{root}|{hub}|{}", ann.join("+"))
            })
            .collect();
        LabeledDigraph { labels, edges: self.s_edges.clone() }
    }

    /// The neighborhood cut down to radius `n` around its root.
    pub fn truncate(&self, n: usize) -> Neighborhood {
        let dist = distances(self.len(), &self.s_edges, self.root);
        let keep: Vec<usize> = (0..self.len()).filter(|&i| dist[i] <= n).collect();
        let pos = |i: usize| keep.iter().position(|&k| k == i);
        Neighborhood {
            root: pos(self.root).expect("root kept"),
            nodes: keep.iter().map(|&i| self.nodes[i].clone()).collect(),
            s_edges: self.s_edges.iter().filter_map(|&(a, b)| Some((pos(a)?, pos(b)?))).collect(),
            annotations: keep.iter().map(|&i| self.annotations[i].clone()).collect(),
            hub: keep.iter().map(|&i| self.hub[i].clone()).collect(),
            radius: n.min(self.radius),
            hubs: self.hubs.clone(),
        }
    }
}

fn distances(n: usize, edges: &BTreeSet<(usize, usize)>, root: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; n];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &(a, b) in edges {
            let y = if a == x { b } else if b == x { a } else { continue };
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Nodes within `n` steps of `w` along `q ∪ q⁻¹`, in BFS order (ties by index).
fn ball(q: &Relation, w: NodeId, n: Option<usize>) -> Vec<NodeId> {
    let mut dist = vec![usize::MAX; q.universe()];
    dist[w] = 0;
    let mut order = vec![w];
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        i += 1;
        if n.is_some_and(|n| dist[x] >= n) {
            continue;
        }
        let mut next: Vec<NodeId> = q.successors(x).union(q.predecessors(x)).iter().collect();
        next.sort_unstable();
        for y in next {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                order.push(y);
            }
        }
    }
    order
}

fn build(s: &Structure, q: &Relation, members: Vec<NodeId>, radius: usize) -> Neighborhood {
    let pos = |x: NodeId| members.iter().position(|&m| m == x);
    let s_edges = members
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| q.successors(a).iter().filter_map(move |b| pos(b).map(|j| (i, j))))
        .collect();
    let hubs: BTreeSet<String> = s.hub_names().into_iter().collect();
    let annotations = members
        .iter()
        .map(|&x| {
            let mut set = BTreeSet::new();
            for h in s.hubs().iter() {
                if s.edge(x, h) {
                    set.insert(Annotation::new(Direction::Out, s.name(h)));
                }
                if s.edge(h, x) {
                    set.insert(Annotation::new(Direction::In, s.name(h)));
                }
            }
            set
        })
        .collect();
    Neighborhood {
        root: 0,
        nodes: members.iter().map(|&x| s.name(x).to_string()).collect(),
        s_edges,
        annotations,
        hub: members.iter().map(|&x| s.is_hub(x).then(|| s.name(x).to_string())).collect(),
        radius,
        hubs,
    }
}

/// The `(q, n)`-neighborhood of `w`, annotated with P-edges to the structure's hubs.
pub fn extract(s: &Structure, q: &Relation, w: NodeId, n: usize) -> Result<Neighborhood> {
    if w >= s.len() {
        return Err(Error::UnknownNode(format!("#{w}")));
    }
    if q.universe() != s.len() {
        return Err(Error::UniverseMismatch { expected: s.len(), found: q.universe() });
    }
    Ok(build(s, q, ball(q, w, Some(n)), n))
}

/// The whole `q`-component of `w`, with radius set to its diameter.
pub fn extract_component(s: &Structure, q: &Relation, w: NodeId) -> Result<Neighborhood> {
    let mut nb = extract(s, q, w, s.len())?;
    nb.radius = (0..nb.len())
        .map(|i| distances(nb.len(), &nb.s_edges, i).into_iter().max().unwrap_or(0))
        .max()
        .unwrap_or(0);
    Ok(nb)
}

/// A root-preserving isomorphism of the S-edge shapes, ignoring annotations.
pub fn iso(a: &Neighborhood, b: &Neighborhood) -> Option<Vec<usize>> {
    canon::isomorphism_backtrack(&a.graph(false), &b.graph(false))
}

/// A root-preserving isomorphism that also preserves annotations and hub identity.
pub fn p_iso_map(a: &Neighborhood, b: &Neighborhood) -> Option<Vec<usize>> {
    if a.hubs != b.hubs {
        return None;
    }
    canon::isomorphism_backtrack(&a.graph(true), &b.graph(true))
}

pub fn p_iso(a: &Neighborhood, b: &Neighborhood) -> bool {
    p_iso_map(a, b).is_some()
}

pub fn canonical_form(nb: &Neighborhood) -> CanonicalForm {
    let c = canon::canonical_labeling(&nb.graph(true));
    let order = c.order;
    let edges = c.code.edges;
    let annotations: Vec<BTreeSet<Annotation>> = order.iter().map(|&i| nb.annotations[i].clone()).collect();
    let hub: Vec<Option<String>> = order.iter().map(|&i| nb.hub[i].clone()).collect();

    let mut d = String::new();
    let _ = write!(d, "{DIGEST_PREFIX};hubs={};n={};e=", nb.hubs.iter().cloned().collect::<Vec<_>>().join(","), nb.len());
    d.push_str(&edges.iter().map(|(a, b)| format!("{a}>{b}")).collect::<Vec<_>>().join(","));
    d.push_str(";a=");
    let ann: Vec<String> = annotations
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(i, s)| format!("{i}:{}", s.iter().map(Annotation::render).collect::<Vec<_>>().join("+")))
        .collect();
    d.push_str(&ann.join(","));
    d.push_str(";hub=");
    let hubs: Vec<String> = hub.iter().enumerate().filter_map(|(i, h)| h.as_ref().map(|h| format!("{i}:{h}"))).collect();
    d.push_str(&hubs.join(","));
    CanonicalForm { order, edges, annotations, hub, digest: d }
}

/// Nodes whose `(S, n)`-neighborhood is P-isomorphic to `nb`.
pub fn matching_set(s: &Structure, nb: &Neighborhood, n: usize) -> Result<NodeSet> {
    let target = canonical_form(nb).digest;
    let (srel, _) = s.decompose();
    let mut out = NodeSet::empty(s.len());
    for w in 0..s.len() {
        if canonical_form(&extract(s, &srel, w, n)?).digest == target {
            out.insert(w);
        }
    }
    Ok(out)
}

/// `psi_n(a, b)`: an S-road of length `n` from `a` to `b` through pairwise
/// distinct nodes. Internal variables are `{prefix}1 .. {prefix}(n-1)`.
pub fn psi(n: usize, a: &str, b: &str, prefix: &str) -> FoFormula {
    if n == 0 {
        return FoFormula::eq(Term::var(a), Term::var(b));
    }
    let names: Vec<String> = (0..=n)
        .map(|i| match i {
            0 => a.to_string(),
            i if i == n => b.to_string(),
            i => format!("{prefix}{i}"),
        })
        .collect();
    let v = |i: usize| Term::var(names[i].clone());
    let distinct = (0..=n)
        .flat_map(|i| (0..=n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| FoFormula::not(FoFormula::eq(v(i), v(j))));
    let steps = (0..n).map(|i| {
        FoFormula::or(FoFormula::rel(Pred::S, v(i), v(i + 1)), FoFormula::rel(Pred::S, v(i + 1), v(i)))
    });
    let body = FoFormula::and(FoFormula::conj(distinct), FoFormula::conj(steps));
    FoFormula::exists_many(names[1..n].to_vec(), body)
}

/// `psi_n` with free variables `y0` and `yn`.
pub fn emit_psi(n: usize) -> FoFormula {
    psi(n, "y0", "yn", "y")
}

/// Default node cap for [`emit_chi`].
pub const DEFAULT_CHI_MAX_NODES: usize = 16;

/// Variable standing for node `i` of `nb` in [`emit_chi`]: `x` for the root,
/// `x1, x2, ..` for the others in node order.
pub fn chi_variable(nb: &Neighborhood, i: usize) -> String {
    if i == nb.root {
        return "x".into();
    }
    let rank = if i < nb.root { i + 1 } else { i };
    format!("x{rank}")
}

/// `chi(x)`: there are further nodes realizing exactly this neighborhood
/// around `x` (S-edges and non-edges, P-edges and non-edges to every hub,
/// distinctness from hub constants, pairwise distinctness), and every node
/// within `bound` S-road steps of `x` is one of them.
pub fn emit_chi(nb: &Neighborhood, bound: usize, max_nodes: usize) -> Result<FoFormula> {
    let k = nb.len();
    if k > max_nodes {
        return Err(Error::Limit { what: "chi neighborhood nodes", needed: k as u128, cap: max_nodes as u128 });
    }
    let x = |i: usize| Term::var(chi_variable(nb, i));
    let lit = |pos: bool, f: FoFormula| if pos { f } else { FoFormula::not(f) };
    let mut sigma = Vec::new();
    for i in 0..k {
        for j in 0..k {
            sigma.push(lit(nb.s_edges.contains(&(i, j)), FoFormula::rel(Pred::S, x(i), x(j))));
        }
    }
    for h in &nb.hubs {
        for i in 0..k {
            let into = nb.annotations[i].contains(&Annotation::new(Direction::In, h.clone()));
            sigma.push(lit(into, FoFormula::rel(Pred::P, Term::hub(h.clone()), x(i))));
        }
    }
    for h in &nb.hubs {
        for i in 0..k {
            let out = nb.annotations[i].contains(&Annotation::new(Direction::Out, h.clone()));
            sigma.push(lit(out, FoFormula::rel(Pred::P, x(i), Term::hub(h.clone()))));
        }
    }
    for h in &nb.hubs {
        let parts = (0..k).map(|i| {
            let same = FoFormula::eq(Term::hub(h.clone()), x(i));
            if nb.hub[i].as_deref() == Some(h) {
                same
            } else {
                FoFormula::not(same)
            }
        });
        sigma.push(FoFormula::conj(parts));
    }
    let reach = FoFormula::disj((0..=bound).map(|m| psi(m, "x", "y", "z")));
    let inside = FoFormula::disj((0..k).map(|i| FoFormula::eq(Term::var("y"), x(i))));
    sigma.push(FoFormula::forall("y", FoFormula::implies(reach, inside)));
    let distinct = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| FoFormula::not(FoFormula::eq(x(i), x(j))));
    sigma.push(FoFormula::conj(distinct));
    let vars = (0..k).filter(|&i| i != nb.root).map(|i| chi_variable(nb, i));
    Ok(FoFormula::exists_many(vars, FoFormula::conj(sigma)))
}
