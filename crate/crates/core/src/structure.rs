//! Finite structures: named nodes, one binary relation, a declared hub set.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result};
use crate::nodeset::{NodeId, NodeSet, Relation};

/// A finite directed graph over named nodes with a marked hub subset.
///
/// Every hub `h` gets a constant `d_h`. Node order is declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    relation: Relation,
    hubs: NodeSet,
    constants: BTreeMap<String, NodeId>,
}

impl Structure {
    /// Builds a structure from node names, an edge list over indices and hub indices.
    pub fn new(
        names: Vec<String>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
        hubs: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self> {
        let n = names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::Input(format!("bad node name `{name}`")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate node `{name}`")));
            }
        }
        let mut relation = Relation::new(n);
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Input(format!("edge ({a},{b}) outside {n} nodes")));
            }
            relation.insert(a, b);
        }
        let mut hub_set = NodeSet::empty(n);
        let mut constants = BTreeMap::new();
        for h in hubs {
            if h >= n {
                return Err(Error::Input(format!("hub index {h} outside {n} nodes")));
            }
            hub_set.insert(h);
            constants.insert(format!("d_{}", names[h]), h);
        }
        Ok(Structure { names, index, relation, hubs: hub_set, constants })
    }

    /// Nodes named `v0, v1, ..` with no hubs.
    pub fn anonymous(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        Self::new((0..n).map(|i| format!("v{i}")).collect(), edges, []).expect("valid by construction")
    }

    pub fn from_relation(names: Vec<String>, relation: Relation, hubs: &NodeSet) -> Result<Self> {
        if relation.universe() != names.len() {
            return Err(Error::UniverseMismatch { expected: names.len(), found: relation.universe() });
        }
        hubs.check_universe(names.len())?;
        Self::new(names, relation.pairs().collect::<Vec<_>>(), hubs.iter())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id]
    }

    pub fn node(&self, name: &str) -> Result<NodeId> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn node_set<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<NodeSet> {
        let mut s = NodeSet::empty(self.len());
        for n in names {
            s.insert(self.node(n)?);
        }
        Ok(s)
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn edge(&self, a: NodeId, b: NodeId) -> bool {
        self.relation.contains(a, b)
    }

    pub fn successors(&self, w: NodeId) -> &NodeSet {
        self.relation.successors(w)
    }

    pub fn hubs(&self) -> &NodeSet {
        &self.hubs
    }

    pub fn is_hub(&self, w: NodeId) -> bool {
        self.hubs.contains(w)
    }

    /// Hub names in sorted order.
    pub fn hub_names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.hubs.iter().map(|h| self.names[h].clone()).collect();
        v.sort();
        v
    }

    /// Constant names `d_<hub>` and the hubs they denote.
    pub fn constants(&self) -> &BTreeMap<String, NodeId> {
        &self.constants
    }

    pub fn constant(&self, name: &str) -> Result<NodeId> {
        self.constants
            .get(name)
            .copied()
            .ok_or_else(|| Error::Input(format!("unknown constant `{name}`")))
    }

    /// Same nodes and hubs, different relation.
    pub fn with_relation(&self, relation: Relation) -> Result<Structure> {
        Structure::from_relation(self.names.clone(), relation, &self.hubs)
    }

    /// `(S, P)`: P holds the edges touching a hub, S the rest.
    pub fn decompose(&self) -> (Relation, Relation) {
        let n = self.len();
        let mut s = Relation::new(n);
        let mut p = Relation::new(n);
        for (a, b) in self.relation.pairs() {
            if self.hubs.contains(a) || self.hubs.contains(b) {
                p.insert(a, b);
            } else {
                s.insert(a, b);
            }
        }
        (s, p)
    }

    pub fn image(&self, q: &Relation, x: &NodeSet) -> Result<NodeSet> {
        self.check_relation(q)?;
        q.image(x)
    }

    pub fn preimage(&self, q: &Relation, x: &NodeSet) -> Result<NodeSet> {
        self.check_relation(q)?;
        q.preimage(x)
    }

    pub fn max_degrees(&self, q: &Relation) -> Result<(usize, usize)> {
        self.check_relation(q)?;
        Ok(q.max_degrees())
    }

    fn check_relation(&self, q: &Relation) -> Result<()> {
        if q.universe() == self.len() {
            Ok(())
        } else {
            Err(Error::UniverseMismatch { expected: self.len(), found: q.universe() })
        }
    }

    /// A shortest road from `s` to `t` over `q ∪ q⁻¹` of length at most `max_len`.
    ///
    /// Among shortest roads the node sequence is lexicographically least by
    /// node index; a step that can go either way is recorded as forward.
    pub fn find_road(&self, q: &Relation, s: NodeId, t: NodeId, max_len: usize) -> Result<Option<Road>> {
        self.check_relation(q)?;
        if s >= self.len() || t >= self.len() {
            return Err(Error::UnknownNode(format!("#{}", s.max(t))));
        }
        // distances to t
        let n = self.len();
        let mut dist = vec![usize::MAX; n];
        dist[t] = 0;
        let mut queue = VecDeque::from([t]);
        while let Some(x) = queue.pop_front() {
            for y in q.successors(x).iter().chain(q.predecessors(x).iter()) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        if dist[s] == usize::MAX || dist[s] > max_len {
            return Ok(None);
        }
        let mut nodes = vec![s];
        let mut forward = Vec::with_capacity(dist[s]);
        let mut cur = s;
        while cur != t {
            let next = q
                .successors(cur)
                .union(q.predecessors(cur))
                .iter()
                .find(|&y| dist[y] + 1 == dist[cur])
                .expect("bfs layers are connected");
            forward.push(q.contains(cur, next));
            nodes.push(next);
            cur = next;
        }
        Ok(Some(Road { nodes, forward }))
    }
}

/// A walk `w_0 .. w_n` where step `i` uses `Q(w_i, w_{i+1})` when
/// `forward[i]` and `Q(w_{i+1}, w_i)` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Road {
    pub nodes: Vec<NodeId>,
    pub forward: Vec<bool>,
}

impl Road {
    pub fn trivial(node: NodeId) -> Self {
        Road { nodes: vec![node], forward: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn start(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn end(&self) -> NodeId {
        *self.nodes.last().expect("roads are nonempty")
    }

    /// Every flagged edge exists in `q` and the shape is consistent.
    pub fn replays(&self, q: &Relation) -> bool {
        self.nodes.len() == self.forward.len() + 1
            && self.forward.iter().enumerate().all(|(i, &fwd)| {
                let (a, b) = (self.nodes[i], self.nodes[i + 1]);
                if fwd {
                    q.contains(a, b)
                } else {
                    q.contains(b, a)
                }
            })
    }

    pub fn reversed(&self) -> Road {
        Road {
            nodes: self.nodes.iter().rev().copied().collect(),
            forward: self.forward.iter().rev().map(|f| !f).collect(),
        }
    }

    pub fn render(&self, s: &Structure) -> String {
        let mut out = s.name(self.nodes[0]).to_string();
        for (i, &fwd) in self.forward.iter().enumerate() {
            out.push_str(if fwd { " -> " } else { " <- " });
            out.push_str(s.name(self.nodes[i + 1]));
        }
        out
    }
}

/// Parses the line-oriented `.frame` format.
pub fn parse_frame(text: &str) -> std::result::Result<Structure, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut hubs = Vec::new();
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = line.split_whitespace().collect();
        let ln = lineno + 1;
        let col = |w: &str| raw.find(w).map_or(1, |c| c + 1);
        match words.as_slice() {
            [] => {}
            [kw @ ("node" | "hub"), name] => {
                let is_hub = *kw == "hub";
                if is_hub && !crate::lex::is_ident(name) {
                    return Err(ParseError::new(ln, col(name), format!("hub name `{name}` is not an identifier")));
                }
                if index.insert(name.to_string(), names.len()).is_some() {
                    return Err(ParseError::new(ln, col(name), format!("duplicate node `{name}`")));
                }
                if is_hub {
                    hubs.push(names.len());
                }
                names.push(name.to_string());
            }
            ["edge", a, b] => {
                let lookup = |n: &str| {
                    index
                        .get(n)
                        .copied()
                        .ok_or_else(|| ParseError::new(ln, col(n), format!("undeclared node `{n}`")))
                };
                edges.push((lookup(a)?, lookup(b)?));
            }
            [kw, ..] => {
                return Err(ParseError::new(ln, col(kw), format!("expected `node`, `hub` or `edge` line, got `{}`", line.trim())));
            }
        }
    }
    Structure::new(names, edges, hubs).map_err(|e| ParseError::new(0, 0, e.to_string()))
}

/// Prints nodes in declaration order, then edges sorted by node index.
pub fn print_frame(s: &Structure) -> String {
    let mut out = String::new();
    for (i, name) in s.names().iter().enumerate() {
        let kw = if s.is_hub(i) { "hub" } else { "node" };
        let _ = writeln!(out, "{kw} {name}");
    }
    for (a, b) in s.relation().pairs() {
        let _ = writeln!(out, "edge {} {}", s.name(a), s.name(b));
    }
    out
}
