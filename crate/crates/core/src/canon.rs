//! Canonical labeling of small vertex-labeled digraphs.
//!
//! Colour refinement followed by individualization of the first
//! non-singleton cell, exploring every branch and keeping the least
//! resulting code. Exact, exponential in the worst case, fine for the
//! few dozen nodes a neighborhood has.

use std::collections::BTreeSet;

/// A digraph on `0..labels.len()` with a string label per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledDigraph {
    pub labels: Vec<String>,
    pub edges: BTreeSet<(usize, usize)>,
}

/// Result of canonical labeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    /// `order[i]` is the original vertex placed at canonical position `i`.
    pub order: Vec<usize>,
    /// Labels in canonical order followed by relabeled edges; equal iff isomorphic.
    pub code: Code,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Code {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

struct Adj {
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl LabeledDigraph {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn adjacency(&self) -> Adj {
        let n = self.len();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            out[a].push(b);
            inn[b].push(a);
        }
        Adj { out, inn }
    }

    /// Code of the graph relabeled so that `order[i]` becomes vertex `i`.
    fn code_for(&self, order: &[usize]) -> Code {
        let mut pos = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (pos[a], pos[b])).collect();
        edges.sort_unstable();
        Code { labels: order.iter().map(|&v| self.labels[v].clone()).collect(), edges }
    }
}

/// Replaces colours by dense ranks of `keys`.
fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let sorted: BTreeSet<K> = keys.iter().cloned().collect();
    let sorted: Vec<K> = sorted.into_iter().collect();
    keys.iter().map(|k| sorted.binary_search(k).expect("key present")).collect()
}

fn cell_count(colors: &[usize]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m + 1)
}

/// Refines until stable. Colour ranks respect the previous order, so the
/// procedure commutes with isomorphisms.
fn refine(adj: &Adj, mut colors: Vec<usize>) -> Vec<usize> {
    loop {
        let keys: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..colors.len())
            .map(|v| {
                let mut o: Vec<usize> = adj.out[v].iter().map(|&u| colors[u]).collect();
                let mut i: Vec<usize> = adj.inn[v].iter().map(|&u| colors[u]).collect();
                o.sort_unstable();
                i.sort_unstable();
                (colors[v], o, i)
            })
            .collect();
        let next = rank(&keys);
        if cell_count(&next) == cell_count(&colors) {
            return next;
        }
        colors = next;
    }
}

fn search(g: &LabeledDigraph, adj: &Adj, colors: Vec<usize>, best: &mut Option<(Code, Vec<usize>)>) {
    let n = colors.len();
    let cells = cell_count(&colors);
    if cells == n {
        let mut order = vec![0; n];
        for (v, &c) in colors.iter().enumerate() {
            order[c] = v;
        }
        let code = g.code_for(&order);
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            *best = Some((code, order));
        }
        return;
    }
    // first cell with more than one vertex
    let mut sizes = vec![0; cells];
    for &c in &colors {
        sizes[c] += 1;
    }
    let target = (0..cells).find(|&c| sizes[c] > 1).expect("non-discrete colouring");
    for v in (0..n).filter(|&v| colors[v] == target) {
        let keys: Vec<(usize, bool)> = (0..n).map(|u| (colors[u], u != v)).collect();
        let split = refine(adj, rank(&keys));
        search(g, adj, split, best);
    }
}

pub fn canonical_labeling(g: &LabeledDigraph) -> Canonical {
    if g.is_empty() {
        return Canonical { order: Vec::new(), code: Code { labels: Vec::new(), edges: Vec::new() } };
    }
    let adj = g.adjacency();
    let start = refine(&adj, rank(&g.labels));
    let mut best = None;
    search(g, &adj, start, &mut best);
    let (code, order) = best.expect("at least one leaf");
    Canonical { order, code }
}

/// A label-preserving isomorphism `g1 → g2`, if one exists.
pub fn isomorphism(g1: &LabeledDigraph, g2: &LabeledDigraph) -> Option<Vec<usize>> {
    if g1.len() != g2.len() || g1.edges.len() != g2.edges.len() {
        return None;
    }
    let c1 = canonical_labeling(g1);
    let c2 = canonical_labeling(g2);
    if c1.code != c2.code {
        return None;
    }
    let mut map = vec![0; g1.len()];
    for (i, &v) in c1.order.iter().enumerate() {
        map[v] = c2.order[i];
    }
    Some(map)
}

/// Plain backtracking search for a label-preserving isomorphism. Slower
/// than [`isomorphism`] but shares no logic with it; used as a cross-check.
pub fn isomorphism_backtrack(g1: &LabeledDigraph, g2: &LabeledDigraph) -> Option<Vec<usize>> {
    let n = g1.len();
    if n != g2.len() || g1.edges.len() != g2.edges.len() {
        return None;
    }
    let (a1, a2) = (g1.adjacency(), g2.adjacency());
    let deg = |a: &Adj, v: usize| (a.out[v].len(), a.inn[v].len());
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        v: usize,
        g1: &LabeledDigraph,
        g2: &LabeledDigraph,
        ok: &dyn Fn(usize, usize) -> bool,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if v == map.len() {
            return true;
        }
        for w in 0..map.len() {
            if used[w] || !ok(v, w) {
                continue;
            }
            // edges between v and already mapped vertices (and loops) must agree
            let consistent = (0..=v).all(|u| {
                let mu = if u == v { w } else { map[u] };
                g1.edges.contains(&(u, v)) == g2.edges.contains(&(mu, w))
                    && g1.edges.contains(&(v, u)) == g2.edges.contains(&(w, mu))
            });
            if !consistent {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if extend(v + 1, g1, g2, ok, map, used) {
                return true;
            }
            map[v] = usize::MAX;
            used[w] = false;
        }
        false
    }

    let ok = |v: usize, w: usize| g1.labels[v] == g2.labels[w] && deg(&a1, v) == deg(&a2, w);
    extend(0, g1, g2, &ok, &mut map, &mut used).then_some(map)
}
