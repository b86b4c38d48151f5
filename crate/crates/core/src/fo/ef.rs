use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::nodeset::NodeId;
use crate::structure::Structure;

/// Default cap on the number of rounds.
pub const DEFAULT_MAX_ROUNDS: usize = 4;

/// Whether Duplicator wins the `q`-round Ehrenfeucht–Fraïssé game on
/// `(a, b)` over the signature `{R, =}` plus hub constants. Since `S` and
/// `P` are definable from `R` and the constants, this also decides
/// agreement on `{S, P}`-sentences of rank ≤ q.
pub fn ef_equivalent(a: &Structure, b: &Structure, q: usize) -> Result<bool> {
    ef_equivalent_capped(a, b, q, DEFAULT_MAX_ROUNDS)
}

pub fn ef_equivalent_capped(a: &Structure, b: &Structure, q: usize, max_rounds: usize) -> Result<bool> {
    if q > max_rounds {
        return Err(Error::Limit { what: "EF rounds", needed: q as u128, cap: max_rounds as u128 });
    }
    let ka: Vec<&String> = a.constants().keys().collect();
    let kb: Vec<&String> = b.constants().keys().collect();
    if ka != kb {
        return Err(Error::Input(format!("constant signatures differ: {ka:?} vs {kb:?}")));
    }
    let start: Vec<(NodeId, NodeId)> =
        a.constants().iter().map(|(name, &x)| (x, b.constants()[name])).collect();
    let mut game = Game { a, b, memo: HashMap::new() };
    let mut pairs = start;
    pairs.sort_unstable();
    pairs.dedup();
    Ok(game.wins(pairs, q))
}

struct Game<'s> {
    a: &'s Structure,
    b: &'s Structure,
    memo: HashMap<(Vec<(NodeId, NodeId)>, usize), bool>,
}

impl Game<'_> {
    fn partial_iso(&self, pairs: &[(NodeId, NodeId)]) -> bool {
        pairs.iter().all(|&(x, y)| {
            pairs.iter().all(|&(u, v)| (x == u) == (y == v) && self.a.edge(x, u) == self.b.edge(y, v))
        })
    }

    fn with(pairs: &[(NodeId, NodeId)], p: (NodeId, NodeId)) -> Vec<(NodeId, NodeId)> {
        let mut v = pairs.to_vec();
        if let Err(i) = v.binary_search(&p) {
            v.insert(i, p);
        }
        v
    }

    /// `pairs` is sorted, deduplicated and already a partial isomorphism.
    fn wins(&mut self, pairs: Vec<(NodeId, NodeId)>, rounds: usize) -> bool {
        if !self.partial_iso(&pairs) {
            return false;
        }
        if rounds == 0 {
            return true;
        }
        let key = (pairs, rounds);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let pairs = &key.0;
        // Spoiler picks in A; picking an already matched element is answered by its partner.
        let forth = (0..self.a.len()).all(|x| {
            pairs.iter().any(|&(u, _)| u == x)
                || (0..self.b.len()).any(|y| self.wins(Self::with(pairs, (x, y)), rounds - 1))
        });
        let result = forth
            && (0..self.b.len()).all(|y| {
                pairs.iter().any(|&(_, v)| v == y)
                    || (0..self.a.len()).any(|x| self.wins(Self::with(pairs, (x, y)), rounds - 1))
            });
        self.memo.insert(key, result);
        result
    }
}
