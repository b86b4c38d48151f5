use std::collections::BTreeMap;

use rayon::prelude::*;

use super::syntax::ModalFormula;
use crate::error::{Error, Result};
use crate::nodeset::{NodeId, NodeSet, Relation};
use crate::structure::Structure;

/// Default cap on `|A| · (number of variables)` for exhaustive valuation enumeration.
pub const DEFAULT_MAX_VAL_BITS: usize = 24;

/// Assignment of node sets to modal variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    sets: BTreeMap<String, NodeSet>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, set: NodeSet) -> Self {
        self.set(var, set);
        self
    }

    pub fn set(&mut self, var: impl Into<String>, set: NodeSet) {
        self.sets.insert(var.into(), set);
    }

    pub fn get(&self, var: &str) -> Option<&NodeSet> {
        self.sets.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &NodeSet)> {
        self.sets.iter()
    }

    pub fn merge(&mut self, other: &Valuation) {
        for (k, v) in &other.sets {
            self.sets.insert(k.clone(), v.clone());
        }
    }

    /// `p={a,b} q={}` with node names from `s`.
    pub fn render(&self, s: &Structure) -> String {
        self.sets
            .iter()
            .map(|(k, v)| format!("{k}={{{}}}", v.iter().map(|i| s.name(i)).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The set of nodes where `f` holds.
pub fn truth_set(s: &Structure, v: &Valuation, f: &ModalFormula) -> Result<NodeSet> {
    let n = s.len();
    let r = s.relation();
    use ModalFormula as M;
    Ok(match f {
        M::True => NodeSet::full(n),
        M::False => NodeSet::empty(n),
        M::Var(p) => {
            let set = v.get(p).ok_or_else(|| Error::Input(format!("variable `{p}` has no valuation")))?;
            set.check_universe(n)?;
            set.clone()
        }
        M::Not(a) => truth_set(s, v, a)?.complement(),
        M::And(a, b) => truth_set(s, v, a)?.intersection(&truth_set(s, v, b)?),
        M::Or(a, b) => truth_set(s, v, a)?.union(&truth_set(s, v, b)?),
        M::Implies(a, b) => truth_set(s, v, a)?.complement().union(&truth_set(s, v, b)?),
        M::Diamond(a) => r.preimage(&truth_set(s, v, a)?)?,
        M::Box(a) => r.preimage(&truth_set(s, v, a)?.complement())?.complement(),
    })
}

/// Truth of `f` at `w`: `<>a` holds iff some successor satisfies `a`.
pub fn check(s: &Structure, v: &Valuation, w: NodeId, f: &ModalFormula) -> Result<bool> {
    if w >= s.len() {
        return Err(Error::UnknownNode(format!("#{w}")));
    }
    Ok(truth_set(s, v, f)?.contains(w))
}

#[derive(Clone, Copy, Debug)]
pub struct ValidityLimits {
    pub max_val_bits: usize,
}

impl Default for ValidityLimits {
    fn default() -> Self {
        ValidityLimits { max_val_bits: DEFAULT_MAX_VAL_BITS }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameVerdict {
    Valid,
    Counterexample { valuation: Valuation, node: NodeId },
    Overflow { needed: usize, cap: usize },
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Top,
    Bot,
    Var(usize),
    Not,
    And,
    Or,
    Implies,
    Dia,
    Box,
}

/// A formula compiled to postfix over bitmask truth sets, for frames of at
/// most 64 nodes.
pub(crate) struct MaskProgram {
    ops: Vec<Op>,
    pub(crate) vars: Vec<String>,
}

impl MaskProgram {
    pub(crate) fn compile(f: &ModalFormula) -> Self {
        let vars: Vec<String> = f.vars().into_iter().collect();
        let mut ops = Vec::new();
        fn go(f: &ModalFormula, vars: &[String], ops: &mut Vec<Op>) {
            use ModalFormula as M;
            match f {
                M::True => ops.push(Op::Top),
                M::False => ops.push(Op::Bot),
                M::Var(p) => ops.push(Op::Var(vars.binary_search(p).expect("collected"))),
                M::Not(a) => {
                    go(a, vars, ops);
                    ops.push(Op::Not);
                }
                M::Diamond(a) => {
                    go(a, vars, ops);
                    ops.push(Op::Dia);
                }
                M::Box(a) => {
                    go(a, vars, ops);
                    ops.push(Op::Box);
                }
                M::And(a, b) | M::Or(a, b) | M::Implies(a, b) => {
                    go(a, vars, ops);
                    go(b, vars, ops);
                    ops.push(match f {
                        M::And(..) => Op::And,
                        M::Or(..) => Op::Or,
                        _ => Op::Implies,
                    });
                }
            }
        }
        go(f, &vars, &mut ops);
        MaskProgram { ops, vars }
    }

    pub(crate) fn eval(&self, frame: &MaskFrame, vals: &[u64], stack: &mut Vec<u64>) -> u64 {
        stack.clear();
        let full = frame.full;
        for op in &self.ops {
            let v = match *op {
                Op::Top => full,
                Op::Bot => 0,
                Op::Var(i) => vals[i],
                Op::Not => !stack.pop().unwrap() & full,
                Op::Dia => frame.dia(stack.pop().unwrap()),
                Op::Box => frame.boxm(stack.pop().unwrap()),
                Op::And | Op::Or | Op::Implies => {
                    let b = stack.pop().unwrap();
                    let a = stack.pop().unwrap();
                    match op {
                        Op::And => a & b,
                        Op::Or => a | b,
                        _ => (!a & full) | b,
                    }
                }
            };
            stack.push(v);
        }
        stack.pop().unwrap()
    }
}

/// Successor masks of a frame with at most 64 nodes.
pub(crate) struct MaskFrame {
    n: usize,
    full: u64,
    succ: Vec<u64>,
}

impl MaskFrame {
    pub(crate) fn from_relation(r: &Relation) -> Self {
        let n = r.universe();
        assert!(n <= 64);
        let succ = (0..n).map(|w| r.successors(w).to_mask().expect("n <= 64")).collect();
        MaskFrame { n, full: if n == 64 { u64::MAX } else { (1u64 << n) - 1 }, succ }
    }

    /// Edge `(i, j)` is bit `i * n + j` of `bits`.
    pub(crate) fn from_bits(n: usize, bits: u64) -> Self {
        let row = (1u64 << n) - 1;
        let succ = (0..n).map(|i| (bits >> (i * n)) & row).collect();
        MaskFrame { n, full: row, succ }
    }

    fn dia(&self, m: u64) -> u64 {
        let mut out = 0;
        for (w, &s) in self.succ.iter().enumerate() {
            if s & m != 0 {
                out |= 1 << w;
            }
        }
        out
    }

    fn boxm(&self, m: u64) -> u64 {
        let mut out = 0;
        let miss = !m & self.full;
        for (w, &s) in self.succ.iter().enumerate() {
            if s & miss == 0 {
                out |= 1 << w;
            }
        }
        out
    }

    /// Variable masks for valuation number `idx`: variable `i` owns bits
    /// `i*n .. (i+1)*n` of `idx`.
    pub(crate) fn unpack(&self, idx: u64, vars: usize, out: &mut Vec<u64>) {
        out.clear();
        for i in 0..vars {
            out.push((idx >> (i * self.n)) & self.full);
        }
    }

    /// Nodes where the program holds under every valuation.
    pub(crate) fn local_validity(&self, prog: &MaskProgram) -> u64 {
        let bits = self.n * prog.vars.len();
        let mut vals = Vec::new();
        let mut stack = Vec::new();
        let mut acc = self.full;
        for idx in 0..(1u64 << bits) {
            self.unpack(idx, prog.vars.len(), &mut vals);
            acc &= prog.eval(self, &vals, &mut stack);
            if acc == 0 {
                break;
            }
        }
        acc
    }
}

fn bits_needed(s: &Structure, f: &ModalFormula) -> usize {
    s.len() * f.vars().len()
}

fn valuation_from_index(s: &Structure, vars: &[String], idx: u64) -> Valuation {
    let n = s.len();
    let mut v = Valuation::new();
    for (i, name) in vars.iter().enumerate() {
        let mask = (idx >> (i * n)) as u128 & ((1u128 << n) - 1);
        v.set(name.clone(), NodeSet::from_mask(n, mask));
    }
    v
}

const CHUNK: u64 = 1 << 12;

/// Least `(valuation index, node)` at which `f` fails, restricted to nodes in `focus`.
fn first_failure(s: &Structure, f: &ModalFormula, focus: u64) -> Option<(u64, NodeId)> {
    let prog = MaskProgram::compile(f);
    let frame = MaskFrame::from_relation(s.relation());
    let total: u64 = 1 << (s.len() * prog.vars.len());
    let chunks = total.div_ceil(CHUNK);
    (0..chunks).into_par_iter().find_map_first(|c| {
        let mut vals = Vec::new();
        let mut stack = Vec::new();
        for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
            frame.unpack(idx, prog.vars.len(), &mut vals);
            let bad = !prog.eval(&frame, &vals, &mut stack) & focus;
            if bad != 0 {
                return Some((idx, bad.trailing_zeros() as usize));
            }
        }
        None
    })
}

fn within_cap(s: &Structure, f: &ModalFormula, limits: ValidityLimits) -> std::result::Result<(), (usize, usize)> {
    let needed = bits_needed(s, f);
    let cap = limits.max_val_bits.min(62);
    if needed > cap || s.len() > 64 {
        Err((needed, limits.max_val_bits))
    } else {
        Ok(())
    }
}

/// Validity by exhaustive enumeration of valuations of the variables in `f`.
///
/// The reported counterexample is the least one in (valuation index, node)
/// order, where valuation index bits are variable-major (variables sorted)
/// and node-minor.
pub fn frame_valid(s: &Structure, f: &ModalFormula, limits: ValidityLimits) -> FrameVerdict {
    if let Err((needed, cap)) = within_cap(s, f, limits) {
        return FrameVerdict::Overflow { needed, cap };
    }
    if s.is_empty() {
        return FrameVerdict::Valid;
    }
    let full = if s.len() == 64 { u64::MAX } else { (1u64 << s.len()) - 1 };
    match first_failure(s, f, full) {
        None => FrameVerdict::Valid,
        Some((idx, node)) => {
            let vars: Vec<String> = f.vars().into_iter().collect();
            FrameVerdict::Counterexample { valuation: valuation_from_index(s, &vars, idx), node }
        }
    }
}

/// The least valuation falsifying `f` at `w`, if any.
pub fn local_counterexample(s: &Structure, f: &ModalFormula, w: NodeId, limits: ValidityLimits) -> Result<Option<Valuation>> {
    if w >= s.len() {
        return Err(Error::UnknownNode(format!("#{w}")));
    }
    if let Err((needed, cap)) = within_cap(s, f, limits) {
        return Err(Error::Limit { what: "valuation bits |A|*vars", needed: needed as u128, cap: cap as u128 });
    }
    let vars: Vec<String> = f.vars().into_iter().collect();
    Ok(first_failure(s, f, 1 << w).map(|(idx, _)| valuation_from_index(s, &vars, idx)))
}

/// Nodes at which `f` holds under every valuation.
pub fn locally_valid_nodes(s: &Structure, f: &ModalFormula, limits: ValidityLimits) -> Result<NodeSet> {
    if let Err((needed, cap)) = within_cap(s, f, limits) {
        return Err(Error::Limit { what: "valuation bits |A|*vars", needed: needed as u128, cap: cap as u128 });
    }
    let prog = MaskProgram::compile(f);
    let frame = MaskFrame::from_relation(s.relation());
    Ok(NodeSet::from_mask(s.len(), frame.local_validity(&prog) as u128))
}
