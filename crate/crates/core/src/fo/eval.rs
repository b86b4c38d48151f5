use std::collections::BTreeMap;

use super::syntax::{FoFormula, Pred, Term};
use crate::error::{Error, Result};
use crate::nodeset::{NodeId, NodeSet, Relation};
use crate::structure::Structure;

/// Evaluation cost cap: `|A|^(quantifier rank)` must not exceed this.
pub const DEFAULT_MAX_COST: u128 = 10_000_000;

/// Variable assignment by name.
pub type Assignment = BTreeMap<String, NodeId>;

/// Interpretations of unary predicates (the standard translation's modal variables).
pub type UnaryInterp = BTreeMap<String, NodeSet>;

#[derive(Clone, Copy, Debug)]
pub struct EvalLimits {
    pub max_cost: u128,
}

impl Default for EvalLimits {
    fn default() -> Self {
        EvalLimits { max_cost: DEFAULT_MAX_COST }
    }
}

enum Slot {
    Var(usize),
    Node(NodeId),
}

enum Code {
    True,
    False,
    Rel(usize, Slot, Slot),
    Eq(Slot, Slot),
    Unary(usize, Slot),
    Not(Box<Code>),
    And(Box<Code>, Box<Code>),
    Or(Box<Code>, Box<Code>),
    Implies(Box<Code>, Box<Code>),
    Exists(usize, Box<Code>),
    Forall(usize, Box<Code>),
}

struct Compiler<'a> {
    structure: &'a Structure,
    scope: Vec<(String, usize)>,
    slots: usize,
    unary_names: Vec<String>,
}

impl Compiler<'_> {
    fn slot(&self, t: &Term) -> Result<Slot> {
        match t {
            Term::Var(v) => self
                .scope
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|&(_, s)| Slot::Var(s))
                .ok_or_else(|| Error::Input(format!("unassigned variable `{v}`"))),
            Term::Const(h) => Ok(Slot::Node(self.structure.constant(&format!("d_{h}"))?)),
        }
    }

    fn bind(&mut self, v: &str) -> usize {
        let s = self.slots;
        self.slots += 1;
        self.scope.push((v.to_string(), s));
        s
    }

    fn compile(&mut self, f: &FoFormula) -> Result<Code> {
        use FoFormula as F;
        Ok(match f {
            F::True => Code::True,
            F::False => Code::False,
            F::Rel(p, a, b) => {
                let idx = match p {
                    Pred::R => 0,
                    Pred::S => 1,
                    Pred::P => 2,
                };
                Code::Rel(idx, self.slot(a)?, self.slot(b)?)
            }
            F::Eq(a, b) => Code::Eq(self.slot(a)?, self.slot(b)?),
            F::Unary(name, t) => {
                let idx = match self.unary_names.iter().position(|n| n == name) {
                    Some(i) => i,
                    None => return Err(Error::Input(format!("no interpretation for unary predicate `{name}`"))),
                };
                Code::Unary(idx, self.slot(t)?)
            }
            F::Not(a) => Code::Not(Box::new(self.compile(a)?)),
            F::And(a, b) => Code::And(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            F::Or(a, b) => Code::Or(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            F::Implies(a, b) => Code::Implies(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            F::Exists(v, a) | F::Forall(v, a) => {
                let s = self.bind(v);
                let body = Box::new(self.compile(a)?);
                self.scope.pop();
                if matches!(f, F::Exists(..)) {
                    Code::Exists(s, body)
                } else {
                    Code::Forall(s, body)
                }
            }
        })
    }
}

struct Machine<'a> {
    n: usize,
    rels: [&'a Relation; 3],
    unary: Vec<&'a NodeSet>,
    env: Vec<NodeId>,
}

impl Machine<'_> {
    fn get(&self, s: &Slot) -> NodeId {
        match *s {
            Slot::Var(i) => self.env[i],
            Slot::Node(n) => n,
        }
    }

    fn run(&mut self, c: &Code) -> bool {
        match c {
            Code::True => true,
            Code::False => false,
            Code::Rel(i, a, b) => self.rels[*i].contains(self.get(a), self.get(b)),
            Code::Eq(a, b) => self.get(a) == self.get(b),
            Code::Unary(i, t) => self.unary[*i].contains(self.get(t)),
            Code::Not(a) => !self.run(a),
            Code::And(a, b) => self.run(a) && self.run(b),
            Code::Or(a, b) => self.run(a) || self.run(b),
            Code::Implies(a, b) => !self.run(a) || self.run(b),
            Code::Exists(s, a) => (0..self.n).any(|w| {
                self.env[*s] = w;
                self.run(a)
            }),
            Code::Forall(s, a) => (0..self.n).all(|w| {
                self.env[*s] = w;
                self.run(a)
            }),
        }
    }
}

/// Truth of `f` in `structure` under `assignment` and unary interpretations.
///
/// `R` is the structure's relation; `S` and `P` come from its hub decomposition.
pub fn eval_with(
    structure: &Structure,
    f: &FoFormula,
    assignment: &Assignment,
    unary: &UnaryInterp,
    limits: EvalLimits,
) -> Result<bool> {
    let rank = f.quantifier_rank() as u32;
    let cost = (structure.len() as u128).checked_pow(rank).unwrap_or(u128::MAX);
    if cost > limits.max_cost {
        return Err(Error::Limit { what: "quantifier expansion |A|^rank", needed: cost, cap: limits.max_cost });
    }
    let unary_names: Vec<String> = unary.keys().cloned().collect();
    let mut comp = Compiler { structure, scope: Vec::new(), slots: 0, unary_names };
    let mut env = Vec::new();
    for (v, &node) in assignment {
        if node >= structure.len() {
            return Err(Error::UnknownNode(format!("#{node}")));
        }
        comp.bind(v);
        env.push(node);
    }
    let code = comp.compile(f)?;
    env.resize(comp.slots, 0);
    for set in unary.values() {
        set.check_universe(structure.len())?;
    }
    let (s, p) = structure.decompose();
    let mut m = Machine {
        n: structure.len(),
        rels: [structure.relation(), &s, &p],
        unary: unary.values().collect(),
        env,
    };
    Ok(m.run(&code))
}

/// Truth of a sentence, or of a formula under an assignment.
pub fn eval(structure: &Structure, f: &FoFormula, assignment: &Assignment) -> Result<bool> {
    eval_with(structure, f, assignment, &UnaryInterp::new(), EvalLimits::default())
}

/// Truth of a formula whose only free variable `var` is bound to `node`.
pub fn eval_at(structure: &Structure, f: &FoFormula, var: &str, node: NodeId) -> Result<bool> {
    eval(structure, f, &Assignment::from([(var.to_string(), node)]))
}

#[cfg(test)]
mod tests {
    use super::super::syntax::parse_fo;
    use super::*;

    #[test]
    fn basics() {
        let s = Structure::anonymous(2, [(0, 1)]);
        assert!(eval(&s, &parse_fo("exists x. x = x").unwrap(), &Assignment::new()).unwrap());
        assert!(!eval(&s, &parse_fo("exists x. R(x,x)").unwrap(), &Assignment::new()).unwrap());
        assert!(eval_at(&s, &parse_fo("exists y. R(x,y)").unwrap(), "x", 0).unwrap());
        assert!(eval(&s, &parse_fo("R(x,y)").unwrap(), &Assignment::new()).is_err());
        let empty = Structure::anonymous(0, []);
        assert!(!eval(&empty, &parse_fo("exists x. x = x").unwrap(), &Assignment::new()).unwrap());
    }

    #[test]
    fn constants_and_decomposition() {
        let s = Structure::new(vec!["h".into(), "a".into(), "b".into()], [(0, 1), (1, 2)], [0]).unwrap();
        let f = parse_fo("P(d_h, x) & ~S(d_h, x)").unwrap();
        assert!(eval_at(&s, &f, "x", 1).unwrap());
        assert!(eval(&s, &parse_fo("exists x. exists y. S(x,y)").unwrap(), &Assignment::new()).unwrap());
        assert!(eval(&s, &parse_fo("R(d_g, d_g)").unwrap(), &Assignment::new()).is_err());
    }

    #[test]
    fn cost_cap() {
        let s = Structure::anonymous(10, []);
        let f = parse_fo("exists a. exists b. exists c. a = b").unwrap();
        let lim = EvalLimits { max_cost: 999 };
        assert!(matches!(eval_with(&s, &f, &Assignment::new(), &UnaryInterp::new(), lim), Err(Error::Limit { .. })));
    }
}
