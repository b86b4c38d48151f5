#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use uext_core::presentation::parse_presentation;
use uext_core::structure::parse_frame;
use uext_core::{NodeId, Presentation, Structure};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn read_corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn abp(name: &str) -> Presentation {
    parse_presentation(&read_corpus(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn frame(name: &str) -> Structure {
    parse_frame(&read_corpus(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Every `.abp` file in the corpus, by file name.
pub fn presentations() -> Vec<(String, Presentation)> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".abp"))
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), abp(&n))).collect()
}

/// The structure on `n` anonymous nodes whose edge `(i, j)` is bit `i*n + j`.
pub fn from_bits(n: usize, bits: u64) -> Structure {
    Structure::anonymous(n, (0..n * n).filter(|b| bits >> b & 1 == 1).map(|b| (b / n, b % n)))
}

/// All structures on exactly `n` nodes.
pub fn all_frames(n: usize) -> impl Iterator<Item = Structure> {
    (0..1u64 << (n * n)).map(move |bits| from_bits(n, bits))
}

pub fn random_frame(rng: &mut impl Rng, n: usize, density: f64) -> Structure {
    let edges: Vec<(NodeId, NodeId)> =
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|_| rng.gen_bool(density)).collect();
    Structure::anonymous(n, edges)
}

/// Subsets of `0..n` as boolean vectors.
pub fn subsets(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u32 << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}

/// `R^ue(π_a, π_b)` from the diamond side, written over plain vectors:
/// every `X` containing `b` has `a` in its preimage.
pub fn oracle_ue(s: &Structure, a: NodeId, b: NodeId) -> bool {
    let n = s.len();
    subsets(n).filter(|x| x[b]).all(|x| (0..n).any(|y| x[y] && s.edge(a, y)))
}

/// Is there a walk of exactly `len` steps along `S ∪ S⁻¹` from `a` to `b`
/// visiting pairwise distinct nodes?
pub fn oracle_distinct_road(adjacent: &dyn Fn(NodeId, NodeId) -> bool, n: usize, a: NodeId, b: NodeId, len: usize) -> bool {
    fn go(adj: &dyn Fn(NodeId, NodeId) -> bool, n: usize, path: &mut Vec<NodeId>, b: NodeId, left: usize) -> bool {
        let cur = *path.last().unwrap();
        if left == 0 {
            return cur == b;
        }
        for next in 0..n {
            if !path.contains(&next) && (adj(cur, next) || adj(next, cur)) {
                path.push(next);
                if go(adj, n, path, b, left - 1) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    go(adjacent, n, &mut vec![a], b, len)
}

/// A random modal formula of depth at most `depth` over `p0..p{vars-1}`.
pub fn random_modal(rng: &mut impl Rng, depth: usize, vars: usize) -> uext_core::modal::ModalFormula {
    use uext_core::modal::ModalFormula as M;
    let leaf = |rng: &mut dyn rand::RngCore| match rng.gen_range(0..8) {
        0 => M::True,
        1 => M::False,
        _ => M::var(format!("p{}", rng.gen_range(0..vars))),
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    match rng.gen_range(0..6) {
        0 => M::not(random_modal(rng, depth, vars)),
        1 => M::and(random_modal(rng, depth, vars), random_modal(rng, depth, vars)),
        2 => M::or(random_modal(rng, depth, vars), random_modal(rng, depth, vars)),
        3 => M::implies(random_modal(rng, depth, vars), random_modal(rng, depth, vars)),
        4 => M::dia(random_modal(rng, depth - 1, vars)),
        _ => M::boxed(random_modal(rng, depth - 1, vars)),
    }
}

/// A random `{R, =}` formula of quantifier rank at most `rank` whose free
/// variables are among `scope`, with constants for `hubs`.
pub fn random_fo(rng: &mut impl Rng, rank: usize, scope: &mut Vec<String>, hubs: &[String]) -> uext_core::fo::FoFormula {
    use uext_core::fo::{FoFormula as F, Pred, Term};
    let term = |rng: &mut dyn rand::RngCore, scope: &[String]| {
        let n = scope.len() + hubs.len();
        let i = rng.gen_range(0..n);
        if i < scope.len() {
            Term::var(scope[i].clone())
        } else {
            Term::hub(hubs[i - scope.len()].clone())
        }
    };
    let atoms_possible = !scope.is_empty() || !hubs.is_empty();
    if (rank == 0 || rng.gen_bool(0.3)) && atoms_possible {
        let (a, b) = (term(rng, scope), term(rng, scope));
        return if rng.gen_bool(0.75) { F::rel(Pred::R, a, b) } else { F::eq(a, b) };
    }
    if rank == 0 {
        return if rng.gen_bool(0.5) { F::True } else { F::False };
    }
    match rng.gen_range(0..6) {
        0 if atoms_possible => F::not(random_fo(rng, rank, scope, hubs)),
        1 if atoms_possible => F::and(random_fo(rng, rank, scope, hubs), random_fo(rng, rank, scope, hubs)),
        2 if atoms_possible => F::or(random_fo(rng, rank, scope, hubs), random_fo(rng, rank, scope, hubs)),
        3 if atoms_possible => F::implies(random_fo(rng, rank, scope, hubs), random_fo(rng, rank, scope, hubs)),
        k => {
            let v = format!("v{}", scope.len());
            scope.push(v.clone());
            let body = random_fo(rng, rank - 1, scope, hubs);
            scope.pop();
            if k % 2 == 0 {
                F::exists(v, body)
            } else {
                F::forall(v, body)
            }
        }
    }
}

/// A random presentation that passes validation: up to two hubs, one to
/// three blocks, each hub fed by a uniform flag from an omega block.
pub fn random_presentation(rng: &mut impl Rng) -> Presentation {
    use std::fmt::Write as _;
    loop {
        let hubs: Vec<&str> = ["g", "h"].into_iter().filter(|_| rng.gen_bool(0.5)).collect();
        let mut text = String::new();
        for h in &hubs {
            let _ = writeln!(text, "hub {h}");
        }
        for a in &hubs {
            for b in &hubs {
                if rng.gen_bool(0.3) {
                    let _ = writeln!(text, "hubedge {a} {b}");
                }
            }
        }
        let blocks = rng.gen_range(1..=3);
        let mut exception_sites = Vec::new();
        for i in 0..blocks {
            let omega = i == 0 && !hubs.is_empty() || rng.gen_bool(0.4);
            let mult = if omega { "omega".to_string() } else { rng.gen_range(1..=3).to_string() };
            let _ = writeln!(text, "block b{i} mult {mult}");
            let positions: Vec<String> = (0..rng.gen_range(1..=3)).map(|j| format!("q{j}")).collect();
            for q in &positions {
                let _ = writeln!(text, "  pnode {q}");
            }
            for x in &positions {
                for y in &positions {
                    if rng.gen_bool(0.3) {
                        let _ = writeln!(text, "  pedge {x} {y}");
                    }
                }
            }
            for h in &hubs {
                for q in &positions {
                    let forced = omega && i == 0 && q == "q0";
                    if forced || rng.gen_bool(0.25) {
                        let _ = writeln!(text, "  pflag out {h} {q}");
                    }
                    if rng.gen_bool(0.25) {
                        let _ = writeln!(text, "  pflag in {q} {h}");
                    }
                }
            }
            if let Some(h) = hubs.first() {
                exception_sites.push((format!("b{i}"), if omega { 3 } else { 1 }, h.to_string(), positions[0].clone()));
            }
        }
        if rng.gen_bool(0.3) {
            if let Some((b, bound, h, q)) = exception_sites.first() {
                let op = if rng.gen_bool(0.5) { "add" } else { "drop" };
                let _ = writeln!(text, "exception {b} {} {op} in {q} {h}", rng.gen_range(0..*bound));
            }
        }
        let p = uext_core::presentation::parse_presentation(&text).expect("generated text parses");
        if p.validate().passed() {
            return p;
        }
    }
}
