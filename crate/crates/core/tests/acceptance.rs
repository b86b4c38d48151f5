//! Acceptance gate: one line per criterion, then a nonzero exit if any failed.
//!
//! Every comparison is exact (zero mismatches allowed); sample sizes and
//! time budgets are pinned below.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use uext_core::fo::{self, eval, eval_at, phi_star, sharp_translate, Assignment};
use uext_core::modal::{
    self, check, counterexample_frame, criterion_validity, family_k_check, largest_bisimulation,
    correspondence_test, phi_formula, star_star_condition, CorrespondenceConfig, CriterionVerdict, Model, PointRef,
    Valuation, ValidityLimits,
};
use uext_core::neighborhood::{self, canonical_form, emit_chi, emit_psi, extract, extract_component, DEFAULT_CHI_MAX_NODES};
use uext_core::presentation::Origin;
use uext_core::symbolic::{symbolic_ue_related, Element, SymbolicUltrafilter};
use uext_core::ultrafilter::{
    distinguishing_sets, ue_extension_finite, ue_related, MAX_UNIVERSE, ultrafilter_road_delta, Ultrafilter, UltrafilterRoad,
};
use uext_core::{Card, NodeId, NodeSet, Presentation, Structure};

/// Allowed mismatches for every exact criterion.
const MAX_MISMATCHES: usize = 0;
const SEED: u64 = 0x0ac0_5eed;

const C1_MIN_SAMPLED_4: usize = 10_000;
const C1_BUDGET: Duration = Duration::from_secs(120);
const C2_EXHAUSTIVE_MAX: usize = 4;
const C2_SAMPLED_5: usize = 3_000;
const C3_MIN_INSTANCES: usize = 1_000;
const C3_MAX_NODES: usize = 6;
const C3_MAX_ROAD: usize = 4;
const C4_EXHAUSTIVE_MAX: usize = 5;
const C4_MAX_K: u64 = 4;
const C5_BUDGET: Duration = Duration::from_secs(30 * 60);
const C7_MAX_K: u64 = 3;
const C8_EXHAUSTIVE_MAX: usize = 4;
const C8_ORIENTATIONS_5: usize = 3;
const C8_MAX_N: usize = 3;
const C9_MIN_SENTENCES: usize = 1_000;
const C9_MAX_RANK: usize = 3;
const C10_K: u64 = 3;
const C10_MAX_N: usize = 2;
const C12_MIN_PAIRS: usize = 1_000;
const C12_DEPTH: usize = 3;
const C12_VARS: usize = 3;
const C13_MAX_Q: usize = 3;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

#[allow(clippy::absurd_extreme_comparisons)]
fn outcome(mismatches: usize, detail: impl Into<String>) -> Outcome {
    Outcome { pass: mismatches <= MAX_MISMATCHES, detail: detail.into() }
}

fn pi(s: &Structure, w: NodeId) -> Ultrafilter {
    Ultrafilter::principal(s.len(), w).unwrap()
}

fn c1_dual_characterization() -> Outcome {
    let start = Instant::now();
    let mut bad = 0;
    let mut pairs = 0usize;
    let mut run = |s: &Structure| {
        for a in 0..s.len() {
            for b in 0..s.len() {
                pairs += 1;
                match ue_related(s, &pi(s, a), &pi(s, b)) {
                    Ok(r) if r == oracle_ue(s, a, b) && r == s.edge(a, b) => {}
                    _ => bad += 1,
                }
            }
        }
    };
    for n in 1..=3 {
        all_frames(n).for_each(|s| run(&s));
    }
    // all 2^16 relations on 4 nodes, which covers the required sample
    let four = 1usize << 16;
    all_frames(4).for_each(|s| run(&s));
    let took = start.elapsed();
    let pass_time = took <= C1_BUDGET && four >= C1_MIN_SAMPLED_4;
    let mut o = outcome(bad, format!("{pairs} ordered pairs, {bad} disagreements, {:.1}s", took.as_secs_f64()));
    o.pass &= pass_time;
    o
}

fn is_iso_by_witness(a: &Structure, b: &Structure, w: &[NodeId]) -> bool {
    let bij: BTreeSet<NodeId> = w.iter().copied().collect();
    bij.len() == a.len()
        && b.len() == a.len()
        && (0..a.len()).all(|x| (0..a.len()).all(|y| a.edge(x, y) == b.edge(w[x], w[y])))
}

fn c2_finite_fixpoint() -> Outcome {
    let mut bad = 0;
    let mut count = 0;
    let mut run = |s: &Structure| {
        count += 1;
        let e = ue_extension_finite(s).unwrap();
        if !is_iso_by_witness(s, &e.structure, &e.witness) {
            bad += 1;
        }
    };
    for n in 0..=C2_EXHAUSTIVE_MAX {
        all_frames(n).for_each(|s| run(&s));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..C2_SAMPLED_5 {
        let d = rng.gen_range(0.1..0.7);
        run(&random_frame(&mut rng, 5, d));
    }
    for name in ["tiny.frame", "phistar.frame", "fan.frame"] {
        run(&frame(name));
    }
    outcome(bad, format!("{count} structures (all on <= {C2_EXHAUSTIVE_MAX} nodes, {C2_SAMPLED_5} on 5), {bad} failures"))
}

/// A road of distinct nodes built by a random walk along `R ∪ R⁻¹`.
fn random_walk_road(rng: &mut ChaCha8Rng, s: &Structure, len: usize) -> uext_core::Road {
    let mut nodes = vec![rng.gen_range(0..s.len())];
    let mut forward = Vec::new();
    for _ in 0..len {
        let cur = *nodes.last().unwrap();
        let options: Vec<(NodeId, bool)> = (0..s.len())
            .filter(|x| !nodes.contains(x))
            .flat_map(|x| [(x, true), (x, false)])
            .filter(|&(x, f)| if f { s.edge(cur, x) } else { s.edge(x, cur) })
            .collect();
        if options.is_empty() {
            break;
        }
        let (x, f) = options[rng.gen_range(0..options.len())];
        nodes.push(x);
        forward.push(f);
    }
    uext_core::Road { nodes, forward }
}

fn c3_road_membership() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let (mut instances, mut bad, mut shaped) = (0, 0, 0);
    while instances < C3_MIN_INSTANCES {
        let n = rng.gen_range(1..=C3_MAX_NODES);
        let d = rng.gen_range(0.15..0.6);
        let s = random_frame(&mut rng, n, d);
        let road = if rng.gen_bool(0.5) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            match s.find_road(s.relation(), a, b, C3_MAX_ROAD).unwrap() {
                Some(r) => r,
                None => continue,
            }
        } else {
            let len = rng.gen_range(0..=C3_MAX_ROAD);
            random_walk_road(&mut rng, &s, len)
        };
        let ur = UltrafilterRoad::principal(&road, n).unwrap();
        let dsets = distinguishing_sets(&ur.stops).unwrap();
        let mut x = NodeSet::from_nodes(n, (0..n).filter(|_| rng.gen_bool(0.4)));
        x.insert(road.start());
        instances += 1;
        let delta = match ultrafilter_road_delta(s.relation(), &x, &ur, &dsets) {
            Ok(d) => d,
            Err(_) => {
                bad += 1;
                continue;
            }
        };
        if !ur.stops.last().unwrap().contains(&delta).unwrap() {
            bad += 1;
        }
        // the two-step shape w0 -> w1 <- w2, recomputed independently
        if road.forward == [true, false] {
            shaped += 1;
            let (d1, d2) = (&dsets[1], &dsets[2]);
            let image: Vec<NodeId> = (0..n).filter(|&y| x.iter().any(|a| s.edge(a, y))).collect();
            let mid: Vec<NodeId> = image.into_iter().filter(|&y| d1.contains(y)).collect();
            let expect = NodeSet::from_nodes(n, (0..n).filter(|&z| d2.contains(z) && mid.iter().any(|&y| s.edge(z, y))));
            if expect != delta {
                bad += 1;
            }
        }
    }
    outcome(bad, format!("{instances} roads ({shaped} of shape ->,<-), {bad} failures"))
}

fn reflexive_exact(s: &Structure, w: NodeId) -> bool {
    ue_related(s, &pi(s, w), &pi(s, w)).unwrap()
}

fn c4_reflexivity() -> Outcome {
    let mut bad = 0;
    let mut structures = 0;
    let mut run = |s: &Structure| {
        structures += 1;
        let refl = NodeSet::from_nodes(s.len(), (0..s.len()).filter(|&w| s.edge(w, w)));
        for w in 0..s.len() {
            if reflexive_exact(s, w) != pi(s, w).contains(&refl).unwrap() {
                bad += 1;
            }
        }
    };
    for n in 1..=C4_EXHAUSTIVE_MAX {
        all_frames(n).for_each(|s| run(&s));
    }
    let mut count_bad = 0;
    let mut checked = 0;
    let mut skipped = 0;
    for (name, p) in presentations() {
        let ext = p.extend().unwrap();
        let symbolic = ext.count_reflexive();
        for (origin, card) in &symbolic {
            let expect: Card = ext
                .blocks
                .values()
                .filter(|b| b.origin == *origin)
                .map(|b| b.multiplicity * Card::Fin(b.looped_positions() as u64))
                .sum::<Card>()
                + Card::Fin(if *origin == Origin::Principal {
                    ext.hub_edges.iter().filter(|(a, b)| a == b).count() as u64
                } else {
                    0
                });
            if expect != *card {
                count_bad += 1;
                eprintln!("c4: {name}: symbolic {origin:?} count {card} vs {expect}");
            }
        }
        for k in 1..=C4_MAX_K {
            let s = ext.expand(k).unwrap();
            if s.len() > MAX_UNIVERSE {
                skipped += 1;
                continue;
            }
            for origin in [Origin::Principal, Origin::NonPrincipal] {
                let exact = (0..s.len())
                    .filter(|&w| {
                        let nonprincipal = ext.locate(s.name(w)).is_some_and(|(b, _, _)| ext.blocks[b].origin == Origin::NonPrincipal);
                        nonprincipal == (origin == Origin::NonPrincipal) && reflexive_exact(&s, w)
                    })
                    .count() as u64;
                let truncated: u64 = ext
                    .blocks
                    .values()
                    .filter(|b| b.origin == origin)
                    .map(|b| b.looped_positions() as u64 * ext.materialized_copies(b, k).unwrap().len() as u64)
                    .sum::<u64>()
                    + if origin == Origin::Principal {
                        ext.hub_edges.iter().filter(|(a, b)| a == b).count() as u64
                    } else {
                        0
                    };
                let sym = symbolic.iter().find(|(o, _)| *o == origin).unwrap().1;
                checked += 1;
                let consistent = match sym {
                    Card::Fin(m) => truncated <= m && (k < 4 || exact == truncated),
                    _ => true,
                };
                if exact != truncated || !consistent {
                    count_bad += 1;
                    eprintln!("c4: {name} k={k} {origin:?}: exact {exact}, truncated symbolic {truncated}, symbolic {sym}");
                }
            }
        }
    }
    outcome(
        bad + count_bad,
        format!(
            "{structures} structures (all on <= {C4_EXHAUSTIVE_MAX} nodes), {bad} pointwise mismatches; {checked} expand(ext,k) counts, {count_bad} count mismatches, \
             {skipped} truncations above {MAX_UNIVERSE} nodes skipped"
        ),
    )
}

fn c5_phi_correspondence() -> Outcome {
    let start = Instant::now();
    let cfg = CorrespondenceConfig { exhaustive_max_nodes: 4, ..CorrespondenceConfig::default() };
    let report = correspondence_test(&cfg, &phi_formula(), star_star_condition).unwrap();
    let took = start.elapsed();
    let mut o = outcome(
        report.violations.len(),
        format!(
            "{} frames ({} exhaustive <= 4 nodes + {} sampled 5..7), {} points, {} violations, {:.1}s",
            report.frames_checked,
            (1..=4).map(|n| 1usize << (n * n)).sum::<usize>(),
            cfg.samples,
            report.points_checked,
            report.violations.len(),
            took.as_secs_f64()
        ),
    );
    o.pass &= took <= C5_BUDGET;
    o
}

fn c6_alt_or_phi_after_extension() -> Outcome {
    let base = abp("k.abp");
    let ext = base.extend().unwrap();
    let n = 1;
    let k = family_k_check(&base).unwrap();
    let vb = criterion_validity(&base, n).unwrap();
    let ve = criterion_validity(&ext, n).unwrap();
    let hub = k.designated.clone().unwrap_or_default();
    let invalid_at_hub = matches!(&ve, CriterionVerdict::Invalid { at: PointRef::Hub(h), .. } if *h == hub);
    let cm = counterexample_frame(&ext, &hub, n, 3, ValidityLimits::default());
    let cm_ok = cm.as_ref().is_ok_and(|c| !check(&c.frame, &c.valuation, c.node, &modal::alt_or_phi(n)).unwrap());
    let pass = k.passed() && vb == CriterionVerdict::Valid && invalid_at_hub && cm_ok;
    // supplementary: the countermodel machinery on a hub that genuinely fails (**)
    let fan = abp("fan.abp").extend().unwrap();
    let fan_cm = counterexample_frame(&fan, "h", n, 3, ValidityLimits::default())
        .map(|c| !check(&c.frame, &c.valuation, c.node, &modal::alt_or_phi(n)).unwrap());
    let detail = format!(
        "k.abp family K: {}, base: {}, extension: {}, countermodel: {}; fan.abp extension countermodel verified: {}; \
         a mutual fan stays valid after extension because every nonprincipal successor reaches the hub",
        k.passed(),
        verdict_text(&vb),
        verdict_text(&ve),
        match &cm {
            Ok(_) => "found".to_string(),
            Err(e) => format!("none ({e})"),
        },
        fan_cm.unwrap_or(false)
    );
    Outcome { pass, detail }
}

fn verdict_text(v: &CriterionVerdict) -> String {
    match v {
        CriterionVerdict::Valid => "Valid".into(),
        CriterionVerdict::Invalid { at, out_degree } => format!("Invalid at {at} (out-degree {out_degree})"),
    }
}

fn principal_of(p: &Presentation, s: &Structure, w: NodeId) -> SymbolicUltrafilter {
    let name = s.name(w);
    if s.is_hub(w) {
        return SymbolicUltrafilter::Principal(Element::Hub(name.into()));
    }
    let (block, copy, pos) = p.locate(name).unwrap();
    if p.blocks[block].origin == Origin::NonPrincipal {
        SymbolicUltrafilter::NonPrincipal { block: block.into(), pos: pos.into(), bundle: copy }
    } else {
        SymbolicUltrafilter::Principal(Element::Copy { block: block.into(), copy, pos: pos.into() })
    }
}

fn c7_decomposition() -> Outcome {
    let (mut bad, mut principal_pairs, mut np_pairs) = (0, 0, 0);
    for (name, p) in presentations() {
        let ext = p.extend().unwrap();
        for k in 1..=C7_MAX_K {
            let s = p.expand(k).unwrap();
            for a in 0..s.len() {
                for b in 0..s.len() {
                    principal_pairs += 1;
                    let sym = symbolic_ue_related(&ext, &principal_of(&p, &s, a), &principal_of(&p, &s, b)).unwrap();
                    if sym != ue_related(&s, &pi(&s, a), &pi(&s, b)).unwrap() {
                        bad += 1;
                        eprintln!("c7: {name} k={k}: principal pair ({}, {})", s.name(a), s.name(b));
                    }
                }
            }
            // finite analogue: every bundle is a fresh concrete copy
            let analogue = ext.expand_with(k, Some(2)).unwrap();
            for a in 0..analogue.len() {
                for b in 0..analogue.len() {
                    let (ua, ub) = (principal_of(&ext, &analogue, a), principal_of(&ext, &analogue, b));
                    let involves_np = matches!(ua, SymbolicUltrafilter::NonPrincipal { .. })
                        || matches!(ub, SymbolicUltrafilter::NonPrincipal { .. });
                    if !involves_np {
                        continue;
                    }
                    np_pairs += 1;
                    let sym = symbolic_ue_related(&ext, &ua, &ub).unwrap();
                    if sym != ue_related(&analogue, &pi(&analogue, a), &pi(&analogue, b)).unwrap() {
                        bad += 1;
                        eprintln!("c7: {name} k={k}: pair ({ua}, {ub})");
                    }
                }
            }
        }
    }
    outcome(bad, format!("{principal_pairs} principal pairs, {np_pairs} pairs with a nonprincipal side, {bad} mismatches"))
}

fn psi_holds(s: &Structure, f: &uext_core::fo::FoFormula, a: NodeId, b: NodeId) -> bool {
    let asg: Assignment = [("y0".to_string(), a), ("yn".to_string(), b)].into_iter().collect();
    eval(s, f, &asg).unwrap()
}

fn c8_psi() -> Outcome {
    let psis: Vec<_> = (0..=C8_MAX_N).map(emit_psi).collect();
    let (mut bad, mut cases) = (0, 0);
    let mut run = |s: &Structure| {
        for (n, f) in psis.iter().enumerate() {
            for a in 0..s.len() {
                for b in 0..s.len() {
                    if n == 0 && a != b {
                        // psi_0 is y0 = yn
                        cases += 1;
                        bad += usize::from(psi_holds(s, f, a, b));
                        continue;
                    }
                    cases += 1;
                    let oracle = oracle_distinct_road(&|x, y| s.edge(x, y), s.len(), a, b, n);
                    if psi_holds(s, f, a, b) != oracle {
                        bad += 1;
                    }
                }
            }
        }
    };
    for n in 1..=C8_EXHAUSTIVE_MAX {
        all_frames(n).for_each(|s| run(&s));
    }
    // on 5 nodes: every undirected skeleton, each under random orientations and loops
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    for skeleton in 0..1u32 << pairs.len() {
        for _ in 0..C8_ORIENTATIONS_5 {
            let mut edges = Vec::new();
            for (i, &(a, b)) in pairs.iter().enumerate() {
                if skeleton >> i & 1 == 1 {
                    match rng.gen_range(0..3) {
                        0 => edges.push((a, b)),
                        1 => edges.push((b, a)),
                        _ => edges.extend([(a, b), (b, a)]),
                    }
                }
            }
            edges.extend((0..5).filter(|_| rng.gen_bool(0.3)).map(|w| (w, w)));
            run(&Structure::anonymous(5, edges));
        }
    }
    outcome(bad, format!("{cases} (structure, n, pair) cases, {bad} mismatches"))
}

fn c9_sharp() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let (mut bad, mut sentences) = (0, 0);
    while sentences < C9_MIN_SENTENCES {
        let n = rng.gen_range(1..=5);
        let d = rng.gen_range(0.15..0.6);
        let plain = random_frame(&mut rng, n, d);
        let hubs: Vec<NodeId> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
        let names: Vec<String> = (0..n).map(|i| format!("h{i}")).collect();
        let s = Structure::new(names, plain.relation().pairs().collect::<Vec<_>>(), hubs.iter().copied()).unwrap();
        let hub_names: Vec<String> = hubs.iter().map(|&h| format!("h{h}")).collect();
        let f = random_fo(&mut rng, C9_MAX_RANK, &mut Vec::new(), &hub_names);
        assert!(f.is_sentence() && f.quantifier_rank() <= C9_MAX_RANK);
        sentences += 1;
        let sharp = sharp_translate(&f).unwrap();
        if eval(&s, &f, &Assignment::new()).unwrap() != eval(&s, &sharp, &Assignment::new()).unwrap() {
            bad += 1;
        }
    }
    outcome(bad, format!("{sentences} random sentences of rank <= {C9_MAX_RANK}, {bad} mismatches"))
}

fn c10_chi() -> Outcome {
    let (mut bad, mut cases) = (0, 0);
    for (name, p) in presentations() {
        let s = p.expand(C10_K).unwrap();
        let (srel, _) = s.decompose();
        for w in 0..s.len() {
            for n in 0..=C10_MAX_N {
                cases += 1;
                let nb = extract(&s, &srel, w, n).unwrap();
                let chi = emit_chi(&nb, n, DEFAULT_CHI_MAX_NODES).unwrap();
                if !eval_at(&s, &chi, "x", w).unwrap() {
                    bad += 1;
                    eprintln!("c10: {name}: chi_{n} false at {}", s.name(w));
                }
            }
        }
    }
    outcome(bad, format!("{cases} (node, n) cases over expand(p,{C10_K}), {bad} failures"))
}

fn c11_phi_star() -> Outcome {
    let f = phi_star();
    let witness = eval(&frame("phistar.frame"), &f, &Assignment::new()).unwrap();
    let mut loop_free = 0;
    let mut wrong = 0;
    for n in 1..=3 {
        for s in all_frames(n) {
            if (0..n).any(|w| s.edge(w, w)) {
                continue;
            }
            loop_free += 1;
            wrong += usize::from(eval(&s, &f, &Assignment::new()).unwrap());
        }
    }
    let bad = wrong + usize::from(!witness);
    outcome(bad, format!("witness frame: {witness}; {loop_free} loop-free frames, {wrong} satisfy it"))
}

/// A model with a p-morphism onto `a`: every node of `a` gets one or two
/// preimages, and each lifted edge keeps at least one witness.
fn pmorphic_preimage(rng: &mut ChaCha8Rng, a: &Structure, va: &Valuation) -> (Structure, Valuation) {
    let mut f: Vec<NodeId> = (0..a.len()).collect();
    for w in 0..a.len() {
        if rng.gen_bool(0.5) {
            f.push(w);
        }
    }
    let m = f.len();
    let mut edges = Vec::new();
    for x in 0..m {
        for y in a.successors(f[x]).iter() {
            let pre: Vec<NodeId> = (0..m).filter(|&z| f[z] == y).collect();
            let keep = pre[rng.gen_range(0..pre.len())];
            for &z in &pre {
                if z == keep || rng.gen_bool(0.5) {
                    edges.push((x, z));
                }
            }
        }
    }
    let b = Structure::anonymous(m, edges);
    let mut vb = Valuation::new();
    for (p, set) in va.iter() {
        vb.set(p.clone(), NodeSet::from_nodes(m, (0..m).filter(|&x| set.contains(f[x]))));
    }
    (b, vb)
}

fn c12_bisimulation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 12);
    let (mut bad, mut pairs) = (0, 0);
    while pairs < C12_MIN_PAIRS {
        let n = rng.gen_range(1..=4);
        let d = rng.gen_range(0.2..0.6);
        let a = random_frame(&mut rng, n, d);
        let mut va = Valuation::new();
        for i in 0..C12_VARS {
            va.set(format!("p{i}"), NodeSet::from_nodes(n, (0..n).filter(|_| rng.gen_bool(0.5))));
        }
        let (b, vb) = if rng.gen_bool(0.7) {
            pmorphic_preimage(&mut rng, &a, &va)
        } else {
            let m = rng.gen_range(1..=4);
            let b = random_frame(&mut rng, m, d);
            let mut vb = Valuation::new();
            for i in 0..C12_VARS {
                vb.set(format!("p{i}"), NodeSet::from_nodes(m, (0..m).filter(|_| rng.gen_bool(0.5))));
            }
            (b, vb)
        };
        let z = largest_bisimulation(Model { frame: &a, valuation: &va }, Model { frame: &b, valuation: &vb });
        for &(x, y) in &z.pairs {
            let f = random_modal(&mut rng, C12_DEPTH, C12_VARS);
            pairs += 1;
            if check(&a, &va, x, &f).unwrap() != check(&b, &vb, y, &f).unwrap() {
                bad += 1;
            }
        }
    }
    outcome(bad, format!("{pairs} (related pair, formula) samples of depth <= {C12_DEPTH}, {bad} disagreements"))
}

fn c13_ef() -> Outcome {
    let (mut bad, mut games) = (0, 0);
    let mut names = Vec::new();
    for (name, p) in presentations() {
        if !p.hubs.is_empty() {
            continue;
        }
        names.push(name.clone());
        for q in 0..=C13_MAX_Q {
            games += 1;
            let (a, b) = (p.expand(q as u64).unwrap(), p.expand(q as u64 + 1).unwrap());
            if !fo::ef_equivalent(&a, &b, q).unwrap() {
                bad += 1;
                eprintln!("c13: {name} q={q}: Spoiler wins");
            }
        }
    }
    outcome(bad, format!("{games} games over {}, {bad} Spoiler wins", names.join(" ")))
}

fn c14_counting() -> Outcome {
    let mut bad = 0;
    let mut notes = Vec::new();
    // every position of every omega block, as extracted from a truncation
    for (name, p) in presentations() {
        let s = p.expand(3).unwrap();
        let (srel, _) = s.decompose();
        for w in 0..s.len() {
            if s.is_hub(w) {
                continue;
            }
            let (block, copy, _) = p.locate(s.name(w)).unwrap();
            let b = &p.blocks[block];
            if b.multiplicity != Card::Aleph0 || p.exceptional_copies(block).contains(&copy) {
                continue;
            }
            let nb = extract_component(&s, &srel, w).unwrap();
            let got = p.count_neighborhood_type(&nb);
            if got != Card::PowerContinuum {
                bad += 1;
                notes.push(format!("{name}:{} -> {got}", s.name(w)));
            }
        }
    }
    // types realized only in finite blocks: count by enumeration in expand(4)
    for (name, p) in presentations() {
        let s = p.expand(4).unwrap();
        let (srel, _) = s.decompose();
        let digests: Vec<String> =
            (0..s.len()).map(|w| canonical_form(&extract_component(&s, &srel, w).unwrap()).digest).collect();
        for w in 0..s.len() {
            let nb = extract_component(&s, &srel, w).unwrap();
            let got = p.count_neighborhood_type(&nb);
            if got.is_infinite() {
                continue;
            }
            let expect = digests.iter().filter(|d| **d == digests[w]).count() as u64;
            if got != Card::Fin(expect) {
                bad += 1;
                notes.push(format!("{name}:{} -> {got} vs {expect}", s.name(w)));
            }
        }
    }
    let unmatched = neighborhood::Neighborhood {
        root: 0,
        nodes: vec!["x".into()],
        s_edges: BTreeSet::new(),
        annotations: vec![BTreeSet::from([neighborhood::Annotation::new(neighborhood::Direction::In, "zz")])],
        hub: vec![None],
        radius: 0,
        hubs: BTreeSet::from(["h".to_string()]),
    };
    if abp("fan.abp").count_neighborhood_type(&unmatched) != Card::ZERO {
        bad += 1;
        notes.push("unmatched type counted".into());
    }
    let a = abp("ex2_a.abp").extend().unwrap().count_reflexive();
    let b = abp("ex2_b.abp").extend().unwrap().count_reflexive();
    let ex2 = a == vec![(Origin::Principal, Card::Aleph0), (Origin::NonPrincipal, Card::PowerContinuum)]
        && b == vec![(Origin::Principal, Card::ZERO), (Origin::NonPrincipal, Card::ZERO)];
    bad += usize::from(!ex2);
    outcome(
        bad,
        format!(
            "identity block: reflexive {}/{}; empty block: {}/{}; {} mismatches {}",
            a[0].1,
            a[1].1,
            b[0].1,
            b[1].1,
            bad,
            notes.join(", ")
        ),
    )
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("dual characterization of R^ue", c1_dual_characterization),
        ("finite structures are their own extension", c2_finite_fixpoint),
        ("ultrafilter road lands in the last ultrafilter", c3_road_membership),
        ("reflexivity criterion and reflexive counts", c4_reflexivity),
        ("phi corresponds to (**)", c5_phi_correspondence),
        ("Alt_n | phi: base valid, extension invalid, countermodel", c6_alt_or_phi_after_extension),
        ("symbolic R^ue against finite truncations", c7_decomposition),
        ("psi_n against distinct-node roads", c8_psi),
        ("sharp translation preserves truth", c9_sharp),
        ("chi_n holds at its own root", c10_chi),
        ("phi* on the witness and loop-free frames", c11_phi_star),
        ("bisimilar points agree on modal formulas", c12_bisimulation),
        ("expand(p,q) and expand(p,q+1) are q-equivalent", c13_ef),
        ("symbolic neighborhood and reflexive counts", c14_counting),
    ];
    let mut failed = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("acceptance {:>2} {tag}  {title}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 14 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
