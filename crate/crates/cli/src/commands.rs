use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};
use uext_core::fo::{self, parse_fo_for, sharp_translate, standard_translation, Assignment};
use uext_core::modal::{
    self, alt_n, check, counterexample_frame, criterion_validity, family_k_check, frame_valid, largest_bisimulation,
    locally_valid_nodes, parse_modal, phi_formula, star_star_condition, CriterionVerdict, FrameVerdict, Model,
    ModalFormula, Valuation, ValidityLimits,
};
use uext_core::neighborhood::{canonical_form, emit_chi, extract, extract_component};
use uext_core::presentation::{parse_presentation, print_presentation};
use uext_core::structure::{parse_frame, print_frame};
use uext_core::ultrafilter::{
    distinguishing_sets, is_isomorphism, ue_extension_finite, ultrafilter_road_delta, UltrafilterRoad,
};
use uext_core::{NodeId, NodeSet, Presentation, Relation, Road, Structure};

use crate::report::{overflow, read_input, usage, Input, Outcome, Report, Verdict};
use crate::{Command, FoCommand, Global, ModalCommand, NbhdArgs};

fn is_abp(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "abp")
}

struct Loaded<T> {
    value: T,
    input: Input,
}

fn load_frame(path: &Path) -> Outcome<Loaded<Structure>> {
    let input = read_input(path)?;
    if is_abp(path) {
        return Err(usage(format!("{}: expected a .frame file", path.display())));
    }
    Ok(Loaded { value: parse_frame(&input.text)?, input })
}

fn load_abp(path: &Path) -> Outcome<Loaded<Presentation>> {
    let input = read_input(path)?;
    if !is_abp(path) {
        return Err(usage(format!("{}: expected an .abp file", path.display())));
    }
    Ok(Loaded { value: parse_presentation(&input.text)?, input })
}

/// A frame as given, or a presentation expanded with `k` copies.
fn load_structure(path: &Path, k: u64) -> Outcome<(Structure, Option<Presentation>, Input)> {
    if is_abp(path) {
        let l = load_abp(path)?;
        Ok((l.value.expand(k)?, Some(l.value), l.input))
    } else {
        let l = load_frame(path)?;
        Ok((l.value, None, l.input))
    }
}

fn cap_frame(s: &Structure, g: &Global) -> Outcome<()> {
    if s.len() > g.max_frame_size {
        return Err(overflow(format!("frame has {} nodes, --max-frame-size is {}", s.len(), g.max_frame_size)));
    }
    Ok(())
}

fn limits(g: &Global) -> ValidityLimits {
    ValidityLimits { max_val_bits: g.max_val_bits }
}

fn node(s: &Structure, name: &str) -> Outcome<NodeId> {
    Ok(s.node(name.trim())?)
}

fn node_list(s: &Structure, text: &str) -> Outcome<NodeSet> {
    let mut out = NodeSet::empty(s.len());
    for name in text.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        out.insert(node(s, name)?);
    }
    Ok(out)
}

fn names(s: &Structure, set: &NodeSet) -> Vec<String> {
    set.iter().map(|i| s.name(i).to_string()).collect()
}

/// `p=a,b;q=c` (an empty right-hand side is the empty set).
fn parse_valuation(s: &Structure, text: &str) -> Outcome<Valuation> {
    let mut v = Valuation::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (var, nodes) = part.split_once('=').ok_or_else(|| usage(format!("valuation entry `{part}` lacks `=`")))?;
        v.set(var.trim(), node_list(s, nodes)?);
    }
    Ok(v)
}

fn valuation_json(s: &Structure, v: &Valuation) -> Value {
    v.iter().map(|(k, set)| (k.clone(), json!(names(s, set)))).collect::<serde_json::Map<_, _>>().into()
}

/// `a -> b <- c`.
fn parse_road(s: &Structure, text: &str) -> Outcome<Road> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len().is_multiple_of(2) {
        return Err(usage(format!("road `{text}` must alternate nodes and arrows")));
    }
    let mut nodes = vec![node(s, tokens[0])?];
    let mut forward = Vec::new();
    for pair in tokens[1..].chunks(2) {
        forward.push(match pair[0] {
            "->" => true,
            "<-" => false,
            a => return Err(usage(format!("expected `->` or `<-`, found `{a}`"))),
        });
        nodes.push(node(s, pair[1])?);
    }
    Ok(Road { nodes, forward })
}

fn pick_relation(s: &Structure, which: &str) -> Outcome<Relation> {
    let (srel, prel) = s.decompose();
    match which {
        "r" | "R" => Ok(s.relation().clone()),
        "s" | "S" => Ok(srel),
        "p" | "P" => Ok(prel),
        w => Err(usage(format!("unknown relation `{w}`; use r, s or p"))),
    }
}

fn modal_formula(text: &str) -> Outcome<ModalFormula> {
    Ok(parse_modal(text)?)
}

fn with_inputs(mut r: Report, inputs: Vec<Input>) -> Report {
    r.inputs = inputs;
    r
}

pub fn run(cmd: &Command, g: &Global) -> Outcome<Report> {
    match cmd {
        Command::Fmt { file } => {
            let input = read_input(file)?;
            let text = if is_abp(file) {
                print_presentation(&parse_presentation(&input.text)?)
            } else {
                print_frame(&parse_frame(&input.text)?)
            };
            Ok(with_inputs(Report::new(Verdict::Pass).payload(text), vec![input]))
        }
        Command::Validate { file } => {
            if !is_abp(file) {
                let l = load_frame(file)?;
                let s = &l.value;
                let r = Report::new(Verdict::Pass)
                    .line(format!("frame: {} nodes, {} edges, {} hubs", s.len(), s.relation().len(), s.hubs().len()))
                    .result(json!({ "nodes": s.len(), "edges": s.relation().len(), "hubs": s.hub_names() }));
                return Ok(with_inputs(r, vec![l.input]));
            }
            let l = load_abp(file)?;
            let report = l.value.validate();
            let mut r = Report::new(Verdict::from_bool(report.passed()));
            for v in &report.violations {
                r = r.line(format!("violation: {v}"));
            }
            if report.passed() {
                r = r.line("presentation is well formed");
            }
            let r = r.result(json!({ "violations": report.violations, "extension": l.value.is_extension() }));
            Ok(with_inputs(r, vec![l.input]))
        }
        Command::Expand { file, k, bundles } => {
            let l = load_abp(file)?;
            let s = l.value.expand_with(*k, *bundles)?;
            let r = Report::new(Verdict::Pass)
                .payload(print_frame(&s))
                .result(json!({ "nodes": s.len(), "edges": s.relation().len() }));
            Ok(with_inputs(r, vec![l.input]))
        }
        Command::Extend { file } => {
            let l = load_abp(file)?;
            let ext = l.value.extend()?;
            let added: Vec<&String> = ext.blocks.keys().filter(|b| !l.value.blocks.contains_key(*b)).collect();
            let r = Report::new(Verdict::Pass).payload(print_presentation(&ext)).result(json!({ "added_blocks": added }));
            Ok(with_inputs(r, vec![l.input]))
        }
        Command::UeCheck { file } => {
            let l = load_frame(file)?;
            cap_frame(&l.value, g)?;
            let ext = ue_extension_finite(&l.value)?;
            let iso = is_isomorphism(&l.value, &ext.structure, &ext.witness);
            let mut r = Report::new(Verdict::from_bool(iso))
                .line(format!("ultrafilters: {} (all principal)", ext.structure.len()))
                .line(format!("edges of A^ue: {}", ext.structure.relation().len()));
            r = r.line(if iso { "A^ue ≅ A via w -> pi(w)" } else { "A^ue and A differ under w -> pi(w)" });
            let r = r.result(json!({
                "ultrafilters": ext.structure.len(),
                "isomorphic": iso,
                "edges": ext.structure.relation().pairs().map(|(a, b)| [ext.structure.name(a), ext.structure.name(b)]).collect::<Vec<_>>(),
            }));
            Ok(with_inputs(r, vec![l.input]))
        }
        Command::Roads { file, from, to, max_len, relation } => {
            let l = load_frame(file)?;
            let s = &l.value;
            let q = pick_relation(s, relation)?;
            let road = s.find_road(&q, node(s, from)?, node(s, to)?, *max_len)?;
            let r = match road {
                Some(road) => Report::new(Verdict::Pass)
                    .line(format!("road of length {}: {}", road.len(), road.render(s)))
                    .result(json!({ "length": road.len(), "road": road.render(s) })),
                None => Report::new(Verdict::Fail)
                    .line(format!("no road of length <= {max_len} from {from} to {to}"))
                    .result(json!({ "road": Value::Null })),
            };
            Ok(with_inputs(r, vec![l.input]))
        }
        Command::Delta { file, road, set } => {
            let l = load_frame(file)?;
            let s = &l.value;
            cap_frame(s, g)?;
            let road = parse_road(s, road)?;
            if !road.replays(s.relation()) {
                return Err(usage(format!("`{}` is not a road of the frame", road.render(s))));
            }
            let x = node_list(s, set)?;
            let ur = UltrafilterRoad::principal(&road, s.len())?;
            let dsets = distinguishing_sets(&ur.stops)?;
            let delta = ultrafilter_road_delta(s.relation(), &x, &ur, &dsets)?;
            let last = ur.stops.last().expect("roads are nonempty");
            let inside = last.contains(&delta)?;
            let r = Report::new(Verdict::from_bool(inside))
                .line(format!("road: {}", road.render(s)))
                .line(format!("delta: {{{}}}", names(s, &delta).join(",")))
                .line(format!("delta in pi({}): {inside}", s.name(road.end())))
                .result(json!({ "road": road.render(s), "delta": names(s, &delta), "in_last": inside }));
            Ok(with_inputs(r, vec![l.input]))
        }
        Command::Nbhd(a) => nbhd(a, g),
        Command::Chi { nb, max_nodes } => chi(nb, *max_nodes),
        Command::Modal(m) => modal_cmd(m, g),
        Command::Criterion { file, alt, family_k } => {
            let l = load_abp(file)?;
            let p = &l.value;
            let verdict = criterion_validity(p, *alt)?;
            let mut r = match &verdict {
                CriterionVerdict::Valid => Report::new(Verdict::Pass).line(format!("Alt_{alt} | phi: Valid")),
                CriterionVerdict::Invalid { at, out_degree } => {
                    let kind = if matches!(at, modal::PointRef::Hub(_)) { "hub " } else { "" };
                    Report::new(Verdict::Fail).line(format!("Alt_{alt} | phi: Invalid at {kind}{at} (out-degree {out_degree})"))
                }
            };
            let mut result = match &verdict {
                CriterionVerdict::Valid => json!({ "valid": true }),
                CriterionVerdict::Invalid { at, out_degree } => {
                    json!({ "valid": false, "at": at.to_string(), "out_degree": out_degree.to_string() })
                }
            };
            if *family_k {
                let k = family_k_check(p)?;
                for c in &k.checks {
                    let detail = if c.detail.is_empty() { String::new() } else { format!(" ({})", c.detail) };
                    r = r.line(format!("family K: {}: {}{detail}", c.name, if c.pass { "yes" } else { "no" }));
                }
                result["family_k"] = json!({
                    "passed": k.passed(),
                    "designated": k.designated,
                    "checks": k.checks.iter().map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail })).collect::<Vec<_>>(),
                });
            }
            Ok(with_inputs(r.result(result), vec![l.input]))
        }
        Command::Counterexample { file, hub, alt, k } => {
            let l = load_abp(file)?;
            let cm = counterexample_frame(&l.value, hub, *alt, *k, limits(g))?;
            let s = &cm.frame;
            let r = Report::new(Verdict::Fail)
                .line(format!("Alt_{alt} | phi fails at {} on a {}-node frame", s.name(cm.node), s.len()))
                .line(format!("valuation: {}", cm.valuation.render(s)))
                .line("frame:")
                .line(print_frame(s).trim_end().to_string())
                .result(json!({
                    "node": s.name(cm.node),
                    "frame": print_frame(s),
                    "valuation": valuation_json(s, &cm.valuation),
                }));
            Ok(with_inputs(r, vec![l.input]))
        }
        Command::Bisim { left, right, val_left, val_right, pair } => {
            let (a, b) = (load_frame(left)?, load_frame(right)?);
            let (sa, sb) = (&a.value, &b.value);
            let (va, vb) = (parse_valuation(sa, val_left)?, parse_valuation(sb, val_right)?);
            let z = largest_bisimulation(Model { frame: sa, valuation: &va }, Model { frame: sb, valuation: &vb });
            let pairs: Vec<[&str; 2]> = z.pairs.iter().map(|&(x, y)| [sa.name(x), sb.name(y)]).collect();
            let mut r = Report::new(Verdict::Pass).line(format!(
                "largest bisimulation: {}",
                pairs.iter().map(|[x, y]| format!("({x},{y})")).collect::<Vec<_>>().join(" ")
            ));
            let (total, surjective) = (z.is_total(sa), z.is_surjective(sb));
            let ok = match pair {
                Some(p) => {
                    let (x, y) = p.split_once(',').ok_or_else(|| usage("--pair takes `x,y`"))?;
                    let related = z.contains(node(sa, x)?, node(sb, y)?);
                    r = r.line(format!("({}, {}) related: {related}", x.trim(), y.trim()));
                    related
                }
                None => {
                    r = r.line(format!("total: {total}, surjective: {surjective}"));
                    total && surjective
                }
            };
            r.verdict = Verdict::from_bool(ok);
            let r = r.result(json!({ "pairs": pairs, "total": total, "surjective": surjective }));
            Ok(with_inputs(r, vec![a.input, b.input]))
        }
        Command::Fo(f) => fo_cmd(f, g),
        Command::Counts { file, k } => counts(file, *k),
    }
}

fn nbhd(a: &NbhdArgs, _g: &Global) -> Outcome<Report> {
    let (s, p, input) = load_structure(&a.file, a.k)?;
    let w = node(&s, &a.node)?;
    let (srel, _) = s.decompose();
    let nb = extract(&s, &srel, w, a.radius)?;
    let cf = canonical_form(&nb);
    let mut r = Report::new(Verdict::Pass)
        .line(format!("nodes: {}", nb.nodes.join(" ")))
        .line(format!("digest: {}", cf.digest));
    let mut result = json!({ "nodes": nb.nodes, "digest": cf.digest, "radius": a.radius });
    if let Some(p) = p {
        // whole components are what the symbolic count compares against
        let comp = extract_component(&s, &srel, w)?;
        let count = p.count_neighborhood_type(&comp);
        r = r.line(format!("points of the extension with this component type: {count}"));
        result["component_count"] = json!(count.to_string());
    }
    Ok(with_inputs(r.result(result), vec![input]))
}

fn chi(a: &NbhdArgs, max_nodes: usize) -> Outcome<Report> {
    let (s, _, input) = load_structure(&a.file, a.k)?;
    let w = node(&s, &a.node)?;
    let (srel, _) = s.decompose();
    let nb = extract(&s, &srel, w, a.radius)?;
    let f = emit_chi(&nb, a.radius, max_nodes)?;
    let holds = fo::eval_at(&s, &f, "x", w)?;
    let r = Report::new(Verdict::from_bool(holds))
        .line(format!("chi: {f}"))
        .line(format!("holds at {}: {holds}", a.node))
        .result(json!({ "formula": f.to_string(), "holds": holds }));
    Ok(with_inputs(r, vec![input]))
}

fn frame_verdict_report(s: &Structure, f: &ModalFormula, g: &Global) -> Outcome<Report> {
    cap_frame(s, g)?;
    Ok(match frame_valid(s, f, limits(g)) {
        FrameVerdict::Valid => Report::new(Verdict::Pass).line(format!("{f}: valid")).result(json!({ "valid": true })),
        FrameVerdict::Counterexample { valuation, node } => Report::new(Verdict::Fail)
            .line(format!("{f}: fails at {} under {}", s.name(node), valuation.render(s)))
            .result(json!({ "valid": false, "node": s.name(node), "valuation": valuation_json(s, &valuation) })),
        FrameVerdict::Overflow { needed, cap } => {
            return Err(overflow(format!("valuation bits |A|*vars = {needed} exceed --max-val-bits {cap}")))
        }
    })
}

fn modal_cmd(m: &ModalCommand, g: &Global) -> Outcome<Report> {
    match m {
        ModalCommand::Check { file, formula, node: w, val } => {
            let l = load_frame(file)?;
            let s = &l.value;
            let f = modal_formula(formula)?;
            let v = parse_valuation(s, val)?;
            let holds = check(s, &v, node(s, w)?, &f)?;
            let r = Report::new(Verdict::from_bool(holds))
                .line(format!("{f} at {w}: {holds}"))
                .result(json!({ "holds": holds }));
            Ok(with_inputs(r, vec![l.input]))
        }
        ModalCommand::Valid { file, formula } => {
            let l = load_frame(file)?;
            let f = modal_formula(formula)?;
            Ok(with_inputs(frame_verdict_report(&l.value, &f, g)?, vec![l.input]))
        }
        ModalCommand::Alt { n, file } => {
            let f = alt_n(*n);
            match file {
                None => Ok(Report::new(Verdict::Pass).line(f.to_string()).result(json!({ "formula": f.to_string() }))),
                Some(path) => {
                    let l = load_frame(path)?;
                    Ok(with_inputs(frame_verdict_report(&l.value, &f, g)?, vec![l.input]))
                }
            }
        }
        ModalCommand::Phi { file } => {
            let f = phi_formula();
            let Some(path) = file else {
                return Ok(Report::new(Verdict::Pass).line(f.to_string()).result(json!({ "formula": f.to_string() })));
            };
            let l = load_frame(path)?;
            let s = &l.value;
            cap_frame(s, g)?;
            let valid = locally_valid_nodes(s, &f, limits(g))?;
            let mut r = Report::new(Verdict::Pass);
            let mut rows = Vec::new();
            for w in 0..s.len() {
                let (fv, cond) = (valid.contains(w), star_star_condition(s, w));
                if fv != cond {
                    r.verdict = Verdict::Fail;
                }
                r = r.line(format!("{}: phi locally valid {fv}, (**) {cond}", s.name(w)));
                rows.push(json!({ "node": s.name(w), "phi_valid": fv, "star_star": cond }));
            }
            Ok(with_inputs(r.result(json!({ "points": rows })), vec![l.input]))
        }
    }
}

fn parse_assignment(s: &Structure, text: &str) -> Outcome<Assignment> {
    let mut a = Assignment::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (var, name) = part.split_once('=').ok_or_else(|| usage(format!("assignment `{part}` lacks `=`")))?;
        a.insert(var.trim().to_string(), node(s, name)?);
    }
    Ok(a)
}

fn fo_cmd(f: &FoCommand, g: &Global) -> Outcome<Report> {
    match f {
        FoCommand::Eval { file, formula, assign } => {
            let (s, _, input) = load_structure(file, 2)?;
            let phi = parse_fo_for(formula, &s)?;
            let asg = parse_assignment(&s, assign)?;
            let holds = fo::eval(&s, &phi, &asg)?;
            let r = Report::new(Verdict::from_bool(holds)).line(format!("{phi}: {holds}")).result(json!({ "holds": holds }));
            Ok(with_inputs(r, vec![input]))
        }
        FoCommand::Translate { formula, modal: is_modal, var } => {
            let out = if *is_modal {
                standard_translation(&modal_formula(formula)?, var)
            } else {
                sharp_translate(&fo::parse_fo(formula)?)?
            };
            Ok(Report::new(Verdict::Pass).line(out.to_string()).result(json!({ "formula": out.to_string() })))
        }
        FoCommand::Ef { left, right, rounds, max_rounds } => {
            let (a, b) = (load_frame(left)?, load_frame(right)?);
            cap_frame(&a.value, g)?;
            cap_frame(&b.value, g)?;
            let eq = fo::ef_equivalent_capped(&a.value, &b.value, *rounds, *max_rounds)?;
            let r = Report::new(Verdict::from_bool(eq))
                .line(if eq {
                    format!("Duplicator wins the {rounds}-round game")
                } else {
                    format!("Spoiler wins the {rounds}-round game")
                })
                .result(json!({ "equivalent": eq, "rounds": rounds }));
            Ok(with_inputs(r, vec![a.input, b.input]))
        }
    }
}

fn counts(file: &Path, k: u64) -> Outcome<Report> {
    let l = load_abp(file)?;
    let p = &l.value;
    let report = p.validate();
    if !report.passed() {
        return Err(usage(format!("presentation rejected: {}", report.violations.join("; "))));
    }
    let mut r = Report::new(Verdict::Pass);
    let mut reflexive = serde_json::Map::new();
    for (origin, c) in p.count_reflexive() {
        let label = format!("{origin:?}").to_lowercase();
        r = r.line(format!("reflexive points, {label}: {c}"));
        reflexive.insert(label, json!(c.to_string()));
    }
    let mut degrees = serde_json::Map::new();
    for h in &p.hubs {
        let d = p.hub_out_degree(h);
        r = r.line(format!("out-degree of hub {h}: {d}"));
        degrees.insert(h.clone(), json!(d.to_string()));
    }
    let s = p.expand(k)?;
    let (srel, _) = s.decompose();
    let mut types: BTreeMap<String, (String, String)> = BTreeMap::new();
    for w in 0..s.len() {
        let nb = extract_component(&s, &srel, w)?;
        let digest = canonical_form(&nb).digest;
        types.entry(digest).or_insert_with(|| (s.name(w).to_string(), p.count_neighborhood_type(&nb).to_string()));
    }
    for (digest, (example, c)) in &types {
        r = r.line(format!("component type {digest} (e.g. {example}): {c}"));
    }
    let r = r.result(json!({
        "reflexive": reflexive,
        "hub_out_degree": degrees,
        "component_types": types.iter().map(|(d, (e, c))| json!({ "digest": d, "example": e, "count": c })).collect::<Vec<_>>(),
    }));
    Ok(with_inputs(r, vec![l.input]))
}
