use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spanex_analysis::{
    containment_det_seq_pd, containment_general, point_disjoint_check, sat_rgx, sat_rule, sat_va, Containment,
    SatWitness,
};
use spanex_core::{Alphabet, Budget, Document, Mapping};
use spanex_eval::{delay_audit, enumerate, model_check};
use spanex_rgx::{is_functional, is_sequential, is_span_rgx, Rgx};
use spanex_rules::{
    classify, dag_to_tree_union, eliminate_cycles, enumerate_tree_rule, eval_rule_oracle_with, rgx_to_rule_union,
    to_functional_union, tree_to_rgx, ExtractionRule, RuleUnion,
};
use spanex_va::{compile_rgx, determinize, is_deterministic, is_sequential_va, sequentialize, va_to_rgx, Va};

use crate::error::{Failure, EMPTY, FRAGMENT, OTHER};
use crate::input::{self, classify as classify_source, not_supported, Kind, Source, SourceArgs};

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Documents to read whole; standard input when none is given.
    pub documents: Vec<PathBuf>,
    /// Add a `_bytes` field with 0-based byte ranges.
    #[arg(long)]
    pub byte_offsets: bool,
    /// Stop after this many mappings per document.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Largest variable count accepted for non-sequential automata.
    #[arg(long, default_value_t = 8)]
    pub max_vars: usize,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub determinize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Identity,
    /// Rule with cyclic dependencies removed.
    Cycles,
    /// Union of functional rules.
    Functional,
    /// Union of tree-like rules.
    Tree,
    /// Expression for a tree-like rule, or for an automaton.
    Rgx,
    /// Union of tree-like rules for an expression.
    Rules,
    /// Equivalent sequential expression.
    Sequential,
    Determinize,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum)]
    pub to: Target,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(subcommand)]
    pub command: AnalyzeCommand,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Whether some document has a mapping, with a witness.
    Sat(SourceArgs),
    /// Whether every mapping of LEFT is a mapping of RIGHT on every document.
    Contains(ContainsArgs),
    /// Whether all mappings on documents up to a length share no endpoint.
    PointDisjoint {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
}

#[derive(Debug, Args)]
pub struct ContainsArgs {
    pub left: String,
    pub right: String,
    /// LEFT and RIGHT are the sources themselves rather than file paths.
    #[arg(long)]
    pub inline: bool,
    #[arg(long, value_enum, default_value_t = Kind::Auto)]
    pub kind: Kind,
    #[arg(long)]
    pub alphabet: Option<String>,
    /// Product construction for deterministic, sequential, point-disjoint
    /// automata. Point-disjointness is checked on short documents only.
    #[arg(long)]
    pub fast: bool,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    pub document: PathBuf,
}

fn mapping_json(m: &Mapping, d: &Document, bytes: bool) -> Result<Value, Failure> {
    let mut v = serde_json::to_value(m).map_err(|e| Failure::new(OTHER, e.to_string()))?;
    if bytes {
        let mut b = serde_json::Map::new();
        for (x, s) in m.iter() {
            let (lo, hi) = d.byte_range(*s).map_err(|e| Failure::new(OTHER, e.to_string()))?;
            b.insert(x.clone(), json!([lo, hi]));
        }
        v.as_object_mut().expect("mappings are objects").insert("_bytes".into(), Value::Object(b));
    }
    Ok(v)
}

fn witness_json(w: &SatWitness) -> Value {
    json!({ "document": w.document.to_string(), "mapping": w.mapping })
}

fn check_fragment(a: &Va, max_vars: usize) -> Result<(), Failure> {
    let n = a.vars().len();
    if !is_sequential_va(a) && n > max_vars {
        return Err(Failure::new(FRAGMENT, format!("not sequential, and {n} variables exceed the limit of {max_vars}")));
    }
    Ok(())
}

/// Outputs of a simple rule on `d`, exactly: each tree-like member of its
/// rewriting is enumerated and auxiliary variables are projected away.
fn rule_outputs(r: &ExtractionRule, d: &Document) -> Result<Vec<Mapping>, Failure> {
    let c = classify(r);
    if c.tree_like && c.sequential {
        return Ok(enumerate_tree_rule(r, d)?);
    }
    if !r.is_simple() {
        return Err(Failure::new(FRAGMENT, "rule is not simple"));
    }
    let vars = r.vars();
    let mut out = BTreeSet::new();
    for f in to_functional_union(r)? {
        for t in dag_to_tree_union(&f)? {
            out.extend(enumerate_tree_rule(&t, d)?.into_iter().map(|m| m.restrict(&vars)));
        }
    }
    Ok(out.into_iter().collect())
}

pub struct DocResult {
    pub lines: Vec<Value>,
    pub max_delay: Option<usize>,
}

fn extract_doc(src: &Source, args: &ExtractArgs, d: &Document, emit: &mut dyn FnMut(Value)) -> Result<DocResult, Failure> {
    let limit = args.limit.unwrap_or(usize::MAX);
    let sigma = args.source.declared().unwrap_or_else(|| d.alphabet());
    let mut lines = Vec::new();
    let mut push = |m: &Mapping, lines: &mut Vec<Value>| -> Result<(), Failure> {
        let v = mapping_json(m, d, args.byte_offsets)?;
        emit(v.clone());
        lines.push(v);
        Ok(())
    };
    let a = match src {
        Source::Rule(text) => {
            let r = input::rule(text, Some(&sigma))?;
            for m in rule_outputs(&r, d)?.iter().take(limit) {
                push(m, &mut lines)?;
            }
            return Ok(DocResult { lines, max_delay: None });
        }
        Source::Rgx(text) => compile_rgx(&input::rgx(text, Some(&sigma))?, &d.alphabet()),
        Source::Automaton(a) => a.clone(),
    };
    check_fragment(&a, args.max_vars)?;
    let mut e = enumerate(&a, d);
    let (mut last, mut max_delay) = (0, 0);
    while lines.len() < limit {
        let Some(m) = e.next() else { break };
        let m = m?;
        max_delay = max_delay.max(e.calls() - last);
        last = e.calls();
        push(&m, &mut lines)?;
    }
    Ok(DocResult { lines, max_delay: Some(max_delay) })
}

fn summary(path: &Path, r: &DocResult) {
    let s = json!({ "document": path.display().to_string(), "count": r.lines.len(), "max_delay": r.max_delay });
    eprintln!("{s}");
}

/// Streams mappings of one document, or processes several in parallel and
/// prints them grouped per file, in argument order.
pub fn extract(args: &ExtractArgs, out: &mut dyn FnMut(&Value)) -> Result<(), Failure> {
    let src = args.source.load()?;
    let paths = if args.documents.is_empty() { vec![PathBuf::from("-")] } else { args.documents.clone() };
    let mut total = 0;
    if let [path] = paths.as_slice() {
        let d = input::document(path)?;
        let r = extract_doc(&src, args, &d, &mut |v| out(&v))?;
        summary(path, &r);
        total += r.lines.len();
    } else {
        let results: Vec<Result<DocResult, Failure>> = std::thread::scope(|s| {
            let handles: Vec<_> = paths
                .iter()
                .map(|p| s.spawn(|| extract_doc(&src, args, &input::document(p)?, &mut |_| {})))
                .collect();
            handles.into_iter().map(|h| h.join().expect("extraction thread panicked")).collect()
        });
        for (path, r) in paths.iter().zip(results) {
            let r = r?;
            for mut v in r.lines.iter().cloned() {
                v.as_object_mut().expect("mappings are objects").insert("_file".into(), json!(path.display().to_string()));
                out(&v);
            }
            summary(path, &r);
            total += r.lines.len();
        }
    }
    if total == 0 {
        return Err(Failure::new(EMPTY, "no mappings"));
    }
    Ok(())
}

pub fn check(args: &SourceArgs) -> Result<Value, Failure> {
    let declared = args.declared();
    Ok(match args.load()? {
        Source::Rgx(text) => {
            let g = input::rgx(&text, declared.as_ref())?;
            let a = compile_rgx(&g, &declared.unwrap_or_else(|| g.letters()));
            json!({
                "kind": "rgx",
                "functional": is_functional(&g),
                "sequential": is_sequential(&g),
                "span_rgx": is_span_rgx(&g),
                "deterministic": is_deterministic(&a),
                "variables": g.vars(),
            })
        }
        Source::Rule(text) => {
            let r = input::rule(&text, declared.as_ref())?;
            let c = classify(&r);
            json!({
                "kind": "rule",
                "simple": c.simple,
                "functional": c.functional,
                "sequential": c.sequential,
                "dag_like": c.dag_like,
                "tree_like": c.tree_like,
                "variables": r.vars(),
            })
        }
        Source::Automaton(a) => json!({
            "kind": "automaton",
            "sequential": is_sequential_va(&a),
            "deterministic": is_deterministic(&a),
            "states": a.num_states(),
            "transitions": a.num_transitions(),
            "variables": a.vars(),
        }),
    })
}

pub fn compile(args: &CompileArgs) -> Result<String, Failure> {
    let declared = args.source.declared();
    let a = match args.source.load()? {
        Source::Rgx(text) => {
            let g = input::rgx(&text, declared.as_ref())?;
            compile_rgx(&g, &declared.unwrap_or_else(|| g.letters()))
        }
        Source::Automaton(a) => a,
        Source::Rule(_) => return Err(not_supported("compiling a rule")),
    };
    let a = if args.determinize { determinize(&a, &Budget::search())? } else { a };
    Ok(a.to_json())
}

fn rule_size(r: &ExtractionRule) -> usize {
    r.bodies().map(Rgx::size).sum::<usize>() + r.constraints.len()
}

fn automaton_size(a: &Va) -> usize {
    a.num_states() + a.num_transitions()
}

fn union_json(u: &RuleUnion, sigma: &Alphabet) -> (Value, usize) {
    let texts: Vec<String> = u.iter().map(|r| r.to_text(sigma)).collect();
    (json!(texts), u.iter().map(rule_size).sum())
}

pub fn transform(args: &TransformArgs) -> Result<Value, Failure> {
    let declared = args.source.declared();
    let to = args.to;
    let (output, in_size, out_size, members) = match args.source.load()? {
        Source::Rule(text) => {
            let r = input::rule(&text, declared.as_ref())?;
            let sigma = declared.unwrap_or_else(|| r.letters());
            let n = rule_size(&r);
            match to {
                Target::Identity => (json!(r.to_text(&sigma)), n, n, None),
                Target::Cycles => {
                    let c = eliminate_cycles(&r)?;
                    (json!(c.to_text(&sigma)), n, rule_size(&c), None)
                }
                Target::Functional | Target::Tree => {
                    let u = if to == Target::Functional { to_functional_union(&r)? } else { dag_to_tree_union(&r)? };
                    let (v, size) = union_json(&u, &sigma);
                    (v, n, size, Some(u.len()))
                }
                Target::Rgx => {
                    let g = tree_to_rgx(&r)?;
                    (json!(g.to_string()), n, g.size(), None)
                }
                _ => return Err(not_supported("this transformation")),
            }
        }
        Source::Rgx(text) => {
            let g = input::rgx(&text, declared.as_ref())?;
            let sigma = declared.unwrap_or_else(|| g.letters());
            let n = g.size();
            match to {
                Target::Identity => (json!(g.to_string()), n, n, None),
                Target::Rules => {
                    let u = rgx_to_rule_union(&g)?;
                    let (v, size) = union_json(&u, &sigma);
                    (v, n, size, Some(u.len()))
                }
                Target::Sequential => {
                    let s = sequentialize(&g, &sigma, &Budget::search())?;
                    (json!(s.to_string()), n, s.size(), None)
                }
                _ => return Err(not_supported("this transformation")),
            }
        }
        Source::Automaton(a) => {
            let n = automaton_size(&a);
            match to {
                Target::Identity => (json!(a.to_json()), n, n, None),
                Target::Rgx => {
                    let g = va_to_rgx(&a, &Budget::search())?;
                    (json!(g.to_string()), n, g.size(), None)
                }
                Target::Determinize => {
                    let d = determinize(&a, &Budget::search())?;
                    (json!(d.to_json()), n, automaton_size(&d), None)
                }
                _ => return Err(not_supported("this transformation")),
            }
        }
    };
    let mut meta = json!({
        "input_size": in_size,
        "output_size": out_size,
        "blowup": out_size as f64 / in_size.max(1) as f64,
    });
    if let Some(m) = members {
        meta["members"] = json!(m);
    }
    Ok(json!({ "output": output, "meta": meta }))
}

/// `m ∈ ⟦a⟧d`, checked by evaluation rather than by the search that found it.
fn produces(a: &Va, d: &Document, m: &Mapping) -> Result<bool, Failure> {
    let vars = a.mentioned_vars();
    Ok(m.dom().is_subset(&vars) && model_check(a, d, m)?)
}

fn unverified() -> Failure {
    Failure::new(OTHER, "internal error: witness failed verification")
}

fn sat(args: &SourceArgs) -> Result<Value, Failure> {
    let declared = args.declared();
    let (witness, bounded) = match args.load()? {
        Source::Rgx(text) => {
            let g = input::rgx(&text, declared.as_ref())?;
            let w = sat_rgx(&g, &Budget::search())?;
            if let Some(w) = &w {
                let sigma: Alphabet = g.letters().union(&w.document.alphabet()).copied().collect();
                if !produces(&compile_rgx(&g, &sigma), &w.document, &w.mapping)? {
                    return Err(unverified());
                }
            }
            (w, false)
        }
        Source::Automaton(a) => {
            let w = sat_va(&a, &Budget::search())?;
            if let Some(w) = &w {
                if !produces(&a, &w.document, &w.mapping)? {
                    return Err(unverified());
                }
            }
            (w, false)
        }
        Source::Rule(text) => {
            let r = input::rule(&text, declared.as_ref())?;
            let v = sat_rule(&r)?;
            if let Some(w) = &v.witness {
                let budget = Budget::oracle().with_vars(32).with_doc_len(64);
                if !eval_rule_oracle_with(&r, &w.document, &budget)?.contains(&w.mapping) {
                    return Err(unverified());
                }
            }
            (v.witness, v.bounded)
        }
    };
    Ok(match witness {
        Some(w) => json!({ "result": "sat", "witness": witness_json(&w), "bounded": bounded }),
        None => json!({ "result": "unsat", "bounded": bounded }),
    })
}

/// A symbol outside `sigma`, preferring readable ones.
fn fresh_symbol(sigma: &Alphabet) -> char {
    ('a'..='z').chain('0'..='9').chain('\u{E000}'..='\u{F8FF}').find(|c| !sigma.contains(c)).expect("free symbol")
}

fn contains(args: &ContainsArgs) -> Result<Value, Failure> {
    let declared: Option<Alphabet> = args.alphabet.as_ref().map(|s| s.chars().collect());
    let load = |s: &str| -> Result<Source, Failure> {
        if args.inline {
            classify_source(s.to_string(), None, args.kind)
        } else {
            let p = Path::new(s);
            classify_source(std::fs::read_to_string(p)?, Some(p), args.kind)
        }
    };
    let mut parsed: Vec<Result<Va, Rgx>> = Vec::new();
    for s in [&args.left, &args.right] {
        parsed.push(match load(s)? {
            Source::Automaton(a) => Ok(a),
            Source::Rgx(text) => Err(input::rgx(&text, declared.as_ref())?),
            Source::Rule(_) => return Err(not_supported("containment of rules")),
        });
    }
    // Expressions are compiled over their letters plus one more symbol for `@`.
    let mut sigma = declared.unwrap_or_default();
    for g in parsed.iter().filter_map(|p| p.as_ref().err()) {
        sigma.extend(g.letters());
    }
    if parsed.iter().any(|p| p.as_ref().err().is_some_and(Rgx::uses_any)) {
        sigma.insert(fresh_symbol(&sigma));
    }
    let autos: Vec<Va> = parsed.into_iter().map(|p| p.unwrap_or_else(|g| compile_rgx(&g, &sigma))).collect();
    let (a1, a2) = (&autos[0], &autos[1]);
    let verdict = if args.fast {
        containment_det_seq_pd(a1, a2, &Budget::search())?
    } else {
        containment_general(a1, a2, &Budget::search())?
    };
    Ok(match verdict {
        Containment::Contained => json!({ "result": "contained", "bounded": args.fast }),
        Containment::Counterexample(w) => {
            if !produces(a1, &w.document, &w.mapping)? || produces(a2, &w.document, &w.mapping)? {
                return Err(unverified());
            }
            json!({ "result": "counterexample", "witness": witness_json(&w), "bounded": args.fast })
        }
    })
}

fn point_disjoint(source: &SourceArgs, bound: usize) -> Result<Value, Failure> {
    let declared = source.declared();
    let a = match source.load()? {
        Source::Automaton(a) => a,
        Source::Rgx(text) => {
            let g = input::rgx(&text, declared.as_ref())?;
            compile_rgx(&g, &declared.unwrap_or_else(|| g.letters()))
        }
        Source::Rule(_) => return Err(not_supported("point-disjointness of rules")),
    };
    let ok = point_disjoint_check(&a, bound)?;
    Ok(json!({ "result": if ok { "point-disjoint" } else { "not-point-disjoint" }, "bounded": true, "bound": bound }))
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Value, Failure> {
    match &args.command {
        AnalyzeCommand::Sat(s) => sat(s),
        AnalyzeCommand::Contains(c) => contains(c),
        AnalyzeCommand::PointDisjoint { source, bound } => point_disjoint(source, *bound),
    }
}

pub fn audit(args: &AuditArgs) -> Result<Value, Failure> {
    let d = input::document(&args.document)?;
    let sigma = args.source.declared().unwrap_or_else(|| d.alphabet());
    let a = match args.source.load()? {
        Source::Rgx(text) => compile_rgx(&input::rgx(&text, Some(&sigma))?, &d.alphabet()),
        Source::Automaton(a) => a,
        Source::Rule(_) => return Err(not_supported("auditing a rule")),
    };
    let r = delay_audit(&a, &d)?;
    Ok(json!({
        "variables": r.vars,
        "doc_len": r.doc_len,
        "gaps": r.gaps,
        "tail": r.tail,
        "max_gap": r.max_gap(),
        "bound": r.bound(),
        "quadratic_bound": r.quadratic_bound(),
        "within_bound": r.within(r.bound()),
        "within_quadratic_bound": r.within(r.quadratic_bound()),
    }))
}
