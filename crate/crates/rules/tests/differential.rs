use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use spanex_core::{Binding, Document, ExtendedMapping, MappingSet, Var};
use spanex_rgx::gen::{random_rgx, random_sequential, GenConfig};
use spanex_rgx::{eval_rgx, is_functional, Rgx};
use spanex_rules::{
    classify, dag_to_tree_union, eliminate_cycles, enumerate_tree_rule, eval_rule_oracle, eval_tree_rule,
    rgx_to_rule_union, to_functional_union, tree_rule_witness, tree_to_rgx, ExtractionRule, RuleUnion,
};

const VARS: [&str; 3] = ["x", "y", "z"];

fn docs(max: usize) -> Vec<Document> {
    let mut out = Vec::new();
    for n in 0..=max {
        for bits in 0..(1u32 << n) {
            out.push(Document::from_symbols((0..n).map(|i| if bits >> i & 1 == 1 { 'b' } else { 'a' }).collect()));
        }
    }
    out
}

fn var_free<R: Rng>(rng: &mut R, depth: usize) -> Rgx {
    match if depth == 0 { rng.gen_range(0..4) } else { rng.gen_range(0..7) } {
        0 => Rgx::Eps,
        1 => Rgx::Letter('a'),
        2 => Rgx::Letter('b'),
        3 => Rgx::Any,
        4 => Rgx::concat(var_free(rng, depth - 1), var_free(rng, depth - 1)),
        5 => Rgx::disj(var_free(rng, depth - 1), var_free(rng, depth - 1)),
        _ => Rgx::star(var_free(rng, depth - 1)),
    }
}

/// A functional spanRGX mentioning exactly `vars`.
fn functional<R: Rng>(rng: &mut R, vars: &[Var], depth: usize) -> Rgx {
    match vars.len() {
        0 => var_free(rng, depth.min(2)),
        1 if depth == 0 || rng.gen_bool(0.4) => {
            let m = Rgx::mention(vars[0].clone());
            match rng.gen_range(0..3) {
                0 => m,
                1 => Rgx::concat(var_free(rng, 1), m),
                _ => Rgx::concat(m, var_free(rng, 1)),
            }
        }
        _ if depth > 0 && rng.gen_bool(0.25) => {
            Rgx::disj(functional(rng, vars, depth - 1), functional(rng, vars, depth - 1))
        }
        _ => {
            let cut = rng.gen_range(0..=vars.len());
            let (l, r) = vars.split_at(cut);
            let d = depth.saturating_sub(1);
            Rgx::concat(functional(rng, l, d), functional(rng, r, d))
        }
    }
}

fn subset<R: Rng>(rng: &mut R) -> Vec<Var> {
    VARS.iter().filter(|_| rng.gen_bool(0.4)).map(|v| v.to_string()).collect()
}

/// A simple functional rule over x, y, z, possibly cyclic.
fn functional_rule(seed: u64) -> ExtractionRule {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut root_vars = subset(&mut rng);
    if root_vars.is_empty() {
        root_vars.push("x".into());
    }
    let root = functional(&mut rng, &root_vars, 2);
    let mut cons = Vec::new();
    for x in VARS {
        if rng.gen_bool(0.7) {
            let vs: Vec<Var> = subset(&mut rng).into_iter().filter(|v| v != x || rng.gen_bool(0.3)).collect();
            cons.push((x.to_string(), functional(&mut rng, &vs, 2)));
        }
    }
    ExtractionRule::new(root, cons)
}

/// A simple rule whose bodies are arbitrary spanRGX.
fn general_rule(seed: u64) -> ExtractionRule {
    let mut rng = StdRng::seed_from_u64(seed);
    let atom = |rng: &mut StdRng| -> Rgx {
        match rng.gen_range(0..4) {
            0 => Rgx::mention(VARS[rng.gen_range(0..2)]),
            _ => var_free(rng, 1),
        }
    };
    let body = |rng: &mut StdRng| -> Rgx {
        let a = atom(rng);
        let b = atom(rng);
        if rng.gen_bool(0.5) {
            Rgx::disj(a, b)
        } else {
            Rgx::concat(a, b)
        }
    };
    let root = body(&mut rng);
    let mut cons = Vec::new();
    for x in ["x", "y"] {
        if rng.gen_bool(0.7) {
            cons.push((x.to_string(), body(&mut rng)));
        }
    }
    ExtractionRule::new(root, cons)
}

fn union_eval(u: &RuleUnion, d: &Document, keep: &BTreeSet<Var>) -> MappingSet {
    let mut out = MappingSet::new();
    for r in u.iter() {
        out.extend(eval_rule_oracle(r, d).unwrap().project(keep));
    }
    out
}

fn tree_rules(seed: u64) -> Vec<ExtractionRule> {
    let cfg = GenConfig::new(&VARS, "ab", 3);
    let g = random_sequential(&mut StdRng::seed_from_u64(seed), &cfg);
    rgx_to_rule_union(&g).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cycle_elimination_is_dag_like_and_equivalent(seed in any::<u64>()) {
        let r = functional_rule(seed);
        prop_assume!(r.bodies().all(is_functional));
        let out = eliminate_cycles(&r).unwrap();
        prop_assert!(classify(&out).dag_like, "{} → {}", r, out);
        let keep = r.vars();
        for d in docs(4) {
            let want = eval_rule_oracle(&r, &d).unwrap();
            let got = eval_rule_oracle(&out, &d).unwrap().project(&keep);
            prop_assert_eq!(got, want, "{} → {} on {:?}", r, out, d);
        }
    }

    #[test]
    fn functional_union_is_equivalent(seed in any::<u64>()) {
        let r = general_rule(seed);
        prop_assume!(r.is_simple());
        let u = to_functional_union(&r).unwrap();
        for m in u.iter() {
            let c = classify(m);
            prop_assert!(c.functional && c.dag_like, "{}", m);
        }
        let keep = r.vars();
        for d in docs(3) {
            prop_assert_eq!(union_eval(&u, &d, &keep), eval_rule_oracle(&r, &d).unwrap(), "{} on {:?}", r, d);
        }
    }

    #[test]
    fn dag_to_tree_is_equivalent(seed in any::<u64>()) {
        let r = eliminate_cycles(&functional_rule(seed)).unwrap();
        let u = dag_to_tree_union(&r).unwrap();
        prop_assert!(u.iter().all(|m| classify(m).tree_like));
        let keep = r.vars();
        for d in docs(3) {
            prop_assert_eq!(union_eval(&u, &d, &keep), eval_rule_oracle(&r, &d).unwrap(), "{} on {:?}", r, d);
        }
    }

    #[test]
    fn rgx_and_tree_rules_round_trip(seed in any::<u64>()) {
        let cfg = GenConfig::new(&VARS, "ab", 3);
        let g = random_rgx(&mut StdRng::seed_from_u64(seed), &cfg);
        let u = rgx_to_rule_union(&g).unwrap();
        let keep = g.vars();
        for d in docs(3) {
            prop_assert_eq!(union_eval(&u, &d, &keep), eval_rgx(&g, &d).unwrap(), "{} on {:?}", g, d);
            for m in u.iter() {
                prop_assert!(classify(m).tree_like);
                let back = tree_to_rgx(m).unwrap();
                prop_assert_eq!(eval_rgx(&back, &d).unwrap(), eval_rule_oracle(m, &d).unwrap());
            }
        }
    }

    #[test]
    fn tree_rule_witness_is_accepted(seed in any::<u64>()) {
        for r in tree_rules(seed) {
            let (d, mu) = tree_rule_witness(&r).unwrap();
            prop_assert!(eval_rule_oracle(&r, &d).unwrap().contains(&mu), "{} {:?} {:?}", r, d, mu);
        }
    }

    #[test]
    fn tree_evaluation_matches_oracle(seed in any::<u64>(), picks in proptest::collection::vec(any::<u16>(), 3)) {
        for r in tree_rules(seed) {
            for d in docs(3) {
                let want = eval_rule_oracle(&r, &d).unwrap();
                let mut got = enumerate_tree_rule(&r, &d).unwrap();
                got.sort();
                prop_assert_eq!(&got, &want.clone().into_vec());
                let spans: Vec<Binding> = d.spans().map(Binding::Span).chain([Binding::Bottom]).collect();
                let mut mu = ExtendedMapping::new();
                for (x, p) in VARS.iter().zip(&picks) {
                    if p % 3 != 0 {
                        mu.set(*x, spans[*p as usize % spans.len()]);
                    }
                }
                let expect = want.iter().any(|m| mu.is_extended_by(m));
                prop_assert_eq!(eval_tree_rule(&r, &d, &mu).unwrap(), expect, "{} {:?} {:?}", r, d, mu);
            }
        }
    }
}
