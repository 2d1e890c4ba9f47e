use std::collections::{BTreeMap, BTreeSet};

use spanex_core::{Budget, Var};
use spanex_rgx::Rgx;
use spanex_va::path_union;

use crate::graph::{cat, Node, RuleGraph};
use crate::{classify, eliminate_cycles, require, ExtractionRule, RuleError, RuleUnion};

/// Splits a hierarchical expression into a tree-like rule: each capture
/// becomes a mention in its parent plus a constraint, in pre-order.
fn split(r: &Rgx) -> ExtractionRule {
    fn strip(r: &Rgx, cons: &mut Vec<(Var, Rgx)>) -> Rgx {
        match r {
            Rgx::Capture(x, b) => {
                let at = cons.len();
                cons.push((x.clone(), Rgx::Eps));
                cons[at].1 = strip(b, cons);
                Rgx::mention(x.clone())
            }
            Rgx::Concat(a, b) => Rgx::concat(strip(a, cons), strip(b, cons)),
            Rgx::Disj(a, b) => Rgx::disj(strip(a, cons), strip(b, cons)),
            Rgx::Star(a) => Rgx::star(strip(a, cons)),
            Rgx::Eps | Rgx::Letter(_) | Rgx::Any => r.clone(),
        }
    }
    let mut cons = Vec::new();
    let root = strip(r, &mut cons);
    ExtractionRule::new(root, cons)
}

fn paths(g: &Rgx, budget: &Budget) -> Result<Vec<Rgx>, RuleError> {
    Ok(path_union(g, budget)?)
}

/// Union of tree-like rules with the semantics of `g`, one per path of its
/// automaton.
pub fn rgx_to_rule_union(g: &Rgx) -> Result<RuleUnion, RuleError> {
    let mut out = RuleUnion::default();
    for p in paths(g, &Budget::search())? {
        out.push(split(&p));
    }
    Ok(out)
}

/// Nests every constraint into the mention of its variable.
pub fn tree_to_rgx(rule: &ExtractionRule) -> Result<Rgx, RuleError> {
    require(classify(rule).tree_like, RuleError::NotTreeLike, rule)?;
    fn nest(rule: &ExtractionRule, r: &Rgx) -> Rgx {
        r.substitute_captures(&|x, b| {
            let inner = match rule.constraint(x) {
                Some(c) => nest(rule, c),
                None => b.clone(),
            };
            Some(Rgx::capture(x.clone(), inner))
        })
    }
    Ok(nest(rule, &rule.root))
}

/// Cartesian product of the choice lists, checked against `budget`.
fn product<T: Clone>(lists: &[Vec<T>], budget: &Budget) -> Result<Vec<Vec<T>>, RuleError> {
    let total = lists.iter().try_fold(1usize, |acc, l| acc.checked_mul(l.len())).unwrap_or(usize::MAX);
    budget.check_items(total)?;
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for l in lists {
        out = out.iter().flat_map(|pre| l.iter().map(move |x| [pre.clone(), vec![x.clone()]].concat())).collect();
    }
    Ok(out)
}

/// Union of functional dag-like rules equivalent to a simple rule: every
/// expression is split into functional disjuncts and one disjunct is chosen
/// per expression.
pub fn to_functional_union(rule: &ExtractionRule) -> Result<RuleUnion, RuleError> {
    to_functional_union_with(rule, &Budget::search())
}

pub fn to_functional_union_with(rule: &ExtractionRule, budget: &Budget) -> Result<RuleUnion, RuleError> {
    let class = classify(rule);
    require(class.simple, RuleError::NotSimple, rule)?;
    if class.functional {
        return Ok(RuleUnion(vec![eliminate_cycles(rule)?]));
    }
    let mut choices: Vec<Vec<Rgx>> = Vec::new();
    for (i, g) in rule.bodies().enumerate() {
        let mut alts: Vec<Rgx> = Vec::new();
        for p in paths(g, budget)? {
            for a in p.alternatives() {
                if !alts.contains(a) {
                    alts.push(a.clone());
                }
            }
        }
        if alts.is_empty() && i > 0 {
            // `x.x` is functional and never satisfied, like the empty body.
            alts.push(Rgx::mention(rule.constraints[i - 1].0.clone()));
        }
        choices.push(alts);
    }
    let heads: Vec<Var> = rule.constraints.iter().map(|(x, _)| x.clone()).collect();
    let mut out = RuleUnion::default();
    for pick in product(&choices, budget)? {
        let r = ExtractionRule::new(pick[0].clone(), heads.iter().cloned().zip(pick[1..].iter().cloned()).collect());
        out.push(eliminate_cycles(&r)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Item {
    Seg(Rgx),
    Open(Var),
    Close(Var),
    /// A further mention of an already expanded variable.
    Again(Var),
}

fn linearize(r: &Rgx, out: &mut Vec<Item>) {
    for f in r.factors() {
        match f {
            Rgx::Capture(x, b) => {
                out.push(Item::Open(x.clone()));
                linearize(b, out);
                out.push(Item::Close(x.clone()));
            }
            Rgx::Eps => {}
            _ => out.push(Item::Seg(f.clone())),
        }
    }
}

/// Expands the first mention of each variable by its chosen path; later
/// mentions leave an `Again` marker.
fn flatten(items: &[Item], chosen: &BTreeMap<Var, Vec<Item>>, seen: &mut BTreeSet<Var>, out: &mut Vec<Item>) {
    let mut i = 0;
    while i < items.len() {
        match &items[i] {
            Item::Open(x) => {
                let end = i + items[i..].iter().position(|it| *it == Item::Close(x.clone())).expect("closed");
                if seen.insert(x.clone()) {
                    out.push(Item::Open(x.clone()));
                    flatten(&chosen[x], chosen, seen, out);
                    out.push(Item::Close(x.clone()));
                } else {
                    out.push(Item::Again(x.clone()));
                }
                i = end + 1;
            }
            it => {
                out.push(it.clone());
                i += 1;
            }
        }
    }
}

/// Rebuilds the nested expression; `None` once a segment that must be empty
/// cannot be.
fn force_and_build(mut items: Vec<Item>) -> Option<Rgx> {
    let agains: Vec<(usize, Var)> = items
        .iter()
        .enumerate()
        .filter_map(|(i, it)| match it {
            Item::Again(x) => Some((i, x.clone())),
            _ => None,
        })
        .collect();
    for (g, x) in agains {
        let open = items.iter().position(|it| *it == Item::Open(x.clone())).expect("expanded");
        let close = items.iter().position(|it| *it == Item::Close(x.clone())).expect("expanded");
        let (lo, hi) = (open.min(g), close.max(g));
        for it in &mut items[lo..hi] {
            if let Item::Seg(s) = it {
                if !s.nullable() {
                    return None;
                }
                *it = Item::Seg(Rgx::Eps);
            }
        }
    }
    let mut stack: Vec<Rgx> = vec![Rgx::Eps];
    for it in items {
        match it {
            Item::Seg(s) => {
                let top = stack.pop().expect("frame");
                stack.push(cat(top, s));
            }
            Item::Open(_) => stack.push(Rgx::Eps),
            Item::Close(x) => {
                let body = stack.pop().expect("frame");
                let top = stack.pop().expect("frame");
                stack.push(cat(top, Rgx::capture(x, body)));
            }
            Item::Again(_) => {}
        }
    }
    stack.pop()
}

/// Union of tree-like rules equivalent to a functional dag-like rule.
///
/// For each choice of one path per reached expression, the rule is unfolded
/// from `doc` into a single nested expression. A variable mentioned twice is
/// expanded once; both mentions denote the same span, so everything between
/// them, and the variable itself, must be empty. Choices where that is
/// impossible are dropped, so an unsatisfiable rule gives the empty union.
/// Constraints on variables never reached from `doc` are irrelevant and
/// dropped.
pub fn dag_to_tree_union(rule: &ExtractionRule) -> Result<RuleUnion, RuleError> {
    dag_to_tree_union_with(rule, &Budget::search())
}

pub fn dag_to_tree_union_with(rule: &ExtractionRule, budget: &Budget) -> Result<RuleUnion, RuleError> {
    let class = classify(rule);
    require(class.functional, RuleError::NotFunctional, rule)?;
    require(class.dag_like, RuleError::NotDagLike, rule)?;
    if class.tree_like {
        return Ok(RuleUnion(vec![rule.clone()]));
    }
    let reached: Vec<Var> = RuleGraph::new(rule)
        .reachable(&Node::Doc)
        .into_iter()
        .filter_map(|n| match n {
            Node::Var(x) => Some(x),
            Node::Doc => None,
        })
        .collect();
    let to_items = |p: Rgx| {
        let mut v = Vec::new();
        linearize(&p, &mut v);
        v
    };
    let mut choices: Vec<Vec<Vec<Item>>> = vec![paths(&rule.root, budget)?.into_iter().map(to_items).collect()];
    for x in &reached {
        let body = rule.constraint(x).cloned().unwrap_or_else(Rgx::sigma_star);
        choices.push(paths(&body, budget)?.into_iter().map(to_items).collect());
    }
    let mut out = RuleUnion::default();
    for pick in product(&choices, budget)? {
        let chosen: BTreeMap<Var, Vec<Item>> = reached.iter().cloned().zip(pick[1..].iter().cloned()).collect();
        let mut flat = Vec::new();
        flatten(&pick[0], &chosen, &mut BTreeSet::new(), &mut flat);
        if let Some(r) = force_and_build(flat) {
            out.push(split(&r));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{eval_rule_oracle, parse_rule};
    use spanex_core::{Alphabet, Document, Mapping, MappingSet, Span};
    use spanex_rgx::{eval_rgx, parse_rgx};

    fn abcd() -> Alphabet {
        "abcd".chars().collect()
    }

    fn rule(s: &str) -> ExtractionRule {
        parse_rule(s, &abcd()).unwrap()
    }

    fn union_eval(u: &RuleUnion, d: &Document, keep: &BTreeSet<Var>) -> MappingSet {
        let mut out = MappingSet::new();
        for r in u.iter() {
            out.extend(eval_rule_oracle(r, d).unwrap().project(keep));
        }
        out
    }

    fn words(alpha: &str, max: usize) -> Vec<String> {
        let mut out = vec![String::new()];
        let mut layer = vec![String::new()];
        for _ in 0..max {
            layer = layer.iter().flat_map(|w| alpha.chars().map(move |c| format!("{w}{c}"))).collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    #[test]
    fn tree_to_rgx_example() {
        let r = rule("(a x b y) && x.(abc z) && y.(@*) && z.(d)");
        assert_eq!(tree_to_rgx(&r).unwrap(), parse_rgx("a x{abc z{d}} b y{@*}").unwrap());
        assert_eq!(tree_to_rgx(&rule("a b*")).unwrap(), parse_rgx("a b*").unwrap());
        assert!(matches!(tree_to_rgx(&rule("x && x.y && y.x")), Err(RuleError::NotTreeLike(_))));
    }

    #[test]
    fn rgx_to_rules_examples() {
        let u = rgx_to_rule_union(&parse_rgx("x{a}").unwrap()).unwrap();
        assert_eq!(u.0, vec![rule("doc: x && x.(a)")]);
        let g = parse_rgx("(a x{b})|(b x{a})").unwrap();
        let u = rgx_to_rule_union(&g).unwrap();
        assert_eq!(u.len(), 2);
        assert!(u.iter().all(|r| classify(r).tree_like));
        let keep = BTreeSet::from(["x".to_string()]);
        for w in ["ab", "ba", "aa", "abb"] {
            let d = Document::new(w);
            assert_eq!(union_eval(&u, &d, &keep), eval_rgx(&g, &d).unwrap(), "{w}");
        }
        assert_eq!(union_eval(&u, &Document::new("ab"), &keep).into_vec(), vec![Mapping::singleton("x", Span::new(2, 3))]);
    }

    #[test]
    fn functional_union_example() {
        let u = to_functional_union(&rule("(x|y) && x.(a|b) && y.(c)")).unwrap();
        let mut got: Vec<ExtractionRule> = u.0.clone();
        got.sort_by_key(|r| r.to_string());
        let mut want: Vec<ExtractionRule> = ["x && x.a && y.c", "x && x.b && y.c", "y && x.a && y.c", "y && x.b && y.c"]
            .iter()
            .map(|s| rule(s))
            .collect();
        want.sort_by_key(|r| r.to_string());
        assert_eq!(got, want);
        let single = to_functional_union(&rule("a x && x.(b)")).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn functional_union_keeps_semantics() {
        for s in ["(x|y) && x.(a|b) && y.(c)", "x (y|z) && x.(a* | y) && z.(c)", "(x y)|(y x) && x.(a*)"] {
            let r = rule(s);
            let u = to_functional_union(&r).unwrap();
            assert!(u.iter().all(|m| classify(m).functional && classify(m).dag_like), "{s}");
            let keep = r.vars();
            for w in words("abc", 3) {
                let d = Document::new(&w);
                assert_eq!(union_eval(&u, &d, &keep), eval_rule_oracle(&r, &d).unwrap(), "{s} on {w}");
            }
        }
    }

    #[test]
    fn dag_example_has_single_instance() {
        let r = rule("(x @* y) && x.(a z b*) && y.(b* z a) && z.(@*)");
        let u = dag_to_tree_union(&r).unwrap();
        assert!(!u.is_empty() && u.iter().all(|m| classify(m).tree_like));
        let keep = r.vars();
        let expect = Mapping::from_pairs([("x", Span::new(1, 2)), ("y", Span::new(2, 3)), ("z", Span::new(2, 2))]);
        for w in words("ab", 4) {
            let d = Document::new(&w);
            let got = union_eval(&u, &d, &keep);
            assert_eq!(got, eval_rule_oracle(&r, &d).unwrap(), "{w}");
            if w == "aa" {
                assert_eq!(got.into_vec(), vec![expect.clone()]);
            } else {
                assert!(got.is_empty(), "{w}");
            }
        }
    }

    #[test]
    fn dag_to_tree_unsatisfiable_and_tree_input() {
        assert!(dag_to_tree_union(&crate::unsatisfiable_rule()).unwrap().is_empty());
        let t = rule("(a x b y) && x.(abc z) && y.(@*) && z.(d)");
        assert_eq!(dag_to_tree_union(&t).unwrap().0, vec![t]);
        assert!(matches!(dag_to_tree_union(&rule("x && x.y && y.x")), Err(RuleError::NotDagLike(_))));
    }

    #[test]
    fn dag_to_tree_keeps_semantics() {
        for s in [
            "x y && x.(z a*) && y.(z b*)",
            "x && x.(y z) && y.(z)",
            "x && x.(y b z) && y.(a* w) && z.(w a*)",
            "x y && x.(b w) && y.(w c*)",
            "x && x.(z a) && q.(z)",
        ] {
            let r = rule(s);
            let u = dag_to_tree_union(&r).unwrap();
            assert!(u.iter().all(|m| classify(m).tree_like), "{s}");
            let keep = r.vars();
            for w in words("abc", 3) {
                let d = Document::new(&w);
                assert_eq!(union_eval(&u, &d, &keep), eval_rule_oracle(&r, &d).unwrap(), "{s} on {w}");
            }
        }
    }
}
