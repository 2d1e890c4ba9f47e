use std::collections::{BTreeSet, HashMap};

use spanex_core::{is_hierarchical, Binding, Document, ExtendedMapping, Mapping, Span, Var};
use spanex_rgx::Rgx;

use crate::{classify, require, tree_to_rgx, ExtractionRule, RuleError};

struct Matcher<'a> {
    d: &'a Document,
    mu: &'a ExtendedMapping,
    pinned: BTreeSet<Var>,
    vars: HashMap<*const Rgx, BTreeSet<Var>>,
    memo: HashMap<(*const Rgx, usize, usize), bool>,
}

impl<'a> Matcher<'a> {
    fn vars(&mut self, r: &Rgx) -> &BTreeSet<Var> {
        self.vars.entry(r as *const Rgx).or_insert_with(|| r.vars())
    }

    /// Taking `chosen` must not lose a variable bound to a span.
    fn may_take(&mut self, chosen: &Rgx, other: &Rgx) -> bool {
        let c = self.vars(chosen).clone();
        let o = self.vars(other).clone();
        o.difference(&c).all(|x| !self.pinned.contains(x))
    }

    fn m(&mut self, r: &Rgx, i: usize, j: usize) -> bool {
        let key = (r as *const Rgx, i, j);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = match r {
            Rgx::Eps => i == j,
            Rgx::Letter(c) => j == i + 1 && self.d.symbol(i) == Some(*c),
            Rgx::Any => j == i + 1,
            Rgx::Concat(a, b) => (i..=j).any(|k| self.m(a, i, k) && self.m(b, k, j)),
            Rgx::Disj(a, b) => (self.may_take(a, b) && self.m(a, i, j)) || (self.may_take(b, a) && self.m(b, i, j)),
            Rgx::Star(a) => i == j || (i + 1..=j).any(|k| self.m(a, i, k) && self.m(r, k, j)),
            Rgx::Capture(x, b) => match self.mu.get(x) {
                Some(Binding::Bottom) => false,
                Some(Binding::Span(s)) => s == Span::new(i, j) && self.m(b, i, j),
                None => self.m(b, i, j),
            },
        };
        self.memo.insert(key, v);
        v
    }
}

fn check_fragment(rule: &ExtractionRule) -> Result<(), RuleError> {
    let class = classify(rule);
    require(class.tree_like, RuleError::NotTreeLike, rule)?;
    require(class.sequential, RuleError::NotSequential, rule)
}

/// Whether some output of a sequential tree-like rule extends `mu`.
///
/// The rule is nested into a single sequential expression and matched by
/// interval splitting, memoized on (subexpression, interval).
pub fn eval_tree_rule(rule: &ExtractionRule, d: &Document, mu: &ExtendedMapping) -> Result<bool, RuleError> {
    check_fragment(rule)?;
    mu.check(d)?;
    let g = tree_to_rgx(rule)?;
    Ok(eval_nested(&g, d, mu))
}

fn eval_nested(g: &Rgx, d: &Document, mu: &ExtendedMapping) -> bool {
    let all = g.vars();
    let spans: Vec<(&Var, Span)> = mu.bound().collect();
    if spans.iter().any(|(x, _)| !all.contains(*x)) {
        return false;
    }
    let bound = Mapping::from_pairs(spans.iter().map(|(x, s)| ((*x).clone(), *s)));
    if !is_hierarchical(&bound) {
        return false;
    }
    // Equal non-empty spans need one variable nested in the other.
    for (a, (x, s)) in spans.iter().enumerate() {
        for (y, t) in &spans[a + 1..] {
            if s == t && !s.is_empty() && !nested(g, x, y) && !nested(g, y, x) {
                return false;
            }
        }
    }
    let mut m = Matcher {
        d,
        mu,
        pinned: spans.iter().map(|(x, _)| (*x).clone()).collect(),
        vars: HashMap::new(),
        memo: HashMap::new(),
    };
    m.m(g, 1, d.len() + 1)
}

/// Whether a capture of `inner` occurs inside a capture of `outer`.
fn nested(g: &Rgx, outer: &str, inner: &str) -> bool {
    let mut found = false;
    g.visit(&mut |r| {
        if let Rgx::Capture(x, b) = r {
            found |= x == outer && b.vars().contains(inner);
        }
    });
    found
}

/// Outputs of a sequential tree-like rule, by branching on one variable at
/// a time (spans in order, then `⊥`) and pruning with [`eval_tree_rule`].
pub fn enumerate_tree_rule(rule: &ExtractionRule, d: &Document) -> Result<Vec<Mapping>, RuleError> {
    check_fragment(rule)?;
    let g = tree_to_rgx(rule)?;
    let vars: Vec<Var> = g.vars().into_iter().collect();
    let mut out = Vec::new();
    let mut mu = ExtendedMapping::new();
    if eval_nested(&g, d, &mu) {
        branch(&g, d, &vars, &mut mu, &mut out);
    }
    Ok(out)
}

fn branch(g: &Rgx, d: &Document, vars: &[Var], mu: &mut ExtendedMapping, out: &mut Vec<Mapping>) {
    let Some((x, rest)) = vars.split_first() else {
        out.push(mu.to_mapping());
        return;
    };
    for b in d.spans().map(Binding::Span).chain([Binding::Bottom]) {
        mu.set(x.clone(), b);
        if eval_nested(g, d, mu) {
            branch(g, d, rest, mu, out);
        }
    }
    mu.remove(x);
}

/// A document and mapping produced by a sequential tree-like rule: the
/// nested expression read in pre-order, taking the left side of each
/// disjunction, skipping stars and reading `@` as the smallest letter of the
/// rule (`a` when there is none).
pub fn tree_rule_witness(rule: &ExtractionRule) -> Result<(Document, Mapping), RuleError> {
    check_fragment(rule)?;
    let g = tree_to_rgx(rule)?;
    let any = rule.letters().into_iter().next().unwrap_or('a');
    let mut text = Vec::new();
    let mut mu = Mapping::new();
    fn walk(r: &Rgx, any: char, text: &mut Vec<char>, mu: &mut Mapping) {
        match r {
            Rgx::Eps | Rgx::Star(_) => {}
            Rgx::Letter(c) => text.push(*c),
            Rgx::Any => text.push(any),
            Rgx::Concat(a, b) => {
                walk(a, any, text, mu);
                walk(b, any, text, mu);
            }
            Rgx::Disj(a, _) => walk(a, any, text, mu),
            Rgx::Capture(x, b) => {
                let start = text.len() + 1;
                walk(b, any, text, mu);
                mu.insert(x.clone(), Span::new(start, text.len() + 1));
            }
        }
    }
    walk(&g, any, &mut text, &mut mu);
    Ok((Document::from_symbols(text), mu))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::{eval_rule_oracle, parse_rule};

    fn rule(s: &str) -> ExtractionRule {
        parse_rule(s, &"abcd".chars().collect()).unwrap()
    }

    #[test]
    fn intersection_idiom() {
        let r = rule("doc: @* x @* && x.(ab)");
        let d = Document::new("cabc");
        let mu = ExtendedMapping::new().with("x", Binding::Span(Span::new(2, 4)));
        assert!(eval_tree_rule(&r, &d, &mu).unwrap());
        let mu = ExtendedMapping::new().with("x", Binding::Span(Span::new(1, 3)));
        assert!(!eval_tree_rule(&r, &d, &mu).unwrap());
        assert!(eval_tree_rule(&r, &d, &ExtendedMapping::new()).unwrap());
        assert!(!eval_tree_rule(&r, &d, &ExtendedMapping::new().with("x", Binding::Bottom)).unwrap());
    }

    #[test]
    fn unrelated_equal_spans_fail_fast() {
        let r = rule("x y && x.(@*) && y.(@*)");
        let d = Document::new("ab");
        let s = Binding::Span(Span::new(1, 2));
        assert!(!eval_tree_rule(&r, &d, &ExtendedMapping::new().with("x", s).with("y", s)).unwrap());
    }

    #[test]
    fn enumeration_matches_oracle() {
        for s in ["(a x b y) && x.(abc z) && y.(@*) && z.(d)", "x (y|c) && x.(a*)", "@* x @* && x.(a y | b) && y.(b*)"] {
            let r = rule(s);
            for w in ["", "a", "ab", "abc", "aabcdb", "aab", "bab"] {
                let d = Document::new(w);
                let mut got = enumerate_tree_rule(&r, &d).unwrap();
                got.sort();
                assert_eq!(got, eval_rule_oracle(&r, &d).unwrap().into_vec(), "{s} on {w}");
            }
        }
    }

    #[test]
    fn witness_examples() {
        let (d, mu) = tree_rule_witness(&rule("(a x b y) && x.(abc z) && y.(@*) && z.(d)")).unwrap();
        assert_eq!(d.symbols().iter().collect::<String>(), "aabcdb");
        let expect = Mapping::from_pairs([("x", Span::new(2, 6)), ("z", Span::new(5, 6)), ("y", Span::new(7, 7))]);
        assert_eq!(mu, expect);
        let (d, mu) = tree_rule_witness(&rule("a")).unwrap();
        assert_eq!((d.len(), mu.len()), (1, 0));
        let (d, _) = tree_rule_witness(&rule("(ab)*")).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn fragment_errors() {
        let d = Document::new("");
        let e = ExtendedMapping::new();
        assert!(matches!(eval_tree_rule(&rule("x && x.y && y.x"), &d, &e), Err(RuleError::NotTreeLike(_))));
        assert!(matches!(eval_tree_rule(&rule("x* && x.(a)"), &d, &e), Err(RuleError::NotSequential(_))));
    }
}
