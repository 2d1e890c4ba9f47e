use std::collections::BTreeSet;

use spanex_core::{Budget, Document, Mapping, MappingSet, Var};
use spanex_rgx::{dot_semantics, eval_rgx_with};

use crate::{ExtractionRule, RuleError};

/// Instantiated variables of a tuple `(μ0, …, μm)`: the least set holding
/// `dom(μ0)` and `dom(μi)` for every instantiated head `xi`.
pub fn ivar(rule: &ExtractionRule, tuple: &[Mapping]) -> BTreeSet<Var> {
    let mut out: BTreeSet<Var> = tuple.first().map(Mapping::dom).unwrap_or_default();
    loop {
        let before = out.len();
        for (i, (x, _)) in rule.constraints.iter().enumerate() {
            if out.contains(x) {
                if let Some(m) = tuple.get(i + 1) {
                    out.extend(m.dom());
                }
            }
        }
        if out.len() == before {
            return out;
        }
    }
}

/// Brute-force rule semantics: every consistent choice of `μ0` and of `μi`
/// for the instantiated constraints, joined into one mapping.
pub fn eval_rule_oracle(rule: &ExtractionRule, d: &Document) -> Result<MappingSet, RuleError> {
    eval_rule_oracle_with(rule, d, &Budget::oracle())
}

pub fn eval_rule_oracle_with(rule: &ExtractionRule, d: &Document, budget: &Budget) -> Result<MappingSet, RuleError> {
    budget.check_doc(d.len())?;
    let roots = eval_rgx_with(&rule.root, d, budget)?;
    let dots: Vec<MappingSet> = rule
        .constraints
        .iter()
        .map(|(x, b)| dot_semantics(x, b, d, budget))
        .collect::<Result<_, _>>()?;
    let mut out = MappingSet::new();
    for m0 in roots.iter() {
        search(rule, &dots, m0.clone(), &mut vec![false; rule.constraints.len()], &mut out);
        budget.check_items(out.len())?;
    }
    Ok(out)
}

/// Decides the lowest-indexed instantiated constraint not yet decided; when
/// none is left the remaining members stay empty.
fn search(
    rule: &ExtractionRule,
    dots: &[MappingSet],
    acc: Mapping,
    decided: &mut [bool],
    out: &mut MappingSet,
) {
    let next = rule.constraints.iter().enumerate().position(|(i, (x, _))| !decided[i] && acc.contains_var(x));
    let Some(i) = next else {
        out.insert(acc);
        return;
    };
    decided[i] = true;
    for m in dots[i].iter() {
        if acc.compatible(m) {
            let mut joined = acc.clone();
            for (y, s) in m.iter() {
                joined.insert(y.clone(), *s);
            }
            search(rule, dots, joined, decided, out);
        }
    }
    decided[i] = false;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_rule;
    use spanex_core::{is_hierarchical, Alphabet, Span};

    fn rule(s: &str) -> ExtractionRule {
        parse_rule(s, &"abcd".chars().collect::<Alphabet>()).unwrap()
    }

    #[test]
    fn ivar_examples() {
        let r = rule("(x|y) && x.(ab*) && y.(ba*)");
        let t = [Mapping::singleton("x", Span::new(1, 3)), Mapping::new(), Mapping::new()];
        assert_eq!(ivar(&r, &t), BTreeSet::from(["x".to_string()]));
        assert!(ivar(&r, &[Mapping::new(), Mapping::new(), Mapping::new()]).is_empty());
        let chain = rule("x && x.y && y.z");
        let s = Span::new(1, 1);
        let t = [Mapping::singleton("x", s), Mapping::singleton("y", s), Mapping::singleton("z", s)];
        assert_eq!(ivar(&chain, &t).len(), 3);
    }

    #[test]
    fn disjunctive_root() {
        let out = eval_rule_oracle(&rule("(x|y) && x.(ab*) && y.(ba*)"), &Document::new("ab")).unwrap();
        assert_eq!(out.into_vec(), vec![Mapping::singleton("x", Span::new(1, 3))]);
    }

    #[test]
    fn conjunction_yields_overlap() {
        let out = eval_rule_oracle(&rule("x && x.(a y a a) && x.(a a z a)"), &Document::new("aaaaa")).unwrap();
        let m = Mapping::from_pairs([("x", Span::new(1, 6)), ("y", Span::new(2, 4)), ("z", Span::new(3, 5))]);
        assert!(out.contains(&m));
        assert!(!is_hierarchical(&m));
    }

    #[test]
    fn trivial_root() {
        assert_eq!(eval_rule_oracle(&rule("()"), &Document::new("")).unwrap(), MappingSet::unit());
        assert!(eval_rule_oracle(&rule("()"), &Document::new("a")).unwrap().is_empty());
    }
}
