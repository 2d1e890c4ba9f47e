use std::collections::BTreeSet;

use spanex_core::Var;

use crate::Rgx;

/// Functional with respect to `var(γ)`.
pub fn is_functional(g: &Rgx) -> bool {
    is_functional_wrt(g, &g.vars())
}

/// Functional with respect to `xs`: every derivation uses each variable of
/// `xs` exactly once and no other variable.
pub fn is_functional_wrt(g: &Rgx, xs: &BTreeSet<Var>) -> bool {
    match g {
        Rgx::Eps | Rgx::Letter(_) | Rgx::Any => xs.is_empty(),
        Rgx::Disj(a, b) => is_functional_wrt(a, xs) && is_functional_wrt(b, xs),
        Rgx::Concat(a, b) => {
            // A functional expression uses exactly the variables it is
            // functional for, so the split of `xs` is forced.
            let left = a.vars();
            left.is_subset(xs) && is_functional_wrt(a, &left) && is_functional_wrt(b, &xs.difference(&left).cloned().collect())
        }
        Rgx::Star(a) => xs.is_empty() && !a.has_vars(),
        Rgx::Capture(x, b) => {
            if !xs.contains(x) {
                return false;
            }
            let mut rest = xs.clone();
            rest.remove(x);
            is_functional_wrt(b, &rest)
        }
    }
}

/// Concatenations are variable-disjoint, stars are variable-free and no
/// capture of `x` contains another capture of `x`.
pub fn is_sequential(g: &Rgx) -> bool {
    match g {
        Rgx::Eps | Rgx::Letter(_) | Rgx::Any => true,
        Rgx::Disj(a, b) => is_sequential(a) && is_sequential(b),
        Rgx::Concat(a, b) => is_sequential(a) && is_sequential(b) && a.vars().is_disjoint(&b.vars()),
        Rgx::Star(a) => !a.has_vars(),
        Rgx::Capture(x, b) => !b.vars().contains(x) && is_sequential(b),
    }
}

/// Every capture body is `@*`.
pub fn is_span_rgx(g: &Rgx) -> bool {
    let mut ok = true;
    g.visit(&mut |r| {
        if let Rgx::Capture(_, b) = r {
            ok &= b.is_sigma_star();
        }
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_rgx;
    use spanex_core::Alphabet;

    fn p(s: &str) -> Rgx {
        parse_rgx(s).unwrap()
    }

    #[test]
    fn functional_examples() {
        assert!(is_functional(&p("x{a*} y{b*}")));
        assert!(!is_functional(&p("x{a*}|y{b*}")));
        assert!(is_functional(&p("(a x{b})|(b x{a})")));
        assert!(!is_functional(&p("x{a*} x{b*}")));
        assert!(!is_functional(&p("x{a}*")));
        assert!(is_functional(&p("x{a y{b}} c")));
        assert!(!is_functional(&p("x{x{a}}")));
    }

    #[test]
    fn sequential_examples() {
        assert!(!is_sequential(&p("x{a*} x{b*}")));
        assert!(!is_sequential(&p("(x{(a|b)*}|y{(a|b)*})*")));
        assert!(is_sequential(&p("x{a*}|y{b*}")));
        assert!(is_sequential(&p("x{a}|x{b}")));
        assert!(!is_sequential(&p("x{x{a}}")));
    }

    #[test]
    fn span_rgx_examples() {
        let sigma: Alphabet = "ab".chars().collect();
        assert!(is_span_rgx(&crate::parse_span_rgx("a x b*", &sigma).unwrap()));
        assert!(!is_span_rgx(&p("x{abc}")));
        assert!(is_span_rgx(&p("x{@*} y{@*}")));
        assert!(is_span_rgx(&p("ab*")));
    }
}
