use proptest::prelude::*;

use spanex_core::{is_hierarchical, Alphabet, Document};
use spanex_rgx::{eval_rgx, is_functional, is_sequential, pair_semantics, parse_rgx, parse_span_rgx, Rgx};

fn arb_rgx() -> impl Strategy<Value = Rgx> {
    let leaf = prop_oneof![
        Just(Rgx::Eps),
        Just(Rgx::Any),
        prop::sample::select(vec!['a', 'b', ' ', '(', '#', '\n', '1']).prop_map(Rgx::Letter),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Rgx::concat(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Rgx::disj(a, b)),
            inner.clone().prop_map(Rgx::star),
            (prop::sample::select(vec!["x", "y", "z1", "_w"]), inner).prop_map(|(x, b)| Rgx::capture(x, b)),
        ]
    })
}

fn arb_small_rgx() -> impl Strategy<Value = Rgx> {
    let leaf = prop_oneof![Just(Rgx::Eps), Just(Rgx::Letter('a')), Just(Rgx::Letter('b'))];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Rgx::concat(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Rgx::disj(a, b)),
            inner.clone().prop_map(Rgx::star),
            (prop::sample::select(vec!["x", "y", "z"]), inner).prop_map(|(x, b)| Rgx::capture(x, b)),
        ]
    })
}

fn arb_doc() -> impl Strategy<Value = Document> {
    prop::collection::vec(prop::sample::select(vec!['a', 'b']), 0..=4).prop_map(Document::from_symbols)
}

proptest! {
    #[test]
    fn print_parse_roundtrip(g in arb_rgx()) {
        let text = g.to_string();
        prop_assert_eq!(parse_rgx(&text).unwrap(), g);
    }

    #[test]
    fn span_print_parse_roundtrip(g in arb_rgx()) {
        let sigma: Alphabet = "ab1 (#\n".chars().collect();
        let text = g.to_span_string(&sigma);
        prop_assert_eq!(parse_span_rgx(&text, &sigma).unwrap(), g);
    }

    #[test]
    fn pairs_are_well_formed(g in arb_small_rgx(), d in arb_doc()) {
        let vars = g.vars();
        for (s, m) in pair_semantics(&g, &d).unwrap() {
            prop_assert!(d.is_valid(s));
            for (x, t) in m.iter() {
                prop_assert!(vars.contains(x));
                prop_assert!(s.contains(*t));
            }
        }
    }

    #[test]
    fn outputs_are_hierarchical(g in arb_small_rgx(), d in arb_doc()) {
        for m in eval_rgx(&g, &d).unwrap() {
            prop_assert!(is_hierarchical(&m));
        }
    }

    #[test]
    fn functional_binds_everything(g in arb_small_rgx(), d in arb_doc()) {
        if is_functional(&g) {
            prop_assert!(is_sequential(&g));
            for m in eval_rgx(&g, &d).unwrap() {
                prop_assert_eq!(m.dom(), g.vars());
            }
        }
    }
}
