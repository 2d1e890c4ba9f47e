//! State elimination on the letter/ε part of an automaton.

use std::collections::{BTreeMap, BTreeSet};

use spanex_rgx::Rgx;

use crate::automaton::{Label, State, Va};

pub(crate) fn cat(a: Rgx, b: Rgx) -> Rgx {
    match (a, b) {
        (Rgx::Eps, b) => b,
        (a, Rgx::Eps) => a,
        (a, b) => Rgx::concat(a, b),
    }
}

pub(crate) fn alt(a: Rgx, b: Rgx) -> Rgx {
    if a == b {
        return a;
    }
    match (a, b) {
        (Rgx::Eps, b) if b.nullable() => b,
        (a, Rgx::Eps) if a.nullable() => a,
        (a, b) => Rgx::disj(a, b),
    }
}

pub(crate) fn star(a: Rgx) -> Rgx {
    match a {
        Rgx::Eps => Rgx::Eps,
        s @ Rgx::Star(_) => s,
        Rgx::Disj(l, r) if *l == Rgx::Eps => star(*r),
        Rgx::Disj(l, r) if *r == Rgx::Eps => star(*l),
        a => Rgx::star(a),
    }
}

const START: usize = usize::MAX - 1;
const END: usize = usize::MAX;

/// Regex for the words spelled by letter/ε paths from `src` to some state
/// of `targets`; `None` when there is no such path.
pub(crate) fn segment_regex(a: &Va, src: State, targets: &BTreeSet<State>) -> Option<Rgx> {
    let fwd = reach(a, src);
    let relevant: BTreeSet<State> = co_reach(a, targets).into_iter().filter(|q| fwd.contains(q)).collect();
    if !relevant.contains(&src) {
        return None;
    }
    let mut edges: BTreeMap<(usize, usize), Rgx> = BTreeMap::new();
    let add = |edges: &mut BTreeMap<(usize, usize), Rgx>, u: usize, v: usize, r: Rgx| {
        let merged = match edges.remove(&(u, v)) {
            Some(old) => alt(old, r),
            None => r,
        };
        edges.insert((u, v), merged);
    };
    for &q in &relevant {
        for (label, to) in a.out(q) {
            if !relevant.contains(to) {
                continue;
            }
            match label {
                Label::Letter(c) => add(&mut edges, q, *to, Rgx::Letter(*c)),
                Label::Eps => add(&mut edges, q, *to, Rgx::Eps),
                _ => {}
            }
        }
    }
    add(&mut edges, START, src, Rgx::Eps);
    for t in targets.intersection(&relevant) {
        add(&mut edges, *t, END, Rgx::Eps);
    }
    let mut remaining: BTreeSet<State> = relevant;
    while !remaining.is_empty() {
        let k = *remaining
            .iter()
            .min_by_key(|&&k| {
                let ins = edges.keys().filter(|(u, v)| *v == k && *u != k).count();
                let outs = edges.keys().filter(|(u, v)| *u == k && *v != k).count();
                (ins * outs, k)
            })
            .expect("non-empty");
        remaining.remove(&k);
        let self_loop = edges.remove(&(k, k)).map(star).unwrap_or(Rgx::Eps);
        let ins: Vec<(usize, Rgx)> = edges.iter().filter(|((_, v), _)| *v == k).map(|((u, _), r)| (*u, r.clone())).collect();
        let outs: Vec<(usize, Rgx)> = edges.iter().filter(|((u, _), _)| *u == k).map(|((_, v), r)| (*v, r.clone())).collect();
        edges.retain(|(u, v), _| *u != k && *v != k);
        for (i, rin) in &ins {
            for (j, rout) in &outs {
                let r = cat(cat(rin.clone(), self_loop.clone()), rout.clone());
                add(&mut edges, *i, *j, r);
            }
        }
    }
    edges.remove(&(START, END))
}

fn reach(a: &Va, src: State) -> BTreeSet<State> {
    let mut seen = BTreeSet::from([src]);
    let mut stack = vec![src];
    while let Some(q) = stack.pop() {
        for (label, to) in a.out(q) {
            if !label.is_op() && seen.insert(*to) {
                stack.push(*to);
            }
        }
    }
    seen
}

fn co_reach(a: &Va, targets: &BTreeSet<State>) -> BTreeSet<State> {
    let mut rev: Vec<Vec<State>> = vec![Vec::new(); a.num_states()];
    for t in a.transitions() {
        if !t.label.is_op() {
            rev[t.to].push(t.from);
        }
    }
    let mut seen = targets.clone();
    let mut stack: Vec<State> = targets.iter().copied().collect();
    while let Some(q) = stack.pop() {
        for &p in &rev[q] {
            if seen.insert(p) {
                stack.push(p);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile_rgx;
    use spanex_core::{Alphabet, Document};
    use spanex_rgx::{eval_rgx, parse_rgx};

    fn same_language(g: &Rgx, h: &Rgx) {
        for n in 0..=4 {
            for bits in 0..(1u32 << n) {
                let w: String = (0..n).map(|i| if bits >> i & 1 == 1 { 'b' } else { 'a' }).collect();
                let d = Document::new(&w);
                assert_eq!(eval_rgx(g, &d).unwrap().is_empty(), eval_rgx(h, &d).unwrap().is_empty(), "{g} vs {h} on {w}");
            }
        }
    }

    #[test]
    fn recovers_regular_languages() {
        for s in ["a", "()", "a*", "(ab|b)*a", "(a|b)*b(a|b)", "a*b*|b*a*", "((a|()) b)*"] {
            let g = parse_rgx(s).unwrap();
            let a = compile_rgx(&g, &Alphabet::new());
            let r = segment_regex(&a, a.initial(), a.finals()).unwrap();
            same_language(&g, &r);
        }
    }

    #[test]
    fn unreachable_is_none() {
        let mut a = Va::with_states(2);
        a.set_final(1);
        assert_eq!(segment_regex(&a, 0, a.finals()), None);
        a.add_transition(0, Label::Open("x".into()), 1);
        assert_eq!(segment_regex(&a, 0, a.finals()), None);
    }

    #[test]
    fn simplifications() {
        assert_eq!(cat(Rgx::Eps, Rgx::Letter('a')), Rgx::Letter('a'));
        assert_eq!(alt(Rgx::Letter('a'), Rgx::Letter('a')), Rgx::Letter('a'));
        assert_eq!(star(Rgx::disj(Rgx::Eps, Rgx::Letter('a'))), Rgx::star(Rgx::Letter('a')));
        assert_eq!(star(Rgx::Eps), Rgx::Eps);
    }
}
