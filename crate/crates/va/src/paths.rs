//! Path decomposition and the translation back to RGX.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use spanex_core::{Alphabet, Budget, Var};
use spanex_rgx::Rgx;

use crate::automaton::{Label, State, Va};
use crate::compile::compile_rgx;
use crate::elim::{cat, segment_regex};
use crate::runs::Policy;
use crate::VaError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Open(Var),
    Close(Var),
}

impl Op {
    pub fn var(&self) -> &Var {
        match self {
            Op::Open(x) | Op::Close(x) => x,
        }
    }

    pub fn label(&self) -> Label {
        match self {
            Op::Open(x) => Label::Open(x.clone()),
            Op::Close(x) => Label::Close(x.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathItem {
    /// Letters only.
    Segment(Rgx),
    Op(Op),
}

/// A single path: segments separated by variable operations, each
/// variable opened at most once and closed exactly once after its open.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub items: Vec<PathItem>,
}

impl Path {
    pub fn ops(&self) -> impl Iterator<Item = &Op> {
        self.items.iter().filter_map(|i| match i {
            PathItem::Op(op) => Some(op),
            PathItem::Segment(_) => None,
        })
    }

    /// Linear automaton for the path.
    pub fn to_va(&self, sigma: &Alphabet) -> Va {
        let mut a = Va::new();
        let mut cur = 0;
        for item in &self.items {
            match item {
                PathItem::Segment(r) => {
                    let f = compile_rgx(r, sigma);
                    let off = a.embed(&f);
                    a.add_transition(cur, Label::Eps, off + f.initial());
                    let next = a.add_state();
                    for &q in f.finals() {
                        a.add_transition(off + q, Label::Eps, next);
                    }
                    cur = next;
                }
                PathItem::Op(op) => {
                    let next = a.add_state();
                    a.add_transition(cur, op.label(), next);
                    cur = next;
                }
            }
        }
        a.set_final(cur);
        a
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match item {
                PathItem::Segment(r) => write!(f, "[{r}]")?,
                PathItem::Op(Op::Open(x)) => write!(f, "⊢{x}")?,
                PathItem::Op(Op::Close(x)) => write!(f, "⊣{x}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum St {
    Avail,
    Open,
    Closed,
}

/// Splits `⟦A⟧` into a union of sequential paths.
///
/// Key nodes are the initial state and the targets of operation
/// transitions; letter segments between them come from state elimination.
/// Opens that are never closed are dropped from the emitted paths.
pub fn decompose_paths(a: &Va, policy: Policy, budget: &Budget) -> Result<Vec<Path>, VaError> {
    let vars: Vec<Var> = a.mentioned_vars().into_iter().collect();
    budget.check_vars(vars.len())?;
    let op_edges: Vec<(State, Op, State)> = a
        .transitions()
        .filter_map(|t| match t.label {
            Label::Open(x) => Some((t.from, Op::Open(x), t.to)),
            Label::Close(x) => Some((t.from, Op::Close(x), t.to)),
            _ => None,
        })
        .collect();
    let mut search = Search {
        a,
        policy,
        budget,
        vars: &vars,
        op_edges: &op_edges,
        seg_cache: BTreeMap::new(),
        final_cache: BTreeMap::new(),
        out: BTreeSet::new(),
        steps: 0,
    };
    let mut status = vec![St::Avail; vars.len()];
    let mut stack = Vec::new();
    let mut items = Vec::new();
    search.dfs(a.initial(), &mut status, &mut stack, &mut items)?;
    Ok(search.out.into_iter().collect())
}

struct Search<'a> {
    a: &'a Va,
    policy: Policy,
    budget: &'a Budget,
    vars: &'a [Var],
    op_edges: &'a [(State, Op, State)],
    seg_cache: BTreeMap<(State, State), Option<Rgx>>,
    final_cache: BTreeMap<State, Option<Rgx>>,
    out: BTreeSet<Path>,
    steps: usize,
}

impl Search<'_> {
    fn seg(&mut self, u: State, p: State) -> Option<Rgx> {
        let a = self.a;
        self.seg_cache.entry((u, p)).or_insert_with(|| segment_regex(a, u, &BTreeSet::from([p]))).clone()
    }

    fn seg_final(&mut self, u: State) -> Option<Rgx> {
        let a = self.a;
        self.final_cache.entry(u).or_insert_with(|| segment_regex(a, u, a.finals())).clone()
    }

    fn dfs(&mut self, u: State, status: &mut [St], stack: &mut Vec<usize>, items: &mut Vec<PathItem>) -> Result<(), VaError> {
        self.steps += 1;
        self.budget.check_items(self.steps + self.out.len())?;
        if let Some(r) = self.seg_final(u) {
            let mut full = items.clone();
            full.push(PathItem::Segment(r));
            self.out.insert(drop_unclosed(full, status, self.vars));
        }
        for k in 0..self.op_edges.len() {
            let (p, op, v) = &self.op_edges[k];
            let i = self.vars.binary_search(op.var()).expect("indexed");
            let ok = match op {
                Op::Open(_) => status[i] == St::Avail,
                Op::Close(_) => {
                    status[i] == St::Open && (self.policy == Policy::Set || stack.last() == Some(&i))
                }
            };
            if !ok {
                continue;
            }
            let Some(r) = self.seg(u, *p) else { continue };
            let (op, v) = (op.clone(), *v);
            let saved = status[i];
            match op {
                Op::Open(_) => {
                    status[i] = St::Open;
                    if self.policy == Policy::Stack {
                        stack.push(i);
                    }
                }
                Op::Close(_) => {
                    status[i] = St::Closed;
                    if self.policy == Policy::Stack {
                        stack.pop();
                    }
                }
            }
            items.push(PathItem::Segment(r));
            items.push(PathItem::Op(op.clone()));
            self.dfs(v, status, stack, items)?;
            items.pop();
            items.pop();
            status[i] = saved;
            match op {
                Op::Open(_) if self.policy == Policy::Stack => {
                    stack.pop();
                }
                Op::Close(_) if self.policy == Policy::Stack => stack.push(i),
                _ => {}
            }
        }
        Ok(())
    }
}

/// Removes opens of variables still open at the end and merges the
/// segments around them.
fn drop_unclosed(items: Vec<PathItem>, status: &[St], vars: &[Var]) -> Path {
    let mut out: Vec<PathItem> = Vec::new();
    for item in items {
        match item {
            PathItem::Op(Op::Open(x)) if status[vars.binary_search(&x).expect("indexed")] == St::Open => {}
            PathItem::Segment(r) => match out.last_mut() {
                Some(PathItem::Segment(prev)) => {
                    let p = std::mem::replace(prev, Rgx::Eps);
                    *prev = cat(p, r);
                }
                _ => out.push(PathItem::Segment(r)),
            },
            op => out.push(op),
        }
    }
    Path { items: out }
}

/// Converts one path to an RGX. Operations separated only by empty
/// segments happen at the same position and may be reordered to nest.
pub fn path_to_rgx(path: &Path) -> Result<Rgx, VaError> {
    let items = normalize_blocks(path);
    let mut frames: Vec<(Option<Var>, Vec<Rgx>)> = vec![(None, Vec::new())];
    for item in items {
        match item {
            PathItem::Segment(r) => frames.last_mut().expect("root frame").1.push(r),
            PathItem::Op(Op::Open(x)) => frames.push((Some(x), Vec::new())),
            PathItem::Op(Op::Close(x)) => {
                let (top, body) = frames.pop().expect("frame");
                if top.as_ref() != Some(&x) || frames.is_empty() {
                    return Err(VaError::NonHierarchical(format!("{path}")));
                }
                let r = Rgx::capture(x, concat_parts(body));
                frames.last_mut().expect("parent").1.push(r);
            }
        }
    }
    if frames.len() != 1 {
        return Err(VaError::NonHierarchical(format!("{path}")));
    }
    Ok(concat_parts(frames.pop().expect("root").1))
}

fn concat_parts(parts: Vec<Rgx>) -> Rgx {
    parts.into_iter().filter(|r| *r != Rgx::Eps).reduce(Rgx::concat).unwrap_or(Rgx::Eps)
}

fn normalize_blocks(path: &Path) -> Vec<PathItem> {
    let mut close_at: BTreeMap<&Var, usize> = BTreeMap::new();
    for (i, item) in path.items.iter().enumerate() {
        if let PathItem::Op(Op::Close(x)) = item {
            close_at.insert(x, i);
        }
    }
    let mut out = Vec::new();
    let mut block: Vec<&Op> = Vec::new();
    // Variables open in the output so far, innermost last.
    let mut stack: Vec<&Var> = Vec::new();
    for item in &path.items {
        match item {
            PathItem::Op(op) => block.push(op),
            PathItem::Segment(r) if r.only_empty() && !block.is_empty() => {}
            PathItem::Segment(r) => {
                flush(&mut block, &mut stack, &close_at, &mut out);
                out.push(PathItem::Segment(r.clone()));
            }
        }
    }
    flush(&mut block, &mut stack, &close_at, &mut out);
    out
}

fn flush<'p>(block: &mut Vec<&'p Op>, stack: &mut Vec<&'p Var>, close_at: &BTreeMap<&Var, usize>, out: &mut Vec<PathItem>) {
    if block.is_empty() {
        return;
    }
    let opened: BTreeSet<&'p Var> = block.iter().filter(|o| matches!(o, Op::Open(_))).map(|o| o.var()).collect();
    let closed: BTreeSet<&'p Var> = block.iter().filter(|o| matches!(o, Op::Close(_))).map(|o| o.var()).collect();
    let mut closes: Vec<&'p Var> = closed.difference(&opened).copied().collect();
    closes.sort_by_key(|x| std::cmp::Reverse(stack.iter().position(|y| y == x)));
    for x in closes {
        stack.retain(|y| *y != x);
        out.push(PathItem::Op(Op::Close(x.clone())));
    }
    for x in closed.intersection(&opened) {
        out.push(PathItem::Op(Op::Open((*x).clone())));
        out.push(PathItem::Op(Op::Close((*x).clone())));
    }
    let mut opens: Vec<&'p Var> = opened.difference(&closed).copied().collect();
    opens.sort_by_key(|x| std::cmp::Reverse(close_at.get(x).copied().unwrap_or(usize::MAX)));
    for x in opens {
        stack.push(x);
        out.push(PathItem::Op(Op::Open(x.clone())));
    }
    block.clear();
}

/// Equivalent RGX for a hierarchical automaton.
///
/// An empty automaton yields `x{()} x{()}`, which has empty semantics on
/// every document; there is no literal for the empty language.
pub fn va_to_rgx(a: &Va, budget: &Budget) -> Result<Rgx, VaError> {
    let paths = decompose_paths(a, Policy::Set, budget)?;
    let mut alts: Vec<Rgx> = Vec::new();
    for p in &paths {
        let r = path_to_rgx(p)?;
        if !alts.contains(&r) {
            alts.push(r);
        }
    }
    Ok(Rgx::disj_all(alts).unwrap_or_else(|| {
        let x = a.vars().into_iter().next().unwrap_or_else(|| "x".to_string());
        Rgx::concat(Rgx::capture(x.clone(), Rgx::Eps), Rgx::capture(x, Rgx::Eps))
    }))
}

/// Sequential RGX equivalent to `g` on documents over `sigma`.
pub fn sequentialize(g: &Rgx, sigma: &Alphabet, budget: &Budget) -> Result<Rgx, VaError> {
    let r = va_to_rgx(&compile_rgx(g, sigma), budget)?;
    Ok(if g.uses_any() { resugar_any(&r, sigma) } else { r })
}

/// Sequential path expressions whose disjunction is equivalent to `g` on
/// every document, whatever its symbols.
///
/// `@` is compiled against the letters of `g` plus one fresh symbol; a
/// leftover fresh symbol can only stand for letters `g` never mentions, so
/// it is read back as `@`.
pub fn path_union(g: &Rgx, budget: &Budget) -> Result<Vec<Rgx>, VaError> {
    let mut sigma = g.letters();
    let fresh = ('\u{E000}'..='\u{F8FF}').find(|c| !sigma.contains(c)).expect("free private-use symbol");
    sigma.insert(fresh);
    let a = compile_rgx(g, &sigma);
    let mut out: Vec<Rgx> = Vec::new();
    for p in decompose_paths(&a, Policy::Set, budget)? {
        let r = replace_letter(&resugar_any(&path_to_rgx(&p)?, &sigma), fresh);
        if !out.contains(&r) {
            out.push(r);
        }
    }
    Ok(out)
}

fn replace_letter(r: &Rgx, c: char) -> Rgx {
    match r {
        Rgx::Letter(l) if *l == c => Rgx::Any,
        Rgx::Eps | Rgx::Letter(_) | Rgx::Any => r.clone(),
        Rgx::Capture(x, b) => Rgx::capture(x.clone(), replace_letter(b, c)),
        Rgx::Concat(a, b) => Rgx::concat(replace_letter(a, c), replace_letter(b, c)),
        Rgx::Disj(a, b) => Rgx::disj(replace_letter(a, c), replace_letter(b, c)),
        Rgx::Star(a) => Rgx::star(replace_letter(a, c)),
    }
}

/// Rewrites disjunctions spelling out all of `sigma` back to `@`.
fn resugar_any(r: &Rgx, sigma: &Alphabet) -> Rgx {
    if let Rgx::Disj(..) = r {
        let alts = r.alternatives();
        let letters: Option<Alphabet> = alts
            .iter()
            .map(|a| match a {
                Rgx::Letter(c) => Some(*c),
                _ => None,
            })
            .collect();
        if letters.as_ref() == Some(sigma) {
            return Rgx::Any;
        }
    }
    match r {
        Rgx::Eps | Rgx::Letter(_) | Rgx::Any => r.clone(),
        Rgx::Capture(x, b) => Rgx::capture(x.clone(), resugar_any(b, sigma)),
        Rgx::Concat(a, b) => Rgx::concat(resugar_any(a, sigma), resugar_any(b, sigma)),
        Rgx::Disj(a, b) => Rgx::disj(resugar_any(a, sigma), resugar_any(b, sigma)),
        Rgx::Star(a) => Rgx::star(resugar_any(a, sigma)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate_runs;
    use spanex_core::Document;
    use spanex_rgx::{eval_rgx, is_sequential, parse_rgx};

    fn docs(max: usize) -> Vec<Document> {
        let mut out = Vec::new();
        for n in 0..=max {
            for bits in 0..(1u32 << n) {
                out.push(Document::from_symbols((0..n).map(|i| if bits >> i & 1 == 1 { 'b' } else { 'a' }).collect()));
            }
        }
        out
    }

    fn ab() -> Alphabet {
        "ab".chars().collect()
    }

    #[test]
    fn single_path() {
        let a = compile_rgx(&parse_rgx("x{a}").unwrap(), &ab());
        let paths = decompose_paths(&a, Policy::Set, &Budget::search()).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].to_string(), "[()] ⊢x [a] ⊣x [()]");
        assert_eq!(path_to_rgx(&paths[0]).unwrap().to_string(), "x{a}");
    }

    #[test]
    fn two_paths() {
        let a = compile_rgx(&parse_rgx("x{a}|y{b}").unwrap(), &ab());
        assert_eq!(decompose_paths(&a, Policy::Set, &Budget::search()).unwrap().len(), 2);
    }

    #[test]
    fn crossing_path_rejected() {
        let p = Path {
            items: vec![
                PathItem::Segment(Rgx::Eps),
                PathItem::Op(Op::Open("x".into())),
                PathItem::Segment(Rgx::Letter('a')),
                PathItem::Op(Op::Open("y".into())),
                PathItem::Segment(Rgx::Letter('a')),
                PathItem::Op(Op::Close("x".into())),
                PathItem::Segment(Rgx::Letter('a')),
                PathItem::Op(Op::Close("y".into())),
                PathItem::Segment(Rgx::Eps),
            ],
        };
        assert!(matches!(path_to_rgx(&p), Err(VaError::NonHierarchical(_))));
    }

    #[test]
    fn same_position_ops_are_reordered() {
        // ⊢x ⊢y a ⊣x ⊣y with nothing between the closes nests as x{y{a}}.
        let p = Path {
            items: vec![
                PathItem::Op(Op::Open("x".into())),
                PathItem::Op(Op::Open("y".into())),
                PathItem::Segment(Rgx::Letter('a')),
                PathItem::Op(Op::Close("x".into())),
                PathItem::Segment(Rgx::Eps),
                PathItem::Op(Op::Close("y".into())),
            ],
        };
        let r = path_to_rgx(&p).unwrap();
        let d = Document::new("a");
        assert_eq!(eval_rgx(&r, &d).unwrap(), enumerate_runs(&p.to_va(&ab()), &d, Policy::Set).unwrap());
    }

    #[test]
    fn va_to_rgx_preserves_semantics() {
        for s in ["x{a*} y{b*}", "(a x{b})|(b x{a})", "x{a y{b*}}|y{a*}", "x{a*} x{b*}", "(x{(a|b)*}|y{(a|b)*})*", "x{@} @*"] {
            let g = parse_rgx(s).unwrap();
            let r = sequentialize(&g, &ab(), &Budget::search()).unwrap();
            // The empty language has no sequential form.
            assert!(is_sequential(&r) || s == "x{a*} x{b*}", "{s} -> {r}");
            for d in docs(4) {
                assert_eq!(eval_rgx(&g, &d).unwrap(), eval_rgx(&r, &d).unwrap(), "{s} -> {r} on {d}");
            }
        }
    }

    #[test]
    fn path_union_is_exact_beyond_the_letters() {
        for s in ["x{@} @*", "(a|@) x{b}", "(b a)|(@ b)", "x{@*} y{a|@}"] {
            let g = parse_rgx(s).unwrap();
            let paths = path_union(&g, &Budget::search()).unwrap();
            let r = Rgx::disj_all(paths.clone()).unwrap();
            assert!(paths.iter().all(is_sequential));
            for w in ["", "a", "c", "ab", "cb", "ca", "acb", "bbc"] {
                let d = Document::new(w);
                assert_eq!(eval_rgx(&g, &d).unwrap(), eval_rgx(&r, &d).unwrap(), "{s} -> {r} on {w}");
            }
        }
    }

    #[test]
    fn wildcard_is_resugared() {
        let g = parse_rgx("x{@} @*").unwrap();
        let r = sequentialize(&g, &ab(), &Budget::search()).unwrap();
        assert_eq!(r.to_string(), "x{@} @*");
    }

    #[test]
    fn empty_language_rgx() {
        let g = parse_rgx("x{a*} x{b*}").unwrap();
        let r = sequentialize(&g, &ab(), &Budget::search()).unwrap();
        assert_eq!(r.to_string(), "x{()} x{()}");
    }

    #[test]
    fn worked_example_survives() {
        let g = parse_rgx("(x{(a|b)*}|y{(a|b)*})*").unwrap();
        let r = sequentialize(&g, &ab(), &Budget::search()).unwrap();
        let d = Document::new("aaabbb");
        let m = spanex_core::Mapping::from_pairs([("y", spanex_core::Span::new(1, 4)), ("x", spanex_core::Span::new(4, 7))]);
        assert!(eval_rgx(&r, &d).unwrap().contains(&m));
    }
}
