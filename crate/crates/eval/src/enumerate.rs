use spanex_core::{span_count, Binding, Document, ExtendedMapping, Mapping, Var};
use spanex_va::{is_sequential_va, Va};

use crate::{eval_decision_fpt, eval_decision_seq, EvalError, Target};

struct Frame {
    mu: ExtendedMapping,
    next: usize,
}

/// Lazy form of the recursive enumeration: variables are decided in
/// lexicographic order, each trying every span (by start, then end) and
/// finally `⊥`, descending only when `Eval` says an extension exists.
pub struct Enumerator {
    a: Va,
    d: Document,
    vars: Vec<Var>,
    candidates: Vec<Binding>,
    sequential: bool,
    stack: Vec<Frame>,
    started: bool,
    calls: usize,
}

impl Enumerator {
    pub fn new<T: Target + ?Sized>(target: &T, d: &Document) -> Self {
        let a = target.automaton(d).into_owned();
        let vars = a.vars().into_iter().collect();
        let mut candidates: Vec<Binding> = d.spans().map(Binding::Span).collect();
        candidates.push(Binding::Bottom);
        Enumerator { sequential: is_sequential_va(&a), a, d: d.clone(), vars, candidates, stack: vec![], started: false, calls: 0 }
    }

    /// `Eval` invocations so far.
    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    fn eval(&mut self, mu: &ExtendedMapping) -> Result<bool, EvalError> {
        self.calls += 1;
        if self.sequential {
            eval_decision_seq(&self.a, &self.d, mu)
        } else {
            eval_decision_fpt(&self.a, &self.d, mu)
        }
    }

    fn step(&mut self) -> Result<Option<Mapping>, EvalError> {
        if !self.started {
            self.started = true;
            if self.vars.is_empty() {
                let ok = self.eval(&ExtendedMapping::new())?;
                return Ok(ok.then(Mapping::new));
            }
            self.stack.push(Frame { mu: ExtendedMapping::new(), next: 0 });
        }
        while !self.stack.is_empty() {
            let depth = self.stack.len() - 1;
            let top = &mut self.stack[depth];
            if top.next == self.candidates.len() {
                self.stack.pop();
                continue;
            }
            let mu = top.mu.with(self.vars[depth].clone(), self.candidates[top.next]);
            top.next += 1;
            if self.eval(&mu)? {
                if depth + 1 == self.vars.len() {
                    return Ok(Some(mu.to_mapping()));
                }
                self.stack.push(Frame { mu, next: 0 });
            }
        }
        Ok(None)
    }
}

impl Iterator for Enumerator {
    type Item = Result<Mapping, EvalError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.step() {
            Ok(Some(m)) => Some(Ok(m)),
            Ok(None) => None,
            Err(e) => {
                self.stack.clear();
                Some(Err(e))
            }
        }
    }
}

pub fn enumerate<T: Target + ?Sized>(target: &T, d: &Document) -> Enumerator {
    Enumerator::new(target, d)
}

/// `Eval` calls spent before each output; when nothing is output, a single
/// entry holding the calls until termination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayAudit {
    pub gaps: Vec<usize>,
    /// Calls after the last output.
    pub tail: usize,
    pub vars: usize,
    pub doc_len: usize,
}

impl DelayAudit {
    /// `max(|V|, 1) · (2 · |sub(d)| + 1)`. Between two outputs a level of
    /// the recursion finishes the candidates of the old node (at most
    /// `|sub(d)|` left) and then scans a new node up to its first success
    /// (at most `|sub(d)| + 1`).
    pub fn bound(&self) -> usize {
        self.vars.max(1) * (2 * span_count(self.doc_len) + 1)
    }

    /// `|V| · (|d|² + 1)`, which undercounts `sub(d)` on short documents.
    pub fn quadratic_bound(&self) -> usize {
        self.vars * (self.doc_len * self.doc_len + 1)
    }

    pub fn max_gap(&self) -> usize {
        self.gaps.iter().copied().chain([self.tail]).max().unwrap_or(0)
    }

    pub fn within(&self, bound: usize) -> bool {
        self.max_gap() <= bound
    }
}

pub fn delay_audit<T: Target + ?Sized>(target: &T, d: &Document) -> Result<DelayAudit, EvalError> {
    let mut e = Enumerator::new(target, d);
    let mut gaps = vec![];
    let mut last = 0;
    while let Some(m) = e.next() {
        m?;
        gaps.push(e.calls() - last);
        last = e.calls();
    }
    let tail = e.calls() - last;
    if gaps.is_empty() {
        gaps.push(tail);
    }
    Ok(DelayAudit { gaps, tail, vars: e.vars().len(), doc_len: d.len() })
}
