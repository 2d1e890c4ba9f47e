//! Reference semantics, computed bottom-up over the AST on pair sets.
//!
//! Exponential in general; every entry point is guarded by a [`Budget`].

use std::collections::BTreeSet;

use spanex_core::{Budget, BudgetExceeded, Document, Mapping, MappingSet, Span};

use crate::Rgx;

/// `⟦γ⟧ₚᵈ`: pairs of a span and the mapping produced while matching it.
pub type PairSemantics = BTreeSet<(Span, Mapping)>;

/// Pair semantics with the default oracle budget.
pub fn pair_semantics(g: &Rgx, d: &Document) -> Result<PairSemantics, BudgetExceeded> {
    pair_semantics_with(g, d, &Budget::oracle())
}

pub fn pair_semantics_with(g: &Rgx, d: &Document, budget: &Budget) -> Result<PairSemantics, BudgetExceeded> {
    budget.check_doc(d.len())?;
    budget.check_vars(g.vars().len())?;
    let pairs = Eval { d, budget }.go(g)?;
    Ok(pairs.into_iter().collect())
}

/// `⟦γ⟧ᵈ` with the default oracle budget.
pub fn eval_rgx(g: &Rgx, d: &Document) -> Result<MappingSet, BudgetExceeded> {
    eval_rgx_with(g, d, &Budget::oracle())
}

pub fn eval_rgx_with(g: &Rgx, d: &Document, budget: &Budget) -> Result<MappingSet, BudgetExceeded> {
    let full = d.full_span();
    Ok(pair_semantics_with(g, d, budget)?
        .into_iter()
        .filter(|(s, _)| *s == full)
        .map(|(_, m)| m)
        .collect())
}

/// `⟦x.R⟧ᵈ`: the mappings of `x{R}` on any span of `d`.
pub fn dot_semantics(x: &str, body: &Rgx, d: &Document, budget: &Budget) -> Result<MappingSet, BudgetExceeded> {
    let g = Rgx::capture(x, body.clone());
    Ok(pair_semantics_with(&g, d, budget)?.into_iter().map(|(_, m)| m).collect())
}

type Pairs = Vec<(Span, Mapping)>;

struct Eval<'a> {
    d: &'a Document,
    budget: &'a Budget,
}

impl Eval<'_> {
    fn go(&self, g: &Rgx) -> Result<Pairs, BudgetExceeded> {
        let n = self.d.len();
        let out: Pairs = match g {
            Rgx::Eps => (1..=n + 1).map(|i| (Span::new(i, i), Mapping::new())).collect(),
            Rgx::Letter(c) => (1..=n)
                .filter(|&i| self.d.symbol(i) == Some(*c))
                .map(|i| (Span::new(i, i + 1), Mapping::new()))
                .collect(),
            Rgx::Any => (1..=n).map(|i| (Span::new(i, i + 1), Mapping::new())).collect(),
            Rgx::Capture(x, b) => self
                .go(b)?
                .into_iter()
                .filter(|(_, m)| !m.contains_var(x))
                .map(|(s, mut m)| {
                    m.insert(x.clone(), s);
                    (s, m)
                })
                .collect(),
            Rgx::Concat(a, b) => {
                let left = self.go(a)?;
                let right = self.go(b)?;
                dedup(self.concat(&left, &right)?)
            }
            Rgx::Disj(a, b) => {
                let mut v = self.go(a)?;
                v.extend(self.go(b)?);
                dedup(v)
            }
            Rgx::Star(b) => {
                let body = self.go(b)?;
                let mut all: BTreeSet<(Span, Mapping)> =
                    (1..=n + 1).map(|i| (Span::new(i, i), Mapping::new())).collect();
                let mut frontier: Pairs = all.iter().cloned().collect();
                while !frontier.is_empty() {
                    let step = self.concat(&frontier, &body)?;
                    frontier = step.into_iter().filter(|p| all.insert(p.clone())).collect();
                    self.budget.check_items(all.len())?;
                }
                all.into_iter().collect()
            }
        };
        self.budget.check_items(out.len())?;
        Ok(out)
    }

    /// Concatenation with the disjoint-domain condition.
    fn concat(&self, left: &Pairs, right: &Pairs) -> Result<Pairs, BudgetExceeded> {
        let n = self.d.len();
        let mut by_start: Vec<Vec<&(Span, Mapping)>> = vec![Vec::new(); n + 2];
        for p in right {
            by_start[p.0.start].push(p);
        }
        let mut out = Vec::new();
        for (s1, m1) in left {
            for (s2, m2) in &by_start[s1.end] {
                if m1.iter().any(|(x, _)| m2.contains_var(x)) {
                    continue;
                }
                let mut m = m1.clone();
                for (x, s) in m2.iter() {
                    m.insert(x.clone(), *s);
                }
                out.push((Span::new(s1.start, s2.end), m));
                self.budget.check_items(out.len())?;
            }
        }
        Ok(out)
    }
}

fn dedup(v: Pairs) -> Pairs {
    let set: BTreeSet<_> = v.into_iter().collect();
    set.into_iter().collect()
}
