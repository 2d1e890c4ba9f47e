use std::collections::BTreeSet;

use spanex_core::{Alphabet, Var};

/// Variable regex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rgx {
    /// `ε`, written `()`.
    Eps,
    Letter(char),
    /// `Σ`, written `@`: any single symbol of the alphabet.
    Any,
    /// `x{γ}`.
    Capture(Var, Box<Rgx>),
    Concat(Box<Rgx>, Box<Rgx>),
    Disj(Box<Rgx>, Box<Rgx>),
    Star(Box<Rgx>),
}

impl Rgx {
    pub fn letter(c: char) -> Rgx {
        Rgx::Letter(c)
    }

    pub fn capture(x: impl Into<Var>, body: Rgx) -> Rgx {
        Rgx::Capture(x.into(), Box::new(body))
    }

    pub fn concat(a: Rgx, b: Rgx) -> Rgx {
        Rgx::Concat(Box::new(a), Box::new(b))
    }

    pub fn disj(a: Rgx, b: Rgx) -> Rgx {
        Rgx::Disj(Box::new(a), Box::new(b))
    }

    pub fn star(a: Rgx) -> Rgx {
        Rgx::Star(Box::new(a))
    }

    /// `Σ*`.
    pub fn sigma_star() -> Rgx {
        Rgx::star(Rgx::Any)
    }

    /// The spanRGX mention `x`, i.e. `x{Σ*}`.
    pub fn mention(x: impl Into<Var>) -> Rgx {
        Rgx::capture(x, Rgx::sigma_star())
    }

    /// Left-nested concatenation; `ε` for an empty list.
    pub fn concat_all<I: IntoIterator<Item = Rgx>>(items: I) -> Rgx {
        items.into_iter().reduce(Rgx::concat).unwrap_or(Rgx::Eps)
    }

    /// Left-nested disjunction; `None` for an empty list.
    pub fn disj_all<I: IntoIterator<Item = Rgx>>(items: I) -> Option<Rgx> {
        items.into_iter().reduce(Rgx::disj)
    }

    /// Concatenation of the letters of `w`.
    pub fn word(w: &str) -> Rgx {
        Rgx::concat_all(w.chars().map(Rgx::Letter))
    }

    /// Disjunction of the given letters (`None` when empty).
    pub fn one_of<I: IntoIterator<Item = char>>(letters: I) -> Option<Rgx> {
        Rgx::disj_all(letters.into_iter().map(Rgx::Letter))
    }

    /// `var(γ)`.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Rgx::Eps | Rgx::Letter(_) | Rgx::Any => {}
            Rgx::Capture(x, b) => {
                out.insert(x.clone());
                b.collect_vars(out);
            }
            Rgx::Concat(a, b) | Rgx::Disj(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Rgx::Star(a) => a.collect_vars(out),
        }
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Rgx::Eps | Rgx::Letter(_) | Rgx::Any => false,
            Rgx::Capture(..) => true,
            Rgx::Concat(a, b) | Rgx::Disj(a, b) => a.has_vars() || b.has_vars(),
            Rgx::Star(a) => a.has_vars(),
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars_in_order(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.visit(&mut |r| {
            if let Rgx::Capture(x, _) = r {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
        });
        out
    }

    /// Letters occurring in the expression.
    pub fn letters(&self) -> Alphabet {
        let mut out = Alphabet::new();
        self.visit(&mut |r| {
            if let Rgx::Letter(c) = r {
                out.insert(*c);
            }
        });
        out
    }

    pub fn uses_any(&self) -> bool {
        let mut found = false;
        self.visit(&mut |r| found |= matches!(r, Rgx::Any));
        found
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&Rgx)>(&self, f: &mut F) {
        f(self);
        match self {
            Rgx::Eps | Rgx::Letter(_) | Rgx::Any => {}
            Rgx::Capture(_, b) | Rgx::Star(b) => b.visit(f),
            Rgx::Concat(a, b) | Rgx::Disj(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn depth(&self) -> usize {
        match self {
            Rgx::Eps | Rgx::Letter(_) | Rgx::Any => 0,
            Rgx::Capture(_, b) | Rgx::Star(b) => 1 + b.depth(),
            Rgx::Concat(a, b) | Rgx::Disj(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Whether `ε` is in the language, reading captures as their bodies.
    pub fn nullable(&self) -> bool {
        match self {
            Rgx::Eps | Rgx::Star(_) => true,
            Rgx::Letter(_) | Rgx::Any => false,
            Rgx::Capture(_, b) => b.nullable(),
            Rgx::Concat(a, b) => a.nullable() && b.nullable(),
            Rgx::Disj(a, b) => a.nullable() || b.nullable(),
        }
    }

    /// Whether the language is contained in `{ε}`.
    pub fn only_empty(&self) -> bool {
        match self {
            Rgx::Eps => true,
            Rgx::Letter(_) | Rgx::Any => false,
            Rgx::Capture(_, b) | Rgx::Star(b) => b.only_empty(),
            Rgx::Concat(a, b) | Rgx::Disj(a, b) => a.only_empty() && b.only_empty(),
        }
    }

    pub fn is_sigma_star(&self) -> bool {
        matches!(self, Rgx::Star(b) if **b == Rgx::Any)
    }

    /// Replaces each outermost capture for which `f` returns an expression.
    pub fn substitute_captures(&self, f: &dyn Fn(&Var, &Rgx) -> Option<Rgx>) -> Rgx {
        match self {
            Rgx::Eps | Rgx::Letter(_) | Rgx::Any => self.clone(),
            Rgx::Capture(x, b) => match f(x, b) {
                Some(r) => r,
                None => Rgx::capture(x.clone(), b.substitute_captures(f)),
            },
            Rgx::Concat(a, b) => Rgx::concat(a.substitute_captures(f), b.substitute_captures(f)),
            Rgx::Disj(a, b) => Rgx::disj(a.substitute_captures(f), b.substitute_captures(f)),
            Rgx::Star(a) => Rgx::star(a.substitute_captures(f)),
        }
    }

    /// Flattens nested concatenations into a list of factors.
    pub fn factors(&self) -> Vec<&Rgx> {
        let mut out = Vec::new();
        fn go<'a>(r: &'a Rgx, out: &mut Vec<&'a Rgx>) {
            match r {
                Rgx::Concat(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => out.push(r),
            }
        }
        go(self, &mut out);
        out
    }

    /// Flattens nested disjunctions into a list of alternatives.
    pub fn alternatives(&self) -> Vec<&Rgx> {
        let mut out = Vec::new();
        fn go<'a>(r: &'a Rgx, out: &mut Vec<&'a Rgx>) {
            match r {
                Rgx::Disj(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => out.push(r),
            }
        }
        go(self, &mut out);
        out
    }
}
