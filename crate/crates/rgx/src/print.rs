use std::fmt;

use spanex_core::Alphabet;

use crate::parse::META;
use crate::Rgx;

const DISJ: u8 = 0;
const CONCAT: u8 = 1;
const ATOM: u8 = 2;

fn write_letter(out: &mut String, c: char) {
    match c {
        '\n' => out.push_str("\\n"),
        '\t' => out.push_str("\\t"),
        '\r' => out.push_str("\\r"),
        c if META.contains(&c) || c.is_whitespace() => {
            out.push('\\');
            out.push(c);
        }
        c => out.push(c),
    }
}

struct Printer<'a> {
    /// Alphabet for spanRGX output; `None` prints plain syntax.
    span_ctx: Option<&'a Alphabet>,
    out: String,
}

impl Printer<'_> {
    fn is_bare_mention(&self, r: &Rgx) -> bool {
        match (self.span_ctx, r) {
            (Some(sigma), Rgx::Capture(x, b)) => b.is_sigma_star() && !x.chars().all(|c| sigma.contains(&c)),
            _ => false,
        }
    }

    fn go(&mut self, r: &Rgx, ctx: u8) {
        match r {
            Rgx::Eps => self.out.push_str("()"),
            Rgx::Letter(c) => write_letter(&mut self.out, *c),
            Rgx::Any => self.out.push('@'),
            Rgx::Capture(x, b) => {
                self.out.push_str(x);
                if !self.is_bare_mention(r) {
                    self.out.push('{');
                    self.go(b, DISJ);
                    self.out.push('}');
                }
            }
            Rgx::Star(b) => {
                self.go(b, ATOM);
                self.out.push('*');
            }
            Rgx::Concat(a, b) => {
                let paren = ctx > CONCAT;
                if paren {
                    self.out.push('(');
                }
                self.go(a, CONCAT);
                if !(ends_in_letter(a) && starts_with_letter(b)) {
                    self.out.push(' ');
                }
                self.go(b, ATOM);
                if paren {
                    self.out.push(')');
                }
            }
            Rgx::Disj(a, b) => {
                let paren = ctx > DISJ;
                if paren {
                    self.out.push('(');
                }
                self.go(a, DISJ);
                self.out.push('|');
                self.go(b, CONCAT);
                if paren {
                    self.out.push(')');
                }
            }
        }
    }
}

fn ends_in_letter(r: &Rgx) -> bool {
    last_letter(r).is_some()
}

fn starts_with_letter(r: &Rgx) -> bool {
    matches!(r, Rgx::Letter(_))
}

fn last_letter(r: &Rgx) -> Option<char> {
    match r {
        Rgx::Letter(c) => Some(*c),
        Rgx::Concat(_, b) => last_letter(b),
        _ => None,
    }
}

impl Rgx {
    /// Prints in spanRGX syntax: `x{@*}` becomes a bare `x` whenever that
    /// cannot be mistaken for letters of `alphabet`.
    pub fn to_span_string(&self, alphabet: &Alphabet) -> String {
        let mut p = Printer { span_ctx: Some(alphabet), out: String::new() };
        p.go(self, DISJ);
        p.out
    }
}

impl fmt::Display for Rgx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer { span_ctx: None, out: String::new() };
        p.go(self, DISJ);
        f.write_str(&p.out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{parse_rgx, parse_span_rgx};

    #[test]
    fn prints_examples() {
        for s in ["x{a*} y{b*}", "(x{(a|b)*}|y{(a|b)*})*", "()", "abc", "a x{abc z{d}} b y{@*}", "x{()} x{()}"] {
            let g = parse_rgx(s).unwrap();
            assert_eq!(g.to_string(), s);
        }
    }

    #[test]
    fn nesting_needs_parens() {
        let g = Rgx::concat(Rgx::Letter('a'), Rgx::concat(Rgx::Letter('b'), Rgx::Letter('c')));
        assert_eq!(g.to_string(), "a (bc)");
        assert_eq!(parse_rgx(&g.to_string()).unwrap(), g);
        let h = Rgx::disj(Rgx::Letter('a'), Rgx::disj(Rgx::Letter('b'), Rgx::Letter('c')));
        assert_eq!(h.to_string(), "a|(b|c)");
        assert_eq!(parse_rgx(&h.to_string()).unwrap(), h);
    }

    #[test]
    fn escapes_roundtrip() {
        let g = Rgx::word("a b\n(#)&,");
        assert_eq!(parse_rgx(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn span_context() {
        let sigma: Alphabet = "abcd".chars().collect();
        let g = parse_span_rgx("a x b y", &sigma).unwrap();
        assert_eq!(g.to_span_string(&sigma), "a x b y");
        // A variable spelled over the alphabet keeps its braces.
        let h = Rgx::mention("ab");
        assert_eq!(h.to_span_string(&sigma), "ab{@*}");
    }
}
