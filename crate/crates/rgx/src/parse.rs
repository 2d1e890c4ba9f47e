//! Concrete syntax.
//!
//! ```text
//! disj    := concat ('|' concat)*
//! concat  := postfix*
//! postfix := atom '*'*
//! atom    := '(' disj ')' | '@' | ident '{' disj '}' | '\' escape | class | symbol
//! class   := '[' '^'? (symbol | symbol '-' symbol)* ']'
//! ```
//!
//! Whitespace between tokens is ignored and `#` starts a comment running to
//! the end of the line. An identifier run not followed by `{` is read as a
//! sequence of letters. In spanRGX context such a run is instead a variable
//! mention `x{@*}` unless every character of it belongs to the alphabet.
//!
//! A class is the disjunction of its symbols. Whitespace inside it is
//! literal. A negated class `[^…]` takes the remaining symbols of a declared
//! alphabet, so it is rejected when no alphabet is given.

use std::fmt;

use spanex_core::Alphabet;

use crate::Rgx;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    Syntax { pos: usize, msg: String },
    UnknownEscape { pos: usize, ch: char },
    UnbalancedBraces { pos: usize },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { pos, msg } => write!(f, "syntax error at {pos}: {msg}"),
            ParseError::UnknownEscape { pos, ch } => write!(f, "unknown escape `\\{ch}` at {pos}"),
            ParseError::UnbalancedBraces { pos } => write!(f, "unbalanced braces at {pos}"),
        }
    }
}

impl std::error::Error for ParseError {}

/// Characters that must be escaped to be read as letters.
pub(crate) const META: &[char] = &['(', ')', '{', '}', '|', '*', '@', '\\', '#', '&', '[', ']'];

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Parses a plain RGX.
pub fn parse_rgx(text: &str) -> Result<Rgx, ParseError> {
    Parser::new(text, None).parse_all()
}

/// Parses a plain RGX whose negated classes range over `alphabet`.
pub fn parse_rgx_over(text: &str, alphabet: &Alphabet) -> Result<Rgx, ParseError> {
    let mut p = Parser::new(text, None);
    p.classes = Some(alphabet);
    p.parse_all()
}

/// Parses an expression in spanRGX context, where bare identifiers not
/// spelled over `alphabet` are variable mentions.
pub fn parse_span_rgx(text: &str, alphabet: &Alphabet) -> Result<Rgx, ParseError> {
    let mut p = Parser::new(text, Some(alphabet));
    p.classes = Some(alphabet);
    p.parse_all()
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    span_ctx: Option<&'a Alphabet>,
    classes: Option<&'a Alphabet>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, span_ctx: Option<&'a Alphabet>) -> Self {
        Parser { chars: text.chars().collect(), pos: 0, span_ctx, classes: None }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '#' {
                while let Some(&c) = self.chars.get(self.pos) {
                    if c == '\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<Rgx, ParseError> {
        let r = self.disj()?;
        match self.peek() {
            None => Ok(r),
            Some(')') => Err(self.err("unmatched `)`")),
            Some('}') => Err(ParseError::UnbalancedBraces { pos: self.pos }),
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
        }
    }

    fn disj(&mut self) -> Result<Rgx, ParseError> {
        let mut r = self.concat()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            let rhs = self.concat()?;
            r = Rgx::disj(r, rhs);
        }
        Ok(r)
    }

    fn concat(&mut self) -> Result<Rgx, ParseError> {
        let mut items: Vec<Rgx> = Vec::new();
        loop {
            match self.peek() {
                None | Some('|') | Some(')') | Some('}') => break,
                Some('*') => return Err(self.err("`*` without operand")),
                Some(_) => {
                    let atoms = self.atom()?;
                    items.extend(atoms);
                    while self.peek() == Some('*') {
                        self.pos += 1;
                        let last = items.pop().expect("atom precedes star");
                        items.push(Rgx::star(last));
                    }
                }
            }
        }
        Ok(Rgx::concat_all(items))
    }

    /// The symbol after a `\\` at `self.pos`.
    fn escape(&mut self) -> Result<char, ParseError> {
        let Some(&e) = self.chars.get(self.pos) else {
            return Err(self.err("dangling `\\`"));
        };
        self.pos += 1;
        match e {
            'n' => Ok('\n'),
            't' => Ok('\t'),
            'r' => Ok('\r'),
            c if META.contains(&c) || matches!(c, '.' | ':' | '^' | '-') => Ok(c),
            c if c.is_whitespace() => Ok(c),
            c => Err(ParseError::UnknownEscape { pos: self.pos - 2, ch: c }),
        }
    }

    fn class_symbol(&mut self) -> Result<char, ParseError> {
        let c = self.chars[self.pos];
        self.pos += 1;
        if c == '\\' {
            self.escape()
        } else {
            Ok(c)
        }
    }

    fn class(&mut self) -> Result<Rgx, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let negated = self.chars.get(self.pos) == Some(&'^');
        if negated {
            self.pos += 1;
        }
        let mut set = Alphabet::new();
        loop {
            match self.chars.get(self.pos) {
                None => return Err(ParseError::Syntax { pos: start, msg: "unclosed `[`".into() }),
                Some(']') => {
                    self.pos += 1;
                    break;
                }
                Some(_) => {
                    let lo = self.class_symbol()?;
                    if self.chars.get(self.pos) == Some(&'-') && self.chars.get(self.pos + 1).is_some_and(|c| *c != ']') {
                        self.pos += 1;
                        let hi = self.class_symbol()?;
                        if hi < lo {
                            return Err(ParseError::Syntax { pos: start, msg: format!("empty range `{lo}-{hi}`") });
                        }
                        set.extend(lo..=hi);
                    } else {
                        set.insert(lo);
                    }
                }
            }
        }
        if negated {
            let Some(sigma) = self.classes else {
                return Err(ParseError::Syntax { pos: start, msg: "negated class needs an alphabet".into() });
            };
            set = sigma.difference(&set).copied().collect();
        }
        Rgx::one_of(set).ok_or(ParseError::Syntax { pos: start, msg: "class matches no symbol".into() })
    }

    /// One atom, or several letters when an identifier run is spelled out.
    fn atom(&mut self) -> Result<Vec<Rgx>, ParseError> {
        let c = self.peek().expect("caller checked");
        let start = self.pos;
        match c {
            '(' => {
                self.pos += 1;
                let r = self.disj()?;
                match self.peek() {
                    Some(')') => {
                        self.pos += 1;
                        Ok(vec![r])
                    }
                    Some('}') => Err(ParseError::UnbalancedBraces { pos: self.pos }),
                    _ => Err(ParseError::Syntax { pos: start, msg: "unclosed `(`".into() }),
                }
            }
            '@' => {
                self.pos += 1;
                Ok(vec![Rgx::Any])
            }
            '{' => Err(ParseError::UnbalancedBraces { pos: self.pos }),
            '&' => Err(self.err("`&` must be escaped")),
            '\\' => {
                self.pos += 1;
                Ok(vec![Rgx::Letter(self.escape()?)])
            }
            '[' => self.class().map(|r| vec![r]),
            ']' => Err(self.err("unmatched `]`")),
            c if is_ident_start(c) => {
                let mut end = self.pos;
                while end < self.chars.len() && is_ident_char(self.chars[end]) {
                    end += 1;
                }
                let run: String = self.chars[self.pos..end].iter().collect();
                self.pos = end;
                if self.peek() == Some('{') {
                    let open = self.pos;
                    self.pos += 1;
                    let body = self.disj()?;
                    if self.peek() != Some('}') {
                        return Err(ParseError::UnbalancedBraces { pos: open });
                    }
                    self.pos += 1;
                    return Ok(vec![Rgx::capture(run, body)]);
                }
                match self.span_ctx {
                    Some(sigma) if !run.chars().all(|c| sigma.contains(&c)) => Ok(vec![Rgx::mention(run)]),
                    _ => Ok(run.chars().map(Rgx::Letter).collect()),
                }
            }
            c => {
                self.pos += 1;
                Ok(vec![Rgx::Letter(c)])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(c: char) -> Rgx {
        Rgx::Letter(c)
    }

    #[test]
    fn capture_concat() {
        let g = parse_rgx("x{a*} y{b*}").unwrap();
        assert_eq!(
            g,
            Rgx::concat(Rgx::capture("x", Rgx::star(a('a'))), Rgx::capture("y", Rgx::star(a('b'))))
        );
    }

    #[test]
    fn classes() {
        let sigma: Alphabet = "abc,\n".chars().collect();
        assert_eq!(parse_rgx("[ab]").unwrap(), Rgx::one_of(['a', 'b']).unwrap());
        assert_eq!(parse_rgx("[a-c]*").unwrap(), Rgx::star(Rgx::one_of(['a', 'b', 'c']).unwrap()));
        assert_eq!(parse_rgx_over("[^,\\n]", &sigma).unwrap(), Rgx::one_of(['a', 'b', 'c']).unwrap());
        assert_eq!(parse_rgx("[ ]").unwrap(), a(' '));
        assert!(parse_rgx("[^a]").is_err());
        assert!(parse_rgx_over("[^abc,\\n]", &sigma).is_err());
        assert!(parse_rgx("[ab").is_err());
        assert_eq!(parse_rgx("\\[").unwrap(), a('['));
    }

    #[test]
    fn epsilon() {
        assert_eq!(parse_rgx("()").unwrap(), Rgx::Eps);
        assert_eq!(parse_rgx("").unwrap(), Rgx::Eps);
        assert_eq!(parse_rgx("x{}").unwrap(), Rgx::capture("x", Rgx::Eps));
    }

    #[test]
    fn starred_disjunction() {
        let g = parse_rgx("(x{(a|b)*}|y{(a|b)*})*").unwrap();
        let ab = Rgx::star(Rgx::disj(a('a'), a('b')));
        assert_eq!(g, Rgx::star(Rgx::disj(Rgx::capture("x", ab.clone()), Rgx::capture("y", ab))));
    }

    #[test]
    fn letters_and_runs() {
        assert_eq!(parse_rgx("abc").unwrap(), Rgx::word("abc"));
        assert_eq!(parse_rgx("a b c").unwrap(), Rgx::word("abc"));
        assert_eq!(parse_rgx("ab x {c}").unwrap(), Rgx::concat(Rgx::word("ab"), Rgx::capture("x", a('c'))));
        assert_eq!(parse_rgx("ab*").unwrap(), Rgx::concat(a('a'), Rgx::star(a('b'))));
        assert_eq!(parse_rgx("$,1").unwrap(), Rgx::word("$,1"));
    }

    #[test]
    fn escapes() {
        assert_eq!(parse_rgx(r"\n\ \(").unwrap(), Rgx::word("\n ("));
        assert_eq!(parse_rgx(r"\#").unwrap(), a('#'));
        assert!(matches!(parse_rgx(r"\q"), Err(ParseError::UnknownEscape { ch: 'q', .. })));
    }

    #[test]
    fn comments() {
        assert_eq!(parse_rgx("a # trailing\n b").unwrap(), Rgx::word("ab"));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_rgx("x{a"), Err(ParseError::UnbalancedBraces { .. })));
        assert!(matches!(parse_rgx("a}"), Err(ParseError::UnbalancedBraces { .. })));
        assert!(matches!(parse_rgx("(a"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_rgx("a)"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_rgx("*a"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_rgx("{a}"), Err(ParseError::UnbalancedBraces { .. })));
    }

    #[test]
    fn span_context_mentions() {
        let sigma: Alphabet = "abcd".chars().collect();
        let g = parse_span_rgx("a x b y", &sigma).unwrap();
        assert_eq!(
            g,
            Rgx::concat_all(vec![a('a'), Rgx::mention("x"), a('b'), Rgx::mention("y")])
        );
        let h = parse_span_rgx("abc z", &sigma).unwrap();
        assert_eq!(h, Rgx::concat(Rgx::word("abc"), Rgx::mention("z")));
        // Runs containing a non-alphabet symbol are variables.
        assert_eq!(parse_span_rgx("ax", &sigma).unwrap(), Rgx::mention("ax"));
        // Plain context never produces mentions.
        assert_eq!(parse_rgx("x").unwrap(), a('x'));
    }
}
