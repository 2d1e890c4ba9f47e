use std::collections::BTreeSet;
use std::fmt;

use spanex_core::{Alphabet, Var};
use spanex_rgx::{is_span_rgx, parse_span_rgx, Rgx};

use crate::RuleError;

/// `φ0 ∧ x1.φ1 ∧ … ∧ xm.φm` over spanRGX bodies.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtractionRule {
    pub root: Rgx,
    pub constraints: Vec<(Var, Rgx)>,
}

impl ExtractionRule {
    pub fn new(root: Rgx, constraints: Vec<(Var, Rgx)>) -> Self {
        ExtractionRule { root, constraints }
    }

    /// A rule without constraints.
    pub fn plain(root: Rgx) -> Self {
        ExtractionRule { root, constraints: Vec::new() }
    }

    pub fn with(mut self, x: impl Into<Var>, body: Rgx) -> Self {
        self.constraints.push((x.into(), body));
        self
    }

    /// The first body constraining `x`.
    pub fn constraint(&self, x: &str) -> Option<&Rgx> {
        self.constraints.iter().find(|(y, _)| y == x).map(|(_, b)| b)
    }

    pub fn heads(&self) -> BTreeSet<Var> {
        self.constraints.iter().map(|(x, _)| x.clone()).collect()
    }

    /// Heads and every variable mentioned anywhere.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = self.root.vars();
        for (x, b) in &self.constraints {
            out.insert(x.clone());
            out.extend(b.vars());
        }
        out
    }

    pub fn bodies(&self) -> impl Iterator<Item = &Rgx> {
        std::iter::once(&self.root).chain(self.constraints.iter().map(|(_, b)| b))
    }

    pub fn letters(&self) -> Alphabet {
        self.bodies().flat_map(|b| b.letters()).collect()
    }

    pub fn is_simple(&self) -> bool {
        self.heads().len() == self.constraints.len()
    }

    /// `doc: φ0 && x1.(φ1) && …`, printing mentions as bare names where
    /// `alphabet` allows it.
    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        let mut out = format!("doc: {}", self.root.to_span_string(alphabet));
        for (x, b) in &self.constraints {
            out.push_str(&format!(" && {x}.({})", b.to_span_string(alphabet)));
        }
        out
    }
}

impl fmt::Display for ExtractionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&self.letters()))
    }
}

/// A finite union of rules.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleUnion(pub Vec<ExtractionRule>);

impl RuleUnion {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ExtractionRule> {
        self.0.iter()
    }

    /// Adds `r` unless an identical rule is already present.
    pub fn push(&mut self, r: ExtractionRule) {
        if !self.0.contains(&r) {
            self.0.push(r);
        }
    }

    /// JSON array of rule texts.
    pub fn to_json(&self, alphabet: &Alphabet) -> String {
        let texts: Vec<String> = self.0.iter().map(|r| r.to_text(alphabet)).collect();
        serde_json::to_string(&texts).expect("strings serialize")
    }
}

impl IntoIterator for RuleUnion {
    type Item = ExtractionRule;
    type IntoIter = std::vec::IntoIter<ExtractionRule>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// Splits rule text into parts on newlines and `&&`, dropping `#` comments.
fn split_parts(text: &str) -> Vec<(usize, String)> {
    let chars: Vec<char> = text.chars().collect();
    let mut parts = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\\' && i + 1 < chars.len() {
            cur.push(c);
            cur.push(chars[i + 1]);
            i += 2;
            continue;
        }
        let boundary = if c == '\n' {
            1
        } else if c == '&' && chars.get(i + 1) == Some(&'&') {
            2
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        } else {
            0
        };
        if boundary > 0 {
            parts.push((start, std::mem::take(&mut cur)));
            i += boundary;
            start = i;
        } else {
            cur.push(c);
            i += 1;
        }
    }
    parts.push((start, cur));
    parts.into_iter().filter(|(_, p)| !p.trim().is_empty()).collect()
}

/// `x . body`, if the part has that shape.
fn split_constraint(part: &str) -> Option<(&str, &str)> {
    let t = part.trim_start();
    let mut chars = t.char_indices();
    match chars.next() {
        Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return None,
    }
    let end = chars.find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_')).map(|(i, _)| i).unwrap_or(t.len());
    let rest = t[end..].trim_start();
    rest.strip_prefix('.').map(|body| (&t[..end], body))
}

fn parse_body(text: &str, offset: usize, alphabet: &Alphabet) -> Result<Rgx, RuleError> {
    let g = parse_span_rgx(text, alphabet).map_err(|source| RuleError::Syntax { offset, source })?;
    if !is_span_rgx(&g) {
        return Err(RuleError::NotSpanRgx(text.trim().to_string()));
    }
    Ok(g)
}

/// Parses `doc: φ0 && x.φ1 && …`; parts may also be given one per line.
///
/// The `doc:` prefix is optional and a missing root defaults to `()`.
/// Identifier runs are variable mentions unless made of `alphabet` letters.
pub fn parse_rule(text: &str, alphabet: &Alphabet) -> Result<ExtractionRule, RuleError> {
    let mut root: Option<Rgx> = None;
    let mut constraints = Vec::new();
    for (offset, part) in split_parts(text) {
        if let Some((x, body)) = split_constraint(&part) {
            if x != "doc" {
                constraints.push((x.to_string(), parse_body(body, offset, alphabet)?));
                continue;
            }
        }
        let t = part.trim_start();
        let body = t.strip_prefix("doc").map(str::trim_start).and_then(|r| r.strip_prefix(':')).unwrap_or(t);
        if root.is_some() {
            return Err(RuleError::SecondRoot(part.trim().to_string()));
        }
        root = Some(parse_body(body, offset, alphabet)?);
    }
    Ok(ExtractionRule { root: root.unwrap_or(Rgx::Eps), constraints })
}
