use std::fmt;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::{Alphabet, CoreError};

/// A text addressed by scalar-value positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Document {
    symbols: Vec<char>,
}

impl Document {
    pub fn new(text: &str) -> Self {
        Document { symbols: text.chars().collect() }
    }

    pub fn from_symbols(symbols: Vec<char>) -> Self {
        Document { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    /// Symbol at 1-based position `pos`.
    pub fn symbol(&self, pos: usize) -> Option<char> {
        pos.checked_sub(1).and_then(|i| self.symbols.get(i).copied())
    }

    pub fn alphabet(&self) -> Alphabet {
        self.symbols.iter().copied().collect()
    }

    /// The whole-document span `(1, |d|+1)`.
    pub fn full_span(&self) -> Span {
        Span::new(1, self.len() + 1)
    }

    pub fn is_valid(&self, s: Span) -> bool {
        s.start >= 1 && s.start <= s.end && s.end <= self.len() + 1
    }

    pub fn check(&self, s: Span) -> Result<(), CoreError> {
        if self.is_valid(s) {
            Ok(())
        } else {
            Err(CoreError::InvalidSpan { start: s.start, end: s.end, len: self.len() })
        }
    }

    pub fn content(&self, s: Span) -> Result<String, CoreError> {
        self.check(s)?;
        Ok(self.symbols[s.start - 1..s.end - 1].iter().collect())
    }

    /// All spans of the document, ordered by start then end.
    pub fn spans(&self) -> impl Iterator<Item = Span> {
        let n = self.len();
        (1..=n + 1).flat_map(move |i| (i..=n + 1).map(move |j| Span::new(i, j)))
    }

    /// 0-based, end-exclusive byte range of a span in the UTF-8 encoding.
    pub fn byte_range(&self, s: Span) -> Result<(usize, usize), CoreError> {
        self.check(s)?;
        let before: usize = self.symbols[..s.start - 1].iter().map(|c| c.len_utf8()).sum();
        let inside: usize = self.symbols[s.start - 1..s.end - 1].iter().map(|c| c.len_utf8()).sum();
        Ok((before, before + inside))
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.symbols {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl From<&str> for Document {
    fn from(s: &str) -> Self {
        Document::new(s)
    }
}

/// Number of spans of a document of length `n`.
pub fn span_count(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// A span `(start, end)`: 1-based, end-exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// `s1 · s2`, defined when `s1.end == s2.start`.
    pub fn concat(&self, other: Span) -> Option<Span> {
        (self.end == other.start).then_some(Span::new(self.start, other.end))
    }

    pub fn contains(&self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn disjoint(&self, other: Span) -> bool {
        self.end <= other.start || other.end <= self.start
    }

    pub fn shares_endpoint(&self, other: Span) -> bool {
        self.start == other.start
            || self.start == other.end
            || self.end == other.start
            || self.end == other.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.start, self.end)
    }
}

impl Serialize for Span {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.start)?;
        t.serialize_element(&self.end)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Span {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct SpanVisitor;
        impl<'de> Visitor<'de> for SpanVisitor {
            type Value = Span;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a pair [start, end]")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Span, A::Error> {
                let start: usize =
                    seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let end: usize =
                    seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                if start == 0 || start > end {
                    return Err(de::Error::custom(format!("malformed span [{start},{end}]")));
                }
                Ok(Span::new(start, end))
            }
        }
        deserializer.deserialize_tuple(2, SpanVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn content_examples() {
        let d = Document::new("Information extraction");
        assert_eq!(d.content(Span::new(1, 12)).unwrap(), "Information");
        assert_eq!(d.content(Span::new(13, 23)).unwrap(), "extraction");
        for i in 1..=d.len() + 1 {
            assert_eq!(d.content(Span::new(i, i)).unwrap(), "");
        }
    }

    #[test]
    fn invalid_span_rejected() {
        let d = Document::new("ab");
        assert!(d.content(Span::new(1, 4)).is_err());
        assert!(d.content(Span::new(0, 1)).is_err());
        assert!(d.content(Span::new(3, 2)).is_err());
        assert!(d.content(Span::new(3, 3)).is_ok());
    }

    #[test]
    fn span_count_matches_enumeration() {
        for n in 0..=8 {
            let d = Document::from_symbols(vec!['a'; n]);
            assert_eq!(d.spans().count(), span_count(n));
            assert!(d.spans().all(|s| d.is_valid(s)));
        }
    }

    #[test]
    fn spans_are_ordered() {
        let d = Document::new("ab");
        let v: Vec<Span> = d.spans().collect();
        let mut sorted = v.clone();
        sorted.sort();
        assert_eq!(v, sorted);
        assert_eq!(v[0], Span::new(1, 1));
        assert_eq!(v[5], Span::new(3, 3));
    }

    #[test]
    fn multibyte_positions() {
        let d = Document::new("héllo");
        assert_eq!(d.len(), 5);
        assert_eq!(d.content(Span::new(2, 3)).unwrap(), "é");
        assert_eq!(d.byte_range(Span::new(2, 3)).unwrap(), (1, 3));
        assert_eq!(d.byte_range(Span::new(3, 6)).unwrap(), (3, 6));
    }

    #[test]
    fn span_json_roundtrip() {
        let s = Span::new(1, 4);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, "[1,4]");
        assert_eq!(serde_json::from_str::<Span>(&j).unwrap(), s);
        assert!(serde_json::from_str::<Span>("[4,1]").is_err());
    }

    #[test]
    fn concat_and_relations() {
        let a = Span::new(1, 4);
        let b = Span::new(4, 7);
        assert_eq!(a.concat(b), Some(Span::new(1, 7)));
        assert_eq!(b.concat(a), None);
        assert!(a.disjoint(b));
        assert!(Span::new(1, 7).contains(b));
        assert!(a.shares_endpoint(b));
    }
}
