//! Documents, spans and partial mappings.
//!
//! Spans use 1-based, end-exclusive positions counted in Unicode scalar
//! values: a document of length `n` has the spans `(i, j)` with
//! `1 <= i <= j <= n + 1`.

mod budget;
mod document;
mod mapping;

pub use budget::{Budget, BudgetExceeded};
pub use document::{span_count, Document, Span};
pub use mapping::{
    compatible, is_hierarchical, is_point_disjoint, join_sets, merge, totalize, Binding,
    ExtendedMapping, Mapping, MappingSet,
};

/// Variable names are plain identifiers.
pub type Var = String;

/// Alphabet of a document or expression.
pub type Alphabet = std::collections::BTreeSet<char>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("invalid span ({start},{end}) for a document of length {len}")]
    InvalidSpan { start: usize, end: usize, len: usize },
    #[error("mappings disagree on variable `{0}`")]
    IncompatibleMappings(Var),
}

/// Content `d(s)` of a span.
pub fn span_content(d: &Document, s: Span) -> Result<String, CoreError> {
    d.content(s)
}
