//! Documents, mention spans and annotations.
//!
//! All offsets are Unicode code points into the document text, half-open
//! (`start` inclusive, `end` exclusive).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opening entity marker used in model-facing sequences.
pub const BEGIN_ENT: &str = "[BEGIN_ENT]";
/// Closing entity marker used in model-facing sequences.
pub const END_ENT: &str = "[END_ENT]";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("document id must not be empty")]
    EmptyId,
    #[error("document text contains the reserved tag token {0}")]
    TagTokenInText(&'static str),
    #[error("span [{start},{end}) is out of bounds for text of length {len}")]
    SpanOutOfBounds { start: usize, end: usize, len: usize },
    #[error("span [{start},{end}) has surface {found:?}, text has {expected:?}")]
    SurfaceMismatch {
        start: usize,
        end: usize,
        expected: String,
        found: String,
    },
}

/// Number of code points in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Byte offset of code point `idx`, or `s.len()` when `idx` equals the char count.
fn byte_offset(s: &str, idx: usize) -> Option<usize> {
    if idx == 0 {
        return Some(0);
    }
    let mut count = 0;
    for (b, _) in s.char_indices() {
        if count == idx {
            return Some(b);
        }
        count += 1;
    }
    (count == idx).then_some(s.len())
}

/// Slice `s` by code-point range. `None` when the range is invalid.
pub fn char_slice(s: &str, start: usize, end: usize) -> Option<&str> {
    if start > end {
        return None;
    }
    let b0 = byte_offset(s, start)?;
    let rest = &s[b0..];
    let b1 = byte_offset(rest, end - start)?;
    Some(&rest[..b1])
}

/// Returns the first reserved tag token contained in `s`.
pub fn find_tag_token(s: &str) -> Option<&'static str> {
    [BEGIN_ENT, END_ENT].into_iter().find(|t| s.contains(t))
}

/// A source document: the context the pipeline links.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Document {
    id: String,
    text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Result<Self, TextError> {
        let id = id.into();
        let text = text.into();
        if id.is_empty() {
            return Err(TextError::EmptyId);
        }
        if let Some(tok) = find_tag_token(&text) {
            return Err(TextError::TagTokenInText(tok));
        }
        Ok(Self { id, text })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Length in code points.
    pub fn len_chars(&self) -> usize {
        char_len(&self.text)
    }

    /// Build a span over `[start, end)` of this document, taking the surface from the text.
    pub fn span(&self, start: usize, end: usize) -> Result<MentionSpan, TextError> {
        MentionSpan::from_text(&self.text, start, end)
    }
}

/// A detected mention: code-point range plus its exact surface form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MentionSpan {
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

impl MentionSpan {
    /// Build a span whose surface is read out of `text`.
    pub fn from_text(text: &str, start: usize, end: usize) -> Result<Self, TextError> {
        let len = char_len(text);
        if start >= end || end > len {
            return Err(TextError::SpanOutOfBounds { start, end, len });
        }
        let surface = char_slice(text, start, end).expect("bounds checked").to_owned();
        Ok(Self {
            start,
            end,
            surface,
        })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn overlaps(&self, other: &MentionSpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Check the span invariants against `text`.
    pub fn validate(&self, text: &str) -> Result<(), TextError> {
        let len = char_len(text);
        if self.start >= self.end || self.end > len {
            return Err(TextError::SpanOutOfBounds {
                start: self.start,
                end: self.end,
                len,
            });
        }
        let expected = char_slice(text, self.start, self.end).expect("bounds checked");
        if expected != self.surface {
            return Err(TextError::SurfaceMismatch {
                start: self.start,
                end: self.end,
                expected: expected.to_owned(),
                found: self.surface.clone(),
            });
        }
        Ok(())
    }
}

/// A mention linked (or to be linked) to a knowledge-base title.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub span: MentionSpan,
    pub title: Option<String>,
    pub uri: Option<String>,
}

impl Annotation {
    pub fn new(span: MentionSpan, title: impl Into<String>) -> Self {
        Self {
            span,
            title: Some(title.into()),
            uri: None,
        }
    }

    /// An annotation that only carries a span.
    pub fn unlinked(span: MentionSpan) -> Self {
        Self {
            span,
            title: None,
            uri: None,
        }
    }
}

/// True when `spans` are ascending by start and pairwise non-overlapping.
pub fn is_sorted_disjoint(spans: &[MentionSpan]) -> bool {
    spans.windows(2).all(|w| w[0].end <= w[1].start)
}
