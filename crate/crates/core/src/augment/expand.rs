//! Mention expansion: in-place replacement of annotated surfaces and the
//! offset map that inverts it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::text::{char_len, MentionSpan};

/// Expansions accepted from the LLM, keyed by mention surface.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionResult {
    pub expansions: BTreeMap<String, String>,
}

impl ExpansionResult {
    pub fn is_empty(&self) -> bool {
        self.expansions.is_empty()
    }

    pub fn get(&self, surface: &str) -> Option<&str> {
        self.expansions.get(surface).map(String::as_str)
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for ExpansionResult {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Self {
            expansions: iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionPair {
    pub original: MentionSpan,
    pub expanded: MentionSpan,
}

impl ExpansionPair {
    fn is_replacement(&self) -> bool {
        self.original.surface != self.expanded.surface
    }

    fn delta(&self) -> isize {
        self.expanded.len() as isize - self.original.len() as isize
    }
}

/// Correspondence between a document and its expanded rewrite.
///
/// Every annotated span appears as a pair; pairs whose surfaces agree are
/// identities. Text outside the pairs is identical in both texts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionMap {
    pub pairs: Vec<ExpansionPair>,
    pub original_text: String,
    pub expanded_text: String,
}

impl ExpansionMap {
    pub fn identity(text: &str) -> Self {
        Self {
            pairs: Vec::new(),
            original_text: text.to_owned(),
            expanded_text: text.to_owned(),
        }
    }

    /// True when no pair changed its surface.
    pub fn is_identity(&self) -> bool {
        !self.pairs.iter().any(ExpansionPair::is_replacement)
    }

    pub fn expanded_spans(&self) -> Vec<MentionSpan> {
        self.pairs.iter().map(|p| p.expanded.clone()).collect()
    }

    fn original_start(&self, pos: usize) -> usize {
        let mut delta = 0isize;
        for p in self.pairs.iter().filter(|p| p.is_replacement()) {
            if p.expanded.end <= pos {
                delta += p.delta();
            } else if p.expanded.start <= pos {
                return p.original.start;
            } else {
                break;
            }
        }
        (pos as isize - delta) as usize
    }

    fn original_end(&self, pos: usize) -> usize {
        let mut delta = 0isize;
        for p in self.pairs.iter().filter(|p| p.is_replacement()) {
            if p.expanded.end <= pos {
                delta += p.delta();
            } else if p.expanded.start < pos {
                return p.original.end;
            } else {
                break;
            }
        }
        (pos as isize - delta) as usize
    }

    /// Map a span of the expanded text back to the original text.
    ///
    /// Spans inside unchanged text are shifted by the length change of the
    /// replacements before them; a span touching a replacement widens to cover
    /// the whole original surface it came from.
    pub fn remap_span(&self, span: &MentionSpan) -> MentionSpan {
        let start = self.original_start(span.start);
        let end = self.original_end(span.end);
        MentionSpan::from_text(&self.original_text, start, end)
            .expect("remapped span lies within the original text")
    }
}

/// Replace, left to right, every annotated span whose surface has an expansion.
///
/// Spans are assumed valid against `doc_text`; overlapping spans after the
/// first are ignored.
pub fn apply_expansions(
    doc_text: &str,
    annotated_spans: &[MentionSpan],
    expansions: &ExpansionResult,
) -> ExpansionMap {
    let mut spans: Vec<&MentionSpan> = annotated_spans.iter().collect();
    spans.sort_by_key(|s| s.start);

    let chars: Vec<char> = doc_text.chars().collect();
    let mut expanded = String::with_capacity(doc_text.len());
    let mut pairs = Vec::with_capacity(spans.len());
    let mut cursor = 0;
    let mut shift = 0isize;
    for span in spans {
        if span.start < cursor {
            continue;
        }
        expanded.extend(&chars[cursor..span.start]);
        let replacement = expansions.get(&span.surface).unwrap_or(&span.surface);
        let new_start = (span.start as isize + shift) as usize;
        let new_len = char_len(replacement);
        expanded.push_str(replacement);
        pairs.push(ExpansionPair {
            original: span.clone(),
            expanded: MentionSpan {
                start: new_start,
                end: new_start + new_len,
                surface: replacement.to_owned(),
            },
        });
        shift += new_len as isize - span.len() as isize;
        cursor = span.end;
    }
    expanded.extend(&chars[cursor..]);
    ExpansionMap {
        pairs,
        original_text: doc_text.to_owned(),
        expanded_text: expanded,
    }
}
