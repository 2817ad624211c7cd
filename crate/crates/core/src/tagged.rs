//! Tagged-sequence codec for model input and output.
//!
//! A mention is serialized in place as `[BEGIN_ENT] surface [END_ENT]`; in the
//! disambiguation form the closing tag is followed by ` [Title]`.
//!
//! ```
//! use linkforge::tagged::{encode_ed_target, parse_tagged};
//! use linkforge::{Annotation, Document};
//!
//! let doc = Document::new("d1", "met in AK").unwrap();
//! let ann = Annotation::new(doc.span(7, 9).unwrap(), "Alaska");
//! let seq = encode_ed_target(&doc, &[ann]).unwrap();
//! assert_eq!(seq.raw, "met in [BEGIN_ENT] AK [END_ENT] [Alaska]");
//!
//! let parsed = parse_tagged(&seq.raw, true);
//! assert_eq!(parsed.entries[0].mention, "AK");
//! assert_eq!(parsed.entries[0].title.as_deref(), Some("Alaska"));
//! ```

use serde::Serialize;
use thiserror::Error;

use crate::text::{
    char_len, find_tag_token, Annotation, Document, MentionSpan, TextError, BEGIN_ENT, END_ENT,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("spans [{}, {}) and [{}, {}) overlap", .0.start, .0.end, .1.start, .1.end)]
    OverlappingSpans(MentionSpan, MentionSpan),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error("annotation {0} has no title")]
    MissingTitle(usize),
    #[error("title {0:?} cannot be serialized (contains a bracket or tag token)")]
    InvalidTitle(String),
}

/// One mention found in a tagged sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaggedEntry {
    /// Mention text with surrounding whitespace trimmed.
    pub mention: String,
    pub title: Option<String>,
    /// Code-point offset of `mention` within the raw sequence.
    pub position: usize,
    /// Code-point range of the whole markup (tags, mention and title) within raw.
    pub markup_start: usize,
    pub markup_end: usize,
}

/// A model-facing string together with the mentions it carries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaggedSequence {
    pub raw: String,
    /// Left-to-right.
    pub entries: Vec<TaggedEntry>,
    /// Fragments skipped while parsing.
    pub diagnostics: Vec<String>,
}

impl TaggedSequence {
    /// The raw sequence with markup removed, plus each entry's mention offset in it.
    pub fn stripped(&self) -> (String, Vec<usize>) {
        let chars: Vec<char> = self.raw.chars().collect();
        let mut out = String::with_capacity(self.raw.len());
        let mut offsets = Vec::with_capacity(self.entries.len());
        let mut cursor = 0;
        let mut out_len = 0;
        for e in &self.entries {
            out.extend(&chars[cursor..e.markup_start]);
            out_len += e.markup_start - cursor;
            offsets.push(out_len);
            out.push_str(&e.mention);
            out_len += char_len(&e.mention);
            cursor = e.markup_end;
        }
        out.extend(&chars[cursor..]);
        (out, offsets)
    }

    /// Re-serialize from the inter-entity text and the entries using canonical markup.
    pub fn render(&self) -> String {
        let chars: Vec<char> = self.raw.chars().collect();
        let mut out = String::with_capacity(self.raw.len());
        let mut cursor = 0;
        for e in &self.entries {
            out.extend(&chars[cursor..e.markup_start]);
            push_markup(&mut out, &e.mention, e.title.as_deref());
            cursor = e.markup_end;
        }
        out.extend(&chars[cursor..]);
        out
    }
}

fn push_markup(out: &mut String, mention: &str, title: Option<&str>) {
    out.push_str(BEGIN_ENT);
    out.push(' ');
    out.push_str(mention);
    out.push(' ');
    out.push_str(END_ENT);
    if let Some(t) = title {
        out.push_str(" [");
        out.push_str(t);
        out.push(']');
    }
}

fn valid_title(t: &str) -> bool {
    !t.trim().is_empty() && !t.contains('[') && !t.contains(']') && find_tag_token(t).is_none()
}

fn encode(doc: &Document, items: Vec<(MentionSpan, Option<String>)>) -> Result<TaggedSequence, CodecError> {
    let text = doc.text();
    if let Some(tok) = find_tag_token(text) {
        return Err(TextError::TagTokenInText(tok).into());
    }
    let mut items = items;
    for (span, _) in &items {
        span.validate(text)?;
    }
    items.sort_by_key(|(s, _)| s.start);
    for w in items.windows(2) {
        if w[0].0.overlaps(&w[1].0) {
            return Err(CodecError::OverlappingSpans(w[0].0.clone(), w[1].0.clone()));
        }
    }

    let chars: Vec<char> = text.chars().collect();
    let mut raw = String::with_capacity(text.len() + items.len() * 24);
    let mut raw_len = 0;
    let mut entries = Vec::with_capacity(items.len());
    let mut cursor = 0;
    for (span, title) in items {
        raw.extend(&chars[cursor..span.start]);
        raw_len += span.start - cursor;
        let markup_start = raw_len;
        let before = raw.len();
        push_markup(&mut raw, &span.surface, title.as_deref());
        let markup_len = char_len(&raw[before..]);
        entries.push(TaggedEntry {
            position: markup_start + char_len(BEGIN_ENT) + 1,
            mention: span.surface,
            title,
            markup_start,
            markup_end: markup_start + markup_len,
        });
        raw_len += markup_len;
        cursor = span.end;
    }
    raw.extend(&chars[cursor..]);
    Ok(TaggedSequence {
        raw,
        entries,
        diagnostics: Vec::new(),
    })
}

/// Wrap every span of `doc` in entity tags.
pub fn encode_ner_target(doc: &Document, spans: &[MentionSpan]) -> Result<TaggedSequence, CodecError> {
    encode(doc, spans.iter().map(|s| (s.clone(), None)).collect())
}

/// Wrap every annotation in entity tags followed by its bracketed title.
pub fn encode_ed_target(doc: &Document, annotations: &[Annotation]) -> Result<TaggedSequence, CodecError> {
    let mut items = Vec::with_capacity(annotations.len());
    for (i, a) in annotations.iter().enumerate() {
        let title = a.title.as_deref().ok_or(CodecError::MissingTitle(i))?;
        if !valid_title(title) {
            return Err(CodecError::InvalidTitle(title.to_owned()));
        }
        items.push((a.span.clone(), Some(title.to_owned())));
    }
    encode(doc, items)
}

/// Maps byte offsets of a string to code-point offsets.
struct CharIndex {
    bytes: Vec<usize>,
}

impl CharIndex {
    fn new(s: &str) -> Self {
        Self {
            bytes: s.char_indices().map(|(b, _)| b).chain(std::iter::once(s.len())).collect(),
        }
    }

    fn cp(&self, byte: usize) -> usize {
        self.bytes.binary_search(&byte).expect("byte offset on a char boundary")
    }
}

/// Parse tagged model output. Never fails: malformed fragments are skipped and
/// reported in `diagnostics`.
pub fn parse_tagged(raw: &str, expect_titles: bool) -> TaggedSequence {
    let index = CharIndex::new(raw);
    let mut entries = Vec::new();
    let mut diagnostics = Vec::new();
    let mut pos = 0;
    let mut gap_start = 0;

    while let Some(found) = raw[pos..].find(BEGIN_ENT) {
        let open = pos + found;
        let inner_start = open + BEGIN_ENT.len();
        let close = raw[inner_start..].find(END_ENT);
        let next_open = raw[inner_start..].find(BEGIN_ENT);
        let close = match (close, next_open) {
            (None, _) => {
                diagnostics.push(format!("unclosed {BEGIN_ENT} at offset {}", index.cp(open)));
                break;
            }
            (Some(c), Some(n)) if n < c => {
                diagnostics.push(format!("unclosed {BEGIN_ENT} at offset {}", index.cp(open)));
                pos = inner_start + n;
                continue;
            }
            (Some(c), _) => inner_start + c,
        };
        let after = close + END_ENT.len();
        let inner = &raw[inner_start..close];
        let mention = inner.trim();
        if mention.is_empty() {
            diagnostics.push(format!("empty mention at offset {}", index.cp(open)));
            pos = after;
            continue;
        }
        let mention_byte = inner_start + (inner.len() - inner.trim_start().len());

        let mut title = None;
        let mut markup_end = after;
        if expect_titles {
            let rest = &raw[after..];
            let ws = rest.len() - rest.trim_start().len();
            let r = &rest[ws..];
            if r.starts_with('[') && !r.starts_with(BEGIN_ENT) && !r.starts_with(END_ENT) {
                match r[1..].find(']') {
                    Some(k) if valid_title(&r[1..1 + k]) => {
                        title = Some(r[1..1 + k].trim().to_owned());
                        markup_end = after + ws + k + 2;
                    }
                    _ => diagnostics.push(format!(
                        "dangling title after mention {mention:?} at offset {}",
                        index.cp(open)
                    )),
                }
            } else {
                diagnostics.push(format!("mention {mention:?} has no title"));
            }
        }

        if raw[gap_start..open].contains(END_ENT) {
            diagnostics.push(format!("stray {END_ENT} before offset {}", index.cp(open)));
        }
        entries.push(TaggedEntry {
            mention: mention.to_owned(),
            title,
            position: index.cp(mention_byte),
            markup_start: index.cp(open),
            markup_end: index.cp(markup_end),
        });
        pos = markup_end;
        gap_start = markup_end;
    }
    if raw[gap_start..].contains(END_ENT) {
        diagnostics.push(format!("stray {END_ENT} after offset {}", index.cp(gap_start)));
    }

    TaggedSequence {
        raw: raw.to_owned(),
        entries,
        diagnostics,
    }
}
