//! Alignment of model-generated tagged text back to document offsets.
//!
//! Generated text does not always reproduce the input verbatim. Three
//! strategies are tried in order: exact equality of the stripped text, equality
//! after removing all whitespace, and a greedy in-order search that tolerates
//! differing whitespace runs.

use crate::augment::ExpansionMap;
use crate::tagged::TaggedSequence;
use crate::text::{char_len, char_slice, Annotation, Document, MentionSpan};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alignment {
    pub annotations: Vec<Annotation>,
    pub diagnostics: Vec<String>,
}

/// How the stripped model text was matched to the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Strategy {
    Exact,
    Skeleton,
    Search,
}

fn skeleton_positions(chars: &[char]) -> Vec<usize> {
    chars
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(i, _)| i)
        .collect()
}

/// Whitespace-tolerant match of `mention` at `target[p..]`; returns the end position.
fn match_at(target: &[char], p: usize, mention: &[char]) -> Option<usize> {
    let (mut i, mut j) = (p, 0);
    while j < mention.len() {
        if mention[j].is_whitespace() {
            while j < mention.len() && mention[j].is_whitespace() {
                j += 1;
            }
            if i >= target.len() || !target[i].is_whitespace() {
                return None;
            }
            while i < target.len() && target[i].is_whitespace() {
                i += 1;
            }
        } else {
            if i >= target.len() || target[i] != mention[j] {
                return None;
            }
            i += 1;
            j += 1;
        }
    }
    Some(i)
}

fn search(target: &[char], from: usize, mention: &[char]) -> Option<(usize, usize)> {
    (from..target.len()).find_map(|p| match_at(target, p, mention).map(|e| (p, e)))
}

/// Locate every entry of `tagged` in the target text, returning target ranges.
fn locate(target: &str, tagged: &TaggedSequence, diagnostics: &mut Vec<String>) -> Vec<Option<(usize, usize)>> {
    let (stripped, offsets) = tagged.stripped();
    let strategy = if stripped == target {
        Strategy::Exact
    } else {
        let a: Vec<char> = stripped.chars().filter(|c| !c.is_whitespace()).collect();
        let b: Vec<char> = target.chars().filter(|c| !c.is_whitespace()).collect();
        if a == b {
            Strategy::Skeleton
        } else {
            Strategy::Search
        }
    };

    match strategy {
        Strategy::Exact => tagged
            .entries
            .iter()
            .zip(&offsets)
            .map(|(e, &off)| Some((off, off + char_len(&e.mention))))
            .collect(),
        Strategy::Skeleton => {
            let source: Vec<char> = stripped.chars().collect();
            let target_chars: Vec<char> = target.chars().collect();
            let target_skel = skeleton_positions(&target_chars);
            // Number of non-whitespace chars before each position of the stripped text.
            let mut before = Vec::with_capacity(source.len() + 1);
            let mut n = 0;
            for c in &source {
                before.push(n);
                if !c.is_whitespace() {
                    n += 1;
                }
            }
            tagged
                .entries
                .iter()
                .zip(&offsets)
                .map(|(e, &off)| {
                    let last = off + char_len(&e.mention) - 1;
                    Some((target_skel[before[off]], target_skel[before[last]] + 1))
                })
                .collect()
        }
        Strategy::Search => {
            let target_chars: Vec<char> = target.chars().collect();
            let mut cursor = 0;
            tagged
                .entries
                .iter()
                .map(|e| {
                    let mention: Vec<char> = e.mention.chars().collect();
                    match search(&target_chars, cursor, &mention) {
                        Some((s, end)) => {
                            cursor = end;
                            Some((s, end))
                        }
                        None => {
                            diagnostics.push(format!("mention {:?} not found in source text; dropped", e.mention));
                            None
                        }
                    }
                })
                .collect()
        }
    }
}

/// Turn tagged model output into annotations at `doc` offsets.
///
/// With `offset_map`, the tagged text is aligned against the expanded text and
/// spans are mapped back through it. Entries that cannot be placed, or that
/// would overlap an earlier entry, are dropped with a diagnostic.
pub fn align_to_source(doc: &Document, tagged: &TaggedSequence, offset_map: Option<&ExpansionMap>) -> Alignment {
    let mut diagnostics = Vec::new();
    let target = match offset_map {
        Some(map) => {
            if map.original_text != doc.text() {
                diagnostics.push("expansion map does not belong to this document; ignored".to_owned());
                doc.text()
            } else {
                map.expanded_text.as_str()
            }
        }
        None => doc.text(),
    };
    let use_map = offset_map.filter(|m| m.original_text == doc.text());

    let located = locate(target, tagged, &mut diagnostics);
    let mut annotations: Vec<Annotation> = Vec::new();
    for (entry, range) in tagged.entries.iter().zip(located) {
        let Some((start, end)) = range else { continue };
        let surface = char_slice(target, start, end).expect("located range within target");
        let in_target = MentionSpan {
            start,
            end,
            surface: surface.to_owned(),
        };
        let span = match use_map {
            Some(map) => map.remap_span(&in_target),
            None => in_target,
        };
        if let Some(prev) = annotations.last() {
            if prev.span.end > span.start {
                diagnostics.push(format!(
                    "mention {:?} at [{}, {}) overlaps a previous mention; dropped",
                    span.surface, span.start, span.end
                ));
                continue;
            }
        }
        annotations.push(Annotation {
            span,
            title: entry.title.clone(),
            uri: None,
        });
    }
    Alignment {
        annotations,
        diagnostics,
    }
}
