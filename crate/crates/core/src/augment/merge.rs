use std::collections::{BTreeMap, HashSet};

use crate::text::MentionSpan;

/// Occupied code-point intervals keyed by start.
#[derive(Default)]
struct Occupied(BTreeMap<usize, usize>);

impl Occupied {
    fn is_free(&self, start: usize, end: usize) -> bool {
        let before = self.0.range(..end).next_back();
        !matches!(before, Some((_, &e)) if e > start)
    }

    fn insert(&mut self, start: usize, end: usize) {
        self.0.insert(start, end);
    }
}

/// Add LLM-listed entity surfaces as new spans without disturbing existing ones.
///
/// Candidates that do not occur verbatim in `doc_text` are dropped. Longer
/// candidates go first; every occurrence is added unless it overlaps an existing
/// or previously added span. The result is sorted and non-overlapping.
pub fn merge_listed_spans<S: AsRef<str>>(doc_text: &str, existing: &[MentionSpan], candidates: &[S]) -> Vec<MentionSpan> {
    let chars: Vec<char> = doc_text.chars().collect();
    let mut seen = HashSet::new();
    let mut cands: Vec<Vec<char>> = candidates
        .iter()
        .map(AsRef::as_ref)
        .filter(|c| !c.is_empty() && seen.insert(*c))
        .map(|c| c.chars().collect())
        .collect();
    cands.sort_by_key(|c: &Vec<char>| std::cmp::Reverse(c.len()));

    let mut occupied = Occupied::default();
    for s in existing {
        occupied.insert(s.start, s.end);
    }
    let mut out: Vec<MentionSpan> = existing.to_vec();
    for cand in &cands {
        if cand.len() > chars.len() {
            continue;
        }
        for start in 0..=chars.len() - cand.len() {
            let end = start + cand.len();
            if chars[start..end] == cand[..] && occupied.is_free(start, end) {
                occupied.insert(start, end);
                out.push(MentionSpan {
                    start,
                    end,
                    surface: cand.iter().collect(),
                });
            }
        }
    }
    out.sort_by_key(|s| s.start);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ANGELINA: &str = "Angelina met her partner Brad and her father Jon in AK";

    fn ranges(spans: &[MentionSpan]) -> Vec<(usize, usize)> {
        spans.iter().map(|s| (s.start, s.end)).collect()
    }

    #[test]
    fn worked_example() {
        let brad = MentionSpan::from_text(ANGELINA, 25, 29).unwrap();
        let out = merge_listed_spans(ANGELINA, &[brad], &["Brad Pitt", "partner Brad", "Jon"]);
        assert_eq!(ranges(&out), vec![(25, 29), (45, 48)]);
        assert_eq!(out[1].surface, "Jon");
    }

    #[test]
    fn no_candidates() {
        let brad = MentionSpan::from_text(ANGELINA, 25, 29).unwrap();
        let none: [&str; 0] = [];
        assert_eq!(merge_listed_spans(ANGELINA, std::slice::from_ref(&brad), &none), vec![brad]);
    }

    #[test]
    fn every_occurrence_added() {
        let out = merge_listed_spans("AK to AK", &[], &["AK"]);
        assert_eq!(ranges(&out), vec![(0, 2), (6, 8)]);
    }

    #[test]
    fn longest_first_wins() {
        let out = merge_listed_spans("New York City", &[], &["York", "New York City", "New York"]);
        assert_eq!(ranges(&out), vec![(0, 13)]);
    }

    #[test]
    fn self_overlapping_occurrences() {
        let out = merge_listed_spans("aaaa", &[], &["aa"]);
        assert_eq!(ranges(&out), vec![(0, 2), (2, 4)]);
    }
}
