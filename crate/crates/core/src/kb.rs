//! Title → URI dictionary of the target knowledge graph and the hallucination
//! filter built on it.
//!
//! Lookups are exact after a small Wikipedia-style normalization: underscores
//! become spaces, whitespace runs collapse, the title is trimmed and its first
//! code point is uppercased. Nothing fuzzier is ever attempted.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, CONTROLS};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::Annotation;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("dictionary file {path} not found")]
    FileNotFound { path: String },
    #[error("dictionary {0} has no valid records")]
    EmptyDictionary(String),
    #[error("reading dictionary: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbEntry {
    pub title: String,
    pub uri: String,
}

/// Canonical lookup form of a title.
pub fn normalize_title(title: &str) -> String {
    let spaced = title.replace('_', " ");
    let collapsed = spaced.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut chars = collapsed.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Characters escaped when a title becomes a resource path segment.
const PATH_SEGMENT: &AsciiSet = &CONTROLS
    .add(b' ')
    .add(b'"')
    .add(b'#')
    .add(b'%')
    .add(b'<')
    .add(b'>')
    .add(b'?')
    .add(b'`')
    .add(b'{')
    .add(b'}')
    .add(b'|')
    .add(b'\\')
    .add(b'^');

/// Resource URI for `title` under `base`, Wikipedia style (`Brad Pitt` →
/// `base` + `Brad_Pitt`).
pub fn uri_for_title(base: &str, title: &str) -> String {
    let segment = normalize_title(title).replace(' ', "_");
    format!("{base}{}", utf8_percent_encode(&segment, PATH_SEGMENT))
}

/// Best-effort title from the last path segment of a resource URI.
pub fn title_from_uri(uri: &str) -> String {
    let segment = uri.trim_end_matches('/').rsplit('/').next().unwrap_or(uri);
    normalize_title(&percent_decode_str(segment).decode_utf8_lossy())
}

/// What happened while loading a dictionary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub loaded: usize,
    pub malformed_lines: usize,
    pub duplicates: usize,
    pub diagnostics: Vec<String>,
}

/// Read-only title dictionary.
#[derive(Debug, Clone, Default)]
pub struct KbDictionary {
    by_title: HashMap<String, KbEntry>,
    uris: HashSet<String>,
}

impl KbDictionary {
    /// Build from in-memory pairs; later duplicates of a normalized title are ignored.
    pub fn from_entries<T, U>(entries: impl IntoIterator<Item = (T, U)>) -> Self
    where
        T: Into<String>,
        U: Into<String>,
    {
        let mut dict = Self::default();
        for (t, u) in entries {
            let _ = dict.insert(t.into(), u.into());
        }
        dict
    }

    /// Returns false when the normalized title was already present.
    fn insert(&mut self, title: String, uri: String) -> bool {
        let key = normalize_title(&title);
        if self.by_title.contains_key(&key) {
            return false;
        }
        self.uris.insert(uri.clone());
        self.by_title.insert(key, KbEntry { title, uri });
        true
    }

    /// Parse `title<TAB>uri` records.
    pub fn from_reader(reader: impl BufRead, source: &str) -> Result<(Self, LoadReport), KbError> {
        let mut dict = Self::default();
        let mut report = LoadReport::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (title, uri) = match (fields.next(), fields.next(), fields.next()) {
                (Some(t), Some(u), None) if !t.trim().is_empty() && !u.trim().is_empty() => (t.trim(), u.trim()),
                _ => {
                    report.malformed_lines += 1;
                    report.diagnostics.push(format!("{source}:{}: malformed record skipped", i + 1));
                    continue;
                }
            };
            if dict.insert(title.to_owned(), uri.to_owned()) {
                report.loaded += 1;
            } else {
                report.duplicates += 1;
                report
                    .diagnostics
                    .push(format!("{source}:{}: duplicate title {title:?} ignored", i + 1));
            }
        }
        if dict.is_empty() {
            return Err(KbError::EmptyDictionary(source.to_owned()));
        }
        Ok((dict, report))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Self, LoadReport), KbError> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound => KbError::FileNotFound {
                path: path.display().to_string(),
            },
            _ => KbError::Io(e),
        })?;
        Self::from_reader(BufReader::new(file), &path.display().to_string())
    }

    pub fn len(&self) -> usize {
        self.by_title.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_title.is_empty()
    }

    pub fn resolve_title(&self, title: &str) -> Option<&KbEntry> {
        self.by_title.get(&normalize_title(title))
    }

    pub fn contains_uri(&self, uri: &str) -> bool {
        self.uris.contains(uri)
    }

    /// Title for `uri`, by linear scan.
    pub fn title_for_uri(&self, uri: &str) -> Option<&str> {
        self.by_title.values().find(|e| e.uri == uri).map(|e| e.title.as_str())
    }

    /// Entries sorted by title.
    pub fn entries(&self) -> Vec<&KbEntry> {
        let mut v: Vec<_> = self.by_title.values().collect();
        v.sort_by(|a, b| a.title.cmp(&b.title));
        v
    }

    /// Keep only annotations whose title resolves, filling in their URIs.
    pub fn filter_annotations(&self, anns: &[Annotation]) -> Vec<Annotation> {
        anns.iter()
            .filter_map(|a| {
                let entry = self.resolve_title(a.title.as_deref()?)?;
                Some(Annotation {
                    span: a.span.clone(),
                    title: a.title.clone(),
                    uri: Some(entry.uri.clone()),
                })
            })
            .collect()
    }
}
