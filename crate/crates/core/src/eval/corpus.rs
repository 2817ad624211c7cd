use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::KbDictionary;
use crate::text::{Annotation, Document, MentionSpan};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("line {line}: duplicate document id {id:?}")]
    DuplicateDocId { line: usize, id: String },
    #[error("reading corpus: {0}")]
    Io(#[from] io::Error),
}

/// One line of the gold JSONL format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldRecord {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub gold: Vec<GoldMention>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldMention {
    pub start: usize,
    pub end: usize,
    /// `None` for mentions of entities outside the knowledge graph.
    pub uri: Option<String>,
}

/// A benchmark dataset with gold annotations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldCorpus {
    pub name: String,
    pub docs: Vec<Document>,
    pub gold: BTreeMap<String, Vec<Annotation>>,
}

impl GoldCorpus {
    pub fn gold_count(&self) -> usize {
        self.gold.values().map(Vec::len).sum()
    }

    pub fn gold_for(&self, id: &str) -> &[Annotation] {
        self.gold.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Build from records, validating spans and ids. `line` numbers are 1-based
    /// positions of the records.
    pub fn from_records(
        name: impl Into<String>,
        records: impl IntoIterator<Item = (usize, GoldRecord)>,
    ) -> Result<Self, CorpusError> {
        let mut corpus = GoldCorpus {
            name: name.into(),
            ..Default::default()
        };
        let mut ids = HashSet::new();
        for (line, rec) in records {
            let malformed = |message: String| CorpusError::MalformedRecord { line, message };
            let doc = Document::new(rec.id.clone(), rec.text)
                .map_err(|e| malformed(format!("document {:?}: {e}", rec.id)))?;
            if !ids.insert(rec.id.clone()) {
                return Err(CorpusError::DuplicateDocId { line, id: rec.id });
            }
            let mut gold = Vec::with_capacity(rec.gold.len());
            for g in rec.gold {
                let span = MentionSpan::from_text(doc.text(), g.start, g.end)
                    .map_err(|e| malformed(format!("document {:?}: gold {e}", rec.id)))?;
                gold.push(Annotation {
                    span,
                    title: None,
                    uri: g.uri,
                });
            }
            gold.sort_by_key(|a| a.span.start);
            corpus.gold.insert(rec.id, gold);
            corpus.docs.push(doc);
        }
        Ok(corpus)
    }

    pub fn from_reader(name: &str, reader: impl BufRead) -> Result<(Self, Vec<String>), CorpusError> {
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: GoldRecord = serde_json::from_str(&line).map_err(|e| CorpusError::MalformedRecord {
                line: i + 1,
                message: e.to_string(),
            })?;
            records.push((i + 1, rec));
        }
        let corpus = Self::from_records(name, records)?;
        let mut warnings = Vec::new();
        if corpus.docs.is_empty() {
            warnings.push(format!("corpus {name} has no documents"));
        }
        Ok((corpus, warnings))
    }

    /// Load a JSONL corpus; the corpus is named after the file stem.
    pub fn load(path: impl AsRef<Path>) -> Result<(Self, Vec<String>), CorpusError> {
        let path = path.as_ref();
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "corpus".to_owned());
        let file = fs::File::open(path)?;
        Self::from_reader(&name, BufReader::new(file))
    }

    /// Remove gold mentions whose entity is not in the dictionary. Returns the
    /// filtered corpus and the number of excluded mentions.
    pub fn inkb_filter(&self, dict: &KbDictionary) -> (GoldCorpus, usize) {
        let mut excluded = 0;
        let gold = self
            .gold
            .iter()
            .map(|(id, anns)| {
                let kept: Vec<Annotation> = anns
                    .iter()
                    .filter(|a| a.uri.as_deref().is_some_and(|u| dict.contains_uri(u)))
                    .cloned()
                    .collect();
                excluded += anns.len() - kept.len();
                (id.clone(), kept)
            })
            .collect();
        (
            GoldCorpus {
                name: self.name.clone(),
                docs: self.docs.clone(),
                gold,
            },
            excluded,
        )
    }
}
