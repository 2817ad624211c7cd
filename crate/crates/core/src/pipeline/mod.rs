//! End-to-end annotation flow.
//!
//! Every mode follows the same outline: find mention spans, optionally augment
//! them with the chat model, disambiguate with the seq2seq model, align the
//! output to the original offsets and drop titles the dictionary does not know.
//!
//! | mode           | mention spans from                        | titles from              |
//! |----------------|-------------------------------------------|--------------------------|
//! | `joint`        | seq2seq `ner` on `text target_ner`        | seq2seq `ed`             |
//! | `external-ner` | ner-service                               | seq2seq `ed`             |
//! | `e2e`          | seq2seq `e2e` on raw text                 | seq2seq `e2e`            |
//! | `mixed`        | seq2seq `e2e` on raw text                 | seq2seq `ed`             |
//! | `llm-only`     | chat entity listing                       | seq2seq `ed`             |
//!
//! Augmentation failures never abort a document; they are recorded as
//! diagnostics and the unaugmented path is taken.

mod config;
mod trainset;

use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use config::{BackendSet, Mode, PipelineConfig};
pub use trainset::{build_training_samples, with_suffix, TrainingSample, ED_SUFFIX, NER_SUFFIX};

use crate::align::align_to_source;
use crate::augment::{
    apply_expansions, build_entity_listing_prompt, build_mention_expansion_prompt, merge_listed_spans,
    parse_entity_list_response, parse_expansion_response, ExpansionMap, ExpansionResult,
};
use crate::backend::{Backend, BackendError, ChatRequest, GenerationRequest, Task};
use crate::kb::{KbDictionary, KbError};
use crate::tagged::{encode_ner_target, parse_tagged, CodecError, TaggedSequence};
use crate::text::{Annotation, Document, MentionSpan, TextError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("backend unavailable during {stage}: {source}")]
    BackendUnavailable {
        stage: &'static str,
        #[source]
        source: BackendError,
    },
    #[error("backend failed during {stage}: {source}")]
    Backend {
        stage: &'static str,
        #[source]
        source: BackendError,
    },
    #[error(transparent)]
    Dictionary(#[from] KbError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Text(#[from] TextError),
}

impl From<BackendError> for PipelineError {
    fn from(e: BackendError) -> Self {
        PipelineError::Config(e.to_string())
    }
}

impl PipelineError {
    fn from_backend(stage: &'static str, source: BackendError) -> Self {
        if source.is_unavailable() {
            PipelineError::BackendUnavailable { stage, source }
        } else {
            PipelineError::Backend { stage, source }
        }
    }
}

/// Output annotation in the published JSON form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotationRecord {
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub title: Option<String>,
    pub uri: Option<String>,
}

impl From<&Annotation> for AnnotationRecord {
    fn from(a: &Annotation) -> Self {
        Self {
            start: a.span.start,
            end: a.span.end,
            surface: a.span.surface.clone(),
            title: a.title.clone(),
            uri: a.uri.clone(),
        }
    }
}

/// A document with its final, dictionary-checked annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkedDocument {
    pub doc: Document,
    /// Ascending, non-overlapping, original-document offsets; every uri set.
    pub annotations: Vec<Annotation>,
    pub diagnostics: Vec<String>,
}

/// Serialized form of a [`LinkedDocument`], fields in output order.
#[derive(Debug, Serialize)]
pub struct LinkedDocumentRecord<'a> {
    pub id: &'a str,
    pub annotations: Vec<AnnotationRecord>,
    pub diagnostics: &'a [String],
}

impl LinkedDocument {
    pub fn records(&self) -> Vec<AnnotationRecord> {
        self.annotations.iter().map(AnnotationRecord::from).collect()
    }

    pub fn record(&self) -> LinkedDocumentRecord<'_> {
        LinkedDocumentRecord {
            id: self.doc.id(),
            annotations: self.records(),
            diagnostics: &self.diagnostics,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.record()).expect("serializable")
    }
}

/// A configured pipeline. Cheap to clone and safe to share across threads.
#[derive(Debug, Clone)]
pub struct Pipeline {
    mode: Mode,
    mention_expansion: bool,
    ner_expansion: bool,
    dictionary: Arc<KbDictionary>,
    seq2seq: Option<Backend>,
    chat: Option<Backend>,
    ner: Option<Backend>,
}

pub struct PipelineBuilder {
    inner: Pipeline,
}

impl PipelineBuilder {
    pub fn mention_expansion(mut self, on: bool) -> Self {
        self.inner.mention_expansion = on;
        self
    }

    pub fn ner_expansion(mut self, on: bool) -> Self {
        self.inner.ner_expansion = on;
        self
    }

    pub fn seq2seq(mut self, b: Backend) -> Self {
        self.inner.seq2seq = Some(b);
        self
    }

    pub fn chat(mut self, b: Backend) -> Self {
        self.inner.chat = Some(b);
        self
    }

    pub fn ner_service(mut self, b: Backend) -> Self {
        self.inner.ner = Some(b);
        self
    }

    pub fn build(self) -> Result<Pipeline, PipelineError> {
        self.inner.check()?;
        Ok(self.inner)
    }
}

/// Per-document scratch state.
struct Run<'a> {
    doc: &'a Document,
    diagnostics: Vec<String>,
}

impl Run<'_> {
    fn note(&mut self, stage: &str, msg: impl std::fmt::Display) {
        self.diagnostics.push(format!("{stage}: {msg}"));
    }

    fn note_all(&mut self, stage: &str, msgs: Vec<String>) {
        for m in msgs {
            self.note(stage, m);
        }
    }
}

impl Pipeline {
    pub fn builder(mode: Mode, dictionary: Arc<KbDictionary>) -> PipelineBuilder {
        PipelineBuilder {
            inner: Pipeline {
                mode,
                mention_expansion: false,
                ner_expansion: false,
                dictionary,
                seq2seq: None,
                chat: None,
                ner: None,
            },
        }
    }

    /// Load the dictionary and connect every configured backend.
    pub fn from_config(cfg: &PipelineConfig) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let (dict, _) = KbDictionary::load(&cfg.dictionary)?;
        let mut b = Self::builder(cfg.mode, Arc::new(dict))
            .mention_expansion(cfg.mention_expansion)
            .ner_expansion(cfg.ner_expansion);
        if let Some(c) = &cfg.backends.seq2seq {
            b = b.seq2seq(Backend::connect(c)?);
        }
        if let Some(c) = &cfg.backends.chat {
            b = b.chat(Backend::connect(c)?);
        }
        if let Some(c) = &cfg.backends.ner_service {
            b = b.ner_service(Backend::connect(c)?);
        }
        b.build()
    }

    fn check(&self) -> Result<(), PipelineError> {
        config::check_requirements(
            self.mode,
            self.mention_expansion,
            self.ner_expansion,
            self.seq2seq.is_some(),
            self.chat.is_some(),
            self.ner.is_some(),
        )
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dictionary(&self) -> &KbDictionary {
        &self.dictionary
    }

    /// The same pipeline in another mode, if its backends allow it.
    pub fn with_mode(&self, mode: Mode) -> Result<Pipeline, PipelineError> {
        let p = Pipeline { mode, ..self.clone() };
        p.check()?;
        Ok(p)
    }

    /// Configured backends, for health checks.
    pub fn backends(&self) -> Vec<(&'static str, &Backend)> {
        [("seq2seq", &self.seq2seq), ("chat", &self.chat), ("ner_service", &self.ner)]
            .into_iter()
            .filter_map(|(n, b)| b.as_ref().map(|b| (n, b)))
            .collect()
    }

    fn seq2seq(&self) -> &Backend {
        self.seq2seq.as_ref().expect("checked at build")
    }

    fn generate(&self, stage: &'static str, task: Task, input: String) -> Result<String, PipelineError> {
        let req = GenerationRequest::new(task, input).map_err(|e| PipelineError::from_backend(stage, e))?;
        self.seq2seq().generate(&req).map_err(|e| PipelineError::from_backend(stage, e))
    }

    fn chat(&self, prompt: String) -> Result<String, BackendError> {
        let chat = self.chat.as_ref().expect("checked at build");
        chat.chat(&ChatRequest::new(prompt)?)
    }

    /// Link one document.
    pub fn run(&self, doc: &Document) -> Result<LinkedDocument, PipelineError> {
        let mut run = Run {
            doc,
            diagnostics: Vec::new(),
        };
        if doc.text().trim().is_empty() {
            return Ok(LinkedDocument {
                doc: doc.clone(),
                annotations: Vec::new(),
                diagnostics: Vec::new(),
            });
        }

        let (mut spans, e2e_output) = self.detect(&mut run)?;

        if self.ner_expansion && self.mode != Mode::LlmOnly {
            spans = self.expand_ner(&mut run, spans)?;
        }
        let map = if self.mention_expansion {
            self.expand_mentions(&mut run, &spans)
        } else {
            apply_expansions(doc.text(), &spans, &ExpansionResult::default())
        };

        let predicted = match (self.mode, e2e_output) {
            (Mode::E2e, Some(first)) if map.is_identity() => {
                let aligned = align_to_source(doc, &first, None);
                run.note_all("e2e", aligned.diagnostics);
                aligned.annotations
            }
            (Mode::E2e, _) => {
                let out = self.generate("e2e", Task::E2e, map.expanded_text.clone())?;
                let parsed = parse_tagged(&out, true);
                run.note_all("e2e", parsed.diagnostics.clone());
                let aligned = align_to_source(doc, &parsed, Some(&map));
                run.note_all("e2e", aligned.diagnostics);
                aligned.annotations
            }
            _ => self.disambiguate(&mut run, &map)?,
        };

        let annotations = self.finish(&mut run, predicted);
        Ok(LinkedDocument {
            doc: doc.clone(),
            annotations,
            diagnostics: run.diagnostics,
        })
    }

    /// Mention detection. For the e2e mode also returns the parsed first pass.
    fn detect(&self, run: &mut Run) -> Result<(Vec<MentionSpan>, Option<TaggedSequence>), PipelineError> {
        let doc = run.doc;
        match self.mode {
            Mode::Joint => {
                let out = self.generate("ner", Task::Ner, with_suffix(doc.text(), NER_SUFFIX))?;
                let parsed = parse_tagged(&out, false);
                Ok((self.spans_of(run, "ner", &parsed), None))
            }
            Mode::ExternalNer => {
                let ner = self.ner.as_ref().expect("checked at build");
                let (spans, diags) = ner
                    .detect_mentions(doc.text())
                    .map_err(|e| PipelineError::from_backend("ner", e))?;
                run.note_all("ner", diags);
                Ok((spans, None))
            }
            Mode::E2e | Mode::Mixed => {
                let out = self.generate("e2e", Task::E2e, doc.text().to_owned())?;
                let parsed = parse_tagged(&out, true);
                let spans = self.spans_of(run, "e2e", &parsed);
                Ok((spans, (self.mode == Mode::E2e).then_some(parsed)))
            }
            Mode::LlmOnly => {
                let reply = self
                    .chat(build_entity_listing_prompt(doc.text()))
                    .map_err(|e| PipelineError::from_backend("llm-ner", e))?;
                let candidates = parse_entity_list_response(&reply);
                if candidates.is_empty() {
                    run.note("llm-ner", "no entity list in reply");
                }
                Ok((merge_listed_spans(doc.text(), &[], &candidates), None))
            }
        }
    }

    /// Spans of a parsed sequence at document offsets; titles are ignored.
    fn spans_of(&self, run: &mut Run, stage: &str, parsed: &TaggedSequence) -> Vec<MentionSpan> {
        run.note_all(stage, parsed.diagnostics.clone());
        let aligned = align_to_source(run.doc, parsed, None);
        run.note_all(stage, aligned.diagnostics);
        aligned.annotations.into_iter().map(|a| a.span).collect()
    }

    fn expand_ner(&self, run: &mut Run, spans: Vec<MentionSpan>) -> Result<Vec<MentionSpan>, PipelineError> {
        match self.chat(build_entity_listing_prompt(run.doc.text())) {
            Ok(reply) => {
                let candidates = parse_entity_list_response(&reply);
                let merged = merge_listed_spans(run.doc.text(), &spans, &candidates);
                if merged.len() > spans.len() {
                    run.note("ner-expansion", format!("{} span(s) added", merged.len() - spans.len()));
                }
                Ok(merged)
            }
            Err(e) => {
                run.note("ner-expansion", format!("skipped: {e}"));
                Ok(spans)
            }
        }
    }

    fn expand_mentions(&self, run: &mut Run, spans: &[MentionSpan]) -> ExpansionMap {
        let text = run.doc.text();
        let none = || apply_expansions(text, spans, &ExpansionResult::default());
        let surfaces: Vec<&str> = spans.iter().map(|s| s.surface.as_str()).collect();
        let Ok(prompt) = build_mention_expansion_prompt(&surfaces, text) else {
            return none();
        };
        match self.chat(prompt) {
            Ok(reply) => {
                let allowed: HashSet<String> = surfaces.iter().map(|s| s.to_string()).collect();
                let (expansions, diags) = parse_expansion_response(&reply, &allowed);
                run.note_all("mention-expansion", diags);
                apply_expansions(text, spans, &expansions)
            }
            Err(e) => {
                run.note("mention-expansion", format!("skipped: {e}"));
                none()
            }
        }
    }

    /// Seq2seq disambiguation over the (possibly expanded) text.
    fn disambiguate(&self, run: &mut Run, map: &ExpansionMap) -> Result<Vec<Annotation>, PipelineError> {
        let spans = map.expanded_spans();
        if spans.is_empty() {
            return Ok(Vec::new());
        }
        let target = Document::new(run.doc.id(), map.expanded_text.clone())?;
        let tagged = encode_ner_target(&target, &spans)?;
        let out = self.generate("ed", Task::Ed, with_suffix(&tagged.raw, ED_SUFFIX))?;
        let parsed = parse_tagged(&out, true);
        run.note_all("ed", parsed.diagnostics.clone());
        let aligned = align_to_source(run.doc, &parsed, Some(map));
        run.note_all("ed", aligned.diagnostics);
        Ok(aligned.annotations)
    }

    /// Drop untitled and unknown-title annotations, filling in URIs.
    fn finish(&self, run: &mut Run, predicted: Vec<Annotation>) -> Vec<Annotation> {
        let mut titled = Vec::with_capacity(predicted.len());
        for a in predicted {
            match &a.title {
                Some(_) => titled.push(a),
                None => run.note("filter", format!("mention {:?} has no predicted title; dropped", a.span.surface)),
            }
        }
        let kept = self.dictionary.filter_annotations(&titled);
        if kept.len() < titled.len() {
            for a in titled.iter().filter(|a| !kept.iter().any(|k| k.span == a.span)) {
                run.note(
                    "filter",
                    format!("title {:?} not in dictionary; dropped", a.title.as_deref().unwrap_or_default()),
                );
            }
        }
        kept
    }
}
