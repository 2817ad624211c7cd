//! Entity linking with a jointly trained seq2seq model, LLM context
//! augmentation and dictionary-based hallucination filtering.
//!
//! The crate is organised bottom-up:
//!
//! - [`text`]: documents, spans and annotations (code-point offsets);
//! - [`tagged`]: the `[BEGIN_ENT] m [END_ENT] [Title]` codec;
//! - [`align`]: mapping generated text back to document offsets;
//! - [`kb`]: the title → URI dictionary;
//! - [`augment`]: mention expansion and NER expansion with a chat model;
//! - [`backend`]: HTTP and mock clients for the model servers;
//! - [`pipeline`]: the per-document flow in every inference mode;
//! - [`eval`]: InKB micro-F1 scoring.

pub mod align;
pub mod augment;
pub mod backend;
pub mod eval;
pub mod kb;
pub mod pipeline;
pub mod tagged;
pub mod text;

pub use kb::{KbDictionary, KbEntry};
pub use pipeline::{LinkedDocument, Mode, Pipeline, PipelineConfig};
pub use tagged::TaggedSequence;
pub use text::{Annotation, Document, MentionSpan};
