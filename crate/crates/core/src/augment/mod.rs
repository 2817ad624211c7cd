//! LLM-based context augmentation.
//!
//! Two strategies share this module. Mention expansion asks a chat model to
//! rewrite ambiguous surfaces ("AK") into linkable ones ("Alaska") and replaces
//! them in the text, keeping an [`ExpansionMap`] so results can be reported at
//! the original offsets. NER expansion asks for a list of entities and merges
//! the ones that occur verbatim as extra spans.

mod expand;
mod merge;
mod prompt;
mod response;

use thiserror::Error;

pub use expand::{apply_expansions, ExpansionMap, ExpansionPair, ExpansionResult};
pub use merge::merge_listed_spans;
pub use prompt::{build_entity_listing_prompt, build_mention_expansion_prompt};
pub use response::{parse_entity_list_response, parse_expansion_response};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AugmentError {
    #[error("mention list is empty")]
    EmptyMentionList,
}
