use serde::{Deserialize, Serialize};

use crate::backend::Task;
use crate::tagged::{encode_ed_target, encode_ner_target, CodecError};
use crate::text::{Annotation, Document};

/// Suffix selecting mention detection on the joint model.
pub const NER_SUFFIX: &str = "target_ner";
/// Suffix selecting disambiguation on the joint model.
pub const ED_SUFFIX: &str = "target_el";

/// `text` followed by a single space and `suffix`.
pub fn with_suffix(text: &str, suffix: &str) -> String {
    format!("{text} {suffix}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingSample {
    pub input: String,
    pub target: String,
    pub task: Task,
}

/// The ner, ed and e2e fine-tuning samples for one gold-annotated document.
///
/// ```
/// use linkforge::pipeline::build_training_samples;
/// use linkforge::{Annotation, Document};
///
/// let doc = Document::new("d", "met in AK").unwrap();
/// let gold = [Annotation::new(doc.span(7, 9).unwrap(), "Alaska")];
/// let samples = build_training_samples(&doc, &gold).unwrap();
/// assert_eq!(samples[0].input, "met in AK target_ner");
/// assert_eq!(samples[0].target, "met in [BEGIN_ENT] AK [END_ENT]");
/// assert_eq!(samples[1].input, "met in [BEGIN_ENT] AK [END_ENT] target_el");
/// assert_eq!(samples[1].target, "met in [BEGIN_ENT] AK [END_ENT] [Alaska]");
/// assert_eq!(samples[2].input, "met in AK");
/// ```
pub fn build_training_samples(doc: &Document, gold: &[Annotation]) -> Result<Vec<TrainingSample>, CodecError> {
    let spans: Vec<_> = gold.iter().map(|a| a.span.clone()).collect();
    let ner = encode_ner_target(doc, &spans)?.raw;
    let ed = encode_ed_target(doc, gold)?.raw;
    Ok(vec![
        TrainingSample {
            input: with_suffix(doc.text(), NER_SUFFIX),
            target: ner.clone(),
            task: Task::Ner,
        },
        TrainingSample {
            input: with_suffix(&ner, ED_SUFFIX),
            target: ed.clone(),
            task: Task::Ed,
        },
        TrainingSample {
            input: doc.text().to_owned(),
            target: ed,
            task: Task::E2e,
        },
    ])
}
