//! InKB micro precision, recall and F1 under strong matching.
//!
//! A prediction is correct only when its start, end and URI all equal a gold
//! annotation's. Gold mentions without a URI in the dictionary are dropped
//! before scoring, and counts are summed over documents before any ratio is
//! taken.

mod corpus;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use corpus::{CorpusError, GoldCorpus, GoldMention, GoldRecord};

use crate::kb::KbDictionary;
use crate::text::Annotation;

/// Label recorded in every report.
pub const MATCHING_MODE: &str = "strong";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("predictions reference unknown document {0:?}")]
    UnknownDocId(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Counts {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r > 0.0 {
            2.0 * p * r / (p + r)
        } else {
            0.0
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        *self = *self + o;
    }
}

/// Strong-match counts between one document's gold and predicted annotations.
pub fn match_strong(gold: &[Annotation], pred: &[Annotation]) -> Counts {
    let mut remaining: HashMap<(usize, usize, &str), usize> = HashMap::new();
    for g in gold {
        if let Some(uri) = g.uri.as_deref() {
            *remaining.entry((g.span.start, g.span.end, uri)).or_default() += 1;
        }
    }
    let mut tp = 0;
    for p in pred {
        let Some(uri) = p.uri.as_deref() else { continue };
        if let Some(n) = remaining.get_mut(&(p.span.start, p.span.end, uri)) {
            if *n > 0 {
                *n -= 1;
                tp += 1;
            }
        }
    }
    Counts {
        tp,
        fp: pred.len() - tp,
        fn_: gold.len() - tp,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocCounts {
    pub id: String,
    #[serde(flatten)]
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub corpus: String,
    pub matching: String,
    #[serde(flatten)]
    pub counts: Counts,
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    pub inkb_excluded_gold: usize,
    pub per_doc: Vec<DocCounts>,
}

impl EvalReport {
    pub fn summary_line(&self) -> String {
        format!(
            "{}: micro-P {:.3} micro-R {:.3} micro-F1 {:.3} (tp={} fp={} fn={}, inkb_excluded_gold={})",
            self.corpus,
            self.micro_precision,
            self.micro_recall,
            self.micro_f1,
            self.counts.tp,
            self.counts.fp,
            self.counts.fn_,
            self.inkb_excluded_gold
        )
    }
}

/// Score `predictions` (document id → annotations) against the InKB gold of
/// `corpus`. Documents without predictions count all their gold as missed.
pub fn evaluate(
    corpus: &GoldCorpus,
    predictions: &BTreeMap<String, Vec<Annotation>>,
    dict: &KbDictionary,
) -> Result<EvalReport, EvalError> {
    if let Some(id) = predictions.keys().find(|id| !corpus.gold.contains_key(*id)) {
        return Err(EvalError::UnknownDocId(id.clone()));
    }
    let (inkb, excluded) = corpus.inkb_filter(dict);
    let mut total = Counts::default();
    let mut per_doc = Vec::with_capacity(corpus.docs.len());
    for doc in &corpus.docs {
        let pred = predictions.get(doc.id()).map(Vec::as_slice).unwrap_or(&[]);
        let counts = match_strong(inkb.gold_for(doc.id()), pred);
        total += counts;
        per_doc.push(DocCounts {
            id: doc.id().to_owned(),
            counts,
        });
    }
    Ok(EvalReport {
        corpus: corpus.name.clone(),
        matching: MATCHING_MODE.to_owned(),
        counts: total,
        micro_precision: total.precision(),
        micro_recall: total.recall(),
        micro_f1: total.f1(),
        inkb_excluded_gold: excluded,
        per_doc,
    })
}

/// Mean micro-F1 over datasets, `None` when there are none.
pub fn average_f1(reports: &[EvalReport]) -> Option<f64> {
    (!reports.is_empty()).then(|| reports.iter().map(|r| r.micro_f1).sum::<f64>() / reports.len() as f64)
}

/// Plain-text table with one row per dataset and an average row when there
/// is more than one.
pub fn format_table(reports: &[EvalReport]) -> String {
    let width = reports.iter().map(|r| r.corpus.len()).max().unwrap_or(0).max(7);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}  {:>8}",
        "dataset", "P", "R", "F1", "tp", "fp", "fn", "excluded"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6.3}  {:>6.3}  {:>6.3}  {:>6}  {:>6}  {:>6}  {:>8}",
            r.corpus,
            r.micro_precision,
            r.micro_recall,
            r.micro_f1,
            r.counts.tp,
            r.counts.fp,
            r.counts.fn_,
            r.inkb_excluded_gold
        );
    }
    if reports.len() > 1 {
        let _ = writeln!(out, "{:<width$}  {:>6}  {:>6}  {:>6.3}", "Avg", "", "", average_f1(reports).unwrap_or(0.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::MentionSpan;

    fn ann(text: &str, s: usize, e: usize, uri: &str) -> Annotation {
        Annotation {
            span: MentionSpan::from_text(text, s, e).unwrap(),
            title: None,
            uri: Some(uri.to_owned()),
        }
    }

    const T: &str = "abcdefghijklmnopqrstuvwxyz";

    #[test]
    fn identical_lists() {
        let g = vec![ann(T, 0, 1, "a"), ann(T, 2, 3, "b"), ann(T, 4, 5, "c"), ann(T, 6, 7, "d")];
        assert_eq!(match_strong(&g, &g), Counts { tp: 4, fp: 0, fn_: 0 });
    }

    #[test]
    fn partial_overlap() {
        let g = vec![ann(T, 0, 1, "a"), ann(T, 2, 3, "b"), ann(T, 4, 5, "c"), ann(T, 6, 7, "d")];
        let p = vec![ann(T, 0, 1, "a"), ann(T, 2, 3, "b"), ann(T, 9, 10, "x")];
        assert_eq!(match_strong(&g, &p), Counts { tp: 2, fp: 1, fn_: 2 });
    }

    #[test]
    fn right_span_wrong_uri() {
        let g = vec![ann(T, 0, 1, "a")];
        let p = vec![ann(T, 0, 1, "z")];
        assert_eq!(match_strong(&g, &p), Counts { tp: 0, fp: 1, fn_: 1 });
    }

    #[test]
    fn micro_aggregation_example() {
        let c = Counts { tp: 2, fp: 0, fn_: 0 } + Counts { tp: 2, fp: 1, fn_: 2 };
        assert_eq!(c, Counts { tp: 4, fp: 1, fn_: 2 });
        assert!((c.precision() - 0.8).abs() < 1e-12);
        assert!((c.recall() - 4.0 / 6.0).abs() < 1e-12);
        assert!((c.f1() - 8.0 / 11.0).abs() < 1e-12);
        assert!((c.f1() - 0.7273).abs() < 1e-4);
        assert_eq!(Counts::default().f1(), 0.0);
    }

    fn corpus() -> (GoldCorpus, KbDictionary) {
        let body = "{\"id\":\"a\",\"text\":\"AK Jon\",\"gold\":[{\"start\":0,\"end\":2,\"uri\":\"u:AK\"},{\"start\":3,\"end\":6,\"uri\":null}]}\n\
                    {\"id\":\"b\",\"text\":\"Brad\",\"gold\":[{\"start\":0,\"end\":4,\"uri\":\"u:Brad\"}]}";
        let (c, _) = GoldCorpus::from_reader("t", body.as_bytes()).unwrap();
        (c, KbDictionary::from_entries([("Alaska", "u:AK"), ("Brad Pitt", "u:Brad")]))
    }

    #[test]
    fn evaluate_perfect_and_empty() {
        let (c, dict) = corpus();
        let (inkb, _) = c.inkb_filter(&dict);
        let preds: BTreeMap<_, _> = inkb.gold.clone().into_iter().collect();
        let r = evaluate(&c, &preds, &dict).unwrap();
        assert_eq!(r.micro_f1, 1.0);
        assert_eq!(r.inkb_excluded_gold, 1);
        assert_eq!(r.matching, "strong");

        let r = evaluate(&c, &BTreeMap::new(), &dict).unwrap();
        assert_eq!((r.micro_precision, r.micro_recall, r.micro_f1), (0.0, 0.0, 0.0));
        assert_eq!(r.counts.fn_, 2);
        assert_eq!(r.per_doc.len(), 2);
    }

    #[test]
    fn evaluate_rejects_unknown_doc() {
        let (c, dict) = corpus();
        let preds = BTreeMap::from([("zzz".to_owned(), Vec::new())]);
        assert_eq!(evaluate(&c, &preds, &dict), Err(EvalError::UnknownDocId("zzz".into())));
    }

    #[test]
    fn report_json_shape() {
        let (c, dict) = corpus();
        let r = evaluate(&c, &BTreeMap::new(), &dict).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["fn"], 2);
        assert_eq!(v["per_doc"][0]["id"], "a");
        let table = format_table(&[r.clone(), r]);
        assert!(table.lines().last().unwrap().starts_with("Avg"));
    }
}
