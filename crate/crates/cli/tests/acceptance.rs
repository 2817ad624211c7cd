//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Generators are seeded so every run checks the same cases.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};
use std::{process, thread};

use linkforge::align::align_to_source;
use linkforge::augment::{apply_expansions, merge_listed_spans, ExpansionResult};
use linkforge::backend::{Backend, MockBackend, MockFixture, Task};
use linkforge::eval::{evaluate, match_strong, GoldCorpus, GoldMention, GoldRecord};
use linkforge::tagged::{encode_ed_target, encode_ner_target, parse_tagged};
use linkforge::{Annotation, Document, KbDictionary, MentionSpan, Mode, Pipeline, PipelineConfig};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

const SEED: u64 = 0x11_4b_f0_67;
const CODEC_CASES: usize = 1000;
const CODEC_TIME_LIMIT: Duration = Duration::from_secs(5);
const EXPANSION_CASES: usize = 1000;
const MERGE_TRIALS: usize = 500;
const METRIC_CORPORA: usize = 500;
const METRIC_MAX_DOCS: usize = 5;
const METRIC_MAX_SPANS: usize = 6;
/// Float tolerance when comparing a computed ratio to its exact rational value.
const RATIO_TOL: f64 = 1e-12;
/// Tolerance for the worked micro-F1 example against 8/11.
const WORKED_F1_TOL: f64 = 1e-9;
const KORE50_DOCS: usize = 48;
const KORE50_INKB_GOLD: usize = 139;
const SUITE_TIME_LIMIT: Duration = Duration::from_secs(120);

const SENTENCE: &str = "Angelina met her partner Brad and her father Jon in AK";
const NER_OUT: &str = "[BEGIN_ENT] Angelina [END_ENT] met her partner [BEGIN_ENT] Brad [END_ENT] and her father [BEGIN_ENT] Jon [END_ENT] in [BEGIN_ENT] AK [END_ENT]";

const WORDS: &[&str] = &[
    "Angelina", "Brad", "Jon", "AK", "met", "in", "Zoë", "東京", "São", "Paulo", "x-y", "a.b", "Ünïcödé", "🙂", "R&B",
    "(band)", "O'Neil", "42",
];
const SEPS: &[&str] = &[" ", " ", " ", "  ", ", ", "\n", "\t", ". "];
const TITLES: &[&str] = &["Alaska", "Brad Pitt", "Tokyo", "Jon Voight", "Q (band)", "São Paulo", "Zoë Kravitz"];

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// A random document as a list of words with the separator following each.
fn random_words(rng: &mut StdRng, max: usize) -> Vec<(&'static str, &'static str)> {
    let n = rng.random_range(1..=max);
    (0..n).map(|_| (*WORDS.choose(rng).unwrap(), *SEPS.choose(rng).unwrap())).collect()
}

/// Text plus non-overlapping spans covering 1-3 whole words each, computed by
/// direct counting while the text is assembled.
fn random_doc(rng: &mut StdRng) -> (String, Vec<(usize, usize, String)>) {
    let words = random_words(rng, 14);
    let mut starts = Vec::new();
    let mut text = String::new();
    for (w, s) in &words {
        starts.push((text.chars().count(), text.chars().count() + w.chars().count()));
        text.push_str(w);
        text.push_str(s);
    }
    let mut spans = Vec::new();
    let mut i = 0;
    while i < words.len() {
        if rng.random_bool(0.4) {
            let k = rng.random_range(1..=3).min(words.len() - i);
            let (s, _) = starts[i];
            let (_, e) = starts[i + k - 1];
            let surface: String = text.chars().skip(s).take(e - s).collect();
            spans.push((s, e, surface));
            i += k;
        } else {
            i += 1;
        }
    }
    (text, spans)
}

type Criterion = fn() -> Result<String, String>;

struct Outcome {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
        Ok(Ok(detail)) => Outcome { name, ok: true, detail },
        Ok(Err(detail)) => Outcome { name, ok: false, detail },
        Err(p) => Outcome {
            name,
            ok: false,
            detail: format!(
                "panicked: {}",
                p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
            ),
        },
    }
}

fn codec_round_trip() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(SEED);
    let started = Instant::now();
    let mut spans_checked = 0;
    for case in 0..CODEC_CASES {
        let (text, expected) = random_doc(&mut rng);
        let doc = Document::new(format!("c{case}"), text.clone()).unwrap();
        let spans: Vec<MentionSpan> = expected
            .iter()
            .map(|(s, e, surface)| MentionSpan { start: *s, end: *e, surface: surface.clone() })
            .collect();
        let mut shuffled = spans.clone();
        shuffled.reverse();

        let ner = encode_ner_target(&doc, &shuffled).map_err(|e| format!("case {case}: encode: {e}"))?;
        let got: Vec<(usize, usize, String)> = align_to_source(&doc, &parse_tagged(&ner.raw, false), None)
            .annotations
            .into_iter()
            .map(|a| (a.span.start, a.span.end, a.span.surface))
            .collect();
        if got != expected {
            return Err(format!("case {case}: ner spans {got:?} != {expected:?} for {text:?}"));
        }

        let titles: Vec<&str> = (0..spans.len()).map(|_| *TITLES.choose(&mut rng).unwrap()).collect();
        let anns: Vec<Annotation> = spans.iter().zip(&titles).map(|(s, t)| Annotation::new(s.clone(), *t)).collect();
        let ed = encode_ed_target(&doc, &anns).map_err(|e| format!("case {case}: encode ed: {e}"))?;
        let got: Vec<(usize, usize, String, String)> = align_to_source(&doc, &parse_tagged(&ed.raw, true), None)
            .annotations
            .into_iter()
            .map(|a| (a.span.start, a.span.end, a.span.surface, a.title.unwrap_or_default()))
            .collect();
        let want: Vec<(usize, usize, String, String)> = expected
            .iter()
            .zip(&titles)
            .map(|((s, e, m), t)| (*s, *e, m.clone(), t.to_string()))
            .collect();
        if got != want {
            return Err(format!("case {case}: ed pairs {got:?} != {want:?}"));
        }
        spans_checked += expected.len();
    }
    let elapsed = started.elapsed();
    if elapsed > CODEC_TIME_LIMIT {
        return Err(format!("took {elapsed:?}, limit {CODEC_TIME_LIMIT:?}"));
    }
    Ok(format!("{CODEC_CASES} cases, {spans_checked} spans, ner+ed, {:.2}s", elapsed.as_secs_f64()))
}

fn expansion_round_trip() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 1);
    let pool = ["Angelina Jolie", "Alaska", "Brad Pitt", "X", "東京都", "São Paulo, Brazil", "J"];
    let mut mapped = 0;
    for case in 0..EXPANSION_CASES {
        let (text, spans) = random_doc(&mut rng);
        let surfaces: BTreeSet<&str> = spans.iter().map(|s| s.2.as_str()).collect();
        let mut chosen = Vec::new();
        for s in surfaces {
            if rng.random_bool(0.6) {
                chosen.push((s, *pool.choose(&mut rng).unwrap()));
            }
        }
        let exp: ExpansionResult = chosen.into_iter().collect();
        let spans_ms: Vec<MentionSpan> =
            spans.iter().map(|(s, e, m)| MentionSpan { start: *s, end: *e, surface: m.clone() }).collect();
        let map = apply_expansions(&text, &spans_ms, &exp);

        // Independent construction of the expanded text and the regions.
        let chars: Vec<char> = text.chars().collect();
        let mut want = String::new();
        let mut outside_orig = Vec::new();
        let mut cursor = 0;
        for (s, e, m) in &spans {
            let gap: String = chars[cursor..*s].iter().collect();
            want.push_str(&gap);
            outside_orig.push(gap);
            want.push_str(exp.get(m).unwrap_or(m));
            cursor = *e;
        }
        let tail: String = chars[cursor..].iter().collect();
        want.push_str(&tail);
        outside_orig.push(tail);
        if map.expanded_text != want {
            return Err(format!("case {case}: expanded text {:?} != {want:?}", map.expanded_text));
        }

        let ex_chars: Vec<char> = map.expanded_text.chars().collect();
        let mut outside_new = Vec::new();
        let mut cursor = 0;
        for p in &map.pairs {
            let back = map.remap_span(&p.expanded);
            if back != p.original {
                return Err(format!("case {case}: remap {:?} -> {back:?}, want {:?}", p.expanded, p.original));
            }
            let got: String = ex_chars[p.expanded.start..p.expanded.end].iter().collect();
            if got != p.expanded.surface {
                return Err(format!("case {case}: expanded span surface mismatch"));
            }
            outside_new.push(ex_chars[cursor..p.expanded.start].iter().collect::<String>());
            cursor = p.expanded.end;
            mapped += 1;
        }
        outside_new.push(ex_chars[cursor..].iter().collect());
        if outside_new != outside_orig {
            return Err(format!("case {case}: text outside replacements differs"));
        }
        if map.pairs.len() != spans.len() {
            return Err(format!("case {case}: {} pairs for {} spans", map.pairs.len(), spans.len()));
        }
    }
    Ok(format!("{EXPANSION_CASES} scenarios, {mapped} mapped spans"))
}

/// Brute force: every occurrence of every candidate, ordered longest first,
/// then by first listing, then by position; accepted when free.
fn merge_oracle(text: &str, existing: &[(usize, usize)], cands: &[&str]) -> BTreeSet<(usize, usize)> {
    let chars: Vec<char> = text.chars().collect();
    let mut order: Vec<&str> = Vec::new();
    for c in cands {
        if !c.is_empty() && !order.contains(c) {
            order.push(c);
        }
    }
    let mut occurrences = Vec::new();
    for (rank, c) in order.iter().enumerate() {
        let cc: Vec<char> = c.chars().collect();
        for start in 0..chars.len() {
            if chars[start..].starts_with(&cc) {
                occurrences.push((std::cmp::Reverse(cc.len()), rank, start, start + cc.len()));
            }
        }
    }
    occurrences.sort();
    let mut taken: Vec<(usize, usize)> = existing.to_vec();
    for (_, _, s, e) in occurrences {
        if taken.iter().all(|&(ts, te)| e <= ts || te <= s) {
            taken.push((s, e));
        }
    }
    taken.into_iter().collect()
}

fn merge_rule() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 2);
    let cand_pool = [
        "Brad", "Jon", "AK", "Angelina", "Jon in", "in", "n", "met Brad", "Zoë", "東京", "a", "Paulo", "São Paulo", "missing",
        "Brad  Jon",
    ];
    let mut added = 0;
    for trial in 0..MERGE_TRIALS {
        let (text, spans) = random_doc(&mut rng);
        let existing: Vec<MentionSpan> =
            spans.iter().map(|(s, e, m)| MentionSpan { start: *s, end: *e, surface: m.clone() }).collect();
        let k = rng.random_range(0..6);
        let cands: Vec<&str> = (0..k).map(|_| *cand_pool.choose(&mut rng).unwrap()).collect();
        let got = merge_listed_spans(&text, &existing, &cands);
        let got_set: BTreeSet<(usize, usize)> = got.iter().map(|s| (s.start, s.end)).collect();
        let want = merge_oracle(&text, &spans.iter().map(|(s, e, _)| (*s, *e)).collect::<Vec<_>>(), &cands);
        if got_set != want || got_set.len() != got.len() {
            return Err(format!("trial {trial}: {got_set:?} != oracle {want:?} (text {text:?}, cands {cands:?})"));
        }
        for s in &got {
            if s.validate(&text).is_err() {
                return Err(format!("trial {trial}: invalid span {s:?}"));
            }
        }
        added += got.len() - existing.len();
    }
    Ok(format!("{MERGE_TRIALS} trials, {added} spans added, exact agreement"))
}

fn metric_oracle() -> Result<String, String> {
    // Worked example: doc A (2,0,0), doc B (2,1,2).
    let text = "abcdefghijklmnopqrstuvwxyz";
    let sp = |s: usize| MentionSpan::from_text(text, s, s + 1).unwrap();
    let ann = |s: usize, u: &str| Annotation { span: sp(s), title: None, uri: Some(u.to_owned()) };
    let a = match_strong(&[ann(0, "a"), ann(2, "b")], &[ann(0, "a"), ann(2, "b")]);
    let b = match_strong(&[ann(0, "a"), ann(2, "b"), ann(4, "c"), ann(6, "d")], &[ann(0, "a"), ann(2, "b"), ann(8, "x")]);
    let total = a + b;
    if (total.tp, total.fp, total.fn_) != (4, 1, 2) {
        return Err(format!("worked example counts {total:?}"));
    }
    let f1 = total.f1();
    if (f1 - 8.0 / 11.0).abs() > WORKED_F1_TOL || format!("{f1:.4}") != "0.7273" {
        return Err(format!("worked example F1 {f1}"));
    }

    let mut rng = StdRng::seed_from_u64(SEED ^ 3);
    let uris = ["u:a", "u:b", "u:c", "u:out"];
    let dict = KbDictionary::from_entries([("A", "u:a"), ("B", "u:b"), ("C", "u:c")]);
    let in_kb: HashSet<&str> = ["u:a", "u:b", "u:c"].into();
    let slot_text = "0123456789012345678901234567890123456789";
    let random_list = |rng: &mut StdRng, null_ok: bool| -> Vec<(usize, usize, Option<String>)> {
        let n = rng.random_range(0..=METRIC_MAX_SPANS);
        let mut slots: Vec<usize> = (0..8).collect();
        let mut out = Vec::new();
        for _ in 0..n {
            let i = rng.random_range(0..slots.len());
            let slot = slots.swap_remove(i);
            let len = rng.random_range(1..=4);
            let uri = if null_ok && rng.random_bool(0.15) { None } else { Some(uris.choose(rng).unwrap().to_string()) };
            out.push((slot * 5, slot * 5 + len, uri));
        }
        out.sort();
        out
    };
    for trial in 0..METRIC_CORPORA {
        let ndocs = rng.random_range(1..=METRIC_MAX_DOCS);
        let mut records = Vec::new();
        let mut preds: BTreeMap<String, Vec<Annotation>> = BTreeMap::new();
        let (mut tp, mut fp, mut fneg) = (0u64, 0u64, 0u64);
        for d in 0..ndocs {
            let id = format!("d{d}");
            let gold = random_list(&mut rng, true);
            let pred: Vec<(usize, usize, String)> =
                random_list(&mut rng, false).into_iter().map(|(s, e, u)| (s, e, u.unwrap())).collect();
            let gold_inkb: BTreeSet<(usize, usize, String)> = gold
                .iter()
                .filter_map(|(s, e, u)| u.as_ref().filter(|u| in_kb.contains(u.as_str())).map(|u| (*s, *e, u.clone())))
                .collect();
            let pred_set: BTreeSet<(usize, usize, String)> = pred.iter().cloned().collect();
            let inter = gold_inkb.intersection(&pred_set).count() as u64;
            tp += inter;
            fp += pred_set.len() as u64 - inter;
            fneg += gold_inkb.len() as u64 - inter;
            records.push(GoldRecord {
                id: id.clone(),
                text: slot_text.to_owned(),
                gold: gold.iter().map(|(s, e, u)| GoldMention { start: *s, end: *e, uri: u.clone() }).collect(),
            });
            if rng.random_bool(0.9) {
                preds.insert(
                    id,
                    pred.iter()
                        .map(|(s, e, u)| Annotation {
                            span: MentionSpan::from_text(slot_text, *s, *e).unwrap(),
                            title: None,
                            uri: Some(u.clone()),
                        })
                        .collect(),
                );
            } else {
                // Documents without predictions count all their gold as missed.
                fp -= pred_set.len() as u64 - inter;
                tp -= inter;
                fneg += inter;
            }
        }
        let corpus = GoldCorpus::from_records("r", records.into_iter().enumerate()).unwrap();
        let r = evaluate(&corpus, &preds, &dict).map_err(|e| e.to_string())?;
        let counts = (r.counts.tp as u64, r.counts.fp as u64, r.counts.fn_ as u64);
        if counts != (tp, fp, fneg) {
            return Err(format!("trial {trial}: counts {counts:?} != oracle {:?}", (tp, fp, fneg)));
        }
        let ratio = |n: u64, d: u64| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        let want = [ratio(tp, tp + fp), ratio(tp, tp + fneg), ratio(2 * tp, 2 * tp + fp + fneg)];
        let got = [r.micro_precision, r.micro_recall, r.micro_f1];
        if got.iter().zip(&want).any(|(g, w)| (g - w).abs() > RATIO_TOL) {
            return Err(format!("trial {trial}: P/R/F1 {got:?} != {want:?}"));
        }
    }
    Ok(format!("worked example F1 = {f1:.10}; {METRIC_CORPORA} random corpora agree"))
}

fn angelina_pipeline(ed_output: &str) -> Pipeline {
    let dict = KbDictionary::load(fixtures().join("angelina/kb.tsv")).unwrap().0;
    let fx = MockFixture::default()
        .with_generate(Task::Ner, format!("{SENTENCE} target_ner"), NER_OUT)
        .with_generate(Task::Ed, format!("{NER_OUT} target_el"), ed_output);
    Pipeline::builder(Mode::Joint, Arc::new(dict))
        .seq2seq(Backend::new(MockBackend::from_fixture(fx)))
        .build()
        .unwrap()
}

fn golden_end_to_end() -> Result<String, String> {
    let cfg = PipelineConfig::from_file(fixtures().join("angelina/joint.json")).map_err(|e| e.to_string())?;
    if cfg.mode != Mode::Joint {
        return Err("fixture config is not joint mode".into());
    }
    let doc = Document::new("angelina", SENTENCE).unwrap();
    let run = || {
        let p = Pipeline::from_config(&cfg).unwrap();
        serde_json::to_string(&p.run(&doc).unwrap().record()).unwrap()
    };
    let first = run();
    let second = run();
    if first != second {
        return Err("outputs differ between runs".into());
    }
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    let got: Vec<(u64, u64, &str, &str, &str)> = v["annotations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| {
            (
                a["start"].as_u64().unwrap(),
                a["end"].as_u64().unwrap(),
                a["surface"].as_str().unwrap(),
                a["title"].as_str().unwrap(),
                a["uri"].as_str().unwrap(),
            )
        })
        .collect();
    let want = vec![
        (0, 8, "Angelina", "Angelina Jolie", "http://dbpedia.org/resource/Angelina_Jolie"),
        (25, 29, "Brad", "Brad Pitt", "http://dbpedia.org/resource/Brad_Pitt"),
        (45, 48, "Jon", "Jon Voight", "http://dbpedia.org/resource/Jon_Voight"),
        (52, 54, "AK", "Alaska", "http://dbpedia.org/resource/Alaska"),
    ];
    if got != want {
        return Err(format!("annotations {got:?}"));
    }
    Ok(format!("4 annotations, {} bytes identical across runs", first.len()))
}

fn hallucination_filter() -> Result<String, String> {
    let doc = Document::new("angelina", SENTENCE).unwrap();
    let titles = ["Angelina Jolie", "Brad Pitt", "Jon Voight", "Alaska"];
    let surfaces = ["Angelina", "Brad", "Jon", "AK"];
    let ed = |titles: &[&str]| {
        format!(
            "[BEGIN_ENT] {} [END_ENT] [{}] met her partner [BEGIN_ENT] {} [END_ENT] [{}] and her father [BEGIN_ENT] {} [END_ENT] [{}] in [BEGIN_ENT] {} [END_ENT] [{}]",
            surfaces[0], titles[0], surfaces[1], titles[1], surfaces[2], titles[2], surfaces[3], titles[3]
        )
    };
    let baseline = angelina_pipeline(&ed(&titles)).run(&doc).map_err(|e| e.to_string())?.annotations;
    if baseline.len() != 4 {
        return Err(format!("baseline has {} annotations", baseline.len()));
    }
    for victim in 0..4 {
        let mut injected = titles;
        injected[victim] = "Jon Voigt the Elder";
        let got = angelina_pipeline(&ed(&injected)).run(&doc).map_err(|e| e.to_string())?.annotations;
        let want: Vec<Annotation> =
            baseline.iter().enumerate().filter(|(i, _)| *i != victim).map(|(_, a)| a.clone()).collect();
        if got != want {
            return Err(format!("injecting at {victim}: {got:?}"));
        }
    }
    Ok("each of 4 injected titles removed alone".into())
}

fn corpus_ingestion() -> Result<String, String> {
    let dir = fixtures().join("kore50-shape");
    let (corpus, _) = GoldCorpus::load(dir.join("corpus.jsonl")).map_err(|e| e.to_string())?;
    let (dict, _) = KbDictionary::load(dir.join("kb.tsv")).map_err(|e| e.to_string())?;
    let (inkb, excluded) = corpus.inkb_filter(&dict);
    let (docs, gold) = (corpus.docs.len(), inkb.gold_count());
    if (docs, gold) != (KORE50_DOCS, KORE50_INKB_GOLD) {
        return Err(format!("{docs} docs, {gold} InKB gold"));
    }
    Ok(format!("{docs} docs, {gold} InKB gold ({excluded} excluded)"))
}

fn start_service(config: &str) -> String {
    let (_, pipeline) = linkforge_cli::load_pipeline(&fixtures().join("angelina").join(config), None).unwrap();
    let (tx, rx) = std::sync::mpsc::channel();
    thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            let app = linkforge_cli::service::router(pipeline);
            linkforge_cli::service::serve(listener, app, std::future::pending()).await.unwrap();
        });
    });
    format!("http://{}", rx.recv().unwrap())
}

fn post(base: &str, body: &str) -> (u16, Vec<u8>) {
    let agent: ureq::Agent = ureq::Agent::config_builder().http_status_as_error(false).build().into();
    let mut resp = agent
        .post(&format!("{base}/annotate"))
        .header("content-type", "application/json")
        .send(body)
        .unwrap();
    (resp.status().as_u16(), resp.body_mut().read_to_vec().unwrap())
}

fn service_determinism() -> Result<String, String> {
    let base = start_service("joint.json");
    let body = serde_json::json!({ "text": SENTENCE }).to_string();
    let a = post(&base, &body);
    let b = post(&base, &body);
    if a.0 != 200 || a != b {
        return Err(format!("statuses {} / {}, bodies equal: {}", a.0, b.0, a.1 == b.1));
    }
    let n = serde_json::from_slice::<serde_json::Value>(&a.1).unwrap()["annotations"].as_array().unwrap().len();
    if n != 4 {
        return Err(format!("{n} annotations"));
    }
    let (bad, _) = post(&base, "{}");
    if bad != 400 {
        return Err(format!("malformed body gave {bad}"));
    }
    let dead = start_service("dead-backend.json");
    let (down, _) = post(&dead, &body);
    if down != 503 {
        return Err(format!("dead backend gave {down}"));
    }
    Ok(format!("identical {}-byte bodies; {{}} -> 400; dead backend -> 503", a.1.len()))
}

fn main() {
    let started = Instant::now();
    let criteria: [(&'static str, Criterion); 8] = [
        ("codec round trip", codec_round_trip),
        ("expansion round trip", expansion_round_trip),
        ("merge rule vs brute force", merge_rule),
        ("metric oracle", metric_oracle),
        ("golden end-to-end", golden_end_to_end),
        ("hallucination filter", hallucination_filter),
        ("corpus ingestion (KORE50 shape)", corpus_ingestion),
        ("service determinism", service_determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut outcomes: Vec<Outcome> = criteria.into_iter().map(|(name, f)| check(name, f)).collect();
    let elapsed = started.elapsed();
    outcomes.push(Outcome {
        name: "suite time",
        ok: elapsed <= SUITE_TIME_LIMIT,
        detail: format!("{:.2}s (limit {}s)", elapsed.as_secs_f64(), SUITE_TIME_LIMIT.as_secs()),
    });
    let mut failed = 0;
    for o in &outcomes {
        println!("{} {}: {}", if o.ok { "PASS" } else { "FAIL" }, o.name, o.detail);
        failed += usize::from(!o.ok);
    }
    println!("{} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        process::exit(1);
    }
}
