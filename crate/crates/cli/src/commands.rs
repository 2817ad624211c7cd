use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use linkforge::eval::{average_f1, evaluate as score, format_table, GoldCorpus};
use linkforge::kb::{title_from_uri, uri_for_title};
use linkforge::pipeline::build_training_samples;
use linkforge::{Annotation, Document, KbDictionary};
use rayon::prelude::*;

use crate::args::{AnnotateArgs, DumpFormat, EvaluateArgs, KbBuildArgs, TrainsetArgs};
use crate::report::{new_run_id, CorpusRef, DatasetReport, ReportFile, RunManifest};
use crate::{load_pipeline, read_file, write_atomic, CliError};

fn out_err(e: std::io::Error) -> CliError {
    CliError::io("standard output", e)
}

pub fn annotate(args: &AnnotateArgs, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (_, pipeline) = load_pipeline(&args.config.config, args.mode.as_deref())?;
    let (id, text) = match (&args.text, &args.file) {
        (Some(t), _) => ("input".to_owned(), t.clone()),
        (None, Some(path)) => {
            let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            (if id.is_empty() { "input".to_owned() } else { id }, read_file(path)?)
        }
        (None, None) => {
            let mut buf = String::new();
            stdin
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Input(format!("standard input: {e}")))?;
            ("input".to_owned(), buf)
        }
    };
    let doc = Document::new(id, text)?;
    let linked = pipeline.run(&doc)?;
    let json = serde_json::to_string_pretty(&linked.record()).expect("serializable");
    writeln!(stdout, "{json}").map_err(out_err)
}

/// Corpus names from file stems, made unique by suffixing repeats.
fn corpus_names(paths: &[impl AsRef<Path>]) -> Vec<String> {
    let mut seen = HashSet::new();
    paths
        .iter()
        .map(|p| {
            let stem = p
                .as_ref()
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "corpus".to_owned());
            let mut name = stem.clone();
            let mut n = 1;
            while !seen.insert(name.clone()) {
                n += 1;
                name = format!("{stem}#{n}");
            }
            name
        })
        .collect()
}

pub fn evaluate(args: &EvaluateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let (cfg, pipeline) = load_pipeline(&args.config.config, None)?;
    let mut corpora = Vec::with_capacity(args.corpus.len());
    for (path, name) in args.corpus.iter().zip(corpus_names(&args.corpus)) {
        let (mut corpus, warnings) =
            GoldCorpus::load(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        corpus.name = name;
        for w in warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
        corpora.push((path, corpus));
    }

    let now = chrono::Utc::now();
    let run_id = new_run_id(now);
    let mut datasets = Vec::with_capacity(corpora.len());
    for (_, corpus) in &corpora {
        let linked = corpus
            .docs
            .par_iter()
            .map(|d| pipeline.run(d))
            .collect::<Result<Vec<_>, _>>()?;
        let diagnostics: usize = linked.iter().map(|l| l.diagnostics.len()).sum();
        if diagnostics > 0 {
            let _ = writeln!(stderr, "{}: {diagnostics} diagnostic(s) while annotating", corpus.name);
        }
        let predictions: BTreeMap<String, Vec<Annotation>> =
            linked.into_iter().map(|l| (l.doc.id().to_owned(), l.annotations)).collect();
        let report = score(corpus, &predictions, pipeline.dictionary())?;
        writeln!(stdout, "{}", report.summary_line()).map_err(out_err)?;
        datasets.push(report);
    }
    let average = average_f1(&datasets);
    if datasets.len() > 1 {
        writeln!(stdout, "Avg: micro-F1 {:.3}", average.unwrap_or(0.0)).map_err(out_err)?;
    }
    if args.table {
        write!(stdout, "{}", format_table(&datasets)).map_err(out_err)?;
    }

    if let Some(out) = &args.out {
        let file = ReportFile {
            manifest: RunManifest {
                run_id: run_id.clone(),
                created_at: now.to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
                engine_version: env!("CARGO_PKG_VERSION").to_owned(),
                config: serde_json::to_value(&cfg).expect("serializable"),
                corpora: corpora
                    .iter()
                    .map(|(path, c)| CorpusRef {
                        name: c.name.clone(),
                        path: path.display().to_string(),
                        documents: c.docs.len(),
                    })
                    .collect(),
            },
            datasets: datasets
                .into_iter()
                .map(|report| DatasetReport {
                    run_id: run_id.clone(),
                    report,
                })
                .collect(),
            average_micro_f1: average,
        };
        let mut bytes = serde_json::to_vec_pretty(&file).expect("serializable");
        bytes.push(b'\n');
        write_atomic(out, &bytes)?;
    }
    Ok(())
}

pub fn build_trainset(args: &TrainsetArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let dict = match &args.dictionary {
        Some(p) => Some(KbDictionary::load(p)?.0),
        None => None,
    };
    let (corpus, warnings) =
        GoldCorpus::load(&args.corpus).map_err(|e| CliError::Input(format!("{}: {e}", args.corpus.display())))?;
    for w in warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }

    let mut out = Vec::new();
    let mut count = 0;
    for doc in &corpus.docs {
        let gold: Vec<Annotation> = corpus
            .gold_for(doc.id())
            .iter()
            .filter_map(|g| {
                let uri = g.uri.as_deref()?;
                let title = dict
                    .as_ref()
                    .and_then(|d| d.title_for_uri(uri))
                    .map(str::to_owned)
                    .unwrap_or_else(|| title_from_uri(uri));
                Some(Annotation::new(g.span.clone(), title))
            })
            .collect();
        let samples = build_training_samples(doc, &gold)
            .map_err(|e| CliError::Input(format!("document {:?}: {e}", doc.id())))?;
        for s in samples {
            serde_json::to_writer(&mut out, &s).expect("serializable");
            out.push(b'\n');
            count += 1;
        }
    }
    if args.out.as_os_str() == "-" {
        stdout.write_all(&out).map_err(out_err)?;
    } else {
        write_atomic(&args.out, &out)?;
    }
    let _ = writeln!(stderr, "wrote {count} sample(s) from {} document(s)", corpus.docs.len());
    Ok(())
}

/// Turn a dump into `title<TAB>uri` records, collecting malformed line numbers.
fn dump_to_tsv(body: &str, format: DumpFormat, uri_base: &str) -> (String, Vec<usize>) {
    let mut tsv = String::with_capacity(body.len());
    let mut bad = Vec::new();
    for (i, line) in body.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = match format {
            DumpFormat::Tsv => {
                let mut f = line.trim_end_matches('\r').split('\t');
                match (f.next(), f.next(), f.next()) {
                    (Some(t), Some(u), None) if !t.trim().is_empty() && !u.trim().is_empty() => {
                        Some((t.trim().to_owned(), u.trim().to_owned()))
                    }
                    _ => None,
                }
            }
            DumpFormat::Kilt => serde_json::from_str::<serde_json::Value>(line)
                .ok()
                .and_then(|v| v.get("wikipedia_title")?.as_str().map(str::to_owned))
                .filter(|t| !t.trim().is_empty() && !t.contains('\t'))
                .map(|t| (t.trim().to_owned(), uri_for_title(uri_base, &t))),
            DumpFormat::Titles => {
                let t = line.trim();
                (!t.contains('\t')).then(|| (t.to_owned(), uri_for_title(uri_base, t)))
            }
        };
        match record {
            Some((t, u)) => {
                tsv.push_str(&t);
                tsv.push('\t');
                tsv.push_str(&u);
                tsv.push('\n');
            }
            None => bad.push(i + 1),
        }
    }
    (tsv, bad)
}

pub fn kb_build(args: &KbBuildArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let body = read_file(&args.input)?;
    let (tsv, bad) = dump_to_tsv(&body, args.format, &args.uri_base);
    if !bad.is_empty() && !args.lenient {
        let shown: Vec<String> = bad.iter().take(5).map(usize::to_string).collect();
        return Err(CliError::Input(format!(
            "{}: {} malformed line(s), first at line(s) {}",
            args.input.display(),
            bad.len(),
            shown.join(", ")
        )));
    }
    let source = args.input.display().to_string();
    let (dict, report) =
        KbDictionary::from_reader(tsv.as_bytes(), &source).map_err(|e| CliError::Input(e.to_string()))?;
    let mut out = String::new();
    for e in dict.entries() {
        out.push_str(&e.title);
        out.push('\t');
        out.push_str(&e.uri);
        out.push('\n');
    }
    write_atomic(&args.output, out.as_bytes())?;
    for d in &report.diagnostics {
        writeln!(stdout, "{d}").map_err(out_err)?;
    }
    writeln!(
        stdout,
        "kept {} entr{}, dropped {} duplicate title(s), skipped {} malformed line(s)",
        report.loaded,
        if report.loaded == 1 { "y" } else { "ies" },
        report.duplicates,
        bad.len()
    )
    .map_err(out_err)
}
