use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::backend::BackendConfig;

/// Inference configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// One seq2seq model for mention detection, then disambiguation.
    Joint,
    /// External mention detector, then seq2seq disambiguation.
    ExternalNer,
    /// Seq2seq model predicting linked output straight from raw text.
    E2e,
    /// E2E model for mention detection only, then the joint disambiguation step.
    Mixed,
    /// Chat model lists entities, seq2seq disambiguates.
    LlmOnly,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Joint, Mode::ExternalNer, Mode::E2e, Mode::Mixed, Mode::LlmOnly];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Joint => "joint",
            Mode::ExternalNer => "external-ner",
            Mode::E2e => "e2e",
            Mode::Mixed => "mixed",
            Mode::LlmOnly => "llm-only",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| PipelineError::Config(format!("unknown mode {s:?}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendSet {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq2seq: Option<BackendConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chat: Option<BackendConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ner_service: Option<BackendConfig>,
}

/// The JSON configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub mode: Mode,
    #[serde(default)]
    pub mention_expansion: bool,
    #[serde(default)]
    pub ner_expansion: bool,
    /// Title dictionary (TSV).
    pub dictionary: PathBuf,
    #[serde(default)]
    pub backends: BackendSet,
}

/// Check mode and flag requirements against which backends are present.
pub(crate) fn check_requirements(
    mode: Mode,
    mention_expansion: bool,
    ner_expansion: bool,
    has_seq2seq: bool,
    has_chat: bool,
    has_ner: bool,
) -> Result<(), PipelineError> {
    let missing = |what: &str| Err(PipelineError::Config(format!("mode {mode} needs a {what} backend")));
    if !has_seq2seq {
        return missing("seq2seq");
    }
    if mode == Mode::ExternalNer && !has_ner {
        return missing("ner_service");
    }
    if mode == Mode::LlmOnly && !has_chat {
        return missing("chat");
    }
    if (mention_expansion || ner_expansion) && !has_chat {
        return Err(PipelineError::Config("expansion flags need a chat backend".to_owned()));
    }
    Ok(())
}

impl PipelineConfig {
    /// Read a configuration file. Relative dictionary and fixture paths are
    /// resolved against the file's directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let body = fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("reading {}: {e}", path.display())))?;
        let mut cfg: PipelineConfig = serde_json::from_str(&body)
            .map_err(|e| PipelineError::Config(format!("parsing {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.dictionary);
        let b = &mut self.backends;
        for cfg in [&mut b.seq2seq, &mut b.chat, &mut b.ner_service].into_iter().flatten() {
            if let Some(f) = cfg.fixture.as_mut() {
                fix(f);
            }
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let b = &self.backends;
        for cfg in [&b.seq2seq, &b.chat, &b.ner_service].into_iter().flatten() {
            cfg.validate()?;
        }
        check_requirements(
            self.mode,
            self.mention_expansion,
            self.ner_expansion,
            b.seq2seq.is_some(),
            b.chat.is_some(),
            b.ner_service.is_some(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_checks_requirements() {
        let cfg: PipelineConfig = serde_json::from_str(
            r#"{"mode":"external-ner","dictionary":"kb.tsv",
                "backends":{"seq2seq":{"kind":"seq2seq","endpoint":"http://h:1"}}}"#,
        )
        .unwrap();
        assert!(cfg.validate().is_err());

        let cfg: PipelineConfig = serde_json::from_str(
            r#"{"mode":"joint","mention_expansion":true,"dictionary":"kb.tsv",
                "backends":{"seq2seq":{"kind":"mock","fixture":"f.json"}}}"#,
        )
        .unwrap();
        assert!(cfg.validate().is_err());

        let mut cfg: PipelineConfig = serde_json::from_str(
            r#"{"mode":"llm-only","dictionary":"kb.tsv",
                "backends":{"seq2seq":{"kind":"mock","fixture":"f.json"},"chat":{"kind":"mock","fixture":"f.json"}}}"#,
        )
        .unwrap();
        assert!(cfg.validate().is_ok());
        cfg.resolve_paths(Path::new("/etc/lf"));
        assert_eq!(cfg.dictionary, PathBuf::from("/etc/lf/kb.tsv"));
        assert_eq!(
            cfg.backends.chat.unwrap().fixture.unwrap(),
            PathBuf::from("/etc/lf/f.json")
        );
    }

    #[test]
    fn mode_names() {
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
        assert!("bogus".parse::<Mode>().is_err());
    }
}
