//! Run configuration: a flat key=value file shared by every subcommand.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::Denominator;
use crate::text;
use crate::Real;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config line {line}: expected key=value, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("config key {key}: {message}")]
    BadValue { key: String, message: String },
}

/// Settings for a full run. Every field has a default, so an empty file is
/// a valid config.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Tagger lexicon override; builtin when unset.
    pub tagger_lexicon: Option<PathBuf>,
    /// Sentiment lexicon override; builtin when unset.
    pub sentiment_lexicon: Option<PathBuf>,
    /// Transcript annotation patterns stripped before cleaning.
    pub cleaner_patterns: Vec<String>,
    /// Interview speakers whose turns are dropped (e.g. interviewers).
    pub exclude_speakers: Vec<String>,
    pub denominator: Denominator,
    pub alpha: Real,
    /// Root seed; all randomness in a run derives from it.
    pub seed: u64,
    /// Context rows per feature table.
    pub top_contexts: usize,
    pub stability_subsamples: usize,
    pub stability_size: usize,
    /// Max in-flight generation requests.
    pub concurrency: usize,
    pub max_attempts: u32,
    pub retry_backoff_ms: u64,
    pub endpoint: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub api_key_var: String,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tagger_lexicon: None,
            sentiment_lexicon: None,
            cleaner_patterns: text::default_annotation_patterns(),
            exclude_speakers: Vec::new(),
            denominator: Denominator::Per10kSentences,
            alpha: 0.05,
            seed: 0,
            top_contexts: 10,
            stability_subsamples: 10,
            stability_size: 2000,
            concurrency: 4,
            max_attempts: 3,
            retry_backoff_ms: 500,
            endpoint: "https://api.together.xyz/v1/chat/completions".to_string(),
            temperature: 1.0,
            max_tokens: 8192,
            api_key_var: "API_KEY".to_string(),
        }
    }
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Config, ConfigError> {
        let body = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Config::parse(&body)
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are skipped.
    /// `cleaner_pattern` and `exclude_speaker` may repeat; the first
    /// occurrence replaces the default list. For scalar keys the last
    /// occurrence wins.
    pub fn parse(body: &str) -> Result<Config, ConfigError> {
        let mut config = Config::default();
        let mut saw_cleaner = false;
        let mut saw_speaker = false;
        for (idx, raw) in body.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line: line_no,
                    text: line.to_string(),
                });
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "tagger_lexicon" => {
                    config.tagger_lexicon =
                        (!value.is_empty()).then(|| PathBuf::from(value));
                }
                "sentiment_lexicon" => {
                    config.sentiment_lexicon =
                        (!value.is_empty()).then(|| PathBuf::from(value));
                }
                "cleaner_pattern" => {
                    if !saw_cleaner {
                        config.cleaner_patterns.clear();
                        saw_cleaner = true;
                    }
                    config.cleaner_patterns.push(value.to_string());
                }
                "exclude_speaker" => {
                    if !saw_speaker {
                        config.exclude_speakers.clear();
                        saw_speaker = true;
                    }
                    config.exclude_speakers.push(value.to_string());
                }
                "denominator" => {
                    config.denominator =
                        value.parse().map_err(|_| ConfigError::BadValue {
                            key: key.to_string(),
                            message: format!("unknown denominator {value:?}"),
                        })?;
                }
                "alpha" => config.alpha = parse_num(key, value)?,
                "seed" => config.seed = parse_num(key, value)?,
                "top_contexts" => config.top_contexts = parse_num(key, value)?,
                "stability_subsamples" => {
                    config.stability_subsamples = parse_num(key, value)?;
                }
                "stability_size" => config.stability_size = parse_num(key, value)?,
                "concurrency" => config.concurrency = parse_num(key, value)?,
                "max_attempts" => config.max_attempts = parse_num(key, value)?,
                "retry_backoff_ms" => config.retry_backoff_ms = parse_num(key, value)?,
                "endpoint" => config.endpoint = value.to_string(),
                "temperature" => config.temperature = parse_num(key, value)?,
                "max_tokens" => config.max_tokens = parse_num(key, value)?,
                "api_key_var" => config.api_key_var = value.to_string(),
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line: line_no,
                        key: key.to_string(),
                    });
                }
            }
        }
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, message: String| ConfigError::BadValue {
            key: key.to_string(),
            message,
        };
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(bad("alpha", format!("{} is not in (0, 1)", self.alpha)));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(bad("temperature", format!("{} is negative", self.temperature)));
        }
        if self.max_tokens == 0 {
            return Err(bad("max_tokens", "must be at least 1".to_string()));
        }
        if self.top_contexts == 0 {
            return Err(bad("top_contexts", "must be at least 1".to_string()));
        }
        if self.concurrency == 0 {
            return Err(bad("concurrency", "must be at least 1".to_string()));
        }
        if self.max_attempts == 0 {
            return Err(bad("max_attempts", "must be at least 1".to_string()));
        }
        for pattern in &self.cleaner_patterns {
            if let Err(e) = regex::Regex::new(pattern) {
                return Err(bad("cleaner_pattern", format!("{pattern:?}: {e}")));
            }
        }
        Ok(())
    }

    /// The effective config as sorted key=value lines; hashed into report
    /// provenance so outputs can be traced back to their settings.
    pub fn canonical_text(&self) -> String {
        let mut lines: Vec<String> = vec![
            format!("alpha={}", self.alpha),
            format!("api_key_var={}", self.api_key_var),
            format!("concurrency={}", self.concurrency),
            format!("denominator={}", self.denominator.slug()),
            format!("endpoint={}", self.endpoint),
            format!("max_attempts={}", self.max_attempts),
            format!("max_tokens={}", self.max_tokens),
            format!("retry_backoff_ms={}", self.retry_backoff_ms),
            format!("seed={}", self.seed),
            format!(
                "sentiment_lexicon={}",
                self.sentiment_lexicon.as_deref().unwrap_or(Path::new("")).display()
            ),
            format!("stability_size={}", self.stability_size),
            format!("stability_subsamples={}", self.stability_subsamples),
            format!(
                "tagger_lexicon={}",
                self.tagger_lexicon.as_deref().unwrap_or(Path::new("")).display()
            ),
            format!("temperature={}", self.temperature),
            format!("top_contexts={}", self.top_contexts),
        ];
        for pattern in &self.cleaner_patterns {
            lines.push(format!("cleaner_pattern={pattern}"));
        }
        for speaker in &self.exclude_speakers {
            lines.push(format!("exclude_speaker={speaker}"));
        }
        lines.sort_by(|a, b| {
            let key = |s: &str| s.split('=').next().unwrap_or("").to_string();
            key(a).cmp(&key(b))
        });
        let mut out = String::new();
        for line in lines {
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| ConfigError::BadValue {
        key: key.to_string(),
        message: format!("{value:?}: {e}"),
    })
}
