//! Deterministic part-of-speech tagger.
//!
//! Tagging is lexicon-first with suffix fallbacks, so the same input always
//! yields the same tags. The lexicon ships in the binary and can be swapped
//! out with [`Lexicon::from_file`] for domain-specific vocabularies.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::corpus::{Corpus, Pos, Sentence, Token};

/// Lexicon file format version this build understands.
pub const LEXICON_VERSION: u32 = 1;

const BUILTIN_LEXICON: &str = include_str!("../data/tagger_lexicon.tsv");

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("failed to read lexicon {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon {path} line {line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("lexicon {path}: no `# lexicon-version:` header before the first entry")]
    MissingVersion { path: PathBuf },
    #[error("lexicon {path}: version {found} is not supported (this build reads version {LEXICON_VERSION})")]
    UnsupportedVersion { path: PathBuf, found: u32 },
}

/// Word lists driving the tagger. Closed-class entries map function words to
/// a fixed part of speech; dialect terms take precedence over them; the three
/// sets steer the suffix rules.
#[derive(Debug, Clone)]
pub struct Lexicon {
    closed_class: BTreeMap<String, Pos>,
    dialect_terms: BTreeMap<String, Pos>,
    irregular_past_participles: BTreeSet<String>,
    comparative_adjectives: BTreeSet<String>,
    comparative_exceptions: BTreeSet<String>,
}

impl Lexicon {
    /// The lexicon compiled into the binary.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_LEXICON, Path::new("<builtin>"))
            .expect("builtin lexicon must parse")
    }

    pub fn from_file(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    fn parse(text: &str, path: &Path) -> Result<Self, LexiconError> {
        let mut lexicon = Lexicon {
            closed_class: BTreeMap::new(),
            dialect_terms: BTreeMap::new(),
            irregular_past_participles: BTreeSet::new(),
            comparative_adjectives: BTreeSet::new(),
            comparative_exceptions: BTreeSet::new(),
        };
        let mut version: Option<u32> = None;
        let malformed = |line: usize, message: String| LexiconError::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        };
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim_end();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("lexicon-version:") {
                    let found: u32 = v
                        .trim()
                        .parse()
                        .map_err(|_| malformed(line_no, format!("bad version `{}`", v.trim())))?;
                    if found != LEXICON_VERSION {
                        return Err(LexiconError::UnsupportedVersion {
                            path: path.to_path_buf(),
                            found,
                        });
                    }
                    version = Some(found);
                }
                continue;
            }
            if version.is_none() {
                return Err(LexiconError::MissingVersion {
                    path: path.to_path_buf(),
                });
            }
            let (word, tag) = line
                .split_once('\t')
                .ok_or_else(|| malformed(line_no, "expected `word<TAB>TAG`".into()))?;
            let word = word.trim().to_lowercase();
            let tag = tag.trim();
            if word.is_empty() {
                return Err(malformed(line_no, "empty word".into()));
            }
            let duplicate = |word: &str| malformed(line_no, format!("duplicate entry `{word}`"));
            match tag {
                "PASTPART" => {
                    if !lexicon.irregular_past_participles.insert(word.clone()) {
                        return Err(duplicate(&word));
                    }
                }
                "COMP" => {
                    if !lexicon.comparative_adjectives.insert(word.clone()) {
                        return Err(duplicate(&word));
                    }
                }
                "COMPEXC" => {
                    if !lexicon.comparative_exceptions.insert(word.clone()) {
                        return Err(duplicate(&word));
                    }
                }
                _ => {
                    let (map, pos_text) = match tag.strip_prefix("DIALECT:") {
                        Some(rest) => (&mut lexicon.dialect_terms, rest),
                        None => (&mut lexicon.closed_class, tag),
                    };
                    let pos = Pos::from_str(pos_text)
                        .map_err(|_| malformed(line_no, format!("unknown tag `{tag}`")))?;
                    if map.insert(word.clone(), pos).is_some() {
                        return Err(duplicate(&word));
                    }
                }
            }
        }
        if version.is_none() {
            return Err(LexiconError::MissingVersion {
                path: path.to_path_buf(),
            });
        }
        Ok(lexicon)
    }

    pub fn is_dialect_term(&self, word: &str) -> bool {
        self.dialect_terms.contains_key(word)
    }

    pub fn is_past_participle(&self, word: &str) -> bool {
        self.irregular_past_participles.contains(word)
    }

    pub fn is_comparative(&self, word: &str) -> bool {
        self.comparative_adjectives.contains(word)
    }

    pub fn is_comparative_exception(&self, word: &str) -> bool {
        self.comparative_exceptions.contains(word)
    }

    /// Tag a normalized word without sentence context (the capitalization
    /// rule needs context; see [`Lexicon::tag_sentence`]).
    ///
    /// Priority: dialect term, closed class, digits, irregular participle,
    /// comparative, suffix rules, NOUN.
    pub fn tag_word(&self, word: &str) -> Pos {
        if !word.bytes().any(|b| b.is_ascii_alphanumeric()) {
            return Pos::OTHER;
        }
        if let Some(&pos) = self.dialect_terms.get(word) {
            return pos;
        }
        if let Some(&pos) = self.closed_class.get(word) {
            return pos;
        }
        if word.bytes().all(|b| b.is_ascii_digit()) {
            return Pos::NUM;
        }
        if self.irregular_past_participles.contains(word) {
            return Pos::VERB;
        }
        if self.comparative_adjectives.contains(word) {
            return Pos::ADJ;
        }
        let n = word.len();
        if n > 4 && word.ends_with("ing") {
            return Pos::VERB;
        }
        if n > 3 && word.ends_with("ed") {
            return Pos::VERB;
        }
        if n > 3 && word.ends_with("ly") {
            return Pos::ADV;
        }
        if n > 3 && (word.ends_with("er") || word.ends_with("est")) {
            return if self.comparative_exceptions.contains(word) {
                Pos::NOUN
            } else {
                Pos::ADJ
            };
        }
        Pos::NOUN
    }

    /// Tag every token in place. Unknown capitalized words after the first
    /// word of the sentence become PROPN instead of NOUN.
    pub fn tag_sentence(&self, sentence: &mut Sentence) {
        let mut saw_word = false;
        for token in &mut sentence.tokens {
            let mut pos = self.tag_word(&token.normalized);
            if pos == Pos::NOUN
                && saw_word
                && !self.closed_class.contains_key(&token.normalized)
                && token
                    .surface
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_ascii_uppercase())
            {
                pos = Pos::PROPN;
            }
            token.pos = pos;
            saw_word |= token.is_word();
        }
    }

    pub fn tag_corpus(&self, corpus: &mut Corpus) {
        for sentence in &mut corpus.sentences {
            self.tag_sentence(sentence);
        }
    }
}

/// Noun-tagged words that act as discourse markers or address terms, never
/// as the subject a feature is predicated of.
pub const DISCOURSE_MARKERS: [&str; 4] = ["bro", "fam", "dawg", "homie"];

/// Whether a token can head a subject: pronouns, common nouns, proper nouns,
/// minus the discourse-marker words above.
pub fn is_subject_candidate(token: &Token) -> bool {
    matches!(token.pos, Pos::PRON | Pos::NOUN | Pos::PROPN)
        && !DISCOURSE_MARKERS.contains(&token.normalized.as_str())
}
