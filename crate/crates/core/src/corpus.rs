//! Corpus types, tokenization, ingestion formats, the on-disk cache, and
//! seeded sentence sampling.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed jsonl record: {message}")]
    MalformedJsonl {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("sample size {requested} exceeds corpus sentence count {available}")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("{path} is not a corpus cache (bad or missing magic header)")]
    BadMagic { path: PathBuf },
    #[error("{path}: unsupported corpus cache version {found} (expected {expected})")]
    UnsupportedVersion {
        path: PathBuf,
        found: u32,
        expected: u32,
    },
    #[error("document {0} is empty after cleaning")]
    EmptyDocument(String),
    #[error("invalid annotation pattern: {0}")]
    BadPattern(#[from] regex::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Interview,
    Tweetset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Human,
    Model,
}

impl core::fmt::Display for Origin {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Origin::Human => write!(f, "human"),
            Origin::Model => write!(f, "model"),
        }
    }
}

/// One ingested source document, before segmentation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub source_kind: SourceKind,
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_name: Option<String>,
    pub text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

/// Part-of-speech inventory of the bundled tagger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pos {
    PRON,
    NOUN,
    PROPN,
    VERB,
    AUX,
    MODAL,
    ADJ,
    ADV,
    DET,
    PREP,
    CONJ,
    NEG,
    INTERJ,
    NUM,
    PART,
    OTHER,
}

impl core::str::FromStr for Pos {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "PRON" => Pos::PRON,
            "NOUN" => Pos::NOUN,
            "PROPN" => Pos::PROPN,
            "VERB" => Pos::VERB,
            "AUX" => Pos::AUX,
            "MODAL" => Pos::MODAL,
            "ADJ" => Pos::ADJ,
            "ADV" => Pos::ADV,
            "DET" => Pos::DET,
            "PREP" => Pos::PREP,
            "CONJ" => Pos::CONJ,
            "NEG" => Pos::NEG,
            "INTERJ" => Pos::INTERJ,
            "NUM" => Pos::NUM,
            "PART" => Pos::PART,
            "OTHER" => Pos::OTHER,
            other => return Err(format!("unknown part of speech {other:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Lowercased surface with outer `.!?,` stripped; punctuation-only
    /// tokens keep themselves.
    pub normalized: String,
    pub pos: Pos,
    /// Byte offsets into the sentence text, start < end.
    pub span: (usize, usize),
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.normalized.chars().any(|c| c.is_ascii_alphanumeric())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub doc_id: String,
    /// Position within the source document, 0-based.
    pub index: usize,
    /// Cleaned text the tokens index into.
    pub text: String,
    /// The pre-cleaning form, for punctuation-sensitive consumers
    /// (sentiment). Falls back to the cleaned text when no richer source
    /// exists.
    pub raw: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// `doc#index`, the stable id used by gold annotation files.
    pub fn sentence_id(&self) -> String {
        format!("{}#{}", self.doc_id, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub sentence_count: usize,
    pub character_count: usize,
    pub document_count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    pub origin: Origin,
    pub sentences: Vec<Sentence>,
    pub stats: CorpusStats,
}

impl Corpus {
    pub fn from_sentences(name: &str, origin: Origin, sentences: Vec<Sentence>) -> Self {
        let mut corpus = Corpus {
            name: name.to_string(),
            origin,
            sentences,
            stats: CorpusStats::default(),
        };
        corpus.stats = corpus.recompute_stats();
        corpus
    }

    pub fn recompute_stats(&self) -> CorpusStats {
        let mut docs: Vec<&str> = self.sentences.iter().map(|s| s.doc_id.as_str()).collect();
        docs.sort_unstable();
        docs.dedup();
        CorpusStats {
            sentence_count: self.sentences.len(),
            character_count: self.sentences.iter().map(|s| s.text.chars().count()).sum(),
            document_count: docs.len(),
        }
    }

    /// Tokens with alphanumeric content, across all sentences.
    pub fn word_count(&self) -> usize {
        self.sentences
            .iter()
            .map(|s| s.tokens.iter().filter(|t| t.is_word()).count())
            .sum()
    }
}

const CLITICS: [&str; 5] = ["'re", "'ll", "'s", "'m", "'d"];

fn is_terminal_punct(ch: char) -> bool {
    matches!(ch, '.' | '!' | '?' | ',')
}

fn normalize_piece(piece: &str) -> String {
    let lowered = piece.to_lowercase();
    let trimmed = lowered.trim_matches(is_terminal_punct);
    if trimmed.is_empty() {
        lowered
    } else {
        trimmed.to_string()
    }
}

fn push_token(tokens: &mut Vec<Token>, text: &str, start: usize, end: usize) {
    debug_assert!(start < end);
    let surface = &text[start..end];
    tokens.push(Token {
        surface: surface.to_string(),
        normalized: normalize_piece(surface),
        pos: Pos::OTHER,
        span: (start, end),
    });
}

/// Whitespace tokenizer with clitic splitting: `n't` becomes its own token
/// ("don't" → "do" + "n't"), as do `'s 're 'm 'll 'd`; "ain't"/"aint"/"y'all"
/// stay whole; trailing and leading `.!?,` split off one token per character.
/// POS is left as the OTHER placeholder for the tagger.
pub fn tokenize(sentence_text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let bytes = sentence_text.as_bytes();
    let mut i = 0usize;
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        split_word(&mut tokens, sentence_text, start, i);
    }
    tokens
}

fn split_word(tokens: &mut Vec<Token>, text: &str, start: usize, end: usize) {
    let mut core_start = start;
    let mut core_end = end;
    // leading punctuation, one token per character
    while core_start < core_end && is_terminal_punct(text.as_bytes()[core_start] as char) {
        push_token(tokens, text, core_start, core_start + 1);
        core_start += 1;
    }
    // find where trailing punctuation begins
    let mut trail = core_end;
    while trail > core_start && is_terminal_punct(text.as_bytes()[trail - 1] as char) {
        trail -= 1;
    }
    core_end = trail;
    if core_start < core_end {
        let core = &text[core_start..core_end];
        let lower = core.to_lowercase();
        if lower == "ain't" || lower == "aint" || lower == "y'all" {
            push_token(tokens, text, core_start, core_end);
        } else if lower.len() == core.len() && lower.ends_with("n't") && lower.len() > 3 {
            let cut = core_end - 3;
            push_token(tokens, text, core_start, cut);
            push_token(tokens, text, cut, core_end);
        } else if let Some(clitic) = CLITICS
            .iter()
            .find(|c| lower.len() == core.len() && lower.ends_with(**c) && lower.len() > c.len())
        {
            let cut = core_end - clitic.len();
            push_token(tokens, text, core_start, cut);
            push_token(tokens, text, cut, core_end);
        } else {
            push_token(tokens, text, core_start, core_end);
        }
    }
    let mut p = core_end.max(core_start);
    while p < end {
        push_token(tokens, text, p, p + 1);
        p += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IngestFormat {
    Interview,
    Tweets,
    Jsonl,
}

/// Ingestion knobs beyond the format itself.
#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// Annotation-stripping patterns applied before cleaning.
    pub annotation_patterns: Vec<String>,
    /// Speaker-label prefixes to drop (interview format). Empty keeps all
    /// turns.
    pub exclude_speakers: Vec<String>,
    pub model_name: Option<String>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            annotation_patterns: text::default_annotation_patterns(),
            exclude_speakers: Vec::new(),
            model_name: None,
        }
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

fn read_file(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `SPEAKER: text` line prefix used by interview transcripts.
fn speaker_prefix() -> &'static Regex {
    use std::sync::OnceLock;
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*([A-Za-z][A-Za-z0-9_.-]{0,39}):\s+").unwrap())
}

fn load_documents(
    paths: &[PathBuf],
    format: IngestFormat,
    origin: Origin,
    options: &IngestOptions,
) -> Result<Vec<RawDocument>, CorpusError> {
    let mut docs = Vec::new();
    for path in paths {
        match format {
            IngestFormat::Interview => {
                let raw = read_file(path)?;
                let mut kept = Vec::new();
                for line in raw.lines() {
                    if let Some(caps) = speaker_prefix().captures(line) {
                        let speaker = caps.get(1).unwrap().as_str();
                        let drop = options
                            .exclude_speakers
                            .iter()
                            .any(|p| speaker.to_lowercase().starts_with(&p.to_lowercase()));
                        if !drop {
                            kept.push(line[caps.get(0).unwrap().end()..].to_string());
                        }
                    } else {
                        kept.push(line.to_string());
                    }
                }
                docs.push(RawDocument {
                    id: file_stem(path),
                    source_kind: SourceKind::Interview,
                    origin,
                    model_name: options.model_name.clone(),
                    text: kept.join("\n"),
                    meta: BTreeMap::new(),
                });
            }
            IngestFormat::Tweets => {
                docs.push(RawDocument {
                    id: file_stem(path),
                    source_kind: SourceKind::Tweetset,
                    origin,
                    model_name: options.model_name.clone(),
                    text: read_file(path)?,
                    meta: BTreeMap::new(),
                });
            }
            IngestFormat::Jsonl => {
                let file = fs::File::open(path).map_err(|source| CorpusError::Io {
                    path: path.to_path_buf(),
                    source,
                })?;
                for (lineno, line) in BufReader::new(file).lines().enumerate() {
                    let line = line.map_err(|source| CorpusError::Io {
                        path: path.to_path_buf(),
                        source,
                    })?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let record: JsonlRecord =
                        serde_json::from_str(&line).map_err(|e| CorpusError::MalformedJsonl {
                            path: path.to_path_buf(),
                            line: lineno + 1,
                            message: e.to_string(),
                        })?;
                    let text_field = record.text.ok_or_else(|| CorpusError::MalformedJsonl {
                        path: path.to_path_buf(),
                        line: lineno + 1,
                        message: "missing required \"text\" field".to_string(),
                    })?;
                    docs.push(RawDocument {
                        id: format!("{}:{}", file_stem(path), lineno + 1),
                        source_kind: record.source_kind.unwrap_or(SourceKind::Interview),
                        origin,
                        model_name: options.model_name.clone(),
                        text: text_field,
                        meta: record.meta,
                    });
                }
            }
        }
    }
    Ok(docs)
}

#[derive(Deserialize)]
struct JsonlRecord {
    text: Option<String>,
    #[serde(default)]
    meta: BTreeMap<String, String>,
    #[serde(default)]
    source_kind: Option<SourceKind>,
}

/// Segment one document into sentences. The raw text is segmented first
/// and each piece cleaned afterwards, so every sentence keeps its
/// pre-cleaning form alongside the cleaned one; pieces that clean away to
/// nothing are dropped. Tweet lines never merge (a newline is always a
/// boundary for both kinds).
pub fn segment_document(doc: &RawDocument, patterns: &[Regex]) -> Vec<Sentence> {
    let stripped = text::strip_annotations(&doc.text, patterns);
    let mut sentences = Vec::new();
    for piece in text::split_sentences(&stripped) {
        let cleaned = text::clean_text(piece);
        if !cleaned.chars().any(|c| c.is_ascii_alphanumeric()) {
            continue;
        }
        let index = sentences.len();
        let tokens = tokenize(&cleaned);
        sentences.push(Sentence {
            doc_id: doc.id.clone(),
            index,
            text: cleaned,
            raw: piece.trim().to_string(),
            tokens,
        });
    }
    sentences
}

/// The spec-level segmentation op: the document text is assumed cleaned
/// already, so raw and cleaned coincide.
pub fn segment_sentences(doc: &RawDocument) -> Vec<Sentence> {
    let no_patterns: [Regex; 0] = [];
    segment_document(doc, &no_patterns)
}

/// Load and segment a corpus from disk.
pub fn load_corpus(
    paths: &[PathBuf],
    format: IngestFormat,
    origin: Origin,
    name: &str,
    options: &IngestOptions,
) -> Result<Corpus, CorpusError> {
    let patterns = text::compile_patterns(&options.annotation_patterns)?;
    let docs = load_documents(paths, format, origin, options)?;
    let mut sentences = Vec::new();
    for doc in &docs {
        sentences.extend(segment_document(doc, &patterns));
    }
    Ok(Corpus::from_sentences(name, origin, sentences))
}

/// Build a corpus from in-memory documents (generator output path).
pub fn corpus_from_documents(
    docs: &[RawDocument],
    name: &str,
    origin: Origin,
    annotation_patterns: &[String],
) -> Result<Corpus, CorpusError> {
    let patterns = text::compile_patterns(annotation_patterns)?;
    let mut sentences = Vec::new();
    for doc in docs {
        sentences.extend(segment_document(doc, &patterns));
    }
    Ok(Corpus::from_sentences(name, origin, sentences))
}

const CACHE_MAGIC: &str = "aavetk-corpus";
const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CorpusFile {
    magic: String,
    version: u32,
    tagged: bool,
    corpus: Corpus,
}

/// Write a corpus cache (JSON with a magic header, `tagged` recording
/// whether POS fields are meaningful).
pub fn save_corpus(corpus: &Corpus, tagged: bool, path: &Path) -> Result<(), CorpusError> {
    let file = CorpusFile {
        magic: CACHE_MAGIC.to_string(),
        version: CACHE_VERSION,
        tagged,
        corpus: corpus.clone(),
    };
    let body = serde_json::to_string(&file).expect("corpus serializes");
    fs::write(path, body).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_corpus_cache(path: &Path) -> Result<(Corpus, bool), CorpusError> {
    let body = read_file(path)?;
    let file: CorpusFile =
        serde_json::from_str(&body).map_err(|_| CorpusError::BadMagic {
            path: path.to_path_buf(),
        })?;
    if file.magic != CACHE_MAGIC {
        return Err(CorpusError::BadMagic {
            path: path.to_path_buf(),
        });
    }
    if file.version != CACHE_VERSION {
        return Err(CorpusError::UnsupportedVersion {
            path: path.to_path_buf(),
            found: file.version,
            expected: CACHE_VERSION,
        });
    }
    Ok((file.corpus, file.tagged))
}

/// Uniform sample of `n` sentences without replacement, deterministic for
/// a fixed seed; original corpus order is preserved. `n` equal to the
/// sentence count returns the corpus unchanged.
pub fn sample_sentences(corpus: &Corpus, n: usize, seed: u64) -> Result<Corpus, CorpusError> {
    let total = corpus.sentences.len();
    if n > total {
        return Err(CorpusError::SampleTooLarge {
            requested: n,
            available: total,
        });
    }
    let mut indices: Vec<usize> = (0..total).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        let j = rng.gen_range(i..total);
        indices.swap(i, j);
    }
    let mut picked = indices[..n].to_vec();
    picked.sort_unstable();
    let sentences: Vec<Sentence> = picked
        .into_iter()
        .map(|i| corpus.sentences[i].clone())
        .collect();
    Ok(Corpus::from_sentences(&corpus.name, corpus.origin, sentences))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(kind: SourceKind, text: &str) -> RawDocument {
        RawDocument {
            id: "d1".to_string(),
            source_kind: kind,
            origin: Origin::Human,
            model_name: None,
            text: text.to_string(),
            meta: BTreeMap::new(),
        }
    }

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn tokenize_splits_nt_clitic() {
        let tokens = tokenize("I don't never have no problems.");
        assert_eq!(
            surfaces(&tokens),
            vec!["I", "do", "n't", "never", "have", "no", "problems", "."]
        );
    }

    #[test]
    fn tokenize_keeps_aint_whole() {
        let tokens = tokenize("I ain't doing all that.");
        assert_eq!(surfaces(&tokens), vec!["I", "ain't", "doing", "all", "that", "."]);
        assert_eq!(tokens[1].normalized, "ain't");
    }

    #[test]
    fn tokenize_splits_contraction_clitics() {
        assert_eq!(surfaces(&tokenize("I'm here")), vec!["I", "'m", "here"]);
        assert_eq!(surfaces(&tokenize("they're gone")), vec!["they", "'re", "gone"]);
        assert_eq!(surfaces(&tokenize("she'll call")), vec!["she", "'ll", "call"]);
        assert_eq!(surfaces(&tokenize("he'd know")), vec!["he", "'d", "know"]);
        assert_eq!(surfaces(&tokenize("that's it")), vec!["that", "'s", "it"]);
    }

    #[test]
    fn tokenize_empty_is_empty() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn token_spans_are_sorted_in_bounds_non_overlapping() {
        let text = "We didn't, like, go nowhere!";
        let tokens = tokenize(text);
        let mut prev_end = 0usize;
        for t in &tokens {
            assert!(t.span.0 < t.span.1);
            assert!(t.span.0 >= prev_end);
            assert!(t.span.1 <= text.len());
            assert_eq!(&text[t.span.0..t.span.1], t.surface);
            prev_end = t.span.1;
        }
    }

    #[test]
    fn segment_interview_and_tweets_differ_on_lines() {
        let interview = doc(SourceKind::Interview, "We moved a lot. It was hard!\nNew city every year");
        let s = segment_sentences(&interview);
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].text, "We moved a lot.");
        assert_eq!(s[2].index, 2);

        let tweets = doc(SourceKind::Tweetset, "first tweet\nsecond. still second\nthird");
        let t = segment_sentences(&tweets);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn segmentation_never_yields_empty_sentences() {
        let d = doc(SourceKind::Interview, "...\n\n!! ?\nok then.");
        let s = segment_sentences(&d);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].text, "ok then.");
    }

    #[test]
    fn stats_match_recomputation() {
        let d = doc(SourceKind::Interview, "One here. Two there.\nThree now.");
        let corpus = Corpus::from_sentences("t", Origin::Human, segment_sentences(&d));
        assert_eq!(corpus.stats, corpus.recompute_stats());
        assert_eq!(corpus.stats.sentence_count, 3);
        assert_eq!(corpus.stats.document_count, 1);
    }

    #[test]
    fn sampling_is_deterministic_and_identity_at_full_size() {
        let d = doc(
            SourceKind::Tweetset,
            &(0..50).map(|i| format!("tweet number {i}")).collect::<Vec<_>>().join("\n"),
        );
        let corpus = Corpus::from_sentences("t", Origin::Human, segment_sentences(&d));
        let a = sample_sentences(&corpus, 10, 42).unwrap();
        let b = sample_sentences(&corpus, 10, 42).unwrap();
        assert_eq!(
            a.sentences.iter().map(|s| s.text.clone()).collect::<Vec<_>>(),
            b.sentences.iter().map(|s| s.text.clone()).collect::<Vec<_>>()
        );
        let c = sample_sentences(&corpus, 10, 43).unwrap();
        assert_ne!(
            a.sentences.iter().map(|s| s.text.clone()).collect::<Vec<_>>(),
            c.sentences.iter().map(|s| s.text.clone()).collect::<Vec<_>>()
        );
        let full = sample_sentences(&corpus, 50, 7).unwrap();
        assert_eq!(full.sentences.len(), 50);
        for (orig, sampled) in corpus.sentences.iter().zip(full.sentences.iter()) {
            assert_eq!(orig.text, sampled.text);
        }
        assert!(matches!(
            sample_sentences(&corpus, 51, 7),
            Err(CorpusError::SampleTooLarge { .. })
        ));
    }

    #[test]
    fn cache_round_trip_preserves_corpus() {
        let d = doc(SourceKind::Interview, "Round and round. It goes!");
        let corpus = Corpus::from_sentences("rt", Origin::Human, segment_sentences(&d));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.bin");
        save_corpus(&corpus, false, &path).unwrap();
        let (loaded, tagged) = load_corpus_cache(&path).unwrap();
        assert!(!tagged);
        assert_eq!(loaded.stats, corpus.stats);
        assert_eq!(loaded.sentences, corpus.sentences);

        std::fs::write(dir.path().join("junk.bin"), "{\"magic\":\"nope\"}").unwrap();
        assert!(matches!(
            load_corpus_cache(&dir.path().join("junk.bin")),
            Err(CorpusError::BadMagic { .. })
        ));
    }

    #[test]
    fn jsonl_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(&path, "{\"text\": \"fine here\"}\n{\"meta\": {}}\n").unwrap();
        let err = load_corpus(
            &[path],
            IngestFormat::Jsonl,
            Origin::Model,
            "m",
            &IngestOptions::default(),
        )
        .unwrap_err();
        match err {
            CorpusError::MalformedJsonl { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn speaker_prefixes_strip_and_filter() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("iv.txt");
        std::fs::write(&path, "INT_1: How old were you?\nSBJ_1: I was ten back then.\n").unwrap();
        let all = load_corpus(
            &[path.clone()],
            IngestFormat::Interview,
            Origin::Human,
            "iv",
            &IngestOptions::default(),
        )
        .unwrap();
        assert_eq!(all.sentences.len(), 2);
        assert_eq!(all.sentences[0].text, "How old were you?");

        let filtered = load_corpus(
            &[path],
            IngestFormat::Interview,
            Origin::Human,
            "iv",
            &IngestOptions {
                exclude_speakers: vec!["INT".to_string()],
                ..IngestOptions::default()
            },
        )
        .unwrap();
        assert_eq!(filtered.sentences.len(), 1);
        assert_eq!(filtered.sentences[0].text, "I was ten back then.");
    }
}
