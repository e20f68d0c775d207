//! Lexicon-and-rules sentence sentiment (the VADER procedure).
//!
//! A compound score in [-1, 1] per sentence: token valences from a lexicon,
//! booster words (±0.293, damped ×0.95 then ×0.9 with distance), negation
//! (×−0.74) in a three-token window with the never-so/this (×1.25) and
//! without-doubt carve-outs, all-caps emphasis (±0.733), idiom overrides,
//! but-clause reweighting (×0.5 before, ×1.5 after), punctuation
//! amplification (exclamations capped at 3 × 0.292; 2-3 question marks
//! 0.18 each, more 0.96), then s/sqrt(s² + 15). Scoring expects raw text:
//! capitalization and punctuation carry signal, so it runs before cleaning.
//! Tokens are ASCII-oriented, matching the corpora this crate ingests.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::Real;

const B_INCR: Real = 0.293;
const B_DECR: Real = -0.293;
const C_INCR: Real = 0.733;
const N_SCALAR: Real = -0.74;
const NORMALIZE_ALPHA: Real = 15.0;

const BUILTIN_LEXICON: &str = include_str!("../data/sentiment_lexicon.tsv");

const NEGATE: [&str; 59] = [
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt", "ain't", "aren't",
    "can't", "couldn't", "daren't", "didn't", "doesn't", "dont", "hadnt", "hasnt", "havent",
    "isnt", "mightnt", "mustnt", "neither", "don't", "hadn't", "hasn't", "haven't", "isn't",
    "mightn't", "mustn't", "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
    "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent", "oughtn't", "shan't",
    "shouldn't", "uh-uh", "wasn't", "weren't", "without", "wont", "wouldnt", "won't", "wouldn't",
    "rarely", "seldom", "despite",
];

const INCREMENT_WORDS: [&str; 60] = [
    "absolutely", "amazingly", "awfully", "completely", "considerable", "considerably",
    "decidedly", "deeply", "effing", "enormous", "enormously", "entirely", "especially",
    "exceptional", "exceptionally", "extreme", "extremely", "fabulously", "flipping", "flippin",
    "frackin", "fracking", "fricking", "frickin", "frigging", "friggin", "fully", "fuckin",
    "fucking", "fuggin", "fugging", "greatly", "hella", "highly", "hugely", "incredible",
    "incredibly", "intensely", "major", "majorly", "more", "most", "particularly", "purely",
    "quite", "really", "remarkably", "so", "substantially", "thoroughly", "total", "totally",
    "tremendous", "tremendously", "uber", "unbelievably", "unusually", "utter", "utterly",
    "very",
];

const DECREMENT_WORDS: [&str; 21] = [
    "almost", "barely", "hardly", "kinda", "kindof", "kind-of", "less", "little", "marginal",
    "marginally", "occasional", "occasionally", "partly", "scarce", "scarcely", "slight",
    "slightly", "somewhat", "sorta", "sortof", "sort-of",
];

const PHRASE_BOOSTERS: [(&str, Real); 3] = [
    ("just enough", B_DECR),
    ("kind of", B_DECR),
    ("sort of", B_DECR),
];

const IDIOMS: [(&str, Real); 10] = [
    ("the shit", 3.0),
    ("the bomb", 3.0),
    ("bad ass", 1.5),
    ("badass", 1.5),
    ("bus stop", 0.0),
    ("yeah right", -2.0),
    ("kiss of death", -1.5),
    ("to die for", 3.0),
    ("beating heart", 3.1),
    ("broken heart", -2.9),
];

static BOOSTERS: LazyLock<HashMap<&'static str, Real>> = LazyLock::new(|| {
    let mut map = HashMap::new();
    for word in INCREMENT_WORDS {
        map.insert(word, B_INCR);
    }
    for word in DECREMENT_WORDS {
        map.insert(word, B_DECR);
    }
    map
});

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("failed to read sentiment lexicon {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("sentiment lexicon {path} line {line}: expected `token<TAB>valence`")]
    Malformed { path: PathBuf, line: usize },
    #[error("cannot summarize an empty corpus")]
    EmptyCorpus,
}

/// Token-to-valence map. Values live in [-4, 4] by convention; anything a
/// file supplies is taken as-is, and unknown tokens score zero.
#[derive(Debug, Clone)]
pub struct SentimentLexicon {
    valences: HashMap<String, Real>,
}

impl SentimentLexicon {
    /// The lexicon compiled into the binary.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_LEXICON, Path::new("<builtin>"))
            .expect("builtin sentiment lexicon must parse")
    }

    pub fn from_file(path: &Path) -> Result<Self, SentimentError> {
        let text = std::fs::read_to_string(path).map_err(|source| SentimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Lines are `token<TAB>valence`; further tab-separated columns are
    /// ignored so a VADER-format file loads unchanged. Blank lines and
    /// `#` comments are skipped.
    fn parse(text: &str, path: &Path) -> Result<Self, SentimentError> {
        let mut valences = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = || SentimentError::Malformed {
                path: path.to_path_buf(),
                line: i + 1,
            };
            let mut fields = line.split('\t');
            let token = fields.next().filter(|t| !t.is_empty()).ok_or_else(malformed)?;
            let valence: Real = fields
                .next()
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(malformed)?;
            valences.insert(token.to_lowercase(), valence);
        }
        Ok(SentimentLexicon { valences })
    }

    /// Valence of an already-lowercased token.
    pub fn valence(&self, token: &str) -> Option<Real> {
        self.valences.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.valences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valences.is_empty()
    }
}

struct Word {
    raw: String,
    lower: String,
}

/// Whitespace-split tokens with surrounding ASCII punctuation stripped.
/// A token whose stripped form is two characters or shorter keeps its
/// punctuation, which is what lets emoticons like ":)" reach the lexicon.
fn words_of(text: &str) -> Vec<Word> {
    text.split_whitespace()
        .map(|token| {
            let stripped = token.trim_matches(|c: char| c.is_ascii_punctuation());
            let raw = if stripped.chars().count() <= 2 {
                token
            } else {
                stripped
            };
            Word {
                raw: raw.to_string(),
                lower: raw.to_lowercase(),
            }
        })
        .collect()
}

/// At least one letter and no lowercase ones.
fn is_all_caps(word: &str) -> bool {
    let mut has_alpha = false;
    for c in word.chars() {
        if c.is_alphabetic() {
            if c.is_lowercase() {
                return false;
            }
            has_alpha = true;
        }
    }
    has_alpha
}

/// Some but not all tokens are all-caps, so the caps carry emphasis.
fn allcap_differential(words: &[Word]) -> bool {
    let upper = words.iter().filter(|w| is_all_caps(&w.raw)).count();
    upper > 0 && upper < words.len()
}

fn negated(lower: &str) -> bool {
    NEGATE.contains(&lower) || lower.contains("n't")
}

fn booster_word(lower: &str) -> Option<Real> {
    BOOSTERS.get(lower).copied()
}

fn scalar_inc_dec(word: &Word, valence: Real, cap_diff: bool) -> Real {
    let Some(mut scalar) = booster_word(&word.lower) else {
        return 0.0;
    };
    if valence < 0.0 {
        scalar = -scalar;
    }
    if is_all_caps(&word.raw) && cap_diff {
        scalar += if valence > 0.0 { C_INCR } else { -C_INCR };
    }
    scalar
}

fn negation_adjust(valence: Real, words: &[Word], dist: usize, i: usize) -> Real {
    let lower = |k: usize| words[k].lower.as_str();
    match dist {
        0 => {
            if negated(lower(i - 1)) {
                valence * N_SCALAR
            } else {
                valence
            }
        }
        1 => {
            if lower(i - 2) == "never" && matches!(lower(i - 1), "so" | "this") {
                valence * 1.25
            } else if lower(i - 2) == "without" && lower(i - 1) == "doubt" {
                valence
            } else if negated(lower(i - 2)) {
                valence * N_SCALAR
            } else {
                valence
            }
        }
        _ => {
            if lower(i - 3) == "never"
                && (matches!(lower(i - 2), "so" | "this") || matches!(lower(i - 1), "so" | "this"))
            {
                valence * 1.25
            } else if lower(i - 3) == "without"
                && (lower(i - 2) == "doubt" || lower(i - 1) == "doubt")
            {
                valence
            } else if negated(lower(i - 3)) {
                valence * N_SCALAR
            } else {
                valence
            }
        }
    }
}

/// Idiom overrides and multiword boosters around position `i`; only
/// reached once the scan extends three tokens back.
fn idiom_adjust(mut valence: Real, words: &[Word], i: usize) -> Real {
    let lower = |k: usize| words[k].lower.as_str();
    let onezero = format!("{} {}", lower(i - 1), lower(i));
    let twoonezero = format!("{} {} {}", lower(i - 2), lower(i - 1), lower(i));
    let twoone = format!("{} {}", lower(i - 2), lower(i - 1));
    let threetwoone = format!("{} {} {}", lower(i - 3), lower(i - 2), lower(i - 1));
    let threetwo = format!("{} {}", lower(i - 3), lower(i - 2));
    let idiom = |s: &str| IDIOMS.iter().find(|(k, _)| *k == s).map(|&(_, v)| v);
    for seq in [&onezero, &twoonezero, &twoone, &threetwoone, &threetwo] {
        if let Some(v) = idiom(seq) {
            valence = v;
            break;
        }
    }
    if i + 1 < words.len() {
        if let Some(v) = idiom(&format!("{} {}", lower(i), lower(i + 1))) {
            valence = v;
        }
    }
    if i + 2 < words.len() {
        if let Some(v) = idiom(&format!("{} {} {}", lower(i), lower(i + 1), lower(i + 2))) {
            valence = v;
        }
    }
    for gram in [&threetwoone, &threetwo, &twoone] {
        if let Some(&(_, b)) = PHRASE_BOOSTERS.iter().find(|(k, _)| k == gram) {
            valence += b;
        }
    }
    valence
}

fn least_adjust(valence: Real, words: &[Word], i: usize, lexicon: &SentimentLexicon) -> Real {
    let bare_least =
        |k: usize| words[k].lower == "least" && lexicon.valence(&words[k].lower).is_none();
    if i > 1 && bare_least(i - 1) {
        if !matches!(words[i - 2].lower.as_str(), "at" | "very") {
            return valence * N_SCALAR;
        }
    } else if i > 0 && bare_least(i - 1) {
        return valence * N_SCALAR;
    }
    valence
}

fn token_valence(words: &[Word], i: usize, cap_diff: bool, lexicon: &SentimentLexicon) -> Real {
    let lower = words[i].lower.as_str();
    let Some(base) = lexicon.valence(lower) else {
        return 0.0;
    };
    let mut valence = base;
    if lower == "no"
        && words
            .get(i + 1)
            .is_some_and(|w| lexicon.valence(&w.lower).is_some())
    {
        valence = 0.0;
    }
    if (i >= 1 && words[i - 1].lower == "no")
        || (i >= 2 && words[i - 2].lower == "no")
        || (i >= 3
            && words[i - 3].lower == "no"
            && matches!(words[i - 1].lower.as_str(), "or" | "nor"))
    {
        valence = base * N_SCALAR;
    }
    if is_all_caps(&words[i].raw) && cap_diff {
        valence += if valence > 0.0 { C_INCR } else { -C_INCR };
    }
    for dist in 0..3 {
        if i <= dist || lexicon.valence(&words[i - (dist + 1)].lower).is_some() {
            continue;
        }
        let mut scalar = scalar_inc_dec(&words[i - (dist + 1)], valence, cap_diff);
        if scalar != 0.0 {
            if dist == 1 {
                scalar *= 0.95;
            } else if dist == 2 {
                scalar *= 0.9;
            }
        }
        valence += scalar;
        valence = negation_adjust(valence, words, dist, i);
        if dist == 2 {
            valence = idiom_adjust(valence, words, i);
        }
    }
    least_adjust(valence, words, i, lexicon)
}

/// Halve everything before the first "but", amplify everything after 1.5×.
fn but_reweight(words: &[Word], sentiments: &mut [Real]) {
    let Some(but) = words.iter().position(|w| w.lower == "but") else {
        return;
    };
    for (i, s) in sentiments.iter_mut().enumerate() {
        if i < but {
            *s *= 0.5;
        } else if i > but {
            *s *= 1.5;
        }
    }
}

fn punctuation_emphasis(text: &str) -> Real {
    let exclamations = text.chars().filter(|&c| c == '!').count().min(3);
    let ep = exclamations as Real * 0.292;
    let question_marks = text.chars().filter(|&c| c == '?').count();
    let qm = match question_marks {
        0 | 1 => 0.0,
        2 | 3 => question_marks as Real * 0.18,
        _ => 0.96,
    };
    ep + qm
}

fn normalize_score(score: Real) -> Real {
    let norm = score / (score * score + NORMALIZE_ALPHA).sqrt();
    norm.clamp(-1.0, 1.0)
}

/// Compound sentiment of one sentence, in [-1, 1]. Text with no lexical
/// content scores exactly zero.
pub fn compound_score(text: &str, lexicon: &SentimentLexicon) -> Real {
    let words = words_of(text);
    let cap_diff = allcap_differential(&words);
    let mut sentiments = Vec::with_capacity(words.len());
    for i in 0..words.len() {
        let lower = words[i].lower.as_str();
        if booster_word(lower).is_some()
            || (lower == "kind" && words.get(i + 1).is_some_and(|w| w.lower == "of"))
        {
            sentiments.push(0.0);
            continue;
        }
        sentiments.push(token_valence(&words, i, cap_diff, lexicon));
    }
    but_reweight(&words, &mut sentiments);
    let mut total: Real = sentiments.iter().sum();
    if total > 0.0 {
        total += punctuation_emphasis(text);
    } else if total < 0.0 {
        total -= punctuation_emphasis(text);
    }
    normalize_score(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentimentCategory {
    Negative,
    Neutral,
    Positive,
}

impl SentimentCategory {
    pub fn label(self) -> &'static str {
        match self {
            SentimentCategory::Negative => "negative",
            SentimentCategory::Neutral => "neutral",
            SentimentCategory::Positive => "positive",
        }
    }
}

/// Ternary split of the compound score. The ±0.5 endpoints land in
/// neutral, which keeps the three categories a total partition of [-1, 1].
pub fn categorize(compound: Real) -> SentimentCategory {
    if compound > 0.5 {
        SentimentCategory::Positive
    } else if compound < -0.5 {
        SentimentCategory::Negative
    } else {
        SentimentCategory::Neutral
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentShares {
    pub negative: Real,
    pub neutral: Real,
    pub positive: Real,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentSummary {
    pub mean_compound: Real,
    pub proportions: SentimentShares,
    pub n_sentences: usize,
}

/// Score every sentence (on its raw text) and aggregate. Proportions sum
/// to one up to rounding.
pub fn summarize(
    corpus: &Corpus,
    lexicon: &SentimentLexicon,
) -> Result<SentimentSummary, SentimentError> {
    if corpus.sentences.is_empty() {
        return Err(SentimentError::EmptyCorpus);
    }
    let scores: Vec<Real> = corpus
        .sentences
        .par_iter()
        .map(|s| compound_score(&s.raw, lexicon))
        .collect();
    let n = scores.len();
    let mut counts = [0usize; 3];
    for &score in &scores {
        let slot = match categorize(score) {
            SentimentCategory::Negative => 0,
            SentimentCategory::Neutral => 1,
            SentimentCategory::Positive => 2,
        };
        counts[slot] += 1;
    }
    Ok(SentimentSummary {
        mean_compound: scores.iter().sum::<Real>() / n as Real,
        proportions: SentimentShares {
            negative: counts[0] as Real / n as Real,
            neutral: counts[1] as Real / n as Real,
            positive: counts[2] as Real / n as Real,
        },
        n_sentences: n,
    })
}
