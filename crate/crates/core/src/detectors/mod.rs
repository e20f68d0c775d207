//! Rule-based detectors for seven AAVE grammatical features.
//!
//! Every detector is a pure function over a tagged sentence: same input,
//! same hits. The rules are deliberately literal rather than clever;
//! docs/detector_rules.md spells out each clause and exclusion list so an
//! annotator can audit any disagreement.

mod aint;
mod double_comparative;
mod habitual_be;
mod multiple_modals;
mod negative_concord;
mod null_copula;
mod perfective_done;

pub use aint::detect_aint;
pub use double_comparative::detect_double_comparative;
pub use habitual_be::detect_habitual_be;
pub use multiple_modals::detect_multiple_modals;
pub use negative_concord::detect_negative_concord;
pub use null_copula::detect_null_copula;
pub use perfective_done::detect_perfective_done;

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Sentence, Token};
use crate::tagger::{is_subject_candidate, Lexicon};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Aint,
    HabitualBe,
    NegativeConcord,
    DoubleComparative,
    PerfectiveDone,
    MultipleModals,
    NullCopula,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 7] = [
        FeatureKind::Aint,
        FeatureKind::HabitualBe,
        FeatureKind::NegativeConcord,
        FeatureKind::DoubleComparative,
        FeatureKind::PerfectiveDone,
        FeatureKind::MultipleModals,
        FeatureKind::NullCopula,
    ];

    /// Stable machine-readable name, used in gold files and JSON output.
    pub fn slug(self) -> &'static str {
        match self {
            FeatureKind::Aint => "aint",
            FeatureKind::HabitualBe => "habitual_be",
            FeatureKind::NegativeConcord => "negative_concord",
            FeatureKind::DoubleComparative => "double_comparative",
            FeatureKind::PerfectiveDone => "perfective_done",
            FeatureKind::MultipleModals => "multiple_modals",
            FeatureKind::NullCopula => "null_copula",
        }
    }

    /// Human-readable name for report tables.
    pub fn label(self) -> &'static str {
        match self {
            FeatureKind::Aint => "ain't",
            FeatureKind::HabitualBe => "habitual be",
            FeatureKind::NegativeConcord => "negative concord",
            FeatureKind::DoubleComparative => "double comparative",
            FeatureKind::PerfectiveDone => "perfective done",
            FeatureKind::MultipleModals => "multiple modals",
            FeatureKind::NullCopula => "null copula",
        }
    }
}

impl core::fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for FeatureKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureKind::ALL
            .into_iter()
            .find(|k| k.slug() == s)
            .ok_or_else(|| format!("unknown feature `{s}`"))
    }
}

/// One detected occurrence. `trigger_span` is a half-open token index range
/// into the sentence; `subject` is the normalized subject the feature is
/// predicated of, when one can be found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureHit {
    pub feature: FeatureKind,
    pub doc_id: String,
    pub sentence_index: usize,
    pub trigger_span: (usize, usize),
    pub subject: Option<String>,
}

impl FeatureHit {
    pub fn sentence_id(&self) -> String {
        format!("{}#{}", self.doc_id, self.sentence_index)
    }
}

/// Negator words. "no" only counts when tagged DET so the interjection
/// reading is left alone.
pub const NEGATORS: [&str; 16] = [
    "n't", "not", "never", "no", "nothing", "nobody", "none", "nowhere", "neither", "ain't",
    "cannot", "don", "dont", "cant", "wont", "aint",
];

/// Negators that attach to a verb, as opposed to negative quantifiers.
pub const VERBAL_NEGATORS: [&str; 9] = [
    "n't", "not", "ain't", "aint", "cannot", "don", "dont", "cant", "wont",
];

/// Tokens that end a clause for the purposes of negative-concord counting
/// and subject search.
const CLAUSE_COORDINATORS: [&str; 6] = ["but", "and", "or", "so", "because", "cause"];

fn is_clause_boundary(token: &Token) -> bool {
    let word = token.normalized.as_str();
    matches!(word, "." | "!" | "?" | ",") || CLAUSE_COORDINATORS.contains(&word)
}

/// Half-open token spans of the clauses of a sentence; boundary tokens
/// belong to no clause.
pub(crate) fn clause_spans(tokens: &[Token]) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, token) in tokens.iter().enumerate() {
        if is_clause_boundary(token) {
            if let Some(s) = start.take() {
                spans.push((s, i));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        spans.push((s, tokens.len()));
    }
    spans
}

fn clause_start_before(tokens: &[Token], i: usize) -> usize {
    clause_spans(tokens)
        .into_iter()
        .find(|&(a, b)| i >= a && i < b)
        .map(|(a, _)| a)
        .unwrap_or(i)
}

/// Subject for a hit: the nearest subject candidate left of the trigger in
/// the same clause. Null-copula hits carry their subject as the first token
/// of the trigger span.
pub fn extract_subject(s: &Sentence, hit: &FeatureHit) -> Option<String> {
    let start = hit.trigger_span.0;
    if hit.feature == FeatureKind::NullCopula {
        return s.tokens.get(start).map(|t| t.normalized.clone());
    }
    let clause_start = clause_start_before(&s.tokens, start);
    s.tokens
        .get(clause_start..start)?
        .iter()
        .rev()
        .find(|t| is_subject_candidate(t))
        .map(|t| t.normalized.clone())
}

/// Leftmost subject candidate of the sentence: the token a "sentence
/// about s" is filed under in contextual comparisons.
pub fn first_subject(s: &Sentence) -> Option<String> {
    s.tokens
        .iter()
        .find(|t| is_subject_candidate(t))
        .map(|t| t.normalized.clone())
}

pub(crate) fn hit(s: &Sentence, feature: FeatureKind, span: (usize, usize)) -> FeatureHit {
    let mut h = FeatureHit {
        feature,
        doc_id: s.doc_id.clone(),
        sentence_index: s.index,
        trigger_span: span,
        subject: None,
    };
    h.subject = extract_subject(s, &h);
    h
}

/// All seven detectors over one sentence, in `FeatureKind::ALL` order.
pub fn detect_sentence(s: &Sentence, lexicon: &Lexicon) -> Vec<FeatureHit> {
    let mut hits = detect_aint(s);
    hits.extend(detect_habitual_be(s));
    hits.extend(detect_negative_concord(s));
    hits.extend(detect_double_comparative(s, lexicon));
    hits.extend(detect_perfective_done(s, lexicon));
    hits.extend(detect_multiple_modals(s));
    hits.extend(detect_null_copula(s));
    hits
}

/// All detectors over all sentences, ordered by (document, sentence,
/// feature). Sentences are independent, so the map runs in parallel.
pub fn detect_all(corpus: &Corpus, lexicon: &Lexicon) -> Vec<FeatureHit> {
    let per_sentence: Vec<Vec<FeatureHit>> = corpus
        .sentences
        .par_iter()
        .map(|s| detect_sentence(s, lexicon))
        .collect();
    per_sentence.into_iter().flatten().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub sentence_id: String,
    pub feature: FeatureKind,
    pub label: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum GoldError {
    #[error("gold line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("gold line {line}: second label for {sentence_id} / {feature}")]
    Duplicate {
        line: usize,
        sentence_id: String,
        feature: FeatureKind,
    },
}

/// Parse `sentence_id<TAB>feature<TAB>0|1` lines; `#` comments and blank
/// lines are ignored.
pub fn parse_gold_tsv(text: &str) -> Result<Vec<GoldAnnotation>, GoldError> {
    let mut seen = BTreeSet::new();
    let mut annotations = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(sid), Some(feature), Some(label), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(GoldError::Malformed {
                line: line_no,
                message: "expected `sentence_id<TAB>feature<TAB>0|1`".into(),
            });
        };
        let feature = FeatureKind::from_str(feature).map_err(|message| GoldError::Malformed {
            line: line_no,
            message,
        })?;
        let label = match label {
            "0" => false,
            "1" => true,
            other => {
                return Err(GoldError::Malformed {
                    line: line_no,
                    message: format!("label must be 0 or 1, got `{other}`"),
                })
            }
        };
        if !seen.insert((sid.to_string(), feature)) {
            return Err(GoldError::Duplicate {
                line: line_no,
                sentence_id: sid.to_string(),
                feature,
            });
        }
        annotations.push(GoldAnnotation {
            sentence_id: sid.to_string(),
            feature,
            label,
        });
    }
    Ok(annotations)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FeatureAccuracy {
    pub agree: usize,
    pub total: usize,
}

impl FeatureAccuracy {
    pub fn accuracy(&self) -> f64 {
        self.agree as f64 / self.total as f64
    }
}

/// Accuracy per feature: the fraction of gold (sentence, feature) pairs
/// where detected presence matches the gold label.
pub fn evaluate_against_gold(
    hits: &[FeatureHit],
    gold: &[GoldAnnotation],
) -> BTreeMap<FeatureKind, FeatureAccuracy> {
    let predicted: BTreeSet<(String, FeatureKind)> = hits
        .iter()
        .map(|h| (h.sentence_id(), h.feature))
        .collect();
    let mut table: BTreeMap<FeatureKind, FeatureAccuracy> = BTreeMap::new();
    for annotation in gold {
        let guess = predicted.contains(&(annotation.sentence_id.clone(), annotation.feature));
        let entry = table
            .entry(annotation.feature)
            .or_insert(FeatureAccuracy { agree: 0, total: 0 });
        entry.total += 1;
        if guess == annotation.label {
            entry.agree += 1;
        }
    }
    table
}

#[cfg(test)]
pub(crate) fn tagged(text: &str) -> Sentence {
    let mut sentence = Sentence {
        doc_id: "t".into(),
        index: 0,
        text: text.into(),
        raw: text.into(),
        tokens: crate::corpus::tokenize(text),
    };
    Lexicon::builtin().tag_sentence(&mut sentence);
    sentence
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Origin;

    fn mini_corpus() -> (Corpus, Lexicon) {
        let lexicon = Lexicon::builtin();
        let mut sentences = Vec::new();
        for (doc, idx, text) in [
            ("a", 0usize, "I ain't doing all that."),
            ("a", 1, "He be doing too much."),
            ("b", 0, "We might can go up there next Saturday."),
        ] {
            let mut s = tagged(text);
            s.doc_id = doc.into();
            s.index = idx;
            sentences.push(s);
        }
        let corpus = Corpus::from_sentences("mini".into(), Origin::Human, sentences);
        (corpus, lexicon)
    }

    #[test]
    fn feature_slugs_round_trip() {
        for kind in FeatureKind::ALL {
            assert_eq!(FeatureKind::from_str(kind.slug()).unwrap(), kind);
        }
        assert!(FeatureKind::from_str("zero_copula").is_err());
    }

    #[test]
    fn detect_all_orders_by_doc_sentence_feature() {
        let (corpus, lexicon) = mini_corpus();
        let hits = detect_all(&corpus, &lexicon);
        let keys: Vec<(String, usize, FeatureKind)> = hits
            .iter()
            .map(|h| (h.doc_id.clone(), h.sentence_index, h.feature))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(hits.len(), 3);
    }

    #[test]
    fn detection_is_deterministic() {
        let (corpus, lexicon) = mini_corpus();
        assert_eq!(detect_all(&corpus, &lexicon), detect_all(&corpus, &lexicon));
    }

    #[test]
    fn empty_and_single_token_sentences_are_silent() {
        let lexicon = Lexicon::builtin();
        for text in ["", "he", "done", "more", "might", "trippin", "never"] {
            let s = tagged(text);
            assert!(detect_sentence(&s, &lexicon).is_empty(), "fired on {text:?}");
        }
        let s = tagged("ain't");
        let hits = detect_sentence(&s, &lexicon);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].feature, FeatureKind::Aint);
    }

    #[test]
    fn subject_is_nearest_candidate_in_clause() {
        let s = tagged("They be out here.");
        let h = hit(&s, FeatureKind::HabitualBe, (1, 2));
        assert_eq!(h.subject.as_deref(), Some("they"));

        let s = tagged("Everybody be trying.");
        let h = hit(&s, FeatureKind::HabitualBe, (1, 2));
        assert_eq!(h.subject.as_deref(), Some("everybody"));
    }

    #[test]
    fn subject_search_stays_inside_clause() {
        let s = tagged("Keisha left, but nobody ain't seen her.");
        let aint_idx = s
            .tokens
            .iter()
            .position(|t| t.normalized == "ain't")
            .unwrap();
        let h = hit(&s, FeatureKind::Aint, (aint_idx, aint_idx + 1));
        assert_eq!(h.subject.as_deref(), Some("nobody"));
    }

    #[test]
    fn gold_parses_and_scores() {
        let gold = parse_gold_tsv("a#0\taint\t1\na#1\thabitual_be\t1\nb#0\tmultiple_modals\t1\nb#0\taint\t0\n").unwrap();
        assert_eq!(gold.len(), 4);
        let (corpus, lexicon) = mini_corpus();
        let hits = detect_all(&corpus, &lexicon);
        let table = evaluate_against_gold(&hits, &gold);
        assert_eq!(table[&FeatureKind::Aint].agree, 2);
        assert_eq!(table[&FeatureKind::Aint].total, 2);
        assert!((table[&FeatureKind::HabitualBe].accuracy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gold_accuracy_counts_disagreements() {
        let hits = Vec::new();
        let mut lines = String::new();
        for i in 0..100 {
            let label = if i == 0 { 1 } else { 0 };
            lines.push_str(&format!("d#{i}\taint\t{label}\n"));
        }
        let gold = parse_gold_tsv(&lines).unwrap();
        let table = evaluate_against_gold(&hits, &gold);
        assert!((table[&FeatureKind::Aint].accuracy() - 0.99).abs() < 1e-12);
    }

    #[test]
    fn gold_rejects_bad_lines() {
        assert!(matches!(
            parse_gold_tsv("a#0\taint\t2\n"),
            Err(GoldError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_gold_tsv("a#0\tmystery\t1\n"),
            Err(GoldError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_gold_tsv("a#0\taint\t1\na#0\taint\t0\n"),
            Err(GoldError::Duplicate { line: 2, .. })
        ));
        assert!(parse_gold_tsv("# comment\n\na#0\taint\t1\n").is_ok());
    }

    #[test]
    fn clause_spans_split_on_punct_and_coordinators() {
        let s = tagged("I didn't go, and nobody cared.");
        let spans = clause_spans(&s.tokens);
        assert_eq!(spans.len(), 2);
        let words: Vec<&str> = s.tokens[spans[1].0..spans[1].1]
            .iter()
            .map(|t| t.normalized.as_str())
            .collect();
        assert_eq!(words, vec!["nobody", "cared"]);
    }
}
