//! Corpus-level analysis on top of the numeric kernels in [`crate::stats`]:
//! per-feature densities, human/model comparisons, subject-conditioned
//! context tables, and subsample stability.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{sample_sentences, Corpus, CorpusError};
use crate::detectors::{first_subject, FeatureHit, FeatureKind};
use crate::stats::{newcombe_interval, two_proportion_test, StatsError, TestKind};
use crate::Real;

/// Significance threshold behind every `significant` flag and every bolded
/// report cell.
pub const ALPHA: Real = 0.05;

/// Features whose occurrences attach to one subject token. The other three
/// span whole constructions, so a per-subject rate is not defined for them.
pub const SUBJECT_LOCAL_FEATURES: [FeatureKind; 4] = [
    FeatureKind::Aint,
    FeatureKind::HabitualBe,
    FeatureKind::PerfectiveDone,
    FeatureKind::NullCopula,
];

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("density tables use different denominators: {human} vs {model}")]
    DenominatorMismatch {
        human: Denominator,
        model: Denominator,
    },
    #[error("density table has no `{}` entry", .0.slug())]
    MissingFeature(FeatureKind),
    #[error("`{}` spans a construction, not a single subject", .0.slug())]
    ConstructionFeature(FeatureKind),
    #[error("no sentence in `{corpus}` is led by subject `{subject}`")]
    EmptyContext { corpus: String, subject: String },
    #[error("need at least one subsample")]
    NoSubsamples,
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Unit densities are expressed in. The sentence scales divide
/// feature-bearing sentences by all sentences; the word scale keeps the
/// same numerator but divides by running words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Denominator {
    #[default]
    #[serde(rename = "per_10k_sentences")]
    Per10kSentences,
    #[serde(rename = "per_100_sentences")]
    Per100Sentences,
    #[serde(rename = "per_100_words")]
    Per100Words,
}

impl Denominator {
    pub fn scale(self) -> Real {
        match self {
            Denominator::Per10kSentences => 10_000.0,
            Denominator::Per100Sentences => 100.0,
            Denominator::Per100Words => 100.0,
        }
    }

    /// Units the corpus offers: its sentence count or its word count.
    pub fn total(self, corpus: &Corpus) -> u64 {
        match self {
            Denominator::Per100Words => corpus.word_count() as u64,
            _ => corpus.sentences.len() as u64,
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Denominator::Per10kSentences => "per_10k_sentences",
            Denominator::Per100Sentences => "per_100_sentences",
            Denominator::Per100Words => "per_100_words",
        }
    }

    /// Column-header form.
    pub fn label(self) -> &'static str {
        match self {
            Denominator::Per10kSentences => "per 10k sentences",
            Denominator::Per100Sentences => "per 100 sentences",
            Denominator::Per100Words => "per 100 words",
        }
    }
}

impl fmt::Display for Denominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown denominator `{0}`; expected per10k, per100, or per100w")]
pub struct DenominatorParseError(String);

impl FromStr for Denominator {
    type Err = DenominatorParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per10k" | "per_10k_sentences" => Ok(Denominator::Per10kSentences),
            "per100" | "per_100_sentences" => Ok(Denominator::Per100Sentences),
            "per100w" | "per_100_words" => Ok(Denominator::Per100Words),
            other => Err(DenominatorParseError(other.to_string())),
        }
    }
}

/// Presence count and normalized density for one feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEntry {
    /// Sentences in which the feature fired at least once.
    pub hit_sentences: u64,
    /// Denominator units in the corpus, sentences or words.
    pub total: u64,
    pub density: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub corpus_name: String,
    pub denominator: Denominator,
    pub entries: BTreeMap<FeatureKind, DensityEntry>,
}

fn density(hit_sentences: u64, total: u64, denominator: Denominator) -> Real {
    if total == 0 {
        return 0.0;
    }
    hit_sentences as Real / total as Real * denominator.scale()
}

fn hit_sentence_ids(hits: &[FeatureHit]) -> BTreeMap<FeatureKind, BTreeSet<String>> {
    let mut ids: BTreeMap<FeatureKind, BTreeSet<String>> = BTreeMap::new();
    for hit in hits {
        ids.entry(hit.feature).or_default().insert(hit.sentence_id());
    }
    ids
}

/// Per-feature densities over a corpus. A sentence counts once per feature
/// however many hits it holds, so the table is invariant under sentence
/// reordering. Every feature gets an entry; absent ones read zero.
pub fn compute_densities(
    hits: &[FeatureHit],
    corpus: &Corpus,
    denominator: Denominator,
) -> DensityTable {
    let total = denominator.total(corpus);
    let ids = hit_sentence_ids(hits);
    let entries = FeatureKind::ALL
        .into_iter()
        .map(|feature| {
            let hit_sentences = ids.get(&feature).map_or(0, |s| s.len() as u64);
            let entry = DensityEntry {
                hit_sentences,
                total,
                density: density(hit_sentences, total, denominator),
            };
            (feature, entry)
        })
        .collect();
    DensityTable {
        corpus_name: corpus.name.clone(),
        denominator,
        entries,
    }
}

/// Human/model comparison for one feature, or for one subject context when
/// `context` is set. `p_human` and `p_model` are raw proportions; `delta`
/// (model − human) and `ci95` are scaled into the source table's density
/// units so they read against the density columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub feature: FeatureKind,
    pub context: Option<String>,
    pub p_human: Real,
    pub p_model: Real,
    pub delta: Real,
    pub test: TestKind,
    /// Chi-square value; absent on the exact-test branch.
    pub statistic: Option<Real>,
    pub p_value: Real,
    pub ci95: (Real, Real),
    pub significant: bool,
}

fn compare_counts(
    feature: FeatureKind,
    context: Option<String>,
    human: (u64, u64),
    model: (u64, u64),
    scale: Real,
) -> Result<ComparisonResult, StatsError> {
    let (hits_h, total_h) = human;
    let (hits_m, total_m) = model;
    let test = two_proportion_test::<Real>(hits_m, total_m, hits_h, total_h)?;
    let (lo, hi) = newcombe_interval::<Real>(hits_m, total_m, hits_h, total_h, 0.95)?;
    let p_human = hits_h as Real / total_h as Real;
    let p_model = hits_m as Real / total_m as Real;
    Ok(ComparisonResult {
        feature,
        context,
        p_human,
        p_model,
        delta: (p_model - p_human) * scale,
        test: test.test,
        statistic: test.statistic,
        p_value: test.p_value,
        ci95: (lo * scale, hi * scale),
        significant: test.p_value < ALPHA,
    })
}

fn entry(table: &DensityTable, feature: FeatureKind) -> Result<DensityEntry, AnalysisError> {
    table
        .entries
        .get(&feature)
        .copied()
        .ok_or(AnalysisError::MissingFeature(feature))
}

/// One [`ComparisonResult`] per feature, in [`FeatureKind::ALL`] order.
/// Both tables must use the same denominator.
pub fn compare_corpora(
    human: &DensityTable,
    model: &DensityTable,
) -> Result<Vec<ComparisonResult>, AnalysisError> {
    if human.denominator != model.denominator {
        return Err(AnalysisError::DenominatorMismatch {
            human: human.denominator,
            model: model.denominator,
        });
    }
    let scale = human.denominator.scale();
    FeatureKind::ALL
        .into_iter()
        .map(|feature| {
            let h = entry(human, feature)?;
            let m = entry(model, feature)?;
            compare_counts(
                feature,
                None,
                (h.hit_sentences, h.total),
                (m.hit_sentences, m.total),
                scale,
            )
            .map_err(AnalysisError::from)
        })
        .collect()
}

/// The `k` subjects the feature fires with most often, counting each
/// sentence once per subject. Ties go to the lexicographically smaller
/// subject; fewer than `k` come back when fewer exist.
pub fn top_human_contexts(hits: &[FeatureHit], feature: FeatureKind, k: usize) -> Vec<String> {
    let mut sentences: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for hit in hits.iter().filter(|h| h.feature == feature) {
        if let Some(subject) = hit.subject.as_deref().filter(|s| !s.is_empty()) {
            sentences
                .entry(subject)
                .or_default()
                .insert(hit.sentence_id());
        }
    }
    let mut ranked: Vec<(&str, usize)> = sentences
        .iter()
        .map(|(subject, ids)| (*subject, ids.len()))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    ranked
        .into_iter()
        .take(k)
        .map(|(subject, _)| subject.to_string())
        .collect()
}

/// Model side of a context row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextCell {
    /// Sentences where the feature fired predicated of the subject.
    pub hit_sentences: u64,
    /// Sentences whose first subject is the subject.
    pub subject_sentences: u64,
    pub rate: Real,
    pub comparison: ComparisonResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextRow {
    pub subject: String,
    pub human_hit_sentences: u64,
    pub human_subject_sentences: u64,
    pub human_rate: Real,
    /// Absent when no model sentence is led by this subject; reports print
    /// those cells as "--".
    pub model: Option<ContextCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextTable {
    pub feature: FeatureKind,
    /// Rows in lexicographic subject order.
    pub contexts: Vec<ContextRow>,
}

/// How many sentences open with each subject token (lowercased).
pub fn subject_sentence_counts(corpus: &Corpus) -> BTreeMap<String, u64> {
    let mut totals: BTreeMap<String, u64> = BTreeMap::new();
    for sentence in &corpus.sentences {
        if let Some(subject) = first_subject(sentence) {
            *totals.entry(subject).or_default() += 1;
        }
    }
    totals
}

fn subject_hit_counts(hits: &[FeatureHit], feature: FeatureKind) -> BTreeMap<String, u64> {
    let mut sentences: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for hit in hits.iter().filter(|h| h.feature == feature) {
        if let Some(subject) = hit.subject.clone() {
            sentences.entry(subject).or_default().insert(hit.sentence_id());
        }
    }
    sentences
        .into_iter()
        .map(|(subject, ids)| (subject, ids.len() as u64))
        .collect()
}

/// Subject-conditioned rates for one feature. Per subject s the rate is
/// (#sentences where the feature fires predicated of s) / (#sentences whose
/// first subject is s): given a sentence about s, how often the feature
/// shows up. Rows follow `contexts` sorted lexicographically.
pub fn contextual_compare(
    feature: FeatureKind,
    contexts: &[String],
    human_corpus: &Corpus,
    human_hits: &[FeatureHit],
    model_corpus: &Corpus,
    model_hits: &[FeatureHit],
) -> Result<ContextTable, AnalysisError> {
    if !SUBJECT_LOCAL_FEATURES.contains(&feature) {
        return Err(AnalysisError::ConstructionFeature(feature));
    }
    let human_totals = subject_sentence_counts(human_corpus);
    let model_totals = subject_sentence_counts(model_corpus);
    let human_counts = subject_hit_counts(human_hits, feature);
    let model_counts = subject_hit_counts(model_hits, feature);

    let mut subjects: Vec<&String> = contexts.iter().collect();
    subjects.sort();

    let mut rows = Vec::with_capacity(subjects.len());
    for subject in subjects {
        let human_n = human_totals.get(subject).copied().unwrap_or(0);
        if human_n == 0 {
            return Err(AnalysisError::EmptyContext {
                corpus: human_corpus.name.clone(),
                subject: subject.clone(),
            });
        }
        let human_k = human_counts.get(subject).copied().unwrap_or(0);
        let model_n = model_totals.get(subject).copied().unwrap_or(0);
        let model = if model_n == 0 {
            None
        } else {
            let model_k = model_counts.get(subject).copied().unwrap_or(0);
            let comparison = compare_counts(
                feature,
                Some(subject.clone()),
                (human_k, human_n),
                (model_k, model_n),
                1.0,
            )?;
            Some(ContextCell {
                hit_sentences: model_k,
                subject_sentences: model_n,
                rate: model_k as Real / model_n as Real,
                comparison,
            })
        };
        rows.push(ContextRow {
            subject: subject.clone(),
            human_hit_sentences: human_k,
            human_subject_sentences: human_n,
            human_rate: human_k as Real / human_n as Real,
            model,
        });
    }
    Ok(ContextTable {
        feature,
        contexts: rows,
    })
}

/// Densities of one feature across the subsample draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySeries {
    /// One density per subsample, in draw order.
    pub densities: Vec<Real>,
    pub mean: Real,
    /// (max − min) / mean; zero when the feature never fires.
    pub relative_spread: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub corpus_name: String,
    pub denominator: Denominator,
    pub n_subsamples: usize,
    pub subsample_size: usize,
    pub seed: u64,
    pub features: BTreeMap<FeatureKind, StabilitySeries>,
}

fn series(densities: Vec<Real>) -> StabilitySeries {
    let mean = densities.iter().sum::<Real>() / densities.len() as Real;
    let (mut lo, mut hi) = (Real::INFINITY, Real::NEG_INFINITY);
    for &d in &densities {
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let relative_spread = if mean == 0.0 { 0.0 } else { (hi - lo) / mean };
    StabilitySeries {
        densities,
        mean,
        relative_spread,
    }
}

/// Feature densities over `n_subsamples` uniform draws of `size` sentences,
/// with the spread across draws. Per-draw seeds come from one stream seeded
/// with `seed`, so the whole report is deterministic.
pub fn stability_analysis(
    corpus: &Corpus,
    hits: &[FeatureHit],
    denominator: Denominator,
    n_subsamples: usize,
    size: usize,
    seed: u64,
) -> Result<StabilityReport, AnalysisError> {
    if n_subsamples == 0 {
        return Err(AnalysisError::NoSubsamples);
    }
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let mut per_feature: BTreeMap<FeatureKind, Vec<Real>> = FeatureKind::ALL
        .into_iter()
        .map(|f| (f, Vec::with_capacity(n_subsamples)))
        .collect();
    for _ in 0..n_subsamples {
        let subsample = sample_sentences(corpus, size, seeder.gen())?;
        let kept: BTreeSet<String> = subsample
            .sentences
            .iter()
            .map(|s| s.sentence_id())
            .collect();
        let sub_hits: Vec<FeatureHit> = hits
            .iter()
            .filter(|h| kept.contains(&h.sentence_id()))
            .cloned()
            .collect();
        let table = compute_densities(&sub_hits, &subsample, denominator);
        for (feature, entry) in table.entries {
            per_feature
                .get_mut(&feature)
                .expect("all features preallocated")
                .push(entry.density);
        }
    }
    Ok(StabilityReport {
        corpus_name: corpus.name.clone(),
        denominator,
        n_subsamples,
        subsample_size: size,
        seed,
        features: per_feature
            .into_iter()
            .map(|(f, densities)| (f, series(densities)))
            .collect(),
    })
}
