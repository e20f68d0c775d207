//! End-to-end orchestration: ingest, tag, detect, compare, context,
//! sentiment, stability, bundled for rendering.

use std::path::PathBuf;

use thiserror::Error;

use crate::analysis::{
    compare_corpora, compute_densities, contextual_compare, stability_analysis,
    subject_sentence_counts, top_human_contexts, SUBJECT_LOCAL_FEATURES,
};
use crate::config::Config;
use crate::corpus::{load_corpus, Corpus, IngestFormat, IngestOptions, Origin};
use crate::detectors::{detect_all, FeatureHit};
use crate::report::{
    CorpusSentiment, ModelContextTable, ModelReport, Provenance, ReportBundle,
};
use crate::sentiment::{summarize, SentimentLexicon};
use crate::tagger::Lexicon;

/// One corpus to load: a name, its on-disk format, and the input files.
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub name: String,
    pub format: IngestFormat,
    pub paths: Vec<PathBuf>,
}

#[derive(Debug, Error)]
#[error("{stage}: {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub message: String,
}

fn at(stage: &'static str, e: impl std::fmt::Display) -> PipelineError {
    PipelineError {
        stage,
        message: e.to_string(),
    }
}

struct Analyzed {
    corpus: Corpus,
    hits: Vec<FeatureHit>,
}

/// Runs the full workflow over one human corpus and any number of model
/// corpora. Deterministic: equal config and inputs give an equal bundle.
pub fn run_pipeline(
    config: &Config,
    human: &CorpusSpec,
    models: &[CorpusSpec],
) -> Result<ReportBundle, PipelineError> {
    let ingest = |spec: &CorpusSpec, origin: Origin| -> Result<Corpus, PipelineError> {
        let options = IngestOptions {
            annotation_patterns: config.cleaner_patterns.clone(),
            exclude_speakers: config.exclude_speakers.clone(),
            model_name: (origin == Origin::Model).then(|| spec.name.clone()),
        };
        load_corpus(&spec.paths, spec.format, origin, &spec.name, &options)
            .map_err(|e| at("ingest", e))
    };
    let mut human_corpus = ingest(human, Origin::Human)?;
    let mut model_corpora = models
        .iter()
        .map(|spec| ingest(spec, Origin::Model))
        .collect::<Result<Vec<_>, _>>()?;

    let lexicon = match &config.tagger_lexicon {
        Some(path) => Lexicon::from_file(path).map_err(|e| at("tag", e))?,
        None => Lexicon::builtin(),
    };
    lexicon.tag_corpus(&mut human_corpus);
    for corpus in &mut model_corpora {
        lexicon.tag_corpus(corpus);
    }

    let detect = |corpus: Corpus| -> Result<Analyzed, PipelineError> {
        if corpus.sentences.is_empty() {
            return Err(at("detect", format!("empty corpus: {}", corpus.name)));
        }
        let hits = detect_all(&corpus, &lexicon);
        Ok(Analyzed { corpus, hits })
    };
    let human = detect(human_corpus)?;
    let models = model_corpora
        .into_iter()
        .map(detect)
        .collect::<Result<Vec<_>, _>>()?;

    let human_table = compute_densities(&human.hits, &human.corpus, config.denominator);
    let mut model_reports = Vec::new();
    for model in &models {
        let densities = compute_densities(&model.hits, &model.corpus, config.denominator);
        let mut comparisons =
            compare_corpora(&human_table, &densities).map_err(|e| at("compare", e))?;
        for result in &mut comparisons {
            result.significant = result.p_value < config.alpha;
        }
        model_reports.push(ModelReport {
            corpus: model.corpus.name.clone(),
            densities,
            comparisons,
        });
    }

    let human_subjects = subject_sentence_counts(&human.corpus);
    let mut contexts = Vec::new();
    for model in &models {
        for feature in SUBJECT_LOCAL_FEATURES {
            let picked: Vec<String> =
                top_human_contexts(&human.hits, feature, config.top_contexts)
                    .into_iter()
                    .filter(|s| human_subjects.get(s).copied().unwrap_or(0) > 0)
                    .collect();
            if picked.is_empty() {
                continue;
            }
            let mut table = contextual_compare(
                feature,
                &picked,
                &human.corpus,
                &human.hits,
                &model.corpus,
                &model.hits,
            )
            .map_err(|e| at("context", e))?;
            for row in &mut table.contexts {
                if let Some(cell) = &mut row.model {
                    cell.comparison.significant = cell.comparison.p_value < config.alpha;
                }
            }
            contexts.push(ModelContextTable {
                model: model.corpus.name.clone(),
                table,
            });
        }
    }

    let sentiment_lexicon = match &config.sentiment_lexicon {
        Some(path) => SentimentLexicon::from_file(path).map_err(|e| at("sentiment", e))?,
        None => SentimentLexicon::builtin(),
    };
    let mut sentiment = Vec::new();
    for analyzed in std::iter::once(&human).chain(&models) {
        let summary = summarize(&analyzed.corpus, &sentiment_lexicon)
            .map_err(|e| at("sentiment", e))?;
        sentiment.push(CorpusSentiment {
            corpus: analyzed.corpus.name.clone(),
            summary,
        });
    }

    let mut stability = Vec::new();
    if config.stability_subsamples > 0 {
        for analyzed in std::iter::once(&human).chain(&models) {
            let size = config.stability_size.min(analyzed.corpus.sentences.len());
            let report = stability_analysis(
                &analyzed.corpus,
                &analyzed.hits,
                config.denominator,
                config.stability_subsamples,
                size,
                config.seed,
            )
            .map_err(|e| at("stability", e))?;
            stability.push(report);
        }
    }

    let corpora = std::iter::once(&human)
        .chain(&models)
        .map(|a| a.corpus.name.clone())
        .collect();
    Ok(ReportBundle {
        provenance: Provenance::new(corpora, config.seed, &config.canonical_text()),
        human: human_table,
        models: model_reports,
        contexts,
        sentiment,
        stability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;
    use std::path::Path;

    fn write_jsonl(dir: &Path, name: &str, lines: &[&str]) -> PathBuf {
        let path = dir.join(name);
        let mut file = std::fs::File::create(&path).unwrap();
        for line in lines {
            writeln!(file, "{{\"text\": {}}}", serde_json::to_string(line).unwrap())
                .unwrap();
        }
        path
    }

    fn human_lines() -> Vec<&'static str> {
        vec![
            "He ain't got no answer for that.",
            "She be working every morning before class.",
            "I done told you about that gate.",
            "He might could fix it tomorrow.",
            "She runnin late again.",
            "He ain't never been more happier about it.",
            "They was laughing the whole ride home.",
            "My cousin stay out by the river.",
            "She be singing while she cook.",
            "He done finished the whole plate.",
        ]
    }

    fn model_lines() -> Vec<&'static str> {
        vec![
            "He is not available right now.",
            "She works every morning before class.",
            "I already told you about the gate.",
            "He might be able to fix it tomorrow.",
            "She is running late again.",
            "He ain't got no patience today.",
            "They were laughing the whole ride home.",
            "My cousin lives near the river.",
        ]
    }

    fn specs(dir: &Path) -> (CorpusSpec, CorpusSpec) {
        let human = write_jsonl(dir, "human.jsonl", &human_lines());
        let model = write_jsonl(dir, "model.jsonl", &model_lines());
        (
            CorpusSpec {
                name: "fixture_human".to_string(),
                format: IngestFormat::Jsonl,
                paths: vec![human],
            },
            CorpusSpec {
                name: "fixture_model".to_string(),
                format: IngestFormat::Jsonl,
                paths: vec![model],
            },
        )
    }

    fn small_config() -> Config {
        let mut config = Config::default();
        config.stability_subsamples = 3;
        config.stability_size = 5;
        config
    }

    #[test]
    fn full_run_produces_a_complete_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let (human, model) = specs(dir.path());
        let bundle = run_pipeline(&small_config(), &human, &[model]).unwrap();
        assert_eq!(bundle.human.corpus_name, "fixture_human");
        assert_eq!(bundle.models.len(), 1);
        assert_eq!(bundle.models[0].comparisons.len(), 7);
        assert!(!bundle.contexts.is_empty());
        assert_eq!(bundle.sentiment.len(), 2);
        assert_eq!(bundle.stability.len(), 2);
        assert_eq!(
            bundle.provenance.corpora,
            vec!["fixture_human".to_string(), "fixture_model".to_string()]
        );
    }

    #[test]
    fn reruns_are_identical() {
        let dir = tempfile::tempdir().unwrap();
        let (human, model) = specs(dir.path());
        let config = small_config();
        let first = run_pipeline(&config, &human, std::slice::from_ref(&model)).unwrap();
        let second = run_pipeline(&config, &human, std::slice::from_ref(&model)).unwrap();
        assert_eq!(
            serde_json::to_string(&first).unwrap(),
            serde_json::to_string(&second).unwrap()
        );
    }

    #[test]
    fn empty_model_corpus_fails_in_the_detect_stage() {
        let dir = tempfile::tempdir().unwrap();
        let (human, _) = specs(dir.path());
        let empty = write_jsonl(dir.path(), "empty.jsonl", &[]);
        let model = CorpusSpec {
            name: "empty_model".to_string(),
            format: IngestFormat::Jsonl,
            paths: vec![empty],
        };
        let err = run_pipeline(&small_config(), &human, &[model]).unwrap_err();
        assert_eq!(err.stage, "detect");
        assert_eq!(err.to_string(), "detect: empty corpus: empty_model");
    }

    #[test]
    fn alpha_rules_the_significance_flags() {
        let dir = tempfile::tempdir().unwrap();
        let (human, model) = specs(dir.path());
        let mut lax = small_config();
        lax.alpha = 0.999;
        let bundle = run_pipeline(&lax, &human, &[model]).unwrap();
        for result in &bundle.models[0].comparisons {
            assert_eq!(result.significant, result.p_value < 0.999);
        }
        assert!(bundle.models[0].comparisons.iter().any(|r| r.significant));
    }

    #[test]
    fn stability_can_be_switched_off() {
        let dir = tempfile::tempdir().unwrap();
        let (human, model) = specs(dir.path());
        let mut config = small_config();
        config.stability_subsamples = 0;
        let bundle = run_pipeline(&config, &human, &[model]).unwrap();
        assert!(bundle.stability.is_empty());
    }

    #[test]
    fn missing_input_fails_in_the_ingest_stage() {
        let human = CorpusSpec {
            name: "gone".to_string(),
            format: IngestFormat::Jsonl,
            paths: vec![PathBuf::from("/nonexistent/creek.jsonl")],
        };
        let err = run_pipeline(&small_config(), &human, &[]).unwrap_err();
        assert_eq!(err.stage, "ingest");
    }

    #[test]
    fn subsample_size_clamps_to_the_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let (human, model) = specs(dir.path());
        let mut config = small_config();
        config.stability_size = 100_000;
        let bundle = run_pipeline(&config, &human, &[model]).unwrap();
        assert_eq!(bundle.stability[0].subsample_size as usize, human_lines().len());
    }
}
