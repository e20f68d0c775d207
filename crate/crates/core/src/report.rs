//! Result rendering: feature-density comparisons, contextual tables,
//! sentiment summaries, and stability spreads as Markdown, CSV, or JSON.
//!
//! Markdown is the display surface (three decimals, significant deltas in
//! bold); CSV and JSON are machine surfaces (full precision, significance
//! as a flag). Rendering is a pure function of the bundle, so identical
//! bundles give byte-identical text, and every file carries the bundle's
//! provenance: as a footer line (Markdown), `#` comment header (CSV), or
//! field (JSON).

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    ComparisonResult, ContextTable, DensityTable, StabilityReport,
};
use crate::detectors::FeatureKind;
use crate::sentiment::SentimentSummary;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatParseError(String);

impl core::fmt::Display for FormatParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "unknown report format {:?} (expected md, csv, or json)", self.0)
    }
}

impl std::error::Error for FormatParseError {}

impl FromStr for ReportFormat {
    type Err = FormatParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(FormatParseError(other.to_string())),
        }
    }
}

/// Where a bundle came from: stamped into every rendered file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub corpora: Vec<String>,
    pub seed: u64,
    pub config_hash: String,
}

impl Provenance {
    pub fn new(corpora: Vec<String>, seed: u64, config_text: &str) -> Self {
        Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            corpora,
            seed,
            config_hash: format!("{:016x}", fnv1a64(config_text.as_bytes())),
        }
    }

    fn footer(&self) -> String {
        format!(
            "*tool {}; corpora: {}; seed {}; config {}*\n",
            self.tool_version,
            self.corpora.join(", "),
            self.seed,
            self.config_hash
        )
    }

    fn csv_header(&self) -> String {
        format!(
            "# tool_version: {}\n# corpora: {}\n# seed: {}\n# config_hash: {}\n",
            self.tool_version,
            self.corpora.join(", "),
            self.seed,
            self.config_hash
        )
    }
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// One model corpus measured against the shared human baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub corpus: String,
    pub densities: DensityTable,
    pub comparisons: Vec<ComparisonResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelContextTable {
    pub model: String,
    pub table: ContextTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSentiment {
    pub corpus: String,
    pub summary: SentimentSummary,
}

/// Everything one pipeline run produced, in render-ready form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub provenance: Provenance,
    pub human: DensityTable,
    pub models: Vec<ModelReport>,
    pub contexts: Vec<ModelContextTable>,
    pub sentiment: Vec<CorpusSentiment>,
    pub stability: Vec<StabilityReport>,
}

/// Three-decimal display form; negative zero collapses to "0.000".
fn d3(x: Real) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn delta_cell(c: &ComparisonResult) -> String {
    if c.significant {
        format!("**{}**", d3(c.delta))
    } else {
        d3(c.delta)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_section<T: Serialize>(provenance: &Provenance, name: &str, payload: &T) -> String {
    let mut root = serde_json::Map::new();
    root.insert(
        "provenance".to_string(),
        serde_json::to_value(provenance).expect("provenance serializes"),
    );
    root.insert(
        name.to_string(),
        serde_json::to_value(payload).expect("report payload serializes"),
    );
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(root))
        .expect("report section serializes");
    text.push('\n');
    text
}

/// Feature-by-feature densities with one density and delta column per
/// model. Markdown bolds exactly the deltas with p < 0.05.
pub fn render_feature_table(
    human: &DensityTable,
    models: &[ModelReport],
    provenance: &Provenance,
    format: ReportFormat,
) -> String {
    match format {
        ReportFormat::Markdown => {
            let mut out = format!(
                "# Feature densities ({})\n\nHuman baseline: {}\n\n",
                human.denominator.label(),
                human.corpus_name
            );
            out.push_str("| Feature | Human |");
            for m in models {
                let _ = write!(out, " {} | Δ {} |", m.corpus, m.corpus);
            }
            out.push_str("\n|---|---:|");
            for _ in models {
                out.push_str("---:|---:|");
            }
            out.push('\n');
            for feature in FeatureKind::ALL {
                let _ = write!(out, "| {} |", feature.label());
                let _ = write!(out, " {} |", d3(human.entries[&feature].density));
                for m in models {
                    let c = m
                        .comparisons
                        .iter()
                        .find(|c| c.feature == feature)
                        .expect("comparison for every feature");
                    let _ = write!(
                        out,
                        " {} | {} |",
                        d3(m.densities.entries[&feature].density),
                        delta_cell(c)
                    );
                }
                out.push('\n');
            }
            out.push('\n');
            out.push_str(&provenance.footer());
            out
        }
        ReportFormat::Csv => {
            let mut out = provenance.csv_header();
            out.push_str(
                "feature,denominator,human_corpus,human_density,model_corpus,model_density,delta,ci_low,ci_high,test,statistic,p_value,significant\n",
            );
            for m in models {
                for feature in FeatureKind::ALL {
                    let c = m
                        .comparisons
                        .iter()
                        .find(|c| c.feature == feature)
                        .expect("comparison for every feature");
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                        feature.slug(),
                        human.denominator.slug(),
                        csv_field(&human.corpus_name),
                        human.entries[&feature].density,
                        csv_field(&m.corpus),
                        m.densities.entries[&feature].density,
                        c.delta,
                        c.ci95.0,
                        c.ci95.1,
                        c.test,
                        c.statistic.map(|s| s.to_string()).unwrap_or_default(),
                        c.p_value,
                        c.significant
                    );
                }
            }
            out
        }
        ReportFormat::Json => {
            #[derive(Serialize)]
            struct Payload<'a> {
                human: &'a DensityTable,
                models: &'a [ModelReport],
            }
            json_section(provenance, "feature_table", &Payload { human, models })
        }
    }
}

/// Per-subject rates for one feature and one model. Subjects the model
/// never led a sentence with render as "--".
pub fn render_context_table(
    ctx: &ModelContextTable,
    provenance: &Provenance,
    format: ReportFormat,
) -> String {
    match format {
        ReportFormat::Markdown => {
            let mut out = format!(
                "# {} by subject: {}\n\n| Subject | Human | {} | Δ |\n|---|---:|---:|---:|\n",
                ctx.table.feature.label(),
                ctx.model,
                ctx.model
            );
            for row in &ctx.table.contexts {
                let _ = write!(out, "| {} | {} |", row.subject, d3(row.human_rate));
                match &row.model {
                    Some(cell) => {
                        let _ = write!(
                            out,
                            " {} | {} |",
                            d3(cell.rate),
                            delta_cell(&cell.comparison)
                        );
                    }
                    None => out.push_str(" -- | -- |"),
                }
                out.push('\n');
            }
            out.push('\n');
            out.push_str(&provenance.footer());
            out
        }
        ReportFormat::Csv => {
            let mut out = provenance.csv_header();
            out.push_str(
                "feature,model,subject,human_hits,human_n,human_rate,model_hits,model_n,model_rate,delta,p_value,significant\n",
            );
            for row in &ctx.table.contexts {
                let (mh, mn, mr, delta, p, sig) = match &row.model {
                    Some(cell) => (
                        cell.hit_sentences.to_string(),
                        cell.subject_sentences.to_string(),
                        cell.rate.to_string(),
                        cell.comparison.delta.to_string(),
                        cell.comparison.p_value.to_string(),
                        cell.comparison.significant.to_string(),
                    ),
                    None => Default::default(),
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    ctx.table.feature.slug(),
                    csv_field(&ctx.model),
                    csv_field(&row.subject),
                    row.human_hit_sentences,
                    row.human_subject_sentences,
                    row.human_rate,
                    mh,
                    mn,
                    mr,
                    delta,
                    p,
                    sig
                );
            }
            out
        }
        ReportFormat::Json => json_section(provenance, "context_table", ctx),
    }
}

/// Mean compound score and category shares per corpus.
pub fn render_sentiment(
    summaries: &[CorpusSentiment],
    provenance: &Provenance,
    format: ReportFormat,
) -> String {
    match format {
        ReportFormat::Markdown => {
            let mut out = String::from(
                "# Sentence sentiment\n\n| Corpus | Sentences | Mean compound | Negative | Neutral | Positive |\n|---|---:|---:|---:|---:|---:|\n",
            );
            for s in summaries {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} |",
                    s.corpus,
                    s.summary.n_sentences,
                    d3(s.summary.mean_compound),
                    d3(s.summary.proportions.negative),
                    d3(s.summary.proportions.neutral),
                    d3(s.summary.proportions.positive)
                );
            }
            out.push('\n');
            out.push_str(&provenance.footer());
            out
        }
        ReportFormat::Csv => {
            let mut out = provenance.csv_header();
            out.push_str("corpus,n_sentences,mean_compound,negative,neutral,positive\n");
            for s in summaries {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    csv_field(&s.corpus),
                    s.summary.n_sentences,
                    s.summary.mean_compound,
                    s.summary.proportions.negative,
                    s.summary.proportions.neutral,
                    s.summary.proportions.positive
                );
            }
            out
        }
        ReportFormat::Json => json_section(provenance, "sentiment", &summaries),
    }
}

/// Subsample spread per feature and corpus.
pub fn render_stability(
    reports: &[StabilityReport],
    provenance: &Provenance,
    format: ReportFormat,
) -> String {
    match format {
        ReportFormat::Markdown => {
            let mut out = String::from("# Density stability under subsampling\n");
            for r in reports {
                let _ = write!(
                    out,
                    "\n## {} ({} draws of {} sentences, seed {})\n\n| Feature | Mean ({}) | Min | Max | Spread/mean |\n|---|---:|---:|---:|---:|\n",
                    r.corpus_name,
                    r.n_subsamples,
                    r.subsample_size,
                    r.seed,
                    r.denominator.label()
                );
                for (feature, series) in &r.features {
                    let (mut lo, mut hi) = (Real::INFINITY, Real::NEG_INFINITY);
                    for &d in &series.densities {
                        lo = lo.min(d);
                        hi = hi.max(d);
                    }
                    let _ = writeln!(
                        out,
                        "| {} | {} | {} | {} | {} |",
                        feature.label(),
                        d3(series.mean),
                        d3(lo),
                        d3(hi),
                        d3(series.relative_spread)
                    );
                }
            }
            out.push('\n');
            out.push_str(&provenance.footer());
            out
        }
        ReportFormat::Csv => {
            let mut out = provenance.csv_header();
            out.push_str("corpus,denominator,feature,subsample,density\n");
            for r in reports {
                for (feature, series) in &r.features {
                    for (i, &density) in series.densities.iter().enumerate() {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{}",
                            csv_field(&r.corpus_name),
                            r.denominator.slug(),
                            feature.slug(),
                            i,
                            density
                        );
                    }
                }
            }
            out
        }
        ReportFormat::Json => json_section(provenance, "stability", &reports),
    }
}

/// Long-format density CSV, one row per corpus and feature: the plot-ready
/// twin of the feature table.
pub fn emit_plot_data(bundle: &ReportBundle) -> String {
    let mut out = bundle.provenance.csv_header();
    out.push_str("corpus,feature,denominator,density\n");
    let mut table_rows = |table: &DensityTable| {
        for (feature, entry) in &table.entries {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                csv_field(&table.corpus_name),
                feature.slug(),
                table.denominator.slug(),
                entry.density
            );
        }
    };
    table_rows(&bundle.human);
    for m in &bundle.models {
        table_rows(&m.densities);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{compare_corpora, compute_densities, Denominator};
    use crate::corpus::{tokenize, Corpus, Origin, Sentence};
    use crate::detectors::detect_all;
    use crate::sentiment::SentimentShares;
    use crate::tagger::Lexicon;

    fn corpus_of(name: &str, origin: Origin, texts: &[&str]) -> Corpus {
        let lexicon = Lexicon::builtin();
        let sentences: Vec<Sentence> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let mut s = Sentence {
                    doc_id: "d".to_string(),
                    index: i,
                    text: (*t).to_string(),
                    raw: (*t).to_string(),
                    tokens: tokenize(t),
                };
                lexicon.tag_sentence(&mut s);
                s
            })
            .collect();
        Corpus::from_sentences(name, origin, sentences)
    }

    fn bundle() -> ReportBundle {
        let human = corpus_of(
            "people",
            Origin::Human,
            &[
                "He ain't coming back.",
                "She be working late.",
                "They walked home.",
                "It ain't right.",
            ],
        );
        let model = corpus_of(
            "mock-model",
            Origin::Model,
            &[
                "He ain't here.",
                "The sun rose early.",
                "Birds sang all morning.",
                "The coffee went cold.",
            ],
        );
        let lexicon = Lexicon::builtin();
        let human_hits = detect_all(&human, &lexicon);
        let model_hits = detect_all(&model, &lexicon);
        let ht = compute_densities(&human_hits, &human, Denominator::Per100Sentences);
        let mt = compute_densities(&model_hits, &model, Denominator::Per100Sentences);
        let comparisons = compare_corpora(&ht, &mt).unwrap();
        let provenance = Provenance::new(
            vec!["people".to_string(), "mock-model".to_string()],
            42,
            "denominator = per100\n",
        );
        ReportBundle {
            provenance,
            human: ht,
            models: vec![ModelReport {
                corpus: "mock-model".to_string(),
                densities: mt,
                comparisons,
            }],
            contexts: Vec::new(),
            sentiment: vec![CorpusSentiment {
                corpus: "people".to_string(),
                summary: SentimentSummary {
                    mean_compound: 0.1234567,
                    proportions: SentimentShares {
                        negative: 0.25,
                        neutral: 0.5,
                        positive: 0.25,
                    },
                    n_sentences: 4,
                },
            }],
            stability: Vec::new(),
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let b = bundle();
        for format in [ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::Json] {
            let first = render_feature_table(&b.human, &b.models, &b.provenance, format);
            let second = render_feature_table(&b.human, &b.models, &b.provenance, format);
            assert_eq!(first, second);
        }
        assert_eq!(emit_plot_data(&b), emit_plot_data(&b));
    }

    #[test]
    fn markdown_bolds_exactly_the_significant_deltas() {
        let mut b = bundle();
        let probes = [(0.049, true), (0.05, false), (0.051, false)];
        for (i, (p, _)) in probes.iter().enumerate() {
            b.models[0].comparisons[i].p_value = *p;
            b.models[0].comparisons[i].significant = *p < 0.05;
        }
        let md = render_feature_table(&b.human, &b.models, &b.provenance, ReportFormat::Markdown);
        for (i, (_, bold)) in probes.iter().enumerate() {
            let row = md
                .lines()
                .find(|l| l.starts_with(&format!("| {} |", FeatureKind::ALL[i].label())))
                .unwrap();
            let delta = row.rsplit('|').nth(1).unwrap().trim();
            assert_eq!(
                delta.starts_with("**") && delta.ends_with("**"),
                *bold,
                "{row}"
            );
        }
    }

    #[test]
    fn every_surface_carries_provenance() {
        let b = bundle();
        let hash = &b.provenance.config_hash;
        let md = render_feature_table(&b.human, &b.models, &b.provenance, ReportFormat::Markdown);
        assert!(md.contains(hash) && md.contains("seed 42"));
        let csv = render_feature_table(&b.human, &b.models, &b.provenance, ReportFormat::Csv);
        assert!(csv.starts_with("# tool_version:") && csv.contains(hash));
        let json = render_feature_table(&b.human, &b.models, &b.provenance, ReportFormat::Json);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["provenance"]["config_hash"], *hash);
        assert!(render_sentiment(&b.sentiment, &b.provenance, ReportFormat::Markdown)
            .contains(hash));
        assert!(render_stability(&b.stability, &b.provenance, ReportFormat::Csv).contains(hash));
        assert!(emit_plot_data(&b).contains(hash));
    }

    #[test]
    fn json_round_trips_comparison_values_exactly() {
        let b = bundle();
        let json = render_feature_table(&b.human, &b.models, &b.provenance, ReportFormat::Json);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let models: Vec<ModelReport> =
            serde_json::from_value(v["feature_table"]["models"].clone()).unwrap();
        assert_eq!(models, b.models);
        let human: DensityTable =
            serde_json::from_value(v["feature_table"]["human"].clone()).unwrap();
        assert_eq!(human, b.human);
    }

    #[test]
    fn markdown_rounds_but_json_does_not() {
        let b = bundle();
        let aint = b.human.entries[&FeatureKind::Aint].density;
        assert_eq!(aint, 50.0);
        let md = render_feature_table(&b.human, &b.models, &b.provenance, ReportFormat::Markdown);
        assert!(md.contains("| 50.000 |"));
        let json = render_feature_table(&b.human, &b.models, &b.provenance, ReportFormat::Json);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(
            v["feature_table"]["human"]["entries"]["aint"]["density"],
            50.0
        );
    }

    #[test]
    fn negative_zero_displays_unsigned() {
        assert_eq!(d3(-0.0001), "0.000");
        assert_eq!(d3(-0.0), "0.000");
        assert_eq!(d3(0.0004), "0.000");
        assert_eq!(d3(-0.0006), "-0.001");
    }

    #[test]
    fn context_rows_mark_absent_model_cells() {
        use crate::analysis::{contextual_compare, top_human_contexts};
        let human = corpus_of(
            "people",
            Origin::Human,
            &[
                "He ain't ready.",
                "He walked home.",
                "She ain't here.",
                "She sang loud.",
            ],
        );
        let model = corpus_of(
            "mock-model",
            Origin::Model,
            &["He ain't done.", "He smiled wide.", "It rained hard."],
        );
        let lexicon = Lexicon::builtin();
        let human_hits = detect_all(&human, &lexicon);
        let model_hits = detect_all(&model, &lexicon);
        let contexts = top_human_contexts(&human_hits, FeatureKind::Aint, 5);
        let table = contextual_compare(
            FeatureKind::Aint,
            &contexts,
            &human,
            &human_hits,
            &model,
            &model_hits,
        )
        .unwrap();
        let ctx = ModelContextTable {
            model: "mock-model".to_string(),
            table,
        };
        let provenance = Provenance::new(vec!["people".into()], 1, "");
        let md = render_context_table(&ctx, &provenance, ReportFormat::Markdown);
        assert!(md.lines().any(|l| l.starts_with("| she |") && l.contains("| -- | -- |")));
        assert!(md.lines().any(|l| l.starts_with("| he |") && !l.contains("--")));
        let csv = render_context_table(&ctx, &provenance, ReportFormat::Csv);
        assert!(csv.lines().any(|l| l.starts_with("aint,mock-model,she,") && l.ends_with(",,,,,")));
    }

    #[test]
    fn plot_data_is_long_format() {
        let b = bundle();
        let csv = emit_plot_data(&b);
        let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "corpus,feature,denominator,density");
        assert_eq!(rows.len(), 1 + 14);
        assert!(rows.iter().any(|r| r.starts_with("people,aint,per_100_sentences,")));
        assert!(rows.iter().any(|r| r.starts_with("mock-model,null_copula,")));
    }

    #[test]
    fn format_slugs_parse() {
        assert_eq!("md".parse::<ReportFormat>().unwrap(), ReportFormat::Markdown);
        assert_eq!("csv".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
        assert_eq!("json".parse::<ReportFormat>().unwrap(), ReportFormat::Json);
        assert!("tsv".parse::<ReportFormat>().is_err());
    }

    #[test]
    fn fnv_hash_matches_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }
}
