//! Model-corpus generation against any chat-completions endpoint.
//!
//! Two prompt templates: an interview-style one with {gender}/{city} slots
//! filled by weighted sampling, and a tweet-batch one used verbatim. A job
//! posts `{model, messages, temperature, max_tokens}` with a bearer key
//! from the environment, bounded worker concurrency, and retry/backoff on
//! transient failures. Every raw response body is archived verbatim (with
//! a metadata header) to `item_NNNNN.json` before any parsing, written
//! temp-then-rename; a rerun over the same directory issues requests only
//! for missing indices. Parsed documents are rebuilt from the archives
//! alone on every run, so the expensive HTTP step stays decoupled from
//! the parser.

use std::collections::{BTreeMap, VecDeque};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Origin, RawDocument, SourceKind};

pub const GENDER_SLOT: &str = "{gender}";
pub const CITY_SLOT: &str = "{city}";

const CORAAL_TEMPLATE: &str = include_str!("../data/templates/coraal.txt");
const TWITTER_TEMPLATE: &str = include_str!("../data/templates/twitter.txt");

const REQUEST_TIMEOUT: Duration = Duration::from_secs(600);

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{kind} template {problem}")]
    TemplateSlots { kind: TemplateKind, problem: String },
    #[error("bad weights file {path}: {message}")]
    BadWeightsFile { path: PathBuf, message: String },
    #[error("{which} weights: {reason}")]
    InvalidWeights {
        which: &'static str,
        reason: String,
    },
    #[error("no API key: set the {var} environment variable")]
    MissingApiKey { var: String },
    #[error("authentication rejected by {endpoint} (HTTP {status})")]
    Auth { endpoint: String, status: u16 },
    #[error("a job must request at least one generation")]
    EmptyJob,
    #[error("HTTP client: {0}")]
    Client(#[from] reqwest::Error),
    #[error("unreadable archive {path}: {message} (delete the file to regenerate it)")]
    BadArchive { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateKind {
    CoraalStyle,
    TwitterStyle,
}

impl core::fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TemplateKind::CoraalStyle => write!(f, "coraal_style"),
            TemplateKind::TwitterStyle => write!(f, "twitter_style"),
        }
    }
}

/// A prompt body plus its kind. Interview bodies must carry both slots;
/// tweet bodies must carry neither, and render verbatim.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub kind: TemplateKind,
    body: String,
}

impl PromptTemplate {
    pub fn new(kind: TemplateKind, body: String) -> Result<Self, GeneratorError> {
        let slots = [GENDER_SLOT, CITY_SLOT];
        match kind {
            TemplateKind::CoraalStyle => {
                for slot in slots {
                    if !body.contains(slot) {
                        return Err(GeneratorError::TemplateSlots {
                            kind,
                            problem: format!("is missing the {slot} slot"),
                        });
                    }
                }
            }
            TemplateKind::TwitterStyle => {
                for slot in slots {
                    if body.contains(slot) {
                        return Err(GeneratorError::TemplateSlots {
                            kind,
                            problem: format!("must not contain the {slot} slot"),
                        });
                    }
                }
            }
        }
        Ok(PromptTemplate { kind, body })
    }

    /// The template compiled into the binary for this kind.
    pub fn builtin(kind: TemplateKind) -> Self {
        let body = match kind {
            TemplateKind::CoraalStyle => CORAAL_TEMPLATE,
            TemplateKind::TwitterStyle => TWITTER_TEMPLATE,
        };
        Self::new(kind, body.to_string()).expect("builtin templates are well formed")
    }

    pub fn from_file(kind: TemplateKind, path: &Path) -> Result<Self, GeneratorError> {
        let body = std::fs::read_to_string(path).map_err(|source| GeneratorError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::new(kind, body)
    }

    pub fn body(&self) -> &str {
        &self.body
    }
}

/// Relative slot-sampling weights. Keys are the literal strings inserted
/// into the slots; weights need not sum to one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemographicWeights {
    pub gender: BTreeMap<String, f64>,
    pub city: BTreeMap<String, f64>,
}

impl DemographicWeights {
    pub fn from_file(path: &Path) -> Result<Self, GeneratorError> {
        let text = std::fs::read_to_string(path).map_err(|source| GeneratorError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let weights: DemographicWeights =
            toml::from_str(&text).map_err(|e| GeneratorError::BadWeightsFile {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        weights.validate()?;
        Ok(weights)
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        for (which, set) in [("gender", &self.gender), ("city", &self.city)] {
            if set.is_empty() {
                return Err(GeneratorError::InvalidWeights {
                    which,
                    reason: "no entries".to_string(),
                });
            }
            let mut sum = 0.0;
            for (key, &w) in set {
                if !w.is_finite() || w < 0.0 {
                    return Err(GeneratorError::InvalidWeights {
                        which,
                        reason: format!("weight for {key:?} must be a non-negative number"),
                    });
                }
                sum += w;
            }
            if sum <= 0.0 {
                return Err(GeneratorError::InvalidWeights {
                    which,
                    reason: "weights sum to zero".to_string(),
                });
            }
        }
        Ok(())
    }
}

fn sample_key<'a>(
    set: &'a BTreeMap<String, f64>,
    which: &'static str,
    rng: &mut impl Rng,
) -> Result<&'a str, GeneratorError> {
    let dist = WeightedIndex::new(set.values().copied()).map_err(|e| {
        GeneratorError::InvalidWeights {
            which,
            reason: e.to_string(),
        }
    })?;
    let keys: Vec<&String> = set.keys().collect();
    Ok(keys[dist.sample(rng)])
}

/// Fill the template's slots by weighted sampling (gender drawn first,
/// then city, from the one rng stream). Tweet templates return their body
/// unchanged and never touch the weights.
pub fn render_prompt(
    template: &PromptTemplate,
    weights: &DemographicWeights,
    rng: &mut impl Rng,
) -> Result<String, GeneratorError> {
    match template.kind {
        TemplateKind::TwitterStyle => Ok(template.body.clone()),
        TemplateKind::CoraalStyle => {
            let gender = sample_key(&weights.gender, "gender", rng)?;
            let city = sample_key(&weights.city, "city", rng)?;
            Ok(template
                .body
                .replace(GENDER_SLOT, gender)
                .replace(CITY_SLOT, city))
        }
    }
}

/// One generation run: what to ask, how often, where to archive.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationJob {
    pub template: PromptTemplate,
    pub n_generations: usize,
    pub model: String,
    pub endpoint: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub concurrency: usize,
    pub max_attempts: u32,
    pub retry_backoff_ms: u64,
    pub api_key_var: String,
    /// Explicit key; wins over the environment lookup when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key: Option<String>,
}

impl GenerationJob {
    pub fn new(
        template: PromptTemplate,
        n_generations: usize,
        model: &str,
        endpoint: &str,
        out_dir: &Path,
    ) -> Self {
        GenerationJob {
            template,
            n_generations,
            model: model.to_string(),
            endpoint: endpoint.to_string(),
            temperature: 1.0,
            max_tokens: 8192,
            seed: 0,
            out_dir: out_dir.to_path_buf(),
            concurrency: 4,
            max_attempts: 3,
            retry_backoff_ms: 500,
            api_key_var: "API_KEY".to_string(),
            api_key: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemStatus {
    /// Fetched and archived this run.
    Archived,
    /// Archive already present; no request issued.
    Skipped,
    /// Gave up (transport) or the archived body would not parse. Any
    /// archive written stays on disk untouched.
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemOutcome {
    pub index: usize,
    pub attempts: u32,
    pub status: ItemStatus,
}

/// What a run did, plus the documents reparsed from every archive in the
/// output directory (including ones written by earlier runs).
#[derive(Debug)]
pub struct JobReport {
    pub items: Vec<ItemOutcome>,
    pub documents: Vec<RawDocument>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Archive {
    index: usize,
    kind: TemplateKind,
    model: String,
    endpoint: String,
    temperature: f64,
    max_tokens: u32,
    seed: u64,
    prompt: String,
    attempts: u32,
    response: String,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 1],
    temperature: f64,
    max_tokens: u32,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

fn item_id(index: usize) -> String {
    format!("item_{index:05}")
}

fn archive_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("{}.json", item_id(index)))
}

/// Per-item rng seed: a splitmix64 hash of the job seed and the index, so
/// an item's prompt is the same whether it is fetched on the first run or
/// on a resume.
fn item_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn archived_indices(dir: &Path) -> Result<BTreeMap<usize, PathBuf>, GeneratorError> {
    let mut found = BTreeMap::new();
    let entries = match std::fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(found),
        Err(source) => {
            return Err(GeneratorError::Io {
                path: dir.to_path_buf(),
                source,
            })
        }
    };
    for entry in entries {
        let entry = entry.map_err(|source| GeneratorError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        let index = name
            .strip_prefix("item_")
            .and_then(|rest| rest.strip_suffix(".json"))
            .filter(|digits| digits.len() == 5)
            .and_then(|digits| digits.parse::<usize>().ok());
        if let Some(index) = index {
            found.insert(index, entry.path());
        }
    }
    Ok(found)
}

fn write_archive(archive: &Archive, dir: &Path) -> Result<(), GeneratorError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| GeneratorError::Io { path, source }
    };
    let body = serde_json::to_string_pretty(archive).expect("archive serializes");
    let target = archive_path(dir, archive.index);
    let tmp = target.with_extension("json.tmp");
    std::fs::write(&tmp, body).map_err(io_err(&tmp))?;
    std::fs::rename(&tmp, &target).map_err(io_err(&target))
}

fn content_of(raw: &str) -> Result<String, String> {
    let v: serde_json::Value =
        serde_json::from_str(raw).map_err(|e| format!("response is not JSON: {e}"))?;
    v["choices"][0]["message"]["content"]
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| "response has no choices[0].message.content".to_string())
}

fn documents_of(archive: &Archive) -> Result<Vec<RawDocument>, String> {
    let content = content_of(&archive.response)?;
    let id = item_id(archive.index);
    let docs = match archive.kind {
        TemplateKind::CoraalStyle => vec![RawDocument {
            id,
            source_kind: SourceKind::Interview,
            origin: Origin::Model,
            model_name: Some(archive.model.clone()),
            text: content,
            meta: BTreeMap::new(),
        }],
        TemplateKind::TwitterStyle => content
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty())
            .enumerate()
            .map(|(t, line)| RawDocument {
                id: format!("{id}.t{:03}", t + 1),
                source_kind: SourceKind::Tweetset,
                origin: Origin::Model,
                model_name: Some(archive.model.clone()),
                text: line.to_string(),
                meta: BTreeMap::new(),
            })
            .collect(),
    };
    Ok(docs)
}

/// Documents reparsed from every archive in `dir`, in index order, plus
/// the indices whose archived bodies would not parse. Pure over the
/// archive bytes: rerunning never contacts the network.
pub fn parse_archives(dir: &Path) -> Result<ArchiveParse, GeneratorError> {
    let mut documents = Vec::new();
    let mut failures = Vec::new();
    for (index, path) in archived_indices(dir)? {
        let text = std::fs::read_to_string(&path).map_err(|source| GeneratorError::Io {
            path: path.clone(),
            source,
        })?;
        let archive: Archive =
            serde_json::from_str(&text).map_err(|e| GeneratorError::BadArchive {
                path: path.clone(),
                message: e.to_string(),
            })?;
        match documents_of(&archive) {
            Ok(mut docs) => documents.append(&mut docs),
            Err(reason) => failures.push((index, reason)),
        }
    }
    Ok(ArchiveParse {
        documents,
        failures,
    })
}

#[derive(Debug)]
pub struct ArchiveParse {
    pub documents: Vec<RawDocument>,
    pub failures: Vec<(usize, String)>,
}

fn resolve_api_key(job: &GenerationJob) -> Result<String, GeneratorError> {
    if let Some(key) = &job.api_key {
        return Ok(key.clone());
    }
    std::env::var(&job.api_key_var).map_err(|_| GeneratorError::MissingApiKey {
        var: job.api_key_var.clone(),
    })
}

fn process_item(
    client: &Client,
    job: &GenerationJob,
    key: &str,
    index: usize,
    prompt: &str,
) -> Result<ItemOutcome, GeneratorError> {
    let max_attempts = job.max_attempts.max(1);
    let mut last_error = String::new();
    for attempt in 1..=max_attempts {
        if attempt > 1 {
            let delay = job.retry_backoff_ms.saturating_mul(1 << (attempt - 2).min(16));
            std::thread::sleep(Duration::from_millis(delay));
        }
        let request = ChatRequest {
            model: &job.model,
            messages: [ChatMessage {
                role: "user",
                content: prompt,
            }],
            temperature: job.temperature,
            max_tokens: job.max_tokens,
        };
        let response = match client
            .post(&job.endpoint)
            .bearer_auth(key)
            .json(&request)
            .send()
        {
            Ok(response) => response,
            Err(e) => {
                last_error = format!("request failed: {e}");
                continue;
            }
        };
        let status = response.status();
        if status == StatusCode::UNAUTHORIZED || status == StatusCode::FORBIDDEN {
            return Err(GeneratorError::Auth {
                endpoint: job.endpoint.clone(),
                status: status.as_u16(),
            });
        }
        if status == StatusCode::TOO_MANY_REQUESTS || status.is_server_error() {
            last_error = format!("HTTP {status}");
            continue;
        }
        if !status.is_success() {
            return Ok(ItemOutcome {
                index,
                attempts: attempt,
                status: ItemStatus::Failed(format!("HTTP {status}")),
            });
        }
        let body = match response.text() {
            Ok(body) => body,
            Err(e) => {
                last_error = format!("reading body: {e}");
                continue;
            }
        };
        write_archive(
            &Archive {
                index,
                kind: job.template.kind,
                model: job.model.clone(),
                endpoint: job.endpoint.clone(),
                temperature: job.temperature,
                max_tokens: job.max_tokens,
                seed: job.seed,
                prompt: prompt.to_string(),
                attempts: attempt,
                response: body,
            },
            &job.out_dir,
        )?;
        return Ok(ItemOutcome {
            index,
            attempts: attempt,
            status: ItemStatus::Archived,
        });
    }
    Ok(ItemOutcome {
        index,
        attempts: max_attempts,
        status: ItemStatus::Failed(format!("gave up after {max_attempts} attempts: {last_error}")),
    })
}

/// Run a generation job: request every index that has no archive yet,
/// with at most `job.concurrency` requests in flight, then rebuild the
/// document list from the archives. Transport failures and unparseable
/// bodies become failed items; an auth rejection aborts the whole job.
pub fn run_job(
    job: &GenerationJob,
    weights: &DemographicWeights,
) -> Result<JobReport, GeneratorError> {
    if job.n_generations == 0 {
        return Err(GeneratorError::EmptyJob);
    }
    let key = resolve_api_key(job)?;
    std::fs::create_dir_all(&job.out_dir).map_err(|source| GeneratorError::Io {
        path: job.out_dir.clone(),
        source,
    })?;
    let existing = archived_indices(&job.out_dir)?;

    let mut outcomes: Vec<ItemOutcome> = Vec::with_capacity(job.n_generations);
    let mut pending = VecDeque::new();
    for index in 0..job.n_generations {
        if existing.contains_key(&index) {
            outcomes.push(ItemOutcome {
                index,
                attempts: 0,
                status: ItemStatus::Skipped,
            });
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(item_seed(job.seed, index));
            let prompt = render_prompt(&job.template, weights, &mut rng)?;
            pending.push_back((index, prompt));
        }
    }

    let client = Client::builder().timeout(REQUEST_TIMEOUT).build()?;
    let queue = Mutex::new(pending);
    let done = Mutex::new(Vec::new());
    let fatal = Mutex::new(None);
    let abort = AtomicBool::new(false);
    std::thread::scope(|scope| {
        for _ in 0..job.concurrency.max(1) {
            scope.spawn(|| loop {
                if abort.load(Ordering::Relaxed) {
                    return;
                }
                let Some((index, prompt)) = queue.lock().unwrap().pop_front() else {
                    return;
                };
                match process_item(&client, job, &key, index, &prompt) {
                    Ok(outcome) => done.lock().unwrap().push(outcome),
                    Err(e) => {
                        *fatal.lock().unwrap() = Some(e);
                        abort.store(true, Ordering::Relaxed);
                        return;
                    }
                }
            });
        }
    });
    if let Some(e) = fatal.into_inner().unwrap() {
        return Err(e);
    }
    outcomes.append(&mut done.into_inner().unwrap());
    outcomes.sort_by_key(|o| o.index);

    let parsed = parse_archives(&job.out_dir)?;
    for (index, reason) in &parsed.failures {
        if let Some(outcome) = outcomes.iter_mut().find(|o| o.index == *index) {
            outcome.status = ItemStatus::Failed(format!("malformed response body: {reason}"));
        }
    }
    Ok(JobReport {
        items: outcomes,
        documents: parsed.documents,
    })
}
