//! OpenAI-compatible chat client with bounded concurrency, retry with
//! exponential backoff, and an append-only JSON-lines request log that
//! makes twin runs resumable.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use tokio::sync::{Mutex, Semaphore};
use tokio::task::JoinSet;

use super::parse::{parse_reply, record_from_reply, ParsedCue};
use super::prompt::{render_prompt, PromptLanguage};
use super::{TwinProfile, TwinRun};
use crate::error::{Error, Result};
use crate::ingest::{AssociationRecord, GroupTag, MasItScore};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model: String,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
    /// environment variable holding the API key
    pub api_key_env: String,
    /// simultaneous in-flight requests
    pub max_in_flight: usize,
    /// fresh-request attempts per cue when replies stay malformed
    pub reparse_retries: usize,
    /// transport-level retries on 429/5xx
    pub http_retries: usize,
    pub request_timeout_secs: u64,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            base_url: "https://api.openai.com".into(),
            model: "gpt-oss-20b".into(),
            temperature: None,
            max_tokens: None,
            api_key_env: "OPENAI_API_KEY".into(),
            max_in_flight: 4,
            reparse_retries: 2,
            http_retries: 4,
            request_timeout_secs: 120,
        }
    }
}

#[derive(Debug, Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    temperature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_tokens: Option<u32>,
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Debug, Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Debug, Deserialize)]
struct ChatMessage {
    #[serde(default)]
    content: String,
}

pub struct ChatClient {
    http: reqwest::Client,
    config: EndpointConfig,
    api_key: String,
    limiter: Semaphore,
}

impl ChatClient {
    /// Builds a client; fails with an auth error when the configured key
    /// variable is absent from the environment.
    pub fn new(config: EndpointConfig) -> Result<Self> {
        let api_key = std::env::var(&config.api_key_env)
            .map_err(|_| Error::Auth(format!("environment variable {} not set", config.api_key_env)))?;
        let http = reqwest::Client::builder()
            .timeout(Duration::from_secs(config.request_timeout_secs))
            .build()
            .map_err(|e| Error::Endpoint(e.to_string()))?;
        Ok(ChatClient {
            http,
            limiter: Semaphore::new(config.max_in_flight.max(1)),
            config,
            api_key,
        })
    }

    pub fn model_id(&self) -> &str {
        &self.config.model
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    /// One chat completion. Retries 429 and 5xx with exponential backoff
    /// (0.5 s doubling, capped at 8 s); 401/403 fail immediately.
    pub async fn chat(&self, system: &str, user: &str) -> Result<String> {
        let _permit = self
            .limiter
            .acquire()
            .await
            .expect("limiter never closes");
        let body = ChatRequest {
            model: &self.config.model,
            messages: vec![
                serde_json::json!({"role": "system", "content": system}),
                serde_json::json!({"role": "user", "content": user}),
            ],
            temperature: self.config.temperature,
            max_tokens: self.config.max_tokens,
        };
        let url = format!(
            "{}/v1/chat/completions",
            self.config.base_url.trim_end_matches('/')
        );

        let mut attempt = 0;
        loop {
            let response = self
                .http
                .post(&url)
                .bearer_auth(&self.api_key)
                .json(&body)
                .send()
                .await;

            let retry_after = match response {
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        let parsed: ChatResponse =
                            resp.json().await.map_err(|e| Error::Endpoint(e.to_string()))?;
                        let content = parsed
                            .choices
                            .into_iter()
                            .next()
                            .map(|c| c.message.content)
                            .unwrap_or_default();
                        return Ok(content);
                    }
                    match status.as_u16() {
                        401 | 403 => {
                            return Err(Error::Auth(format!("endpoint returned {status}")))
                        }
                        429 => true,
                        s if s >= 500 => false,
                        _ => {
                            let text = resp.text().await.unwrap_or_default();
                            return Err(Error::Endpoint(format!("{status}: {text}")));
                        }
                    }
                }
                Err(e) if e.is_timeout() || e.is_connect() => false,
                Err(e) => return Err(Error::Endpoint(e.to_string())),
            };

            if attempt >= self.config.http_retries {
                return Err(if retry_after {
                    Error::RateLimited
                } else {
                    Error::Endpoint("request kept failing after retries".into())
                });
            }
            let delay = Duration::from_millis(500 * (1u64 << attempt.min(4)));
            tokio::time::sleep(delay.min(Duration::from_secs(8))).await;
            attempt += 1;
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RequestLogEntry {
    pub timestamp_secs: u64,
    pub participant_id: String,
    pub profile_hash: String,
    pub cue_index: usize,
    pub cue: String,
    pub attempt: usize,
    pub raw_reply: String,
}

/// Append-only JSON-lines log of every model reply. On resume, logged
/// replies are replayed instead of re-requested, keyed by participant and
/// cue index.
pub struct RequestLog {
    path: PathBuf,
    entries: Mutex<BTreeMap<(String, usize), Vec<String>>>,
    file: Mutex<std::fs::File>,
}

impl RequestLog {
    pub fn open(path: &Path) -> Result<Arc<Self>> {
        let mut entries: BTreeMap<(String, usize), Vec<String>> = BTreeMap::new();
        if path.exists() {
            for line in std::fs::read_to_string(path)?.lines() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let entry: RequestLogEntry = serde_json::from_str(line)
                    .map_err(|e| Error::Data(format!("corrupt request log line: {e}")))?;
                entries
                    .entry((entry.participant_id, entry.cue_index))
                    .or_default()
                    .push(entry.raw_reply);
            }
        }
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        Ok(Arc::new(RequestLog {
            path: path.to_path_buf(),
            entries: Mutex::new(entries),
            file: Mutex::new(file),
        }))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub async fn replies_for(&self, participant_id: &str, cue_index: usize) -> Vec<String> {
        self.entries
            .lock()
            .await
            .get(&(participant_id.to_string(), cue_index))
            .cloned()
            .unwrap_or_default()
    }

    pub async fn append(&self, entry: RequestLogEntry) -> Result<()> {
        let line = serde_json::to_string(&entry)?;
        {
            let mut file = self.file.lock().await;
            writeln!(file, "{line}")?;
            file.flush()?;
        }
        self.entries
            .lock()
            .await
            .entry((entry.participant_id, entry.cue_index))
            .or_default()
            .push(entry.raw_reply);
        Ok(())
    }
}

fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn task_message(cue: &str, language: PromptLanguage) -> String {
    match language {
        PromptLanguage::It => format!(
            "Parola stimolo: \"{cue}\". Scrivi le prime tre parole che ti vengono in mente \
             leggendo questa parola, il più rapidamente possibile. Poi valuta la valenza \
             emotiva della parola stimolo e di ciascuna delle tue risposte su una scala da 1 \
             (molto negativa) a 5 (molto positiva). Rispondi solo con un oggetto JSON nel \
             formato {{\"associazioni\": [\"parola1\", \"parola2\", \"parola3\"], \
             \"valenze\": {{\"{cue}\": 3, \"parola1\": 3}}}}."
        ),
        PromptLanguage::En => format!(
            "Cue word: \"{cue}\". Write the first three words that come to mind when you read \
             this word, as quickly as possible. Then rate the emotional valence of the cue \
             word and of each of your responses on a scale from 1 (very negative) to 5 (very \
             positive). Reply only with a JSON object of the form {{\"associazioni\": \
             [\"word1\", \"word2\", \"word3\"], \"valenze\": {{\"{cue}\": 3, \"word1\": 3}}}}."
        ),
    }
}

/// One synthetic participant to run: who they are and how they are keyed
/// in outputs and the request log.
#[derive(Debug, Clone)]
pub struct TwinAssignment {
    pub profile: TwinProfile,
    pub participant_id: String,
    pub group: String,
    pub cue_set_id: String,
}

enum CueOutcome {
    Parsed { raw: String, parsed: ParsedCue },
    Missing { attempts: usize },
}

struct CueJob {
    persona: String,
    participant_id: String,
    profile_hash: String,
    cue_index: usize,
    cue: String,
    language: PromptLanguage,
}

async fn resolve_cue(client: &ChatClient, log: &RequestLog, job: &CueJob) -> Result<CueOutcome> {
    let max_attempts = client.config().reparse_retries + 1;

    // replay logged replies first; a previously parsed cue never triggers
    // a new request
    let logged = log.replies_for(&job.participant_id, job.cue_index).await;
    for raw in &logged {
        if let Ok(parsed) = parse_reply(&job.cue, raw) {
            return Ok(CueOutcome::Parsed {
                raw: raw.clone(),
                parsed,
            });
        }
    }

    let mut attempts = logged.len();
    while attempts < max_attempts {
        let raw = client
            .chat(&job.persona, &task_message(&job.cue, job.language))
            .await?;
        log.append(RequestLogEntry {
            timestamp_secs: now_secs(),
            participant_id: job.participant_id.clone(),
            profile_hash: job.profile_hash.clone(),
            cue_index: job.cue_index,
            cue: job.cue.clone(),
            attempt: attempts,
            raw_reply: raw.clone(),
        })
        .await?;
        attempts += 1;
        if let Ok(parsed) = parse_reply(&job.cue, &raw) {
            return Ok(CueOutcome::Parsed { raw, parsed });
        }
    }
    Ok(CueOutcome::Missing { attempts })
}

/// Runs the free-association and valence task for one profile over a cue
/// set. Requests run under the client's in-flight limit; malformed replies
/// are retried and finally marked missing; everything is logged for
/// resumability.
pub async fn run_twin(
    client: Arc<ChatClient>,
    log: Arc<RequestLog>,
    assignment: TwinAssignment,
    cues: Vec<String>,
    language: PromptLanguage,
) -> Result<TwinRun> {
    let persona = render_prompt(&assignment.profile, language);
    let profile_hash = format!("{:016x}", assignment.profile.fingerprint());
    let participant_id = assignment.participant_id.clone();

    let mut join_set: JoinSet<Result<(usize, CueOutcome)>> = JoinSet::new();
    for (i, cue) in cues.iter().enumerate() {
        let client = Arc::clone(&client);
        let log = Arc::clone(&log);
        let job = CueJob {
            persona: persona.clone(),
            participant_id: participant_id.clone(),
            profile_hash: profile_hash.clone(),
            cue_index: i,
            cue: cue.clone(),
            language,
        };
        join_set.spawn(async move {
            let outcome = resolve_cue(&client, &log, &job).await?;
            Ok((i, outcome))
        });
    }

    let mut outcomes: BTreeMap<usize, CueOutcome> = BTreeMap::new();
    while let Some(joined) = join_set.join_next().await {
        let (i, outcome) = joined.map_err(|e| Error::Endpoint(e.to_string()))??;
        outcomes.insert(i, outcome);
    }

    let mut run = TwinRun {
        participant_id: participant_id.clone(),
        group: assignment.group,
        profile: assignment.profile,
        cue_set_id: assignment.cue_set_id,
        model_id: client.model_id().to_string(),
        raw_responses: BTreeMap::new(),
        records: Vec::new(),
        mas_it: None,
        warnings: Vec::new(),
    };
    for (i, cue) in cues.iter().enumerate() {
        match outcomes.remove(&i).expect("every cue resolved") {
            CueOutcome::Parsed { raw, parsed } => {
                for w in &parsed.warnings {
                    run.warnings.push(format!("{cue}: {w}"));
                }
                run.raw_responses.insert(cue.clone(), raw);
                run.records
                    .push(record_from_reply(&participant_id, cue, &parsed));
            }
            CueOutcome::Missing { attempts } => {
                run.warnings.push(format!(
                    "{cue}: reply malformed after {attempts} attempts, cue left blank"
                ));
                run.records.push(AssociationRecord {
                    participant_id: participant_id.clone(),
                    group_tag: GroupTag::parse(&participant_id),
                    cue: crate::ingest::normalize(cue),
                    responses: Vec::new(),
                    valences: BTreeMap::new(),
                });
            }
        }
    }
    Ok(run)
}

/// Cue index reserved for the questionnaire request in the log.
const MAS_IT_LOG_INDEX: usize = usize::MAX;

/// Asks the model to fill the anxiety questionnaire as its persona:
/// one request, expecting `{"punteggi": [1..5; n_items]}`.
pub async fn run_mas_it(
    client: &ChatClient,
    log: &RequestLog,
    profile: &TwinProfile,
    participant_id: &str,
    n_items: usize,
    language: PromptLanguage,
) -> Result<Option<MasItScore>> {
    let persona = render_prompt(profile, language);
    let message = match language {
        PromptLanguage::It => format!(
            "Compila un questionario sull'ansia per la matematica composto da {n_items} item. \
             Per ciascun item indica quanto ti sentiresti ansios{oa}, su una scala da 1 (per \
             niente ansioso) a 5 (molto ansioso). Rispondi solo con un oggetto JSON nel \
             formato {{\"punteggi\": [3, 3]}} con esattamente {n_items} numeri.",
            oa = match profile.gender {
                super::Gender::Male => "o",
                super::Gender::Female => "a",
            }
        ),
        PromptLanguage::En => format!(
            "Fill in a mathematics anxiety questionnaire of {n_items} items. For each item, \
             state how anxious you would feel on a scale from 1 (not anxious at all) to 5 \
             (very anxious). Reply only with a JSON object of the form \
             {{\"punteggi\": [3, 3]}} containing exactly {n_items} numbers."
        ),
    };

    let parse_scores = |raw: &str| -> Option<Vec<u8>> {
        let start = raw.find('{')?;
        let end = raw.rfind('}')?;
        let value: serde_json::Value = serde_json::from_str(&raw[start..=end]).ok()?;
        let arr = value.get("punteggi").or_else(|| value.get("scores"))?.as_array()?;
        if arr.len() != n_items {
            return None;
        }
        arr.iter()
            .map(super::parse::likert_value)
            .collect::<Option<Vec<u8>>>()
    };

    let logged = log.replies_for(participant_id, MAS_IT_LOG_INDEX).await;
    for raw in &logged {
        if let Some(item_scores) = parse_scores(raw) {
            return Ok(Some(build_mas_score(participant_id, item_scores)));
        }
    }
    let max_attempts = client.config().reparse_retries + 1;
    let mut attempts = logged.len();
    while attempts < max_attempts {
        let raw = client.chat(&persona, &message).await?;
        log.append(RequestLogEntry {
            timestamp_secs: now_secs(),
            participant_id: participant_id.to_string(),
            profile_hash: format!("{:016x}", profile.fingerprint()),
            cue_index: MAS_IT_LOG_INDEX,
            cue: "__mas_it__".into(),
            attempt: attempts,
            raw_reply: raw.clone(),
        })
        .await?;
        attempts += 1;
        if let Some(item_scores) = parse_scores(&raw) {
            return Ok(Some(build_mas_score(participant_id, item_scores)));
        }
    }
    Ok(None)
}

fn build_mas_score(participant_id: &str, item_scores: Vec<u8>) -> MasItScore {
    let total = item_scores.iter().map(|&v| v as u32).sum();
    MasItScore {
        participant_id: participant_id.to_string(),
        item_scores,
        total,
        factor_scores: BTreeMap::new(),
    }
}
