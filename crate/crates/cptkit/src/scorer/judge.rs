//! Rendition-based judging: send the original and a variation to a remote
//! vision endpoint with the shipped prompts, parse the triage verdict, and
//! keep an auditable JSON-lines log of every call.

use std::io::Write;
use std::sync::Mutex;
use std::time::Instant;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;
use serde::Serialize;
use serde_json::json;

use crate::cml::CmlDocument;
use crate::error::{EndpointError, ScorerError};
use crate::predict::remote::{completion_text, post_json};
use crate::predict::EndpointConfig;

use super::diversity::rank_deterministic;
use super::prompts;
use super::verdict::{parse_verdict, Bucket, JudgeKind, PromptVersion, TriageVerdict};

/// Anything that can answer a prompt about a set of images. The remote
/// judge is the production backend; tests substitute stubs.
pub trait JudgeBackend: Send + Sync {
    fn complete(&self, prompt: &str, images: &[&[u8]]) -> Result<String, EndpointError>;
}

/// The remote multimodal endpoint: images travel base64-encoded next to
/// the prompt.
pub struct RemoteJudge {
    pub cfg: EndpointConfig,
}

impl JudgeBackend for RemoteJudge {
    fn complete(&self, prompt: &str, images: &[&[u8]]) -> Result<String, EndpointError> {
        let encoded: Vec<String> = images.iter().map(|img| BASE64.encode(img)).collect();
        let body = json!({
            "model": self.cfg.model,
            "prompt": prompt,
            "images": encoded,
            "max_tokens": self.cfg.max_tokens,
        });
        let response = post_json(&self.cfg, &body)?;
        completion_text(&response)
    }
}

/// One audit-log line.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictRecord {
    pub kind: JudgeKind,
    #[serde(rename = "promptVersion")]
    pub prompt_version: PromptVersion,
    pub bucket: Bucket,
    pub explanation: String,
    #[serde(rename = "latencyMs")]
    pub latency_ms: u64,
    #[serde(rename = "promptSha256")]
    pub prompt_sha256: String,
}

/// A judge bound to one backend and prompt generation, with an optional
/// audit log.
pub struct JudgeClient<'a> {
    backend: &'a dyn JudgeBackend,
    version: PromptVersion,
    log: Option<Mutex<Box<dyn Write + Send>>>,
}

impl<'a> JudgeClient<'a> {
    pub fn new(backend: &'a dyn JudgeBackend, version: PromptVersion) -> JudgeClient<'a> {
        JudgeClient {
            backend,
            version,
            log: None,
        }
    }

    /// Append one JSON record per judged pair to `writer`.
    pub fn with_log(mut self, writer: Box<dyn Write + Send>) -> JudgeClient<'a> {
        self.log = Some(Mutex::new(writer));
        self
    }

    pub fn version(&self) -> PromptVersion {
        self.version
    }

    /// Judge one (original, variant) render pair for one failure mode.
    ///
    /// A response violating the answer format is retried once with a
    /// format reminder, then surfaced as unparseable.
    pub fn verdict(
        &self,
        kind: JudgeKind,
        original: &[u8],
        variant: &[u8],
    ) -> Result<TriageVerdict, ScorerError> {
        let prompt = prompts::prompt_text(kind, self.version);
        let started = Instant::now();
        let raw = self.backend.complete(prompt, &[original, variant])?;
        let verdict = match parse_verdict(&raw, self.version) {
            Ok(v) => v,
            Err(_) => {
                let reminder = format!(
                    "{prompt}\n\nRespond using this exact format: '<bucket>: <short explanation>'."
                );
                let raw = self.backend.complete(&reminder, &[original, variant])?;
                parse_verdict(&raw, self.version)?
            }
        };
        self.append_log(kind, &verdict, started.elapsed().as_millis() as u64);
        Ok(verdict)
    }

    fn append_log(&self, kind: JudgeKind, verdict: &TriageVerdict, latency_ms: u64) {
        let Some(log) = &self.log else { return };
        let record = VerdictRecord {
            kind,
            prompt_version: self.version,
            bucket: verdict.bucket,
            explanation: verdict.explanation.clone(),
            latency_ms,
            prompt_sha256: prompts::prompt_sha256(kind, self.version),
        };
        if let Ok(mut writer) = log.lock() {
            let _ = serde_json::to_writer(&mut *writer, &record);
            let _ = writer.write_all(b"\n");
        }
    }
}

/// Keep the candidates whose contrast AND alignment verdicts both pass
/// (borderline counts as a pass). Returns kept indices.
pub fn filter_variations(
    client: &JudgeClient,
    original: &[u8],
    candidates: &[Vec<u8>],
) -> Result<Vec<usize>, ScorerError> {
    let mut kept = Vec::new();
    for (index, render) in candidates.iter().enumerate() {
        let contrast = client.verdict(JudgeKind::Contrast, original, render)?;
        if !contrast.bucket.is_pass() {
            continue;
        }
        let alignment = client.verdict(JudgeKind::Alignment, original, render)?;
        if alignment.bucket.is_pass() {
            kept.push(index);
        }
    }
    Ok(kept)
}

/// Ask the judge for a diversity ordering over the candidates. The
/// response must be a comma-separated permutation of the candidate
/// indices.
pub fn rank_remote(
    client: &JudgeClient,
    original: &[u8],
    candidates: &[Vec<u8>],
) -> Result<Vec<usize>, ScorerError> {
    let mut images: Vec<&[u8]> = vec![original];
    images.extend(candidates.iter().map(|c| c.as_slice()));
    let raw = client
        .backend
        .complete(prompts::ranking_prompt(), &images)?;
    let order: Vec<usize> = raw
        .trim()
        .split(',')
        .map(|part| part.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| ScorerError::UnparseableVerdict { raw: raw.clone() })?;
    let mut seen = vec![false; candidates.len()];
    if order.len() != candidates.len()
        || order.iter().any(|&i| i >= candidates.len() || std::mem::replace(&mut seen[i], true))
    {
        return Err(ScorerError::UnparseableVerdict { raw });
    }
    Ok(order)
}

/// How to order the kept set.
pub enum RankMode<'a> {
    /// Greedy max-min perceptual palette distance.
    Deterministic,
    /// Remote diversity ranking over renders; falls back to the
    /// deterministic order (with a warning) when the endpoint fails.
    Remote {
        client: &'a JudgeClient<'a>,
        original_render: &'a [u8],
        candidate_renders: &'a [Vec<u8>],
    },
}

/// Produce a total order (a permutation of candidate indices).
pub fn rank_variations(
    original: &CmlDocument,
    candidates: &[CmlDocument],
    mode: RankMode,
) -> Vec<usize> {
    match mode {
        RankMode::Deterministic => rank_deterministic(original, candidates),
        RankMode::Remote {
            client,
            original_render,
            candidate_renders,
        } => match rank_remote(client, original_render, candidate_renders) {
            Ok(order) => order,
            Err(err) => {
                log::warn!("remote ranking failed ({err}); falling back to deterministic order");
                rank_deterministic(original, candidates)
            }
        },
    }
}
