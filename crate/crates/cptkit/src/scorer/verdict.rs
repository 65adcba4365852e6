//! Judge verdict types and response parsing.

use serde::{Deserialize, Serialize};

use crate::error::ScorerError;

/// Which failure mode a judging pass looks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeKind {
    Contrast,
    Alignment,
}

/// The shipped prompt generation. V1 prompts elicit a binary yes/no; v2
/// prompts elicit the three-bucket triage format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptVersion {
    V1,
    V2,
}

/// Triage buckets; downstream filtering treats borderline as a pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bucket {
    ClearPass,
    Borderline,
    ClearFail,
}

impl Bucket {
    pub fn is_pass(&self) -> bool {
        !matches!(self, Bucket::ClearFail)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Bucket::ClearPass => "clear_pass",
            Bucket::Borderline => "borderline",
            Bucket::ClearFail => "clear_fail",
        }
    }
}

/// A parsed judge answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriageVerdict {
    pub bucket: Bucket,
    pub explanation: String,
    #[serde(rename = "rawResponse")]
    pub raw: String,
}

/// Parse a judge response under the given prompt version.
///
/// V2 expects `<bucket>: <short explanation>`. V1 responses are binary:
/// an answer starting with yes (issues found) maps to `clear_fail`, no to
/// `clear_pass`.
pub fn parse_verdict(raw: &str, version: PromptVersion) -> Result<TriageVerdict, ScorerError> {
    let trimmed = raw.trim();
    let unparseable = || ScorerError::UnparseableVerdict { raw: raw.to_string() };
    match version {
        PromptVersion::V2 => {
            let (bucket, explanation) = trimmed.split_once(':').ok_or_else(unparseable)?;
            let bucket = match bucket.trim().to_ascii_lowercase().as_str() {
                "clear_pass" => Bucket::ClearPass,
                "borderline" => Bucket::Borderline,
                "clear_fail" => Bucket::ClearFail,
                _ => return Err(unparseable()),
            };
            Ok(TriageVerdict {
                bucket,
                explanation: explanation.trim().to_string(),
                raw: raw.to_string(),
            })
        }
        PromptVersion::V1 => {
            let first = trimmed
                .split(|c: char| !c.is_ascii_alphabetic())
                .find(|w| !w.is_empty())
                .ok_or_else(unparseable)?;
            let bucket = match first.to_ascii_lowercase().as_str() {
                "yes" => Bucket::ClearFail,
                "no" => Bucket::ClearPass,
                _ => return Err(unparseable()),
            };
            let explanation = trimmed[first.len()..]
                .trim_start_matches(['.', ',', ':', ';', ' '])
                .to_string();
            Ok(TriageVerdict {
                bucket,
                explanation,
                raw: raw.to_string(),
            })
        }
    }
}
