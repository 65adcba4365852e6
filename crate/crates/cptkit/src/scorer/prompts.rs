//! The shipped judge prompts, loaded verbatim from versioned text
//! resources. Each verdict records the SHA-256 of the prompt that produced
//! it so reruns can prove which prompt generation was in effect.

use sha2::{Digest, Sha256};

use super::verdict::{JudgeKind, PromptVersion};

const CONTRAST_V1: &str = include_str!("../../assets/prompts/contrast_v1.txt");
const ALIGNMENT_V1: &str = include_str!("../../assets/prompts/alignment_v1.txt");
const CONTRAST_V2: &str = include_str!("../../assets/prompts/contrast_v2.txt");
const ALIGNMENT_V2: &str = include_str!("../../assets/prompts/alignment_v2.txt");
const RANKING: &str = include_str!("../../assets/prompts/ranking.txt");

/// The filter prompt for a check and prompt generation.
pub fn prompt_text(kind: JudgeKind, version: PromptVersion) -> &'static str {
    match (kind, version) {
        (JudgeKind::Contrast, PromptVersion::V1) => CONTRAST_V1.trim_end(),
        (JudgeKind::Alignment, PromptVersion::V1) => ALIGNMENT_V1.trim_end(),
        (JudgeKind::Contrast, PromptVersion::V2) => CONTRAST_V2.trim_end(),
        (JudgeKind::Alignment, PromptVersion::V2) => ALIGNMENT_V2.trim_end(),
    }
}

/// The diversity-emphasized ranking prompt (an original composition; the
/// triage prompts above are the versioned filter prompts).
pub fn ranking_prompt() -> &'static str {
    RANKING.trim_end()
}

/// Hex SHA-256 of a prompt, as logged with each verdict.
pub fn prompt_sha256(kind: JudgeKind, version: PromptVersion) -> String {
    sha256_hex(prompt_text(kind, version))
}

pub(crate) fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
