//! The design scorer: markup-level diversity filtering, rendition-based
//! judging through a remote vision endpoint, ranking, and agreement
//! statistics against human ratings.

mod confusion;
mod diversity;
mod judge;
pub mod prompts;
mod verdict;

pub use confusion::{percentage, ConfusionMatrix, Thumb};
pub use diversity::{
    diversity_filter, font_dissimilarity, font_set, mean_color_distance, rank_deterministic,
    DiversityThresholds,
};
pub use judge::{
    filter_variations, rank_remote, rank_variations, JudgeBackend, JudgeClient, RankMode,
    RemoteJudge, VerdictRecord,
};
pub use verdict::{parse_verdict, Bucket, JudgeKind, PromptVersion, TriageVerdict};
