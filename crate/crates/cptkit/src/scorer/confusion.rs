//! Agreement between judge verdicts and human thumb ratings.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ScorerError;

use super::verdict::Bucket;

/// A human thumbs rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Thumb {
    Up,
    Down,
}

impl Thumb {
    pub fn parse(s: &str) -> Option<Thumb> {
        match s.trim().to_ascii_lowercase().as_str() {
            "up" | "thumbs_up" | "1" => Some(Thumb::Up),
            "down" | "thumbs_down" | "0" => Some(Thumb::Down),
            _ => None,
        }
    }
}

/// Percent of `whole` that `part` is, unrounded; formatting rounds to one
/// decimal for display.
pub fn percentage(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        return 0.0;
    }
    100.0 * part as f64 / whole as f64
}

/// 2x2 agreement counts: judge pass/fail (borderline counts as pass)
/// against human up/down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// Judge fail, human down.
    pub fail_down: u32,
    /// Judge pass, human down.
    pub pass_down: u32,
    /// Judge fail, human up.
    pub fail_up: u32,
    /// Judge pass, human up.
    pub pass_up: u32,
}

impl ConfusionMatrix {
    pub fn from_counts(fail_down: u32, pass_down: u32, fail_up: u32, pass_up: u32) -> Self {
        ConfusionMatrix {
            fail_down,
            pass_down,
            fail_up,
            pass_up,
        }
    }

    /// Tally aligned verdict/thumb pairs.
    pub fn from_pairs(buckets: &[Bucket], thumbs: &[Thumb]) -> Result<Self, ScorerError> {
        if buckets.len() != thumbs.len() {
            return Err(ScorerError::LengthMismatch {
                verdicts: buckets.len(),
                labels: thumbs.len(),
            });
        }
        let mut m = ConfusionMatrix::from_counts(0, 0, 0, 0);
        for (bucket, thumb) in buckets.iter().zip(thumbs) {
            match (bucket.is_pass(), thumb) {
                (false, Thumb::Down) => m.fail_down += 1,
                (true, Thumb::Down) => m.pass_down += 1,
                (false, Thumb::Up) => m.fail_up += 1,
                (true, Thumb::Up) => m.pass_up += 1,
            }
        }
        Ok(m)
    }

    pub fn total(&self) -> u32 {
        self.fail_down + self.pass_down + self.fail_up + self.pass_up
    }

    /// Cell percentages of the total, unrounded, in the order fail/down,
    /// pass/down, fail/up, pass/up.
    pub fn percentages(&self) -> [f64; 4] {
        let total = self.total() as u64;
        [
            percentage(self.fail_down as u64, total),
            percentage(self.pass_down as u64, total),
            percentage(self.fail_up as u64, total),
            percentage(self.pass_up as u64, total),
        ]
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [fd, pd, fu, pu] = self.percentages();
        writeln!(f, "{:<14} {:>18} {:>18}", "", "Judge: Fail", "Judge: Pass")?;
        writeln!(
            f,
            "{:<14} {:>18} {:>18}",
            "Human: Down",
            format!("{} ({fd:.1}%)", self.fail_down),
            format!("{} ({pd:.1}%)", self.pass_down)
        )?;
        writeln!(
            f,
            "{:<14} {:>18} {:>18}",
            "Human: Up",
            format!("{} ({fu:.1}%)", self.fail_up),
            format!("{} ({pu:.1}%)", self.pass_up)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_sum_and_percentages() {
        let m = ConfusionMatrix::from_counts(561, 665, 201, 1547);
        assert_eq!(m.total(), 2974);
        let [fd, pd, fu, pu] = m.percentages();
        assert!((fd - 18.9).abs() < 0.1);
        assert!((pd - 22.4).abs() < 0.1);
        assert!((fu - 6.8).abs() < 0.1);
        assert!((pu - 52.0).abs() < 0.1);
        let shown = m.to_string();
        assert!(shown.contains("561 (18.9%)"), "{shown}");
        assert!(shown.contains("665 (22.4%)"));
        assert!(shown.contains("201 (6.8%)"));
        assert!(shown.contains("1547 (52.0%)"));
    }

    #[test]
    fn singleton_matrix() {
        let m = ConfusionMatrix::from_pairs(&[Bucket::ClearPass], &[Thumb::Up]).unwrap();
        assert_eq!(m.pass_up, 1);
        assert_eq!(m.percentages()[3], 100.0);
    }

    #[test]
    fn borderline_counts_as_pass() {
        let m = ConfusionMatrix::from_pairs(
            &[Bucket::Borderline, Bucket::ClearFail],
            &[Thumb::Up, Thumb::Down],
        )
        .unwrap();
        assert_eq!(m.pass_up, 1);
        assert_eq!(m.fail_down, 1);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(ConfusionMatrix::from_pairs(&[Bucket::ClearPass], &[]).is_err());
    }

    #[test]
    fn percentage_helper() {
        assert!((percentage(2698, 2974) - 90.7).abs() < 0.1);
        assert_eq!(percentage(0, 0), 0.0);
        assert_eq!(percentage(5, 10), 50.0);
    }
}
