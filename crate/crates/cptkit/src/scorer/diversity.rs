//! Markup-level diversity: decide whether a variation differs enough from
//! the original (and from every other kept variation) to be worth keeping,
//! and order survivors by how much palette range they add.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cml::{paths, CmlDocument};
use crate::color::HexColor;
use crate::mask::{mask_class_of, MaskClass};

/// Minimum distances a candidate must clear to count as diverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityThresholds {
    /// Mean perceptual color distance (CIELAB) over changed color sites.
    pub min_color_distance: f64,
    /// Jaccard dissimilarity between the two font sets.
    pub min_font_dissimilarity: f64,
}

impl Default for DiversityThresholds {
    fn default() -> Self {
        DiversityThresholds {
            min_color_distance: 15.0,
            min_font_dissimilarity: 0.5,
        }
    }
}

/// All style color values of a document keyed by (element identity,
/// attribute path); transparent fills are skipped.
fn color_values(doc: &CmlDocument) -> Vec<((String, String), HexColor)> {
    let mut out = Vec::new();
    for page in &doc.pages {
        for element in &page.elements {
            let identity = element.identity().to_string();
            for path in paths::element_paths(element) {
                if mask_class_of(&path) != Some(MaskClass::Color) {
                    continue;
                }
                if let Some(value) = paths::element_get(element, &path) {
                    if let Ok(color) = value.parse::<HexColor>() {
                        if !color.is_transparent() {
                            out.push(((identity.clone(), path), color));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Mean CIELAB distance over the color sites where the two documents
/// disagree; 0.0 when every shared color site is identical.
pub fn mean_color_distance(a: &CmlDocument, b: &CmlDocument) -> f64 {
    let colors_a = color_values(a);
    let colors_b = color_values(b);
    let index_b: std::collections::BTreeMap<&(String, String), HexColor> =
        colors_b.iter().map(|(k, v)| (k, *v)).collect();
    let mut total = 0.0;
    let mut changed = 0usize;
    for (key, color_a) in &colors_a {
        let Some(color_b) = index_b.get(key) else { continue };
        if color_a != color_b {
            total += color_a.lab().distance(color_b.lab());
            changed += 1;
        }
    }
    if changed == 0 {
        0.0
    } else {
        total / changed as f64
    }
}

/// Every font name used by a document's paragraphs.
pub fn font_set(doc: &CmlDocument) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for page in &doc.pages {
        for element in &page.elements {
            if let crate::cml::Element::Text(t) = element {
                for p in &t.paragraphs {
                    if let Some(font) = &p.style.font {
                        out.insert(font.clone());
                    }
                }
            }
        }
    }
    out
}

/// Jaccard dissimilarity of the font sets, in [0, 1].
pub fn font_dissimilarity(a: &CmlDocument, b: &CmlDocument) -> f64 {
    let fa = font_set(a);
    let fb = font_set(b);
    let union = fa.union(&fb).count();
    if union == 0 {
        return 0.0;
    }
    let intersection = fa.intersection(&fb).count();
    1.0 - intersection as f64 / union as f64
}

fn is_diverse(a: &CmlDocument, b: &CmlDocument, t: &DiversityThresholds) -> bool {
    mean_color_distance(a, b) >= t.min_color_distance
        || font_dissimilarity(a, b) >= t.min_font_dissimilarity
}

/// Greedy scan in rank order: keep a candidate iff it is diverse against
/// the original and against every candidate already kept. Returns kept
/// indices.
pub fn diversity_filter(
    original: &CmlDocument,
    candidates: &[CmlDocument],
    t: &DiversityThresholds,
) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for (index, candidate) in candidates.iter().enumerate() {
        let ok = is_diverse(candidate, original, t)
            && kept
                .iter()
                .all(|&k| is_diverse(candidate, &candidates[k], t));
        if ok {
            kept.push(index);
        }
    }
    kept
}

/// Deterministic diversity ranking: greedy max-min palette distance. The
/// first pick is the candidate farthest from the original; each following
/// pick maximizes the minimum distance to the original and to everything
/// already ranked. Ties break on the lower candidate index.
pub fn rank_deterministic(original: &CmlDocument, candidates: &[CmlDocument]) -> Vec<usize> {
    let n = candidates.len();
    // Distance cache: index n stands for the original.
    let dist = |i: usize, j: usize| -> f64 {
        let a = if i == n { original } else { &candidates[i] };
        let b = if j == n { original } else { &candidates[j] };
        mean_color_distance(a, b)
    };
    let mut ranked: Vec<usize> = Vec::with_capacity(n);
    let mut pool: Vec<usize> = (0..n).collect();
    while !pool.is_empty() {
        let mut best_pos = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (pos, &candidate) in pool.iter().enumerate() {
            let mut min_d = dist(candidate, n);
            for &r in &ranked {
                min_d = min_d.min(dist(candidate, r));
            }
            if min_d > best_score {
                best_score = min_d;
                best_pos = pos;
            }
        }
        ranked.push(pool.remove(best_pos));
    }
    ranked
}
