//! Layout and readability heuristics.
//!
//! Five checks per design - general overlap, text overflow, text over
//! boundary, text line overlap, color contrast - plus the overall chosen
//! verdict, which requires passing all five. Corpus results aggregate into
//! per-label chosen rates.
//!
//! Overlap checks run on opaque paint only: text line ink boxes, image
//! grid cells that are not transparent, and shapes with a solid fill.
//! Backdrops are exempt: the background element, anything covering at
//! least 90% of the canvas, and anything painted below every text element.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::cml::{CmlDocument, Element, LayoutMode, Page};
use crate::color::{contrast_ratio, HexColor};
use crate::render::geom::{intersection_area, intersection_over_smaller, Quad, Rect};
use crate::render::{layout_text, stack_height, FontMetrics, LineBox};

/// Thresholds and knobs; the defaults are the shipped calibration.
#[derive(Debug, Clone)]
pub struct ScoreOptions {
    /// Intersection-over-smaller-area above which two paints "overlap".
    pub ios_threshold: f64,
    /// Canvas coverage at which an element counts as a backdrop.
    pub backdrop_coverage: f64,
    /// Minimum WCAG contrast ratio for body text.
    pub contrast_normal: f64,
    /// Relaxed ratio for large text.
    pub contrast_large: f64,
    /// Font size at which the relaxed ratio applies.
    pub large_text_size: f64,
    /// Numeric slack in pixels on boundary and overflow checks.
    pub slack: f64,
    /// Metrics for text measurement; `None` uses the built-in table.
    pub metrics: Option<FontMetrics>,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            ios_threshold: 0.05,
            backdrop_coverage: 0.90,
            contrast_normal: 4.5,
            contrast_large: 3.0,
            large_text_size: 96.0,
            slack: 1.0,
            metrics: None,
        }
    }
}

impl ScoreOptions {
    fn metrics(&self) -> &FontMetrics {
        self.metrics.as_ref().unwrap_or_else(|| FontMetrics::builtin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    GeneralOverlap,
    TextOverflow,
    TextOverBoundary,
    TextLineOverlap,
    ColorContrast,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MetricKind::GeneralOverlap => "general_overlap",
            MetricKind::TextOverflow => "text_overflow",
            MetricKind::TextOverBoundary => "text_over_boundary",
            MetricKind::TextLineOverlap => "text_line_overlap",
            MetricKind::ColorContrast => "color_contrast",
        };
        f.write_str(name)
    }
}

/// One offending element (or pair) behind a failed check.
#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub metric: MetricKind,
    pub element_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other_id: Option<String>,
    pub detail: String,
}

/// Pass/fail per check; `true` means pass.
#[derive(Debug, Clone, Serialize)]
pub struct HeuristicReport {
    pub general_overlap: bool,
    pub text_overflow: bool,
    pub text_over_boundary: bool,
    pub text_line_overlap: bool,
    pub color_contrast: bool,
    pub details: Vec<Finding>,
}

impl HeuristicReport {
    /// The conservative composite: pass iff every check passes.
    pub fn overall_chosen(&self) -> bool {
        self.general_overlap
            && self.text_overflow
            && self.text_over_boundary
            && self.text_line_overlap
            && self.color_contrast
    }

    pub fn passes(&self, metric: MetricKind) -> bool {
        match metric {
            MetricKind::GeneralOverlap => self.general_overlap,
            MetricKind::TextOverflow => self.text_overflow,
            MetricKind::TextOverBoundary => self.text_over_boundary,
            MetricKind::TextLineOverlap => self.text_line_overlap,
            MetricKind::ColorContrast => self.color_contrast,
        }
    }
}

/// Score the first page of a document with default options.
pub fn score(doc: &CmlDocument) -> HeuristicReport {
    score_with(doc, &ScoreOptions::default())
}

pub fn score_with(doc: &CmlDocument, opts: &ScoreOptions) -> HeuristicReport {
    let mut details = Vec::new();
    let (mut go, mut tof, mut tob, mut tlo, mut cc) = (true, true, true, true, true);
    if let Some(page) = doc.pages.first() {
        let lines = page_lines(page, opts);
        let paints = collect_paints(page, &lines, opts);

        general_overlap(&paints, opts, &mut details);
        text_overflow(page, &lines, opts, &mut details);
        text_over_boundary(page, &lines, opts, &mut details);
        text_line_overlap(&paints, opts, &mut details);
        color_contrast(page, &lines, opts, &mut details);

        for finding in &details {
            match finding.metric {
                MetricKind::GeneralOverlap => go = false,
                MetricKind::TextOverflow => tof = false,
                MetricKind::TextOverBoundary => tob = false,
                MetricKind::TextLineOverlap => tlo = false,
                MetricKind::ColorContrast => cc = false,
            }
        }
    }
    HeuristicReport {
        general_overlap: go,
        text_overflow: tof,
        text_over_boundary: tob,
        text_line_overlap: tlo,
        color_contrast: cc,
        details,
    }
}

fn page_lines(page: &Page, opts: &ScoreOptions) -> Vec<LineBox> {
    let metrics = opts.metrics();
    page.elements
        .iter()
        .filter_map(|e| match e {
            Element::Text(t) => Some(layout_text(t, metrics)),
            _ => None,
        })
        .flatten()
        .collect()
}

/// Opaque paint of one element for overlap purposes.
struct ElementPaint {
    id: String,
    is_text: bool,
    backdrop: bool,
    quads: Vec<Quad>,
}

fn collect_paints(page: &Page, lines: &[LineBox], opts: &ScoreOptions) -> Vec<ElementPaint> {
    let canvas = Rect::new(0.0, 0.0, page.width, page.height).quad();
    let canvas_area = page.width * page.height;
    let min_text_z = page
        .elements
        .iter()
        .filter(|e| matches!(e, Element::Text(_)))
        .map(|e| e.bounds().z())
        .min();

    page.elements
        .iter()
        .map(|element| {
            let id = element.identity().to_string();
            let bounds = element.bounds();
            let z = bounds.z();
            let rect = Rect::new(bounds.top, bounds.left, bounds.width, bounds.height);
            let quad = rect.rotated_quad(bounds.rotation_deg(), rect.center());
            let coverage = if canvas_area > 0.0 {
                intersection_area(&quad, &canvas) / canvas_area
            } else {
                0.0
            };
            let is_text = matches!(element, Element::Text(_));
            let backdrop = match element {
                Element::Background(_) => true,
                _ if is_text => false,
                _ => {
                    coverage >= opts.backdrop_coverage
                        || min_text_z.map(|tz| z < tz).unwrap_or(false)
                }
            };
            let quads = match element {
                Element::Background(_) => vec![quad],
                Element::Text(_) => lines
                    .iter()
                    .filter(|l| l.element_id == id)
                    .map(|l| l.quad())
                    .collect(),
                Element::Image(image) => {
                    if image.style.has_alpha.unwrap_or(false) {
                        opaque_cells(image, &rect)
                    } else {
                        vec![quad]
                    }
                }
                Element::Shape(shape) => match shape.style.fill {
                    // Outline-only shapes paint a thin stroke, not a
                    // region; they do not occlude.
                    Some(HexColor::Transparent) | None => vec![],
                    Some(_) => vec![quad],
                },
            };
            ElementPaint {
                id,
                is_text,
                backdrop,
                quads,
            }
        })
        .collect()
}

fn opaque_cells(image: &crate::cml::Image, rect: &Rect) -> Vec<Quad> {
    let center = rect.center();
    let rotation = image.bounds.rotation_deg();
    let (cw, ch) = (rect.width / 3.0, rect.height / 3.0);
    let mut out = Vec::new();
    for row in 0..3 {
        for col in 0..3 {
            if image.color_grid.cell(row, col) == HexColor::WHITE {
                continue;
            }
            let cell = Rect::new(
                rect.top + row as f64 * ch,
                rect.left + col as f64 * cw,
                cw,
                ch,
            );
            out.push(cell.rotated_quad(rotation, center));
        }
    }
    out
}

fn general_overlap(paints: &[ElementPaint], opts: &ScoreOptions, details: &mut Vec<Finding>) {
    for i in 0..paints.len() {
        for j in (i + 1)..paints.len() {
            let (a, b) = (&paints[i], &paints[j]);
            if a.backdrop || b.backdrop {
                continue;
            }
            if let Some(ios) = max_ios(&a.quads, &b.quads) {
                if ios > opts.ios_threshold {
                    details.push(Finding {
                        metric: MetricKind::GeneralOverlap,
                        element_id: a.id.clone(),
                        other_id: Some(b.id.clone()),
                        detail: format!("overlap {ios:.3} of the smaller area"),
                    });
                }
            }
        }
    }
}

fn text_line_overlap(paints: &[ElementPaint], opts: &ScoreOptions, details: &mut Vec<Finding>) {
    for a in paints.iter().filter(|p| p.is_text && !p.backdrop) {
        for b in paints.iter().filter(|p| !p.backdrop) {
            if std::ptr::eq(a, b) {
                continue;
            }
            if let Some(ios) = max_ios(&a.quads, &b.quads) {
                if ios > opts.ios_threshold {
                    details.push(Finding {
                        metric: MetricKind::TextLineOverlap,
                        element_id: a.id.clone(),
                        other_id: Some(b.id.clone()),
                        detail: format!("text line overlaps by {ios:.3}"),
                    });
                }
            }
        }
    }
}

fn max_ios(a: &[Quad], b: &[Quad]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for qa in a {
        for qb in b {
            let ios = intersection_over_smaller(qa, qb);
            best = Some(best.map_or(ios, |v: f64| v.max(ios)));
        }
    }
    best
}

fn text_overflow(page: &Page, lines: &[LineBox], opts: &ScoreOptions, details: &mut Vec<Finding>) {
    let metrics = opts.metrics();
    for element in &page.elements {
        let Element::Text(text) = element else { continue };
        let id = element.identity();
        let bounds = element.bounds();
        let mode = text.effective_layout();

        // Horizontal clipping: wrap modes must fit the bounds width.
        if mode != LayoutMode::AutoWidth {
            for line in lines.iter().filter(|l| l.element_id == id) {
                let overhang = (bounds.left - line.rect.left)
                    .max(line.rect.right() - (bounds.left + bounds.width));
                if overhang > opts.slack {
                    details.push(Finding {
                        metric: MetricKind::TextOverflow,
                        element_id: id.to_string(),
                        other_id: None,
                        detail: format!("line {} clips horizontally by {overhang:.1}px", line.line_index),
                    });
                }
            }
        }
        // Vertical clipping: fixed-height modes must hold the line stack.
        if mode != LayoutMode::AutoHeight {
            let stack = stack_height(text, metrics);
            if stack > bounds.height + opts.slack {
                details.push(Finding {
                    metric: MetricKind::TextOverflow,
                    element_id: id.to_string(),
                    other_id: None,
                    detail: format!(
                        "line stack {:.1}px exceeds bounds height {:.1}px",
                        stack, bounds.height
                    ),
                });
            }
        }
    }
}

fn text_over_boundary(page: &Page, lines: &[LineBox], opts: &ScoreOptions, details: &mut Vec<Finding>) {
    for line in lines {
        let quad = line.quad();
        let out_of_canvas = quad.pts.iter().any(|&(x, y)| {
            x < -opts.slack
                || y < -opts.slack
                || x > page.width + opts.slack
                || y > page.height + opts.slack
        });
        if out_of_canvas {
            details.push(Finding {
                metric: MetricKind::TextOverBoundary,
                element_id: line.element_id.clone(),
                other_id: None,
                detail: format!("line {} extends outside the canvas", line.line_index),
            });
        }
    }
}

fn color_contrast(page: &Page, lines: &[LineBox], opts: &ScoreOptions, details: &mut Vec<Finding>) {
    // Paint position of each element for "topmost below the text" lookups.
    let paint_pos: BTreeMap<&str, (u32, usize)> = page
        .elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e.identity(), (e.bounds().z(), i)))
        .collect();

    for line in lines {
        let text_color = line.color.unwrap_or(HexColor::BLACK);
        if text_color.is_transparent() {
            continue;
        }
        let Some(&line_pos) = paint_pos.get(line.element_id.as_str()) else {
            continue;
        };
        let centroid = {
            let (cx, cy) = line.rect.center();
            rotate_point((cx, cy), line.rotation, line.rotation_center)
        };
        let backdrop = backdrop_color_at(page, centroid, line_pos);
        let ratio = contrast_ratio(text_color, backdrop);
        let threshold = if line.font_size >= opts.large_text_size {
            opts.contrast_large
        } else {
            opts.contrast_normal
        };
        if ratio < threshold {
            details.push(Finding {
                metric: MetricKind::ColorContrast,
                element_id: line.element_id.clone(),
                other_id: None,
                detail: format!(
                    "line {} contrast {ratio:.2} below {threshold} against {backdrop}",
                    line.line_index
                ),
            });
        }
    }
}

fn rotate_point(p: (f64, f64), degrees: f64, center: (f64, f64)) -> (f64, f64) {
    if degrees == 0.0 {
        return p;
    }
    let (sin, cos) = degrees.to_radians().sin_cos();
    let (dx, dy) = (p.0 - center.0, p.1 - center.1);
    (center.0 + dx * cos - dy * sin, center.1 + dx * sin + dy * cos)
}

/// The effective backdrop color under a point: the topmost opaque paint
/// strictly below the given paint position; the canvas is white.
pub fn backdrop_color_at(page: &Page, point: (f64, f64), below: (u32, usize)) -> HexColor {
    let mut best: Option<((u32, usize), HexColor)> = None;
    for (index, element) in page.elements.iter().enumerate() {
        let pos = (element.bounds().z(), index);
        if pos >= below {
            continue;
        }
        let bounds = element.bounds();
        let rect = Rect::new(bounds.top, bounds.left, bounds.width, bounds.height);
        let quad = rect.rotated_quad(bounds.rotation_deg(), rect.center());
        if !quad.contains(point) {
            continue;
        }
        let color = match element {
            Element::Background(bg) => Some(bg.color),
            Element::Shape(shape) => shape.style.fill.filter(|c| !c.is_transparent()),
            Element::Image(image) => {
                // Map the point back into the unrotated grid to pick the
                // covering cell.
                let local = rotate_point(point, -bounds.rotation_deg(), rect.center());
                let col = (((local.0 - rect.left) / (rect.width / 3.0)).floor() as i64).clamp(0, 2);
                let row = (((local.1 - rect.top) / (rect.height / 3.0)).floor() as i64).clamp(0, 2);
                let cell = image.color_grid.cell(row as usize, col as usize);
                if image.style.has_alpha.unwrap_or(false) && cell == HexColor::WHITE {
                    None
                } else {
                    Some(cell)
                }
            }
            Element::Text(_) => None,
        };
        if let Some(color) = color {
            if best.is_none_or(|(bp, _)| pos > bp) {
                best = Some((pos, color));
            }
        }
    }
    best.map(|(_, c)| c).unwrap_or(HexColor::WHITE)
}

/// Chosen rates for one corpus label.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RateRow {
    pub label: String,
    pub count: usize,
    pub overall_chosen: f64,
    pub general_overlap: f64,
    pub text_overflow: f64,
    pub text_over_boundary: f64,
    pub text_line_overlap: f64,
    pub color_contrast: f64,
}

/// Per-label chosen rates over a corpus.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ChosenRateTable {
    pub rows: Vec<RateRow>,
}

/// Aggregate labeled reports into chosen rates (percent of designs
/// passing each check, and all checks for the overall rate).
pub fn corpus_report(items: &[(String, HeuristicReport)]) -> ChosenRateTable {
    let mut groups: BTreeMap<&str, Vec<&HeuristicReport>> = BTreeMap::new();
    for (label, report) in items {
        groups.entry(label).or_default().push(report);
    }
    let rows = groups
        .into_iter()
        .map(|(label, reports)| {
            let n = reports.len();
            let rate = |f: &dyn Fn(&HeuristicReport) -> bool| {
                100.0 * reports.iter().filter(|r| f(r)).count() as f64 / n as f64
            };
            RateRow {
                label: label.to_string(),
                count: n,
                overall_chosen: rate(&|r| r.overall_chosen()),
                general_overlap: rate(&|r| r.general_overlap),
                text_overflow: rate(&|r| r.text_overflow),
                text_over_boundary: rate(&|r| r.text_over_boundary),
                text_line_overlap: rate(&|r| r.text_line_overlap),
                color_contrast: rate(&|r| r.color_contrast),
            }
        })
        .collect();
    ChosenRateTable { rows }
}

impl ChosenRateTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "label,count,overall_chosen,general_overlap,text_overflow,text_over_boundary,text_line_overlap,color_contrast\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.1},{:.1},{:.1},{:.1},{:.1},{:.1}\n",
                r.label,
                r.count,
                r.overall_chosen,
                r.general_overlap,
                r.text_overflow,
                r.text_over_boundary,
                r.text_line_overlap,
                r.color_contrast
            ));
        }
        out
    }
}

impl fmt::Display for ChosenRateTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<24} {:>5} {:>8} {:>16} {:>14} {:>19} {:>18} {:>15}",
            "label", "n", "overall", "general_overlap", "text_overflow", "text_over_boundary",
            "text_line_overlap", "color_contrast"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<24} {:>5} {:>8.1} {:>16.1} {:>14.1} {:>19.1} {:>18.1} {:>15.1}",
                r.label,
                r.count,
                r.overall_chosen,
                r.general_overlap,
                r.text_overflow,
                r.text_over_boundary,
                r.text_line_overlap,
                r.color_contrast
            )?;
        }
        Ok(())
    }
}
