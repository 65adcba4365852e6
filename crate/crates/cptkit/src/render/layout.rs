//! Greedy text layout: paragraphs wrap into line boxes used for both SVG
//! output and the layout heuristics.

use crate::cml::{Alignment, LayoutMode, Text};
use crate::color::HexColor;

use super::geom::{Quad, Rect};
use super::metrics::FontMetrics;

/// One laid-out text line. The rect is the unrotated ink box; successive
/// lines are spaced by leading x font size. Rotation context is carried so
/// overlap checks can test the rotated corners.
#[derive(Debug, Clone, PartialEq)]
pub struct LineBox {
    pub element_id: String,
    pub line_index: usize,
    pub paragraph_index: usize,
    pub rect: Rect,
    pub text: String,
    pub font_size: f64,
    pub font: Option<String>,
    pub color: Option<HexColor>,
    /// Element rotation in degrees about the element bounds center.
    pub rotation: f64,
    pub rotation_center: (f64, f64),
    /// Baseline y for SVG output.
    pub baseline: f64,
}

impl LineBox {
    /// Corner quad after applying the element rotation.
    pub fn quad(&self) -> Quad {
        self.rect.rotated_quad(self.rotation, self.rotation_center)
    }
}

/// Lay out a text element into line boxes.
///
/// `dynamic` and `autoHeight` wrap greedily at the bounds width;
/// `autoWidth` never wraps. Line height advances by leading x font size;
/// the ink box height comes from the font's ascent and descent. A word
/// wider than the wrap width gets its own (overflowing) line.
pub fn layout_text(element: &Text, metrics: &FontMetrics) -> Vec<LineBox> {
    let bounds = &element.bounds;
    let element_id = element
        .entity_id
        .clone()
        .unwrap_or_else(|| element.id.clone());
    let rotation = bounds.rotation_deg();
    let rotation_center = Rect::new(bounds.top, bounds.left, bounds.width, bounds.height).center();
    let wrap = element.effective_layout() != LayoutMode::AutoWidth;
    let alignment = element.effective_alignment();

    let mut out = Vec::new();
    let mut cursor_y = bounds.top;
    let mut line_index = 0;
    for (paragraph_index, paragraph) in element.paragraphs.iter().enumerate() {
        let style = &paragraph.style;
        let font_size = style.rendered_size();
        let font = style.font.clone();
        let line_height = style.effective_leading() * font_size;
        let glyph = metrics.lookup(font.as_deref());
        let ink_height = glyph.ink_height() * font_size;

        let lines = if paragraph.content.is_empty() {
            Vec::new()
        } else if wrap {
            wrap_lines(&paragraph.content, font.as_deref(), font_size, bounds.width, metrics)
        } else {
            vec![paragraph.content.clone()]
        };

        for text in lines {
            let width = metrics.measure(&text, font.as_deref(), font_size);
            let left = match alignment {
                Alignment::Left => bounds.left,
                Alignment::Center => bounds.left + (bounds.width - width) / 2.0,
                Alignment::Right => bounds.left + bounds.width - width,
            };
            out.push(LineBox {
                element_id: element_id.clone(),
                line_index,
                paragraph_index,
                rect: Rect::new(cursor_y, left, width, ink_height),
                text,
                font_size,
                font: font.clone(),
                color: style.color,
                rotation,
                rotation_center,
                baseline: cursor_y + glyph.ascent * font_size,
            });
            line_index += 1;
            cursor_y += line_height;
        }
        if paragraph.content.is_empty() {
            // An empty paragraph still occupies a line slot.
            cursor_y += line_height;
        }
    }
    out
}

/// Greedy word wrap preserving the exact inter-word whitespace of the
/// source text. Width <= 0 degenerates to one word per line.
fn wrap_lines(
    content: &str,
    font: Option<&str>,
    font_size: f64,
    max_width: f64,
    metrics: &FontMetrics,
) -> Vec<String> {
    let segments = split_words(content);
    let mut lines: Vec<String> = Vec::new();
    let mut current = String::new();
    for (whitespace, word) in segments {
        if current.is_empty() {
            current.push_str(word);
            continue;
        }
        let candidate_width =
            metrics.measure(&current, font, font_size) + metrics.measure(whitespace, font, font_size)
                + metrics.measure(word, font, font_size);
        if candidate_width <= max_width {
            current.push_str(whitespace);
            current.push_str(word);
        } else {
            lines.push(std::mem::take(&mut current));
            current.push_str(word);
        }
    }
    if !current.is_empty() {
        lines.push(current);
    }
    lines
}

/// Split into (preceding whitespace, word) pairs.
fn split_words(content: &str) -> Vec<(&str, &str)> {
    let mut out = Vec::new();
    let mut rest = content;
    while !rest.is_empty() {
        let ws_end = rest
            .find(|c: char| !c.is_whitespace())
            .unwrap_or(rest.len());
        let (ws, after) = rest.split_at(ws_end);
        if after.is_empty() {
            break;
        }
        let word_end = after
            .find(|c: char| c.is_whitespace())
            .unwrap_or(after.len());
        let (word, tail) = after.split_at(word_end);
        out.push((ws, word));
        rest = tail;
    }
    out
}

/// Total stacked line height of an element (the vertical extent layout
/// advances over), for clamped-mode overflow checks.
pub fn stack_height(element: &Text, metrics: &FontMetrics) -> f64 {
    let mut total = 0.0;
    for paragraph in &element.paragraphs {
        let style = &paragraph.style;
        let font_size = style.rendered_size();
        let line_height = style.effective_leading() * font_size;
        let no_wrap = paragraph.content.is_empty()
            || element.effective_layout() == LayoutMode::AutoWidth;
        let line_count = if no_wrap {
            1
        } else {
            wrap_lines(
                &paragraph.content,
                style.font.as_deref(),
                font_size,
                element.bounds.width,
                metrics,
            )
            .len()
        };
        total += line_count as f64 * line_height;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cml::{Bounds, Paragraph, Text, TextStyle};

    fn text_element(content: &str, width: f64, size: f64, layout: LayoutMode) -> Text {
        Text {
            id: "t".into(),
            entity_id: None,
            bounds: Bounds::rect(0.0, 0.0, width, 400.0),
            alignment: Some(Alignment::Left),
            layout: Some(layout),
            style_extras: vec![],
            paragraphs: vec![Paragraph {
                content: content.into(),
                style: TextStyle {
                    size: Some(size),
                    leading: Some(1.2),
                    ..TextStyle::default()
                },
            }],
            extras: vec![],
        }
    }

    #[test]
    fn single_word_auto_width_is_one_line() {
        let el = text_element("Pizza", 50.0, 279.0, LayoutMode::AutoWidth);
        let lines = layout_text(&el, FontMetrics::builtin());
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].text, "Pizza");
        assert_eq!(lines[0].font_size, 279.0);
    }

    #[test]
    fn sentence_fits_on_one_line_at_default_metrics() {
        // 24 letters * 45 + 5 spaces * 22.5 = 1192.5 <= 1287.
        let el = text_element("Please join us for our annual", 1287.0, 90.0, LayoutMode::Dynamic);
        let lines = layout_text(&el, FontMetrics::builtin());
        assert_eq!(lines.len(), 1);
        assert!((lines[0].rect.width - 1192.5).abs() < 1e-9);
    }

    #[test]
    fn empty_content_yields_no_lines() {
        let el = text_element("", 500.0, 90.0, LayoutMode::Dynamic);
        assert!(layout_text(&el, FontMetrics::builtin()).is_empty());
    }

    #[test]
    fn wrapping_preserves_interior_whitespace() {
        let el = text_element("a  b c", 1000.0, 10.0, LayoutMode::Dynamic);
        let lines = layout_text(&el, FontMetrics::builtin());
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].text, "a  b c");
    }

    #[test]
    fn oversized_word_gets_its_own_line() {
        let el = text_element("tiny Supercalifragilistic end", 60.0, 20.0, LayoutMode::Dynamic);
        let lines = layout_text(&el, FontMetrics::builtin());
        let texts: Vec<&str> = lines.iter().map(|l| l.text.as_str()).collect();
        assert_eq!(texts, ["tiny", "Supercalifragilistic", "end"]);
        assert!(lines[1].rect.width > 60.0);
    }

    #[test]
    fn lines_are_spaced_by_leading_times_size() {
        let el = text_element("one two three four five six seven eight", 120.0, 20.0, LayoutMode::AutoHeight);
        let lines = layout_text(&el, FontMetrics::builtin());
        assert!(lines.len() >= 2);
        for pair in lines.windows(2) {
            assert!((pair[1].rect.top - pair[0].rect.top - 24.0).abs() < 1e-9);
        }
        // Ink box is shorter than the line slot.
        assert!((lines[0].rect.height - 20.0).abs() < 1e-9);
    }

    #[test]
    fn center_alignment_offsets_lines() {
        let mut el = text_element("hi", 100.0, 20.0, LayoutMode::Dynamic);
        el.alignment = Some(Alignment::Center);
        let lines = layout_text(&el, FontMetrics::builtin());
        // "hi" is 2 glyphs * 10px = 20px wide; centered in 100.
        assert!((lines[0].rect.left - 40.0).abs() < 1e-9);
    }
}
