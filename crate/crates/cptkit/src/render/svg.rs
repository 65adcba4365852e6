//! Deterministic SVG output. Elements paint in ascending z-index (document
//! order breaks ties); images paint as their 3x3 color-grid cells since
//! raster assets are not part of the markup.

use std::fmt::Write as _;

use crate::cml::{fmt_num, CmlDocument, Element, Geometry, Image, Page, Shape, Text};
use crate::color::HexColor;

use super::layout::layout_text;
use super::metrics::FontMetrics;
use super::paint_order;

/// Rendering knobs.
#[derive(Debug, Clone, Default)]
pub struct RenderOptions {
    /// Metrics used for text layout; `None` means the built-in table.
    pub metrics: Option<FontMetrics>,
}

impl RenderOptions {
    pub fn metrics(&self) -> &FontMetrics {
        self.metrics.as_ref().unwrap_or_else(|| FontMetrics::builtin())
    }
}

/// Render the first page of a document to SVG 1.1 text.
pub fn render_svg(doc: &CmlDocument, options: &RenderOptions) -> String {
    match doc.pages.first() {
        Some(page) => render_page(page, options),
        None => "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"0\" height=\"0\" />\n".into(),
    }
}

/// Render one page to SVG 1.1 text.
pub fn render_page(page: &Page, options: &RenderOptions) -> String {
    let metrics = options.metrics();
    let mut out = String::new();
    let (w, h) = (fmt_num(page.width), fmt_num(page.height));
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(out, "  <rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\" />");
    for index in paint_order(page) {
        element_group(&mut out, &page.elements[index], metrics);
    }
    out.push_str("</svg>\n");
    out
}

fn element_group(out: &mut String, element: &Element, metrics: &FontMetrics) {
    let bounds = element.bounds();
    let rotation = bounds.rotation_deg();
    let transform = if rotation != 0.0 {
        let cx = bounds.left + bounds.width / 2.0;
        let cy = bounds.top + bounds.height / 2.0;
        format!(
            " transform=\"rotate({} {} {})\"",
            fmt_num(rotation),
            fmt_num(cx),
            fmt_num(cy)
        )
    } else {
        String::new()
    };
    let _ = writeln!(out, "  <g id=\"el-{}\"{transform}>", esc(element.id()));
    match element {
        Element::Background(bg) => {
            rect(out, bg.bounds.top, bg.bounds.left, bg.bounds.width, bg.bounds.height, Some(bg.color), None, None, None);
        }
        Element::Text(text) => text_lines(out, text, metrics),
        Element::Image(image) => image_cells(out, image),
        Element::Shape(shape) => shape_paint(out, shape),
    }
    out.push_str("  </g>\n");
}

fn text_lines(out: &mut String, text: &Text, metrics: &FontMetrics) {
    for line in layout_text(text, metrics) {
        let mut attrs = String::new();
        let _ = write!(
            attrs,
            " x=\"{}\" y=\"{}\" font-size=\"{}\"",
            fmt_num(line.rect.left),
            fmt_num(line.baseline),
            fmt_num(line.font_size)
        );
        if let Some(font) = &line.font {
            let _ = write!(attrs, " font-family=\"{}\"", esc(font));
        }
        let fill = line.color.unwrap_or(HexColor::BLACK);
        if fill.is_transparent() {
            continue;
        }
        let _ = write!(attrs, " fill=\"{fill}\"");
        let style = &text.paragraphs[line.paragraph_index].style;
        if let Some(opacity) = style.opacity {
            if opacity < 1.0 {
                let _ = write!(attrs, " opacity=\"{}\"", fmt_num(opacity));
            }
        }
        if style.underline == Some(true) {
            attrs.push_str(" text-decoration=\"underline\"");
        }
        let _ = writeln!(
            out,
            "    <text{attrs} xml:space=\"preserve\">{}</text>",
            esc(&line.text)
        );
    }
}

fn image_cells(out: &mut String, image: &Image) {
    let has_alpha = image.style.has_alpha.unwrap_or(false);
    let b = &image.bounds;
    let (cw, ch) = (b.width / 3.0, b.height / 3.0);
    for row in 0..3 {
        for col in 0..3 {
            let cell = image.color_grid.cell(row, col);
            // White cells encode fully transparent regions in assets with
            // an alpha channel.
            if has_alpha && cell == HexColor::WHITE {
                continue;
            }
            rect(
                out,
                b.top + row as f64 * ch,
                b.left + col as f64 * cw,
                cw,
                ch,
                Some(cell),
                None,
                None,
                None,
            );
        }
    }
}

fn shape_paint(out: &mut String, shape: &Shape) {
    let b = &shape.bounds;
    let fill = shape.style.fill;
    let stroke = shape.style.stroke_color.filter(|c| !c.is_transparent());
    let stroke_width = shape.style.stroke_width;
    let opacity = shape.style.opacity.filter(|o| *o < 1.0);
    match (&shape.geometry, shape.shape_type.as_str()) {
        (Some(Geometry::Ellipse { rx, ry }), _) => {
            let mut attrs = String::new();
            let _ = write!(
                attrs,
                " cx=\"{}\" cy=\"{}\" rx=\"{}\" ry=\"{}\"",
                fmt_num(b.left + b.width / 2.0),
                fmt_num(b.top + b.height / 2.0),
                fmt_num(*rx),
                fmt_num(*ry)
            );
            paint_attrs(&mut attrs, fill, stroke, stroke_width, opacity);
            let _ = writeln!(out, "    <ellipse{attrs} />");
        }
        (Some(Geometry::Line { start_x, start_y, end_x, end_y }), _) => {
            let mut attrs = String::new();
            let _ = write!(
                attrs,
                " x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"",
                fmt_num(b.left + start_x),
                fmt_num(b.top + start_y),
                fmt_num(b.left + end_x),
                fmt_num(b.top + end_y)
            );
            paint_attrs(&mut attrs, None, stroke, stroke_width.or(Some(1.0)), opacity);
            let _ = writeln!(out, "    <line{attrs} />");
        }
        _ => {
            rect(out, b.top, b.left, b.width, b.height, fill, stroke, stroke_width, opacity);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn rect(
    out: &mut String,
    top: f64,
    left: f64,
    width: f64,
    height: f64,
    fill: Option<HexColor>,
    stroke: Option<HexColor>,
    stroke_width: Option<f64>,
    opacity: Option<f64>,
) {
    let mut attrs = String::new();
    let _ = write!(
        attrs,
        " x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"",
        fmt_num(left),
        fmt_num(top),
        fmt_num(width.max(0.0)),
        fmt_num(height.max(0.0))
    );
    paint_attrs(&mut attrs, fill, stroke, stroke_width, opacity);
    let _ = writeln!(out, "    <rect{attrs} />");
}

fn paint_attrs(
    attrs: &mut String,
    fill: Option<HexColor>,
    stroke: Option<HexColor>,
    stroke_width: Option<f64>,
    opacity: Option<f64>,
) {
    match fill {
        Some(HexColor::Transparent) | None => attrs.push_str(" fill=\"none\""),
        Some(color) => {
            let _ = write!(attrs, " fill=\"{color}\"");
        }
    }
    if let Some(stroke) = stroke {
        let _ = write!(attrs, " stroke=\"{stroke}\"");
        if let Some(width) = stroke_width {
            let _ = write!(attrs, " stroke-width=\"{}\"", fmt_num(width));
        }
    }
    if let Some(opacity) = opacity {
        let _ = write!(attrs, " opacity=\"{}\"", fmt_num(opacity));
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('"', "&quot;")
}
