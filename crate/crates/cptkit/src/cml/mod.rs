//! The document model for the design markup: a canvas with brand palette
//! and an ordered list of styled elements, plus parse / serialize / validate.
//!
//! Parsing normalizes colors and numbers; serialization is canonical (fixed
//! attribute order, fixed indentation), so `serialize(parse(serialize(d)))`
//! equals `serialize(d)` byte for byte.

mod parse;
mod serialize;
mod validate;

pub mod paths;

pub use parse::{parse_cml, parse_cml_with, ParseOptions};
pub use serialize::{serialize_cml, serialize_element};
pub(crate) use serialize::{serialize_cml_with, Overrides};
pub use validate::{validate, Violation};

use crate::color::HexColor;

/// Extra attributes preserved verbatim in lenient parse mode.
pub type Extras = Vec<(String, String)>;

/// A parsed design document: version header plus one or more pages.
#[derive(Debug, Clone, PartialEq)]
pub struct CmlDocument {
    pub version: u32,
    pub number_pages: u32,
    pub pages: Vec<Page>,
    pub extras: Extras,
}

/// One canvas with its size, an optional brand kit and ordered elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Page {
    pub width: f64,
    pub height: f64,
    pub format: String,
    pub layout_id: String,
    pub brand: Option<Brand>,
    pub elements: Vec<Element>,
    pub extras: Extras,
}

/// The brand kit: colors and font names a brand-aware variation may use.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Brand {
    #[serde(default)]
    pub colors: Vec<HexColor>,
    #[serde(default)]
    pub fonts: Vec<String>,
}

/// Element placement: position, size, rotation and paint order.
///
/// `top`/`left` may be negative (off-canvas placement is legal); rotation
/// and z-index are optional in the markup and default to 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Bounds {
    pub top: f64,
    pub left: f64,
    pub width: f64,
    pub height: f64,
    pub rotation: Option<f64>,
    pub z_index: Option<u32>,
    pub extras: Extras,
}

impl Bounds {
    pub fn rect(top: f64, left: f64, width: f64, height: f64) -> Bounds {
        Bounds {
            top,
            left,
            width,
            height,
            ..Bounds::default()
        }
    }

    pub fn rotation_deg(&self) -> f64 {
        self.rotation.unwrap_or(0.0)
    }

    pub fn z(&self) -> u32 {
        self.z_index.unwrap_or(0)
    }
}

/// The closed set of element kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Background(Background),
    Text(Text),
    Image(Image),
    Shape(Shape),
}

impl Element {
    pub fn tag(&self) -> &'static str {
        match self {
            Element::Background(_) => "background",
            Element::Text(_) => "text",
            Element::Image(_) => "image",
            Element::Shape(_) => "shape",
        }
    }

    pub fn id(&self) -> &str {
        match self {
            Element::Background(b) => &b.id,
            Element::Text(t) => &t.id,
            Element::Image(i) => &i.id,
            Element::Shape(s) => &s.id,
        }
    }

    pub fn entity_id(&self) -> Option<&str> {
        match self {
            Element::Background(b) => b.entity_id.as_deref(),
            Element::Text(t) => t.entity_id.as_deref(),
            Element::Image(i) => i.entity_id.as_deref(),
            Element::Shape(s) => s.entity_id.as_deref(),
        }
    }

    /// The stable identity edits bind to: the entityId when present,
    /// otherwise the element id.
    pub fn identity(&self) -> &str {
        self.entity_id().unwrap_or_else(|| self.id())
    }

    pub fn bounds(&self) -> &Bounds {
        match self {
            Element::Background(b) => &b.bounds,
            Element::Text(t) => &t.bounds,
            Element::Image(i) => &i.bounds,
            Element::Shape(s) => &s.bounds,
        }
    }

    pub fn bounds_mut(&mut self) -> &mut Bounds {
        match self {
            Element::Background(b) => &mut b.bounds,
            Element::Text(t) => &mut t.bounds,
            Element::Image(i) => &mut i.bounds,
            Element::Shape(s) => &mut s.bounds,
        }
    }
}

/// Full-canvas backdrop fill.
#[derive(Debug, Clone, PartialEq)]
pub struct Background {
    /// The `type` attribute, `"color"` in practice.
    pub kind: String,
    pub id: String,
    pub entity_id: Option<String>,
    pub bounds: Bounds,
    pub color: HexColor,
    pub style_extras: Extras,
    pub extras: Extras,
}

/// Horizontal text alignment within the element bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alignment {
    Left,
    Center,
    Right,
}

impl Alignment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Alignment::Left => "left",
            Alignment::Center => "center",
            Alignment::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Option<Alignment> {
        match s {
            "left" => Some(Alignment::Left),
            "center" => Some(Alignment::Center),
            "right" => Some(Alignment::Right),
            _ => None,
        }
    }
}

/// How the text box reacts to its content: `dynamic` and `autoHeight` wrap
/// at the bounds width; `autoWidth` grows horizontally and never wraps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutMode {
    Dynamic,
    AutoWidth,
    AutoHeight,
}

impl LayoutMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            LayoutMode::Dynamic => "dynamic",
            LayoutMode::AutoWidth => "autoWidth",
            LayoutMode::AutoHeight => "autoHeight",
        }
    }

    pub fn parse(s: &str) -> Option<LayoutMode> {
        match s {
            "dynamic" => Some(LayoutMode::Dynamic),
            "autoWidth" => Some(LayoutMode::AutoWidth),
            "autoHeight" => Some(LayoutMode::AutoHeight),
            _ => None,
        }
    }
}

/// A text element: bounds, element-level style and one or more paragraphs.
#[derive(Debug, Clone, PartialEq)]
pub struct Text {
    pub id: String,
    pub entity_id: Option<String>,
    pub bounds: Bounds,
    pub alignment: Option<Alignment>,
    pub layout: Option<LayoutMode>,
    pub style_extras: Extras,
    pub paragraphs: Vec<Paragraph>,
    pub extras: Extras,
}

impl Text {
    pub fn effective_alignment(&self) -> Alignment {
        self.alignment.unwrap_or(Alignment::Left)
    }

    pub fn effective_layout(&self) -> LayoutMode {
        self.layout.unwrap_or(LayoutMode::Dynamic)
    }
}

/// One run of text with a uniform style.
#[derive(Debug, Clone, PartialEq)]
pub struct Paragraph {
    /// Content is preserved byte-exactly after trimming the surrounding
    /// markup whitespace; interior characters (including literal `\r`
    /// sequences and runs of spaces) are never altered.
    pub content: String,
    pub style: TextStyle,
}

/// Character style of a paragraph. All attributes are optional in the
/// markup; absent attributes stay absent through a round trip.
///
/// `size` and `fontSize` are distinct attributes in the wire format and are
/// both preserved; layout treats `fontSize` as the rendered size and falls
/// back to `size`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TextStyle {
    pub leading: Option<f64>,
    pub color: Option<HexColor>,
    pub font: Option<String>,
    pub size: Option<f64>,
    pub tracking: Option<f64>,
    pub opacity: Option<f64>,
    pub underline: Option<bool>,
    pub font_size: Option<f64>,
    pub extras: Extras,
}

impl TextStyle {
    /// The size used for layout and rendering.
    pub fn rendered_size(&self) -> f64 {
        self.font_size.or(self.size).unwrap_or(16.0)
    }

    pub fn effective_leading(&self) -> f64 {
        self.leading.unwrap_or(1.2)
    }
}

/// A placed raster or vector asset. Pixel data is not part of the markup;
/// the 3x3 color grid summarizes it.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub id: String,
    pub entity_id: Option<String>,
    pub source_type: Option<String>,
    pub source_id: Option<String>,
    pub bounds: Bounds,
    pub content: Option<String>,
    pub style: ImageStyle,
    pub color_grid: ColorGrid,
    pub effect: Option<Effect>,
    pub extras: Extras,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImageStyle {
    pub blend_mode: Option<String>,
    pub has_alpha: Option<bool>,
    pub extras: Extras,
}

/// Representative colors of an image sampled on a 3x3 grid, cells c1..c9 in
/// row-major order. In assets with an alpha channel, white cells stand for
/// fully transparent regions.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorGrid(pub [HexColor; 9]);

impl ColorGrid {
    pub fn uniform(color: HexColor) -> ColorGrid {
        ColorGrid([color; 9])
    }

    /// Cell at (row, col), 0-based.
    pub fn cell(&self, row: usize, col: usize) -> HexColor {
        self.0[row * 3 + col]
    }
}

/// Stylistic treatment applied to an image.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    pub name: String,
    /// The `type` attribute.
    pub kind: String,
    pub shape: String,
    pub extras: Extras,
}

/// A vector shape with optional geometry details and stroke attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    pub id: String,
    /// The `type` attribute: `Rectangle`, `Ellipse`, `Line`, `composite`, ...
    pub shape_type: String,
    pub entity_id: Option<String>,
    pub source_type: Option<String>,
    pub source_id: Option<String>,
    pub geometry: Option<Geometry>,
    pub bounds: Bounds,
    pub content: Option<String>,
    pub search: Option<String>,
    pub style: ShapeStyle,
    pub extras: Extras,
}

/// Shape-kind specific geometry.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Ellipse { rx: f64, ry: f64 },
    Line { start_x: f64, start_y: f64, end_x: f64, end_y: f64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShapeStyle {
    pub opacity: Option<f64>,
    /// The fill color (`color` attribute); may be `transparent`.
    pub fill: Option<HexColor>,
    pub stroke_color: Option<HexColor>,
    pub stroke_position: Option<String>,
    pub stroke_width: Option<f64>,
    pub stroke_miter: Option<f64>,
    pub stroke_dash: Option<String>,
    pub extras: Extras,
}

/// Canonical text form of a number: integers without a decimal point,
/// non-integers with the shortest digits that round-trip.
pub fn fmt_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(-1022.0), "-1022");
        assert_eq!(fmt_num(8.14), "8.14");
        assert_eq!(fmt_num(1.2), "1.2");
        assert_eq!(fmt_num(1.69), "1.69");
        assert_eq!(fmt_num(2550.0), "2550");
    }

    #[test]
    fn identity_prefers_entity_id() {
        let el = Element::Text(Text {
            id: "3".into(),
            entity_id: Some("abc".into()),
            bounds: Bounds::rect(0.0, 0.0, 10.0, 10.0),
            alignment: None,
            layout: None,
            style_extras: vec![],
            paragraphs: vec![],
            extras: vec![],
        });
        assert_eq!(el.identity(), "abc");
    }
}
