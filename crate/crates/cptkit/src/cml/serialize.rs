//! Canonical serializer.
//!
//! Output is deterministic: fixed attribute order per tag, four-space
//! indentation, self-closing leaf tags with a space before the slash, and
//! canonical number formatting. Masking substitutes placeholder tokens at
//! attribute sites through the override table without touching any other
//! byte of the serialization.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{
    fmt_num, Background, Bounds, Brand, CmlDocument, Effect, Element, Extras, Geometry, Image,
    Page, Paragraph, Shape, Text,
};

const INDENT: usize = 4;

/// Replacement values for attribute sites, keyed by (element identity,
/// attribute path). Values are emitted verbatim.
#[derive(Debug, Default)]
pub(crate) struct Overrides(pub(crate) HashMap<(String, String), String>);

impl Overrides {
    pub(crate) fn empty() -> Overrides {
        Overrides::default()
    }

    fn get(&self, identity: &str, path: &str) -> Option<&str> {
        self.0
            .get(&(identity.to_string(), path.to_string()))
            .map(|s| s.as_str())
    }
}

/// Serialize a document to canonical text.
pub fn serialize_cml(doc: &CmlDocument) -> String {
    serialize_cml_with(doc, &Overrides::empty())
}

pub(crate) fn serialize_cml_with(doc: &CmlDocument, ov: &Overrides) -> String {
    let mut w = Writer { out: String::new(), ov };
    w.document(doc);
    w.out
}

/// Serialize a single element as a standalone fragment at the given indent
/// level.
pub fn serialize_element(element: &Element, level: usize) -> String {
    let mut w = Writer {
        out: String::new(),
        ov: &Overrides::empty(),
    };
    w.element(element, level * INDENT);
    w.out
}

fn esc_attr(value: &str) -> String {
    if !value.contains(['&', '<', '"']) {
        return value.to_string();
    }
    value.replace('&', "&amp;").replace('<', "&lt;").replace('"', "&quot;")
}

fn esc_text(value: &str) -> String {
    if !value.contains(['&', '<']) {
        return value.to_string();
    }
    value.replace('&', "&amp;").replace('<', "&lt;")
}

/// Accumulates the attribute list of one tag.
struct Tag<'w, 'o> {
    w: &'w mut Writer<'o>,
    buf: String,
    identity: String,
}

impl<'w, 'o> Tag<'w, 'o> {
    fn attr(&mut self, name: &str, value: &str) -> &mut Self {
        let _ = write!(self.buf, " {}=\"{}\"", name, esc_attr(value));
        self
    }

    fn attr_opt(&mut self, name: &str, value: Option<&str>) -> &mut Self {
        if let Some(v) = value {
            self.attr(name, v);
        }
        self
    }

    fn num(&mut self, name: &str, value: f64) -> &mut Self {
        let s = fmt_num(value);
        self.attr(name, &s)
    }

    fn num_opt(&mut self, name: &str, value: Option<f64>) -> &mut Self {
        if let Some(v) = value {
            self.num(name, v);
        }
        self
    }

    /// Attribute that masking may replace: consult the override table and
    /// emit the token verbatim when one is registered for this site.
    fn site(&mut self, path: &str, name: &str, value: &str) -> &mut Self {
        match self.w.ov.get(&self.identity, path) {
            Some(token) => {
                let _ = write!(self.buf, " {name}=\"{token}\"");
                self
            }
            None => self.attr(name, value),
        }
    }

    fn site_num(&mut self, path: &str, name: &str, value: f64) -> &mut Self {
        let s = fmt_num(value);
        self.site(path, name, &s)
    }

    fn site_opt(&mut self, path: &str, name: &str, value: Option<&str>) -> &mut Self {
        if let Some(v) = value {
            self.site(path, name, v);
        }
        self
    }

    fn site_num_opt(&mut self, path: &str, name: &str, value: Option<f64>) -> &mut Self {
        if let Some(v) = value {
            self.site_num(path, name, v);
        }
        self
    }

    fn extras(&mut self, extras: &Extras) -> &mut Self {
        for (name, value) in extras {
            self.attr(name, value);
        }
        self
    }
}

struct Writer<'o> {
    out: String,
    ov: &'o Overrides,
}

impl<'o> Writer<'o> {
    fn tag(&mut self, identity: &str) -> Tag<'_, 'o> {
        Tag {
            w: self,
            buf: String::new(),
            identity: identity.to_string(),
        }
    }

    fn open(&mut self, indent: usize, name: &str, attrs: String) {
        let _ = writeln!(self.out, "{:indent$}<{name}{attrs}>", "");
    }

    fn leaf(&mut self, indent: usize, name: &str, attrs: String) {
        let _ = writeln!(self.out, "{:indent$}<{name}{attrs} />", "");
    }

    fn close(&mut self, indent: usize, name: &str) {
        let _ = writeln!(self.out, "{:indent$}</{name}>", "");
    }

    /// `<content>`-like tag holding raw text on its own line.
    fn text_block(&mut self, indent: usize, name: &str, body: &str) {
        if body.is_empty() {
            self.leaf(indent, name, String::new());
            return;
        }
        self.open(indent, name, String::new());
        let _ = writeln!(self.out, "{:w$}{}", "", esc_text(body), w = indent + INDENT);
        self.close(indent, name);
    }

    fn document(&mut self, doc: &CmlDocument) {
        let mut t = self.tag("");
        t.attr("v", &doc.version.to_string())
            .attr("numberPages", &doc.number_pages.to_string())
            .extras(&doc.extras);
        let attrs = t.buf;
        self.open(0, "cml", attrs);
        for page in &doc.pages {
            self.page(page, INDENT);
        }
        self.close(0, "cml");
    }

    fn page(&mut self, page: &Page, indent: usize) {
        let mut t = self.tag("");
        t.num("width", page.width)
            .num("height", page.height)
            .attr("format", &page.format)
            .attr("layoutID", &page.layout_id)
            .extras(&page.extras);
        let attrs = t.buf;
        if page.brand.is_none() && page.elements.is_empty() {
            self.leaf(indent, "page", attrs);
            return;
        }
        self.open(indent, "page", attrs);
        if let Some(brand) = &page.brand {
            self.brand(brand, indent + INDENT);
        }
        for element in &page.elements {
            self.element(element, indent + INDENT);
        }
        self.close(indent, "page");
    }

    fn brand(&mut self, brand: &Brand, indent: usize) {
        if brand.colors.is_empty() && brand.fonts.is_empty() {
            self.leaf(indent, "brand", String::new());
            return;
        }
        self.open(indent, "brand", String::new());
        for color in &brand.colors {
            let mut t = self.tag("");
            t.attr("value", &color.to_string());
            let attrs = t.buf;
            self.leaf(indent + INDENT, "color", attrs);
        }
        for font in &brand.fonts {
            let mut t = self.tag("");
            t.attr("name", font);
            let attrs = t.buf;
            self.leaf(indent + INDENT, "font", attrs);
        }
        self.close(indent, "brand");
    }

    fn element(&mut self, element: &Element, indent: usize) {
        match element {
            Element::Background(b) => self.background(b, indent),
            Element::Text(t) => self.text_element(t, indent),
            Element::Image(i) => self.image(i, indent),
            Element::Shape(s) => self.shape(s, indent),
        }
    }

    fn bounds(&mut self, bounds: &Bounds, identity: &str, indent: usize) {
        let mut t = self.tag(identity);
        t.site_num("bounds.top", "top", bounds.top)
            .site_num("bounds.left", "left", bounds.left)
            .site_num("bounds.width", "width", bounds.width)
            .site_num("bounds.height", "height", bounds.height)
            .num_opt("rotation", bounds.rotation);
        if let Some(z) = bounds.z_index {
            t.attr("z-index", &z.to_string());
        }
        t.extras(&bounds.extras);
        let attrs = t.buf;
        self.leaf(indent, "bounds", attrs);
    }

    fn background(&mut self, bg: &Background, indent: usize) {
        let identity = bg.entity_id.clone().unwrap_or_else(|| bg.id.clone());
        let mut t = self.tag("");
        t.attr("type", &bg.kind)
            .attr("id", &bg.id)
            .attr_opt("entityId", bg.entity_id.as_deref())
            .extras(&bg.extras);
        let attrs = t.buf;
        self.open(indent, "background", attrs);
        self.bounds(&bg.bounds, &identity, indent + INDENT);
        let mut t = self.tag(&identity);
        t.site("style.color", "color", &bg.color.to_string())
            .extras(&bg.style_extras);
        let attrs = t.buf;
        self.leaf(indent + INDENT, "style", attrs);
        self.close(indent, "background");
    }

    fn text_element(&mut self, text: &Text, indent: usize) {
        let identity = text.entity_id.clone().unwrap_or_else(|| text.id.clone());
        let mut t = self.tag("");
        t.attr("id", &text.id)
            .attr_opt("entityId", text.entity_id.as_deref())
            .extras(&text.extras);
        let attrs = t.buf;
        self.open(indent, "text", attrs);
        self.bounds(&text.bounds, &identity, indent + INDENT);
        if text.alignment.is_some() || text.layout.is_some() || !text.style_extras.is_empty() {
            let mut t = self.tag("");
            t.attr_opt("alignment", text.alignment.map(|a| a.as_str()))
                .attr_opt("layout", text.layout.map(|l| l.as_str()))
                .extras(&text.style_extras);
            let attrs = t.buf;
            self.leaf(indent + INDENT, "style", attrs);
        }
        for (i, paragraph) in text.paragraphs.iter().enumerate() {
            self.paragraph(paragraph, i, &identity, indent + INDENT);
        }
        self.close(indent, "text");
    }

    fn paragraph(&mut self, p: &Paragraph, index: usize, identity: &str, indent: usize) {
        self.open(indent, "p", String::new());
        self.text_block(indent + INDENT, "content", &p.content);
        let s = &p.style;
        let prefix = format!("p[{index}].style");
        let mut t = self.tag(identity);
        t.site_num_opt(&format!("{prefix}.leading"), "leading", s.leading)
            .site_opt(
                &format!("{prefix}.color"),
                "color",
                s.color.map(|c| c.to_string()).as_deref(),
            )
            .site_opt(&format!("{prefix}.font"), "font", s.font.as_deref())
            .site_num_opt(&format!("{prefix}.size"), "size", s.size)
            .site_num_opt(&format!("{prefix}.tracking"), "tracking", s.tracking)
            .num_opt("opacity", s.opacity);
        if let Some(u) = s.underline {
            t.attr("underline", if u { "true" } else { "false" });
        }
        t.site_num_opt(&format!("{prefix}.fontSize"), "fontSize", s.font_size)
            .extras(&s.extras);
        let attrs = t.buf;
        self.leaf(indent + INDENT, "style", attrs);
        self.close(indent, "p");
    }

    fn image(&mut self, img: &Image, indent: usize) {
        let identity = img.entity_id.clone().unwrap_or_else(|| img.id.clone());
        let mut t = self.tag("");
        t.attr("id", &img.id)
            .attr_opt("entityId", img.entity_id.as_deref())
            .attr_opt("sourceType", img.source_type.as_deref())
            .attr_opt("sourceId", img.source_id.as_deref())
            .extras(&img.extras);
        let attrs = t.buf;
        self.open(indent, "image", attrs);
        self.bounds(&img.bounds, &identity, indent + INDENT);
        if let Some(content) = &img.content {
            self.text_block(indent + INDENT, "content", content);
        }
        let mut t = self.tag("");
        t.attr_opt("blendMode", img.style.blend_mode.as_deref());
        if let Some(a) = img.style.has_alpha {
            t.attr("hasAlpha", if a { "true" } else { "false" });
        }
        t.extras(&img.style.extras);
        let attrs = t.buf;
        self.leaf(indent + INDENT, "style", attrs);
        let mut t = self.tag(&identity);
        for (i, cell) in img.color_grid.0.iter().enumerate() {
            let path = format!("colorGrid.c{}", i + 1);
            t.site(&path, &format!("c{}", i + 1), &cell.to_string());
        }
        let attrs = t.buf;
        self.leaf(indent + INDENT, "colorGrid", attrs);
        if let Some(effect) = &img.effect {
            self.effect(effect, &identity, indent + INDENT);
        }
        self.close(indent, "image");
    }

    fn effect(&mut self, effect: &Effect, identity: &str, indent: usize) {
        let mut t = self.tag(identity);
        t.attr("name", &effect.name)
            .site("effect.type", "type", &effect.kind)
            .attr("shape", &effect.shape)
            .extras(&effect.extras);
        let attrs = t.buf;
        self.leaf(indent, "effect", attrs);
    }

    fn shape(&mut self, shape: &Shape, indent: usize) {
        let identity = shape.entity_id.clone().unwrap_or_else(|| shape.id.clone());
        let mut t = self.tag("");
        t.attr("id", &shape.id)
            .attr("type", &shape.shape_type)
            .attr_opt("entityId", shape.entity_id.as_deref())
            .attr_opt("sourceType", shape.source_type.as_deref())
            .attr_opt("sourceId", shape.source_id.as_deref())
            .extras(&shape.extras);
        let attrs = t.buf;
        self.open(indent, "shape", attrs);
        if let Some(geometry) = &shape.geometry {
            let mut t = self.tag("");
            match *geometry {
                Geometry::Ellipse { rx, ry } => {
                    t.num("rx", rx).num("ry", ry);
                }
                Geometry::Line {
                    start_x,
                    start_y,
                    end_x,
                    end_y,
                } => {
                    t.num("startX", start_x)
                        .num("startY", start_y)
                        .num("endX", end_x)
                        .num("endY", end_y);
                }
            }
            let attrs = t.buf;
            self.leaf(indent + INDENT, "geometry", attrs);
        }
        self.bounds(&shape.bounds, &identity, indent + INDENT);
        if let Some(content) = &shape.content {
            self.text_block(indent + INDENT, "content", content);
        }
        if let Some(search) = &shape.search {
            self.text_block(indent + INDENT, "search", search);
        }
        let s = &shape.style;
        let mut t = self.tag(&identity);
        t.num_opt("opacity", s.opacity)
            .site_opt(
                "style.color",
                "color",
                s.fill.map(|c| c.to_string()).as_deref(),
            )
            .site_opt(
                "style.strokeColor",
                "strokeColor",
                s.stroke_color.map(|c| c.to_string()).as_deref(),
            )
            .attr_opt("strokePosition", s.stroke_position.as_deref())
            .num_opt("strokeWidth", s.stroke_width)
            .num_opt("strokeMiter", s.stroke_miter)
            .attr_opt("strokeDashGeometryType", s.stroke_dash.as_deref())
            .extras(&s.extras);
        let attrs = t.buf;
        self.leaf(indent + INDENT, "style", attrs);
        self.close(indent, "shape");
    }
}
