//! Strict parser for the design markup.
//!
//! The grammar is a flat, non-nested XML subset with a closed tag set, so
//! the parser is a small hand-written lexer plus one function per tag.
//! Unknown tags are errors; unknown attributes are errors unless lenient
//! mode is enabled, in which case they are preserved verbatim.

use std::collections::HashSet;

use crate::color::HexColor;
use crate::error::CmlError;

use super::{
    Alignment, Background, Bounds, Brand, CmlDocument, ColorGrid, Effect, Element, Extras,
    Geometry, Image, ImageStyle, LayoutMode, Page, Paragraph, Shape, ShapeStyle, Text, TextStyle,
};

/// Parse behavior switches.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Preserve unknown attributes as opaque key-value pairs instead of
    /// rejecting them.
    pub lenient_attributes: bool,
}

/// Parse CML text into a document, in strict mode.
pub fn parse_cml(text: &str) -> Result<CmlDocument, CmlError> {
    parse_cml_with(text, &ParseOptions::default())
}

/// Parse CML text with explicit options.
pub fn parse_cml_with(text: &str, opts: &ParseOptions) -> Result<CmlDocument, CmlError> {
    let mut parser = Parser {
        lexer: Lexer::new(text),
        opts,
    };
    parser.document()
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum Token {
    Open {
        name: String,
        attrs: Vec<(String, String)>,
        self_close: bool,
        line: usize,
    },
    Close {
        name: String,
        line: usize,
    },
    Text {
        raw: String,
        line: usize,
    },
    Eof {
        line: usize,
    },
}

struct Lexer<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Lexer<'a> {
        Lexer {
            rest: text.strip_prefix('\u{feff}').unwrap_or(text),
            line: 1,
        }
    }

    fn err(&self, message: impl Into<String>) -> CmlError {
        CmlError::MalformedXml {
            line: self.line,
            message: message.into(),
        }
    }

    fn advance(&mut self, n: usize) {
        let (consumed, rest) = self.rest.split_at(n);
        self.line += consumed.matches('\n').count();
        self.rest = rest;
    }

    fn next_token(&mut self) -> Result<Token, CmlError> {
        if self.rest.is_empty() {
            return Ok(Token::Eof { line: self.line });
        }
        if let Some(after) = self.rest.strip_prefix('<') {
            let line = self.line;
            if after.starts_with('!') || after.starts_with('?') {
                return Err(self.err("comments, doctypes and processing instructions are not part of the format"));
            }
            if let Some(close_rest) = after.strip_prefix('/') {
                let end = close_rest
                    .find('>')
                    .ok_or_else(|| self.err("unterminated closing tag"))?;
                let name = close_rest[..end].trim().to_string();
                if !is_valid_name(&name) {
                    return Err(self.err(format!("invalid closing tag name {name:?}")));
                }
                self.advance(2 + end + 1);
                return Ok(Token::Close { name, line });
            }
            self.advance(1);
            let name = self.take_name()?;
            let mut attrs: Vec<(String, String)> = Vec::new();
            loop {
                self.skip_inline_ws();
                if let Some(rest) = self.rest.strip_prefix("/>") {
                    let _ = rest;
                    self.advance(2);
                    return Ok(Token::Open {
                        name,
                        attrs,
                        self_close: true,
                        line,
                    });
                }
                if self.rest.starts_with('>') {
                    self.advance(1);
                    return Ok(Token::Open {
                        name,
                        attrs,
                        self_close: false,
                        line,
                    });
                }
                if self.rest.is_empty() {
                    return Err(self.err(format!("unterminated <{name}> tag")));
                }
                let attr_name = self.take_name()?;
                if attrs.iter().any(|(n, _)| n == &attr_name) {
                    return Err(self.err(format!("duplicate attribute {attr_name:?} on <{name}>")));
                }
                self.skip_inline_ws();
                if !self.rest.starts_with('=') {
                    return Err(self.err(format!("attribute {attr_name:?} is missing '='")));
                }
                self.advance(1);
                self.skip_inline_ws();
                let quote = match self.rest.chars().next() {
                    Some(q @ ('"' | '\'')) => q,
                    _ => return Err(self.err(format!("attribute {attr_name:?} value must be quoted"))),
                };
                self.advance(1);
                let end = self
                    .rest
                    .find(quote)
                    .ok_or_else(|| self.err(format!("unterminated value for attribute {attr_name:?}")))?;
                let raw = &self.rest[..end];
                let value = unescape(raw).map_err(|m| self.err(m))?;
                self.advance(end + 1);
                attrs.push((attr_name, value));
            }
        }
        // Text run up to the next tag.
        let line = self.line;
        let end = self.rest.find('<').unwrap_or(self.rest.len());
        let raw = &self.rest[..end];
        let text = unescape(raw).map_err(|m| self.err(m))?;
        self.advance(end);
        Ok(Token::Text { raw: text, line })
    }

    fn take_name(&mut self) -> Result<String, CmlError> {
        let end = self
            .rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == '_'))
            .unwrap_or(self.rest.len());
        let name = &self.rest[..end];
        if name.is_empty() || !name.chars().next().unwrap().is_ascii_alphabetic() {
            return Err(self.err("expected a name"));
        }
        let name = name.to_string();
        self.advance(end);
        Ok(name)
    }

    fn skip_inline_ws(&mut self) {
        let end = self
            .rest
            .find(|c: char| !c.is_whitespace())
            .unwrap_or(self.rest.len());
        self.advance(end);
    }
}

/// The closed tag set. A tag outside this list is an unknown element; a tag
/// from the list showing up in the wrong place is a structure error.
const KNOWN_TAGS: &[&str] = &[
    "cml", "page", "brand", "color", "font", "background", "text", "image", "shape", "bounds",
    "style", "p", "content", "search", "colorGrid", "effect", "geometry",
];

fn child_error(container: &str, tag: &str, line: usize) -> CmlError {
    if KNOWN_TAGS.contains(&tag) {
        CmlError::MalformedXml {
            line,
            message: format!("misplaced <{tag}> inside <{container}>"),
        }
    } else {
        CmlError::UnknownElement {
            line,
            tag: tag.to_string(),
        }
    }
}

fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name.chars().next().unwrap().is_ascii_alphabetic()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

fn unescape(raw: &str) -> Result<String, String> {
    if !raw.contains('&') {
        return Ok(raw.to_string());
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(pos) = rest.find('&') {
        out.push_str(&rest[..pos]);
        rest = &rest[pos..];
        let end = rest
            .find(';')
            .ok_or_else(|| format!("bare '&' in {raw:?}"))?;
        match &rest[..=end] {
            "&amp;" => out.push('&'),
            "&lt;" => out.push('<'),
            "&gt;" => out.push('>'),
            "&quot;" => out.push('"'),
            "&apos;" => out.push('\''),
            other => return Err(format!("unknown entity {other:?}")),
        }
        rest = &rest[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Attribute helpers
// ---------------------------------------------------------------------------

struct Attrs {
    tag: String,
    list: Vec<(String, String)>,
}

impl Attrs {
    fn has(&self, name: &str) -> bool {
        self.list.iter().any(|(n, _)| n == name)
    }

    fn take(&mut self, name: &str) -> Option<String> {
        let idx = self.list.iter().position(|(n, _)| n == name)?;
        Some(self.list.remove(idx).1)
    }

    fn require(&mut self, name: &str) -> Result<String, CmlError> {
        self.take(name).ok_or_else(|| CmlError::InvalidAttribute {
            tag: self.tag.clone(),
            attr: name.into(),
            value: String::new(),
            reason: "missing required attribute".into(),
        })
    }

    fn finish(self, opts: &ParseOptions) -> Result<Extras, CmlError> {
        if self.list.is_empty() || opts.lenient_attributes {
            return Ok(self.list);
        }
        let (attr, value) = self.list.into_iter().next().unwrap();
        Err(CmlError::InvalidAttribute {
            tag: self.tag,
            attr,
            value,
            reason: "unknown attribute".into(),
        })
    }
}

fn invalid(tag: &str, attr: &str, value: &str, reason: &str) -> CmlError {
    CmlError::InvalidAttribute {
        tag: tag.into(),
        attr: attr.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

fn parse_f64(tag: &str, attr: &str, value: &str) -> Result<f64, CmlError> {
    match value.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(invalid(tag, attr, value, "expected a finite number")),
    }
}

fn parse_u32(tag: &str, attr: &str, value: &str) -> Result<u32, CmlError> {
    value
        .parse::<u32>()
        .map_err(|_| invalid(tag, attr, value, "expected a non-negative integer"))
}

fn parse_bool(tag: &str, attr: &str, value: &str) -> Result<bool, CmlError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(invalid(tag, attr, value, "expected true or false")),
    }
}

fn parse_color(tag: &str, attr: &str, value: &str) -> Result<HexColor, CmlError> {
    value
        .parse::<HexColor>()
        .map_err(|_| invalid(tag, attr, value, "expected #rgb, #rrggbb or transparent"))
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    lexer: Lexer<'a>,
    opts: &'a ParseOptions,
}

/// What an open tag turned out to be once fully consumed.
struct Opened {
    attrs: Attrs,
    self_close: bool,
}

impl<'a> Parser<'a> {
    fn err_at(&self, line: usize, message: impl Into<String>) -> CmlError {
        CmlError::MalformedXml {
            line,
            message: message.into(),
        }
    }

    /// Next token, with whitespace-only text skipped.
    fn next_structural(&mut self) -> Result<Token, CmlError> {
        loop {
            match self.lexer.next_token()? {
                Token::Text { raw, line } => {
                    if !raw.trim().is_empty() {
                        return Err(self.err_at(line, format!("unexpected text {:?}", raw.trim())));
                    }
                }
                other => return Ok(other),
            }
        }
    }

    fn document(&mut self) -> Result<CmlDocument, CmlError> {
        let opened = match self.next_structural()? {
            Token::Open {
                name,
                attrs,
                self_close,
                line,
            } if name == "cml" => {
                let _ = line;
                Opened {
                    attrs: Attrs { tag: name, list: attrs },
                    self_close,
                }
            }
            Token::Open { name, line, .. } => {
                return Err(CmlError::UnknownElement { line, tag: name })
            }
            Token::Close { line, .. } | Token::Text { line, .. } | Token::Eof { line } => {
                return Err(self.err_at(line, "expected <cml> root"))
            }
        };
        let mut attrs = opened.attrs;
        let v = attrs.require("v")?;
        let version = parse_u32("cml", "v", &v)?;
        let np = attrs.require("numberPages")?;
        let number_pages = parse_u32("cml", "numberPages", &np)?;
        let extras = attrs.finish(self.opts)?;

        let mut pages = Vec::new();
        if !opened.self_close {
            loop {
                match self.next_structural()? {
                    Token::Open {
                        name,
                        attrs,
                        self_close,
                        line,
                    } => {
                        if name != "page" {
                            return Err(CmlError::UnknownElement { line, tag: name });
                        }
                        pages.push(self.page(Attrs { tag: name, list: attrs }, self_close)?);
                    }
                    Token::Close { name, line } => {
                        if name != "cml" {
                            return Err(self.err_at(line, format!("unexpected </{name}>, expected </cml>")));
                        }
                        break;
                    }
                    Token::Eof { line } | Token::Text { line, .. } => {
                        return Err(self.err_at(line, "unexpected end of input inside <cml>"))
                    }
                }
            }
        }
        match self.next_structural()? {
            Token::Eof { .. } => {}
            Token::Open { line, .. } | Token::Close { line, .. } | Token::Text { line, .. } => {
                return Err(self.err_at(line, "content after </cml>"))
            }
        }
        Ok(CmlDocument {
            version,
            number_pages,
            pages,
            extras,
        })
    }

    fn page(&mut self, mut attrs: Attrs, self_close: bool) -> Result<Page, CmlError> {
        let width = parse_f64("page", "width", &attrs.require("width")?)?;
        let height = parse_f64("page", "height", &attrs.require("height")?)?;
        let format = attrs.require("format")?;
        let layout_id = attrs.require("layoutID")?;
        let extras = attrs.finish(self.opts)?;

        let mut brand = None;
        let mut elements: Vec<Element> = Vec::new();
        let mut ids: HashSet<String> = HashSet::new();
        let mut entity_ids: HashSet<String> = HashSet::new();

        if !self_close {
            loop {
                let token = self.next_structural()?;
                let (name, tag_attrs, tag_self_close, line) = match token {
                    Token::Open {
                        name,
                        attrs,
                        self_close,
                        line,
                    } => (name, attrs, self_close, line),
                    Token::Close { name, line } => {
                        if name == "page" {
                            break;
                        }
                        return Err(self.err_at(line, format!("unexpected </{name}>, expected </page>")));
                    }
                    Token::Eof { line } | Token::Text { line, .. } => {
                        return Err(self.err_at(line, "unexpected end of input inside <page>"))
                    }
                };
                let tag_attrs = Attrs {
                    tag: name.clone(),
                    list: tag_attrs,
                };
                match name.as_str() {
                    "brand" => {
                        if brand.is_some() || !elements.is_empty() {
                            return Err(self.err_at(line, "<brand> must appear once, before any element"));
                        }
                        brand = Some(self.brand(tag_attrs, tag_self_close)?);
                    }
                    "background" => {
                        elements.push(Element::Background(self.background(tag_attrs, tag_self_close, line)?));
                    }
                    "text" => {
                        elements.push(Element::Text(self.text(tag_attrs, tag_self_close, line)?));
                    }
                    "image" => {
                        elements.push(Element::Image(self.image(tag_attrs, tag_self_close, line)?));
                    }
                    "shape" => {
                        elements.push(Element::Shape(self.shape(tag_attrs, tag_self_close, line)?));
                    }
                    _ => return Err(child_error("page", &name, line)),
                }
                if let Some(el) = elements.last() {
                    if !ids.insert(el.id().to_string()) {
                        return Err(CmlError::DuplicateId { id: el.id().to_string() });
                    }
                    if let Some(eid) = el.entity_id() {
                        if !entity_ids.insert(eid.to_string()) {
                            return Err(CmlError::DuplicateEntityId { id: eid.to_string() });
                        }
                    }
                }
            }
        }
        Ok(Page {
            width,
            height,
            format,
            layout_id,
            brand,
            elements,
            extras,
        })
    }

    fn brand(&mut self, attrs: Attrs, self_close: bool) -> Result<Brand, CmlError> {
        let _ = attrs.finish(self.opts)?;
        let mut brand = Brand::default();
        if self_close {
            return Ok(brand);
        }
        loop {
            match self.next_structural()? {
                Token::Open {
                    name,
                    attrs,
                    self_close,
                    line,
                } => {
                    let mut attrs = Attrs { tag: name.clone(), list: attrs };
                    match name.as_str() {
                        "color" => {
                            let value = attrs.require("value")?;
                            brand.colors.push(parse_color("color", "value", &value)?);
                        }
                        "font" => {
                            let name_attr = attrs.require("name")?;
                            if name_attr.is_empty() {
                                return Err(invalid("font", "name", "", "font name must be non-empty"));
                            }
                            brand.fonts.push(name_attr);
                        }
                        _ => return Err(child_error("brand", &name, line)),
                    }
                    let _ = attrs.finish(self.opts)?;
                    if !self_close {
                        self.expect_close(&name, line)?;
                    }
                }
                Token::Close { name, line } => {
                    if name == "brand" {
                        return Ok(brand);
                    }
                    return Err(self.err_at(line, format!("unexpected </{name}> inside <brand>")));
                }
                Token::Eof { line } | Token::Text { line, .. } => {
                    return Err(self.err_at(line, "unexpected end of input inside <brand>"))
                }
            }
        }
    }

    fn expect_close(&mut self, name: &str, line: usize) -> Result<(), CmlError> {
        match self.next_structural()? {
            Token::Close { name: n, .. } if n == name => Ok(()),
            Token::Close { name: n, line } => {
                Err(self.err_at(line, format!("expected </{name}>, found </{n}>")))
            }
            _ => Err(self.err_at(line, format!("expected </{name}>"))),
        }
    }

    /// Read the children of a container element into a closure-driven
    /// dispatch table until the matching close tag.
    fn children(
        &mut self,
        container: &str,
        self_close: bool,
        mut on_child: impl FnMut(&mut Self, &str, Attrs, bool, usize) -> Result<(), CmlError>,
    ) -> Result<(), CmlError> {
        if self_close {
            return Ok(());
        }
        loop {
            match self.next_structural()? {
                Token::Open {
                    name,
                    attrs,
                    self_close,
                    line,
                } => {
                    let attrs = Attrs { tag: name.clone(), list: attrs };
                    on_child(self, &name, attrs, self_close, line)?;
                }
                Token::Close { name, line } => {
                    if name == container {
                        return Ok(());
                    }
                    return Err(self.err_at(line, format!("unexpected </{name}> inside <{container}>")));
                }
                Token::Eof { line } | Token::Text { line, .. } => {
                    return Err(self.err_at(line, format!("unexpected end of input inside <{container}>")))
                }
            }
        }
    }

    /// Text body of `<content>`-like tags: raw character data up to the
    /// close tag, trimmed of the surrounding markup whitespace.
    fn text_body(&mut self, tag: &str, self_close: bool, line: usize) -> Result<String, CmlError> {
        if self_close {
            return Ok(String::new());
        }
        let mut body = String::new();
        loop {
            match self.lexer.next_token()? {
                Token::Text { raw, .. } => body.push_str(&raw),
                Token::Close { name, line } => {
                    if name == tag {
                        return Ok(body.trim().to_string());
                    }
                    return Err(self.err_at(line, format!("expected </{tag}>, found </{name}>")));
                }
                Token::Open { name, line, .. } => {
                    return Err(self.err_at(line, format!("<{name}> is not allowed inside <{tag}>")))
                }
                Token::Eof { .. } => {
                    return Err(self.err_at(line, format!("unterminated <{tag}>")))
                }
            }
        }
    }

    fn bounds(&mut self, mut attrs: Attrs, self_close: bool, line: usize) -> Result<Bounds, CmlError> {
        let top = parse_f64("bounds", "top", &attrs.require("top")?)?;
        let left = parse_f64("bounds", "left", &attrs.require("left")?)?;
        let width = parse_f64("bounds", "width", &attrs.require("width")?)?;
        let height = parse_f64("bounds", "height", &attrs.require("height")?)?;
        let rotation = attrs
            .take("rotation")
            .map(|v| parse_f64("bounds", "rotation", &v))
            .transpose()?;
        let z_index = attrs
            .take("z-index")
            .map(|v| parse_u32("bounds", "z-index", &v))
            .transpose()?;
        let extras = attrs.finish(self.opts)?;
        if !self_close {
            self.expect_close("bounds", line)?;
        }
        Ok(Bounds {
            top,
            left,
            width,
            height,
            rotation,
            z_index,
            extras,
        })
    }

    fn background(&mut self, mut attrs: Attrs, self_close: bool, open_line: usize) -> Result<Background, CmlError> {
        let kind = attrs.require("type")?;
        let id = attrs.require("id")?;
        let entity_id = attrs.take("entityId");
        let extras = attrs.finish(self.opts)?;
        let mut bounds = None;
        let mut color = None;
        let mut style_extras: Extras = Vec::new();
        self.children("background", self_close, |p, name, mut attrs, sc, line| {
            match name {
                "bounds" => {
                    if bounds.is_some() {
                        return Err(p.err_at(line, "duplicate <bounds>"));
                    }
                    bounds = Some(p.bounds(attrs, sc, line)?);
                }
                "style" => {
                    if color.is_some() {
                        return Err(p.err_at(line, "duplicate <style>"));
                    }
                    color = Some(parse_color("style", "color", &attrs.require("color")?)?);
                    style_extras = attrs.finish(p.opts)?;
                    if !sc {
                        p.expect_close("style", line)?;
                    }
                }
                other => return Err(child_error("background", other, line)),
            }
            Ok(())
        })?;
        Ok(Background {
            kind,
            id,
            entity_id,
            bounds: bounds.ok_or_else(|| self.err_at(open_line, "<background> missing <bounds>"))?,
            color: color.ok_or_else(|| self.err_at(open_line, "<background> missing <style>"))?,
            style_extras,
            extras,
        })
    }

    fn text(&mut self, mut attrs: Attrs, self_close: bool, open_line: usize) -> Result<Text, CmlError> {
        let id = attrs.require("id")?;
        let entity_id = attrs.take("entityId");
        let extras = attrs.finish(self.opts)?;
        let mut bounds = None;
        let mut alignment = None;
        let mut layout = None;
        let mut style_extras: Extras = Vec::new();
        let mut saw_style = false;
        let mut paragraphs = Vec::new();
        self.children("text", self_close, |p, name, mut attrs, sc, line| {
            match name {
                "bounds" => {
                    if bounds.is_some() {
                        return Err(p.err_at(line, "duplicate <bounds>"));
                    }
                    bounds = Some(p.bounds(attrs, sc, line)?);
                }
                "style" => {
                    if saw_style {
                        return Err(p.err_at(line, "duplicate <style>"));
                    }
                    saw_style = true;
                    if let Some(v) = attrs.take("alignment") {
                        alignment = Some(
                            Alignment::parse(&v)
                                .ok_or_else(|| invalid("style", "alignment", &v, "unknown alignment"))?,
                        );
                    }
                    if let Some(v) = attrs.take("layout") {
                        layout = Some(
                            LayoutMode::parse(&v)
                                .ok_or_else(|| invalid("style", "layout", &v, "unknown layout mode"))?,
                        );
                    }
                    style_extras = attrs.finish(p.opts)?;
                    if !sc {
                        p.expect_close("style", line)?;
                    }
                }
                "p" => {
                    let _ = attrs.finish(p.opts)?;
                    paragraphs.push(p.paragraph(sc, line)?);
                }
                other => return Err(child_error("text", other, line)),
            }
            Ok(())
        })?;
        let bounds = bounds.ok_or_else(|| self.err_at(open_line, "<text> missing <bounds>"))?;
        Ok(Text {
            id,
            entity_id,
            bounds,
            alignment,
            layout,
            style_extras,
            paragraphs,
            extras,
        })
    }

    fn paragraph(&mut self, self_close: bool, open_line: usize) -> Result<Paragraph, CmlError> {
        let mut content = None;
        let mut style = None;
        self.children("p", self_close, |p, name, mut attrs, sc, line| {
            match name {
                "content" => {
                    if content.is_some() {
                        return Err(p.err_at(line, "duplicate <content>"));
                    }
                    let _ = attrs.finish(p.opts)?;
                    content = Some(p.text_body("content", sc, line)?);
                }
                "style" => {
                    if style.is_some() {
                        return Err(p.err_at(line, "duplicate <style>"));
                    }
                    let parsed = TextStyle {
                        leading: attrs.take("leading").map(|v| parse_f64("style", "leading", &v)).transpose()?,
                        color: attrs.take("color").map(|v| parse_color("style", "color", &v)).transpose()?,
                        font: attrs.take("font"),
                        size: attrs.take("size").map(|v| parse_f64("style", "size", &v)).transpose()?,
                        tracking: attrs.take("tracking").map(|v| parse_f64("style", "tracking", &v)).transpose()?,
                        opacity: attrs.take("opacity").map(|v| parse_f64("style", "opacity", &v)).transpose()?,
                        underline: attrs.take("underline").map(|v| parse_bool("style", "underline", &v)).transpose()?,
                        font_size: attrs.take("fontSize").map(|v| parse_f64("style", "fontSize", &v)).transpose()?,
                        extras: attrs.finish(p.opts)?,
                    };
                    style = Some(parsed);
                    if !sc {
                        p.expect_close("style", line)?;
                    }
                }
                other => return Err(child_error("p", other, line)),
            }
            Ok(())
        })?;
        let content = content.ok_or_else(|| self.err_at(open_line, "<p> missing <content>"))?;
        let style = style.ok_or_else(|| self.err_at(open_line, "<p> missing <style>"))?;
        Ok(Paragraph { content, style })
    }

    fn image(&mut self, mut attrs: Attrs, self_close: bool, open_line: usize) -> Result<Image, CmlError> {
        let id = attrs.require("id")?;
        let entity_id = attrs.take("entityId");
        let source_type = attrs.take("sourceType");
        let source_id = attrs.take("sourceId");
        let extras = attrs.finish(self.opts)?;
        let mut bounds = None;
        let mut content = None;
        let mut style = None;
        let mut color_grid = None;
        let mut effect = None;
        self.children("image", self_close, |p, name, mut attrs, sc, line| {
            match name {
                "bounds" => {
                    if bounds.is_some() {
                        return Err(p.err_at(line, "duplicate <bounds>"));
                    }
                    bounds = Some(p.bounds(attrs, sc, line)?);
                }
                "content" => {
                    if content.is_some() {
                        return Err(p.err_at(line, "duplicate <content>"));
                    }
                    let _ = attrs.finish(p.opts)?;
                    content = Some(p.text_body("content", sc, line)?);
                }
                "style" => {
                    if style.is_some() {
                        return Err(p.err_at(line, "duplicate <style>"));
                    }
                    style = Some(ImageStyle {
                        blend_mode: attrs.take("blendMode"),
                        has_alpha: attrs.take("hasAlpha").map(|v| parse_bool("style", "hasAlpha", &v)).transpose()?,
                        extras: attrs.finish(p.opts)?,
                    });
                    if !sc {
                        p.expect_close("style", line)?;
                    }
                }
                "colorGrid" => {
                    if color_grid.is_some() {
                        return Err(p.err_at(line, "duplicate <colorGrid>"));
                    }
                    let mut cells = [HexColor::WHITE; 9];
                    for (i, cell) in cells.iter_mut().enumerate() {
                        let attr = format!("c{}", i + 1);
                        *cell = parse_color("colorGrid", &attr, &attrs.require(&attr)?)?;
                    }
                    let _ = attrs.finish(p.opts)?;
                    color_grid = Some(ColorGrid(cells));
                    if !sc {
                        p.expect_close("colorGrid", line)?;
                    }
                }
                "effect" => {
                    if effect.is_some() {
                        return Err(p.err_at(line, "duplicate <effect>"));
                    }
                    effect = Some(Effect {
                        name: attrs.require("name")?,
                        kind: attrs.require("type")?,
                        shape: attrs.require("shape")?,
                        extras: attrs.finish(p.opts)?,
                    });
                    if !sc {
                        p.expect_close("effect", line)?;
                    }
                }
                other => return Err(child_error("image", other, line)),
            }
            Ok(())
        })?;
        Ok(Image {
            id,
            entity_id,
            source_type,
            source_id,
            bounds: bounds.ok_or_else(|| self.err_at(open_line, "<image> missing <bounds>"))?,
            content,
            style: style.ok_or_else(|| self.err_at(open_line, "<image> missing <style>"))?,
            color_grid: color_grid.ok_or_else(|| self.err_at(open_line, "<image> missing <colorGrid>"))?,
            effect,
            extras,
        })
    }

    fn geometry(&mut self, mut attrs: Attrs, self_close: bool, line: usize) -> Result<Geometry, CmlError> {
        let geom = if attrs.has("rx") || attrs.has("ry") {
            Geometry::Ellipse {
                rx: parse_f64("geometry", "rx", &attrs.require("rx")?)?,
                ry: parse_f64("geometry", "ry", &attrs.require("ry")?)?,
            }
        } else {
            Geometry::Line {
                start_x: parse_f64("geometry", "startX", &attrs.require("startX")?)?,
                start_y: parse_f64("geometry", "startY", &attrs.require("startY")?)?,
                end_x: parse_f64("geometry", "endX", &attrs.require("endX")?)?,
                end_y: parse_f64("geometry", "endY", &attrs.require("endY")?)?,
            }
        };
        let _ = attrs.finish(self.opts)?;
        if !self_close {
            self.expect_close("geometry", line)?;
        }
        Ok(geom)
    }

    fn shape(&mut self, mut attrs: Attrs, self_close: bool, open_line: usize) -> Result<Shape, CmlError> {
        let id = attrs.require("id")?;
        let shape_type = attrs.require("type")?;
        let entity_id = attrs.take("entityId");
        let source_type = attrs.take("sourceType");
        let source_id = attrs.take("sourceId");
        let extras = attrs.finish(self.opts)?;
        let mut geometry = None;
        let mut bounds = None;
        let mut content = None;
        let mut search = None;
        let mut style = None;
        self.children("shape", self_close, |p, name, mut attrs, sc, line| {
            match name {
                "geometry" => {
                    if geometry.is_some() {
                        return Err(p.err_at(line, "duplicate <geometry>"));
                    }
                    geometry = Some(p.geometry(attrs, sc, line)?);
                }
                "bounds" => {
                    if bounds.is_some() {
                        return Err(p.err_at(line, "duplicate <bounds>"));
                    }
                    bounds = Some(p.bounds(attrs, sc, line)?);
                }
                "content" => {
                    if content.is_some() {
                        return Err(p.err_at(line, "duplicate <content>"));
                    }
                    let _ = attrs.finish(p.opts)?;
                    content = Some(p.text_body("content", sc, line)?);
                }
                "search" => {
                    if search.is_some() {
                        return Err(p.err_at(line, "duplicate <search>"));
                    }
                    let _ = attrs.finish(p.opts)?;
                    search = Some(p.text_body("search", sc, line)?);
                }
                "style" => {
                    if style.is_some() {
                        return Err(p.err_at(line, "duplicate <style>"));
                    }
                    style = Some(ShapeStyle {
                        opacity: attrs.take("opacity").map(|v| parse_f64("style", "opacity", &v)).transpose()?,
                        fill: attrs.take("color").map(|v| parse_color("style", "color", &v)).transpose()?,
                        stroke_color: attrs.take("strokeColor").map(|v| parse_color("style", "strokeColor", &v)).transpose()?,
                        stroke_position: attrs.take("strokePosition"),
                        stroke_width: attrs.take("strokeWidth").map(|v| parse_f64("style", "strokeWidth", &v)).transpose()?,
                        stroke_miter: attrs.take("strokeMiter").map(|v| parse_f64("style", "strokeMiter", &v)).transpose()?,
                        stroke_dash: attrs.take("strokeDashGeometryType"),
                        extras: attrs.finish(p.opts)?,
                    });
                    if !sc {
                        p.expect_close("style", line)?;
                    }
                }
                other => return Err(child_error("shape", other, line)),
            }
            Ok(())
        })?;
        Ok(Shape {
            id,
            shape_type,
            entity_id,
            source_type,
            source_id,
            geometry,
            bounds: bounds.ok_or_else(|| self.err_at(open_line, "<shape> missing <bounds>"))?,
            content,
            search,
            style: style.ok_or_else(|| self.err_at(open_line, "<shape> missing <style>"))?,
            extras,
        })
    }
}
