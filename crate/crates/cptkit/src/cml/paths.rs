//! Attribute paths: stable string addresses for every scalar attribute of a
//! document, e.g. `p[0].style.color` on a text element or `bounds.top` on
//! any element. Masking, infilling and structured diffs all target
//! attributes through these paths, bound to a stable element identity.

use crate::color::HexColor;
use crate::error::PathError;

use super::{Alignment, CmlDocument, Element, Geometry, LayoutMode};

/// Look up an attribute value as its canonical string.
///
/// `target` is an element identity (entityId, or id when the element has no
/// entityId), `"doc"` for document attributes, or `"page[i]"` for page
/// attributes (including the brand lists).
pub fn get_attr(doc: &CmlDocument, target: &str, path: &str) -> Result<String, PathError> {
    if target == "doc" {
        return doc_get(doc, path).ok_or_else(|| unknown_path(target, path));
    }
    if let Some(page_idx) = parse_indexed(target, "page") {
        let page = doc.pages.get(page_idx).ok_or_else(|| unknown_target(target))?;
        return page_get(page, path).ok_or_else(|| unknown_path(target, path));
    }
    let element = find_element(doc, target).ok_or_else(|| unknown_target(target))?;
    element_get(element, path).ok_or_else(|| unknown_path(target, path))
}

/// Set an attribute from its string form, parsing and normalizing per the
/// attribute type. Setting never creates or removes attributes: a path that
/// does not resolve on the target is an error.
pub fn set_attr(
    doc: &mut CmlDocument,
    target: &str,
    path: &str,
    value: &str,
) -> Result<(), PathError> {
    let outcome = if target == "doc" {
        doc_set(doc, path, value)
    } else if let Some(page_idx) = parse_indexed(target, "page") {
        match doc.pages.get_mut(page_idx) {
            Some(page) => page_set(page, path, value),
            None => return Err(unknown_target(target)),
        }
    } else {
        match find_element_mut(doc, target) {
            Some(element) => element_set(element, path, value),
            None => return Err(unknown_target(target)),
        }
    };
    match outcome {
        SetOutcome::Done => Ok(()),
        SetOutcome::NoSuchPath => Err(unknown_path(target, path)),
        SetOutcome::BadValue(reason) => Err(PathError::InvalidValue {
            path: path.to_string(),
            value: value.to_string(),
            reason,
        }),
    }
}

/// All (target, path) pairs of a document in serialization order, covering
/// the document header, page attributes, brand entries and every element
/// attribute. This is the address space a structured diff walks.
pub fn document_paths(doc: &CmlDocument) -> Vec<(String, String)> {
    let mut out = vec![("doc".to_string(), "version".to_string())];
    for (i, page) in doc.pages.iter().enumerate() {
        let target = format!("page[{i}]");
        for p in ["width", "height", "format", "layoutID"] {
            out.push((target.clone(), p.to_string()));
        }
        if let Some(brand) = &page.brand {
            for j in 0..brand.colors.len() {
                out.push((target.clone(), format!("brand.colors[{j}]")));
            }
            for j in 0..brand.fonts.len() {
                out.push((target.clone(), format!("brand.fonts[{j}]")));
            }
        }
        for element in &page.elements {
            let identity = element.identity().to_string();
            for path in element_paths(element) {
                out.push((identity.clone(), path));
            }
        }
    }
    out
}

/// Present attribute paths of one element, in serialization order.
pub fn element_paths(element: &Element) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut push = |s: &str| out.push(s.to_string());
    match element {
        Element::Background(b) => {
            push("type");
            bounds_paths(&b.bounds, &mut out);
            push2(&mut out, "style.color");
        }
        Element::Text(t) => {
            bounds_paths(&t.bounds, &mut out);
            if t.alignment.is_some() {
                push2(&mut out, "style.alignment");
            }
            if t.layout.is_some() {
                push2(&mut out, "style.layout");
            }
            for (i, p) in t.paragraphs.iter().enumerate() {
                out.push(format!("p[{i}].content"));
                let s = &p.style;
                let prefix = format!("p[{i}].style");
                if s.leading.is_some() {
                    out.push(format!("{prefix}.leading"));
                }
                if s.color.is_some() {
                    out.push(format!("{prefix}.color"));
                }
                if s.font.is_some() {
                    out.push(format!("{prefix}.font"));
                }
                if s.size.is_some() {
                    out.push(format!("{prefix}.size"));
                }
                if s.tracking.is_some() {
                    out.push(format!("{prefix}.tracking"));
                }
                if s.opacity.is_some() {
                    out.push(format!("{prefix}.opacity"));
                }
                if s.underline.is_some() {
                    out.push(format!("{prefix}.underline"));
                }
                if s.font_size.is_some() {
                    out.push(format!("{prefix}.fontSize"));
                }
            }
        }
        Element::Image(i) => {
            if i.source_type.is_some() {
                push("sourceType");
            }
            if i.source_id.is_some() {
                push("sourceId");
            }
            bounds_paths(&i.bounds, &mut out);
            if i.content.is_some() {
                push2(&mut out, "content");
            }
            if i.style.blend_mode.is_some() {
                push2(&mut out, "style.blendMode");
            }
            if i.style.has_alpha.is_some() {
                push2(&mut out, "style.hasAlpha");
            }
            for c in 1..=9 {
                out.push(format!("colorGrid.c{c}"));
            }
            if i.effect.is_some() {
                push2(&mut out, "effect.name");
                push2(&mut out, "effect.type");
                push2(&mut out, "effect.shape");
            }
        }
        Element::Shape(s) => {
            push("type");
            if s.source_type.is_some() {
                push2(&mut out, "sourceType");
            }
            if s.source_id.is_some() {
                push2(&mut out, "sourceId");
            }
            match s.geometry {
                Some(Geometry::Ellipse { .. }) => {
                    push2(&mut out, "geometry.rx");
                    push2(&mut out, "geometry.ry");
                }
                Some(Geometry::Line { .. }) => {
                    push2(&mut out, "geometry.startX");
                    push2(&mut out, "geometry.startY");
                    push2(&mut out, "geometry.endX");
                    push2(&mut out, "geometry.endY");
                }
                None => {}
            }
            bounds_paths(&s.bounds, &mut out);
            if s.content.is_some() {
                push2(&mut out, "content");
            }
            if s.search.is_some() {
                push2(&mut out, "search");
            }
            let st = &s.style;
            if st.opacity.is_some() {
                push2(&mut out, "style.opacity");
            }
            if st.fill.is_some() {
                push2(&mut out, "style.color");
            }
            if st.stroke_color.is_some() {
                push2(&mut out, "style.strokeColor");
            }
            if st.stroke_position.is_some() {
                push2(&mut out, "style.strokePosition");
            }
            if st.stroke_width.is_some() {
                push2(&mut out, "style.strokeWidth");
            }
            if st.stroke_miter.is_some() {
                push2(&mut out, "style.strokeMiter");
            }
            if st.stroke_dash.is_some() {
                push2(&mut out, "style.strokeDashGeometryType");
            }
        }
    }
    out
}

fn push2(out: &mut Vec<String>, s: &str) {
    out.push(s.to_string());
}

fn bounds_paths(bounds: &super::Bounds, out: &mut Vec<String>) {
    for p in ["bounds.top", "bounds.left", "bounds.width", "bounds.height"] {
        out.push(p.to_string());
    }
    if bounds.rotation.is_some() {
        out.push("bounds.rotation".to_string());
    }
    if bounds.z_index.is_some() {
        out.push("bounds.z-index".to_string());
    }
}

/// Find an element anywhere in the document by its identity.
pub fn find_element<'d>(doc: &'d CmlDocument, identity: &str) -> Option<&'d Element> {
    doc.pages
        .iter()
        .flat_map(|p| p.elements.iter())
        .find(|e| e.identity() == identity)
}

pub fn find_element_mut<'d>(doc: &'d mut CmlDocument, identity: &str) -> Option<&'d mut Element> {
    doc.pages
        .iter_mut()
        .flat_map(|p| p.elements.iter_mut())
        .find(|e| e.identity() == identity)
}

fn unknown_target(target: &str) -> PathError {
    PathError::UnknownTarget { id: target.to_string() }
}

fn unknown_path(target: &str, path: &str) -> PathError {
    PathError::UnknownPath {
        id: target.to_string(),
        path: path.to_string(),
    }
}

/// `"p[3]"` with prefix `"p"` -> `Some(3)`.
fn parse_indexed(s: &str, prefix: &str) -> Option<usize> {
    s.strip_prefix(prefix)?
        .strip_prefix('[')?
        .strip_suffix(']')?
        .parse()
        .ok()
}

pub(crate) enum SetOutcome {
    Done,
    NoSuchPath,
    BadValue(String),
}

fn doc_get(doc: &CmlDocument, path: &str) -> Option<String> {
    match path {
        "version" => Some(doc.version.to_string()),
        "numberPages" => Some(doc.number_pages.to_string()),
        _ => None,
    }
}

fn doc_set(doc: &mut CmlDocument, path: &str, value: &str) -> SetOutcome {
    match path {
        "version" => set_u32(value, |v| doc.version = v),
        "numberPages" => set_u32(value, |v| doc.number_pages = v),
        _ => SetOutcome::NoSuchPath,
    }
}

fn page_get(page: &super::Page, path: &str) -> Option<String> {
    match path {
        "width" => Some(super::fmt_num(page.width)),
        "height" => Some(super::fmt_num(page.height)),
        "format" => Some(page.format.clone()),
        "layoutID" => Some(page.layout_id.clone()),
        _ => {
            let brand = page.brand.as_ref()?;
            if let Some(j) = parse_indexed(path, "brand.colors") {
                return brand.colors.get(j).map(|c| c.to_string());
            }
            if let Some(j) = parse_indexed(path, "brand.fonts") {
                return brand.fonts.get(j).cloned();
            }
            None
        }
    }
}

fn page_set(page: &mut super::Page, path: &str, value: &str) -> SetOutcome {
    match path {
        "width" => set_f64(value, |v| page.width = v),
        "height" => set_f64(value, |v| page.height = v),
        "format" => {
            page.format = value.to_string();
            SetOutcome::Done
        }
        "layoutID" => {
            page.layout_id = value.to_string();
            SetOutcome::Done
        }
        _ => {
            let Some(brand) = page.brand.as_mut() else {
                return SetOutcome::NoSuchPath;
            };
            if let Some(j) = parse_indexed(path, "brand.colors") {
                let Some(slot) = brand.colors.get_mut(j) else {
                    return SetOutcome::NoSuchPath;
                };
                return set_color(value, |c| *slot = c);
            }
            if let Some(j) = parse_indexed(path, "brand.fonts") {
                let Some(slot) = brand.fonts.get_mut(j) else {
                    return SetOutcome::NoSuchPath;
                };
                *slot = value.to_string();
                return SetOutcome::Done;
            }
            SetOutcome::NoSuchPath
        }
    }
}

/// Read one element attribute as its canonical string; `None` when the path
/// does not resolve (wrong variant, absent optional, out-of-range index).
pub fn element_get(element: &Element, path: &str) -> Option<String> {
    if let Some(rest) = path.strip_prefix("bounds.") {
        let b = element.bounds();
        return match rest {
            "top" => Some(super::fmt_num(b.top)),
            "left" => Some(super::fmt_num(b.left)),
            "width" => Some(super::fmt_num(b.width)),
            "height" => Some(super::fmt_num(b.height)),
            "rotation" => b.rotation.map(super::fmt_num),
            "z-index" => b.z_index.map(|z| z.to_string()),
            _ => None,
        };
    }
    match element {
        Element::Background(b) => match path {
            "type" => Some(b.kind.clone()),
            "style.color" => Some(b.color.to_string()),
            _ => None,
        },
        Element::Text(t) => {
            match path {
                "style.alignment" => return t.alignment.map(|a| a.as_str().to_string()),
                "style.layout" => return t.layout.map(|l| l.as_str().to_string()),
                _ => {}
            }
            let (i, rest) = split_paragraph_path(path)?;
            let p = t.paragraphs.get(i)?;
            match rest {
                "content" => Some(p.content.clone()),
                "style.leading" => p.style.leading.map(super::fmt_num),
                "style.color" => p.style.color.map(|c| c.to_string()),
                "style.font" => p.style.font.clone(),
                "style.size" => p.style.size.map(super::fmt_num),
                "style.tracking" => p.style.tracking.map(super::fmt_num),
                "style.opacity" => p.style.opacity.map(super::fmt_num),
                "style.underline" => p.style.underline.map(|u| u.to_string()),
                "style.fontSize" => p.style.font_size.map(super::fmt_num),
                _ => None,
            }
        }
        Element::Image(img) => match path {
            "sourceType" => img.source_type.clone(),
            "sourceId" => img.source_id.clone(),
            "content" => img.content.clone(),
            "style.blendMode" => img.style.blend_mode.clone(),
            "style.hasAlpha" => img.style.has_alpha.map(|a| a.to_string()),
            "effect.name" => img.effect.as_ref().map(|e| e.name.clone()),
            "effect.type" => img.effect.as_ref().map(|e| e.kind.clone()),
            "effect.shape" => img.effect.as_ref().map(|e| e.shape.clone()),
            _ => {
                let cell = path.strip_prefix("colorGrid.c")?.parse::<usize>().ok()?;
                if (1..=9).contains(&cell) {
                    Some(img.color_grid.0[cell - 1].to_string())
                } else {
                    None
                }
            }
        },
        Element::Shape(s) => match path {
            "type" => Some(s.shape_type.clone()),
            "sourceType" => s.source_type.clone(),
            "sourceId" => s.source_id.clone(),
            "content" => s.content.clone(),
            "search" => s.search.clone(),
            "geometry.rx" => match s.geometry {
                Some(Geometry::Ellipse { rx, .. }) => Some(super::fmt_num(rx)),
                _ => None,
            },
            "geometry.ry" => match s.geometry {
                Some(Geometry::Ellipse { ry, .. }) => Some(super::fmt_num(ry)),
                _ => None,
            },
            "geometry.startX" => match s.geometry {
                Some(Geometry::Line { start_x, .. }) => Some(super::fmt_num(start_x)),
                _ => None,
            },
            "geometry.startY" => match s.geometry {
                Some(Geometry::Line { start_y, .. }) => Some(super::fmt_num(start_y)),
                _ => None,
            },
            "geometry.endX" => match s.geometry {
                Some(Geometry::Line { end_x, .. }) => Some(super::fmt_num(end_x)),
                _ => None,
            },
            "geometry.endY" => match s.geometry {
                Some(Geometry::Line { end_y, .. }) => Some(super::fmt_num(end_y)),
                _ => None,
            },
            "style.opacity" => s.style.opacity.map(super::fmt_num),
            "style.color" => s.style.fill.map(|c| c.to_string()),
            "style.strokeColor" => s.style.stroke_color.map(|c| c.to_string()),
            "style.strokePosition" => s.style.stroke_position.clone(),
            "style.strokeWidth" => s.style.stroke_width.map(super::fmt_num),
            "style.strokeMiter" => s.style.stroke_miter.map(super::fmt_num),
            "style.strokeDashGeometryType" => s.style.stroke_dash.clone(),
            _ => None,
        },
    }
}

/// Write one element attribute from its string form.
pub(crate) fn element_set(element: &mut Element, path: &str, value: &str) -> SetOutcome {
    if let Some(rest) = path.strip_prefix("bounds.") {
        let b = element.bounds_mut();
        return match rest {
            "top" => set_f64(value, |v| b.top = v),
            "left" => set_f64(value, |v| b.left = v),
            "width" => set_f64(value, |v| b.width = v),
            "height" => set_f64(value, |v| b.height = v),
            "rotation" => match b.rotation {
                Some(_) => set_f64(value, |v| b.rotation = Some(v)),
                None => SetOutcome::NoSuchPath,
            },
            "z-index" => match b.z_index {
                Some(_) => set_u32(value, |v| b.z_index = Some(v)),
                None => SetOutcome::NoSuchPath,
            },
            _ => SetOutcome::NoSuchPath,
        };
    }
    match element {
        Element::Background(b) => match path {
            "type" => {
                b.kind = value.to_string();
                SetOutcome::Done
            }
            "style.color" => set_color(value, |c| b.color = c),
            _ => SetOutcome::NoSuchPath,
        },
        Element::Text(t) => {
            match path {
                "style.alignment" => {
                    if t.alignment.is_none() {
                        return SetOutcome::NoSuchPath;
                    }
                    return match Alignment::parse(value) {
                        Some(a) => {
                            t.alignment = Some(a);
                            SetOutcome::Done
                        }
                        None => SetOutcome::BadValue("unknown alignment".into()),
                    };
                }
                "style.layout" => {
                    if t.layout.is_none() {
                        return SetOutcome::NoSuchPath;
                    }
                    return match LayoutMode::parse(value) {
                        Some(l) => {
                            t.layout = Some(l);
                            SetOutcome::Done
                        }
                        None => SetOutcome::BadValue("unknown layout mode".into()),
                    };
                }
                _ => {}
            }
            let Some((i, rest)) = split_paragraph_path(path) else {
                return SetOutcome::NoSuchPath;
            };
            let Some(p) = t.paragraphs.get_mut(i) else {
                return SetOutcome::NoSuchPath;
            };
            let s = &mut p.style;
            match rest {
                "content" => {
                    p.content = value.to_string();
                    SetOutcome::Done
                }
                "style.leading" => set_present_f64(&mut s.leading, value),
                "style.color" => match s.color {
                    Some(_) => set_color(value, |c| s.color = Some(c)),
                    None => SetOutcome::NoSuchPath,
                },
                "style.font" => match s.font {
                    Some(_) => {
                        s.font = Some(value.to_string());
                        SetOutcome::Done
                    }
                    None => SetOutcome::NoSuchPath,
                },
                "style.size" => set_present_f64(&mut s.size, value),
                "style.tracking" => set_present_f64(&mut s.tracking, value),
                "style.opacity" => set_present_f64(&mut s.opacity, value),
                "style.underline" => match (s.underline, value) {
                    (None, _) => SetOutcome::NoSuchPath,
                    (Some(_), "true") => {
                        s.underline = Some(true);
                        SetOutcome::Done
                    }
                    (Some(_), "false") => {
                        s.underline = Some(false);
                        SetOutcome::Done
                    }
                    _ => SetOutcome::BadValue("expected true or false".into()),
                },
                "style.fontSize" => set_present_f64(&mut s.font_size, value),
                _ => SetOutcome::NoSuchPath,
            }
        }
        Element::Image(img) => match path {
            "sourceType" => set_present_string(&mut img.source_type, value),
            "sourceId" => set_present_string(&mut img.source_id, value),
            "content" => set_present_string(&mut img.content, value),
            "style.blendMode" => set_present_string(&mut img.style.blend_mode, value),
            "style.hasAlpha" => match (img.style.has_alpha, value) {
                (None, _) => SetOutcome::NoSuchPath,
                (Some(_), "true") => {
                    img.style.has_alpha = Some(true);
                    SetOutcome::Done
                }
                (Some(_), "false") => {
                    img.style.has_alpha = Some(false);
                    SetOutcome::Done
                }
                _ => SetOutcome::BadValue("expected true or false".into()),
            },
            "effect.name" => match img.effect.as_mut() {
                Some(e) => {
                    e.name = value.to_string();
                    SetOutcome::Done
                }
                None => SetOutcome::NoSuchPath,
            },
            "effect.type" => match img.effect.as_mut() {
                Some(e) => {
                    e.kind = value.to_string();
                    SetOutcome::Done
                }
                None => SetOutcome::NoSuchPath,
            },
            "effect.shape" => match img.effect.as_mut() {
                Some(e) => {
                    e.shape = value.to_string();
                    SetOutcome::Done
                }
                None => SetOutcome::NoSuchPath,
            },
            _ => {
                let Some(cell) = path
                    .strip_prefix("colorGrid.c")
                    .and_then(|c| c.parse::<usize>().ok())
                    .filter(|c| (1..=9).contains(c))
                else {
                    return SetOutcome::NoSuchPath;
                };
                set_color(value, |c| img.color_grid.0[cell - 1] = c)
            }
        },
        Element::Shape(s) => match path {
            "type" => {
                s.shape_type = value.to_string();
                SetOutcome::Done
            }
            "sourceType" => set_present_string(&mut s.source_type, value),
            "sourceId" => set_present_string(&mut s.source_id, value),
            "content" => set_present_string(&mut s.content, value),
            "search" => set_present_string(&mut s.search, value),
            "geometry.rx" => match &mut s.geometry {
                Some(Geometry::Ellipse { rx, .. }) => set_f64(value, |v| *rx = v),
                _ => SetOutcome::NoSuchPath,
            },
            "geometry.ry" => match &mut s.geometry {
                Some(Geometry::Ellipse { ry, .. }) => set_f64(value, |v| *ry = v),
                _ => SetOutcome::NoSuchPath,
            },
            "geometry.startX" => match &mut s.geometry {
                Some(Geometry::Line { start_x, .. }) => set_f64(value, |v| *start_x = v),
                _ => SetOutcome::NoSuchPath,
            },
            "geometry.startY" => match &mut s.geometry {
                Some(Geometry::Line { start_y, .. }) => set_f64(value, |v| *start_y = v),
                _ => SetOutcome::NoSuchPath,
            },
            "geometry.endX" => match &mut s.geometry {
                Some(Geometry::Line { end_x, .. }) => set_f64(value, |v| *end_x = v),
                _ => SetOutcome::NoSuchPath,
            },
            "geometry.endY" => match &mut s.geometry {
                Some(Geometry::Line { end_y, .. }) => set_f64(value, |v| *end_y = v),
                _ => SetOutcome::NoSuchPath,
            },
            "style.opacity" => set_present_f64(&mut s.style.opacity, value),
            "style.color" => match s.style.fill {
                Some(_) => set_color(value, |c| s.style.fill = Some(c)),
                None => SetOutcome::NoSuchPath,
            },
            "style.strokeColor" => match s.style.stroke_color {
                Some(_) => set_color(value, |c| s.style.stroke_color = Some(c)),
                None => SetOutcome::NoSuchPath,
            },
            "style.strokePosition" => set_present_string(&mut s.style.stroke_position, value),
            "style.strokeWidth" => set_present_f64(&mut s.style.stroke_width, value),
            "style.strokeMiter" => set_present_f64(&mut s.style.stroke_miter, value),
            "style.strokeDashGeometryType" => set_present_string(&mut s.style.stroke_dash, value),
            _ => SetOutcome::NoSuchPath,
        },
    }
}

fn split_paragraph_path(path: &str) -> Option<(usize, &str)> {
    let rest = path.strip_prefix("p[")?;
    let close = rest.find(']')?;
    let index = rest[..close].parse().ok()?;
    let rest = rest[close + 1..].strip_prefix('.')?;
    Some((index, rest))
}

fn set_f64(value: &str, assign: impl FnOnce(f64)) -> SetOutcome {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => {
            assign(v);
            SetOutcome::Done
        }
        _ => SetOutcome::BadValue("expected a finite number".into()),
    }
}

fn set_u32(value: &str, assign: impl FnOnce(u32)) -> SetOutcome {
    match value.parse::<u32>() {
        Ok(v) => {
            assign(v);
            SetOutcome::Done
        }
        Err(_) => SetOutcome::BadValue("expected a non-negative integer".into()),
    }
}

fn set_color(value: &str, assign: impl FnOnce(HexColor)) -> SetOutcome {
    match value.parse::<HexColor>() {
        Ok(c) => {
            assign(c);
            SetOutcome::Done
        }
        Err(_) => SetOutcome::BadValue("expected #rgb, #rrggbb or transparent".into()),
    }
}

fn set_present_f64(slot: &mut Option<f64>, value: &str) -> SetOutcome {
    match slot {
        Some(_) => set_f64(value, |v| *slot = Some(v)),
        None => SetOutcome::NoSuchPath,
    }
}

fn set_present_string(slot: &mut Option<String>, value: &str) -> SetOutcome {
    match slot {
        Some(_) => {
            *slot = Some(value.to_string());
            SetOutcome::Done
        }
        None => SetOutcome::NoSuchPath,
    }
}
