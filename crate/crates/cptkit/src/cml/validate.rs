//! Schema validation over parsed documents. Violations are data, not
//! errors: callers decide whether a non-empty report is fatal.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{CmlDocument, Element};

/// One failed invariant, naming the element (or page) and the rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule")]
pub enum Violation {
    BadVersion { version: u32 },
    PageCountMismatch { declared: u32, actual: usize },
    NonPositiveCanvas { page: usize, width: f64, height: f64 },
    NegativeBoundsSize { id: String, width: f64, height: f64 },
    DuplicateId { id: String },
    DuplicateEntityId { id: String },
    OpacityOutOfRange { id: String, value: f64 },
    NonPositiveFontSize { id: String, attr: String, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadVersion { version } => write!(f, "version must be >= 1, got {version}"),
            Violation::PageCountMismatch { declared, actual } => {
                write!(f, "numberPages is {declared} but document has {actual} page(s)")
            }
            Violation::NonPositiveCanvas { page, width, height } => {
                write!(f, "page {page} canvas must be positive, got {width}x{height}")
            }
            Violation::NegativeBoundsSize { id, width, height } => {
                write!(f, "element \"{id}\" has negative bounds size {width}x{height}")
            }
            Violation::DuplicateId { id } => write!(f, "duplicate element id \"{id}\""),
            Violation::DuplicateEntityId { id } => write!(f, "duplicate entityId \"{id}\""),
            Violation::OpacityOutOfRange { id, value } => {
                write!(f, "element \"{id}\" opacity {value} outside [0, 1]")
            }
            Violation::NonPositiveFontSize { id, attr, value } => {
                write!(f, "element \"{id}\" {attr} must be positive, got {value}")
            }
        }
    }
}

/// Check every type invariant; the empty list means the document is valid.
pub fn validate(doc: &CmlDocument) -> Vec<Violation> {
    let mut out = Vec::new();
    if doc.version < 1 {
        out.push(Violation::BadVersion { version: doc.version });
    }
    if doc.number_pages as usize != doc.pages.len() {
        out.push(Violation::PageCountMismatch {
            declared: doc.number_pages,
            actual: doc.pages.len(),
        });
    }
    for (page_idx, page) in doc.pages.iter().enumerate() {
        if page.width <= 0.0 || page.height <= 0.0 {
            out.push(Violation::NonPositiveCanvas {
                page: page_idx,
                width: page.width,
                height: page.height,
            });
        }
        let mut ids: HashSet<&str> = HashSet::new();
        let mut entity_ids: HashSet<&str> = HashSet::new();
        for element in &page.elements {
            let id = element.id();
            if !ids.insert(id) {
                out.push(Violation::DuplicateId { id: id.to_string() });
            }
            if let Some(eid) = element.entity_id() {
                if !entity_ids.insert(eid) {
                    out.push(Violation::DuplicateEntityId { id: eid.to_string() });
                }
            }
            let bounds = element.bounds();
            if bounds.width < 0.0 || bounds.height < 0.0 {
                out.push(Violation::NegativeBoundsSize {
                    id: id.to_string(),
                    width: bounds.width,
                    height: bounds.height,
                });
            }
            match element {
                Element::Text(text) => {
                    for p in &text.paragraphs {
                        if let Some(op) = p.style.opacity {
                            if !(0.0..=1.0).contains(&op) {
                                out.push(Violation::OpacityOutOfRange {
                                    id: id.to_string(),
                                    value: op,
                                });
                            }
                        }
                        if let Some(size) = p.style.size {
                            if size <= 0.0 {
                                out.push(Violation::NonPositiveFontSize {
                                    id: id.to_string(),
                                    attr: "size".into(),
                                    value: size,
                                });
                            }
                        }
                        if let Some(fs) = p.style.font_size {
                            if fs <= 0.0 {
                                out.push(Violation::NonPositiveFontSize {
                                    id: id.to_string(),
                                    attr: "fontSize".into(),
                                    value: fs,
                                });
                            }
                        }
                    }
                }
                Element::Shape(shape) => {
                    if let Some(op) = shape.style.opacity {
                        if !(0.0..=1.0).contains(&op) {
                            out.push(Violation::OpacityOutOfRange {
                                id: id.to_string(),
                                value: op,
                            });
                        }
                    }
                }
                Element::Background(_) | Element::Image(_) => {}
            }
        }
    }
    out
}
