//! Prediction parsing, infilling and structured diff / apply.
//!
//! Predictor output is one `TOKEN: value` line per mask token. Values are
//! validated per mask class, written back into the masked sites, and the
//! change set between two documents is expressed as atomic attribute edits
//! bound to stable element identities, so applying `diff(a, b)` onto `a`
//! reproduces `b` exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cml::{paths, validate, CmlDocument, Element};
use crate::error::InfillError;
use crate::fonts;
use crate::mask::{MaskBinding, MaskClass, MaskPlan};

/// Parsed predictor output: bare token name (`MASK_COLOR_0`) to the
/// validated, normalized value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PredictionSet(pub BTreeMap<String, String>);

impl PredictionSet {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(|s| s.as_str())
    }

    pub fn insert(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.0.insert(name.into(), value.into());
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// How strictly font predictions are checked against the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FontPolicy {
    /// Unknown fonts are accepted with a logged warning.
    #[default]
    Lenient,
    /// Unknown fonts are invalid values.
    Strict,
}

#[derive(Debug, Clone, Default)]
pub struct InfillOptions {
    pub font_policy: FontPolicy,
    /// Extra font names accepted on top of the built-in catalog.
    pub extra_fonts: Vec<String>,
}

/// Parse the `### OUTPUT:` block emitted by a predictor.
///
/// Leading/trailing whitespace per line is ignored; once every binding has
/// a value, any remaining lines are ignored with a warning. Values are
/// validated per mask class.
pub fn parse_predictions(
    text: &str,
    bindings: &[MaskBinding],
) -> Result<PredictionSet, InfillError> {
    parse_predictions_with(text, bindings, &InfillOptions::default())
}

pub fn parse_predictions_with(
    text: &str,
    bindings: &[MaskBinding],
    opts: &InfillOptions,
) -> Result<PredictionSet, InfillError> {
    let mut out = PredictionSet::default();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line == "### OUTPUT:" {
            continue;
        }
        if out.len() == bindings.len() {
            log::warn!("ignoring predictor output after all tokens are satisfied: {line:?}");
            break;
        }
        let (name, value) = line.split_once(':').ok_or_else(|| InfillError::UnknownToken {
            token: line.to_string(),
        })?;
        let name = name.trim().trim_start_matches('<').trim_end_matches('>');
        let value = value.trim();
        let Some(binding) = bindings.iter().find(|b| b.name() == name) else {
            return Err(InfillError::UnknownToken { token: name.to_string() });
        };
        if out.get(name).is_some() {
            return Err(InfillError::DuplicateToken { token: name.to_string() });
        }
        let normalized = validate_value(binding.class(), value, opts)?;
        out.insert(name, normalized);
    }
    for binding in bindings {
        if out.get(binding.name()).is_none() {
            return Err(InfillError::MissingToken {
                token: binding.name().to_string(),
            });
        }
    }
    Ok(out)
}

/// Validate and normalize one predicted value for its mask class.
pub fn validate_value(
    class: MaskClass,
    raw: &str,
    opts: &InfillOptions,
) -> Result<String, InfillError> {
    let invalid = |reason: &str| InfillError::InvalidValue {
        class,
        raw: raw.to_string(),
        reason: reason.to_string(),
    };
    let number = |raw: &str| -> Result<f64, InfillError> {
        raw.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| invalid("expected a finite number"))
    };
    match class {
        MaskClass::Color => raw
            .parse::<crate::color::HexColor>()
            .map(|c| c.to_string())
            .map_err(|_| invalid("expected #rgb, #rrggbb or transparent")),
        MaskClass::Font => {
            if raw.is_empty() {
                return Err(invalid("font name must be non-empty"));
            }
            let known = fonts::is_known(raw) || opts.extra_fonts.iter().any(|f| f == raw);
            if !known {
                match opts.font_policy {
                    FontPolicy::Strict => return Err(invalid("font is not in the known-font list")),
                    FontPolicy::Lenient => {
                        log::warn!("accepting unknown font {raw:?}");
                    }
                }
            }
            Ok(raw.to_string())
        }
        MaskClass::FontSize => {
            let x = number(raw)?;
            if x <= 0.0 {
                return Err(invalid("font size must be positive"));
            }
            Ok(crate::cml::fmt_num(x))
        }
        MaskClass::Leading => {
            let x = number(raw)?;
            if x <= 0.0 {
                return Err(invalid("leading must be positive"));
            }
            Ok(crate::cml::fmt_num(x))
        }
        MaskClass::Tracking | MaskClass::BoundsTop | MaskClass::BoundsLeft => {
            Ok(crate::cml::fmt_num(number(raw)?))
        }
        MaskClass::BoundsWidth | MaskClass::BoundsHeight => {
            let x = number(raw)?;
            if x < 0.0 {
                return Err(invalid("size must be non-negative"));
            }
            Ok(crate::cml::fmt_num(x))
        }
        MaskClass::Effect => {
            if raw.is_empty() {
                return Err(invalid("effect type must be non-empty"));
            }
            Ok(raw.to_string())
        }
    }
}

/// Write predicted values into the masked sites of `doc`.
///
/// The result differs from `doc` only at plan sites, every site sharing a
/// token receives the identical value, and the infilled document passes
/// validation.
pub fn infill(
    doc: &CmlDocument,
    plan: &MaskPlan,
    predictions: &PredictionSet,
) -> Result<CmlDocument, InfillError> {
    infill_with(doc, plan, predictions, &InfillOptions::default())
}

pub fn infill_with(
    doc: &CmlDocument,
    plan: &MaskPlan,
    predictions: &PredictionSet,
    opts: &InfillOptions,
) -> Result<CmlDocument, InfillError> {
    let mut out = doc.clone();
    for binding in plan.bindings() {
        let raw = predictions.get(binding.name()).ok_or_else(|| InfillError::MissingToken {
            token: binding.name().to_string(),
        })?;
        let value = validate_value(binding.class(), raw, opts)?;
        for &site_index in &binding.sites {
            let site = &plan.sites[site_index];
            paths::set_attr(&mut out, &site.element_id, &site.path, &value)?;
        }
    }
    let violations = validate(&out);
    if !violations.is_empty() {
        return Err(InfillError::ValidationFailed(violations));
    }
    Ok(out)
}

/// One atomic attribute change bound to a stable element identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditOp {
    #[serde(rename = "elementEntityId")]
    pub element_id: String,
    #[serde(rename = "attributePath")]
    pub path: String,
    #[serde(rename = "oldValue")]
    pub old: String,
    #[serde(rename = "newValue")]
    pub new: String,
}

/// Minimal attribute-level edit list turning `original` into `modified`.
///
/// Both documents must share element identity sets, ordering and attribute
/// topology; anything else is a structural mismatch, not a diff.
pub fn diff(original: &CmlDocument, modified: &CmlDocument) -> Result<Vec<EditOp>, InfillError> {
    check_structure(original, modified)?;
    let mut edits = Vec::new();
    for (target, path) in paths::document_paths(original) {
        let old = paths::get_attr(original, &target, &path)?;
        let new = paths::get_attr(modified, &target, &path)?;
        if old != new {
            edits.push(EditOp {
                element_id: target,
                path,
                old,
                new,
            });
        }
    }
    Ok(edits)
}

fn mismatch(detail: impl Into<String>) -> InfillError {
    InfillError::StructuralMismatch { detail: detail.into() }
}

fn check_structure(a: &CmlDocument, b: &CmlDocument) -> Result<(), InfillError> {
    if a.pages.len() != b.pages.len() {
        return Err(mismatch(format!(
            "page count {} vs {}",
            a.pages.len(),
            b.pages.len()
        )));
    }
    for (i, (pa, pb)) in a.pages.iter().zip(&b.pages).enumerate() {
        match (&pa.brand, &pb.brand) {
            (None, None) => {}
            (Some(ba), Some(bb)) => {
                if ba.colors.len() != bb.colors.len() || ba.fonts.len() != bb.fonts.len() {
                    return Err(mismatch(format!("brand shape differs on page {i}")));
                }
            }
            _ => return Err(mismatch(format!("brand presence differs on page {i}"))),
        }
        if pa.elements.len() != pb.elements.len() {
            return Err(mismatch(format!(
                "element count {} vs {} on page {i}",
                pa.elements.len(),
                pb.elements.len()
            )));
        }
        for (ea, eb) in pa.elements.iter().zip(&pb.elements) {
            if ea.tag() != eb.tag() {
                return Err(mismatch(format!(
                    "element \"{}\" is <{}> vs <{}>",
                    ea.identity(),
                    ea.tag(),
                    eb.tag()
                )));
            }
            if ea.identity() != eb.identity() {
                return Err(mismatch(format!(
                    "element identity \"{}\" vs \"{}\"",
                    ea.identity(),
                    eb.identity()
                )));
            }
            if let (Element::Text(ta), Element::Text(tb)) = (ea, eb) {
                if ta.paragraphs.len() != tb.paragraphs.len() {
                    return Err(mismatch(format!(
                        "paragraph count differs on \"{}\"",
                        ea.identity()
                    )));
                }
            }
            if paths::element_paths(ea) != paths::element_paths(eb) {
                return Err(mismatch(format!(
                    "attribute topology differs on \"{}\"",
                    ea.identity()
                )));
            }
        }
    }
    Ok(())
}

/// Apply an edit list. Each edit's old value must match the document
/// (stale edits are rejected) and each target must resolve uniquely.
pub fn apply_edits(doc: &CmlDocument, edits: &[EditOp]) -> Result<CmlDocument, InfillError> {
    let mut out = doc.clone();
    for edit in edits {
        let current = paths::get_attr(&out, &edit.element_id, &edit.path)?;
        if current != edit.old {
            return Err(InfillError::OldValueMismatch {
                id: edit.element_id.clone(),
                path: edit.path.clone(),
                expected: edit.old.clone(),
                found: current,
            });
        }
        paths::set_attr(&mut out, &edit.element_id, &edit.path, &edit.new)?;
    }
    Ok(out)
}
