//! Attribute masking: select the sites to mask, assign mask ids under an
//! association mode, and emit masked markup plus a binding table.
//!
//! A mask token looks like `<MASK_COLOR_0>`. The numeric id expresses
//! association: sites sharing a token receive the same predicted value, so
//! the choice of association mode decides how much consistency a variation
//! keeps. Ids are dense per class, numbered in first-occurrence order.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::cml::{paths, serialize_cml_with, CmlDocument, Overrides};
use crate::error::MaskError;

/// The category of a maskable attribute; encoded in the token name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MaskClass {
    Color,
    Font,
    FontSize,
    Leading,
    Tracking,
    BoundsTop,
    BoundsLeft,
    BoundsWidth,
    BoundsHeight,
    Effect,
}

impl MaskClass {
    pub const ALL: [MaskClass; 10] = [
        MaskClass::Color,
        MaskClass::Font,
        MaskClass::FontSize,
        MaskClass::Leading,
        MaskClass::Tracking,
        MaskClass::BoundsTop,
        MaskClass::BoundsLeft,
        MaskClass::BoundsWidth,
        MaskClass::BoundsHeight,
        MaskClass::Effect,
    ];

    /// The CLASS part of the wire token `<MASK_{CLASS}_{n}>`.
    pub fn token_name(&self) -> &'static str {
        match self {
            MaskClass::Color => "COLOR",
            MaskClass::Font => "FONT",
            MaskClass::FontSize => "FONTSIZE",
            MaskClass::Leading => "LEADING",
            MaskClass::Tracking => "TRACKING",
            MaskClass::BoundsTop => "TOP",
            MaskClass::BoundsLeft => "LEFT",
            MaskClass::BoundsWidth => "WIDTH",
            MaskClass::BoundsHeight => "HEIGHT",
            MaskClass::Effect => "EFFECT",
        }
    }

    pub fn from_token_name(name: &str) -> Option<MaskClass> {
        MaskClass::ALL.into_iter().find(|c| c.token_name() == name)
    }

    /// Parse a user-facing class name as used on the command line.
    /// `layout` expands to all four bounds classes.
    pub fn parse_cli(name: &str) -> Option<Vec<MaskClass>> {
        let one = |c: MaskClass| Some(vec![c]);
        match name.to_ascii_lowercase().as_str() {
            "color" => one(MaskClass::Color),
            "font" => one(MaskClass::Font),
            "fontsize" => one(MaskClass::FontSize),
            "leading" => one(MaskClass::Leading),
            "tracking" => one(MaskClass::Tracking),
            "top" => one(MaskClass::BoundsTop),
            "left" => one(MaskClass::BoundsLeft),
            "width" => one(MaskClass::BoundsWidth),
            "height" => one(MaskClass::BoundsHeight),
            "effect" => one(MaskClass::Effect),
            "layout" => Some(vec![
                MaskClass::BoundsTop,
                MaskClass::BoundsLeft,
                MaskClass::BoundsWidth,
                MaskClass::BoundsHeight,
            ]),
            _ => None,
        }
    }
}

/// Which sites share a mask id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssociationMode {
    /// Every site gets its own token.
    None,
    /// Sites within one element share ids (per class, per value).
    Local,
    /// Sites with equal normalized values share ids document-wide.
    Global,
}

impl AssociationMode {
    pub fn parse(s: &str) -> Option<AssociationMode> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Some(AssociationMode::None),
            "local" => Some(AssociationMode::Local),
            "global" => Some(AssociationMode::Global),
            _ => None,
        }
    }
}

/// One maskable attribute occurrence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskSite {
    /// Stable identity of the owning element.
    #[serde(rename = "elementEntityId")]
    pub element_id: String,
    #[serde(rename = "attributePath")]
    pub path: String,
    pub class: MaskClass,
    #[serde(rename = "originalValue")]
    pub original: String,
}

/// The full masking decision for one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskPlan {
    pub mode: AssociationMode,
    pub sites: Vec<MaskSite>,
    /// Mask id per site, parallel to `sites`.
    pub assignments: Vec<u32>,
}

/// One mask token with the sites it covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskBinding {
    /// Wire form, e.g. `<MASK_COLOR_0>`.
    pub token: String,
    #[serde(rename = "originalValue")]
    pub original: String,
    /// Indices into the plan's site list.
    pub sites: Vec<usize>,
}

impl MaskBinding {
    /// The bare token name as predictors emit it, e.g. `MASK_COLOR_0`.
    pub fn name(&self) -> &str {
        self.token.trim_start_matches('<').trim_end_matches('>')
    }

    pub fn class(&self) -> MaskClass {
        token_class(self.name()).expect("binding token carries a known class")
    }
}

/// Class encoded in a bare token name like `MASK_COLOR_12`.
pub fn token_class(name: &str) -> Option<MaskClass> {
    let rest = name.strip_prefix("MASK_")?;
    let (class, id) = rest.rsplit_once('_')?;
    id.parse::<u32>().ok()?;
    MaskClass::from_token_name(class)
}

/// Classify one attribute path; `None` means the path is not maskable.
pub fn mask_class_of(path: &str) -> Option<MaskClass> {
    if let Some(rest) = path.strip_prefix("bounds.") {
        return match rest {
            "top" => Some(MaskClass::BoundsTop),
            "left" => Some(MaskClass::BoundsLeft),
            "width" => Some(MaskClass::BoundsWidth),
            "height" => Some(MaskClass::BoundsHeight),
            _ => None,
        };
    }
    if path == "effect.type" {
        return Some(MaskClass::Effect);
    }
    let attr = match path.rsplit_once('.') {
        Some((parent, attr)) if parent == "style" || parent.ends_with("].style") => attr,
        _ => return None,
    };
    match attr {
        "color" | "strokeColor" => Some(MaskClass::Color),
        "font" => Some(MaskClass::Font),
        "size" | "fontSize" => Some(MaskClass::FontSize),
        "leading" => Some(MaskClass::Leading),
        "tracking" => Some(MaskClass::Tracking),
        _ => None,
    }
}

/// Select every attribute of the requested classes (optionally restricted
/// to elements named by `scope`) and assign mask ids under `mode`.
///
/// Deterministic: the same inputs always produce the same plan.
pub fn plan_masks(
    doc: &CmlDocument,
    classes: &BTreeSet<MaskClass>,
    mode: AssociationMode,
    scope: Option<&[String]>,
) -> Result<MaskPlan, MaskError> {
    if let Some(ids) = scope {
        for id in ids {
            let found = doc
                .pages
                .iter()
                .flat_map(|p| p.elements.iter())
                .any(|e| e.identity() == id || e.id() == id);
            if !found {
                return Err(MaskError::UnknownScopeId { id: id.clone() });
            }
        }
    }

    let mut sites = Vec::new();
    for page in &doc.pages {
        for element in &page.elements {
            if let Some(ids) = scope {
                if !ids.iter().any(|id| element.identity() == id || element.id() == id) {
                    continue;
                }
            }
            for path in paths::element_paths(element) {
                let Some(class) = mask_class_of(&path) else {
                    continue;
                };
                if !classes.contains(&class) {
                    continue;
                }
                let value = paths::element_get(element, &path)
                    .expect("enumerated path resolves on its element");
                // A transparent fill is the absence of paint, not a color
                // choice; it is not a color site.
                if class == MaskClass::Color && value == "transparent" {
                    continue;
                }
                sites.push(MaskSite {
                    element_id: element.identity().to_string(),
                    path,
                    class,
                    original: value,
                });
            }
        }
    }
    if sites.is_empty() {
        return Err(MaskError::NoSitesFound);
    }

    let mut counters: BTreeMap<MaskClass, u32> = BTreeMap::new();
    let mut groups: HashMap<(MaskClass, String), u32> = HashMap::new();
    let mut assignments = Vec::with_capacity(sites.len());
    for (index, site) in sites.iter().enumerate() {
        let fresh = |counters: &mut BTreeMap<MaskClass, u32>| {
            let n = counters.entry(site.class).or_insert(0);
            let id = *n;
            *n += 1;
            id
        };
        let id = match mode {
            AssociationMode::None => {
                let _ = index;
                fresh(&mut counters)
            }
            AssociationMode::Local => *groups
                .entry((site.class, format!("{}\u{0}{}", site.element_id, site.original)))
                .or_insert_with(|| fresh(&mut counters)),
            AssociationMode::Global => *groups
                .entry((site.class, site.original.clone()))
                .or_insert_with(|| fresh(&mut counters)),
        };
        assignments.push(id);
    }
    Ok(MaskPlan {
        mode,
        sites,
        assignments,
    })
}

impl MaskPlan {
    /// Token text for the site at `index`.
    pub fn token_for(&self, index: usize) -> String {
        let site = &self.sites[index];
        format!("<MASK_{}_{}>", site.class.token_name(), self.assignments[index])
    }

    /// Bindings in first-occurrence order. Sites sharing a token always
    /// carry the same original value, so the binding's original is
    /// well-defined.
    pub fn bindings(&self) -> Vec<MaskBinding> {
        let mut order: Vec<String> = Vec::new();
        let mut by_token: BTreeMap<String, MaskBinding> = BTreeMap::new();
        for index in 0..self.sites.len() {
            let token = self.token_for(index);
            let entry = by_token.entry(token.clone()).or_insert_with(|| {
                order.push(token.clone());
                MaskBinding {
                    token,
                    original: self.sites[index].original.clone(),
                    sites: Vec::new(),
                }
            });
            entry.sites.push(index);
        }
        order
            .into_iter()
            .map(|t| by_token.remove(&t).unwrap())
            .collect()
    }

    /// Count of distinct tokens in the plan.
    pub fn token_count(&self) -> usize {
        let mut seen: BTreeSet<(MaskClass, u32)> = BTreeSet::new();
        for (site, id) in self.sites.iter().zip(&self.assignments) {
            seen.insert((site.class, *id));
        }
        seen.len()
    }
}

/// Produce the masked serialization and the binding table.
///
/// Every byte outside the masked attribute values is identical to
/// `serialize_cml(doc)`; a plan whose sites no longer resolve against the
/// document is rejected as stale.
pub fn apply_masks(
    doc: &CmlDocument,
    plan: &MaskPlan,
) -> Result<(String, Vec<MaskBinding>), MaskError> {
    let mut overrides = Overrides::empty();
    for (index, site) in plan.sites.iter().enumerate() {
        let current = paths::get_attr(doc, &site.element_id, &site.path).map_err(|e| {
            MaskError::StalePlan {
                id: site.element_id.clone(),
                path: site.path.clone(),
                reason: e.to_string(),
            }
        })?;
        if current != site.original {
            return Err(MaskError::StalePlan {
                id: site.element_id.clone(),
                path: site.path.clone(),
                reason: format!(
                    "value changed from \"{}\" to \"{current}\" since planning",
                    site.original
                ),
            });
        }
        overrides.0.insert(
            (site.element_id.clone(), site.path.clone()),
            plan.token_for(index),
        );
    }
    Ok((serialize_cml_with(doc, &overrides), plan.bindings()))
}
