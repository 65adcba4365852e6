//! Predictors: produce a value for every mask token in a masked document.
//!
//! Two deterministic offline baselines (palette transform, font pairing)
//! and a remote completion endpoint. Whatever the source, a brand
//! constraint is enforced centrally, so predicted colors and fonts always
//! come from the brand kit when one is given.

mod palette;
pub mod remote;

pub use palette::{baseline_palette, PaletteTransform};
pub use remote::{build_prompt, remote_complete, EndpointConfig};

use crate::cml::Brand;
use crate::color::HexColor;
use crate::error::{InfillError, PredictError};
use crate::fonts;
use crate::infill::{parse_predictions, PredictionSet};
use crate::mask::{MaskBinding, MaskClass};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Everything a predictor needs for one variant.
#[derive(Debug, Clone)]
pub struct PredictRequest {
    pub masked_cml: String,
    pub bindings: Vec<MaskBinding>,
    /// Creativity knob in [0, 2]; 0 keeps the baselines at identity.
    pub temperature: f64,
    pub seed: u64,
    pub brand: Option<Brand>,
    pub variant_index: u32,
}

/// Which predictor fills the masks.
#[derive(Debug, Clone)]
pub enum PredictorKind {
    BaselinePalette,
    BaselineFont,
    Remote(EndpointConfig),
}

/// Produce one value per binding token.
///
/// Baselines are deterministic in (seed, variant index); with a brand
/// constraint every COLOR value is taken from the brand colors and every
/// FONT value from the brand fonts, for any predictor kind.
pub fn predict(req: &PredictRequest, kind: &PredictorKind) -> Result<PredictionSet, PredictError> {
    let temperature = req.temperature.clamp(0.0, 2.0);
    let raw = match kind {
        PredictorKind::BaselinePalette => {
            baseline_palette(&req.bindings, req.seed, req.variant_index, temperature)
        }
        PredictorKind::BaselineFont => {
            baseline_font(&req.bindings, req.seed, req.variant_index, temperature)
        }
        PredictorKind::Remote(cfg) => {
            let completion = remote_complete(&build_prompt(&req.masked_cml), temperature, cfg)?;
            parse_predictions(&completion, &req.bindings)
                .map_err(|source| PredictError::MalformedCompletion { source })?
        }
    };
    match &req.brand {
        Some(brand) => enforce_brand(raw, &req.bindings, brand, req.seed, req.variant_index),
        None => Ok(raw),
    }
}

/// Deterministic font baseline: substitute each font within its catalog
/// group and scale font sizes by a bounded factor. Temperature 0 is the
/// identity; other classes are echoed.
pub fn baseline_font(
    bindings: &[MaskBinding],
    seed: u64,
    variant_index: u32,
    temperature: f64,
) -> PredictionSet {
    let temperature = temperature.clamp(0.0, 2.0);
    let mut out = PredictionSet::default();
    if temperature == 0.0 {
        for b in bindings {
            out.insert(b.name().to_string(), b.original.clone());
        }
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, variant_index as u64 ^ 0xf0a7));
    let steps = 1 + rng.random_range(0..4u32);
    let size_factor = 1.0 + rng.random_range(-0.2..=0.2) * (temperature / 2.0);
    for b in bindings {
        let value = match b.class() {
            MaskClass::Font => fonts::substitute(&b.original, steps)
                .map(|f| f.to_string())
                .unwrap_or_else(|| b.original.clone()),
            MaskClass::FontSize => match b.original.parse::<f64>() {
                Ok(size) => crate::cml::fmt_num((size * size_factor).round().max(1.0)),
                Err(_) => b.original.clone(),
            },
            _ => b.original.clone(),
        };
        out.insert(b.name().to_string(), value);
    }
    out
}

/// Force every COLOR prediction into the brand palette (nearest by
/// perceptual distance) and every FONT prediction into the brand font
/// list. Equal inputs stay equal, so token associations survive.
fn enforce_brand(
    set: PredictionSet,
    bindings: &[MaskBinding],
    brand: &Brand,
    seed: u64,
    variant_index: u32,
) -> Result<PredictionSet, PredictError> {
    let mut out = PredictionSet::default();
    for binding in bindings {
        let Some(value) = set.get(binding.name()) else {
            // Missing tokens surface later in infill; pass through.
            continue;
        };
        let constrained = match binding.class() {
            MaskClass::Color => {
                if brand.colors.is_empty() {
                    return Err(PredictError::ConstraintUnsatisfiable {
                        class: MaskClass::Color,
                    });
                }
                match value.parse::<HexColor>() {
                    Ok(HexColor::Transparent) => value.to_string(),
                    Ok(color) => nearest_brand_color(color, &brand.colors).to_string(),
                    Err(_) => {
                        return Err(PredictError::MalformedCompletion {
                            source: InfillError::InvalidValue {
                                class: MaskClass::Color,
                                raw: value.to_string(),
                                reason: "not a color".into(),
                            },
                        })
                    }
                }
            }
            MaskClass::Font => {
                if brand.fonts.is_empty() {
                    return Err(PredictError::ConstraintUnsatisfiable {
                        class: MaskClass::Font,
                    });
                }
                if brand.fonts.iter().any(|f| f == value) {
                    value.to_string()
                } else {
                    // Deterministic pick: stable in the value, seed and
                    // variant, so equal fonts map to the same brand font.
                    let h = mix(fnv1a(value.as_bytes()) ^ seed, variant_index as u64);
                    brand.fonts[(h % brand.fonts.len() as u64) as usize].clone()
                }
            }
            _ => value.to_string(),
        };
        out.insert(binding.name().to_string(), constrained);
    }
    Ok(out)
}

fn nearest_brand_color(color: HexColor, palette: &[HexColor]) -> HexColor {
    let lab = color.lab();
    let mut best = palette[0];
    let mut best_d = f64::INFINITY;
    for &candidate in palette {
        let d = lab.distance(candidate.lab());
        if d < best_d {
            best = candidate;
            best_d = d;
        }
    }
    best
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// splitmix64 round over the pair, used to derive per-variant rng seeds.
pub(crate) fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
