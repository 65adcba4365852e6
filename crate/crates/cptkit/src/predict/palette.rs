//! Palette baseline: a seeded hue rotation plus bounded lightness jitter
//! applied in CIELAB, standing in for a learned color predictor.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::color::HexColor;
use crate::infill::PredictionSet;
use crate::mask::{MaskBinding, MaskClass};

use super::mix;

/// One deterministic color transform. The same transform applies to every
/// color in a variant, so equal inputs map to equal outputs and token
/// associations are respected by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaletteTransform {
    pub hue_rotation_deg: f64,
    pub lightness_shift: f64,
}

impl PaletteTransform {
    pub fn identity() -> PaletteTransform {
        PaletteTransform {
            hue_rotation_deg: 0.0,
            lightness_shift: 0.0,
        }
    }

    /// Derive the transform for one variant. Temperature scales both the
    /// rotation range and the lightness jitter; at temperature 0 the
    /// transform collapses to the identity.
    pub fn derive(seed: u64, variant_index: u32, temperature: f64) -> PaletteTransform {
        let temperature = temperature.clamp(0.0, 2.0);
        if temperature == 0.0 {
            return PaletteTransform::identity();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, variant_index as u64));
        let magnitude = rng.random_range(30.0..=180.0) * (temperature / 2.0);
        let sign = if rng.random_range(0..2u32) == 0 { 1.0 } else { -1.0 };
        let lightness_shift = rng.random_range(-1.0..=1.0) * 10.0 * (temperature / 2.0);
        PaletteTransform {
            hue_rotation_deg: sign * magnitude,
            lightness_shift,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.hue_rotation_deg == 0.0 && self.lightness_shift == 0.0
    }

    /// Transform one color. The identity transform returns the input
    /// exactly; `transparent` is always a fixed point, and so are
    /// achromatic colors under a pure rotation.
    pub fn apply(&self, color: HexColor) -> HexColor {
        if self.is_identity() || color.is_transparent() {
            return color;
        }
        let lab = color.lab().adjusted(self.hue_rotation_deg, self.lightness_shift);
        let (r, g, b) = lab.to_rgb();
        HexColor::Rgb(r, g, b)
    }
}

/// Apply the variant's palette transform to every COLOR binding; all other
/// classes echo their original values.
pub fn baseline_palette(
    bindings: &[MaskBinding],
    seed: u64,
    variant_index: u32,
    temperature: f64,
) -> PredictionSet {
    let transform = PaletteTransform::derive(seed, variant_index, temperature);
    let mut out = PredictionSet::default();
    for binding in bindings {
        let value = match binding.class() {
            MaskClass::Color => match binding.original.parse::<HexColor>() {
                Ok(color) => transform.apply(color).to_string(),
                Err(_) => binding.original.clone(),
            },
            _ => binding.original.clone(),
        };
        out.insert(binding.name().to_string(), value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binding(token: &str, original: &str) -> MaskBinding {
        MaskBinding {
            token: format!("<{token}>"),
            original: original.to_string(),
            sites: vec![0],
        }
    }

    #[test]
    fn identity_transform_echoes_all_colors() {
        let t = PaletteTransform::identity();
        for hex in ["#000000", "#ffffff", "#bd521d", "#400e05"] {
            let c: HexColor = hex.parse().unwrap();
            assert_eq!(t.apply(c), c);
        }
    }

    #[test]
    fn black_is_fixed_under_pure_rotation() {
        let t = PaletteTransform {
            hue_rotation_deg: 120.0,
            lightness_shift: 0.0,
        };
        assert_eq!(t.apply(HexColor::BLACK).to_string(), "#000000");
        assert_eq!(t.apply(HexColor::Transparent), HexColor::Transparent);
    }

    #[test]
    fn temperature_zero_is_identity() {
        let t = PaletteTransform::derive(7, 3, 0.0);
        assert!(t.is_identity());
        let set = baseline_palette(&[binding("MASK_COLOR_0", "#bd521d")], 7, 3, 0.0);
        assert_eq!(set.get("MASK_COLOR_0"), Some("#bd521d"));
    }

    #[test]
    fn equal_inputs_map_to_equal_outputs() {
        let bindings = vec![
            binding("MASK_COLOR_0", "#bd521d"),
            binding("MASK_COLOR_1", "#bd521d"),
            binding("MASK_COLOR_2", "#400e04"),
        ];
        let set = baseline_palette(&bindings, 11, 0, 0.8);
        assert_eq!(set.get("MASK_COLOR_0"), set.get("MASK_COLOR_1"));
    }

    #[test]
    fn derive_is_deterministic_and_variant_sensitive() {
        assert_eq!(
            PaletteTransform::derive(7, 1, 0.8),
            PaletteTransform::derive(7, 1, 0.8)
        );
        assert_ne!(
            PaletteTransform::derive(7, 1, 0.8),
            PaletteTransform::derive(7, 2, 0.8)
        );
    }
}
