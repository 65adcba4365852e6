//! Approximate font metrics for deterministic text measurement.
//!
//! Real font files are not available to the toolkit, so line boxes are
//! estimated from an average glyph advance plus tight ink extents per
//! font. Fonts missing from the table fall back to a 0.5 em advance with
//! a full em box. Spaces advance half a glyph.

use std::collections::BTreeMap;
use std::sync::OnceLock;

/// Per-font measurement constants, all in em units (multiples of the
/// rendered font size).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlyphMetrics {
    /// Average horizontal advance of a non-space glyph.
    pub advance: f64,
    /// Ink extent above the line top used for box height.
    pub ascent: f64,
    /// Ink extent below the ascent.
    pub descent: f64,
}

impl GlyphMetrics {
    pub const DEFAULT: GlyphMetrics = GlyphMetrics {
        advance: 0.5,
        ascent: 0.75,
        descent: 0.25,
    };

    /// Height of the ink box as a fraction of the font size.
    pub fn ink_height(&self) -> f64 {
        self.ascent + self.descent
    }
}

/// Lookup table from canonical font name to metrics.
#[derive(Debug, Clone, Default)]
pub struct FontMetrics {
    table: BTreeMap<String, GlyphMetrics>,
}

impl FontMetrics {
    /// The shipped table covering the built-in font catalog. Script faces
    /// run narrow; condensed faces narrower than body sans.
    pub fn builtin() -> &'static FontMetrics {
        static BUILTIN: OnceLock<FontMetrics> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            let mut m = FontMetrics::default();
            let entries: &[(&str, f64, f64, f64)] = &[
                ("Muli-Regular", 0.46, 0.72, 0.20),
                ("Muli-Bold", 0.48, 0.72, 0.20),
                ("Allura-Regular", 0.38, 0.62, 0.22),
                ("GreatVibes-Regular", 0.37, 0.62, 0.24),
                ("MeowScript-Regular", 0.40, 0.65, 0.25),
                ("Pacifico-Regular", 0.44, 0.70, 0.26),
                ("Satisfy-Regular", 0.38, 0.64, 0.26),
                ("NotoSans-Regular", 0.50, 0.73, 0.22),
                ("NotoSans-Bold", 0.52, 0.73, 0.22),
                ("OpenSans-Regular", 0.50, 0.74, 0.21),
                ("OpenSans-Bold", 0.52, 0.74, 0.21),
                ("OpenSans-Italic", 0.49, 0.74, 0.21),
                ("Poppins-Regular", 0.52, 0.74, 0.21),
                ("Poppins-Black", 0.56, 0.74, 0.21),
                ("Poppins-Italic", 0.51, 0.74, 0.21),
                ("Lato-Regular", 0.49, 0.72, 0.21),
                ("Rubik-SemiBold", 0.50, 0.73, 0.20),
                ("Rubik-Italic", 0.48, 0.73, 0.20),
                ("Novecentosansnarrow-Bold", 0.42, 0.70, 0.18),
                ("Oswald-Regular", 0.41, 0.73, 0.19),
                ("BebasNeue-Regular", 0.38, 0.74, 0.16),
                ("Anton-Regular", 0.44, 0.74, 0.18),
                ("PlayfairDisplay-Regular", 0.49, 0.72, 0.22),
                ("Merriweather-Regular", 0.52, 0.72, 0.22),
                ("Lora-Regular", 0.50, 0.72, 0.22),
                ("CrimsonText-Regular", 0.46, 0.70, 0.23),
            ];
            for &(name, advance, ascent, descent) in entries {
                m.table.insert(
                    name.to_string(),
                    GlyphMetrics {
                        advance,
                        ascent,
                        descent,
                    },
                );
            }
            m
        })
    }

    pub fn with_entry(mut self, font: impl Into<String>, metrics: GlyphMetrics) -> FontMetrics {
        self.table.insert(font.into(), metrics);
        self
    }

    /// Metrics for a font, falling back to the defaults.
    pub fn lookup(&self, font: Option<&str>) -> GlyphMetrics {
        font.and_then(|f| self.table.get(f).copied())
            .unwrap_or(GlyphMetrics::DEFAULT)
    }

    /// Width of `text` at `font_size`, in pixels. Spaces advance half a
    /// glyph; everything else advances the font's average.
    pub fn measure(&self, text: &str, font: Option<&str>, font_size: f64) -> f64 {
        let m = self.lookup(font);
        let mut width = 0.0;
        for c in text.chars() {
            width += if c == ' ' { m.advance / 2.0 } else { m.advance };
        }
        width * font_size
    }
}
