//! Color values and the color math used across the toolkit: normalized hex
//! colors, WCAG contrast ratios, CIELAB conversion and perceptual distance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CmlError;

/// A normalized color value: either `#rrggbb` (lowercase) or the literal
/// `transparent`.
///
/// Parsing accepts 3- or 6-digit hex in any case and normalizes to the
/// 6-digit lowercase form, so two `HexColor`s compare equal iff they denote
/// the same color.
///
/// ```
/// use cptkit::color::HexColor;
/// let c: HexColor = "#ABC".parse().unwrap();
/// assert_eq!(c.to_string(), "#aabbcc");
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum HexColor {
    Transparent,
    Rgb(u8, u8, u8),
}

impl HexColor {
    pub const WHITE: HexColor = HexColor::Rgb(0xff, 0xff, 0xff);
    pub const BLACK: HexColor = HexColor::Rgb(0, 0, 0);

    pub fn is_transparent(&self) -> bool {
        matches!(self, HexColor::Transparent)
    }

    /// RGB components in [0, 255]; `None` for `transparent`.
    pub fn rgb(&self) -> Option<(u8, u8, u8)> {
        match *self {
            HexColor::Transparent => None,
            HexColor::Rgb(r, g, b) => Some((r, g, b)),
        }
    }

    /// WCAG 2.1 relative luminance, 0.0 for black through 1.0 for white.
    /// `transparent` is treated as white (the canvas default).
    pub fn relative_luminance(&self) -> f64 {
        let (r, g, b) = self.rgb().unwrap_or((0xff, 0xff, 0xff));
        0.2126 * wcag_linearize(r) + 0.7152 * wcag_linearize(g) + 0.0722 * wcag_linearize(b)
    }

    /// CIELAB coordinates under D65. `transparent` maps to white.
    pub fn lab(&self) -> Lab {
        let (r, g, b) = self.rgb().unwrap_or((0xff, 0xff, 0xff));
        Lab::from_rgb(r, g, b)
    }
}

impl fmt::Display for HexColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            HexColor::Transparent => f.write_str("transparent"),
            HexColor::Rgb(r, g, b) => write!(f, "#{r:02x}{g:02x}{b:02x}"),
        }
    }
}

impl FromStr for HexColor {
    type Err = CmlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "transparent" {
            return Ok(HexColor::Transparent);
        }
        let digits = s.strip_prefix('#').ok_or_else(|| bad_color(s))?;
        let hex = |chunk: &str| u8::from_str_radix(chunk, 16).map_err(|_| bad_color(s));
        match digits.len() {
            3 => {
                let mut it = digits.chars();
                let mut next = || -> Result<u8, CmlError> {
                    let c = it.next().unwrap();
                    let v = hex(&c.to_string())?;
                    Ok(v * 17) // "a" -> 0xaa
                };
                Ok(HexColor::Rgb(next()?, next()?, next()?))
            }
            6 => Ok(HexColor::Rgb(
                hex(&digits[0..2])?,
                hex(&digits[2..4])?,
                hex(&digits[4..6])?,
            )),
            _ => Err(bad_color(s)),
        }
    }
}

impl TryFrom<String> for HexColor {
    type Error = CmlError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<HexColor> for String {
    fn from(c: HexColor) -> String {
        c.to_string()
    }
}

fn bad_color(s: &str) -> CmlError {
    CmlError::InvalidAttribute {
        tag: "color".into(),
        attr: "value".into(),
        value: s.into(),
        reason: "expected #rgb, #rrggbb or transparent".into(),
    }
}

/// WCAG 2.1 channel linearization (8-bit channel to linear light).
fn wcag_linearize(channel: u8) -> f64 {
    let c = channel as f64 / 255.0;
    if c <= 0.03928 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

/// WCAG 2.1 contrast ratio between two colors, in [1, 21].
///
/// Symmetric in its arguments; `contrast_ratio(c, c)` is exactly 1.0.
///
/// ```
/// use cptkit::color::{contrast_ratio, HexColor};
/// let ratio = contrast_ratio(HexColor::BLACK, HexColor::WHITE);
/// assert!((ratio - 21.0).abs() < 0.01);
/// ```
pub fn contrast_ratio(a: HexColor, b: HexColor) -> f64 {
    let la = a.relative_luminance();
    let lb = b.relative_luminance();
    let (lighter, darker) = if la > lb { (la, lb) } else { (lb, la) };
    (lighter + 0.05) / (darker + 0.05)
}

// D65 reference white.
const XN: f64 = 0.95047;
const YN: f64 = 1.0;
const ZN: f64 = 1.08883;

/// A point in CIELAB space (D65, 2 degree observer).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lab {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl Lab {
    pub fn from_rgb(r: u8, g: u8, b: u8) -> Lab {
        let rl = srgb_linearize(r);
        let gl = srgb_linearize(g);
        let bl = srgb_linearize(b);
        // sRGB -> XYZ (D65).
        let x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
        let y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
        let z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
        let fx = lab_f(x / XN);
        let fy = lab_f(y / YN);
        let fz = lab_f(z / ZN);
        Lab {
            l: 116.0 * fy - 16.0,
            a: 500.0 * (fx - fy),
            b: 200.0 * (fy - fz),
        }
    }

    /// Back to sRGB, clamping out-of-gamut channels.
    pub fn to_rgb(self) -> (u8, u8, u8) {
        let fy = (self.l + 16.0) / 116.0;
        let fx = fy + self.a / 500.0;
        let fz = fy - self.b / 200.0;
        let x = XN * lab_f_inv(fx);
        let y = YN * lab_f_inv(fy);
        let z = ZN * lab_f_inv(fz);
        let rl = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
        let gl = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
        let bl = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
        (srgb_delinearize(rl), srgb_delinearize(gl), srgb_delinearize(bl))
    }

    /// Euclidean distance (the CIE76 delta E).
    pub fn distance(self, other: Lab) -> f64 {
        let dl = self.l - other.l;
        let da = self.a - other.a;
        let db = self.b - other.b;
        (dl * dl + da * da + db * db).sqrt()
    }

    /// Chroma, the distance from the neutral axis.
    pub fn chroma(self) -> f64 {
        (self.a * self.a + self.b * self.b).sqrt()
    }

    /// Hue angle in degrees.
    pub fn hue_deg(self) -> f64 {
        self.b.atan2(self.a).to_degrees()
    }

    /// Rotate hue by `degrees` and shift lightness by `delta_l`, keeping
    /// chroma. Achromatic colors (zero chroma) are fixed points of a pure
    /// rotation.
    pub fn adjusted(self, degrees: f64, delta_l: f64) -> Lab {
        let c = self.chroma();
        let h = self.b.atan2(self.a) + degrees.to_radians();
        Lab {
            l: (self.l + delta_l).clamp(0.0, 100.0),
            a: c * h.cos(),
            b: c * h.sin(),
        }
    }
}

/// Perceptual distance between two colors (CIE76 in Lab). `transparent`
/// compares as white.
pub fn perceptual_distance(a: HexColor, b: HexColor) -> f64 {
    a.lab().distance(b.lab())
}

fn lab_f(t: f64) -> f64 {
    const EPS: f64 = 216.0 / 24389.0; // (6/29)^3
    const KAPPA: f64 = 24389.0 / 27.0;
    if t > EPS {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

fn lab_f_inv(f: f64) -> f64 {
    const EPS_CBRT: f64 = 6.0 / 29.0;
    if f > EPS_CBRT {
        f * f * f
    } else {
        3.0 * EPS_CBRT * EPS_CBRT * (f - 4.0 / 29.0)
    }
}

// sRGB (IEC 61966-2-1) transfer function; note the 0.04045 cutoff differs
// from the WCAG formula's 0.03928.
fn srgb_linearize(channel: u8) -> f64 {
    let c = channel as f64 / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn srgb_delinearize(linear: f64) -> u8 {
    let l = linear.clamp(0.0, 1.0);
    let c = if l <= 0.0031308 {
        l * 12.92
    } else {
        1.055 * l.powf(1.0 / 2.4) - 0.055
    };
    (c * 255.0).round() as u8
}
