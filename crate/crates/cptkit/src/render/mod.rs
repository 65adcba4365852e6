//! Deterministic rendering: font metrics, text layout and SVG output.

pub mod geom;
mod layout;
mod metrics;
mod svg;

#[cfg(feature = "raster")]
pub mod raster;

pub use layout::{layout_text, stack_height, LineBox};
pub use metrics::{FontMetrics, GlyphMetrics};
pub use svg::{render_page, render_svg, RenderOptions};

use crate::cml::Page;

/// Painting order of a page's elements: ascending z-index with document
/// order breaking ties (a stable sort).
pub fn paint_order(page: &Page) -> Vec<usize> {
    let mut order: Vec<usize> = (0..page.elements.len()).collect();
    order.sort_by_key(|&i| page.elements[i].bounds().z());
    order
}
