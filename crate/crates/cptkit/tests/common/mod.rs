//! Shared test support: a canned-response HTTP stub and a seeded random
//! document generator.

#![allow(dead_code)]

pub mod http_stub;

use cptkit::cml::{
    Alignment, Background, Bounds, Brand, CmlDocument, ColorGrid, Element, Image, ImageStyle,
    LayoutMode, Page, Paragraph, Shape, ShapeStyle, Text, TextStyle,
};
use cptkit::HexColor;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small pool so duplicate values (and therefore shared mask ids) occur
/// often in generated documents.
const COLOR_POOL: &[&str] = &[
    "#fff6eb", "#782010", "#008045", "#a8493f", "#8a362c", "#e0e0e0", "#bd521d", "#400e04",
];
const FONT_POOL: &[&str] = &[
    "Muli-Regular",
    "Muli-Bold",
    "Allura-Regular",
    "NotoSans-Regular",
    "Poppins-Regular",
];
const WORD_POOL: &[&str] = &[
    "Join", "us", "for", "the", "annual", "harvest", "party", "tonight", "Bring", "a", "dish",
];

pub fn color(rng: &mut ChaCha8Rng) -> HexColor {
    COLOR_POOL[rng.random_range(0..COLOR_POOL.len())].parse().unwrap()
}

fn words(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n)
        .map(|_| WORD_POOL[rng.random_range(0..WORD_POOL.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

fn bounds(rng: &mut ChaCha8Rng, canvas: f64) -> Bounds {
    Bounds {
        top: rng.random_range(-100..(canvas as i64)) as f64,
        left: rng.random_range(-100..(canvas as i64)) as f64,
        width: rng.random_range(1..(canvas as i64)) as f64,
        height: rng.random_range(1..(canvas as i64)) as f64,
        rotation: Some([0.0, 0.0, 0.0, 45.0, 90.0][rng.random_range(0..5)]),
        z_index: Some(rng.random_range(0..30)),
        extras: vec![],
    }
}

fn text_style(rng: &mut ChaCha8Rng) -> TextStyle {
    TextStyle {
        leading: Some([1.0, 1.2, 1.5][rng.random_range(0..3)]),
        color: Some(color(rng)),
        font: Some(FONT_POOL[rng.random_range(0..FONT_POOL.len())].to_string()),
        size: Some(rng.random_range(10..200) as f64),
        tracking: Some(0.0),
        opacity: Some(1.0),
        underline: Some(false),
        font_size: Some(rng.random_range(10..200) as f64),
        extras: vec![],
    }
}

/// A random valid single-page document with mixed element kinds.
pub fn random_document(rng: &mut ChaCha8Rng) -> CmlDocument {
    let canvas = 1000.0;
    let mut elements: Vec<Element> = Vec::new();
    let mut next_id = 0;
    let mut id = || {
        next_id += 1;
        (next_id - 1).to_string()
    };

    elements.push(Element::Background(Background {
        kind: "color".into(),
        id: id(),
        entity_id: Some(format!("bg-{}", rng.random_range(0..u32::MAX))),
        bounds: Bounds {
            top: 0.0,
            left: 0.0,
            width: canvas,
            height: canvas,
            rotation: Some(0.0),
            z_index: Some(0),
            extras: vec![],
        },
        color: color(rng),
        style_extras: vec![],
        extras: vec![],
    }));

    let n = rng.random_range(1..6);
    for k in 0..n {
        let eid = Some(format!("e{k}-{}", rng.random_range(0..u32::MAX)));
        match rng.random_range(0..3) {
            0 => {
                let paragraphs = (0..rng.random_range(1..3))
                    .map(|_| {
                        let n_words = rng.random_range(1..6);
                        Paragraph {
                            content: words(rng, n_words),
                            style: text_style(rng),
                        }
                    })
                    .collect();
                elements.push(Element::Text(Text {
                    id: id(),
                    entity_id: eid,
                    bounds: bounds(rng, canvas),
                    alignment: Some([Alignment::Left, Alignment::Center, Alignment::Right][rng.random_range(0..3)]),
                    layout: Some([LayoutMode::Dynamic, LayoutMode::AutoWidth, LayoutMode::AutoHeight][rng.random_range(0..3)]),
                    style_extras: vec![],
                    paragraphs,
                    extras: vec![],
                }));
            }
            1 => {
                let mut cells = [HexColor::WHITE; 9];
                for cell in cells.iter_mut() {
                    *cell = color(rng);
                }
                elements.push(Element::Image(Image {
                    id: id(),
                    entity_id: eid,
                    source_type: Some("designAsset".into()),
                    source_id: Some(rng.random_range(0..999999999).to_string()),
                    bounds: bounds(rng, canvas),
                    content: Some(words(rng, 3)),
                    style: ImageStyle {
                        blend_mode: Some("normal".into()),
                        has_alpha: Some(rng.random_range(0..2) == 0),
                        extras: vec![],
                    },
                    color_grid: ColorGrid(cells),
                    effect: None,
                    extras: vec![],
                }));
            }
            _ => {
                elements.push(Element::Shape(Shape {
                    id: id(),
                    shape_type: "Rectangle".into(),
                    entity_id: eid,
                    source_type: None,
                    source_id: None,
                    geometry: None,
                    bounds: bounds(rng, canvas),
                    content: None,
                    search: None,
                    style: ShapeStyle {
                        opacity: Some(1.0),
                        fill: Some(color(rng)),
                        stroke_color: Some(color(rng)),
                        stroke_position: Some("center".into()),
                        stroke_width: Some(rng.random_range(0..12) as f64),
                        stroke_miter: None,
                        stroke_dash: Some("solid".into()),
                        extras: vec![],
                    },
                    extras: vec![],
                }));
            }
        }
    }

    let brand = if rng.random_range(0..2) == 0 {
        Some(Brand {
            colors: (0..3).map(|_| color(rng)).collect(),
            fonts: vec!["Muli-Regular".into(), "Allura-Regular".into()],
        })
    } else {
        None
    };

    CmlDocument {
        version: 3,
        number_pages: 1,
        pages: vec![Page {
            width: canvas,
            height: canvas,
            format: "test".into(),
            layout_id: "unknown".into(),
            brand,
            elements,
            extras: vec![],
        }],
        extras: vec![],
    }
}
