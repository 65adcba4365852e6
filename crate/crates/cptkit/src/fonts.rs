//! The built-in font catalog: a small set of open fonts organized into
//! substitution groups. A group collects fonts that can stand in for each
//! other (body sans for body sans, script for script), which keeps the
//! deterministic font baseline from pairing a display face with body copy.

/// Substitution groups; each inner slice is interchangeable.
pub const FONT_GROUPS: &[&[&str]] = &[
    &[
        "Allura-Regular",
        "Satisfy-Regular",
        "MeowScript-Regular",
        "GreatVibes-Regular",
        "Pacifico-Regular",
    ],
    &[
        "Muli-Regular",
        "NotoSans-Regular",
        "OpenSans-Regular",
        "Poppins-Regular",
        "Lato-Regular",
    ],
    &[
        "Muli-Bold",
        "NotoSans-Bold",
        "OpenSans-Bold",
        "Poppins-Black",
        "Rubik-SemiBold",
    ],
    &[
        "Novecentosansnarrow-Bold",
        "Oswald-Regular",
        "BebasNeue-Regular",
        "Anton-Regular",
    ],
    &[
        "PlayfairDisplay-Regular",
        "Merriweather-Regular",
        "Lora-Regular",
        "CrimsonText-Regular",
    ],
    &["Rubik-Italic", "Poppins-Italic", "OpenSans-Italic"],
];

/// Index of the group containing `font`, if it is in the catalog.
pub fn group_of(font: &str) -> Option<usize> {
    FONT_GROUPS.iter().position(|g| g.contains(&font))
}

pub fn is_known(font: &str) -> bool {
    group_of(font).is_some()
}

/// Every catalog font.
pub fn known_fonts() -> impl Iterator<Item = &'static str> {
    FONT_GROUPS.iter().flat_map(|g| g.iter().copied())
}

/// Rotate `steps` positions within the font's group; `None` when the font
/// is not in the catalog.
pub fn substitute(font: &str, steps: u32) -> Option<&'static str> {
    let group = FONT_GROUPS[group_of(font)?];
    let pos = group.iter().position(|f| *f == font).unwrap();
    Some(group[(pos + steps as usize) % group.len()])
}
