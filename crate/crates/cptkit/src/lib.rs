//! Generate editable variations of design templates.
//!
//! A design lives in a compact markup (CML). The toolkit masks chosen style
//! attributes with placeholder tokens, obtains values for the masked slots
//! from a predictor (deterministic baselines or a remote completion
//! endpoint), infills them back through a structured diff-and-apply step,
//! renders the results to SVG, and scores them with layout/contrast
//! heuristics plus an optional remote vision judge.
//!
//! The pipeline in one pass:
//!
//! ```
//! use cptkit::cml::{parse_cml, serialize_cml};
//!
//! let doc = parse_cml(r#"<cml v="3" numberPages="1">
//!     <page width="100" height="100" format="card" layoutID="demo" />
//! </cml>"#).unwrap();
//! assert_eq!(doc.pages.len(), 1);
//! let text = serialize_cml(&doc);
//! assert_eq!(parse_cml(&text).unwrap(), doc);
//! ```

pub mod cml;
pub mod color;
pub mod error;
pub mod fonts;
pub mod heuristics;
pub mod infill;
pub mod mask;
pub mod pipeline;
pub mod predict;
pub mod render;
pub mod scorer;

pub use cml::{parse_cml, serialize_cml, validate, CmlDocument};
pub use color::HexColor;
