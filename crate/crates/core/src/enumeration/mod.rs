//! Forbidden sets without a closed form.

pub mod cdv;
pub mod cobweb;
pub mod curves;
pub mod fastmap;
pub mod grid;
pub mod inverse;
pub mod realroots;
pub mod render;
pub mod words;

pub use cdv::{cdv_curves, cdv_equation, CdvCurveFamily};
pub use cobweb::{cobweb_fs, CobwebClass, CobwebFs, MonotonePoleMap, Phi, PoleMap};
pub use curves::{curve_csv, forbidden_curves, CurveFamily, CurveLayer, LayerCheck};
pub use grid::{grid_classify, Cell, GridClassification, GridSpec};
pub use inverse::{inverse_orbit, pole_seeds, InverseOrbitOptions, InverseOrbitTree, SeedSpec};
pub use realroots::real_roots;
pub use render::{grid_image, sidecar, svg_overlay, to_ppm, RasterSidecar, RgbImage};
pub use words::{symbolic_words, Branch, SymbolicWord, WordMode};
