//! Charts, scalar fields, differential forms, vector fields, and smooth maps.

pub mod chart;
pub mod field;
pub mod form;
pub mod map;

pub use chart::Chart;
pub use field::ScalarField;
pub use form::{increasing_indices, KForm, VectorField};
pub use map::SmoothMap;
