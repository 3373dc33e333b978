//! Exact verification of the non-Archimedean Basmajian identity for
//! projective Anosov representations over valued fields.

pub mod berkovich;
pub mod error;
pub mod field;
pub mod identity;
pub mod linalg;
pub mod par;
pub mod presets;
pub mod words;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldModel, ModelKind, Valuation};
