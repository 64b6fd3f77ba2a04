//! Exact computational toolkit for quantized knot diagrams.

pub mod bracket;
pub mod codecs;
pub mod error;
pub mod gaussmoves;
pub mod instances;
pub mod khovanov;
pub mod laurent;
pub mod linalg;
pub mod mosaic;
pub mod quantum;

pub use error::{Error, Result};
pub use laurent::{Laurent, Var};
pub use codecs::{GaussToken, Mosaic, PlanarDiagram};
