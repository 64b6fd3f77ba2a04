//! Diagram representations and conversions between them.

pub mod gauss;
pub mod mosaic;
pub mod pd;

pub use gauss::{format_gauss, parse_gauss, pd_to_gauss, pd_to_gauss_all, GaussToken};
pub use mosaic::{Mosaic, MosaicReport, Side};
pub use pd::PlanarDiagram;
