//! BEV traffic-scene pipeline: rasterize abstract scenes into low-resolution
//! occupancy-grid videos, extract trajectories back out via per-frame
//! detection and frame-to-frame matching, and compare corpus statistics.

pub mod assign;
pub mod color;
pub mod detect;
pub mod geom;
pub mod num;
pub mod raster;
pub mod scene;
pub mod stats;

pub use color::{ColorRgb, Hsv};
pub use num::Real;

/// Concrete `f64` aliases for the scalar-generic core types.
pub type Vec2 = geom::Vec2<f64>;
pub type Pose2D = geom::Pose2D<f64>;
pub type OrientedBox = geom::OrientedBox<f64>;
pub type RasterConfig = geom::RasterConfig<f64>;
pub type Histogram = stats::Histogram<f64>;
pub type CostMatrix = assign::CostMatrix<f64>;
