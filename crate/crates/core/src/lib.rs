//! Desk-scale implementation of a mesh generation pipeline: watertight
//! conversion through unsigned distance fields, occupancy sampling, a
//! render-enhanced point-to-triplane occupancy auto-encoder trained
//! coarse-to-fine, rectified-flow scheduling, a software rasterizer,
//! multi-view texture fusion in UV space, and the evaluation metrics used
//! throughout.
//!
//! Modules map one-to-one onto the pipeline stages; the `meshforge` CLI in
//! the sibling crate wires them together behind reproducible configs.

pub mod error;
pub mod fixtures;
pub mod flow;
pub mod geom;
pub mod math;
pub mod metrics;
pub mod occupancy;
pub mod renderer;
pub mod rng;
pub mod shapevae;
pub mod tensor;
pub mod texture;
pub mod watertight;

pub use error::Error;
pub use math::Vec3;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
