//! Deterministic geometry of range-based (TOA) and range-difference-based (TDOA)
//! localization with two or three receivers.
//!
//! Receivers are indexed from 0 in the API. Human-facing labels (`m1`, `r1+`,
//! `G312`, ...) use 1-based numbering.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod kummer;
pub mod params;
pub mod sim;
pub mod tdoa;
pub mod toa2;
pub mod toa3;
pub mod toa3d;
pub mod tol;

pub use error::{GeoError, Result};
pub use geometry::{
    hodge_cross, minkowski_inner, triple_form, ConfigClass, Dimension, SensorConfig, SolutionSet, SpacetimeVec3,
    SpacetimeVec4, Vec2, Vec3,
};
pub use tdoa::PseudorangePair;
pub use toa2::RangePair;
pub use toa3::RangeTriple;
