//! Small-dimension Euclidean and Minkowski algebra plus receiver configurations.

mod config;
mod minkowski;
mod vector;

pub use config::{collinearity_measure, ConfigClass, Dimension, SensorConfig};
pub use minkowski::{
    dual_solve4, hodge_cross, hodge_triple4, minkowski_inner, minkowski_inner4, quad_form4, triple_form, SpacetimeVec3,
    SpacetimeVec4,
};
pub use vector::{Vec2, Vec3};

/// Fiber of a planar localization query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolutionSet {
    Empty,
    One(Vec2),
    Two(Vec2, Vec2),
}

impl SolutionSet {
    pub fn points(&self) -> Vec<Vec2> {
        match *self {
            SolutionSet::Empty => vec![],
            SolutionSet::One(p) => vec![p],
            SolutionSet::Two(p, q) => vec![p, q],
        }
    }

    pub fn len(&self) -> usize {
        self.points().len()
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, SolutionSet::Empty)
    }

    /// Distance from `x` to the nearest returned point.
    pub fn distance_to(&self, x: Vec2) -> f64 {
        self.points().iter().map(|p| p.dist(x)).fold(f64::INFINITY, f64::min)
    }
}
