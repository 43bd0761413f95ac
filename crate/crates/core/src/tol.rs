//! Tolerance policy. Every threshold is relative to a length scale, usually
//! `d_max`, the largest receiver separation.

/// Collinearity: twice the triangle area over the product of the two longest sides.
pub const COLLINEAR: f64 = 1e-9;
/// Receivers closer than this fraction of `d_max` are duplicates.
pub const DUPLICATE: f64 = 1e-9;
/// Linear inequality residuals (Q2, Q3, P2 facets) count as equalities below this fraction of the scale.
pub const FACET: f64 = 1e-9;
/// Forward substitution check used by the inverse maps.
pub const SUBSTITUTION: f64 = 1e-9;
/// Quartic residual normalized by `d_max^6`.
pub const QUARTIC: f64 = 1e-10;
/// Quadric (collinear compatibility) residual normalized by `d_max^2`.
pub const QUADRIC: f64 = 1e-10;
/// Distance from a receiver below which a point counts as sitting on it.
pub const AT_RECEIVER: f64 = 1e-9;
/// Sine threshold for Jacobian rank decisions.
pub const RANK: f64 = 1e-9;
/// Normalized discriminant below which a quadratic has a double root.
pub const DOUBLE_ROOT: f64 = 1e-10;

/// Scale used for verdicts on measured values: the larger of `d_max` and the
/// largest magnitude among the measurements.
pub fn scale(d_max: f64, values: &[f64]) -> f64 {
    values.iter().fold(d_max, |s, v| s.max(v.abs()))
}
