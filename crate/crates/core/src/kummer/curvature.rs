use crate::error::{GeoError, Result};
use crate::geometry::{SensorConfig, Vec2};
use crate::tol;

/// Oriented areas `h1 = (x-m2)^(x-m3)`, `h2 = (x-m3)^(x-m1)`, `h3 = (x-m1)^(x-m2)`.
pub(crate) fn wedge_areas(m: &[Vec2; 3], x: Vec2) -> [f64; 3] {
    let d = [x - m[0], x - m[1], x - m[2]];
    [d[1].cross(d[2]), d[2].cross(d[0]), d[0].cross(d[1])]
}

pub(crate) fn curvature_raw(m: &[Vec2; 3], x: Vec2) -> f64 {
    let h = wedge_areas(m, x);
    let d2 = [x.dist(m[0]).powi(2), x.dist(m[1]).powi(2), x.dist(m[2]).powi(2)];
    let num = h[0] * h[1] * h[2] * (d2[0] * h[0] + d2[1] * h[1] + d2[2] * h[2]);
    let den = d2[0] * h[0] * h[0] + d2[1] * h[1] * h[1] + d2[2] * h[2] * h[2];
    num / (den * den)
}

/// Gaussian curvature of the range surface at the image of `x`.
///
/// Positive inside the receiver triangle, zero on the three receiver lines
/// and on the circumcircle, decaying like `d1(x)^-2` far away.
pub fn gaussian_curvature(config: &SensorConfig, x: Vec2) -> Result<f64> {
    let m = config.general_triangle()?;
    for (i, mi) in m.iter().enumerate() {
        if x.dist(*mi) <= tol::AT_RECEIVER * config.d_max() {
            return Err(GeoError::AtReceiver(i));
        }
    }
    Ok(curvature_raw(&m, x))
}

/// [`gaussian_curvature`] times `d_max^2`.
pub fn gaussian_curvature_normalized(config: &SensorConfig, x: Vec2) -> Result<f64> {
    Ok(gaussian_curvature(config, x)? * config.d_max().powi(2))
}
