//! Shape parameters `(a, b, c)` of the range surface, the cubic constraint
//! relating them and reconstruction of the receiver triangle.

use crate::error::{GeoError, Result};
use crate::geometry::{SensorConfig, Vec2};
use crate::kummer::KummerCoeffs;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    /// cosine of the angle at `m3`
    pub a: f64,
    /// cosine of the angle at `m1`
    pub c: f64,
    /// length of the side `m1 m2`
    pub scale: f64,
}

impl ParamPoint {
    pub fn new(a: f64, c: f64, scale: f64) -> Self {
        ParamPoint { a, c, scale }
    }

    pub fn validate(&self) -> Result<()> {
        let ParamPoint { a, c, scale } = *self;
        if !(a.is_finite() && c.is_finite() && scale.is_finite()) {
            return Err(GeoError::InvalidParam("non-finite parameter".into()));
        }
        if a.abs() >= 1.0 {
            return Err(GeoError::InvalidParam(format!("a = {a} must lie in (-1, 1)")));
        }
        if c.abs() >= 1.0 {
            return Err(GeoError::InvalidParam(format!("c = {c} must lie in (-1, 1)")));
        }
        if a + c <= 0.0 {
            return Err(GeoError::InvalidParam(format!("a + c = {} must be positive", a + c)));
        }
        if scale <= 0.0 {
            return Err(GeoError::InvalidParam(format!("scale = {scale} must be positive")));
        }
        Ok(())
    }

    /// `b = cos(alpha + gamma)`.
    pub fn b(&self) -> f64 {
        self.a * self.c - ((1.0 - self.a * self.a) * (1.0 - self.c * self.c)).sqrt()
    }
}

pub fn abc_from_config(config: &SensorConfig) -> Result<(f64, f64, f64)> {
    let k = KummerCoeffs::from_points(&config.general_triangle()?);
    Ok((k.a, k.b, k.c))
}

/// `2abc - a^2 - b^2 - c^2 + 1`.
pub fn cayley_residual(a: f64, b: f64, c: f64) -> f64 {
    2.0 * a * b * c - a * a - b * b - c * c + 1.0
}

/// Triangle with `m1 = (0,0)`, `m2 = (scale, 0)` and `m3` in the upper half-plane.
pub fn triangle_from_param(p: ParamPoint) -> Result<[Vec2; 3]> {
    p.validate()?;
    let (alpha, gamma) = (p.a.acos(), p.c.acos());
    let d31 = p.scale * (alpha + gamma).sin() / alpha.sin();
    Ok([Vec2::new(0.0, 0.0), Vec2::new(p.scale, 0.0), Vec2::new(d31 * gamma.cos(), d31 * gamma.sin())])
}

pub fn config_from_param(p: ParamPoint) -> Result<SensorConfig> {
    let m = triangle_from_param(p)?;
    let config = SensorConfig::planar(&m)?;
    if config.is_collinear() {
        return Err(GeoError::InvalidParam("parameters describe collinear receivers".into()));
    }
    Ok(config)
}
