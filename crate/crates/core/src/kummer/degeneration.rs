//! As the third receiver approaches the line through the other two, the
//! quartic degenerates to the square of the hyperboloid quadric.

use super::quartic::{KummerQuartic, COEFF_LENGTH_POWER};
use crate::error::Result;
use crate::geometry::{SensorConfig, Vec3};
use crate::toa3::RangeTriple;

/// Receivers in the labeling used for the comparison: canonical for collinear
/// triples, input order otherwise.
fn labeled(config: &SensorConfig) -> Result<([Vec3; 3], Option<[usize; 3]>)> {
    let m = config.planar_triple()?;
    match config.canonical_receivers() {
        Ok((c, order)) => Ok((c, Some(order))),
        Err(_) => Ok((m.map(|p| p.extend(0.0)), None)),
    }
}

/// Position of the projection of `m3` on the line `m1 m2`, as a fraction of `d21`.
fn projected_rho(m: &[Vec3; 3]) -> f64 {
    let (d21, d31) = (m[1] - m[0], m[2] - m[0]);
    d31.dot(d21) / d21.norm_sq()
}

/// Coefficients of `d21^2 q^2`, where `q = (1-rho) X1 + rho X2 - X3 - rho (1-rho) d21^2`.
pub fn squared_quadric_coeffs(d21: f64, rho: f64) -> [f64; 10] {
    let (a, b) = (1.0 - rho, rho);
    let k = -rho * (1.0 - rho) * d21 * d21;
    let d2 = d21 * d21;
    [
        a * a * d2,
        b * b * d2,
        d2,
        2.0 * a * b * d2,
        -2.0 * a * d2,
        -2.0 * b * d2,
        2.0 * a * k * d2,
        2.0 * b * k * d2,
        -2.0 * k * d2,
        k * k * d2,
    ]
}

fn sample() -> Vec<RangeTriple> {
    let g = [0.0, 0.3, 0.8, 1.5, 2.4];
    let mut out = Vec::with_capacity(125);
    for a in g {
        for b in g {
            for c in g {
                out.push(RangeTriple::new(a, b, c));
            }
        }
    }
    out
}

/// Largest coefficient difference between the quartic and `d21^2 q^2`, each
/// coefficient scaled by the matching power of `d_max`.
pub fn degeneration_coeff_gap(config: &SensorConfig) -> Result<f64> {
    let (m, _) = labeled(config)?;
    let quartic = KummerQuartic::from_displacements(m[1] - m[0], m[2] - m[0]);
    let sq = squared_quadric_coeffs(m[0].dist(m[1]), projected_rho(&m));
    let d_max = config.d_max();
    Ok((0..10).map(|k| (quartic.coeffs[k] - sq[k]).abs() / d_max.powi(COEFF_LENGTH_POWER[k])).fold(0.0, f64::max))
}

/// Max over a fixed sample of `T` (in units of `d_max`) of
/// `|quartic - d21^2 q^2| / d_max^6`.
pub fn collinear_degeneration_check(config: &SensorConfig) -> Result<f64> {
    let (m, _) = labeled(config)?;
    let quartic = KummerQuartic::from_displacements(m[1] - m[0], m[2] - m[0]);
    let sq = KummerQuartic { coeffs: squared_quadric_coeffs(m[0].dist(m[1]), projected_rho(&m)) };
    let d_max = config.d_max();
    Ok(sample()
        .into_iter()
        .map(|t| {
            let t = RangeTriple::new(t.t1 * d_max, t.t2 * d_max, t.t3 * d_max);
            (quartic.eval(t) - sq.eval(t)).abs() / d_max.powi(6)
        })
        .fold(0.0, f64::max))
}
