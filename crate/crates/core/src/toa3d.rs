//! Range localization in space: circles of solutions for two receivers or a
//! collinear triple, mirrored pairs across the receiver plane for a triangle.

use crate::error::{GeoError, Result};
use crate::geometry::{dual_solve4, hodge_triple4, SensorConfig, SpacetimeVec4, Vec3};
use crate::kummer::KummerQuartic;
use crate::toa2::{classify_pair, pair_solve, Q2Verdict, RangePair};
use crate::toa3::{compatibility_residual, RangeTriple};
use crate::tol;

/// Fiber of a spatial localization query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolutionSet3D {
    Empty,
    One(Vec3),
    /// Mirror images across the receiver plane.
    Pair(Vec3, Vec3),
    /// Circle with unit `axis` normal to its plane and in-plane orthonormal `u`, `v`.
    Circle {
        center: Vec3,
        radius: f64,
        axis: Vec3,
        u: Vec3,
        v: Vec3,
    },
}

impl SolutionSet3D {
    /// The point at angle `theta` on a circle fiber.
    pub fn circle_point(&self, theta: f64) -> Option<Vec3> {
        match *self {
            SolutionSet3D::Circle { center, radius, u, v, .. } => {
                Some(center + (u * theta.cos() + v * theta.sin()) * radius)
            }
            _ => None,
        }
    }

    /// Discrete points of the fiber; circles are sampled at `n` equally spaced angles.
    pub fn sample(&self, n: usize) -> Vec<Vec3> {
        match *self {
            SolutionSet3D::Empty => vec![],
            SolutionSet3D::One(p) => vec![p],
            SolutionSet3D::Pair(p, q) => vec![p, q],
            SolutionSet3D::Circle { .. } => {
                (0..n).filter_map(|k| self.circle_point(std::f64::consts::TAU * k as f64 / n as f64)).collect()
            }
        }
    }

    /// Number of points, `None` for a circle.
    pub fn cardinality(&self) -> Option<usize> {
        match self {
            SolutionSet3D::Empty => Some(0),
            SolutionSet3D::One(_) => Some(1),
            SolutionSet3D::Pair(..) => Some(2),
            SolutionSet3D::Circle { .. } => None,
        }
    }

    /// Distance from `x` to the fiber.
    pub fn distance_to(&self, x: Vec3) -> f64 {
        match *self {
            SolutionSet3D::Circle { center, radius, axis, .. } => {
                let w = x - center;
                let h = w.dot(axis);
                let r = (w - axis * h).norm();
                (h * h + (r - radius).powi(2)).sqrt()
            }
            _ => self.sample(0).iter().map(|p| p.dist(x)).fold(f64::INFINITY, f64::min),
        }
    }
}

/// Receivers as points in space, for either dimension.
fn receivers3(config: &SensorConfig, n: usize) -> Result<Vec<Vec3>> {
    if config.len() != n {
        return Err(GeoError::ReceiverCount { expected: n, got: config.len() });
    }
    Ok(config.receivers().to_vec())
}

/// Distances from `x` to every receiver.
pub fn forward3d(config: &SensorConfig, x: Vec3) -> Result<Vec<f64>> {
    if config.dimension().as_usize() != 3 {
        return Err(GeoError::DimensionMismatch("operation needs a 3D configuration".into()));
    }
    Ok(config.receivers().iter().map(|m| m.dist(x)).collect())
}

pub fn forward3d_pair(config: &SensorConfig, x: Vec3) -> Result<RangePair> {
    let [m1, m2] = config.spatial_pair()?;
    Ok(RangePair::new(x.dist(m1), x.dist(m2)))
}

pub fn forward3d_triple(config: &SensorConfig, x: Vec3) -> Result<RangeTriple> {
    let [m1, m2, m3] = config.spatial_triple()?;
    Ok(RangeTriple::new(x.dist(m1), x.dist(m2), x.dist(m3)))
}

/// Unit vector orthogonal to `w`, from the coordinate axis least aligned with it.
fn orthogonal_unit(w: Vec3) -> Vec3 {
    let a = [w.x.abs(), w.y.abs(), w.z.abs()];
    let axis = if a[0] <= a[1] && a[0] <= a[2] {
        Vec3::new(1.0, 0.0, 0.0)
    } else if a[1] <= a[2] {
        Vec3::new(0.0, 1.0, 0.0)
    } else {
        Vec3::new(0.0, 0.0, 1.0)
    };
    (axis - w * axis.dot(w)).unit()
}

fn circle_about(m1: Vec3, m2: Vec3, t1: f64, t2: f64) -> SolutionSet3D {
    let d = m1.dist(m2);
    let axis = (m2 - m1) / d;
    match pair_solve(d, t1, t2) {
        (_, None) => SolutionSet3D::Empty,
        (_, Some((a, b))) => {
            let center = m1 + axis * a;
            if b == 0.0 {
                SolutionSet3D::One(center)
            } else {
                let u = orthogonal_unit(axis);
                let v = axis.cross(u);
                SolutionSet3D::Circle { center, radius: b, axis, u, v }
            }
        }
    }
}

/// Two receivers: a circle about the receiver line, one point on it, or nothing.
pub fn invert3d_r2(config: &SensorConfig, t: RangePair) -> Result<SolutionSet3D> {
    let m = receivers3(config, 2)?;
    Ok(circle_about(m[0], m[1], t.t1, t.t2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolidVerdict {
    /// Strictly inside: two mirrored sources.
    InteriorSolid,
    /// On the planar range surface: one source in the receiver plane.
    OnSurface,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility3DReport {
    pub quartic_raw: f64,
    /// Quartic divided by `d_max^6`; the solid is where it is `<= 0`.
    pub quartic: f64,
    /// Smallest residual of the nine triangular inequalities (`>= 0` when all hold).
    pub triangular_min: f64,
    pub verdict: SolidVerdict,
}

impl Feasibility3DReport {
    pub fn fiber(&self) -> usize {
        match self.verdict {
            SolidVerdict::InteriorSolid => 2,
            SolidVerdict::OnSurface => 1,
            SolidVerdict::Outside => 0,
        }
    }
}

fn triangle3(config: &SensorConfig) -> Result<[Vec3; 3]> {
    let m = receivers3(config, 3)?;
    if config.is_collinear() {
        return Err(GeoError::DegenerateConfig);
    }
    Ok([m[0], m[1], m[2]])
}

fn triangular_min(config: &SensorConfig, t: RangeTriple) -> f64 {
    let mut r = f64::INFINITY;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let d = config.d(i, j);
        r = r.min(d - (t[i] - t[j])).min(d - (t[j] - t[i])).min(t[i] + t[j] - d);
    }
    r
}

/// Membership in the image of the spatial map for a receiver triangle.
pub fn classify3d_r3(config: &SensorConfig, t: RangeTriple) -> Result<Feasibility3DReport> {
    let m = triangle3(config)?;
    let d_max = config.d_max();
    let raw = KummerQuartic::from_displacements(m[1] - m[0], m[2] - m[0]).eval(t);
    let quartic = raw / d_max.powi(6);
    let s = tol::scale(d_max, &t.to_array());
    let qtol = tol::QUARTIC * (s / d_max).powi(4);
    let tri = triangular_min(config, t);
    let verdict = if tri < -tol::FACET * s || quartic > qtol || !quartic.is_finite() {
        SolidVerdict::Outside
    } else if quartic >= -qtol {
        SolidVerdict::OnSurface
    } else {
        SolidVerdict::InteriorSolid
    };
    Ok(Feasibility3DReport { quartic_raw: raw, quartic, triangular_min: tri, verdict })
}

/// Mirrored sources across the receiver plane.
///
/// With `X = D1(l0)` the displacement from the lifted first receiver to the
/// foot `l0` in the receiver plane, `<X, D_j1> = |D_j1|^2 / 2` for `j = 2, 3`,
/// `<X, n> = 0` and `<X, e4> = T1`; then `|X + t v|^2 = 0` fixes the offset
/// `t` along the plane normal `v = *(D21 ^ D31 ^ e4)`.
pub fn invert3d_r3(config: &SensorConfig, t: RangeTriple) -> Result<SolutionSet3D> {
    let m = triangle3(config)?;
    let report = classify3d_r3(config, t)?;
    if report.verdict == SolidVerdict::Outside {
        return Err(GeoError::Infeasible("range triple outside the solid image".into()));
    }
    let e1 = (m[1] - m[0]).unit();
    let e2 = ((m[2] - m[0]) - e1 * (m[2] - m[0]).dot(e1)).unit();
    let n = e1.cross(e2);
    let d21 = SpacetimeVec4::from_spatial(m[1] - m[0], t.t2 - t.t1);
    let d31 = SpacetimeVec4::from_spatial(m[2] - m[0], t.t3 - t.t1);
    let x = dual_solve4(
        [d21, d31, SpacetimeVec4::from_spatial(n, 0.0), SpacetimeVec4::E4],
        [0.5 * d21.norm_sq(), 0.5 * d31.norm_sq(), 0.0, t.t1],
    )
    .ok_or(GeoError::DegenerateConfig)?;
    let foot = m[0] + x.spatial();
    if report.verdict == SolidVerdict::OnSurface {
        return Ok(SolutionSet3D::One(foot));
    }
    let v = hodge_triple4(d21, d31, SpacetimeVec4::E4).spatial().unit();
    let h2 = -x.norm_sq();
    if h2 <= 0.0 {
        return Ok(SolutionSet3D::One(foot));
    }
    let h = h2.sqrt();
    Ok(SolutionSet3D::Pair(foot + v * h, foot - v * h))
}

/// Collinear triple in space: the two-receiver circle on the outer receivers,
/// once the ranges pass the collinear compatibility test.
pub fn invert3d_r3_collinear(config: &SensorConfig, t: RangeTriple) -> Result<SolutionSet3D> {
    let (m, order) = config.canonical_receivers()?;
    let s = tol::scale(config.d_max(), &t.to_array()) / config.d_max();
    if (0..3).any(|i| t[i] < -tol::FACET * s * config.d_max()) {
        return Ok(SolutionSet3D::Empty);
    }
    if compatibility_residual(config, t)?.abs() > tol::QUADRIC * s * s {
        return Ok(SolutionSet3D::Empty);
    }
    let c = t.permuted(order);
    Ok(circle_about(m[0], m[1], c.t1, c.t2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian3DReport {
    /// Unit gradients of the ranges, one per receiver.
    pub rows: Vec<Vec3>,
    pub rank: usize,
}

/// Jacobian of the spatial range map and its thresholded rank.
pub fn jacobian3d(config: &SensorConfig, x: Vec3) -> Result<Jacobian3DReport> {
    if config.dimension().as_usize() != 3 {
        return Err(GeoError::DimensionMismatch("operation needs a 3D configuration".into()));
    }
    let mut rows = Vec::with_capacity(config.len());
    for (i, m) in config.receivers().iter().enumerate() {
        let d = x - *m;
        if d.norm() <= tol::AT_RECEIVER * config.d_max() {
            return Err(GeoError::AtReceiver(i));
        }
        rows.push(d.unit());
    }
    let mut best_pair: f64 = 0.0;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            best_pair = best_pair.max(rows[i].cross(rows[j]).norm());
        }
    }
    let triple = if rows.len() == 3 { rows[0].cross(rows[1]).dot(rows[2]).abs() } else { 0.0 };
    let rank = if triple > tol::RANK {
        3
    } else if best_pair > tol::RANK {
        2
    } else {
        1
    };
    Ok(Jacobian3DReport { rows, rank })
}

/// Q2 verdict of the two-receiver spatial problem.
pub fn classify3d_r2(config: &SensorConfig, t: RangePair) -> Result<Q2Verdict> {
    let m = receivers3(config, 2)?;
    Ok(classify_pair(m[0].dist(m[1]), t.t1, t.t2).verdict)
}
