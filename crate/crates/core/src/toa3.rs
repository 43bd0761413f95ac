//! Three receivers in the plane: forward map, Jacobian rank, the lifted
//! intersection point and closed-form inversion for general and collinear
//! configurations.

use std::ops::Index;

use crate::error::{GeoError, Result};
use crate::geometry::{hodge_cross, triple_form, SensorConfig, SolutionSet, SpacetimeVec3, Vec2};
use crate::kummer::{q3_membership, quartic_raw, Q3Report, Q3Verdict};
use crate::toa2::{classify_pair, invert_on_baseline, Q2Verdict};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RangeTriple {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl RangeTriple {
    pub const fn new(t1: f64, t2: f64, t3: f64) -> Self {
        RangeTriple { t1, t2, t3 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        RangeTriple::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.t1, self.t2, self.t3]
    }

    pub fn max_abs(self) -> f64 {
        self.t1.abs().max(self.t2.abs()).max(self.t3.abs())
    }

    /// Reorders components: `out[k] = self[order[k]]`.
    pub fn permuted(self, order: [usize; 3]) -> Self {
        RangeTriple::from_array(order.map(|i| self[i]))
    }

    /// Inverse of [`RangeTriple::permuted`].
    pub fn unpermuted(self, order: [usize; 3]) -> Self {
        let mut a = [0.0; 3];
        for k in 0..3 {
            a[order[k]] = self[k];
        }
        RangeTriple::from_array(a)
    }
}

impl Index<usize> for RangeTriple {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.t1,
            1 => &self.t2,
            2 => &self.t3,
            _ => panic!("range index {i} out of bounds"),
        }
    }
}

pub(crate) fn ranges(m: &[Vec2; 3], x: Vec2) -> RangeTriple {
    RangeTriple::new(x.dist(m[0]), x.dist(m[1]), x.dist(m[2]))
}

pub fn forward3(config: &SensorConfig, x: Vec2) -> Result<RangeTriple> {
    Ok(ranges(&config.planar_triple()?, x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianReport {
    /// Gradients of the three distance functions (unit vectors).
    pub rows: [Vec2; 3],
    pub rank: usize,
    pub degenerate: bool,
}

impl JacobianReport {
    /// Largest `|det|` among pairs of rows, the sine of the widest crossing angle.
    pub fn max_minor(&self) -> f64 {
        let r = self.rows;
        r[0].cross(r[1]).abs().max(r[0].cross(r[2]).abs()).max(r[1].cross(r[2]).abs())
    }
}

pub fn jacobian3(config: &SensorConfig, x: Vec2) -> Result<JacobianReport> {
    let m = config.planar_triple()?;
    let mut rows = [Vec2::ZERO; 3];
    for i in 0..3 {
        let d = x - m[i];
        let r = d.norm();
        if r <= tol::AT_RECEIVER * config.d_max() {
            return Err(GeoError::AtReceiver(i));
        }
        rows[i] = d / r;
    }
    let mut report = JacobianReport { rows, rank: 2, degenerate: false };
    if report.max_minor() <= tol::RANK {
        report.rank = 1;
        report.degenerate = true;
    }
    Ok(report)
}

fn others(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        2 => (0, 1),
        _ => panic!("receiver index {i} out of range"),
    }
}

fn lift_point(m: &[Vec2; 3], t: RangeTriple, i: usize) -> SpacetimeVec3 {
    let (j, k) = others(i);
    let dji = m[j] - m[i];
    let dki = m[k] - m[i];
    let alpha = dji.norm_sq() + (t[i] - t[j]) * (t[i] + t[j]);
    let beta = dki.norm_sq() + (t[i] - t[k]) * (t[i] + t[k]);
    let w = dki * alpha - dji * beta;
    let e3 = SpacetimeVec3::E3;
    let num = hodge_cross(SpacetimeVec3::from_spatial(w, 0.0), e3);
    let den = 2.0 * triple_form(SpacetimeVec3::from_spatial(dji, 0.0), SpacetimeVec3::from_spatial(dki, 0.0), e3);
    num * (1.0 / den) - e3 * t[i]
}

/// `D_i(L(T))`: displacement from the lifted receiver `M_i = (m_i, T_i)` to the
/// point `L(T)` where the three planes `L_ji`, `L_ki` and the space plane meet.
/// Its time component is `-T_i`.
pub fn exterior_point(config: &SensorConfig, t: RangeTriple, i: usize) -> Result<SpacetimeVec3> {
    let m = config.general_triangle()?;
    if i > 2 {
        return Err(GeoError::ReceiverCount { expected: 3, got: i + 1 });
    }
    Ok(lift_point(&m, t, i))
}

/// Spatial location of `L(T)` computed with reference receiver `i`.
pub fn exterior_location(config: &SensorConfig, t: RangeTriple, i: usize) -> Result<Vec2> {
    let d = exterior_point(config, t, i)?;
    Ok(config.receiver(i).xy() + d.spatial())
}

/// Condition number of the 2x2 matrix with rows `d_ji`, `d_ki`.
fn reference_condition(m: &[Vec2; 3], i: usize) -> f64 {
    let (j, k) = others(i);
    let (a, b) = (m[j] - m[i], m[k] - m[i]);
    let f = a.norm_sq() + b.norm_sq();
    let det = a.cross(b).abs();
    let smax2 = 0.5 * (f + (f * f - 4.0 * det * det).max(0.0).sqrt());
    smax2 / det
}

/// Reference receiver with the best conditioned linear system.
pub fn best_reference(config: &SensorConfig) -> Result<usize> {
    let m = config.general_triangle()?;
    Ok(pick_reference(&m))
}

fn pick_reference(m: &[Vec2; 3]) -> usize {
    let c = [0, 1, 2].map(|i| reference_condition(m, i));
    let mut best = 0;
    for i in 1..3 {
        if c[i] < c[best] {
            best = i;
        }
    }
    best
}

fn substitution_ok(m: &[Vec2; 3], d_max: f64, t: RangeTriple, x: Vec2) -> bool {
    let back = ranges(m, x);
    let err = (0..3).map(|i| (back[i] - t[i]).abs()).fold(0.0, f64::max);
    err <= tol::SUBSTITUTION * tol::scale(d_max, &t.to_array())
}

fn in_octant(t: RangeTriple, scale: f64) -> bool {
    (0..3).all(|i| t[i] >= -tol::FACET * scale)
}

/// Unique preimage of `T` for a non-collinear triple, verified by forward substitution.
pub fn invert3(config: &SensorConfig, t: RangeTriple) -> Result<SolutionSet> {
    let m = config.general_triangle()?;
    let s = tol::scale(config.d_max(), &t.to_array());
    if !in_octant(t, s) {
        return Ok(SolutionSet::Empty);
    }
    let i = pick_reference(&m);
    let x = m[i] + lift_point(&m, t, i).spatial();
    if x.is_finite() && substitution_ok(&m, config.d_max(), t, x) {
        Ok(SolutionSet::One(x))
    } else {
        Ok(SolutionSet::Empty)
    }
}

/// Residual of the quadric relating the three ranges of a collinear triple,
/// `(1-rho) T1^2 + rho T2^2 - rho (1-rho) d21^2 - T3^2` in canonical labels,
/// divided by `d_max^2`. `T` is given in input order.
pub fn compatibility_residual(config: &SensorConfig, t: RangeTriple) -> Result<f64> {
    let (m, order) = config.canonical_receivers()?;
    let rho = config.rho().ok_or(GeoError::NotCollinear)?;
    let c = t.permuted(order);
    let d21 = m[0].dist(m[1]);
    let r = (1.0 - rho) * c.t1 * c.t1 + rho * c.t2 * c.t2 - rho * (1.0 - rho) * d21 * d21 - c.t3 * c.t3;
    Ok(r / (config.d_max() * config.d_max()))
}

fn compatibility_tolerance(config: &SensorConfig, t: RangeTriple) -> f64 {
    let s = tol::scale(config.d_max(), &t.to_array()) / config.d_max();
    tol::QUADRIC * s * s
}

/// Preimages for a collinear triple: mirrored across the receiver line, a
/// single point on the line, or none.
///
/// With `L0` the foot of the lifted solution line on the space plane,
/// `d21^2 lambda^2 + |D1(L0)|^2 = 0`, and `-|D1(L0)|^2` is the squared half
/// chord of the two-receiver problem on `m1`, `m2`.
pub fn invert3_collinear(config: &SensorConfig, t: RangeTriple) -> Result<SolutionSet> {
    config.planar_triple()?;
    let (m, order) = config.canonical_receivers()?;
    let s = tol::scale(config.d_max(), &t.to_array());
    if !in_octant(t, s) {
        return Ok(SolutionSet::Empty);
    }
    if compatibility_residual(config, t)?.abs() > compatibility_tolerance(config, t) {
        return Ok(SolutionSet::Empty);
    }
    let c = t.permuted(order);
    match invert_on_baseline(m[0].xy(), m[1].xy(), c.t1, c.t2) {
        Ok(sol) => Ok(sol),
        Err(GeoError::Infeasible(_)) => Ok(SolutionSet::Empty),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfeasibleReason {
    NotInOctant,
    OffSurface,
    OutsideQ3,
}

impl InfeasibleReason {
    pub fn name(self) -> &'static str {
        match self {
            InfeasibleReason::NotInOctant => "not_in_first_octant",
            InfeasibleReason::OffSurface => "off_surface",
            InfeasibleReason::OutsideQ3 => "outside_q3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible { fiber: usize },
    Infeasible(InfeasibleReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub in_octant: bool,
    /// Quartic (general) or compatibility quadric (collinear), unnormalized.
    pub surface_residual_raw: f64,
    /// Same residual divided by `d_max^6` (quartic) or `d_max^2` (quadric).
    pub surface_residual: f64,
    pub q3: Q3Report,
    pub verdict: Feasibility,
}

impl FeasibilityReport {
    pub fn fiber(&self) -> usize {
        match self.verdict {
            Feasibility::Feasible { fiber } => fiber,
            Feasibility::Infeasible(_) => 0,
        }
    }
}

/// Membership of `T` in the image of the range map, with every residual.
pub fn classify3(config: &SensorConfig, t: RangeTriple) -> Result<FeasibilityReport> {
    let m = config.planar_triple()?;
    let d_max = config.d_max();
    let s = tol::scale(d_max, &t.to_array());
    let octant = in_octant(t, s);
    let q3 = q3_membership(config, t)?;
    let outside_q3 = q3.verdict == Q3Verdict::Outside;
    let (raw, norm, on_surface, fiber) = if config.is_collinear() {
        let norm = compatibility_residual(config, t)?;
        let raw = norm * d_max * d_max;
        let ok = norm.abs() <= compatibility_tolerance(config, t);
        let (cm, order) = config.canonical_receivers()?;
        let c = t.permuted(order);
        let pair = classify_pair(cm[0].dist(cm[1]), c.t1, c.t2);
        let fiber = match pair.verdict {
            Q2Verdict::Interior => 2,
            Q2Verdict::Boundary(_) => 1,
            Q2Verdict::Outside => 0,
        };
        (raw, norm, ok && fiber > 0, fiber)
    } else {
        let raw = quartic_raw(&m, t);
        let norm = raw / d_max.powi(6);
        let r = s / d_max;
        let quartic_ok = norm.abs() <= tol::QUARTIC * r.powi(4);
        let i = pick_reference(&m);
        let x = m[i] + lift_point(&m, t, i).spatial();
        let subst = x.is_finite() && substitution_ok(&m, d_max, t, x);
        (raw, norm, quartic_ok && subst, 1)
    };
    let verdict = if !octant {
        Feasibility::Infeasible(InfeasibleReason::NotInOctant)
    } else if !on_surface {
        Feasibility::Infeasible(InfeasibleReason::OffSurface)
    } else if outside_q3 {
        Feasibility::Infeasible(InfeasibleReason::OutsideQ3)
    } else {
        Feasibility::Feasible { fiber }
    };
    Ok(FeasibilityReport { in_octant: octant, surface_residual_raw: raw, surface_residual: norm, q3, verdict })
}
