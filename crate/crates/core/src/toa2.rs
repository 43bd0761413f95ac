//! Two receivers in the plane: forward map, the feasible polyhedron Q2 and
//! closed-form inversion.

use crate::error::{GeoError, Result};
use crate::geometry::{SensorConfig, SolutionSet, Vec2};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RangePair {
    pub t1: f64,
    pub t2: f64,
}

impl RangePair {
    pub const fn new(t1: f64, t2: f64) -> Self {
        RangePair { t1, t2 }
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.t1, self.t2]
    }
}

/// Facets of Q2, in residual order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Q2Facet {
    /// `T1 - T2 <= d21`
    FirstMinusSecond,
    /// `T2 - T1 <= d21`
    SecondMinusFirst,
    /// `T1 + T2 >= d21`
    Sum,
}

impl Q2Facet {
    pub const ALL: [Q2Facet; 3] = [Q2Facet::FirstMinusSecond, Q2Facet::SecondMinusFirst, Q2Facet::Sum];

    pub fn name(self) -> &'static str {
        match self {
            Q2Facet::FirstMinusSecond => "T1-T2<=d21",
            Q2Facet::SecondMinusFirst => "T2-T1<=d21",
            Q2Facet::Sum => "T1+T2>=d21",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Q2Verdict {
    Interior,
    Boundary(Vec<Q2Facet>),
    Outside,
}

/// Verdict plus the raw residuals; each residual is `>= 0` inside Q2.
#[derive(Debug, Clone, PartialEq)]
pub struct Q2Class {
    pub verdict: Q2Verdict,
    pub residuals: [f64; 3],
}

impl Q2Class {
    /// Number of planar preimages.
    pub fn fiber(&self) -> usize {
        match self.verdict {
            Q2Verdict::Interior => 2,
            Q2Verdict::Boundary(_) => 1,
            Q2Verdict::Outside => 0,
        }
    }
}

/// Classification against Q2 for receivers at distance `d`.
pub(crate) fn classify_pair(d: f64, t1: f64, t2: f64) -> Q2Class {
    let residuals = [d - (t1 - t2), d - (t2 - t1), t1 + t2 - d];
    let eps = tol::FACET * d;
    let verdict = if residuals.iter().any(|r| *r < -eps || r.is_nan()) {
        Q2Verdict::Outside
    } else {
        let on: Vec<Q2Facet> =
            Q2Facet::ALL.iter().zip(residuals).filter(|(_, r)| r.abs() <= eps).map(|(f, _)| *f).collect();
        if on.is_empty() {
            Q2Verdict::Interior
        } else {
            Q2Verdict::Boundary(on)
        }
    };
    Q2Class { verdict, residuals }
}

/// Intersection of the circles of radius `t1`, `t2` around two points at
/// distance `d`: the foot `a` along the baseline from the first point and the
/// half chord `b >= 0`. `None` outside Q2; `b` is clamped to 0 on the boundary.
pub(crate) fn pair_solve(d: f64, t1: f64, t2: f64) -> (Q2Class, Option<(f64, f64)>) {
    let class = classify_pair(d, t1, t2);
    let a = (d * d + (t1 - t2) * (t1 + t2)) / (2.0 * d);
    let b = match class.verdict {
        Q2Verdict::Outside => return (class, None),
        Q2Verdict::Boundary(_) => 0.0,
        Q2Verdict::Interior => {
            let [r1, r2, r3] = class.residuals;
            let b2 = r1 * r2 * r3 * (t1 + t2 + d) / (4.0 * d * d);
            b2.max(0.0).sqrt()
        }
    };
    (class, Some((a, b)))
}

pub fn forward2(config: &SensorConfig, x: Vec2) -> Result<RangePair> {
    let [m1, m2] = config.planar_pair()?;
    Ok(RangePair::new(x.dist(m1), x.dist(m2)))
}

pub fn classify2(config: &SensorConfig, t: RangePair) -> Result<Q2Class> {
    let [m1, m2] = config.planar_pair()?;
    Ok(classify_pair(m1.dist(m2), t.t1, t.t2))
}

/// Closed-form inverse. The two points are mirror images across the receiver line.
pub fn invert2(config: &SensorConfig, t: RangePair) -> Result<SolutionSet> {
    let [m1, m2] = config.planar_pair()?;
    invert_on_baseline(m1, m2, t.t1, t.t2)
}

pub(crate) fn invert_on_baseline(m1: Vec2, m2: Vec2, t1: f64, t2: f64) -> Result<SolutionSet> {
    let d = m1.dist(m2);
    let u = (m2 - m1) / d;
    match pair_solve(d, t1, t2) {
        (_, None) => Err(GeoError::Infeasible("range pair outside Q2".into())),
        (_, Some((a, b))) => {
            let foot = m1 + u * a;
            if b == 0.0 {
                Ok(SolutionSet::One(foot))
            } else {
                let n = u.perp() * b;
                Ok(SolutionSet::Two(foot + n, foot - n))
            }
        }
    }
}
