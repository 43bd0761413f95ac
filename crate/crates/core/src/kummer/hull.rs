//! Boundary components of the convex hull of the range surface: four
//! nonnegatively curved patches, nine bounded facet fills and six unbounded
//! ones, minus the three unbounded edges of Q3.

use std::fmt;

use super::arcs::{conic_arc, pair_without, Locus, Side};
use super::curvature::{curvature_raw, wedge_areas};
use super::q3::{q3_membership, Q3Verdict};
use crate::error::{GeoError, Result};
use crate::geometry::{SensorConfig, SolutionSet, Vec2};
use crate::toa3::{invert3, ranges, RangeTriple};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullComponent {
    /// Curved patch `V0` (inside the triangle) or `V1..V3`.
    V(usize),
    /// Fill between the image of circumcircle arc `i` and the edge joining the other two receiver images.
    F(usize),
    /// Fill between the image of segment `i` and the same edge.
    G(usize),
    /// Unbounded fill along the image of a half-line.
    L(usize, Side),
    /// Unbounded edge of Q3 through the image of receiver `i`; not part of the hull.
    UnboundedEdge(usize),
}

impl HullComponent {
    pub fn in_hull(self) -> bool {
        !matches!(self, HullComponent::UnboundedEdge(_))
    }
}

impl fmt::Display for HullComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            HullComponent::V(i) => write!(f, "V{i}"),
            HullComponent::F(i) => {
                let (j, k) = pair_without(i);
                write!(f, "F{}{}{}", i + 1, j + 1, k + 1)
            }
            HullComponent::G(i) => {
                let (j, k) = pair_without(i);
                write!(f, "G{}{}{}", i + 1, j + 1, k + 1)
            }
            HullComponent::L(i, Side::Plus) => write!(f, "L{}+", i + 1),
            HullComponent::L(i, Side::Minus) => write!(f, "L{}-", i + 1),
            HullComponent::UnboundedEdge(i) => write!(f, "UnboundedEdge{}", i + 1),
        }
    }
}

/// Which curved patch contains the image of `x`, from the signs of the
/// oriented areas: `V0` when all agree, else the index of the odd one out.
fn patch_of(m: &[Vec2; 3], x: Vec2) -> usize {
    let h = wedge_areas(m, x);
    let s = h.map(|v| v >= 0.0);
    if s[0] == s[1] && s[1] == s[2] {
        0
    } else if s[1] == s[2] {
        1
    } else if s[0] == s[2] {
        2
    } else {
        3
    }
}

fn fill_of(locus: Locus) -> HullComponent {
    match locus {
        Locus::HalfLine(i, s) => HullComponent::L(i, s),
        Locus::Segment(i) => HullComponent::G(i),
        Locus::Arc(i) => HullComponent::F(i),
    }
}

/// Locates `T` on the boundary of the convex hull of the image.
pub fn hull_boundary_classify(config: &SensorConfig, t: RangeTriple) -> Result<HullComponent> {
    let m = config.general_triangle()?;
    let d_max = config.d_max();
    let scale = tol::scale(d_max, &t.to_array());
    let eps = tol::FACET * scale;

    for (e, me) in m.iter().enumerate() {
        let base = ranges(&m, *me);
        let v = [t.t1 - base.t1, t.t2 - base.t2, t.t3 - base.t3];
        let s = (v[0] + v[1] + v[2]) / 3.0;
        let off = v.iter().map(|c| (c - s).powi(2)).sum::<f64>().sqrt();
        if s > eps && off <= eps {
            return Ok(HullComponent::UnboundedEdge(e));
        }
    }

    if let SolutionSet::One(x) = invert3(config, t)? {
        let at_receiver = m.iter().any(|mi| x.dist(*mi) <= tol::AT_RECEIVER * d_max);
        if !at_receiver && curvature_raw(&m, x) * d_max * d_max >= -tol::QUARTIC {
            return Ok(HullComponent::V(patch_of(&m, x)));
        }
    }

    let q3 = q3_membership(config, t)?;
    if q3.verdict == Q3Verdict::Outside {
        return Err(GeoError::NotOnBoundary);
    }
    for f in &q3.facets {
        if f.residual.abs() > eps {
            continue;
        }
        let arc = conic_arc(config, f.locus)?;
        let reference = match f.locus {
            Locus::HalfLine(..) => {
                let (e, _) = f.locus.endpoint().unwrap_or((0, 0));
                let b = ranges(&m, m[e]);
                RangeTriple::new(b.t1 + d_max, b.t2 + d_max, b.t3 + d_max)
            }
            Locus::Segment(i) | Locus::Arc(i) => {
                let (j, k) = pair_without(i);
                let (a, b) = (ranges(&m, m[j]), ranges(&m, m[k]));
                RangeTriple::new((a.t1 + b.t1) / 2.0, (a.t2 + b.t2) / 2.0, (a.t3 + b.t3) / 2.0)
            }
        };
        let q = arc.quadric.eval(t);
        let q_ref = arc.quadric.eval(reference);
        let q_tol = tol::SUBSTITUTION * scale * scale;
        if q.abs() <= q_tol || q * q_ref > 0.0 {
            return Ok(fill_of(f.locus));
        }
    }
    Err(GeoError::NotOnBoundary)
}
