//! The twelve zero-curvature loci of the x-plane (three lines split into two
//! half-lines and a segment each, plus three circumcircle arcs) and the conic
//! arcs they trace on the range surface.

use std::fmt;

use crate::error::{GeoError, Result};
use crate::geometry::{SensorConfig, Vec2};
use crate::toa3::RangeTriple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Plus,
    Minus,
}

/// A locus in the x-plane. The index `i` names the receiver *not* on the
/// underlying line (or the receiver *opposite* to the circle arc).
///
/// On the line `r_i` through the two other receivers `j < k`, `HalfLine(i, Plus)`
/// starts at `m_j` and `HalfLine(i, Minus)` at `m_k`; both point away from the
/// segment. `Arc(i)` is the arc of the circumcircle joining `m_j` and `m_k`
/// that avoids `m_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Locus {
    HalfLine(usize, Side),
    Segment(usize),
    Arc(usize),
}

pub(crate) fn pair_without(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        2 => (0, 1),
        _ => panic!("receiver index {i} out of range"),
    }
}

impl Locus {
    /// All twelve loci, in the facet order used by Q3 reports.
    pub const ALL: [Locus; 12] = [
        Locus::HalfLine(0, Side::Plus),
        Locus::HalfLine(0, Side::Minus),
        Locus::Segment(0),
        Locus::HalfLine(1, Side::Plus),
        Locus::HalfLine(1, Side::Minus),
        Locus::Segment(1),
        Locus::HalfLine(2, Side::Plus),
        Locus::HalfLine(2, Side::Minus),
        Locus::Segment(2),
        Locus::Arc(0),
        Locus::Arc(1),
        Locus::Arc(2),
    ];

    pub fn index(self) -> usize {
        match self {
            Locus::HalfLine(i, _) | Locus::Segment(i) | Locus::Arc(i) => i,
        }
    }

    /// Endpoint receiver of a half-line and the other receiver on its line.
    pub fn endpoint(self) -> Option<(usize, usize)> {
        match self {
            Locus::HalfLine(i, side) => {
                let (j, k) = pair_without(i);
                Some(match side {
                    Side::Plus => (j, k),
                    Side::Minus => (k, j),
                })
            }
            _ => None,
        }
    }

    /// Parses names such as `r1+`, `r2-`, `r3_0`, `gamma1`.
    pub fn parse(s: &str) -> Result<Locus> {
        let l = s.trim().to_ascii_lowercase();
        let bad = || GeoError::UnknownLabel(s.to_string());
        let digit = |c: Option<char>| match c {
            Some(d @ '1'..='3') => Ok(d as usize - '1' as usize),
            _ => Err(bad()),
        };
        if let Some(rest) = l.strip_prefix("gamma") {
            if rest.len() != 1 {
                return Err(bad());
            }
            return Ok(Locus::Arc(digit(rest.chars().next())?));
        }
        let rest = l.strip_prefix('r').ok_or_else(bad)?;
        let mut chars = rest.chars();
        let i = digit(chars.next())?;
        match chars.as_str() {
            "+" => Ok(Locus::HalfLine(i, Side::Plus)),
            "-" => Ok(Locus::HalfLine(i, Side::Minus)),
            "_0" | "0" => Ok(Locus::Segment(i)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Locus::HalfLine(i, Side::Plus) => write!(f, "r{}+", i + 1),
            Locus::HalfLine(i, Side::Minus) => write!(f, "r{}-", i + 1),
            Locus::Segment(i) => write!(f, "r{}_0", i + 1),
            Locus::Arc(i) => write!(f, "gamma{}", i + 1),
        }
    }
}

/// Circumcenter and circumradius.
pub fn circumcircle(m: &[Vec2; 3]) -> (Vec2, f64) {
    let (b, c) = (m[1] - m[0], m[2] - m[0]);
    let d = 2.0 * b.cross(c);
    let center = Vec2::new(c.y * b.norm_sq() - b.y * c.norm_sq(), b.x * c.norm_sq() - c.x * b.norm_sq()) / d;
    (m[0] + center, center.norm())
}

fn angle_of(p: Vec2, c: Vec2) -> f64 {
    (p.y - c.y).atan2(p.x - c.x)
}

/// A point on `locus`. For segments and arcs `s` runs over `[0, 1]` from
/// `m_j` to `m_k`; for half-lines `s >= 0` measures distance from the endpoint
/// in units of the receiver separation along that line.
pub fn locus_point(m: &[Vec2; 3], locus: Locus, s: f64) -> Vec2 {
    match locus {
        Locus::Segment(i) => {
            let (j, k) = pair_without(i);
            m[j] + (m[k] - m[j]) * s
        }
        Locus::HalfLine(..) => {
            let (e, o) = locus.endpoint().unwrap_or((0, 0));
            m[e] + (m[e] - m[o]) * s
        }
        Locus::Arc(i) => {
            let (j, k) = pair_without(i);
            let (c, r) = circumcircle(m);
            let tau = std::f64::consts::TAU;
            let (aj, ak, ai) = (angle_of(m[j], c), angle_of(m[k], c), angle_of(m[i], c));
            let sweep = (ak - aj).rem_euclid(tau);
            let delta = if (ai - aj).rem_euclid(tau) < sweep { sweep - tau } else { sweep };
            let th = aj + s * delta;
            c + Vec2::new(th.cos(), th.sin()) * r
        }
    }
}

/// Affine plane `normal . T + offset = 0` in T-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TPlane {
    pub normal: [f64; 3],
    pub offset: f64,
}

impl TPlane {
    pub fn eval(&self, t: RangeTriple) -> f64 {
        self.normal[0] * t.t1 + self.normal[1] * t.t2 + self.normal[2] * t.t3 + self.offset
    }

    pub fn normal_norm(&self) -> f64 {
        self.normal.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn signed_distance(&self, t: RangeTriple) -> f64 {
        self.eval(t) / self.normal_norm()
    }

    /// Same plane up to a nonzero factor.
    pub fn same_as(&self, o: &TPlane, tol: f64) -> bool {
        let a = [self.normal[0], self.normal[1], self.normal[2], self.offset];
        let b = [o.normal[0], o.normal[1], o.normal[2], o.offset];
        let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let plus = (0..4).all(|k| (a[k] / na - b[k] / nb).abs() <= tol);
        let minus = (0..4).all(|k| (a[k] / na + b[k] / nb).abs() <= tol);
        plus || minus
    }
}

/// Quadric `T' A T + b . T + c` in T-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TQuadric {
    pub a: [[f64; 3]; 3],
    pub b: [f64; 3],
    pub c: f64,
}

impl TQuadric {
    pub fn eval(&self, t: RangeTriple) -> f64 {
        let v = t.to_array();
        let mut s = self.c;
        for p in 0..3 {
            s += self.b[p] * v[p];
            for q in 0..3 {
                s += self.a[p][q] * v[p] * v[q];
            }
        }
        s
    }

    /// Largest coefficient magnitude, used to compare quadrics up to scale.
    pub fn max_coeff(&self) -> f64 {
        let mut m = self.c.abs();
        for p in 0..3 {
            m = m.max(self.b[p].abs());
            for q in 0..3 {
                m = m.max(self.a[p][q].abs());
            }
        }
        m
    }
}

/// `coef . T + constant >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearBound {
    pub coef: [f64; 3],
    pub constant: f64,
}

impl LinearBound {
    pub fn eval(&self, t: RangeTriple) -> f64 {
        self.coef[0] * t.t1 + self.coef[1] * t.t2 + self.coef[2] * t.t3 + self.constant
    }
}

/// Conic arc traced on the range surface by a locus: trope plane, a quadric
/// cutting the conic out of that plane, and the bounds selecting the arc.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicArc {
    pub locus: Locus,
    pub plane: TPlane,
    pub quadric: TQuadric,
    pub bounds: Vec<LinearBound>,
}

impl ConicArc {
    /// Membership with absolute tolerance `eps` (length units) on the plane and
    /// bounds and `eps * scale` on the quadric.
    pub fn contains(&self, t: RangeTriple, eps: f64, scale: f64) -> bool {
        self.plane.signed_distance(t).abs() <= eps
            && self.quadric.eval(t).abs() <= eps * scale
            && self.bounds.iter().all(|b| b.eval(t) >= -eps)
    }
}

/// Supporting plane of the facet of Q3 that touches the surface along `locus`.
pub fn locus_plane(m: &[Vec2; 3], locus: Locus) -> TPlane {
    let mut d = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] = m[i].dist(m[j]);
        }
    }
    plane_from_distances(&d, locus)
}

/// [`locus_plane`] from the receiver distance matrix alone.
pub(crate) fn plane_from_distances(d: &[[f64; 3]; 3], locus: Locus) -> TPlane {
    let mut normal = [0.0; 3];
    let offset;
    match locus {
        Locus::HalfLine(..) => {
            let (e, o) = locus.endpoint().unwrap_or((0, 0));
            // T_o - T_e = d_eo
            normal[o] = 1.0;
            normal[e] = -1.0;
            offset = -d[e][o];
        }
        Locus::Segment(i) => {
            let (j, k) = pair_without(i);
            normal[j] = 1.0;
            normal[k] = 1.0;
            offset = -d[j][k];
        }
        Locus::Arc(i) => {
            for (k, n) in normal.iter_mut().enumerate() {
                let (p, q) = pair_without(k);
                *n = if k == i { -d[p][q] } else { d[p][q] };
            }
            offset = 0.0;
        }
    }
    TPlane { normal, offset }
}

/// `+1` when the Q3 inequality reads `plane >= 0`, `-1` when it reads `plane <= 0`.
pub(crate) fn inward_sign(locus: Locus) -> f64 {
    match locus {
        Locus::HalfLine(..) => -1.0,
        Locus::Segment(_) | Locus::Arc(_) => 1.0,
    }
}

fn first_octant_bounds() -> Vec<LinearBound> {
    (0..3)
        .map(|k| {
            let mut coef = [0.0; 3];
            coef[k] = 1.0;
            LinearBound { coef, constant: 0.0 }
        })
        .collect()
}

/// Quadric for points on a ray `base + s w` (`|w| = 1`, `s = T_base >= 0`)
/// relating `T_base` to the range from the off-line receiver `i`:
/// `T_i^2 - T_base^2 - |m_i - m_base|^2 + 2 T_base w.(m_i - m_base) = 0`.
fn ray_quadric(m: &[Vec2; 3], base: usize, w: Vec2, i: usize) -> TQuadric {
    let mut q = TQuadric { a: [[0.0; 3]; 3], b: [0.0; 3], c: 0.0 };
    let r = m[i] - m[base];
    q.a[i][i] = 1.0;
    q.a[base][base] = -1.0;
    q.b[base] = 2.0 * w.dot(r);
    q.c = -r.norm_sq();
    q
}

pub fn conic_arc(config: &SensorConfig, locus: Locus) -> Result<ConicArc> {
    let m = config.general_triangle()?;
    let plane = locus_plane(&m, locus);
    let mut bounds = first_octant_bounds();
    let quadric = match locus {
        Locus::Segment(i) => {
            let (j, k) = pair_without(i);
            let mut coef = [0.0; 3];
            coef[j] = -1.0;
            bounds.push(LinearBound { coef, constant: m[j].dist(m[k]) });
            ray_quadric(&m, j, (m[k] - m[j]).unit(), i)
        }
        Locus::HalfLine(i, _) => {
            let (e, o) = locus.endpoint().unwrap_or((0, 0));
            ray_quadric(&m, e, (m[e] - m[o]).unit(), i)
        }
        Locus::Arc(i) => {
            // inscribed angle on the chord m1 m2
            let a = super::KummerCoeffs::from_points(&m).a;
            let sign = if i == 2 { 1.0 } else { -1.0 };
            let d21 = m[0].dist(m[1]);
            let mut q = TQuadric { a: [[0.0; 3]; 3], b: [0.0; 3], c: -d21 * d21 };
            q.a[0][0] = 1.0;
            q.a[1][1] = 1.0;
            q.a[0][1] = sign * a;
            q.a[1][0] = sign * a;
            q
        }
    };
    Ok(ConicArc { locus, plane, quadric, bounds })
}
