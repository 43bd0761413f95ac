//! The sixteen nodes and sixteen tropes of the projective surface, and the
//! tangent cones at the nodes.

use super::arcs::{locus_plane, Locus, TPlane, TQuadric};
use super::quartic::{homogeneous_form, HomogeneousForm};
use crate::error::{GeoError, Result};
use crate::geometry::{SensorConfig, Vec2};
use crate::toa3::RangeTriple;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// Image of receiver `i` (the affine nodes in the first octant).
    ReceiverImage(usize),
    /// Affine node outside the first octant.
    Affine,
    /// Point at infinity; `principal` marks the node in direction `(1,1,1)`.
    Ideal { principal: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    /// Homogeneous `(t0 : t1 : t2 : t3)`, first nonzero coordinate equal to 1.
    pub coords: [f64; 4],
    pub kind: NodeKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trope {
    /// Dual coordinates, first nonzero coordinate equal to 1.
    pub coords: [f64; 4],
    /// The same plane in T-space.
    pub plane: TPlane,
    /// x-plane locus whose image the trope touches, if any.
    pub locus: Option<Locus>,
}

impl Trope {
    pub fn meets_image(&self) -> bool {
        self.locus.is_some()
    }
}

fn normalize_first(v: [f64; 4]) -> [f64; 4] {
    let lead = v.iter().copied().find(|x| *x != 0.0).unwrap_or(1.0);
    v.map(|x| x / lead)
}

/// The sixteen homogeneous tuples shared by nodes and tropes, row by row.
/// Row `r` has its zero in slot `r`; within a row the four sign classes flip
/// the second and third nonzero entries.
fn tuples(form: &HomogeneousForm) -> Vec<(usize, [f64; 4])> {
    let k = form.coeffs;
    let (s21, s31, s32) = (k.d21.sqrt(), k.d31.sqrt(), k.d32.sqrt());
    let rows = [[0.0, s32, s31, s21], [s32, 0.0, s21, s31], [s31, s21, 0.0, s32], [s21, s31, s32, 0.0]];
    let mut out = Vec::with_capacity(16);
    for (r, base) in rows.iter().enumerate() {
        let nz: Vec<usize> = (0..4).filter(|&p| p != r).collect();
        for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let mut v = *base;
            v[nz[1]] *= sa;
            v[nz[2]] *= sb;
            out.push((r, normalize_first(v)));
        }
    }
    out
}

pub fn nodes(form: &HomogeneousForm) -> Vec<Node> {
    tuples(form)
        .into_iter()
        .map(|(row, coords)| {
            let all_plus = coords.iter().all(|c| *c >= 0.0);
            let kind = match (row, all_plus) {
                (0, p) => NodeKind::Ideal { principal: p },
                (r, true) => NodeKind::ReceiverImage(r - 1),
                _ => NodeKind::Affine,
            };
            Node { coords, kind }
        })
        .collect()
}

/// T-space plane of the trope with dual coordinates `c`.
pub fn trope_plane(form: &HomogeneousForm, c: [f64; 4]) -> TPlane {
    let k = form.coeffs;
    TPlane {
        normal: [c[1] * k.d32.sqrt(), c[2] * k.d31.sqrt(), c[3] * k.d21.sqrt()],
        offset: c[0] * (k.d21 * k.d31 * k.d32).sqrt(),
    }
}

pub fn tropes(form: &HomogeneousForm, m: &[Vec2; 3]) -> Vec<Trope> {
    let catalog: Vec<(Locus, TPlane)> = Locus::ALL.iter().map(|&l| (l, locus_plane(m, l))).collect();
    tuples(form)
        .into_iter()
        .map(|(_, coords)| {
            let plane = trope_plane(form, coords);
            let locus = catalog.iter().find(|(_, p)| p.same_as(&plane, 1e-9)).map(|(l, _)| *l);
            Trope { coords, plane, locus }
        })
        .collect()
}

pub fn nodes_and_tropes(config: &SensorConfig) -> Result<(Vec<Node>, Vec<Trope>)> {
    let m = config.general_triangle()?;
    let form = homogeneous_form(config)?;
    Ok((nodes(&form), tropes(&form, &m)))
}

/// Elliptic cylinder `|T1 d32 - T2 d31 + T3 d21|^2 = |d31 ^ d32|^2` with axis
/// `(1,1,1)`, tangent to the surface at its principal point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticCylinder {
    pub d21: Vec2,
    pub d31: Vec2,
    pub d32: Vec2,
}

impl EllipticCylinder {
    pub fn from_points(m: &[Vec2; 3]) -> Self {
        EllipticCylinder { d21: m[1] - m[0], d31: m[2] - m[0], d32: m[2] - m[1] }
    }

    pub fn eval(&self, t: RangeTriple) -> f64 {
        let v = self.d32 * t.t1 - self.d31 * t.t2 + self.d21 * t.t3;
        v.norm_sq() - self.d31.cross(self.d32).powi(2)
    }

    pub fn axis(&self) -> [f64; 3] {
        [1.0 / 3f64.sqrt(); 3]
    }

    /// Section by `T3 = 0`, as a function of `(T1, T2)`.
    pub fn section(&self, t1: f64, t2: f64) -> f64 {
        self.eval(RangeTriple::new(t1, t2, 0.0))
    }

    /// The same quadric in matrix form.
    pub fn quadric(&self) -> TQuadric {
        let v = [self.d32, -self.d31, self.d21];
        let mut a = [[0.0; 3]; 3];
        for p in 0..3 {
            for q in 0..3 {
                a[p][q] = v[p].dot(v[q]);
            }
        }
        TQuadric { a, b: [0.0; 3], c: -self.d31.cross(self.d32).powi(2) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TangentCone {
    /// Quadratic cone `t' H t = 0` at a node; `hessian` is the Hessian of F at
    /// the unit-norm representative of `node`.
    Cone {
        node: [f64; 4],
        hessian: [[f64; 4]; 4],
    },
    Cylinder(EllipticCylinder),
}

impl TangentCone {
    /// Restriction of the cone to `t0 = 1`, rewritten in T-space.
    pub fn affine_quadric(&self, form: &HomogeneousForm) -> TQuadric {
        match self {
            TangentCone::Cylinder(c) => c.quadric(),
            TangentCone::Cone { hessian: h, .. } => {
                let s = form.scales();
                let mut q = TQuadric { a: [[0.0; 3]; 3], b: [0.0; 3], c: h[0][0] };
                for p in 0..3 {
                    q.b[p] = 2.0 * h[0][p + 1] / s[p];
                    for r in 0..3 {
                        q.a[p][r] = h[p + 1][r + 1] / (s[p] * s[r]);
                    }
                }
                q
            }
        }
    }
}

/// Hessian of F at a homogeneous node (any nonzero representative).
pub fn node_hessian(form: &HomogeneousForm, node: [f64; 4]) -> Result<[[f64; 4]; 4]> {
    let n = node.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(GeoError::NotANode);
    }
    let u = node.map(|v| v / n);
    let g = form.gradient(u);
    let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if form.eval(u).abs() > 1e-9 || gn > 1e-9 {
        return Err(GeoError::NotANode);
    }
    Ok(form.hessian(u))
}

/// Quadratic cone approximating the surface at a node; the elliptic cylinder
/// for the principal ideal node `(0 : sqrt d32 : sqrt d31 : sqrt d21)`.
pub fn tangent_cone(config: &SensorConfig, node: [f64; 4]) -> Result<TangentCone> {
    let m = config.general_triangle()?;
    let form = homogeneous_form(config)?;
    let hessian = node_hessian(&form, node)?;
    let n = node.iter().map(|v| v * v).sum::<f64>().sqrt();
    let principal =
        node[0].abs() <= 1e-12 * n && (node[1..].iter().all(|v| *v > 0.0) || node[1..].iter().all(|v| *v < 0.0));
    if principal {
        Ok(TangentCone::Cylinder(EllipticCylinder::from_points(&m)))
    } else {
        Ok(TangentCone::Cone { node: normalize_first(node), hessian })
    }
}
