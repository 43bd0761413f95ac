//! Range differences relative to the third receiver: the pseudorange map, the
//! polygon P2, the quadratic along the lifted solution line, region labels and
//! inversion, and the projection from range space.

use std::fmt;

use crate::error::{GeoError, Result};
use crate::geometry::{hodge_cross, triple_form, SensorConfig, SolutionSet, SpacetimeVec3, Vec2};
use crate::kummer::{Locus, Side};
use crate::toa3::{invert3_collinear, RangeTriple};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PseudorangePair {
    pub tau1: f64,
    pub tau2: f64,
}

impl PseudorangePair {
    pub const fn new(tau1: f64, tau2: f64) -> Self {
        PseudorangePair { tau1, tau2 }
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.tau1, self.tau2]
    }

    fn as_vec(self) -> Vec2 {
        Vec2::new(self.tau1, self.tau2)
    }

    /// Ranges `(tau1, tau2, 0)`: the point of the fiber line with `T3 = 0`.
    fn lift(self) -> [f64; 3] {
        [self.tau1, self.tau2, 0.0]
    }
}

/// `tau_i = d_i(x) - d_3(x)`.
pub fn tau_map(config: &SensorConfig, x: Vec2) -> Result<PseudorangePair> {
    let m = config.planar_triple()?;
    let d3 = x.dist(m[2]);
    Ok(PseudorangePair::new(x.dist(m[0]) - d3, x.dist(m[1]) - d3))
}

/// `pi(T) = (T1 - T3, T2 - T3)`.
pub fn project_pi(t: RangeTriple) -> PseudorangePair {
    PseudorangePair::new(t.t1 - t.t3, t.t2 - t.t3)
}

/// The fiber of `pi` over `tau`: base point `(tau1, tau2, 0)` and direction `(1,1,1)`.
pub fn fiber_line(tau: PseudorangePair) -> (RangeTriple, RangeTriple) {
    (RangeTriple::new(tau.tau1, tau.tau2, 0.0), RangeTriple::new(1.0, 1.0, 1.0))
}

/// A side of P2: `T_a - T_b <= d_ab` along the fiber line, i.e. with `T3 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct P2Facet {
    pub a: usize,
    pub b: usize,
}

impl P2Facet {
    pub const ALL: [P2Facet; 6] = [
        P2Facet { a: 0, b: 2 },
        P2Facet { a: 2, b: 0 },
        P2Facet { a: 1, b: 2 },
        P2Facet { a: 2, b: 1 },
        P2Facet { a: 1, b: 0 },
        P2Facet { a: 0, b: 1 },
    ];

    /// Half-line of the x-plane mapped onto this side.
    pub fn preimage(self) -> Locus {
        Locus::ALL
            .into_iter()
            .find(|l| l.endpoint() == Some((self.b, self.a)))
            .unwrap_or(Locus::HalfLine(0, Side::Plus))
    }

    fn residual(self, config: &SensorConfig, tau: PseudorangePair) -> f64 {
        let t = tau.lift();
        config.d(self.a, self.b) - (t[self.a] - t[self.b])
    }
}

impl fmt::Display for P2Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = |i: usize, j: usize| format!("d{}{}", i.max(j) + 1, i.min(j) + 1);
        let bound = d(self.a, self.b);
        match (self.a, self.b) {
            (a, 2) => write!(f, "tau{}<={}", a + 1, bound),
            (2, b) => write!(f, "-tau{}<={}", b + 1, bound),
            (a, b) => write!(f, "tau{}-tau{}<={}", a + 1, b + 1, bound),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum P2Verdict {
    Interior,
    OnFacet(Vec<P2Facet>),
    Outside,
}

#[derive(Debug, Clone, PartialEq)]
pub struct P2Report {
    /// Facets with residuals, `>= 0` inside.
    pub facets: Vec<(P2Facet, f64)>,
    pub verdict: P2Verdict,
}

/// Sides of P2 for this configuration: six, or four for collinear receivers
/// (the pair of outer receivers gives redundant inequalities).
pub fn p2_facets(config: &SensorConfig) -> Result<Vec<P2Facet>> {
    config.planar_triple()?;
    Ok(match config.canonical_order() {
        Some(order) => {
            let outer = |f: &P2Facet| (f.a == order[0] && f.b == order[1]) || (f.a == order[1] && f.b == order[0]);
            P2Facet::ALL.into_iter().filter(|f| !outer(f)).collect()
        }
        None => P2Facet::ALL.to_vec(),
    })
}

pub fn p2_membership(config: &SensorConfig, tau: PseudorangePair) -> Result<P2Report> {
    let eps = tol::FACET * config.d_max();
    let facets: Vec<(P2Facet, f64)> = p2_facets(config)?.into_iter().map(|f| (f, f.residual(config, tau))).collect();
    let verdict = if facets.iter().any(|(_, r)| *r < -eps || r.is_nan()) {
        P2Verdict::Outside
    } else {
        let on: Vec<P2Facet> = facets.iter().filter(|(_, r)| *r <= eps).map(|(f, _)| *f).collect();
        if on.is_empty() {
            P2Verdict::Interior
        } else {
            P2Verdict::OnFacet(on)
        }
    };
    Ok(P2Report { facets, verdict })
}

/// Coefficients of `a lambda^2 + 2 b lambda + c = 0` along the lifted line
/// `D3 = (p, 0) + lambda v`, where `D3` is the displacement from the lifted
/// third receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdoaCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Direction of the line, oriented so that `v.t > 0`; nonpositive
    /// `lambda` then means a nonnegative range from the third receiver.
    pub v: SpacetimeVec3,
    /// Spatial displacement from `m3` to the foot of the line on the space plane.
    pub p: Vec2,
}

impl TdoaCoeffs {
    pub fn discriminant(&self) -> f64 {
        self.b * self.b - self.a * self.c
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        (self.a * lambda + 2.0 * self.b) * lambda + self.c
    }
}

fn lifted(m: &[Vec2; 3], tau: PseudorangePair) -> (SpacetimeVec3, SpacetimeVec3) {
    let d31 = SpacetimeVec3::from_spatial(m[2] - m[0], -tau.tau1);
    let d32 = SpacetimeVec3::from_spatial(m[2] - m[1], -tau.tau2);
    (d31, d32)
}

pub fn tdoa_coeffs(config: &SensorConfig, tau: PseudorangePair) -> Result<TdoaCoeffs> {
    let m = config.general_triangle()?;
    Ok(coeffs_for(&m, tau))
}

fn coeffs_for(m: &[Vec2; 3], tau: PseudorangePair) -> TdoaCoeffs {
    let (big31, big32) = lifted(m, tau);
    let mut v = hodge_cross(big31, big32);
    if v.t < 0.0 {
        v = -v;
    }
    let (d31, d32) = (m[2] - m[0], m[2] - m[1]);
    // p . d31 = -|D31|^2 / 2 and p . d32 = -|D32|^2 / 2
    let w = d31 * big32.norm_sq() - d32 * big31.norm_sq();
    let e3 = SpacetimeVec3::E3;
    let den = 2.0 * triple_form(SpacetimeVec3::from_spatial(d31, 0.0), SpacetimeVec3::from_spatial(d32, 0.0), e3);
    let p = hodge_cross(SpacetimeVec3::from_spatial(w, 0.0), e3).spatial() / den;
    let pl = SpacetimeVec3::from_spatial(p, 0.0);
    TdoaCoeffs { a: v.norm_sq(), b: crate::geometry::minkowski_inner(pl, v), c: p.norm_sq(), v, p }
}

/// `A t^2 + B t + C = 0`: the range quartic restricted to the fiber line
/// `T = (tau1 + t, tau2 + t, t)`, with `t` the range from the third receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct TQuadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Real roots, ascending.
    pub roots: Vec<f64>,
}

pub fn t_quadratic(config: &SensorConfig, tau: PseudorangePair) -> Result<TQuadratic> {
    let m = config.general_triangle()?;
    let (big31, big32) = lifted(&m, tau);
    let (d31, d32) = (m[2] - m[0], m[2] - m[1]);
    let u = d32 * tau.tau1 - d31 * tau.tau2;
    let w2 = d31.cross(d32).powi(2);
    let wp = d32 * big31.norm_sq() - d31 * big32.norm_sq();
    let (a, b, c) = (4.0 * (u.norm_sq() - w2), -4.0 * u.dot(wp), wp.norm_sq());
    let scale = config.d_max();
    let roots = quadratic_roots(a, b / 2.0, c, scale.powi(4)).into_iter().collect();
    Ok(TQuadratic { a, b, c, roots })
}

/// Real roots of `a x^2 + 2 h x + c`, merging near-double roots; `a_scale`
/// sets when `a` counts as zero.
fn quadratic_roots(a: f64, h: f64, c: f64, a_scale: f64) -> Vec<f64> {
    if a.abs() <= tol::DOUBLE_ROOT * a_scale {
        if h == 0.0 {
            return vec![];
        }
        return vec![-c / (2.0 * h)];
    }
    let disc = h * h - a * c;
    let mag = (h * h).max((a * c).abs());
    if disc < -tol::DOUBLE_ROOT * mag {
        return vec![];
    }
    if disc <= tol::DOUBLE_ROOT * mag {
        return vec![-h / a];
    }
    let q = -(h + h.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    if r1 <= r2 {
        vec![r1, r2]
    } else {
        vec![r2, r1]
    }
}

/// Tangency points of the ellipse with the sides of P2: `T_i^+` and `T_i^-`.
pub fn tangency_points(config: &SensorConfig) -> Result<Vec<(usize, Side, PseudorangePair)>> {
    let m = config.general_triangle()?;
    let (d31, d32) = (m[2] - m[0], m[2] - m[1]);
    let dirs = [(m[2] - m[1]).unit(), (m[2] - m[0]).unit(), (m[1] - m[0]).unit()];
    let mut out = Vec::with_capacity(6);
    for (i, u) in dirs.iter().enumerate() {
        let p = PseudorangePair::new(d31.dot(*u), d32.dot(*u));
        out.push((i, Side::Plus, p));
        out.push((i, Side::Minus, PseudorangePair::new(-p.tau1, -p.tau2)));
    }
    Ok(out)
}

/// Ellipse `E`: `|tau1 d32 - tau2 d31|^2 - |d31 ^ d32|^2`, zero on the curve.
pub fn ellipse_residual(config: &SensorConfig, tau: PseudorangePair) -> Result<f64> {
    let m = config.general_triangle()?;
    let (d31, d32) = (m[2] - m[0], m[2] - m[1]);
    Ok((d32 * tau.tau1 - d31 * tau.tau2).norm_sq() - d31.cross(d32).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryId {
    Facet(P2Facet),
    Ellipse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauLabel {
    /// Inside the ellipse: one preimage.
    EMinus,
    /// Component of the two-to-one region next to the image of receiver `i`.
    U(usize),
    BoundaryArc(BoundaryId),
    /// Tangency point of the ellipse with a side of P2; not in the image.
    TangencyPoint(usize, Side),
    OutsideIm,
    /// Interior of the image triangle of a collinear triple.
    CollinearInterior,
    /// Image of the outer receiver `i` of a collinear triple: a whole half-line of preimages.
    InfiniteFiber(usize),
}

impl fmt::Display for TauLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauLabel::EMinus => write!(f, "EMinus"),
            TauLabel::U(i) => write!(f, "U{}", i + 1),
            TauLabel::BoundaryArc(BoundaryId::Facet(p)) => write!(f, "BoundaryArc({p})"),
            TauLabel::BoundaryArc(BoundaryId::Ellipse) => write!(f, "BoundaryArc(E)"),
            TauLabel::TangencyPoint(i, Side::Plus) => write!(f, "TangencyPoint(T{}+)", i + 1),
            TauLabel::TangencyPoint(i, Side::Minus) => write!(f, "TangencyPoint(T{}-)", i + 1),
            TauLabel::OutsideIm => write!(f, "OutsideIm"),
            TauLabel::CollinearInterior => write!(f, "CollinearInterior"),
            TauLabel::InfiniteFiber(i) => write!(f, "InfiniteFiber(R{})", i + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fiber {
    Finite(usize),
    Infinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauRegion {
    pub label: TauLabel,
    pub fiber: Fiber,
    pub p2: P2Report,
    /// Quadratic coefficients (general configurations only).
    pub coeffs: Option<TdoaCoeffs>,
    /// `a(tau) / d_max^4` (general) or the residual of the image triangle's
    /// open edge (collinear, in length units).
    pub shape_residual: f64,
}

/// Preimages from the valid roots: `lambda <= 0` and every range nonnegative.
fn preimages(m: &[Vec2; 3], d_max: f64, tau: PseudorangePair, k: &TdoaCoeffs) -> Vec<Vec2> {
    let w = k.v.t;
    let s = tol::scale(d_max, &tau.to_array());
    let eps = tol::FACET * s;
    let lam_scale = s / w;
    let mut out: Vec<Vec2> = Vec::new();
    for lambda in quadratic_roots(k.a, k.b, k.c, d_max.powi(4)) {
        if !lambda.is_finite() || lambda > tol::FACET * lam_scale {
            continue;
        }
        let t = -lambda * w;
        if t < -eps || tau.tau1 + t < -eps || tau.tau2 + t < -eps {
            continue;
        }
        let x = m[2] + k.p + k.v.spatial() * lambda;
        if !out.iter().any(|q| q.dist(x) <= tol::SUBSTITUTION * s) {
            out.push(x);
        }
    }
    out
}

fn near(a: PseudorangePair, b: PseudorangePair, eps: f64) -> bool {
    a.as_vec().dist(b.as_vec()) <= eps
}

/// Region of the tau-plane containing `tau` and the size of its fiber.
pub fn classify_tau(config: &SensorConfig, tau: PseudorangePair) -> Result<TauRegion> {
    let p2 = p2_membership(config, tau)?;
    if config.is_collinear() {
        return classify_collinear(config, tau, p2);
    }
    let m = config.general_triangle()?;
    let d_max = config.d_max();
    let eps = tol::FACET * d_max;
    let k = coeffs_for(&m, tau);
    let shape = k.a / d_max.powi(4);
    let done = |label, fiber, p2| Ok(TauRegion { label, fiber, p2, coeffs: Some(k), shape_residual: shape });
    if p2.verdict == P2Verdict::Outside {
        return done(TauLabel::OutsideIm, Fiber::Finite(0), p2);
    }
    for (i, side, t) in tangency_points(config)? {
        if near(tau, t, eps) {
            return done(TauLabel::TangencyPoint(i, side), Fiber::Finite(0), p2);
        }
    }
    let n = preimages(&m, d_max, tau, &k).len();
    let label = if n == 0 {
        TauLabel::OutsideIm
    } else if let P2Verdict::OnFacet(f) = &p2.verdict {
        TauLabel::BoundaryArc(BoundaryId::Facet(f[0]))
    } else if shape.abs() <= tol::DOUBLE_ROOT {
        TauLabel::BoundaryArc(BoundaryId::Ellipse)
    } else if shape < 0.0 {
        TauLabel::EMinus
    } else {
        let r = m.map(|x| {
            let d3 = x.dist(m[2]);
            PseudorangePair::new(x.dist(m[0]) - d3, x.dist(m[1]) - d3)
        });
        let mut best = 0;
        for i in 1..3 {
            if tau.as_vec().dist(r[i].as_vec()) < tau.as_vec().dist(r[best].as_vec()) {
                best = i;
            }
        }
        TauLabel::U(best)
    };
    done(label, Fiber::Finite(n), p2)
}

/// Pseudoranges relative to the middle receiver of a collinear triple, in
/// canonical labels.
fn canonical_tau(order: [usize; 3], tau: PseudorangePair) -> PseudorangePair {
    let t = tau.lift();
    PseudorangePair::new(t[order[0]] - t[order[2]], t[order[1]] - t[order[2]])
}

fn classify_collinear(config: &SensorConfig, tau: PseudorangePair, p2: P2Report) -> Result<TauRegion> {
    let (m, order) = config.canonical_receivers()?;
    let rho = config.rho().ok_or(GeoError::NotCollinear)?;
    let (d31, d32) = (m[0].dist(m[2]), m[1].dist(m[2]));
    let c = canonical_tau(order, tau);
    let eps = tol::FACET * config.d_max();
    let edge = (1.0 - rho) * c.tau1 + rho * c.tau2;
    let r = [d31 - c.tau1, d32 - c.tau2, edge];
    let vertices = [PseudorangePair::new(-d31, d32), PseudorangePair::new(d31, -d32)];
    let done = |label, fiber| Ok(TauRegion { label, fiber, p2: p2.clone(), coeffs: None, shape_residual: edge });
    for (k, v) in vertices.iter().enumerate() {
        if near(c, *v, eps) {
            return done(TauLabel::InfiniteFiber(order[k]), Fiber::Infinite);
        }
    }
    if r.iter().any(|v| *v < -eps) || r[2] <= eps {
        return done(TauLabel::OutsideIm, Fiber::Finite(0));
    }
    let on: Vec<P2Facet> = match &p2.verdict {
        P2Verdict::OnFacet(f) => f.clone(),
        _ => vec![],
    };
    if r[0] <= eps || r[1] <= eps {
        let f = on.first().copied().unwrap_or(P2Facet { a: order[0], b: order[2] });
        return done(TauLabel::BoundaryArc(BoundaryId::Facet(f)), Fiber::Finite(1));
    }
    done(TauLabel::CollinearInterior, Fiber::Finite(2))
}

/// Source positions with pseudoranges `tau` for a receiver triangle.
pub fn invert_tdoa(config: &SensorConfig, tau: PseudorangePair) -> Result<SolutionSet> {
    let m = config.general_triangle()?;
    let d_max = config.d_max();
    for (_, _, t) in tangency_points(config)? {
        if near(tau, t, tol::FACET * d_max) {
            return Ok(SolutionSet::Empty);
        }
    }
    let k = coeffs_for(&m, tau);
    Ok(match preimages(&m, d_max, tau, &k).as_slice() {
        [] => SolutionSet::Empty,
        [x] => SolutionSet::One(*x),
        [x, y, ..] => SolutionSet::Two(*x, *y),
    })
}

/// Collinear triple: the fiber line meets the hyperboloid once; the ranges
/// found there are inverted as in the collinear range problem.
pub fn invert_tdoa_collinear(config: &SensorConfig, tau: PseudorangePair) -> Result<SolutionSet> {
    let region = classify_tau(config, tau)?;
    match region.fiber {
        Fiber::Infinite => return Err(GeoError::Infeasible("infinitely many preimages".into())),
        Fiber::Finite(0) => return Ok(SolutionSet::Empty),
        Fiber::Finite(_) => {}
    }
    let (m, order) = config.canonical_receivers()?;
    let rho = config.rho().ok_or(GeoError::NotCollinear)?;
    let c = canonical_tau(order, tau);
    let d21 = m[0].dist(m[1]);
    // (1-rho)(c1+t)^2 + rho (c2+t)^2 - t^2 - rho (1-rho) d21^2 = 0 is linear in t
    let lin = 2.0 * ((1.0 - rho) * c.tau1 + rho * c.tau2);
    let cst = (1.0 - rho) * c.tau1 * c.tau1 + rho * c.tau2 * c.tau2 - rho * (1.0 - rho) * d21 * d21;
    let t = -cst / lin;
    let canon = RangeTriple::new(c.tau1 + t, c.tau2 + t, t);
    invert3_collinear(config, canon.unpermuted(order))
}
