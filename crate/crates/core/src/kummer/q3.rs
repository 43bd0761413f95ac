//! The polyhedron Q3: nine triangular inequalities plus three circumcircle
//! inequalities, reduced to four facets for collinear receivers.

use super::arcs::{inward_sign, locus_point, plane_from_distances, Locus, Side, TPlane};
use crate::error::{GeoError, Result};
use crate::geometry::SensorConfig;
use crate::toa3::{ranges, RangeTriple};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Q3Facet {
    /// The locus whose image the facet touches, in input labels.
    pub locus: Locus,
    /// Signed distance from the supporting plane, `>= 0` inside Q3.
    pub residual: f64,
    pub normal_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Q3Verdict {
    Interior,
    OnFacet(Vec<Locus>),
    Outside,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Q3Report {
    pub facets: Vec<Q3Facet>,
    pub verdict: Q3Verdict,
}

impl Q3Report {
    pub fn min_residual(&self) -> f64 {
        self.facets.iter().map(|f| f.residual).fold(f64::INFINITY, f64::min)
    }
}

fn distance_matrix(config: &SensorConfig) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| config.d(i, j)))
}

/// The four collinear facets, relabeled from canonical to input indices.
fn collinear_loci(order: [usize; 3]) -> Vec<Locus> {
    let halfline = |e: usize, o: usize| {
        let (e, o) = (order[e], order[o]);
        Locus::ALL.into_iter().find(|l| l.endpoint() == Some((e, o))).unwrap_or(Locus::HalfLine(0, Side::Plus))
    };
    vec![halfline(2, 0), halfline(2, 1), Locus::Segment(order[2]), Locus::Arc(order[2])]
}

/// Facet loci in report order.
pub fn q3_loci(config: &SensorConfig) -> Result<Vec<Locus>> {
    if config.len() != 3 {
        return Err(GeoError::ReceiverCount { expected: 3, got: config.len() });
    }
    Ok(match config.canonical_order() {
        Some(order) => collinear_loci(order),
        None => Locus::ALL.to_vec(),
    })
}

/// Supporting plane of a facet, oriented so that `eval >= 0` inside.
pub fn q3_plane(config: &SensorConfig, locus: Locus) -> TPlane {
    let p = plane_from_distances(&distance_matrix(config), locus);
    let s = inward_sign(locus);
    TPlane { normal: p.normal.map(|v| s * v), offset: s * p.offset }
}

/// Evaluates every facet of Q3 at `T`.
pub fn q3_membership(config: &SensorConfig, t: RangeTriple) -> Result<Q3Report> {
    let loci = q3_loci(config)?;
    let eps = tol::FACET * tol::scale(config.d_max(), &t.to_array());
    let facets: Vec<Q3Facet> = loci
        .into_iter()
        .map(|locus| {
            let p = q3_plane(config, locus);
            Q3Facet { locus, residual: p.signed_distance(t), normal_norm: p.normal_norm() }
        })
        .collect();
    let verdict = if facets.iter().any(|f| f.residual < -eps || f.residual.is_nan()) {
        Q3Verdict::Outside
    } else {
        let on: Vec<Locus> = facets.iter().filter(|f| f.residual <= eps).map(|f| f.locus).collect();
        if on.is_empty() {
            Q3Verdict::Interior
        } else {
            Q3Verdict::OnFacet(on)
        }
    };
    Ok(Q3Report { facets, verdict })
}

/// One point per facet that violates that facet only: a point of the tangency
/// curve pushed slightly outward.
pub fn q3_witnesses(config: &SensorConfig) -> Result<Vec<(Locus, RangeTriple)>> {
    let loci = q3_loci(config)?;
    let d_max = config.d_max();
    let push = 1e-6 * d_max;
    let mut out = Vec::with_capacity(loci.len());
    for locus in loci {
        let p = q3_plane(config, locus);
        let on_facet = if let Some(order) = config.canonical_order() {
            collinear_anchor(config, order, &p)
        } else {
            let m = config.general_triangle()?;
            let s = if matches!(locus, Locus::HalfLine(..)) { 1.0 } else { 0.5 };
            ranges(&m, locus_point(&m, locus, s))
        };
        let n = p.normal_norm();
        let a = on_facet.to_array();
        let w = RangeTriple::from_array([0, 1, 2].map(|k| a[k] - push * p.normal[k] / n));
        out.push((locus, w));
    }
    Ok(out)
}

/// Collinear facets are bounded by edges through the three receiver images;
/// take the mean of the images on the facet, moved along `(1,1,1)` when the
/// facet is unbounded.
fn collinear_anchor(config: &SensorConfig, order: [usize; 3], p: &TPlane) -> RangeTriple {
    let scale = config.d_max();
    let images: Vec<RangeTriple> = (0..3)
        .map(|k| {
            let r = order[k];
            RangeTriple::from_array([0, 1, 2].map(|i| config.d(r, i)))
        })
        .collect();
    let on: Vec<RangeTriple> =
        images.iter().copied().filter(|v| p.signed_distance(*v).abs() <= 1e-12 * scale).collect();
    let n = on.len().max(1) as f64;
    let mut c = [0.0; 3];
    for v in &on {
        for k in 0..3 {
            c[k] += v[k] / n;
        }
    }
    let along = p.normal.iter().sum::<f64>().abs() <= 1e-12 * p.normal_norm();
    if along {
        for v in c.iter_mut() {
            *v += scale;
        }
    }
    RangeTriple::from_array(c)
}
