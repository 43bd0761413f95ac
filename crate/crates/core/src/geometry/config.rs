use super::vector::{Vec2, Vec3};
use crate::error::{GeoError, Result};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    pub fn from_usize(d: usize) -> Result<Self> {
        match d {
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            _ => Err(GeoError::DimensionMismatch(format!("unsupported dimension {d}"))),
        }
    }

    pub fn as_usize(self) -> usize {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConfigClass {
    TwoReceivers,
    GeneralTriangle,
    /// Three receivers on a line. After canonical relabeling the middle
    /// receiver is `m3` and `d31 = rho * d21` with `0 < rho <= 1/2`.
    CollinearTriple {
        rho: f64,
    },
}

impl ConfigClass {
    pub fn name(&self) -> &'static str {
        match self {
            ConfigClass::TwoReceivers => "TwoReceivers",
            ConfigClass::GeneralTriangle => "GeneralTriangle",
            ConfigClass::CollinearTriple { .. } => "CollinearTriple",
        }
    }
}

/// Validated receiver positions. Receivers keep their input order; collinear
/// triples additionally carry a canonical relabeling.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorConfig {
    dimension: Dimension,
    receivers: Vec<Vec3>,
    class: ConfigClass,
    canonical: Option<[usize; 3]>,
    d_max: f64,
}

impl SensorConfig {
    /// Validates raw coordinate lists. `dimension` defaults to the length of
    /// the first position.
    pub fn validate(dimension: Option<usize>, raw: &[Vec<f64>]) -> Result<Self> {
        let dim = match dimension {
            Some(d) => Dimension::from_usize(d)?,
            None => Dimension::from_usize(raw.first().map_or(2, |p| p.len()))?,
        };
        let n = dim.as_usize();
        let mut pts = Vec::with_capacity(raw.len());
        for (i, p) in raw.iter().enumerate() {
            if p.len() != n {
                return Err(GeoError::DimensionMismatch(format!(
                    "receiver {} has {} coordinates, expected {n}",
                    i + 1,
                    p.len()
                )));
            }
            pts.push(Vec3::new(p[0], p[1], if n == 3 { p[2] } else { 0.0 }));
        }
        Self::build(dim, pts)
    }

    pub fn planar(points: &[Vec2]) -> Result<Self> {
        Self::build(Dimension::Two, points.iter().map(|p| p.extend(0.0)).collect())
    }

    pub fn spatial(points: &[Vec3]) -> Result<Self> {
        Self::build(Dimension::Three, points.to_vec())
    }

    fn build(dimension: Dimension, receivers: Vec<Vec3>) -> Result<Self> {
        let n = receivers.len();
        if !(2..=3).contains(&n) {
            return Err(GeoError::ReceiverCount { expected: if n < 2 { 2 } else { 3 }, got: n });
        }
        if receivers.iter().any(|p| !p.is_finite()) {
            return Err(GeoError::NonFinite);
        }
        let mut d_max: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                d_max = d_max.max(receivers[i].dist(receivers[j]));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if receivers[i].dist(receivers[j]) <= tol::DUPLICATE * d_max {
                    return Err(GeoError::DuplicateReceiver(i, j));
                }
            }
        }
        let (class, canonical) = if n == 2 { (ConfigClass::TwoReceivers, None) } else { classify_triple(&receivers) };
        Ok(SensorConfig { dimension, receivers, class, canonical, d_max })
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.receivers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.receivers.is_empty()
    }

    pub fn receivers(&self) -> &[Vec3] {
        &self.receivers
    }

    pub fn receiver(&self, i: usize) -> Vec3 {
        self.receivers[i]
    }

    pub fn class(&self) -> ConfigClass {
        self.class
    }

    pub fn is_collinear(&self) -> bool {
        matches!(self.class, ConfigClass::CollinearTriple { .. })
    }

    pub fn rho(&self) -> Option<f64> {
        match self.class {
            ConfigClass::CollinearTriple { rho } => Some(rho),
            _ => None,
        }
    }

    /// Distance between receivers `i` and `j`.
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.receivers[i].dist(self.receivers[j])
    }

    /// Largest receiver separation; the reference length for all tolerances.
    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    /// For collinear triples, `order[k]` is the input index of canonical receiver `k`.
    pub fn canonical_order(&self) -> Option<[usize; 3]> {
        self.canonical
    }

    fn expect_count(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(GeoError::ReceiverCount { expected: n, got: self.len() });
        }
        Ok(())
    }

    fn expect_dim(&self, d: Dimension) -> Result<()> {
        if self.dimension != d {
            return Err(GeoError::DimensionMismatch(format!("operation needs a {}D configuration", d.as_usize())));
        }
        Ok(())
    }

    pub fn planar_pair(&self) -> Result<[Vec2; 2]> {
        self.expect_dim(Dimension::Two)?;
        self.expect_count(2)?;
        Ok([self.receivers[0].xy(), self.receivers[1].xy()])
    }

    pub fn planar_triple(&self) -> Result<[Vec2; 3]> {
        self.expect_dim(Dimension::Two)?;
        self.expect_count(3)?;
        Ok([self.receivers[0].xy(), self.receivers[1].xy(), self.receivers[2].xy()])
    }

    /// Planar, three receivers, not collinear.
    pub fn general_triangle(&self) -> Result<[Vec2; 3]> {
        let m = self.planar_triple()?;
        if self.is_collinear() {
            return Err(GeoError::DegenerateConfig);
        }
        Ok(m)
    }

    pub fn spatial_pair(&self) -> Result<[Vec3; 2]> {
        self.expect_dim(Dimension::Three)?;
        self.expect_count(2)?;
        Ok([self.receivers[0], self.receivers[1]])
    }

    pub fn spatial_triple(&self) -> Result<[Vec3; 3]> {
        self.expect_dim(Dimension::Three)?;
        self.expect_count(3)?;
        Ok([self.receivers[0], self.receivers[1], self.receivers[2]])
    }

    /// Receivers of a collinear triple in canonical order, with the order itself.
    pub fn canonical_receivers(&self) -> Result<([Vec3; 3], [usize; 3])> {
        let order = self.canonical.ok_or(GeoError::NotCollinear)?;
        Ok((order.map(|i| self.receivers[i]), order))
    }
}

/// Twice the triangle area over the product of the two longest sides. The
/// measure does not depend on the labeling.
pub fn collinearity_measure(m: &[Vec3; 3]) -> f64 {
    let area2 = (m[1] - m[0]).cross(m[2] - m[0]).norm();
    let mut sides = [m[0].dist(m[1]), m[0].dist(m[2]), m[1].dist(m[2])];
    sides.sort_by(f64::total_cmp);
    area2 / (sides[1] * sides[2])
}

fn classify_triple(m: &[Vec3]) -> (ConfigClass, Option<[usize; 3]>) {
    let tri = [m[0], m[1], m[2]];
    if collinearity_measure(&tri) > tol::COLLINEAR {
        return (ConfigClass::GeneralTriangle, None);
    }
    // endpoints span the longest side; the remaining receiver is in the middle
    let pairs = [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)];
    let mut best = pairs[0];
    for &p in &pairs[1..] {
        if m[p.0].dist(m[p.1]) > m[best.0].dist(m[best.1]) {
            best = p;
        }
    }
    let (i, j, mid) = best;
    let (di, dj) = (m[i].dist(m[mid]), m[j].dist(m[mid]));
    let (first, second) = if dj < di { (j, i) } else { (i, j) };
    let rho = m[first].dist(m[mid]) / m[first].dist(m[second]);
    (ConfigClass::CollinearTriple { rho }, Some([first, second, mid]))
}
