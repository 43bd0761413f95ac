use crate::error::Result;
use crate::geometry::{SensorConfig, Vec2, Vec3};
use crate::toa3::RangeTriple;

/// The range quartic written in the squares `X_i = T_i^2`.
///
/// Coefficient order: `X1^2, X2^2, X3^2, X1 X2, X1 X3, X2 X3, X1, X2, X3, 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerQuartic {
    pub coeffs: [f64; 10],
}

/// Length dimension of each coefficient, used for scale-free comparisons.
pub(crate) const COEFF_LENGTH_POWER: [i32; 10] = [2, 2, 2, 2, 2, 2, 4, 4, 4, 6];

impl KummerQuartic {
    /// Built from `d21 = m2 - m1` and `d31 = m3 - m1`; works for any labeling,
    /// collinear or not, in the plane or in space.
    pub fn from_displacements(d21: Vec3, d31: Vec3) -> Self {
        let d32 = d31 - d21;
        let (n21, n31, n32) = (d21.norm_sq(), d31.norm_sq(), d32.norm_sq());
        let (p32_31, p32_21, p31_21) = (d32.dot(d31), d32.dot(d21), d31.dot(d21));
        KummerQuartic {
            coeffs: [
                n32,
                n31,
                n21,
                -2.0 * p32_31,
                2.0 * p32_21,
                -2.0 * p31_21,
                -2.0 * p31_21 * n32,
                2.0 * p32_21 * n31,
                -2.0 * p32_31 * n21,
                n21 * n31 * n32,
            ],
        }
    }

    pub fn planar(m: &[Vec2; 3]) -> Self {
        Self::from_displacements((m[1] - m[0]).extend(0.0), (m[2] - m[0]).extend(0.0))
    }

    pub fn eval(&self, t: RangeTriple) -> f64 {
        let c = &self.coeffs;
        let (x1, x2, x3) = (t.t1 * t.t1, t.t2 * t.t2, t.t3 * t.t3);
        c[0] * x1 * x1
            + c[1] * x2 * x2
            + c[2] * x3 * x3
            + c[3] * x1 * x2
            + c[4] * x1 * x3
            + c[5] * x2 * x3
            + c[6] * x1
            + c[7] * x2
            + c[8] * x3
            + c[9]
    }
}

pub(crate) fn quartic_raw(m: &[Vec2; 3], t: RangeTriple) -> f64 {
    KummerQuartic::planar(m).eval(t)
}

/// Value of the quartic at `T`; zero exactly on the surface.
pub fn quartic_residual(config: &SensorConfig, t: RangeTriple) -> Result<f64> {
    Ok(quartic_raw(&config.general_triangle()?, t))
}

/// [`quartic_residual`] divided by `d_max^6`.
pub fn quartic_normalized(config: &SensorConfig, t: RangeTriple) -> Result<f64> {
    Ok(quartic_residual(config, t)? / config.d_max().powi(6))
}

/// Dimensionless shape parameters together with the side lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerCoeffs {
    /// cosine of the angle at `m3`
    pub a: f64,
    /// cosine of the exterior angle at `m2`
    pub b: f64,
    /// cosine of the angle at `m1`
    pub c: f64,
    pub d21: f64,
    pub d31: f64,
    pub d32: f64,
}

impl KummerCoeffs {
    pub fn from_points(m: &[Vec2; 3]) -> Self {
        let (d21, d31, d32) = (m[1] - m[0], m[2] - m[0], m[2] - m[1]);
        let (u21, u31, u32) = (d21.unit(), d31.unit(), d32.unit());
        KummerCoeffs {
            a: u32.dot(u31),
            b: u32.dot(u21),
            c: u31.dot(u21),
            d21: d21.norm(),
            d31: d31.norm(),
            d32: d32.norm(),
        }
    }
}

/// The quartic in the rescaled homogeneous coordinates
/// `t1 = T1/sqrt(d21 d31)`, `t2 = T2/sqrt(d21 d32)`, `t3 = T3/sqrt(d31 d32)`:
///
/// `F = sum t_k^4 - 2a(t1^2 t2^2 + t0^2 t3^2) + 2b(t1^2 t3^2 + t0^2 t2^2) - 2c(t2^2 t3^2 + t0^2 t1^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousForm {
    pub coeffs: KummerCoeffs,
}

impl HomogeneousForm {
    /// Symmetric coefficients `k_pq` of `t_p^2 t_q^2` (each unordered pair counted once in F).
    fn kappa(&self) -> [[f64; 4]; 4] {
        let KummerCoeffs { a, b, c, .. } = self.coeffs;
        let mut k = [[0.0; 4]; 4];
        let pairs =
            [(0, 1, -2.0 * c), (0, 2, 2.0 * b), (0, 3, -2.0 * a), (1, 2, -2.0 * a), (1, 3, 2.0 * b), (2, 3, -2.0 * c)];
        for (p, q, v) in pairs {
            k[p][q] = v;
            k[q][p] = v;
        }
        k
    }

    pub fn eval(&self, t: [f64; 4]) -> f64 {
        let k = self.kappa();
        let mut f = 0.0;
        for p in 0..4 {
            f += t[p].powi(4);
            for q in p + 1..4 {
                f += k[p][q] * t[p] * t[p] * t[q] * t[q];
            }
        }
        f
    }

    pub fn gradient(&self, t: [f64; 4]) -> [f64; 4] {
        let k = self.kappa();
        let mut g = [0.0; 4];
        for p in 0..4 {
            g[p] = 4.0 * t[p].powi(3);
            for q in 0..4 {
                g[p] += 2.0 * k[p][q] * t[p] * t[q] * t[q];
            }
        }
        g
    }

    pub fn hessian(&self, t: [f64; 4]) -> [[f64; 4]; 4] {
        let k = self.kappa();
        let mut h = [[0.0; 4]; 4];
        for p in 0..4 {
            h[p][p] = 12.0 * t[p] * t[p];
            for q in 0..4 {
                if q != p {
                    h[p][p] += 2.0 * k[p][q] * t[q] * t[q];
                    h[p][q] = 4.0 * k[p][q] * t[p] * t[q];
                }
            }
        }
        h
    }

    /// `(sqrt(d21 d31), sqrt(d21 d32), sqrt(d31 d32))`.
    pub fn scales(&self) -> [f64; 3] {
        let KummerCoeffs { d21, d31, d32, .. } = self.coeffs;
        [(d21 * d31).sqrt(), (d21 * d32).sqrt(), (d31 * d32).sqrt()]
    }

    /// Affine point `T` as `(1 : t1 : t2 : t3)`.
    pub fn rescale(&self, t: RangeTriple) -> [f64; 4] {
        let s = self.scales();
        [1.0, t.t1 / s[0], t.t2 / s[1], t.t3 / s[2]]
    }

    /// Back to `T`-space; `None` for ideal points.
    pub fn to_affine(&self, t: [f64; 4]) -> Option<RangeTriple> {
        if t[0] == 0.0 {
            return None;
        }
        let s = self.scales();
        Some(RangeTriple::new(s[0] * t[1] / t[0], s[1] * t[2] / t[0], s[2] * t[3] / t[0]))
    }

    /// `d21^2 d31^2 d32^2`, the factor between `F(1, t)` and the quartic.
    pub fn quartic_factor(&self) -> f64 {
        let KummerCoeffs { d21, d31, d32, .. } = self.coeffs;
        (d21 * d31 * d32).powi(2)
    }
}

pub fn homogeneous_form(config: &SensorConfig) -> Result<HomogeneousForm> {
    Ok(HomogeneousForm { coeffs: KummerCoeffs::from_points(&config.general_triangle()?) })
}
