//! Minkowski algebra in dimension 2+1 and 3+1, signature (+,...,+,-).
//!
//! Hodge convention in 2+1: `*(e1^e2) = -e3`, `*(e1^e3) = -e2`, `*(e2^e3) = e1`,
//! and `*(e1^e2^e3) = 1`. With these choices
//! `<*(u^v), w> = *(u^v^w) = det[u, v, w]`.

use std::ops::{Add, Mul, Neg, Sub};

use super::vector::{Vec2, Vec3};

/// Event `(x, y, t)`; time is measured in length units (unit propagation speed).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpacetimeVec3 {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

/// Event `(x, y, z, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpacetimeVec4 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl SpacetimeVec3 {
    pub const E1: SpacetimeVec3 = SpacetimeVec3 { x: 1.0, y: 0.0, t: 0.0 };
    pub const E2: SpacetimeVec3 = SpacetimeVec3 { x: 0.0, y: 1.0, t: 0.0 };
    pub const E3: SpacetimeVec3 = SpacetimeVec3 { x: 0.0, y: 0.0, t: 1.0 };

    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        SpacetimeVec3 { x, y, t }
    }

    pub fn from_spatial(p: Vec2, t: f64) -> Self {
        SpacetimeVec3::new(p.x, p.y, t)
    }

    pub fn spatial(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn norm_sq(self) -> f64 {
        minkowski_inner(self, self)
    }
}

impl SpacetimeVec4 {
    pub const E3: SpacetimeVec4 = SpacetimeVec4 { x: 0.0, y: 0.0, z: 1.0, t: 0.0 };
    pub const E4: SpacetimeVec4 = SpacetimeVec4 { x: 0.0, y: 0.0, z: 0.0, t: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        SpacetimeVec4 { x, y, z, t }
    }

    pub fn from_spatial(p: Vec3, t: f64) -> Self {
        SpacetimeVec4::new(p.x, p.y, p.z, t)
    }

    pub fn spatial(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn norm_sq(self) -> f64 {
        minkowski_inner4(self, self)
    }

    fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.z, self.t]
    }
}

macro_rules! impl_st_ops {
    ($t:ident, $($f:ident),+) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t { $t { $($f: self.$f + o.$f),+ } }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t { $t { $($f: self.$f - o.$f),+ } }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t { $t { $($f: -self.$f),+ } }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, s: f64) -> $t { $t { $($f: self.$f * s),+ } }
        }
        impl Mul<$t> for f64 {
            type Output = $t;
            fn mul(self, v: $t) -> $t { v * self }
        }
    };
}

impl_st_ops!(SpacetimeVec3, x, y, t);
impl_st_ops!(SpacetimeVec4, x, y, z, t);

/// `u1 v1 + u2 v2 - u3 v3`.
pub fn minkowski_inner(u: SpacetimeVec3, v: SpacetimeVec3) -> f64 {
    u.x * v.x + u.y * v.y - u.t * v.t
}

/// `*(u ^ v)`: Minkowski-orthogonal to both arguments.
pub fn hodge_cross(u: SpacetimeVec3, v: SpacetimeVec3) -> SpacetimeVec3 {
    SpacetimeVec3::new(u.y * v.t - u.t * v.y, -(u.x * v.t - u.t * v.x), -(u.x * v.y - u.y * v.x))
}

/// `*(u ^ v ^ w) = det[u, v, w]`.
pub fn triple_form(u: SpacetimeVec3, v: SpacetimeVec3, w: SpacetimeVec3) -> f64 {
    u.x * (v.y * w.t - v.t * w.y) - u.y * (v.x * w.t - v.t * w.x) + u.t * (v.x * w.y - v.y * w.x)
}

/// `u1 v1 + u2 v2 + u3 v3 - u4 v4`.
pub fn minkowski_inner4(u: SpacetimeVec4, v: SpacetimeVec4) -> f64 {
    u.x * v.x + u.y * v.y + u.z * v.z - u.t * v.t
}

fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// `*(u ^ v ^ w)` in 3+1: the vector `n` with `<n, z> = det[u, v, w, z]` for every `z`.
pub fn hodge_triple4(u: SpacetimeVec4, v: SpacetimeVec4, w: SpacetimeVec4) -> SpacetimeVec4 {
    let (u, v, w) = (u.to_array(), v.to_array(), w.to_array());
    let minor = |skip: usize| {
        let pick = |r: [f64; 4]| {
            let mut out = [0.0; 3];
            let mut k = 0;
            for (i, x) in r.iter().enumerate() {
                if i != skip {
                    out[k] = *x;
                    k += 1;
                }
            }
            out
        };
        det3(pick(u), pick(v), pick(w))
    };
    // cofactors of the last row of [u; v; w; z]
    let c = [-minor(0), minor(1), -minor(2), minor(3)];
    SpacetimeVec4::new(c[0], c[1], c[2], -c[3])
}

/// `det[u, v, w, z]`.
pub fn quad_form4(u: SpacetimeVec4, v: SpacetimeVec4, w: SpacetimeVec4, z: SpacetimeVec4) -> f64 {
    minkowski_inner4(hodge_triple4(u, v, w), z)
}

/// Solves `<X, a_k> = b_k`, k = 0..4, through the dual basis built from
/// [`hodge_triple4`]. Returns `None` when the `a_k` are dependent.
pub fn dual_solve4(a: [SpacetimeVec4; 4], b: [f64; 4]) -> Option<SpacetimeVec4> {
    let mut x = SpacetimeVec4::default();
    for k in 0..4 {
        let others: Vec<SpacetimeVec4> = (0..4).filter(|&j| j != k).map(|j| a[j]).collect();
        let n = hodge_triple4(others[0], others[1], others[2]);
        let s = minkowski_inner4(n, a[k]);
        if s == 0.0 || !s.is_finite() {
            return None;
        }
        x = x + n * (b[k] / s);
    }
    Some(x)
}
