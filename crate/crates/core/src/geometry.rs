//! Vector and tensor algebra on three-dimensional Minkowski space.
//!
//! Metric signature is `diag(-1, 1, 1)` with index 0 the time component and
//! `c = 1`. A [`MVec3`] always carries contravariant components. Field tensors
//! are packed as `(E1, E2, H)` with covariant layout
//!
//! ```text
//!           |  0   -E1  -E2 |
//! F_{ab} =  |  E1   0    H  |
//!           |  E2  -H    0  |
//! ```

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|(u.u) + 1|` for a velocity to count as normalized, scaled by
/// `max(1, (u^0)^2)` to absorb rounding in boosted frames.
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MVec3 {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl MVec3 {
    pub const ZERO: MVec3 = MVec3 { t: 0.0, x: 0.0, y: 0.0 };
    /// Four-velocity of a particle at rest.
    pub const REST: MVec3 = MVec3 { t: 1.0, x: 0.0, y: 0.0 };

    pub const fn new(t: f64, x: f64, y: f64) -> Self {
        MVec3 { t, x, y }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.t, self.x, self.y]
    }

    pub fn from_array(c: [f64; 3]) -> Self {
        MVec3::new(c[0], c[1], c[2])
    }

    /// Components with the index lowered by the metric.
    pub fn lowered(self) -> Self {
        MVec3::new(-self.t, self.x, self.y)
    }

    pub fn dot(self, other: MVec3) -> f64 {
        mdot(self, other)
    }

    /// Euclidean norm of the spatial part.
    pub fn spatial_norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Largest absolute component; used for tolerance scaling.
    pub fn max_abs(self) -> f64 {
        self.t.abs().max(self.x.abs()).max(self.y.abs())
    }

    pub fn is_finite(self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.y.is_finite()
    }

    /// Unit timelike velocity with the given spatial part.
    pub fn velocity_from_spatial(ux: f64, uy: f64) -> Self {
        MVec3::new((1.0 + ux * ux + uy * uy).sqrt(), ux, uy)
    }

    /// Restore `(u.u) = -1` by recomputing the time component from the spatial part.
    pub fn renormalized_velocity(self) -> Self {
        MVec3::velocity_from_spatial(self.x, self.y)
    }

    /// Component of `self` orthogonal to the unit timelike vector `u`.
    pub fn orthogonal_to(self, u: MVec3) -> Self {
        self + u * mdot(self, u)
    }

    pub fn check_unit_timelike(self) -> Result<()> {
        let norm = mdot(self, self);
        if (norm + 1.0).abs() > UNIT_TOL * self.t.powi(2).max(1.0) || self.t <= 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }
}

/// Minkowski scalar product `-a^0 b^0 + a^1 b^1 + a^2 b^2`.
#[inline]
pub fn mdot(a: MVec3, b: MVec3) -> f64 {
    -a.t * b.t + a.x * b.x + a.y * b.y
}

impl Add for MVec3 {
    type Output = MVec3;
    #[inline]
    fn add(self, o: MVec3) -> MVec3 {
        MVec3::new(self.t + o.t, self.x + o.x, self.y + o.y)
    }
}

impl Sub for MVec3 {
    type Output = MVec3;
    #[inline]
    fn sub(self, o: MVec3) -> MVec3 {
        MVec3::new(self.t - o.t, self.x - o.x, self.y - o.y)
    }
}

impl Neg for MVec3 {
    type Output = MVec3;
    #[inline]
    fn neg(self) -> MVec3 {
        MVec3::new(-self.t, -self.x, -self.y)
    }
}

impl Mul<f64> for MVec3 {
    type Output = MVec3;
    #[inline]
    fn mul(self, k: f64) -> MVec3 {
        MVec3::new(self.t * k, self.x * k, self.y * k)
    }
}

impl Mul<MVec3> for f64 {
    type Output = MVec3;
    #[inline]
    fn mul(self, v: MVec3) -> MVec3 {
        v * self
    }
}

impl Div<f64> for MVec3 {
    type Output = MVec3;
    #[inline]
    fn div(self, k: f64) -> MVec3 {
        MVec3::new(self.t / k, self.x / k, self.y / k)
    }
}

impl AddAssign for MVec3 {
    #[inline]
    fn add_assign(&mut self, o: MVec3) {
        *self = *self + o;
    }
}

impl SubAssign for MVec3 {
    #[inline]
    fn sub_assign(&mut self, o: MVec3) {
        *self = *self - o;
    }
}

/// Antisymmetric field tensor stored by its three independent components.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldStrength {
    pub e1: f64,
    pub e2: f64,
    pub h: f64,
}

impl FieldStrength {
    pub const ZERO: FieldStrength = FieldStrength { e1: 0.0, e2: 0.0, h: 0.0 };

    pub const fn new(e1: f64, e2: f64, h: f64) -> Self {
        FieldStrength { e1, e2, h }
    }

    /// Covariant array `F_{ab}`.
    pub fn covariant(&self) -> [[f64; 3]; 3] {
        [
            [0.0, -self.e1, -self.e2],
            [self.e1, 0.0, self.h],
            [self.e2, -self.h, 0.0],
        ]
    }

    /// Contravariant array `F^{ab}`; same as [`raise_indices`].
    pub fn contravariant(&self) -> [[f64; 3]; 3] {
        raise_indices(self)
    }

    /// Rebuild from a covariant array, reading the upper triangle.
    pub fn from_covariant(f: &[[f64; 3]; 3]) -> Self {
        FieldStrength::new(-f[0][1], -f[0][2], f[1][2])
    }

    /// Rebuild from a contravariant array, reading the upper triangle.
    pub fn from_contravariant(f: &[[f64; 3]; 3]) -> Self {
        FieldStrength::new(f[0][1], f[0][2], f[1][2])
    }

    /// `F^{ab} v_b`, the contraction used by the Lorentz force.
    #[inline]
    pub fn contract(&self, v: MVec3) -> MVec3 {
        MVec3::new(
            self.e1 * v.x + self.e2 * v.y,
            self.e1 * v.t + self.h * v.y,
            self.e2 * v.t - self.h * v.x,
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.e1.abs().max(self.e2.abs()).max(self.h.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.e1.is_finite() && self.e2.is_finite() && self.h.is_finite()
    }
}

impl Add for FieldStrength {
    type Output = FieldStrength;
    #[inline]
    fn add(self, o: FieldStrength) -> FieldStrength {
        FieldStrength::new(self.e1 + o.e1, self.e2 + o.e2, self.h + o.h)
    }
}

impl Sub for FieldStrength {
    type Output = FieldStrength;
    #[inline]
    fn sub(self, o: FieldStrength) -> FieldStrength {
        FieldStrength::new(self.e1 - o.e1, self.e2 - o.e2, self.h - o.h)
    }
}

impl Neg for FieldStrength {
    type Output = FieldStrength;
    #[inline]
    fn neg(self) -> FieldStrength {
        FieldStrength::new(-self.e1, -self.e2, -self.h)
    }
}

impl Mul<f64> for FieldStrength {
    type Output = FieldStrength;
    #[inline]
    fn mul(self, k: f64) -> FieldStrength {
        FieldStrength::new(self.e1 * k, self.e2 * k, self.h * k)
    }
}

impl AddAssign for FieldStrength {
    #[inline]
    fn add_assign(&mut self, o: FieldStrength) {
        *self = *self + o;
    }
}

/// `(a ^ b)_{mn} = a_m b_n - a_n b_m` with indices lowered by the metric.
#[inline]
pub fn wedge(a: MVec3, b: MVec3) -> FieldStrength {
    FieldStrength::new(
        a.t * b.x - a.x * b.t,
        a.t * b.y - a.y * b.t,
        a.x * b.y - a.y * b.x,
    )
}

/// `F^{mn} = eta^{ma} eta^{nb} F_{ab}`.
pub fn raise_indices(f: &FieldStrength) -> [[f64; 3]; 3] {
    let cov = f.covariant();
    let eta = [-1.0, 1.0, 1.0];
    let mut out = [[0.0; 3]; 3];
    for (m, row) in out.iter_mut().enumerate() {
        for (n, v) in row.iter_mut().enumerate() {
            *v = eta[m] * eta[n] * cov[m][n];
        }
    }
    out
}

/// `F_{mn} = eta_{ma} eta_{nb} F^{ab}`.
pub fn lower_indices(f: &[[f64; 3]; 3]) -> FieldStrength {
    let eta = [-1.0, 1.0, 1.0];
    let mut cov = [[0.0; 3]; 3];
    for m in 0..3 {
        for n in 0..3 {
            cov[m][n] = eta[m] * eta[n] * f[m][n];
        }
    }
    FieldStrength::from_covariant(&cov)
}

/// Lorentz force `e F^{ma} u_a` on a charge moving with unit velocity `u`.
pub fn lorentz_force(f: &FieldStrength, u: MVec3, e: f64) -> Result<MVec3> {
    u.check_unit_timelike()?;
    Ok(f.contract(u) * e)
}

/// Antisymmetric contravariant rank-2 tensor `M^{mn}`, stored as `(M^01, M^02, M^12)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AngularMomentum2 {
    pub m01: f64,
    pub m02: f64,
    pub m12: f64,
}

impl AngularMomentum2 {
    pub const ZERO: AngularMomentum2 = AngularMomentum2 { m01: 0.0, m02: 0.0, m12: 0.0 };

    pub const fn new(m01: f64, m02: f64, m12: f64) -> Self {
        AngularMomentum2 { m01, m02, m12 }
    }

    /// `a^m b^n - a^n b^m`.
    pub fn wedge(a: MVec3, b: MVec3) -> Self {
        AngularMomentum2::new(a.t * b.x - a.x * b.t, a.t * b.y - a.y * b.t, a.x * b.y - a.y * b.x)
    }

    pub fn component(&self, m: usize, n: usize) -> f64 {
        let full = self.to_matrix();
        full[m][n]
    }

    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        [
            [0.0, self.m01, self.m02],
            [-self.m01, 0.0, self.m12],
            [-self.m02, -self.m12, 0.0],
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.m01.abs().max(self.m02.abs()).max(self.m12.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.m01.is_finite() && self.m02.is_finite() && self.m12.is_finite()
    }
}

impl Add for AngularMomentum2 {
    type Output = AngularMomentum2;
    fn add(self, o: AngularMomentum2) -> AngularMomentum2 {
        AngularMomentum2::new(self.m01 + o.m01, self.m02 + o.m02, self.m12 + o.m12)
    }
}

impl Sub for AngularMomentum2 {
    type Output = AngularMomentum2;
    fn sub(self, o: AngularMomentum2) -> AngularMomentum2 {
        AngularMomentum2::new(self.m01 - o.m01, self.m02 - o.m02, self.m12 - o.m12)
    }
}

impl Mul<f64> for AngularMomentum2 {
    type Output = AngularMomentum2;
    fn mul(self, k: f64) -> AngularMomentum2 {
        AngularMomentum2::new(self.m01 * k, self.m02 * k, self.m12 * k)
    }
}
