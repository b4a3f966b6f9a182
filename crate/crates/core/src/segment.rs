//! Closed-form history integrals over straight (unaccelerated) worldline segments.
//!
//! A segment is the line `z(s) = z_end + u (s - s_end)` on one side of `s_end`.
//! With `K0 = x - z_end`, `b = K0.u` and `D = b^2 + K0.K0` the squared interval
//! is `-(K.K) = (s' + b)^2 - D` for `s' = s - s_end`, so every integrand below has
//! an elementary antiderivative.

use crate::error::{Error, Result};
use crate::geometry::{mdot, wedge, FieldStrength, MVec3};
use crate::worldline::Direction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSegment {
    pub z_end: MVec3,
    pub u: MVec3,
}

/// Effective endpoint data: `w = |s' + b|` at the limit of integration and `sqrt(-(K.K))` there.
#[derive(Debug, Clone, Copy)]
struct Limit {
    w: f64,
    sq: f64,
}

impl LineSegment {
    pub fn new(z_end: MVec3, u: MVec3) -> Result<Self> {
        u.check_unit_timelike()?;
        Ok(LineSegment { z_end, u })
    }

    /// Limit of integration for a segment extending to the past (retarded)
    /// or to the future (advanced) of its end point.
    fn limit(&self, x: MVec3, direction: Direction) -> Result<Limit> {
        let k0 = x - self.z_end;
        let b = mdot(k0, self.u);
        let kk = mdot(k0, k0);
        let perp = k0 + self.u * b;
        let d = mdot(perp, perp).max(0.0);
        let inside = match direction {
            Direction::Retarded => b < 0.0 && kk < 0.0,
            Direction::Advanced => b > 0.0 && kk < 0.0,
        };
        if inside {
            Ok(Limit { w: b.abs(), sq: (-kk).sqrt() })
        } else {
            if d == 0.0 {
                return Err(Error::OnWorldline { tau: f64::NAN });
            }
            Ok(Limit { w: d.sqrt(), sq: 0.0 })
        }
    }

    /// Covariant potential `A_mu` sourced by the segment, with the logarithmic
    /// divergence of the infinite end removed.
    pub fn potential(&self, e: f64, x: MVec3, direction: Direction) -> Result<MVec3> {
        let l = self.limit(x, direction)?;
        Ok(self.u.lowered() * (-e * (l.w + l.sq).ln()))
    }

    /// Field strength sourced by the segment.
    pub fn field(&self, e: f64, x: MVec3, direction: Direction) -> Result<FieldStrength> {
        let l = self.limit(x, direction)?;
        let k0 = x - self.z_end;
        Ok(wedge(self.u, k0) * (e / (l.w * (l.w + l.sq))))
    }

    /// `int ds / (-(q.q))^(3/2)` and `int s' ds / (-(q.q))^(3/2)` over a past segment
    /// seen from a point `x` strictly inside the future cone of `z_end`.
    fn inverse_cube_moments(&self, x: MVec3) -> Result<(f64, f64, MVec3)> {
        let k0 = x - self.z_end;
        let b = mdot(k0, self.u);
        let kk = mdot(k0, k0);
        if !(b < 0.0 && kk < 0.0) {
            return Err(Error::invalid("observation point must lie inside the future cone of the segment end"));
        }
        let w = -b;
        let sq = (-kk).sqrt();
        let i1 = 1.0 / (sq * (w + sq));
        let i2 = -1.0 / sq - b * i1;
        Ok((i1, i2, k0))
    }

    /// Tail Lorentz force integral over a past segment:
    /// `e^2 int ds [-(q.u1) u + (u1.u) q] / (-(q.q))^(3/2)` with `q = x - z(s)`.
    pub fn tail_force(&self, e: f64, x: MVec3, u1: MVec3) -> Result<MVec3> {
        let (i1, _, k0) = self.inverse_cube_moments(x)?;
        let v = k0 * mdot(u1, self.u) - self.u * mdot(k0, u1);
        Ok(v * (e * e * i1))
    }

    /// Mass-rate integral over a past segment:
    /// `(e^2/2) int ds [(q.u1) - (q.u)] / (-(q.q))^(3/2)`.
    pub fn mass_rate(&self, e: f64, x: MVec3, u1: MVec3) -> Result<f64> {
        let (i1, i2, k0) = self.inverse_cube_moments(x)?;
        let alpha = mdot(k0, u1) - mdot(k0, self.u);
        let beta = -mdot(self.u, u1) - 1.0;
        Ok(0.5 * e * e * (alpha * i1 + beta * i2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};

    fn rest() -> LineSegment {
        LineSegment::new(MVec3::ZERO, MVec3::REST).unwrap()
    }

    #[test]
    fn truncated_static_field_hand_values() {
        let f = rest().field(1.0, MVec3::new(10.0, 3.0, 4.0), Direction::Retarded).unwrap();
        let factor = 1.0 - 0.75f64.sqrt();
        assert!((f.e1 - 0.12 * factor).abs() < 1e-15);
        assert!((f.e2 - 0.16 * factor).abs() < 1e-15);
        assert!((f.e1 - 0.016_076_951_545_867_36).abs() < 1e-12);
        assert_eq!(f.h, 0.0);
    }

    #[test]
    fn fully_visible_segment_gives_coulomb_field_and_log_potential() {
        // Field point outside the future cone of the end: the whole segment up to tau_ret counts.
        let x = MVec3::new(1.0, 3.0, 4.0);
        let f = rest().field(2.0, x, Direction::Retarded).unwrap();
        assert!((f.e1 - 2.0 * 3.0 / 25.0).abs() < 1e-15);
        assert!((f.e2 - 2.0 * 4.0 / 25.0).abs() < 1e-15);
        let a = rest().potential(1.0, x, Direction::Retarded).unwrap();
        assert!((a.t - 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn segment_field_matches_quadrature() {
        let u = MVec3::velocity_from_spatial(0.4, -0.3);
        let seg = LineSegment::new(MVec3::new(0.0, 0.5, 0.2), u).unwrap();
        let x = MVec3::new(7.0, 2.0, -1.0);
        let got = seg.field(1.0, x, Direction::Retarded).unwrap();
        // Direct integral of e (u ^ K)/(r^2 sqrt(-(K.K))) over s' in (-inf, 0], mapped to (0, 1].
        let integrand = |t: f64| -> Result<FieldStrength> {
            if t == 0.0 {
                return Ok(FieldStrength::ZERO);
            }
            let s = 1.0 - 1.0 / t;
            let k = x - (seg.z_end + u * s);
            let r = -mdot(k, u);
            let kk = -mdot(k, k);
            Ok(wedge(u, k) * (1.0 / (r * r * kk.sqrt() * t * t)))
        };
        let want = integrate(integrand, 0.0, 1.0, QuadOptions::new(1e-13, 0.0)).unwrap().value;
        assert!((got - want).max_abs() < 1e-11, "{got:?} vs {want:?}");
    }

    #[test]
    fn tail_force_and_mass_rate_match_quadrature() {
        let ua = MVec3::velocity_from_spatial(0.2, 0.1);
        let seg = LineSegment::new(MVec3::new(-1.0, 0.3, 0.0), ua).unwrap();
        let x = MVec3::new(2.0, 1.0, 0.4);
        let u1 = MVec3::velocity_from_spatial(0.7, -0.5);
        let e = 0.8;
        let got_f = seg.tail_force(e, x, u1).unwrap();
        let got_m = seg.mass_rate(e, x, u1).unwrap();
        let integrand = |t: f64| -> Result<(MVec3, f64)> {
            if t == 0.0 {
                return Ok((MVec3::ZERO, 0.0));
            }
            let s = 1.0 - 1.0 / t;
            let q = x - (seg.z_end + ua * s);
            let qq = (-mdot(q, q)).powf(1.5);
            let f = (ua * (-mdot(q, u1)) + q * mdot(u1, ua)) * (e * e / qq);
            let m = 0.5 * e * e * (mdot(q, u1) - mdot(q, ua)) / qq;
            Ok((f / (t * t), m / (t * t)))
        };
        let wf = integrate(|t| integrand(t).map(|v| v.0), 0.0, 1.0, QuadOptions::new(1e-13, 0.0)).unwrap().value;
        let wm = integrate(|t| integrand(t).map(|v| v.1), 0.0, 1.0, QuadOptions::new(1e-13, 1e-15)).unwrap().value;
        assert!((got_f - wf).max_abs() < 1e-11);
        assert!((got_m - wm).abs() < 1e-11);
    }

    #[test]
    fn advanced_segment_mirrors_retarded() {
        let seg = rest();
        let x = MVec3::new(-10.0, 3.0, 4.0);
        let adv = seg.field(1.0, x, Direction::Advanced).unwrap();
        let ret = seg.field(1.0, MVec3::new(10.0, 3.0, 4.0), Direction::Retarded).unwrap();
        assert!((adv - ret).max_abs() < 1e-15);
    }

    #[test]
    fn on_line_point_is_rejected() {
        let seg = rest();
        assert!(matches!(seg.field(1.0, MVec3::new(-1.0, 0.0, 0.0), Direction::Retarded), Err(Error::OnWorldline { .. })));
    }
}
