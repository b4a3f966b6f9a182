//! Potentials and field strengths as history integrals, closed forms, and a
//! finite-difference Maxwell checker.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lorentz_force, mdot, wedge, FieldStrength, MVec3};
use crate::quadrature::{integrate_sqrt_lower, integrate_sqrt_upper, Integrand, QuadOptions};
use crate::segment::LineSegment;
use crate::worldline::{AsymptoticRegime, Direction, UniformWorldline, Worldline};

pub const DEFAULT_QUAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldQuery {
    pub x: MVec3,
    pub charge: f64,
    pub direction: Direction,
    pub quad_tol: f64,
}

impl FieldQuery {
    pub fn retarded(x: MVec3, charge: f64) -> Self {
        FieldQuery { x, charge, direction: Direction::Retarded, quad_tol: DEFAULT_QUAD_TOL }
    }

    pub fn advanced(x: MVec3, charge: f64) -> Self {
        FieldQuery { x, charge, direction: Direction::Advanced, quad_tol: DEFAULT_QUAD_TOL }
    }

    pub fn with_tol(mut self, quad_tol: f64) -> Self {
        self.quad_tol = quad_tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.quad_tol > 0.0 && self.quad_tol <= 1e-2) {
            return Err(Error::invalid(format!("quad_tol must lie in (0, 1e-2], got {}", self.quad_tol)));
        }
        if !self.x.is_finite() || !self.charge.is_finite() {
            return Err(Error::invalid("field point and charge must be finite"));
        }
        Ok(())
    }
}

/// Field strength together with the quadrature error estimate of its history part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub field: FieldStrength,
    pub quad_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxwellResidual {
    pub faraday: f64,
    pub gauss: f64,
    pub ampere1: f64,
    pub ampere2: f64,
    pub h: f64,
}

impl MaxwellResidual {
    pub fn components(&self) -> [f64; 4] {
        [self.faraday, self.gauss, self.ampere1, self.ampere2]
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Straight segment standing in for the history beyond the split point, if the
/// worldline declares one in the requested direction.
fn asymptote(w: &dyn Worldline, direction: Direction) -> Result<(f64, LineSegment)> {
    let split = match direction {
        Direction::Retarded => match w.asymptotic_regime() {
            AsymptoticRegime::None => return Err(Error::MissingAsymptote("past")),
            r => r.split().expect("regime with split"),
        },
        Direction::Advanced => w.future_asymptote().ok_or(Error::MissingAsymptote("future"))?,
    };
    let st = w.eval(split)?;
    let u = match (direction, w.asymptotic_regime()) {
        (Direction::Retarded, AsymptoticRegime::StaticBefore(_)) => MVec3::REST,
        _ => st.u,
    };
    Ok((split, LineSegment { z_end: st.z, u }))
}

fn quad_options<T: Integrand>(tol: f64, closed: &T) -> QuadOptions {
    QuadOptions::new(tol, 1e-3 * tol * closed.norm() + 1e-300)
}

/// Integrate `kernel(state, K, sqrt(-(K.K)))` over the non-straight part of the
/// history between the light-cone crossing and the split point.
fn history_integral<T, F>(w: &dyn Worldline, q: &FieldQuery, closed: &T, kernel: F) -> Result<(T, f64)>
where
    T: Integrand,
    F: Fn(&crate::worldline::WorldlineState, MVec3, f64) -> T,
{
    let p = match q.direction {
        Direction::Retarded => w.retarded_time(q.x)?,
        Direction::Advanced => w.advanced_time(q.x)?,
    };
    if p.is_coincident() {
        return Err(Error::OnWorldline { tau: p.tau });
    }
    let (split, _) = asymptote(w, q.direction)?;
    let opts = quad_options(q.quad_tol, closed);
    let eval = |tau: f64| -> Result<T> {
        let st = w.eval(tau)?;
        let k = q.x - st.z;
        let kk = -mdot(k, k);
        if kk <= 0.0 {
            return Ok(T::zero());
        }
        Ok(kernel(&st, k, kk.sqrt()))
    };
    let res = match q.direction {
        Direction::Retarded if p.tau > split => integrate_sqrt_upper(eval, split, p.tau, opts)?,
        Direction::Advanced if p.tau < split => integrate_sqrt_lower(eval, p.tau, split, opts)?,
        _ => return Ok((T::zero(), 0.0)),
    };
    Ok((res.value, res.error))
}

/// Covariant potential `A_mu` at `q.x`, renormalized by dropping the
/// logarithmic constant of the infinitely long straight history.
pub fn potential(w: &dyn Worldline, q: &FieldQuery) -> Result<MVec3> {
    q.validate()?;
    let (_, seg) = asymptote(w, q.direction)?;
    let closed = seg.potential(q.charge, q.x, q.direction)?;
    let e = q.charge;
    let (hist, _) = history_integral(w, q, &closed, |st, _k, root| st.u.lowered() * (e / root))?;
    Ok(closed + hist)
}

pub fn potential_retarded(w: &dyn Worldline, x: MVec3, e: f64) -> Result<MVec3> {
    potential(w, &FieldQuery::retarded(x, e))
}

/// Field strength with its quadrature error estimate.
pub fn field(w: &dyn Worldline, q: &FieldQuery) -> Result<FieldValue> {
    q.validate()?;
    let (_, seg) = asymptote(w, q.direction)?;
    let closed = seg.field(q.charge, q.x, q.direction)?;
    let e = q.charge;
    let (hist, err) = history_integral(w, q, &closed, |st, k, root| {
        let r = -mdot(k, st.u);
        let ka = mdot(k, st.a);
        (wedge(st.u, k) * ((1.0 + ka) / (r * r)) + wedge(st.a, k) * (1.0 / r)) * (e / root)
    })?;
    Ok(FieldValue { field: closed + hist, quad_error: err })
}

pub fn field_retarded(w: &dyn Worldline, q: &FieldQuery) -> Result<FieldStrength> {
    let q = FieldQuery { direction: Direction::Retarded, ..*q };
    Ok(field(w, &q)?.field)
}

pub fn field_advanced(w: &dyn Worldline, q: &FieldQuery) -> Result<FieldStrength> {
    let q = FieldQuery { direction: Direction::Advanced, ..*q };
    Ok(field(w, &q)?.field)
}

/// Exact retarded field `e (u ^ K)/r_ret^2` of a uniformly moving charge.
///
/// On the line itself the numerator vanishes identically and zero is returned.
pub fn field_uniform_closed(z0: MVec3, u: MVec3, e: f64, x: MVec3) -> Result<FieldStrength> {
    u.check_unit_timelike()?;
    let k0 = x - z0;
    let b = mdot(k0, u);
    let perp = k0 + u * b;
    let d = mdot(perp, perp);
    if d <= 0.0 {
        return Ok(FieldStrength::ZERO);
    }
    Ok(wedge(u, k0) * (e / d))
}

/// Field of a charge that sat at the origin for `t < 0` and is absent afterwards.
pub fn field_static_segment(e: f64, x: MVec3) -> Result<FieldStrength> {
    let r = x.x.hypot(x.y);
    if !(x.t > r && r > 0.0) {
        return Err(Error::invalid(format!("field point must satisfy x0 > r > 0, got x0 = {}, r = {r}", x.t)));
    }
    let seg = LineSegment { z_end: MVec3::ZERO, u: MVec3::REST };
    seg.field(e, x, Direction::Retarded)
}

/// Force on static charge `e1` at spatial position `p1` due to the static field of `e2` at `p2`.
pub fn coulomb_force(e1: f64, p1: [f64; 2], e2: f64, p2: [f64; 2]) -> Result<MVec3> {
    let src = UniformWorldline::new(MVec3::new(0.0, p2[0], p2[1]), MVec3::REST)?;
    let f = field_uniform_closed(src.z0, src.u, e2, MVec3::new(0.0, p1[0], p1[1]))?;
    lorentz_force(&f, MVec3::REST, e1)
}

/// Central-difference Maxwell residuals of an arbitrary field at `x`.
pub fn maxwell_residuals_of<F>(f: F, x: MVec3, h: f64) -> Result<MaxwellResidual>
where
    F: Fn(MVec3) -> Result<FieldStrength>,
{
    if !(h > 0.0) {
        return Err(Error::invalid("stencil spacing must be positive"));
    }
    let basis = [MVec3::new(1.0, 0.0, 0.0), MVec3::new(0.0, 1.0, 0.0), MVec3::new(0.0, 0.0, 1.0)];
    let mut d = [FieldStrength::ZERO; 3];
    for (k, e) in basis.iter().enumerate() {
        let p = f(x + *e * h)?;
        let m = f(x - *e * h)?;
        d[k] = (p - m) * (0.5 / h);
    }
    let res = MaxwellResidual {
        faraday: d[0].h - d[2].e1 + d[1].e2,
        gauss: d[1].e1 + d[2].e2,
        ampere1: -d[0].e1 + d[2].h,
        ampere2: -d[0].e2 - d[1].h,
        h,
    };
    if !res.components().iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite { tau: f64::NAN });
    }
    Ok(res)
}

/// Maxwell residuals of the retarded field of a worldline, quadrature at tight tolerance.
pub fn maxwell_residuals(w: &dyn Worldline, x: MVec3, e: f64, h: f64) -> Result<MaxwellResidual> {
    maxwell_residuals_of(|p| field_retarded(w, &FieldQuery::retarded(p, e).with_tol(1e-12)), x, h)
}

/// Default Maxwell stencil spacing for a field point.
pub fn default_stencil(x: MVec3) -> f64 {
    1e-3 * (1.0 + x.max_abs())
}

/// Rectangular grid in (x1, x2) at fixed time x0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x0: f64,
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
    pub n1: usize,
    pub n2: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<MVec3> {
        let step = |lo: f64, hi: f64, n: usize, i: usize| if n <= 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
        let mut pts = Vec::with_capacity(self.n1 * self.n2);
        for j in 0..self.n2 {
            for i in 0..self.n1 {
                pts.push(MVec3::new(self.x0, step(self.x1_min, self.x1_max, self.n1, i), step(self.x2_min, self.x2_max, self.n2, j)));
            }
        }
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMapRow {
    pub x: MVec3,
    pub field: FieldStrength,
    /// Quadrature error estimate, or -1 when the point could not be evaluated.
    pub quad_error: f64,
}

/// Evaluate the field on every grid point in parallel, preserving grid order.
///
/// Points where evaluation fails (for instance on the worldline) produce a row
/// with NaN components and `quad_error = -1`.
pub fn field_map(w: &dyn Worldline, e: f64, direction: Direction, grid: &GridSpec, quad_tol: f64) -> Vec<FieldMapRow> {
    grid.points()
        .into_par_iter()
        .map(|x| {
            let q = FieldQuery { x, charge: e, direction, quad_tol };
            match field(w, &q) {
                Ok(v) => FieldMapRow { x, field: v.field, quad_error: v.quad_error },
                Err(err) => {
                    log::warn!("field map point ({}, {}, {}) skipped: {err}", x.t, x.x, x.y);
                    FieldMapRow { x, field: FieldStrength::new(f64::NAN, f64::NAN, f64::NAN), quad_error: -1.0 }
                }
            }
        })
        .collect()
}

pub fn write_field_map_csv(rows: &[FieldMapRow], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "x0,x1,x2,E1,E2,H,quad_error")?;
    for r in rows {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.x.t, r.x.x, r.x.y, r.field.e1, r.field.e2, r.field.h, r.quad_error
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_field_map_csv(path: &Path) -> Result<Vec<FieldMapRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let mut v = [0.0; 7];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = rec
                .get(k)
                .ok_or_else(|| Error::invalid("field map row has fewer than 7 columns"))?
                .trim()
                .parse()
                .map_err(|e| Error::invalid(format!("bad number in field map: {e}")))?;
        }
        rows.push(FieldMapRow {
            x: MVec3::new(v[0], v[1], v[2]),
            field: FieldStrength::new(v[3], v[4], v[5]),
            quad_error: v[6],
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldline::{CircularWorldline, HyperbolicWorldline, StaticWorldline};

    #[test]
    fn static_log_potential() {
        let w = StaticWorldline::at_origin();
        let a = potential_retarded(&w, MVec3::new(10.0, 1.0, 0.0), 1.0).unwrap();
        assert!(a.t.abs() < 1e-10);
        let a = potential_retarded(&w, MVec3::new(10.0, 2.0, 0.0), 1.0).unwrap();
        assert!((a.t - 2f64.ln()).abs() < 1e-9);
        assert_eq!(a.x, 0.0);
    }

    #[test]
    fn static_field_via_quadrature() {
        let w = StaticWorldline::at_origin();
        let f = field_retarded(&w, &FieldQuery::retarded(MVec3::new(12.0, 3.0, 4.0), 1.0)).unwrap();
        assert!((f.e1 - 0.12).abs() < 1e-9);
        assert!((f.e2 - 0.16).abs() < 1e-9);
        assert!(f.h.abs() < 1e-12);
        let adv = field_advanced(&w, &FieldQuery::advanced(MVec3::new(-12.0, 3.0, 4.0), 1.0)).unwrap();
        assert!((adv - f).max_abs() < 1e-12);
        let adv_same_point = field_advanced(&w, &FieldQuery::advanced(MVec3::new(12.0, 3.0, 4.0), 1.0)).unwrap();
        assert!((adv_same_point - f).max_abs() < 1e-12);
    }

    #[test]
    fn uniform_closed_form_examples() {
        let f = field_uniform_closed(MVec3::ZERO, MVec3::REST, 1.0, MVec3::new(7.0, 3.0, 4.0)).unwrap();
        assert!((f.e1 - 0.12).abs() < 1e-15);
        assert!((f.e2 - 0.16).abs() < 1e-15);
        let u = MVec3::velocity_from_spatial(0.3, 0.2);
        let on = field_uniform_closed(MVec3::ZERO, u, 1.0, u * 2.5).unwrap();
        assert!(on.max_abs() < 1e-15);
    }

    #[test]
    fn boosted_uniform_quadrature_matches_closed_form() {
        let w = UniformWorldline::with_velocity(MVec3::new(0.0, 0.2, -0.1), 0.5, 0.0).unwrap();
        for x in [MVec3::new(4.0, 1.0, 2.0), MVec3::new(1.0, -3.0, 0.5), MVec3::new(10.0, 4.0, 4.0)] {
            let q = FieldQuery::retarded(x, 1.3);
            let num = field_retarded(&w, &q).unwrap();
            let exact = field_uniform_closed(w.z0, w.u, 1.3, x).unwrap();
            assert!((num - exact).max_abs() < 1e-9 * exact.max_abs(), "{num:?} {exact:?}");
        }
    }

    #[test]
    fn static_segment_example() {
        let f = field_static_segment(1.0, MVec3::new(10.0, 3.0, 4.0)).unwrap();
        assert!((f.e1 - 0.016_077).abs() < 1e-6);
        assert!((f.e2 - 0.021_436).abs() < 1e-6);
        let near = field_static_segment(1.0, MVec3::new(5.0 * (1.0 + 1e-12), 3.0, 4.0)).unwrap();
        assert!((near.e1 - 0.12).abs() < 1e-6);
        let late = field_static_segment(1.0, MVec3::new(1e4, 3.0, 4.0)).unwrap();
        assert!(late.e1.abs() < 0.12 * 25.0 / (2.0 * 1e8) * 1.01);
        assert!(field_static_segment(1.0, MVec3::new(4.0, 3.0, 4.0)).is_err());
    }

    #[test]
    fn truncated_static_segment_via_quadrature() {
        // Hyperbolic worldline seen before the light signal of the departure arrives:
        // only the static prehistory contributes.
        let w = HyperbolicWorldline::new(1.0).unwrap();
        let x = MVec3::new(0.5, -2.0, 1.0);
        let f = field_retarded(&w, &FieldQuery::retarded(x, 1.0)).unwrap();
        let r2 = 5.0;
        assert!((f.e1 + 2.0 / r2).abs() < 1e-12 && (f.e2 - 1.0 / r2).abs() < 1e-12);
    }

    #[test]
    fn coulomb_law() {
        for r in [0.5, 1.0, 2.0] {
            let f = coulomb_force(1.5, [r, 0.0], -0.7, [0.0, 0.0]).unwrap();
            assert!((f.x - 1.5 * -0.7 / r).abs() < 1e-12);
            assert_eq!(f.y, 0.0);
            assert_eq!(f.t, 0.0);
        }
    }

    #[test]
    fn potential_derivatives_reproduce_field() {
        let w = HyperbolicWorldline::new(0.8).unwrap();
        let e = 1.0;
        let x = MVec3::new(3.0, 2.0, 1.5);
        let tol = 1e-12;
        let a = |p: MVec3| potential(&w, &FieldQuery::retarded(p, e).with_tol(tol)).unwrap();
        let h = 1e-4;
        let basis = [MVec3::new(1.0, 0.0, 0.0), MVec3::new(0.0, 1.0, 0.0), MVec3::new(0.0, 0.0, 1.0)];
        let mut d = [[0.0; 3]; 3];
        for (m, b) in basis.iter().enumerate() {
            let ap = a(x + *b * h).to_array();
            let am = a(x - *b * h).to_array();
            for n in 0..3 {
                d[m][n] = (ap[n] - am[n]) / (2.0 * h);
            }
        }
        let fcov = [[0.0, d[0][1] - d[1][0], d[0][2] - d[2][0]], [0.0, 0.0, d[1][2] - d[2][1]], [0.0; 3]];
        let from_a = FieldStrength::new(-fcov[0][1], -fcov[0][2], fcov[1][2]);
        let f = field_retarded(&w, &FieldQuery::retarded(x, e).with_tol(tol)).unwrap();
        assert!((from_a - f).max_abs() < 1e-5, "{from_a:?} vs {f:?}");
    }

    #[test]
    fn maxwell_static_gauss() {
        let r = maxwell_residuals_of(|p| field_uniform_closed(MVec3::ZERO, MVec3::REST, 1.0, p), MVec3::new(0.0, 3.0, 4.0), 1e-3).unwrap();
        assert!(r.gauss.abs() < 1e-6);
        assert!(r.faraday.abs() < 1e-6);
    }

    #[test]
    fn missing_asymptote_is_reported() {
        let w = CircularWorldline::new(0.3, 1.0, 0.0).unwrap();
        let r = field_retarded(&w, &FieldQuery::retarded(MVec3::new(1.0, 2.0, 0.0), 1.0));
        assert!(matches!(r, Err(Error::MissingAsymptote(_))));
        let r = field_retarded(&StaticWorldline::at_origin(), &FieldQuery::retarded(MVec3::new(1.0, 0.0, 0.0), 1.0));
        assert!(matches!(r, Err(Error::OnWorldline { .. })));
        let r = field_retarded(&StaticWorldline::at_origin(), &FieldQuery::retarded(MVec3::new(1.0, 2.0, 0.0), 1.0).with_tol(0.5));
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn field_map_marks_bad_points() {
        let w = StaticWorldline::at_origin();
        let grid = GridSpec { x0: 3.0, x1_min: -1.0, x1_max: 1.0, x2_min: -1.0, x2_max: 1.0, n1: 3, n2: 3 };
        let rows = field_map(&w, 1.0, Direction::Retarded, &grid, 1e-9);
        assert_eq!(rows.len(), 9);
        assert_eq!(rows[4].quad_error, -1.0);
        assert!(rows[4].field.e1.is_nan());
        assert!((rows[5].field.e1 - 1.0).abs() < 1e-9);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        write_field_map_csv(&rows, &p).unwrap();
        let back = read_field_map_csv(&p).unwrap();
        assert_eq!(back.len(), 9);
        assert_eq!(back[5].field, rows[5].field);
    }
}
