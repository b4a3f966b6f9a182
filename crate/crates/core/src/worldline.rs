//! Trajectory families, state evaluation and light-cone root finding.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{mdot, MVec3};

/// Snapshot of a trajectory at proper time `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldlineState {
    pub tau: f64,
    pub z: MVec3,
    pub u: MVec3,
    pub a: MVec3,
    pub adot: MVec3,
}

impl WorldlineState {
    /// Largest violation of the normalization identities `u.u = -1`, `u.a = 0`
    /// and `u.adot + a.a = 0`, each scaled by the size of the terms involved.
    pub fn invariant_defects(&self) -> [f64; 3] {
        let g2 = self.u.t * self.u.t;
        [
            (mdot(self.u, self.u) + 1.0).abs() / g2.max(1.0),
            mdot(self.u, self.a).abs() / (self.u.max_abs() * self.a.max_abs()).max(1.0),
            (mdot(self.u, self.adot) + mdot(self.a, self.a)).abs()
                / (self.u.max_abs() * self.adot.max_abs() + self.a.max_abs().powi(2)).max(1.0),
        ]
    }
}

/// Behaviour of a trajectory before the split time `tau_pre`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AsymptoticRegime {
    /// At rest (`u = (1, 0, 0)`) for all `tau < tau_pre`.
    StaticBefore(f64),
    /// Constant velocity for all `tau < tau_pre`.
    UniformBefore(f64),
    None,
}

impl AsymptoticRegime {
    pub fn split(&self) -> Option<f64> {
        match *self {
            AsymptoticRegime::StaticBefore(t) | AsymptoticRegime::UniformBefore(t) => Some(t),
            AsymptoticRegime::None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Retarded,
    Advanced,
}

/// Point where the worldline crosses the light cone of a field point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Puncture {
    pub tau: f64,
    /// `|K.u|` at the crossing; zero means the field point lies on the worldline.
    pub r: f64,
}

impl Puncture {
    pub fn is_coincident(&self) -> bool {
        self.r == 0.0
    }
}

/// Separation between two events on one worldline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    pub q: MVec3,
    pub norm: f64,
    pub r_s: f64,
}

/// Chord `q = z(tau) - z(s)` resolved against `u = u(tau)`: `q = r u + perp`
/// with `perp.u = 0`, and the velocity change `du = u(s) - u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalChord {
    pub q: MVec3,
    pub r: f64,
    pub perp: MVec3,
    pub du: MVec3,
}

/// A timelike trajectory parameterized by proper time.
pub trait Worldline: Send + Sync {
    fn eval(&self, tau: f64) -> Result<WorldlineState>;

    fn asymptotic_regime(&self) -> AsymptoticRegime;

    /// Time after which the motion is known to be straight forever, if any.
    fn future_asymptote(&self) -> Option<f64> {
        None
    }

    /// Closed proper-time interval on which `eval` succeeds.
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn position(&self, tau: f64) -> Result<MVec3> {
        Ok(self.eval(tau)?.z)
    }

    /// `z(tau) - z(s)`.
    fn chord(&self, tau: f64, s: f64) -> Result<MVec3> {
        Ok(self.position(tau)? - self.position(s)?)
    }

    /// `sqrt(-(q.q))` for `q = z(tau) - z(s)`.
    fn proper_separation(&self, tau: f64, s: f64) -> Result<f64> {
        let q = self.chord(tau, s)?;
        Ok((-mdot(q, q)).max(0.0).sqrt())
    }

    /// See [`LocalChord`]. Implementations with closed forms avoid the
    /// cancellation in `perp` and `du` for nearby points.
    fn local_chord(&self, tau: f64, s: f64) -> Result<LocalChord> {
        let q = self.chord(tau, s)?;
        let u = self.eval(tau)?.u;
        let us = self.eval(s)?.u;
        let r = -mdot(q, u);
        Ok(LocalChord { q, r, perp: q - u * r, du: us - u })
    }

    /// Starting point for the light-cone root search.
    fn root_guess(&self, x: MVec3) -> f64 {
        let (lo, hi) = self.domain();
        x.t.clamp(lo, hi)
    }

    fn retarded_time(&self, x: MVec3) -> Result<Puncture> {
        light_cone_root(self, x, Direction::Retarded)
    }

    fn advanced_time(&self, x: MVec3) -> Result<Puncture> {
        light_cone_root(self, x, Direction::Advanced)
    }
}

pub fn puncture(w: &dyn Worldline, x: MVec3, direction: Direction) -> Result<Puncture> {
    match direction {
        Direction::Retarded => w.retarded_time(x),
        Direction::Advanced => w.advanced_time(x),
    }
}

/// `q = z(tau) - z(s)` together with its proper length and `r_s = -(q.u(s))`.
pub fn separation(w: &dyn Worldline, tau: f64, s: f64) -> Result<Separation> {
    if s > tau {
        return Err(Error::NotPast { tau, s });
    }
    let q = w.chord(tau, s)?;
    let qq = mdot(q, q);
    if qq > 1e-10 * (1.0 + q.max_abs().powi(2)) {
        return Err(Error::NotCausal { tau, s, qq });
    }
    let norm = w.proper_separation(tau, s)?;
    let us = w.eval(s)?.u;
    let r_s = -mdot(q, us);
    Ok(Separation { q, norm, r_s })
}

fn root_tolerance(x: MVec3) -> f64 {
    1e-12 * (1.0 + x.t * x.t + x.x * x.x + x.y * x.y)
}

/// Increasing function whose zero is the requested light-cone crossing.
fn cone_function(w: &(impl Worldline + ?Sized), x: MVec3, tau: f64, direction: Direction) -> Result<(f64, f64)> {
    let st = w.eval(tau)?;
    let dx = x.x - st.z.x;
    let dy = x.y - st.z.y;
    let dist = dx.hypot(dy);
    let (nx, ny) = if dist > 0.0 { (dx / dist, dy / dist) } else { (0.0, 0.0) };
    let radial = nx * st.u.x + ny * st.u.y;
    Ok(match direction {
        Direction::Retarded => (st.z.t - x.t + dist, st.u.t - radial),
        Direction::Advanced => (st.z.t - x.t - dist, st.u.t + radial),
    })
}

/// Generic crossing search: bracket expansion followed by safeguarded Newton.
pub fn light_cone_root(w: &(impl Worldline + ?Sized), x: MVec3, direction: Direction) -> Result<Puncture> {
    let no_root = || Error::NoRoot { x0: x.t, x1: x.x, x2: x.y };
    let (dom_lo, dom_hi) = w.domain();
    let t0 = w.root_guess(x).clamp(dom_lo, dom_hi);
    let (h0, d0) = cone_function(w, x, t0, direction)?;
    if h0 == 0.0 {
        return finish(w, x, t0, direction);
    }
    let go_right = h0 < 0.0;
    let mut step = (h0.abs() / d0.max(1.0)).max(1e-6 * (1.0 + t0.abs()));
    let (mut lo, mut hi) = (t0, t0);
    let (mut h_lo, mut h_hi) = (h0, h0);
    let mut found = false;
    for _ in 0..400 {
        if go_right {
            let cand = (hi + step).min(dom_hi);
            let (h, _) = cone_function(w, x, cand, direction)?;
            lo = hi;
            h_lo = h_hi;
            hi = cand;
            h_hi = h;
            if h >= 0.0 {
                found = true;
                break;
            }
            if cand >= dom_hi {
                break;
            }
        } else {
            let cand = (lo - step).max(dom_lo);
            let (h, _) = cone_function(w, x, cand, direction)?;
            hi = lo;
            h_hi = h_lo;
            lo = cand;
            h_lo = h;
            if h <= 0.0 {
                found = true;
                break;
            }
            if cand <= dom_lo {
                break;
            }
        }
        step *= 2.0;
    }
    if !found {
        return Err(no_root());
    }
    if h_lo == 0.0 {
        return finish(w, x, lo, direction);
    }
    if h_hi == 0.0 {
        return finish(w, x, hi, direction);
    }
    let mut t = if go_right { lo } else { hi };
    for _ in 0..200 {
        let (h, d) = cone_function(w, x, t, direction)?;
        if h == 0.0 {
            break;
        }
        if h < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
            break;
        }
        let newton = t - h / d;
        t = if d > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    finish(w, x, t, direction)
}

fn finish(w: &(impl Worldline + ?Sized), x: MVec3, tau: f64, direction: Direction) -> Result<Puncture> {
    let st = w.eval(tau)?;
    let k = x - st.z;
    let kk = mdot(k, k);
    if kk.abs() > root_tolerance(x) {
        return Err(Error::NoRoot { x0: x.t, x1: x.x, x2: x.y });
    }
    let ku = mdot(k, st.u);
    let ok = match direction {
        Direction::Retarded => ku <= 0.0,
        Direction::Advanced => ku >= 0.0,
    };
    if !ok {
        return Err(Error::NoRoot { x0: x.t, x1: x.x, x2: x.y });
    }
    let coincident = k.max_abs() <= 1e-14 * (1.0 + x.max_abs());
    Ok(Puncture { tau, r: if coincident { 0.0 } else { ku.abs() } })
}

/// Crossings of a straight line `z0 + u tau` with the light cone of `x`.
fn uniform_roots(z0: MVec3, u: MVec3, x: MVec3) -> (Puncture, Puncture) {
    let k0 = x - z0;
    let b = mdot(k0, u);
    let perp = k0 + u * b;
    let d = mdot(perp, perp).max(0.0);
    let root = d.sqrt();
    let kk = mdot(k0, k0);
    // tau_ret * tau_adv = -(K0.K0); pick the form without cancellation.
    let (ret, adv) = if b < 0.0 {
        let adv = -b + root;
        (-kk / adv, adv)
    } else if b > 0.0 {
        let ret = -b - root;
        (ret, -kk / ret)
    } else {
        (-root, root)
    };
    (Puncture { tau: ret, r: root }, Puncture { tau: adv, r: root })
}

/// Charge at rest: `z = (tau + c0, x0, y0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticWorldline {
    pub origin: MVec3,
    /// Split point for history integrals; earlier history is handled in closed form.
    pub tau_pre: f64,
}

impl StaticWorldline {
    pub fn new(origin: MVec3) -> Self {
        StaticWorldline { origin, tau_pre: 0.0 }
    }

    pub fn at_origin() -> Self {
        StaticWorldline::new(MVec3::ZERO)
    }

    pub fn with_split(mut self, tau_pre: f64) -> Self {
        self.tau_pre = tau_pre;
        self
    }
}

impl Worldline for StaticWorldline {
    fn eval(&self, tau: f64) -> Result<WorldlineState> {
        Ok(WorldlineState {
            tau,
            z: self.origin + MVec3::new(tau, 0.0, 0.0),
            u: MVec3::REST,
            a: MVec3::ZERO,
            adot: MVec3::ZERO,
        })
    }

    fn asymptotic_regime(&self) -> AsymptoticRegime {
        AsymptoticRegime::StaticBefore(self.tau_pre)
    }

    fn future_asymptote(&self) -> Option<f64> {
        Some(self.tau_pre)
    }

    fn chord(&self, tau: f64, s: f64) -> Result<MVec3> {
        Ok(MVec3::new(tau - s, 0.0, 0.0))
    }

    fn proper_separation(&self, tau: f64, s: f64) -> Result<f64> {
        Ok((tau - s).abs())
    }

    fn retarded_time(&self, x: MVec3) -> Result<Puncture> {
        Ok(uniform_roots(self.origin, MVec3::REST, x).0)
    }

    fn advanced_time(&self, x: MVec3) -> Result<Puncture> {
        Ok(uniform_roots(self.origin, MVec3::REST, x).1)
    }
}

/// Straight line `z = z0 + u tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformWorldline {
    pub z0: MVec3,
    pub u: MVec3,
    pub tau_pre: f64,
}

impl UniformWorldline {
    pub fn new(z0: MVec3, u: MVec3) -> Result<Self> {
        u.check_unit_timelike()?;
        Ok(UniformWorldline { z0, u, tau_pre: 0.0 })
    }

    /// Line through `z0` with coordinate velocity `(vx, vy)`.
    pub fn with_velocity(z0: MVec3, vx: f64, vy: f64) -> Result<Self> {
        let v2 = vx * vx + vy * vy;
        if v2 >= 1.0 {
            return Err(Error::invalid(format!("speed {} is not below the speed of light", v2.sqrt())));
        }
        let g = 1.0 / (1.0 - v2).sqrt();
        UniformWorldline::new(z0, MVec3::new(g, g * vx, g * vy))
    }

    pub fn with_split(mut self, tau_pre: f64) -> Self {
        self.tau_pre = tau_pre;
        self
    }
}

impl Worldline for UniformWorldline {
    fn eval(&self, tau: f64) -> Result<WorldlineState> {
        Ok(WorldlineState { tau, z: self.z0 + self.u * tau, u: self.u, a: MVec3::ZERO, adot: MVec3::ZERO })
    }

    fn asymptotic_regime(&self) -> AsymptoticRegime {
        AsymptoticRegime::UniformBefore(self.tau_pre)
    }

    fn future_asymptote(&self) -> Option<f64> {
        Some(self.tau_pre)
    }

    fn chord(&self, tau: f64, s: f64) -> Result<MVec3> {
        Ok(self.u * (tau - s))
    }

    fn proper_separation(&self, tau: f64, s: f64) -> Result<f64> {
        Ok((tau - s).abs())
    }

    fn retarded_time(&self, x: MVec3) -> Result<Puncture> {
        Ok(uniform_roots(self.z0, self.u, x).0)
    }

    fn advanced_time(&self, x: MVec3) -> Result<Puncture> {
        Ok(uniform_roots(self.z0, self.u, x).1)
    }
}

/// Constant proper acceleration along x^1 starting from rest at the origin at `tau = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicWorldline {
    pub accel: f64,
    /// When set the charge sits at the origin for `tau < 0`; otherwise the hyperbola is eternal.
    pub static_prehistory: bool,
}

impl HyperbolicWorldline {
    pub fn new(accel: f64) -> Result<Self> {
        if !(accel.is_finite() && accel != 0.0) {
            return Err(Error::invalid(format!("hyperbolic acceleration must be finite and nonzero, got {accel}")));
        }
        Ok(HyperbolicWorldline { accel, static_prehistory: true })
    }

    pub fn eternal(accel: f64) -> Result<Self> {
        Ok(HyperbolicWorldline { static_prehistory: false, ..HyperbolicWorldline::new(accel)? })
    }

    fn on_branch(&self, tau: f64) -> bool {
        !self.static_prehistory || tau >= 0.0
    }
}

impl Worldline for HyperbolicWorldline {
    fn eval(&self, tau: f64) -> Result<WorldlineState> {
        if !self.on_branch(tau) {
            return Ok(WorldlineState {
                tau,
                z: MVec3::new(tau, 0.0, 0.0),
                u: MVec3::REST,
                a: MVec3::ZERO,
                adot: MVec3::ZERO,
            });
        }
        let a = self.accel;
        let (sh, ch) = ((a * tau).sinh(), (a * tau).cosh());
        let half = (0.5 * a * tau).sinh();
        Ok(WorldlineState {
            tau,
            z: MVec3::new(sh / a, 2.0 * half * half / a, 0.0),
            u: MVec3::new(ch, sh, 0.0),
            a: MVec3::new(a * sh, a * ch, 0.0),
            adot: MVec3::new(a * a * ch, a * a * sh, 0.0),
        })
    }

    fn asymptotic_regime(&self) -> AsymptoticRegime {
        if self.static_prehistory {
            AsymptoticRegime::StaticBefore(0.0)
        } else {
            AsymptoticRegime::None
        }
    }

    fn chord(&self, tau: f64, s: f64) -> Result<MVec3> {
        if self.on_branch(tau) && self.on_branch(s) {
            let a = self.accel;
            let sd = (0.5 * a * (tau - s)).sinh() * 2.0 / a;
            let m = 0.5 * a * (tau + s);
            Ok(MVec3::new(m.cosh() * sd, m.sinh() * sd, 0.0))
        } else {
            Ok(self.position(tau)? - self.position(s)?)
        }
    }

    fn local_chord(&self, tau: f64, s: f64) -> Result<LocalChord> {
        if !(self.on_branch(tau) && self.on_branch(s)) {
            let q = self.chord(tau, s)?;
            let u = self.eval(tau)?.u;
            let r = -mdot(q, u);
            return Ok(LocalChord { q, r, perp: q - u * r, du: self.eval(s)?.u - u });
        }
        let a = self.accel;
        let d = a * (tau - s);
        let (ch, sh) = ((a * tau).cosh(), (a * tau).sinh());
        let u = MVec3::new(ch, sh, 0.0);
        let n = MVec3::new(sh, ch, 0.0);
        let half = (0.5 * d).sinh();
        let lift = 2.0 * half * half;
        let r = d.sinh() / a;
        Ok(LocalChord { q: self.chord(tau, s)?, r, perp: n * (-lift / a), du: u * lift - n * d.sinh() })
    }

    fn proper_separation(&self, tau: f64, s: f64) -> Result<f64> {
        if self.on_branch(tau) && self.on_branch(s) {
            let a = self.accel;
            Ok(((0.5 * a * (tau - s)).sinh() * 2.0 / a).abs())
        } else {
            let q = self.chord(tau, s)?;
            Ok((-mdot(q, q)).max(0.0).sqrt())
        }
    }

    fn root_guess(&self, x: MVec3) -> f64 {
        if x.t <= 0.0 && self.static_prehistory {
            x.t
        } else {
            (self.accel * x.t).asinh() / self.accel
        }
    }
}

/// Uniform circular motion: `z = (g tau, R cos th, R sin th)`, `th = w g tau + phi0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularWorldline {
    pub radius: f64,
    pub omega: f64,
    pub phi0: f64,
    gamma: f64,
}

impl CircularWorldline {
    pub fn new(radius: f64, omega: f64, phi0: f64) -> Result<Self> {
        let v = radius * omega;
        if !(radius > 0.0 && v.abs() < 1.0 && v.is_finite()) {
            return Err(Error::invalid(format!("circular orbit needs R > 0 and |R w| < 1, got R = {radius}, w = {omega}")));
        }
        Ok(CircularWorldline { radius, omega, phi0, gamma: 1.0 / (1.0 - v * v).sqrt() })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn angle(&self, tau: f64) -> f64 {
        self.omega * self.gamma * tau + self.phi0
    }
}

/// `1 - sinc(x)^2`, accurate for small `x`.
fn one_minus_sinc2(x: f64) -> f64 {
    if x.abs() < 0.05 {
        let x2 = x * x;
        x2 * (1.0 / 3.0 - x2 * (2.0 / 45.0 - x2 * (1.0 / 315.0 - x2 * (2.0 / 14175.0 - x2 / 233887.5))))
    } else {
        let s = x.sin() / x;
        1.0 - s * s
    }
}

impl Worldline for CircularWorldline {
    fn eval(&self, tau: f64) -> Result<WorldlineState> {
        let (r, w, g) = (self.radius, self.omega, self.gamma);
        let (s, c) = self.angle(tau).sin_cos();
        let v = r * w * g;
        let acc = r * w * w * g * g;
        let jerk = acc * w * g;
        Ok(WorldlineState {
            tau,
            z: MVec3::new(g * tau, r * c, r * s),
            u: MVec3::new(g, -v * s, v * c),
            a: MVec3::new(0.0, -acc * c, -acc * s),
            adot: MVec3::new(0.0, jerk * s, -jerk * c),
        })
    }

    fn asymptotic_regime(&self) -> AsymptoticRegime {
        AsymptoticRegime::None
    }

    fn chord(&self, tau: f64, s: f64) -> Result<MVec3> {
        let g = self.gamma;
        let half = 0.5 * self.omega * g * (tau - s);
        let mid = 0.5 * (self.angle(tau) + self.angle(s));
        let k = 2.0 * self.radius * half.sin();
        Ok(MVec3::new(g * (tau - s), -k * mid.sin(), k * mid.cos()))
    }

    fn proper_separation(&self, tau: f64, s: f64) -> Result<f64> {
        let d = (tau - s).abs();
        let g = self.gamma;
        let rw = self.radius * self.omega;
        let x = 0.5 * self.omega * g * d;
        Ok(d * (1.0 + g * g * rw * rw * one_minus_sinc2(x)).sqrt())
    }

    fn root_guess(&self, x: MVec3) -> f64 {
        x.t / self.gamma
    }
}

/// Another worldline translated by a constant displacement.
#[derive(Debug, Clone, Copy)]
pub struct Shifted<W> {
    pub inner: W,
    pub offset: MVec3,
}

impl<W: Worldline> Shifted<W> {
    pub fn new(inner: W, offset: MVec3) -> Self {
        Shifted { inner, offset }
    }
}

impl<W: Worldline> Worldline for Shifted<W> {
    fn eval(&self, tau: f64) -> Result<WorldlineState> {
        let mut st = self.inner.eval(tau)?;
        st.z += self.offset;
        Ok(st)
    }

    fn asymptotic_regime(&self) -> AsymptoticRegime {
        self.inner.asymptotic_regime()
    }

    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    fn future_asymptote(&self) -> Option<f64> {
        self.inner.future_asymptote()
    }

    fn chord(&self, tau: f64, s: f64) -> Result<MVec3> {
        self.inner.chord(tau, s)
    }

    fn proper_separation(&self, tau: f64, s: f64) -> Result<f64> {
        self.inner.proper_separation(tau, s)
    }

    fn root_guess(&self, x: MVec3) -> f64 {
        self.inner.root_guess(x - self.offset)
    }

    fn retarded_time(&self, x: MVec3) -> Result<Puncture> {
        self.inner.retarded_time(x - self.offset)
    }

    fn advanced_time(&self, x: MVec3) -> Result<Puncture> {
        self.inner.advanced_time(x - self.offset)
    }
}

/// Kind of straight-line history assumed before the first tabulated node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prehistory {
    Static,
    Uniform,
    None,
}

/// Node array interpolated by quintic Hermite segments on (z, u, a).
#[derive(Debug, Clone, Default)]
pub struct TabulatedWorldline {
    tau: Vec<f64>,
    z: Vec<MVec3>,
    u: Vec<MVec3>,
    a: Vec<MVec3>,
    prehistory: Option<Prehistory>,
}

impl TabulatedWorldline {
    /// Build from nodes with known accelerations.
    pub fn from_nodes(tau: Vec<f64>, z: Vec<MVec3>, u: Vec<MVec3>, a: Vec<MVec3>) -> Result<Self> {
        let n = tau.len();
        if z.len() != n || u.len() != n || a.len() != n {
            return Err(Error::invalid("node arrays must have equal length"));
        }
        if n < 2 {
            return Err(Error::TraceTooShort(format!("{n} nodes; at least 2 are needed")));
        }
        if tau.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::invalid("node times must be strictly increasing"));
        }
        for v in z.iter().chain(&u).chain(&a) {
            if !v.is_finite() {
                return Err(Error::invalid("node values must be finite"));
            }
        }
        Ok(TabulatedWorldline { tau, z, u, a, prehistory: None })
    }

    /// Build from (z, u) nodes, estimating accelerations by 5-point differencing of `u`.
    pub fn from_positions_velocities(tau: Vec<f64>, z: Vec<MVec3>, u: Vec<MVec3>) -> Result<Self> {
        if tau.len() < 5 {
            return Err(Error::TraceTooShort(format!("{} nodes; at least 5 are needed to estimate acceleration", tau.len())));
        }
        let a = differentiate(&tau, &u);
        TabulatedWorldline::from_nodes(tau, z, u, a)
    }

    /// Sample an analytic worldline on a uniform grid.
    pub fn sample(w: &dyn Worldline, t0: f64, t1: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TraceTooShort(format!("{n} nodes")));
        }
        let h = (t1 - t0) / (n - 1) as f64;
        let mut tab = TabulatedWorldline::default();
        for i in 0..n {
            let t = if i + 1 == n { t1 } else { t0 + h * i as f64 };
            let st = w.eval(t)?;
            tab.tau.push(t);
            tab.z.push(st.z);
            tab.u.push(st.u);
            tab.a.push(st.a);
        }
        Ok(tab)
    }

    /// Declare the straight-line history that precedes the first node.
    pub fn with_prehistory(mut self, kind: Prehistory) -> Result<Self> {
        if kind == Prehistory::Static {
            let u0 = self.u[0];
            if (u0 - MVec3::REST).max_abs() > 1e-12 {
                return Err(Error::invalid("static prehistory needs the first node at rest"));
            }
        }
        self.prehistory = Some(kind);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn nodes(&self) -> (&[f64], &[MVec3], &[MVec3], &[MVec3]) {
        (&self.tau, &self.z, &self.u, &self.a)
    }

    pub fn first_tau(&self) -> f64 {
        self.tau[0]
    }

    pub fn last_tau(&self) -> f64 {
        self.tau[self.tau.len() - 1]
    }

    /// Append a node past the current horizon.
    pub fn push(&mut self, tau: f64, z: MVec3, u: MVec3, a: MVec3) -> Result<()> {
        if let Some(&last) = self.tau.last() {
            if tau <= last {
                return Err(Error::invalid(format!("node time {tau} does not advance past {last}")));
            }
        }
        self.tau.push(tau);
        self.z.push(z);
        self.u.push(u);
        self.a.push(a);
        Ok(())
    }

    fn segment(&self, tau: f64) -> usize {
        let idx = self.tau.partition_point(|&t| t <= tau);
        idx.saturating_sub(1).min(self.tau.len() - 2)
    }

    /// Position relative to the left node of segment `i`.
    fn offset(&self, i: usize, tau: f64) -> MVec3 {
        let h = self.tau[i + 1] - self.tau[i];
        let s = (tau - self.tau[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let s5 = s4 * s;
        let (v0, v1) = (self.u[i] * h, self.u[i + 1] * h);
        let (c0, c1) = (self.a[i] * (h * h), self.a[i + 1] * (h * h));
        v0 * (s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5)
            + c0 * (0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5))
            + c1 * (0.5 * (s3 - 2.0 * s4 + s5))
            + v1 * (-4.0 * s3 + 7.0 * s4 - 3.0 * s5)
            + (self.z[i + 1] - self.z[i]) * (10.0 * s3 - 15.0 * s4 + 6.0 * s5)
    }

    /// `z(tau) - z(s)` for `s <= tau` inside the tabulated range, summing short
    /// node-to-node increments so that close points keep their relative accuracy.
    fn inner_chord(&self, tau: f64, s: f64) -> MVec3 {
        let i = self.segment(tau);
        let j = self.segment(s);
        if i == j {
            return self.offset(i, tau) - self.offset(i, s);
        }
        let head = self.offset(i, tau);
        let tail = (self.z[j + 1] - self.z[j]) - self.offset(j, s);
        let middle = if i - j <= 16 {
            (j + 1..i).fold(MVec3::ZERO, |acc, k| acc + (self.z[k + 1] - self.z[k]))
        } else {
            self.z[i] - self.z[j + 1]
        };
        head + middle + tail
    }

    /// Write nodes as CSV with columns tau,z0,z1,z2,u0,u1,u2.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "tau,z0,z1,z2,u0,u1,u2")?;
        for i in 0..self.tau.len() {
            let (z, u) = (self.z[i], self.u[i]);
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.tau[i], z.t, z.x, z.y, u.t, u.x, u.y
            )?;
        }
        out.flush()?;
        Ok(())
    }

    /// Read nodes from CSV written by [`TabulatedWorldline::write_csv`] (extra columns are ignored).
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut text = String::new();
        File::open(path)?.read_to_string(&mut text)?;
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| Error::invalid(format!("missing column {name}")))
        };
        let idx = [col("tau")?, col("z0")?, col("z1")?, col("z2")?, col("u0")?, col("u1")?, col("u2")?];
        let (mut tau, mut z, mut u) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            let mut v = [0.0; 7];
            for (k, &i) in idx.iter().enumerate() {
                v[k] = rec
                    .get(i)
                    .ok_or_else(|| Error::invalid("short row"))?
                    .trim()
                    .parse()
                    .map_err(|e| Error::invalid(format!("bad number in column {}: {e}", headers.get(i).unwrap_or("?"))))?;
            }
            tau.push(v[0]);
            z.push(MVec3::new(v[1], v[2], v[3]));
            u.push(MVec3::new(v[4], v[5], v[6]));
        }
        TabulatedWorldline::from_positions_velocities(tau, z, u)
    }
}

/// Derivative of nodal data by 5-point Lagrange differentiation (any spacing).
fn differentiate(t: &[f64], v: &[MVec3]) -> Vec<MVec3> {
    let n = t.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let start = i.saturating_sub(2).min(n - 5);
        let xs = &t[start..start + 5];
        let x = t[i];
        let mut d = MVec3::ZERO;
        for j in 0..5 {
            let mut wj = 0.0;
            for k in 0..5 {
                if k == j {
                    continue;
                }
                let mut p = 1.0 / (xs[j] - xs[k]);
                for m in 0..5 {
                    if m != j && m != k {
                        p *= (x - xs[m]) / (xs[j] - xs[m]);
                    }
                }
                wj += p;
            }
            d += v[start + j] * wj;
        }
        out.push(d);
    }
    out
}

impl Worldline for TabulatedWorldline {
    fn eval(&self, tau: f64) -> Result<WorldlineState> {
        let (lo, hi) = (self.first_tau(), self.last_tau());
        let slack = 1e-12 * (1.0 + hi.abs());
        if tau > hi + slack || tau.is_nan() {
            return Err(Error::OutOfDomain { tau, lo: self.domain().0, hi });
        }
        if tau < lo {
            return match self.prehistory {
                Some(Prehistory::Static) | Some(Prehistory::Uniform) => Ok(WorldlineState {
                    tau,
                    z: self.z[0] + self.u[0] * (tau - lo),
                    u: self.u[0],
                    a: MVec3::ZERO,
                    adot: MVec3::ZERO,
                }),
                _ => Err(Error::OutOfDomain { tau, lo, hi }),
            };
        }
        let tau = tau.min(hi);
        let i = self.segment(tau);
        let h = self.tau[i + 1] - self.tau[i];
        let s = (tau - self.tau[i]) / h;
        let (z0, z1) = (self.z[i], self.z[i + 1]);
        let (v0, v1) = (self.u[i] * h, self.u[i + 1] * h);
        let (c0, c1) = (self.a[i] * (h * h), self.a[i + 1] * (h * h));
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let s5 = s4 * s;
        let b = [
            1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
            s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
            0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
            0.5 * (s3 - 2.0 * s4 + s5),
            -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
            10.0 * s3 - 15.0 * s4 + 6.0 * s5,
        ];
        let d1 = [
            -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
            1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
            0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4),
            0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4),
            -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
            30.0 * s2 - 60.0 * s3 + 30.0 * s4,
        ];
        let d2 = [
            -60.0 * s + 180.0 * s2 - 120.0 * s3,
            -36.0 * s + 96.0 * s2 - 60.0 * s3,
            0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3),
            0.5 * (6.0 * s - 24.0 * s2 + 20.0 * s3),
            -24.0 * s + 84.0 * s2 - 60.0 * s3,
            60.0 * s - 180.0 * s2 + 120.0 * s3,
        ];
        let d3 = [
            -60.0 + 360.0 * s - 360.0 * s2,
            -36.0 + 192.0 * s - 180.0 * s2,
            0.5 * (-18.0 + 72.0 * s - 60.0 * s2),
            0.5 * (6.0 - 48.0 * s + 60.0 * s2),
            -24.0 + 168.0 * s - 180.0 * s2,
            60.0 - 360.0 * s + 360.0 * s2,
        ];
        // Derivative weights on z0 and z1 are opposite, so use the node difference.
        let comb = |w: &[f64; 6]| v0 * w[1] + c0 * w[2] + c1 * w[3] + v1 * w[4] + (z1 - z0) * w[5];
        // Evaluate the position relative to the left node to keep short chords accurate.
        let dz = v0 * b[1] + c0 * b[2] + c1 * b[3] + v1 * b[4] + (z1 - z0) * b[5];
        Ok(WorldlineState {
            tau,
            z: z0 + dz,
            u: comb(&d1) / h,
            a: comb(&d2) / (h * h),
            adot: comb(&d3) / (h * h * h),
        })
    }

    fn chord(&self, tau: f64, s: f64) -> Result<MVec3> {
        if tau < s {
            return Ok(-self.chord(s, tau)?);
        }
        let (lo, hi) = (self.first_tau(), self.last_tau());
        if tau > hi || s < lo {
            return Ok(self.position(tau)? - self.position(s)?);
        }
        Ok(self.inner_chord(tau, s))
    }

    fn asymptotic_regime(&self) -> AsymptoticRegime {
        match self.prehistory {
            Some(Prehistory::Static) => AsymptoticRegime::StaticBefore(self.first_tau()),
            Some(Prehistory::Uniform) => AsymptoticRegime::UniformBefore(self.first_tau()),
            _ => AsymptoticRegime::None,
        }
    }

    fn domain(&self) -> (f64, f64) {
        let lo = match self.prehistory {
            Some(Prehistory::Static) | Some(Prehistory::Uniform) => f64::NEG_INFINITY,
            _ => self.first_tau(),
        };
        (lo, self.last_tau())
    }

    fn root_guess(&self, x: MVec3) -> f64 {
        let idx = self.z.partition_point(|z| z.t <= x.t);
        self.tau[idx.min(self.tau.len() - 1)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(w: &dyn Worldline, tau: f64) {
        let h = 1e-5;
        let st = w.eval(tau).unwrap();
        let p = w.eval(tau + h).unwrap();
        let m = w.eval(tau - h).unwrap();
        let du = (p.z - m.z) / (2.0 * h);
        let da = (p.u - m.u) / (2.0 * h);
        let dj = (p.a - m.a) / (2.0 * h);
        let rel = |x: MVec3, y: MVec3| (x - y).max_abs() / y.max_abs().max(1.0);
        assert!(rel(du, st.u) < 1e-6, "u at {tau}");
        assert!(rel(da, st.a) < 1e-6, "a at {tau}");
        assert!(rel(dj, st.adot) < 1e-6, "adot at {tau}");
    }

    #[test]
    fn hyperbola_at_origin() {
        let w = HyperbolicWorldline::new(1.0).unwrap();
        let st = w.eval(0.0).unwrap();
        assert_eq!(st.z, MVec3::ZERO);
        assert_eq!(st.u, MVec3::REST);
        assert_eq!(st.a, MVec3::new(0.0, 1.0, 0.0));
        let st = w.eval(-3.0).unwrap();
        assert_eq!(st.z, MVec3::new(-3.0, 0.0, 0.0));
        assert_eq!(st.a, MVec3::ZERO);
    }

    #[test]
    fn static_state() {
        let w = StaticWorldline::at_origin();
        for tau in [-5.0, 0.0, 2.5] {
            let st = w.eval(tau).unwrap();
            assert_eq!(st.u, MVec3::REST);
            assert_eq!(st.a, MVec3::ZERO);
            assert_eq!(st.adot, MVec3::ZERO);
        }
    }

    #[test]
    fn analytic_families_satisfy_invariants_and_derivatives() {
        let fams: Vec<Box<dyn Worldline>> = vec![
            Box::new(StaticWorldline::at_origin()),
            Box::new(UniformWorldline::with_velocity(MVec3::new(0.0, 1.0, -2.0), 0.3, 0.4).unwrap()),
            Box::new(HyperbolicWorldline::eternal(1.3).unwrap()),
            Box::new(CircularWorldline::new(0.1, 1.0, 0.0).unwrap()),
            Box::new(CircularWorldline::new(0.8, 1.1, 0.3).unwrap()),
        ];
        for w in &fams {
            for tau in [-1.7, 0.0, 0.3, 2.0] {
                let st = w.eval(tau).unwrap();
                let d = st.invariant_defects();
                assert!(d[0] < 1e-9 && d[1] < 1e-9 && d[2] < 1e-7, "{d:?}");
                fd_check(w.as_ref(), tau);
            }
        }
    }

    #[test]
    fn circular_start_matches_finite_differences() {
        let w = CircularWorldline::new(0.1, 1.0, 0.0).unwrap();
        fd_check(&w, 0.0);
    }

    #[test]
    fn analytic_chords_match_subtraction() {
        let fams: Vec<Box<dyn Worldline>> = vec![
            Box::new(HyperbolicWorldline::new(0.7).unwrap()),
            Box::new(CircularWorldline::new(0.5, 1.3, 0.2).unwrap()),
        ];
        for w in &fams {
            for (tau, s) in [(1.0, 0.5), (3.0, 0.1), (2.0, 1.999), (0.5, -1.0)] {
                let q = w.chord(tau, s).unwrap();
                let q2 = w.position(tau).unwrap() - w.position(s).unwrap();
                assert!((q - q2).max_abs() < 1e-12);
                let n = w.proper_separation(tau, s).unwrap();
                let n2 = (-mdot(q2, q2)).sqrt();
                assert!((n - n2).abs() < 1e-9 * n2.max(1e-3), "{n} vs {n2}");
            }
        }
    }

    #[test]
    fn hyperbolic_separation() {
        let w = HyperbolicWorldline::new(1.0).unwrap();
        let sep = separation(&w, 3.0, 1.0).unwrap();
        assert!((sep.norm - 2.0 * 1f64.sinh()).abs() < 1e-14);
        assert!((sep.norm - 2.350_402_387_287_603).abs() < 1e-12);
        let st = StaticWorldline::at_origin();
        let sep = separation(&st, 4.0, 1.5).unwrap();
        assert_eq!(sep.norm, 2.5);
        assert_eq!(sep.r_s, 2.5);
        let sep = separation(&st, 4.0, 4.0).unwrap();
        assert_eq!(sep.q, MVec3::ZERO);
        assert_eq!(sep.norm, 0.0);
        assert!(matches!(separation(&st, 1.0, 2.0), Err(Error::NotPast { .. })));
    }

    #[test]
    fn static_and_uniform_roots() {
        let x = MVec3::new(10.0, 3.0, 4.0);
        let st = StaticWorldline::at_origin();
        assert_eq!(st.retarded_time(x).unwrap().tau, 5.0);
        assert_eq!(st.advanced_time(x).unwrap().tau, 15.0);
        let un = UniformWorldline::new(MVec3::ZERO, MVec3::REST).unwrap();
        assert_eq!(un.retarded_time(x).unwrap().tau, 5.0);
        assert_eq!(un.advanced_time(x).unwrap().tau, 15.0);
        // The generic solver must agree with the closed forms.
        let g = light_cone_root(&un, x, Direction::Retarded).unwrap();
        assert!((g.tau - 5.0).abs() < 1e-12);
        let g = light_cone_root(&un, x, Direction::Advanced).unwrap();
        assert!((g.tau - 15.0).abs() < 1e-12);
    }

    #[test]
    fn boosted_roots_satisfy_light_cone() {
        let w = UniformWorldline::with_velocity(MVec3::new(0.3, -1.0, 0.5), 0.5, -0.2).unwrap();
        for x in [MVec3::new(3.0, 1.0, 2.0), MVec3::new(-4.0, 0.2, -7.0), MVec3::new(50.0, 30.0, 1.0)] {
            for p in [w.retarded_time(x).unwrap(), w.advanced_time(x).unwrap()] {
                let k = x - w.position(p.tau).unwrap();
                assert!(mdot(k, k).abs() < 1e-12 * (1.0 + x.t * x.t + x.x * x.x + x.y * x.y));
            }
            let r = w.retarded_time(x).unwrap();
            let a = w.advanced_time(x).unwrap();
            assert!(a.tau >= r.tau);
            let g = light_cone_root(&w, x, Direction::Retarded).unwrap();
            assert!((g.tau - r.tau).abs() < 1e-10 * (1.0 + r.tau.abs()));
        }
    }

    #[test]
    fn generic_roots_on_curved_worldlines() {
        let fams: Vec<Box<dyn Worldline>> = vec![
            Box::new(HyperbolicWorldline::new(1.0).unwrap()),
            Box::new(HyperbolicWorldline::eternal(2.0).unwrap()),
            Box::new(CircularWorldline::new(0.5, 1.5, 0.0).unwrap()),
        ];
        let pts = [MVec3::new(2.0, 0.3, 0.4), MVec3::new(3.0, -1.0, 1.0), MVec3::new(6.0, 10.0, -1.0), MVec3::new(1.5, 0.2, 0.2)];
        for w in &fams {
            for x in pts {
                let r = w.retarded_time(x).unwrap();
                // Uniformly accelerated charges have an event horizon: no advanced crossing
                // exists for points beyond it.
                let a = match w.advanced_time(x) {
                    Ok(a) => a,
                    Err(Error::NoRoot { .. }) => {
                        assert!(x.t - x.x > 0.0);
                        continue;
                    }
                    Err(e) => panic!("{e}"),
                };
                for p in [r, a] {
                    let k = x - w.position(p.tau).unwrap();
                    assert!(mdot(k, k).abs() < 1e-12 * (1.0 + x.t * x.t + x.x * x.x + x.y * x.y));
                }
                assert!(a.tau >= r.tau);
                assert!(x.t > w.position(r.tau).unwrap().t);
                assert!(x.t < w.position(a.tau).unwrap().t);
            }
        }
    }

    #[test]
    fn retarded_time_increases_with_observation_time() {
        let w = CircularWorldline::new(0.5, 1.5, 0.0).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..20 {
            let x = MVec3::new(-2.0 + 0.5 * k as f64, 1.0, 0.7);
            let t = w.retarded_time(x).unwrap().tau;
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn coincident_field_point_is_flagged() {
        let w = HyperbolicWorldline::new(1.0).unwrap();
        let x = w.position(0.8).unwrap();
        let p = w.retarded_time(x).unwrap();
        assert!((p.tau - 0.8).abs() < 1e-12);
        assert!(p.is_coincident());
        let st = StaticWorldline::at_origin();
        let p = st.retarded_time(MVec3::new(2.0, 0.0, 0.0)).unwrap();
        assert_eq!(p.tau, 2.0);
        assert!(p.is_coincident());
    }

    #[test]
    fn tabulated_interpolation_accuracy() {
        let w = HyperbolicWorldline::eternal(1.0).unwrap();
        let h = 0.01;
        let n = 301;
        let tab = TabulatedWorldline::sample(&w, 0.0, h * (n - 1) as f64, n).unwrap();
        let mut zerr: f64 = 0.0;
        let mut aerr: f64 = 0.0;
        for k in 0..600 {
            let t = 0.0013 + k as f64 * 0.00497;
            let a = tab.eval(t).unwrap();
            let b = w.eval(t).unwrap();
            zerr = zerr.max((a.z - b.z).max_abs());
            aerr = aerr.max((a.a - b.a).max_abs() / b.a.max_abs());
        }
        assert!(zerr < 1e-8, "z error {zerr}");
        assert!(aerr < 1e-6, "a error {aerr}");
    }

    #[test]
    fn tabulated_estimates_acceleration_from_velocity() {
        let w = CircularWorldline::new(0.1, 1.0, 0.0).unwrap();
        let src = TabulatedWorldline::sample(&w, 0.0, 3.0, 301).unwrap();
        let (t, z, u, _) = src.nodes();
        let tab = TabulatedWorldline::from_positions_velocities(t.to_vec(), z.to_vec(), u.to_vec()).unwrap();
        for t in [0.0, 0.015, 1.2345, 3.0] {
            let a = tab.eval(t).unwrap().a;
            let b = w.eval(t).unwrap().a;
            assert!((a - b).max_abs() < 1e-7, "{t}");
        }
    }

    #[test]
    fn tabulated_domain_and_prehistory() {
        let w = HyperbolicWorldline::new(1.0).unwrap();
        let tab = TabulatedWorldline::sample(&w, 0.0, 1.0, 101).unwrap();
        assert!(matches!(tab.eval(1.5), Err(Error::OutOfDomain { .. })));
        assert!(matches!(tab.eval(-0.5), Err(Error::OutOfDomain { .. })));
        let tab = tab.with_prehistory(Prehistory::Static).unwrap();
        let st = tab.eval(-2.0).unwrap();
        assert_eq!(st.z, MVec3::new(-2.0, 0.0, 0.0));
        assert_eq!(tab.asymptotic_regime(), AsymptoticRegime::StaticBefore(0.0));
        // Field point too far in the future for the stored horizon.
        assert!(matches!(tab.retarded_time(MVec3::new(50.0, 0.0, 0.0)), Err(Error::NoRoot { .. })));
        let x = MVec3::new(0.9, 0.5, 0.2);
        let p = tab.retarded_time(x).unwrap();
        let q = w.retarded_time(x).unwrap();
        assert!((p.tau - q.tau).abs() < 1e-9);
    }

    #[test]
    fn tabulated_csv_roundtrip() {
        let w = CircularWorldline::new(0.3, 2.0, 0.1).unwrap();
        let tab = TabulatedWorldline::sample(&w, 0.0, 2.0, 201).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wl.csv");
        tab.write_csv(&path).unwrap();
        let back = TabulatedWorldline::read_csv(&path).unwrap();
        let (t1, z1, u1, _) = tab.nodes();
        let (t2, z2, u2, _) = back.nodes();
        assert_eq!(t1, t2);
        assert_eq!(z1, z2);
        assert_eq!(u1, u2);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("tau,z0,z1,z2,u0,u1,u2\n"));
    }

    #[test]
    fn push_extends_horizon() {
        let w = HyperbolicWorldline::eternal(1.0).unwrap();
        let mut tab = TabulatedWorldline::sample(&w, 0.0, 0.1, 11).unwrap();
        let st = w.eval(0.11).unwrap();
        tab.push(0.11, st.z, st.u, st.a).unwrap();
        assert_eq!(tab.last_tau(), 0.11);
        assert!(tab.push(0.05, st.z, st.u, st.a).is_err());
        assert!(tab.eval(0.105).is_ok());
    }
}
