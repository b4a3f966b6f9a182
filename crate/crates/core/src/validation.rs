//! Built-in validation suites with closed-form expectations.

use std::time::Instant;

use serde::Serialize;

use crate::config::Suite;
use crate::error::Result;
use crate::field::{coulomb_force, field_retarded, field_uniform_closed, maxwell_residuals_of, potential_retarded, FieldQuery};
use crate::geometry::{mdot, FieldStrength, MVec3};
use crate::ledger::{balance_residuals, radiated, BalanceInput, LedgerOptions};
use crate::selfforce::{paired_tail_integrand, self_force, PrehistoryPolicy};
use crate::worldline::{HyperbolicWorldline, StaticWorldline, UniformWorldline, Worldline, WorldlineState};

/// How the expected value of a check is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Closed-form solution.
    Analytic,
    /// Derived from other closed forms by elementary manipulation.
    Derived,
    /// Structural property of the implementation.
    Invariant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub basis: Basis,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Collector {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Collector {
    fn new(suite: &'static str) -> Self {
        Collector { suite, checks: Vec::new() }
    }

    /// `|measured - expected| <= tolerance`.
    fn close(&mut self, name: impl Into<String>, measured: f64, expected: f64, tolerance: f64, basis: Basis) {
        let passed = (measured - expected).abs() <= tolerance;
        self.push(name, measured, expected, tolerance, basis, passed);
    }

    /// `measured <= tolerance` for a nonnegative error measure.
    fn small(&mut self, name: impl Into<String>, measured: f64, tolerance: f64, basis: Basis) {
        self.push(name, measured, 0.0, tolerance, basis, measured <= tolerance);
    }

    /// `measured >= bound`.
    fn at_least(&mut self, name: impl Into<String>, measured: f64, bound: f64, basis: Basis) {
        self.push(name, measured, bound, 0.0, basis, measured >= bound);
    }

    fn push(&mut self, name: impl Into<String>, measured: f64, expected: f64, tolerance: f64, basis: Basis, passed: bool) {
        let passed = passed && measured.is_finite();
        self.checks.push(Check { suite: self.suite, name: name.into(), measured, expected, tolerance, basis, passed });
    }

    fn failed(&mut self, name: impl Into<String>, err: impl std::fmt::Display, basis: Basis) {
        let name = format!("{} ({err})", name.into());
        self.push(name, f64::NAN, f64::NAN, f64::NAN, basis, false);
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn static_suite() -> Vec<Check> {
    let mut c = Collector::new("static");
    let w = StaticWorldline::at_origin();
    for r in [0.5, 1.0, 2.0, 5.0] {
        let name = format!("log potential at r = {r}");
        match potential_retarded(&w, MVec3::new(10.0, r, 0.0), 1.0) {
            Ok(a) if r == 1.0 => c.small(name, a.t.abs(), 1e-10, Basis::Analytic),
            Ok(a) => c.small(name, rel(a.t, r.ln()), 1e-8, Basis::Analytic),
            Err(e) => c.failed(name, e, Basis::Analytic),
        }
    }
    let mut closed = 0.0f64;
    let mut quad = 0.0f64;
    for i in 0..11 {
        for j in 0..11 {
            let (x1, x2) = (-2.5 + 0.5 * i as f64, -2.5 + 0.5 * j as f64);
            let r2 = x1 * x1 + x2 * x2;
            if r2 == 0.0 {
                continue;
            }
            let x = MVec3::new(10.0, x1, x2);
            let (w1, w2) = (x1 / r2, x2 / r2);
            let norm = w1.hypot(w2);
            let err = |e1: f64, e2: f64| (e1 - w1).hypot(e2 - w2) / norm;
            match field_uniform_closed(MVec3::ZERO, MVec3::REST, 1.0, x) {
                Ok(f) => closed = closed.max(err(f.e1, f.e2)),
                Err(_) => closed = f64::NAN,
            }
            match field_retarded(&w, &FieldQuery::retarded(x, 1.0)) {
                Ok(f) => quad = quad.max(err(f.e1, f.e2)),
                Err(_) => quad = f64::NAN,
            }
        }
    }
    c.small("static field on 11x11 grid, closed form", closed, 1e-9, Basis::Analytic);
    c.small("static field on 11x11 grid, quadrature", quad, 1e-6, Basis::Analytic);
    for r in [0.5, 1.0, 2.0] {
        let name = format!("Coulomb force at r = {r}");
        match coulomb_force(1.0, [r, 0.0], 1.0, [0.0, 0.0]) {
            Ok(f) => c.small(name, (f.x - 1.0 / r).abs().max(f.y.abs()).max(f.t.abs()), 1e-9, Basis::Analytic),
            Err(e) => c.failed(name, e, Basis::Analytic),
        }
    }
    c.checks
}

/// Deterministic scattered points in a box, from the fractional parts of multiples of irrationals.
fn scattered_points(n: usize) -> Vec<MVec3> {
    let g = [0.754_877_666_246_692_8, 0.569_840_290_998_053_2, 0.437_016_235_680_532];
    (1..=n)
        .map(|k| {
            let f = |a: f64| (k as f64 * a).fract();
            MVec3::new(2.0 + 8.0 * f(g[0]), -4.0 + 8.0 * f(g[1]), -4.0 + 8.0 * f(g[2]))
        })
        .collect()
}

fn uniform_suite() -> Vec<Check> {
    let mut c = Collector::new("uniform");
    let w = match UniformWorldline::with_velocity(MVec3::new(0.0, 0.3, -0.2), 0.45, 0.25) {
        Ok(w) => w,
        Err(e) => {
            c.failed("uniform worldline", e, Basis::Analytic);
            return c.checks;
        }
    };
    let mut worst = 0.0f64;
    for x in scattered_points(100) {
        let exact = field_uniform_closed(w.z0, w.u, 1.0, x);
        let num = field_retarded(&w, &FieldQuery::retarded(x, 1.0));
        worst = match (exact, num) {
            (Ok(a), Ok(b)) => worst.max((a - b).max_abs() / a.max_abs().max(1e-300)),
            _ => f64::NAN,
        };
    }
    c.small("quadrature field vs closed form at 100 points", worst, 1e-8, Basis::Analytic);
    for tau in [0.5, 2.0, 5.0] {
        match self_force(&w, tau, 1.0, PrehistoryPolicy::IncludeAsymptote) {
            Ok(r) => {
                c.small(format!("self-force at tau = {tau}"), r.force.max_abs(), 1e-10, Basis::Invariant);
                c.small(format!("mass rate at tau = {tau}"), r.mass_rate.abs(), 1e-10, Basis::Invariant);
            }
            Err(e) => c.failed(format!("self-force at tau = {tau}"), e, Basis::Invariant),
        }
    }
    c.checks
}

fn hyperbolic_suite() -> Vec<Check> {
    let mut c = Collector::new("hyperbolic");
    let w = match HyperbolicWorldline::new(1.0) {
        Ok(w) => w,
        Err(e) => {
            c.failed("hyperbolic worldline", e, Basis::Analytic);
            return c.checks;
        }
    };
    let mut worst = 0.0f64;
    let n = 200;
    for k in 0..=n {
        let d = 1e-3 * (5e3f64).powf(k as f64 / n as f64);
        let sigma = w.proper_separation(6.0, 6.0 - d).unwrap_or(f64::NAN);
        worst = worst.max(rel(sigma, 2.0 * (0.5 * d).sinh()));
    }
    c.small("chord length 2 sinh(d/2) for d in [1e-3, 5]", worst, 1e-10, Basis::Analytic);
    for tau in [0.1f64, 0.5, 1.0, 2.0, 5.0] {
        let coef = 0.5 * (1.0 - 1.0 / (0.5 * tau).cosh());
        match (self_force(&w, tau, 1.0, PrehistoryPolicy::TruncateAt(0.0)), w.eval(tau)) {
            (Ok(r), Ok(st)) => {
                let want = st.a * coef;
                let err = (r.force - want).max_abs() / want.max_abs();
                c.small(format!("self-force coefficient at tau = {tau}"), err, 1e-5, Basis::Analytic);
                c.small(format!("mass rate at tau = {tau}"), r.mass_rate.abs(), 1e-8, Basis::Analytic);
                if tau == 2.0 {
                    // Component along a over |a|^2.
                    let measured = mdot(r.force, st.a) / mdot(st.a, st.a);
                    c.close("self-force coefficient at tau = 2", measured, 0.175_973, 5e-7, Basis::Analytic);
                }
            }
            (Err(e), _) | (_, Err(e)) => c.failed(format!("self-force at tau = {tau}"), e, Basis::Analytic),
        }
    }
    c.checks
}

/// Observed convergence order of the largest residual component under step halving.
fn maxwell_orders<F>(c: &mut Collector, label: &str, f: F, x: MVec3)
where
    F: Fn(MVec3) -> Result<FieldStrength> + Copy,
{
    let steps = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
    let mut res = Vec::new();
    for h in steps {
        match maxwell_residuals_of(f, x, h) {
            Ok(r) => res.push(r.components()),
            Err(e) => {
                c.failed(format!("{label} residuals"), e, Basis::Derived);
                return;
            }
        }
    }
    let names = ["faraday", "gauss", "ampere1", "ampere2"];
    for (k, name) in names.iter().enumerate() {
        let coarse = res[steps.len() - 2][k].abs();
        let fine = res[steps.len() - 1][k].abs();
        c.small(format!("{label} {name} residual at h = 1.25e-3"), fine, 1e-6, Basis::Derived);
        // Components that vanish to rounding have no measurable order.
        if coarse > 1e-11 {
            c.at_least(format!("{label} {name} convergence order"), (coarse / fine).log2(), 1.9, Basis::Derived);
        }
    }
}

fn maxwell_suite() -> Vec<Check> {
    let mut c = Collector::new("maxwell");
    maxwell_orders(&mut c, "static", |p| field_uniform_closed(MVec3::ZERO, MVec3::REST, 1.0, p), MVec3::new(0.0, 3.0, 4.0));
    let u = MVec3::velocity_from_spatial(0.4, 0.2);
    maxwell_orders(&mut c, "uniform", move |p| field_uniform_closed(MVec3::ZERO, u, 1.0, p), MVec3::new(1.0, 3.4, -3.8));
    c.checks
}

/// Absolute floor (in units of e^2 a^2) for the paired tail integrand growth fit.
pub const PAIRED_FLOOR: f64 = 1e-6;

fn ledger_suite() -> Vec<Check> {
    let mut c = Collector::new("ledger");
    let opts = LedgerOptions::default();
    let pol = PrehistoryPolicy::TruncateAt(0.0);
    match UniformWorldline::with_velocity(MVec3::ZERO, 0.3, -0.5) {
        Ok(w) => match radiated(&w, 3.0, 1.0, pol, &opts) {
            Ok((p, m)) => {
                c.small("radiated momentum, uniform motion", p.max_abs(), 1e-10, Basis::Invariant);
                c.small("radiated angular momentum, uniform motion", m.max_abs(), 1e-10, Basis::Invariant);
            }
            Err(e) => c.failed("radiated momentum, uniform motion", e, Basis::Invariant),
        },
        Err(e) => c.failed("uniform worldline", e, Basis::Invariant),
    }
    let w = match HyperbolicWorldline::new(1.0) {
        Ok(w) => w,
        Err(e) => {
            c.failed("hyperbolic worldline", e, Basis::Analytic);
            return c.checks;
        }
    };
    let mut pts = Vec::new();
    for k in 0..=30 {
        let d = 1e-6 * 1e3f64.powf(k as f64 / 30.0);
        let v = paired_tail_integrand(&w, 2.0, d, 1.0).map(|v| v.max_abs()).unwrap_or(f64::NAN);
        pts.push((d.ln(), (v + PAIRED_FLOOR).ln()));
    }
    // Growth of |integrand| ~ d^(-p) as d -> 0, above an absolute floor that
    // absorbs rounding in the cancellation of the two O(1/d) sides.
    let p = -slope(&pts);
    c.push("paired tail integrand growth exponent, d in [1e-6, 1e-3]", p, 0.0, 0.1, Basis::Derived, p < 0.1);
    // The hyperbola is sustained by m a - F_self when the self-force coefficient is known.
    let (e, m) = (0.5, 1.0);
    let mass = |_t: f64| m;
    let ext = |st: &WorldlineState| st.a * (m - 0.5 * e * e * (1.0 - 1.0 / (0.5 * st.tau).cosh()));
    let inp = BalanceInput { e, tau0: 0.0, mass: &mass, external_force: &ext, delta: 0.02, options: opts };
    match balance_residuals(&w, &inp, &[0.5, 1.5]) {
        Ok(rep) => {
            let bp = rep.iter().map(|r| r.balance_p.max_abs()).fold(0.0, f64::max);
            let bm = rep.iter().map(|r| r.balance_m.max_abs()).fold(0.0, f64::max);
            c.small("momentum balance on the driven hyperbola", bp, 1e-6, Basis::Derived);
            c.small("angular momentum balance on the driven hyperbola", bm, 1e-6, Basis::Derived);
        }
        Err(e) => c.failed("balance on the driven hyperbola", e, Basis::Derived),
    }
    c.checks
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Run one suite, or every suite for [`Suite::All`], in a fixed order.
pub fn run_suite(suite: Suite) -> Report {
    let order: &[Suite] = match suite {
        Suite::All => &[Suite::Static, Suite::Uniform, Suite::Hyperbolic, Suite::Maxwell, Suite::Ledger],
        _ => std::slice::from_ref(&suite),
    };
    let mut checks = Vec::new();
    for s in order {
        let t0 = Instant::now();
        checks.extend(match s {
            Suite::Static => static_suite(),
            Suite::Uniform => uniform_suite(),
            Suite::Hyperbolic => hyperbolic_suite(),
            Suite::Maxwell => maxwell_suite(),
            Suite::Ledger => ledger_suite(),
            Suite::All => unreachable!(),
        });
        log::info!("suite {s:?} finished in {:.2?}", t0.elapsed());
    }
    let passed = checks.iter().all(|c| c.passed);
    Report { checks, passed }
}
