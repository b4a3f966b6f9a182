//! Radiated energy-momentum and angular momentum, the dressed particle
//! momentum, and balance residuals.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{mdot, AngularMomentum2, MVec3};
use crate::quadrature::{integrate, Pair, QuadOptions};
use crate::selfforce::PrehistoryPolicy;
use crate::worldline::{AsymptoticRegime, Worldline, WorldlineState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub tau: f64,
    pub p_rad: MVec3,
    pub m_rad: AngularMomentum2,
    pub p_part: MVec3,
    pub mass: f64,
    /// Momentum flux through the truncation point of the history.
    pub p_trunc: MVec3,
    pub m_trunc: AngularMomentum2,
    pub balance_p: MVec3,
    pub balance_m: AngularMomentum2,
    /// Estimated error of `balance_p` from quadrature noise amplified by differencing.
    pub balance_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerOptions {
    pub quad_tol: f64,
    /// Width of the window next to the diagonal handled by extrapolation.
    pub diagonal_cut: f64,
}

impl Default for LedgerOptions {
    fn default() -> Self {
        LedgerOptions { quad_tol: 1e-10, diagonal_cut: 1e-3 }
    }
}

/// Antisymmetrized tail kernel `(g(tau, s) - g(s, tau)) / 2`, bounded at `s -> tau`.
///
/// Integrating it over `s < tau1` and then over `tau1` equals the paired
/// retarded-minus-advanced integral after exchanging the order of integration.
fn kernels(w: &dyn Worldline, tau1: f64, s: f64, e: f64) -> Result<Pair<MVec3, AngularMomentum2>> {
    let q = w.chord(tau1, s)?;
    let sigma = w.proper_separation(tau1, s)?;
    if !(sigma > 0.0) {
        return Err(Error::NotCausal { tau: tau1, s, qq: mdot(q, q) });
    }
    let one = w.eval(tau1)?;
    let two = w.eval(s)?;
    Ok(kernel_values(one.z, one.u, two.u, q, sigma, e))
}

fn kernel_values(z1: MVec3, u1: MVec3, us: MVec3, q: MVec3, sigma: f64, e: f64) -> Pair<MVec3, AngularMomentum2> {
    let qs = mdot(q, us);
    let k = (q * mdot(us, u1) - us * (0.5 * mdot(q, u1)) - u1 * (0.5 * qs)) * (e * e / sigma.powi(3));
    let j = AngularMomentum2::wedge(z1, k) + AngularMomentum2::wedge(q, u1) * (0.5 * e * e * qs / sigma.powi(3));
    Pair(k, j)
}

fn gauss3<T: crate::quadrature::Integrand, F: FnMut(f64) -> Result<T>>(mut f: F, a: f64, b: f64) -> Result<T> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let x = (0.6f64).sqrt() * h;
    Ok((f(c - x)? * (5.0 / 9.0) + f(c)? * (8.0 / 9.0) + f(c + x)? * (5.0 / 9.0)) * h)
}

fn truncation_start(policy: PrehistoryPolicy) -> Result<f64> {
    match policy {
        PrehistoryPolicy::TruncateAt(t0) => Ok(t0),
        PrehistoryPolicy::IncludeAsymptote => Err(Error::PrehistoryUnresolved(
            "radiated quantities are available only for a truncated history",
        )),
    }
}

/// `int_{tau0}^{tau1} K(tau1, s) ds` with the diagonal window extrapolated linearly.
fn inner(w: &dyn Worldline, tau0: f64, tau1: f64, e: f64, opts: &LedgerOptions) -> Result<Pair<MVec3, AngularMomentum2>> {
    let span = tau1 - tau0;
    if span <= 0.0 {
        return Ok(Pair(MVec3::ZERO, AngularMomentum2::ZERO));
    }
    let cut = opts.diagonal_cut;
    let f = |s: f64| kernels(w, tau1, s, e);
    if span <= 4.0 * cut {
        return gauss3(f, tau0, tau1);
    }
    // Cancellation in the kernel leaves rounding noise of order eps / cut.
    let noise = e * e * (1e-13 + 1e-15 / cut);
    let far = integrate(f, tau0, tau1 - cut, QuadOptions::new(0.1 * opts.quad_tol, noise))?;
    let k1 = kernels(w, tau1, tau1 - cut, e)?;
    let k2 = kernels(w, tau1, tau1 - 2.0 * cut, e)?;
    let near = (k1 * 3.0 - k2) * (0.5 * cut);
    Ok(far.value + near)
}

/// Radiated energy-momentum and angular momentum accumulated up to `tau`.
pub fn radiated(
    w: &dyn Worldline,
    tau: f64,
    e: f64,
    policy: PrehistoryPolicy,
    opts: &LedgerOptions,
) -> Result<(MVec3, AngularMomentum2)> {
    let tau0 = truncation_start(policy)?;
    if tau <= tau0 {
        return Ok((MVec3::ZERO, AngularMomentum2::ZERO));
    }
    let res = integrate(|t1| inner(w, tau0, t1, e, opts), tau0, tau, QuadOptions::new(opts.quad_tol, 1e-12 * e * e))?;
    Ok((res.value.0 * -1.0, res.value.1 * -1.0))
}

pub fn radiated_momentum(w: &dyn Worldline, tau: f64, e: f64, policy: PrehistoryPolicy) -> Result<MVec3> {
    Ok(radiated(w, tau, e, policy, &LedgerOptions::default())?.0)
}

pub fn radiated_angular_momentum(w: &dyn Worldline, tau: f64, e: f64, policy: PrehistoryPolicy) -> Result<AngularMomentum2> {
    Ok(radiated(w, tau, e, policy, &LedgerOptions::default())?.1)
}

/// Boundary terms at the truncation point: force density and torque density at `tau1`.
fn truncation_flux(w: &dyn Worldline, tau0: f64, tau1: f64, e: f64) -> Result<Pair<MVec3, AngularMomentum2>> {
    let start = w.eval(tau0)?;
    let one = w.eval(tau1)?;
    let q = w.chord(tau1, tau0)?;
    let sigma = w.proper_separation(tau1, tau0)?;
    if !(sigma > 0.0) {
        return Err(Error::NotCausal { tau: tau1, s: tau0, qq: mdot(q, q) });
    }
    Ok(truncation_values(start.u, one.z, one.u, q, sigma, e))
}

fn truncation_values(u0: MVec3, z1: MVec3, u1: MVec3, q: MVec3, sigma: f64, e: f64) -> Pair<MVec3, AngularMomentum2> {
    let r = -mdot(q, u0);
    let b = (q * mdot(u0, u1) - u0 * mdot(q, u1)) * (e * e / (r * sigma));
    let torque = AngularMomentum2::wedge(z1, b) + AngularMomentum2::wedge(u1, q) * (0.5 * e * e / sigma);
    Pair(b, torque)
}

/// Momentum and angular momentum carried off through the truncation point up to `tau`.
///
/// A truncated history starts abruptly, so the field built from it is not that of a
/// conserved current; these terms restore exact balance for such histories.
pub fn truncation_terms(
    w: &dyn Worldline,
    tau: f64,
    e: f64,
    policy: PrehistoryPolicy,
    opts: &LedgerOptions,
) -> Result<(MVec3, AngularMomentum2)> {
    let tau0 = truncation_start(policy)?;
    if tau <= tau0 {
        return Ok((MVec3::ZERO, AngularMomentum2::ZERO));
    }
    let f = |t1: f64| truncation_flux(w, tau0, t1, e);
    let cut = opts.diagonal_cut.min(0.25 * (tau - tau0));
    let far = integrate(f, tau0 + cut, tau, QuadOptions::new(opts.quad_tol, 1e-13 * e * e))?;
    // Linear extrapolation to the start point, where the integrand is finite.
    let f1 = f(tau0 + cut)?;
    let f2 = f(tau0 + 2.0 * cut)?;
    let near = (f1 * 3.0 - f2) * (0.5 * cut);
    let total = far.value + near;
    Ok((total.0 * -1.0, total.1 * -1.0))
}

/// Momentum of the dressed particle: `m u(tau)` plus the nonlocal field cloud term.
pub fn dressed_momentum(w: &dyn Worldline, tau: f64, e: f64, m: f64, policy: PrehistoryPolicy) -> Result<MVec3> {
    let now = w.eval(tau)?;
    let start = match policy {
        PrehistoryPolicy::TruncateAt(t0) => t0,
        PrehistoryPolicy::IncludeAsymptote => match w.asymptotic_regime() {
            AsymptoticRegime::None => return Err(Error::MissingAsymptote("past")),
            r => {
                let split = r.split().expect("regime with split");
                let ua = w.eval(split.min(tau))?.u;
                let ua = if matches!(r, AsymptoticRegime::StaticBefore(_)) { MVec3::REST } else { ua };
                if (ua - now.u).max_abs() > 1e-12 * now.u.max_abs() {
                    return Err(Error::PrehistoryUnresolved(
                        "cloud term over a straight prehistory diverges unless its velocity equals u(tau)",
                    ));
                }
                split
            }
        },
    };
    let mut p = now.u * m;
    if tau > start {
        let cloud = integrate(
            |s: f64| {
                let sigma = w.proper_separation(tau, s)?;
                if !(sigma > 0.0) {
                    return Ok(now.a * -1.0);
                }
                Ok((w.eval(s)?.u - now.u) * (1.0 / sigma))
            },
            start,
            tau,
            QuadOptions::new(1e-10, 1e-15),
        )?;
        p += cloud.value * (0.5 * e * e);
    }
    Ok(p)
}

/// Everything the ledger needs besides the worldline.
pub struct BalanceInput<'a> {
    pub e: f64,
    pub tau0: f64,
    /// Dynamical mass along the worldline.
    pub mass: &'a dyn Fn(f64) -> f64,
    /// External force on the particle in the given state.
    pub external_force: &'a dyn Fn(&WorldlineState) -> MVec3,
    /// Finite-difference step for the time derivatives.
    pub delta: f64,
    pub options: LedgerOptions,
}

struct Totals {
    p_rad: MVec3,
    m_rad: AngularMomentum2,
    p_part: MVec3,
    p_trunc: MVec3,
    m_trunc: AngularMomentum2,
    z: MVec3,
}

fn totals(w: &dyn Worldline, tau: f64, inp: &BalanceInput) -> Result<Totals> {
    let policy = PrehistoryPolicy::TruncateAt(inp.tau0);
    let (p_rad, m_rad) = radiated(w, tau, inp.e, policy, &inp.options)?;
    let (p_trunc, m_trunc) = truncation_terms(w, tau, inp.e, policy, &inp.options)?;
    let p_part = dressed_momentum(w, tau, inp.e, (inp.mass)(tau), policy)?;
    Ok(Totals { p_rad, m_rad, p_part, p_trunc, m_trunc, z: w.eval(tau)?.z })
}

impl Totals {
    fn momentum(&self) -> MVec3 {
        self.p_part + self.p_rad + self.p_trunc
    }

    fn angular(&self) -> AngularMomentum2 {
        AngularMomentum2::wedge(self.z, self.p_part) + self.m_rad + self.m_trunc
    }
}

/// Balance residuals `dP/dtau - F_ext` and `dM/dtau - z ^ F_ext` at the given times,
/// using fourth-order central differences of the total momenta.
pub fn balance_residuals(w: &dyn Worldline, inp: &BalanceInput, taus: &[f64]) -> Result<Vec<LedgerReport>> {
    let d = inp.delta;
    if !(d > 0.0) {
        return Err(Error::invalid("difference step must be positive"));
    }
    let (lo, hi) = w.domain();
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        if tau - 2.0 * d < inp.tau0.max(lo) || tau + 2.0 * d > hi {
            return Err(Error::TraceTooShort(format!("cannot difference at tau = {tau} with step {d}")));
        }
        let mid = totals(w, tau, inp)?;
        let mut stencil = Vec::with_capacity(4);
        for k in [-2.0, -1.0, 1.0, 2.0] {
            stencil.push(totals(w, tau + k * d, inp)?);
        }
        let w4 = [1.0, -8.0, 8.0, -1.0];
        let mut dp = MVec3::ZERO;
        let mut dm = AngularMomentum2::ZERO;
        for (t, c) in stencil.iter().zip(w4) {
            dp += t.momentum() * (c / (12.0 * d));
            dm = dm + t.angular() * (c / (12.0 * d));
        }
        let st = w.eval(tau)?;
        let f_ext = (inp.external_force)(&st);
        let scale = mid.momentum().max_abs().max(1.0);
        out.push(LedgerReport {
            tau,
            p_rad: mid.p_rad,
            m_rad: mid.m_rad,
            p_part: mid.p_part,
            mass: (inp.mass)(tau),
            p_trunc: mid.p_trunc,
            m_trunc: mid.m_trunc,
            balance_p: dp - f_ext,
            balance_m: dm - AngularMomentum2::wedge(st.z, f_ext),
            balance_error: 3.0 * inp.options.quad_tol * scale / d,
        });
    }
    Ok(out)
}

/// Node data of a worldline sampled with a uniform step.
pub struct NodeHistory<'a> {
    pub tau: &'a [f64],
    pub z: &'a [MVec3],
    pub u: &'a [MVec3],
    pub a: &'a [MVec3],
}

impl NodeHistory<'_> {
    /// `z_i - z_j`, summing increments between close nodes.
    fn chord(&self, i: usize, j: usize) -> MVec3 {
        if i > j && i - j <= 16 {
            (j..i).fold(MVec3::ZERO, |acc, k| acc + (self.z[k + 1] - self.z[k]))
        } else {
            self.z[i] - self.z[j]
        }
    }

    fn state(&self, i: usize) -> WorldlineState {
        WorldlineState { tau: self.tau[i], z: self.z[i], u: self.u[i], a: self.a[i], adot: MVec3::ZERO }
    }
}

type Both = Pair<MVec3, AngularMomentum2>;

fn zero_pair() -> Both {
    Pair(MVec3::ZERO, AngularMomentum2::ZERO)
}

/// Trapezoid sum of `f(0..=n)` with step `h`.
fn trapezoid(n: usize, h: f64, mut f: impl FnMut(usize) -> Both) -> Both {
    if n == 0 {
        return zero_pair();
    }
    let mut acc = (f(0) + f(n)) * 0.5;
    for k in 1..n {
        acc = acc + f(k);
    }
    acc * h
}

/// Balance residuals of a node history, with every history integral replaced by
/// the trapezoid rule on the nodes and the time derivatives by fourth-order
/// differences over `stride` nodes.
///
/// The history starts at the first node; `inp.tau0` and `inp.delta` are ignored.
/// Each requested time is moved to the nearest node.
pub fn balance_on_nodes(nodes: &NodeHistory, inp: &BalanceInput, taus: &[f64], stride: usize) -> Result<Vec<LedgerReport>> {
    let n_nodes = nodes.tau.len();
    if n_nodes < 3 || nodes.z.len() != n_nodes || nodes.u.len() != n_nodes || nodes.a.len() != n_nodes {
        return Err(Error::TraceTooShort(format!("{n_nodes} nodes")));
    }
    if stride == 0 {
        return Err(Error::invalid("difference stride must be positive"));
    }
    let h = nodes.tau[1] - nodes.tau[0];
    let span = nodes.tau[n_nodes - 1] - nodes.tau[0];
    if ((n_nodes - 1) as f64 * h - span).abs() > 1e-9 * span {
        return Err(Error::invalid("node history must have a uniform step"));
    }
    let e = inp.e;
    let mut centres = Vec::with_capacity(taus.len());
    for &t in taus {
        let c = ((t - nodes.tau[0]) / h).round();
        if c < (2 * stride) as f64 || c + (2 * stride) as f64 > (n_nodes - 1) as f64 {
            return Err(Error::TraceTooShort(format!("cannot difference at tau = {t} with stride {stride}")));
        }
        centres.push(c as usize);
    }
    let last = centres.iter().map(|c| c + 2 * stride).max().unwrap_or(0);

    let kernel = |n: usize, k: usize| {
        let q = nodes.chord(n, k);
        let sigma = (-mdot(q, q)).max(0.0).sqrt();
        kernel_values(nodes.z[n], nodes.u[n], nodes.u[k], q, sigma, e)
    };
    let inner_at = |n: usize| {
        if n == 0 {
            return zero_pair();
        }
        // The kernel is bounded on the diagonal; extrapolate its value there.
        let diag = if n >= 2 { kernel(n, n - 1) * 2.0 - kernel(n, n - 2) } else { kernel(n, 0) };
        trapezoid(n, h, |k| if k == n { diag } else { kernel(n, k) })
    };
    let flux = |k: usize| {
        let q = nodes.chord(k, 0);
        let sigma = (-mdot(q, q)).max(0.0).sqrt();
        truncation_values(nodes.u[0], nodes.z[k], nodes.u[k], q, sigma, e)
    };

    // Cumulative radiated and truncation totals at every node up to `last`.
    let mut rad = vec![zero_pair(); last + 1];
    let mut trunc = vec![zero_pair(); last + 1];
    let mut prev_inner = zero_pair();
    let mut prev_flux = if last >= 2 { flux(1) * 2.0 - flux(2) } else { zero_pair() };
    for n in 1..=last {
        let cur = inner_at(n);
        rad[n] = rad[n - 1] - (prev_inner + cur) * (0.5 * h);
        prev_inner = cur;
        let f = flux(n);
        trunc[n] = trunc[n - 1] - (prev_flux + f) * (0.5 * h);
        prev_flux = f;
    }

    let dressed = |n: usize| {
        let un = nodes.u[n];
        let cloud = trapezoid(n, h, |k| {
            if k == n {
                return Pair(nodes.a[n] * -1.0, AngularMomentum2::ZERO);
            }
            let q = nodes.chord(n, k);
            let sigma = (-mdot(q, q)).max(0.0).sqrt();
            Pair((nodes.u[k] - un) * (1.0 / sigma), AngularMomentum2::ZERO)
        });
        un * (inp.mass)(nodes.tau[n]) + cloud.0 * (0.5 * e * e)
    };
    let momentum = |n: usize, p_part: MVec3| p_part + rad[n].0 + trunc[n].0;
    let angular = |n: usize, p_part: MVec3| AngularMomentum2::wedge(nodes.z[n], p_part) + rad[n].1 + trunc[n].1;

    let mut out = Vec::with_capacity(centres.len());
    for &c in &centres {
        let w4 = [(-2isize, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
        let mut dp = MVec3::ZERO;
        let mut dm = AngularMomentum2::ZERO;
        let scale = 1.0 / (12.0 * (stride as f64) * h);
        for (k, wgt) in w4 {
            let n = (c as isize + k * stride as isize) as usize;
            let pp = dressed(n);
            dp += momentum(n, pp) * (wgt * scale);
            dm = dm + angular(n, pp) * (wgt * scale);
        }
        let st = nodes.state(c);
        let f_ext = (inp.external_force)(&st);
        let p_part = dressed(c);
        out.push(LedgerReport {
            tau: st.tau,
            p_rad: rad[c].0,
            m_rad: rad[c].1,
            p_part,
            mass: (inp.mass)(st.tau),
            p_trunc: trunc[c].0,
            m_trunc: trunc[c].1,
            balance_p: dp - f_ext,
            balance_m: dm - AngularMomentum2::wedge(st.z, f_ext),
            balance_error: 1e-15 * (c as f64) * momentum(c, p_part).max_abs().max(1.0) * scale,
        });
    }
    Ok(out)
}

/// Write ledger rows: tau, p_rad, p_part, mass, M_rad, balance_p.
pub fn write_ledger_csv(reports: &[LedgerReport], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "tau,p_rad0,p_rad1,p_rad2,p_part0,p_part1,p_part2,mass,Mrad01,Mrad02,Mrad12,bal_p0,bal_p1,bal_p2")?;
    for r in reports {
        let v = [
            r.tau,
            r.p_rad.t,
            r.p_rad.x,
            r.p_rad.y,
            r.p_part.t,
            r.p_part.x,
            r.p_part.y,
            r.mass,
            r.m_rad.m01,
            r.m_rad.m02,
            r.m_rad.m12,
            r.balance_p.t,
            r.balance_p.x,
            r.balance_p.y,
        ];
        let line: Vec<String> = v.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}
