//! Forward integration of the history-dependent equation of motion with a
//! dynamical inertial mass.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{mdot, FieldStrength, MVec3};
use crate::ledger::{balance_on_nodes, BalanceInput, LedgerOptions, LedgerReport, NodeHistory};
use crate::segment::LineSegment;
use crate::selfforce::PrehistoryPolicy;
use crate::worldline::{Direction, Prehistory, TabulatedWorldline, WorldlineState};

/// Constant external field switched on during `[tau_on, tau_off]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExternalField {
    pub field: FieldStrength,
    pub tau_on: f64,
    pub tau_off: f64,
}

impl ExternalField {
    pub fn new(field: FieldStrength, tau_on: f64, tau_off: f64) -> Result<Self> {
        if !(tau_on <= tau_off) {
            return Err(Error::invalid(format!("field window [{tau_on}, {tau_off}] is empty")));
        }
        Ok(ExternalField { field, tau_on, tau_off })
    }

    /// Field along the x^1 axis, active for all times.
    pub fn electric_x(e1: f64) -> Self {
        ExternalField { field: FieldStrength::new(e1, 0.0, 0.0), tau_on: f64::NEG_INFINITY, tau_off: f64::INFINITY }
    }

    pub fn at(&self, tau: f64) -> FieldStrength {
        if tau >= self.tau_on && tau <= self.tau_off {
            self.field
        } else {
            FieldStrength::ZERO
        }
    }

    fn edge_between(&self, t0: f64, t1: f64) -> bool {
        [self.tau_on, self.tau_off].iter().any(|&t| t.is_finite() && t >= t0 && t <= t1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub charge: f64,
    pub mass0: f64,
    pub field: Option<ExternalField>,
    pub h: f64,
    pub tau_end: f64,
    pub quad_tol: f64,
    /// History before `tau = 0`: truncated, or the straight line through the initial state.
    pub prehistory: PrehistoryPolicy,
    pub self_force: bool,
    /// Use a stride-4 grid for history older than one unit of proper time.
    pub coarsen: bool,
    pub z0: MVec3,
    pub u0: MVec3,
}

impl SimConfig {
    pub fn new(charge: f64, mass0: f64, field: Option<ExternalField>, h: f64, tau_end: f64) -> Self {
        SimConfig {
            charge,
            mass0,
            field,
            h,
            tau_end,
            quad_tol: 1e-9,
            prehistory: PrehistoryPolicy::TruncateAt(0.0),
            self_force: true,
            coarsen: false,
            z0: MVec3::ZERO,
            u0: MVec3::REST,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass0 > 0.0) {
            return Err(Error::invalid(format!("initial mass must be positive, got {}", self.mass0)));
        }
        if !self.charge.is_finite() {
            return Err(Error::invalid("charge must be finite"));
        }
        if !(self.h > 0.0 && self.tau_end > 0.0 && self.h <= self.tau_end) {
            return Err(Error::invalid(format!("need 0 < h <= tau_end, got h = {}, tau_end = {}", self.h, self.tau_end)));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol < 1.0) {
            return Err(Error::invalid("quad_tol must lie in (0, 1)"));
        }
        if let PrehistoryPolicy::TruncateAt(t) = self.prehistory {
            if t != 0.0 {
                return Err(Error::invalid("simulations start at tau = 0; only truncation at 0 is supported"));
            }
        }
        self.u0.check_unit_timelike()?;
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.tau_end / self.h).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub tau: f64,
    pub z: MVec3,
    pub u: MVec3,
    pub m: f64,
    pub p_part: MVec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeDiagnostics {
    pub a: MVec3,
    pub self_force: MVec3,
    pub mass_rate: f64,
    pub quad_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub config: SimConfig,
    pub states: Vec<ParticleState>,
    pub diagnostics: Vec<NodeDiagnostics>,
    pub config_hash: Option<String>,
}

/// Self-force evaluated on the node history for a trial state at the newest node.
struct NodeForce {
    /// Everything except the counterterm, which is linear in the acceleration.
    rest: MVec3,
    /// Scalar multiplying `a` in the counterterm sum.
    counter: f64,
    mass_rate: f64,
    cloud: MVec3,
    quad_error: f64,
}

/// Number of most recent history nodes whose counterterm is treated implicitly.
const IMPLICIT_NODES: usize = 1;

struct Integrator<'a> {
    cfg: &'a SimConfig,
    tau: Vec<f64>,
    z: Vec<MVec3>,
    u: Vec<MVec3>,
    a: Vec<MVec3>,
    segment: Option<LineSegment>,
}

impl Integrator<'_> {
    fn external(&self, tau: f64, z: MVec3, u: MVec3) -> Result<(MVec3, f64)> {
        let e = self.cfg.charge;
        let mut f = match &self.cfg.field {
            Some(ext) => ext.at(tau).contract(u) * e,
            None => MVec3::ZERO,
        };
        let mut mdot = 0.0;
        if let (Some(seg), true) = (&self.segment, self.cfg.self_force) {
            if tau > 0.0 {
                f += seg.field(e, z, Direction::Retarded)?.contract(u) * e;
                mdot = seg.mass_rate(e, z, u)?;
            }
        }
        Ok((f, mdot))
    }

    /// Trapezoid weights for history nodes seen from node `n` on a grid of the
    /// given stride, excluding the coincident node; with coarsening the history
    /// older than one unit of proper time uses a four times wider grid.
    fn weights(&self, n: usize, stride: usize) -> Vec<(usize, f64)> {
        let h = self.cfg.h;
        let first = n % stride;
        let wide = 4 * stride;
        let mut split = first;
        if self.cfg.coarsen {
            let old = n.saturating_sub((1.0 / h).round() as usize);
            if old > first + wide {
                split = first + (old - first) / wide * wide;
            }
        }
        let mut out = Vec::new();
        if split > first {
            let hc = h * wide as f64;
            for j in (first..=split).step_by(wide) {
                let w = if j == first || j == split { 0.5 * hc } else { hc };
                out.push((j, w));
            }
        }
        let hf = h * stride as f64;
        for j in (split..n).step_by(stride) {
            let w = if j == split { 0.5 * hf } else { hf };
            match out.last_mut() {
                Some(last) if last.0 == j => last.1 += w,
                _ => out.push((j, w)),
            }
        }
        out
    }

    fn node_force(&self, n: usize, tau: f64, z: MVec3, u: MVec3, a_guess: MVec3) -> Result<NodeForce> {
        let e2 = self.cfg.charge * self.cfg.charge;
        // Counterterm nodes this close to the newest node are solved for implicitly;
        // older ones use the trial acceleration.
        let near_from = n.saturating_sub(IMPLICIT_NODES);
        let sum = |stride: usize| -> Result<(MVec3, f64, f64, MVec3)> {
            let mut rest = MVec3::ZERO;
            let mut counter = 0.0;
            let mut mrate = 0.0;
            let mut cloud = MVec3::ZERO;
            for (j, w) in self.weights(n, stride) {
                let q = z - self.z[j];
                let sigma2 = -mdot(q, q);
                if !(sigma2 > 0.0) {
                    return Err(Error::NotCausal { tau, s: self.tau[j], qq: -sigma2 });
                }
                let sigma = sigma2.sqrt();
                let (us, as_) = (self.u[j], self.a[j]);
                let r = -mdot(q, us);
                let uq = mdot(u, q);
                let vel = (us * uq - q * mdot(u, us)) * ((1.0 + mdot(q, as_)) / (r * r));
                let acc = (as_ * uq - q * mdot(u, as_)) * (1.0 / r);
                rest += (vel + acc) * (w * e2 / sigma);
                let ct = w * 0.5 * e2 / sigma;
                if j >= near_from {
                    counter += ct;
                } else {
                    rest += a_guess * ct;
                }
                mrate += w * 0.5 * e2 * mdot(q, u - us) / (sigma2 * sigma);
                cloud += (us - u) * (w * 0.5 * e2 / sigma);
            }
            Ok((rest, counter, mrate, cloud))
        };
        let (rest, counter, mrate, cloud) = sum(1)?;
        let h = self.cfg.h;
        // Coincident end point: Abraham limit with a one-sided jerk estimate.
        let jerk = match n {
            0 => MVec3::ZERO,
            1 => (a_guess - self.a[0]) * (1.0 / h),
            _ => (a_guess * 3.0 - self.a[n - 1] * 4.0 + self.a[n - 2]) * (0.5 / h),
        };
        let abraham = (jerk - u * mdot(a_guess, a_guess)) * (2.0 / 3.0 * e2);
        let end_w = if n > 0 { 0.5 * h } else { 0.0 };
        let mut mass_end = 0.0;
        if n >= 2 {
            let md = |j: usize| {
                let q = z - self.z[j];
                let s2 = -mdot(q, q);
                0.5 * e2 * mdot(q, u - self.u[j]) / (s2 * s2.sqrt())
            };
            mass_end = 2.0 * md(n - 1) - md(n - 2);
        }
        let mut quad_error = 0.0;
        if n >= 8 {
            let (r2, c2, m2, _) = sum(2)?;
            let fine = rest + a_guess * counter + abraham * end_w;
            let coarse = r2 + a_guess * c2 + abraham * (2.0 * end_w);
            quad_error = ((coarse - fine).max_abs() + (m2 - mrate).abs()) / 3.0;
        }
        Ok(NodeForce {
            rest: rest + abraham * end_w,
            counter,
            mass_rate: mrate + mass_end * end_w,
            cloud: cloud + a_guess * (-0.5 * e2 * end_w),
            quad_error,
        })
    }

    /// Solve `m a = F_ext + F_self(a)` for a trial state at node `n`.
    fn acceleration(&self, n: usize, tau: f64, z: MVec3, u: MVec3, m: f64, a_guess: MVec3) -> Result<(MVec3, NodeForce, MVec3)> {
        let (f_ext, _) = self.external(tau, z, u)?;
        if !self.cfg.self_force {
            let a = (f_ext * (1.0 / m)).orthogonal_to(u);
            let nf = NodeForce { rest: MVec3::ZERO, counter: 0.0, mass_rate: 0.0, cloud: MVec3::ZERO, quad_error: 0.0 };
            return Ok((a, nf, f_ext));
        }
        let nf = self.node_force(n, tau, z, u, a_guess)?;
        let eff = m - nf.counter;
        if !(eff > 0.0) {
            return Err(Error::MassNonPositive { tau, mass: eff });
        }
        let a = ((f_ext + nf.rest) * (1.0 / eff)).orthogonal_to(u);
        Ok((a, nf, f_ext))
    }

    fn mass_rate(&self, n: usize, tau: f64, z: MVec3, u: MVec3) -> Result<f64> {
        if !self.cfg.self_force {
            return Ok(0.0);
        }
        let (_, seg_rate) = self.external(tau, z, u)?;
        // The mass rate does not involve the acceleration at the newest node.
        Ok(self.node_force(n, tau, z, u, MVec3::ZERO)?.mass_rate + seg_rate)
    }
}

/// Integrate the equation of motion; returns the trace up to the first failure and the failure.
pub fn simulate_partial(cfg: &SimConfig) -> (SimulationTrace, Option<Error>) {
    let mut trace = SimulationTrace { config: *cfg, states: Vec::new(), diagnostics: Vec::new(), config_hash: None };
    if let Err(e) = cfg.validate() {
        return (trace, Some(e));
    }
    let segment = match cfg.prehistory {
        PrehistoryPolicy::IncludeAsymptote => Some(LineSegment { z_end: cfg.z0, u: cfg.u0 }),
        PrehistoryPolicy::TruncateAt(_) => None,
    };
    let mut it = Integrator { cfg, tau: Vec::new(), z: Vec::new(), u: Vec::new(), a: Vec::new(), segment };
    let err = run(&mut it, &mut trace).err();
    (trace, err)
}

pub fn simulate(cfg: &SimConfig) -> Result<SimulationTrace> {
    match simulate_partial(cfg) {
        (trace, None) => Ok(trace),
        (_, Some(e)) => Err(e),
    }
}

fn run(it: &mut Integrator, trace: &mut SimulationTrace) -> Result<()> {
    let cfg = it.cfg;
    let h = cfg.h;
    let n_steps = cfg.steps();
    let (z0, u0) = (cfg.z0, cfg.u0);
    let (f0, mdot0) = it.external(0.0, z0, u0)?;
    let a0 = (f0 * (1.0 / cfg.mass0)).orthogonal_to(u0);
    let mut m = cfg.mass0;
    let mut mdot_n = if cfg.self_force { mdot0 } else { 0.0 };
    it.tau.push(0.0);
    it.z.push(z0);
    it.u.push(u0);
    it.a.push(a0);
    trace.states.push(ParticleState { tau: 0.0, z: z0, u: u0, m, p_part: u0 * m });
    trace.diagnostics.push(NodeDiagnostics { a: a0, self_force: MVec3::ZERO, mass_rate: mdot_n, quad_error: 0.0 });

    for n in 0..n_steps {
        let k = n + 1;
        let tau = k as f64 * h;
        let (zn, un, an) = (it.z[n], it.u[n], it.a[n]);

        let u_pred = (un + an * h).renormalized_velocity();
        let z_pred = zn + un * h + an * (0.5 * h * h);
        let m_pred = m + h * mdot_n;
        if !(m_pred > 0.0) {
            return Err(Error::MassNonPositive { tau, mass: m_pred });
        }
        let a_extrap = if n > 0 { an * 2.0 - it.a[n - 1] } else { an };
        let (a_pred, _, _) = it.acceleration(k, tau, z_pred, u_pred, m_pred, a_extrap)?;

        let u_new = (un + (an + a_pred) * (0.5 * h)).renormalized_velocity();
        let z_new = zn + (un + u_new) * (0.5 * h) + (an - a_pred) * (h * h / 12.0);

        let mdot_new = it.mass_rate(k, tau, z_new, u_new)?;
        let m_new = m + 0.5 * h * (mdot_n + mdot_new);
        if !(m_new > 0.0) {
            return Err(Error::MassNonPositive { tau, mass: m_new });
        }
        let (a_new, nf, f_ext) = it.acceleration(k, tau, z_new, u_new, m_new, a_pred)?;

        let disagreement = (u_new - u_pred).max_abs();
        let limit = 100.0 * h * h * u_new.max_abs().max(1.0);
        let near_edge = cfg.field.map(|f| f.edge_between(tau - 2.0 * h, tau + h)).unwrap_or(false);
        if disagreement > limit && !near_edge {
            return Err(Error::StepRejected { tau, disagreement, limit });
        }
        if !(z_new.is_finite() && u_new.is_finite() && a_new.is_finite() && m_new.is_finite()) {
            return Err(Error::NonFinite { tau });
        }

        it.tau.push(tau);
        it.z.push(z_new);
        it.u.push(u_new);
        it.a.push(a_new);
        m = m_new;
        mdot_n = mdot_new;
        let self_force = a_new * m_new - f_ext;
        let p_part = u_new * m_new + nf.cloud;
        trace.states.push(ParticleState { tau, z: z_new, u: u_new, m, p_part });
        trace.diagnostics.push(NodeDiagnostics { a: a_new, self_force, mass_rate: mdot_new, quad_error: nf.quad_error });
    }
    Ok(())
}

/// Result of a least-squares fit of `|a|` over a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelerationFit {
    pub mean: f64,
    /// Slope of the linear least-squares fit of `|a|` against `tau`.
    pub slope: f64,
    pub max_deviation: f64,
    pub nodes: usize,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&ParticleState> {
        self.states.last()
    }

    /// Proper acceleration magnitude `sqrt(a.a)` at each node.
    pub fn proper_acceleration(&self) -> Vec<f64> {
        self.diagnostics.iter().map(|d| mdot(d.a, d.a).max(0.0).sqrt()).collect()
    }

    /// Trace as an interpolated worldline, with the prehistory of the run.
    pub fn worldline(&self) -> Result<TabulatedWorldline> {
        let tau = self.states.iter().map(|s| s.tau).collect();
        let z = self.states.iter().map(|s| s.z).collect();
        let u = self.states.iter().map(|s| s.u).collect();
        let a = self.diagnostics.iter().map(|d| d.a).collect();
        let w = TabulatedWorldline::from_nodes(tau, z, u, a)?;
        match self.config.prehistory {
            PrehistoryPolicy::IncludeAsymptote => w.with_prehistory(Prehistory::Uniform),
            PrehistoryPolicy::TruncateAt(_) => Ok(w),
        }
    }

    /// Mass at arbitrary `tau` by cubic Hermite interpolation of `(m, dm/dtau)`.
    pub fn mass_at(&self, tau: f64) -> f64 {
        let h = self.config.h;
        let n = self.states.len();
        if n == 1 {
            return self.states[0].m;
        }
        let i = ((tau / h).floor() as isize).clamp(0, n as isize - 2) as usize;
        let t = (tau - self.states[i].tau) / h;
        let (m0, m1) = (self.states[i].m, self.states[i + 1].m);
        let (d0, d1) = (self.diagnostics[i].mass_rate * h, self.diagnostics[i + 1].mass_rate * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * m0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * m1 + (t3 - t2) * d1
    }

    /// Energy-momentum and angular-momentum balance at the nodes nearest to `taus`.
    ///
    /// History integrals use the trapezoid rule on the trace nodes and time
    /// derivatives use differences over `delta` (rounded to whole steps).
    pub fn balance_residuals(&self, taus: &[f64], delta: f64) -> Result<Vec<LedgerReport>> {
        if self.states.len() < 5 {
            return Err(Error::TraceTooShort(format!("{} nodes", self.states.len())));
        }
        if matches!(self.config.prehistory, PrehistoryPolicy::IncludeAsymptote) && self.config.self_force {
            return Err(Error::PrehistoryUnresolved("balance needs a truncated history"));
        }
        let cfg = self.config;
        let stride = (delta / cfg.h).round().max(1.0) as usize;
        let tau: Vec<f64> = self.states.iter().map(|s| s.tau).collect();
        let z: Vec<MVec3> = self.states.iter().map(|s| s.z).collect();
        let u: Vec<MVec3> = self.states.iter().map(|s| s.u).collect();
        let a: Vec<MVec3> = self.diagnostics.iter().map(|d| d.a).collect();
        let nodes = NodeHistory { tau: &tau, z: &z, u: &u, a: &a };
        let mass = |t: f64| self.mass_at(t);
        let e = cfg.charge;
        let ext = move |st: &WorldlineState| match &cfg.field {
            Some(f) => f.at(st.tau).contract(st.u) * e,
            None => MVec3::ZERO,
        };
        let inp = BalanceInput {
            e: if cfg.self_force { e } else { 0.0 },
            tau0: 0.0,
            mass: &mass,
            external_force: &ext,
            delta: stride as f64 * cfg.h,
            options: LedgerOptions::default(),
        };
        balance_on_nodes(&nodes, &inp, taus, stride)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "tau,z0,z1,z2,u0,u1,u2,m,F_self0,F_self1,F_self2,mdot,quad_err")?;
        for (s, d) in self.states.iter().zip(&self.diagnostics) {
            let v = [
                s.tau,
                s.z.t,
                s.z.x,
                s.z.y,
                s.u.t,
                s.u.x,
                s.u.y,
                s.m,
                d.self_force.t,
                d.self_force.x,
                d.self_force.y,
                d.mass_rate,
                d.quad_error,
            ];
            let line: Vec<String> = v.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Least-squares fit of `|a(tau)|` over `[tau_a, tau_b]`.
pub fn fit_effective_acceleration(trace: &SimulationTrace, window: (f64, f64)) -> Result<AccelerationFit> {
    let acc = trace.proper_acceleration();
    let pts: Vec<(f64, f64)> = trace
        .states
        .iter()
        .zip(acc)
        .filter(|(s, _)| s.tau >= window.0 && s.tau <= window.1)
        .map(|(s, a)| (s.tau, a))
        .collect();
    if pts.len() < 10 {
        return Err(Error::TraceTooShort(format!("{} nodes in window [{}, {}]; need at least 10", pts.len(), window.0, window.1)));
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_t) * (p.1 - mean)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let max_deviation = pts.iter().map(|p| (p.1 - mean).abs()).fold(0.0, f64::max);
    Ok(AccelerationFit { mean, slope, max_deviation, nodes: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbola_cfg(h: f64, tau_end: f64) -> SimConfig {
        let mut c = SimConfig::new(1.0, 1.0, Some(ExternalField::electric_x(1.0)), h, tau_end);
        c.self_force = false;
        c
    }

    #[test]
    fn free_particle_without_self_force_moves_uniformly() {
        let mut c = SimConfig::new(1.0, 1.0, None, 0.01, 1.0);
        c.u0 = MVec3::velocity_from_spatial(0.3, 0.0);
        c.self_force = false;
        let t = simulate(&c).unwrap();
        let last = t.last().unwrap();
        assert!((last.z - c.u0 * 1.0).max_abs() < 1e-12);
    }

    #[test]
    fn rest_with_self_force_stays_at_rest() {
        let c = SimConfig::new(1.0, 1.0, None, 0.01, 1.0);
        let t = simulate(&c).unwrap();
        assert_eq!(t.len(), 101);
        assert!((t.last().unwrap().u - MVec3::REST).max_abs() < 1e-12);
    }

    #[test]
    fn hyperbola_without_self_force() {
        let t = simulate(&hyperbola_cfg(1e-3, 2.0)).unwrap();
        let mut worst: f64 = 0.0;
        for s in &t.states {
            let exact = MVec3::new(s.tau.sinh(), s.tau.cosh() - 1.0, 0.0);
            worst = worst.max((s.z - exact).max_abs());
            assert!((mdot(s.u, s.u) + 1.0).abs() < 1e-7);
        }
        assert!(worst < 1e-6, "max deviation {worst:e}");
    }

    #[test]
    fn fit_needs_enough_nodes() {
        let t = simulate(&hyperbola_cfg(0.1, 1.0)).unwrap();
        assert!(fit_effective_acceleration(&t, (0.0, 0.5)).is_err());
        let f = fit_effective_acceleration(&hyperbola_cfg_trace(), (0.5, 1.0)).unwrap();
        assert!((f.mean - 1.0).abs() < 1e-8 && f.max_deviation < 1e-8);
    }

    fn hyperbola_cfg_trace() -> SimulationTrace {
        simulate(&hyperbola_cfg(0.01, 1.0)).unwrap()
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut c = hyperbola_cfg(0.01, 1.0);
        c.mass0 = -1.0;
        assert!(simulate(&c).is_err());
        assert!(ExternalField::new(FieldStrength::ZERO, 2.0, 1.0).is_err());
    }

    #[test]
    fn trace_csv_row_count() {
        let t = simulate(&hyperbola_cfg(0.1, 1.0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        t.write_csv(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 12);
    }
}
