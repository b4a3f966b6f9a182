//! Tail self-force: force density, its coincidence limit, the regularized
//! history integral and the mass-rate integral.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{mdot, MVec3};
use crate::quadrature::{integrate, Pair, QuadOptions};
use crate::segment::LineSegment;
use crate::worldline::{AsymptoticRegime, Direction, Worldline, WorldlineState};

/// How the history before the integration window is treated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrehistoryPolicy {
    /// Integrate back to the worldline's straight asymptote and add its closed form.
    IncludeAsymptote,
    /// Ignore all history before the given proper time.
    TruncateAt(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailIntegrandSample {
    pub s: f64,
    pub raw_force_density: MVec3,
    pub counterterm: MVec3,
    pub combined: MVec3,
    pub mass_rate_density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfForceResult {
    pub force: MVec3,
    pub mass_rate: f64,
    /// Width of the coincidence window handled by the series.
    pub series_cut: f64,
    pub quad_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfForceOptions {
    pub quad_tol: f64,
    /// Initial coincidence window; defaults to `1e-3 / max(1, |a|)`.
    pub initial_cut: Option<f64>,
    pub max_shrinks: usize,
}

impl Default for SelfForceOptions {
    fn default() -> Self {
        SelfForceOptions { quad_tol: 1e-9, initial_cut: None, max_shrinks: 8 }
    }
}

/// Tail force integral in one direction with its logarithmic divergence split off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailForce {
    /// Integral over the history at separations larger than the cutoff.
    pub integral: MVec3,
    /// Coefficient `c` of the `c/Delta` behaviour of the integrand at small separation.
    pub divergence: MVec3,
    pub cutoff: f64,
    pub quad_error: f64,
}

struct Pairwise {
    q: MVec3,
    sigma: f64,
    now: WorldlineState,
    then: WorldlineState,
}

fn pairwise(w: &dyn Worldline, tau: f64, s: f64) -> Result<Pairwise> {
    if !(s < tau) {
        return Err(Error::invalid(format!("emission time s = {s} must precede tau = {tau}")));
    }
    let q = w.chord(tau, s)?;
    let sigma = w.proper_separation(tau, s)?;
    if !(sigma > 0.0) {
        return Err(Error::NotCausal { tau, s, qq: mdot(q, q) });
    }
    Ok(Pairwise { q, sigma, now: w.eval(tau)?, then: w.eval(s)? })
}

fn density_from(p: &Pairwise, e: f64) -> MVec3 {
    let (q, ut, us, a_s) = (p.q, p.now.u, p.then.u, p.then.a);
    let r = -mdot(q, us);
    let uq = mdot(ut, q);
    let vel = (us * uq - q * mdot(ut, us)) * ((1.0 + mdot(q, a_s)) / (r * r));
    let acc = (a_s * uq - q * mdot(ut, a_s)) * (1.0 / r);
    (vel + acc) * (e * e / p.sigma)
}

fn mass_density_from(p: &Pairwise, e: f64) -> f64 {
    0.5 * e * e * mdot(p.q, p.now.u - p.then.u) / p.sigma.powi(3)
}

/// Lorentz force per unit emission time exerted at `tau` by the field emitted at `s < tau`.
pub fn force_density(w: &dyn Worldline, tau: f64, s: f64, e: f64) -> Result<MVec3> {
    Ok(density_from(&pairwise(w, tau, s)?, e))
}

/// Finite coincidence limit of the regularized self-force integrand.
pub fn abraham_limit(state: &WorldlineState, e: f64) -> MVec3 {
    (state.adot - state.u * mdot(state.a, state.a)) * (2.0 / 3.0 * e * e)
}

/// Force density plus the counterterm `(e^2/2) a(tau) / sqrt(-(q.q))`.
pub fn combined_integrand(w: &dyn Worldline, tau: f64, s: f64, e: f64) -> Result<TailIntegrandSample> {
    let p = pairwise(w, tau, s)?;
    let raw = density_from(&p, e);
    let counterterm = p.now.a * (0.5 * e * e / p.sigma);
    Ok(TailIntegrandSample {
        s,
        raw_force_density: raw,
        counterterm,
        combined: raw + counterterm,
        mass_rate_density: mass_density_from(&p, e),
    })
}

/// `(e^2/2) [(q.u_tau) - (q.u_s)] / (-(q.q))^(3/2)`.
pub fn mass_rate_density(w: &dyn Worldline, tau: f64, s: f64, e: f64) -> Result<f64> {
    Ok(mass_density_from(&pairwise(w, tau, s)?, e))
}

/// Retarded straight asymptote below the split point, if the worldline declares one.
fn past_segment(w: &dyn Worldline) -> Result<(f64, LineSegment)> {
    let (split, is_static) = match w.asymptotic_regime() {
        AsymptoticRegime::StaticBefore(t) => (t, true),
        AsymptoticRegime::UniformBefore(t) => (t, false),
        AsymptoticRegime::None => return Err(Error::MissingAsymptote("past")),
    };
    let st = w.eval(split)?;
    let u = if is_static { crate::geometry::MVec3::REST } else { st.u };
    Ok((split, LineSegment { z_end: st.z, u }))
}

/// Lower end of the quadrature window and the closed-form prehistory contribution.
fn history_start(w: &dyn Worldline, now: &WorldlineState, e: f64, policy: PrehistoryPolicy) -> Result<(f64, MVec3, f64)> {
    match policy {
        PrehistoryPolicy::TruncateAt(t0) => Ok((t0, MVec3::ZERO, 0.0)),
        PrehistoryPolicy::IncludeAsymptote => {
            let (split, seg) = past_segment(w)?;
            if now.tau <= split {
                return Ok((split, MVec3::ZERO, 0.0));
            }
            let f = seg.field(e, now.z, Direction::Retarded)?;
            let force = f.contract(now.u) * e;
            let mass = seg.mass_rate(e, now.z, now.u)?;
            Ok((split, force, mass))
        }
    }
}

pub fn self_force(w: &dyn Worldline, tau: f64, e: f64, policy: PrehistoryPolicy) -> Result<SelfForceResult> {
    self_force_with(w, tau, e, policy, &SelfForceOptions::default())
}

/// Regularized self-force and mass rate at `tau`.
///
/// The history integral is split into a far part done by adaptive quadrature and
/// a coincidence window `[tau - cut, tau]` done by a linear series anchored at
/// the Abraham limit. The window shrinks until the series error estimate is
/// below `quad_tol * |force|`.
pub fn self_force_with(
    w: &dyn Worldline,
    tau: f64,
    e: f64,
    policy: PrehistoryPolicy,
    opts: &SelfForceOptions,
) -> Result<SelfForceResult> {
    if !(opts.quad_tol > 0.0) {
        return Err(Error::invalid("quad_tol must be positive"));
    }
    let now = w.eval(tau)?;
    let (start, pre_force, pre_mass) = history_start(w, &now, e, policy)?;
    let span = tau - start;
    if span <= 0.0 {
        return Ok(SelfForceResult { force: pre_force, mass_rate: pre_mass, series_cut: 0.0, quad_error: 0.0 });
    }
    let a_norm = mdot(now.a, now.a).max(0.0).sqrt();
    let limit = abraham_limit(&now, e);
    let mut cut = opts.initial_cut.unwrap_or(1e-3 / a_norm.max(1.0)).min(0.25 * span);

    let comb = |s: f64| -> Result<Pair<MVec3, f64>> {
        let smp = combined_integrand(w, tau, s, e)?;
        Ok(Pair(smp.combined, smp.mass_rate_density))
    };
    let quad_opts = QuadOptions::new(opts.quad_tol, 1e-12 * e * e * (1.0 + a_norm));

    let far0 = integrate(comb, start, tau - cut, quad_opts)?;
    let mut far_force = far0.value.0;
    let mut far_mass = far0.value.1;
    let mut far_err = far0.error;

    for _ in 0..=opts.max_shrinks {
        let c1 = combined_integrand(w, tau, tau - cut, e)?;
        let c2 = combined_integrand(w, tau, tau - 2.0 * cut, e)?;
        let slope = (c1.combined - limit) * (1.0 / cut);
        let near_force = limit * cut + slope * (0.5 * cut * cut);
        let curvature = c2.combined - limit - slope * (2.0 * cut);
        let series_err = curvature.max_abs() * cut / 6.0;

        let half = mass_rate_density(w, tau, tau - 0.5 * cut, e)?;
        let m0 = 2.0 * half - c1.mass_rate_density;
        let near_mass = 0.5 * cut * (m0 + c1.mass_rate_density);

        let force = pre_force + far_force + near_force;
        let floor = 1e-14 * e * e * (a_norm + limit.max_abs());
        if series_err <= (opts.quad_tol * force.max_abs()).max(floor) {
            log::trace!("self-force at tau = {tau}: cut {cut:e}, mass-rate limit {m0:e}");
            return Ok(SelfForceResult {
                force,
                mass_rate: pre_mass + far_mass + near_mass,
                series_cut: cut,
                quad_error: far_err + series_err,
            });
        }
        let next = 0.25 * cut;
        // Pieces near the diagonal only need accuracy relative to the total.
        let piece_opts = QuadOptions::new(opts.quad_tol, quad_opts.abs_tol.max(0.1 * opts.quad_tol * force.max_abs()));
        let extra = integrate(comb, tau - cut, tau - next, piece_opts)?;
        far_force += extra.value.0;
        far_mass += extra.value.1;
        far_err += extra.error;
        cut = next;
    }
    Err(Error::UnresolvedCutoff { tau })
}

/// Integrand `e^2 [-(q.u1) u_s + (u1.u_s) q] / (-(q.q))^(3/2)` with `q = z(tau1) - z(s)`.
pub fn tail_integrand(w: &dyn Worldline, tau1: f64, s: f64, e: f64) -> Result<MVec3> {
    let c = w.local_chord(tau1, s)?;
    let sigma = w.proper_separation(tau1, s)?;
    if !(sigma > 0.0) {
        return Err(Error::NotCausal { tau: tau1, s, qq: mdot(c.q, c.q) });
    }
    // u_s r + q (u.u_s) with u.u_s = -1 - (du.du)/2, rearranged so that the
    // O(delta) parts cancel analytically.
    let n = c.du * c.r - c.perp - c.q * (0.5 * mdot(c.du, c.du));
    Ok(n * (e * e / sigma.powi(3)))
}

/// Retarded-minus-advanced tail integrand at equal separation `delta` from `tau1`.
pub fn paired_tail_integrand(w: &dyn Worldline, tau1: f64, delta: f64, e: f64) -> Result<MVec3> {
    // Snap delta so that tau1 - delta and tau1 + delta are both exact.
    let delta = (tau1 + delta) - tau1;
    Ok(tail_integrand(w, tau1, tau1 - delta, e)? - tail_integrand(w, tau1, tau1 + delta, e)?)
}

/// Integrate `g(delta)` over `[lo, hi]` in the variable `ln(delta)`.
fn integrate_log<F>(mut g: F, lo: f64, hi: f64, opts: QuadOptions) -> Result<(MVec3, f64)>
where
    F: FnMut(f64) -> Result<MVec3>,
{
    if hi <= lo {
        return Ok((MVec3::ZERO, 0.0));
    }
    let r = integrate(
        |v: f64| {
            let d = v.exp();
            Ok(g(d)? * d)
        },
        lo.ln(),
        hi.ln(),
        opts,
    )?;
    Ok((r.value, r.error))
}

/// Tail Lorentz force at `tau1` in one direction, with separations below `cutoff` excluded.
///
/// Retarded: emission times in `(-inf, tau1 - cutoff]` with the prehistory per
/// `policy`. Advanced: `[tau1 + cutoff, tau_obs]`.
pub fn tail_lorentz_force(
    w: &dyn Worldline,
    tau1: f64,
    e: f64,
    direction: Direction,
    tau_obs: f64,
    cutoff: f64,
    policy: PrehistoryPolicy,
) -> Result<TailForce> {
    if !(cutoff > 0.0) {
        return Err(Error::invalid(format!("cutoff must be positive, got {cutoff}")));
    }
    let now = w.eval(tau1)?;
    let opts = QuadOptions::new(1e-11, 1e-12 * e * e);
    let (integral, quad_error) = match direction {
        Direction::Retarded => {
            let (start, extra) = match policy {
                PrehistoryPolicy::TruncateAt(t0) => (t0, MVec3::ZERO),
                PrehistoryPolicy::IncludeAsymptote => {
                    let (split, seg) = past_segment(w)?;
                    if tau1 - cutoff <= split {
                        return Err(Error::invalid("cutoff reaches into the straight prehistory"));
                    }
                    (split, seg.tail_force(e, now.z, now.u)?)
                }
            };
            let (v, err) = integrate_log(|d| tail_integrand(w, tau1, tau1 - d, e), cutoff, tau1 - start, opts)?;
            (v + extra, err)
        }
        Direction::Advanced => {
            if tau_obs < tau1 {
                return Err(Error::invalid(format!("observation time {tau_obs} precedes tau1 = {tau1}")));
            }
            integrate_log(|d| tail_integrand(w, tau1, tau1 + d, e), cutoff, tau_obs - tau1, opts)?
        }
    };
    Ok(TailForce { integral, divergence: now.a * (-0.5 * e * e), cutoff, quad_error })
}

/// Write combined-integrand samples at `tau` for the given emission times.
pub fn write_tail_samples_csv(w: &dyn Worldline, tau: f64, e: f64, s_values: &[f64], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "s,raw0,raw1,raw2,ct0,ct1,ct2,comb0,comb1,comb2,mass_rate_density")?;
    for &s in s_values {
        let t = combined_integrand(w, tau, s, e)?;
        let v = [
            t.s,
            t.raw_force_density.t,
            t.raw_force_density.x,
            t.raw_force_density.y,
            t.counterterm.t,
            t.counterterm.x,
            t.counterterm.y,
            t.combined.t,
            t.combined.x,
            t.combined.y,
            t.mass_rate_density,
        ];
        let line: Vec<String> = v.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::wedge;
    use crate::worldline::{CircularWorldline, HyperbolicWorldline, StaticWorldline, UniformWorldline};

    #[test]
    fn straight_histories_exert_no_force() {
        let s = StaticWorldline::at_origin();
        let u = UniformWorldline::with_velocity(MVec3::new(0.0, 1.0, -1.0), 0.3, 0.4).unwrap();
        for w in [&s as &dyn Worldline, &u] {
            for d in [1e-3, 0.5, 4.0] {
                let noise = 1e-14 / (d * d);
                assert!(force_density(w, 2.0, 2.0 - d, 1.0).unwrap().max_abs() < noise);
                assert!(mass_rate_density(w, 2.0, 2.0 - d, 1.0).unwrap().abs() < noise);
            }
            let r = self_force(w, 3.0, 1.0, PrehistoryPolicy::IncludeAsymptote).unwrap();
            assert!(r.force.max_abs() < 1e-10 && r.mass_rate.abs() < 1e-10);
        }
    }

    #[test]
    fn density_equals_field_kernel_contracted() {
        let w = HyperbolicWorldline::new(1.0).unwrap();
        let (tau, s, e) = (1.0, 0.5, 1.0);
        let now = w.eval(tau).unwrap();
        let then = w.eval(s).unwrap();
        let k = now.z - then.z;
        let r = -mdot(k, then.u);
        let root = (-mdot(k, k)).sqrt();
        let f = (wedge(then.u, k) * ((1.0 + mdot(k, then.a)) / (r * r)) + wedge(then.a, k) * (1.0 / r)) * (e / root);
        let want = f.contract(now.u) * e;
        let got = force_density(&w, tau, s, e).unwrap();
        assert!((got - want).max_abs() < 1e-13, "{got:?} {want:?}");
    }

    #[test]
    fn rejects_non_past_emission() {
        let w = StaticWorldline::at_origin();
        assert!(force_density(&w, 1.0, 1.0, 1.0).is_err());
        assert!(combined_integrand(&w, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn abraham_vanishes_on_hyperbola() {
        let w = HyperbolicWorldline::new(1.3).unwrap();
        let st = w.eval(0.7).unwrap();
        assert!(abraham_limit(&st, 1.0).max_abs() < 1e-13);
    }

    #[test]
    fn hyperbolic_self_force_closed_form() {
        let w = HyperbolicWorldline::new(1.0).unwrap();
        for tau in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let r = self_force(&w, tau, 1.0, PrehistoryPolicy::TruncateAt(0.0)).unwrap();
            let coef = 0.5 * (1.0 - 1.0 / (0.5 * tau).cosh());
            let a = w.eval(tau).unwrap().a;
            let want = a * coef;
            assert!((r.force - want).max_abs() <= 1e-6 * want.max_abs(), "tau {tau}: {:?} vs {want:?}", r.force);
            assert!(r.mass_rate.abs() < 1e-8);
        }
        let coef2 = 0.5 * (1.0 - 1.0 / 1f64.cosh());
        assert!((coef2 - 0.175_973).abs() < 1e-6);
    }

    #[test]
    fn static_prehistory_adds_segment_force() {
        let w = HyperbolicWorldline::new(1.0).unwrap();
        let trunc = self_force(&w, 1.0, 1.0, PrehistoryPolicy::TruncateAt(0.0)).unwrap();
        let full = self_force(&w, 1.0, 1.0, PrehistoryPolicy::IncludeAsymptote).unwrap();
        let now = w.eval(1.0).unwrap();
        let seg = LineSegment::new(MVec3::ZERO, MVec3::REST).unwrap();
        let extra = seg.field(1.0, now.z, Direction::Retarded).unwrap().contract(now.u);
        assert!((full.force - trunc.force - extra).max_abs() < 1e-9);
    }

    #[test]
    fn uniform_tail_forces_vanish() {
        let w = UniformWorldline::with_velocity(MVec3::ZERO, 0.5, 0.1).unwrap();
        for dir in [Direction::Retarded, Direction::Advanced] {
            let t = tail_lorentz_force(&w, 1.0, 1.0, dir, 3.0, 1e-4, PrehistoryPolicy::IncludeAsymptote).unwrap();
            assert!(t.integral.max_abs() < 1e-10);
            assert_eq!(t.divergence, MVec3::ZERO);
        }
    }

    #[test]
    fn tail_force_divergence_coefficient() {
        let w = CircularWorldline::new(0.1, 1.0, 0.0).unwrap();
        let tau = 1.0;
        let a = w.eval(tau).unwrap().a;
        for dir in [Direction::Retarded, Direction::Advanced] {
            let f1 = tail_lorentz_force(&w, tau, 1.0, dir, 2.0, 1e-4, PrehistoryPolicy::TruncateAt(0.0)).unwrap();
            let f2 = tail_lorentz_force(&w, tau, 1.0, dir, 2.0, 1e-5, PrehistoryPolicy::TruncateAt(0.0)).unwrap();
            // Integrand ~ c/Delta, so shrinking the cutoff by 10 adds c ln 10.
            let growth = (f2.integral - f1.integral) * (1.0 / 10f64.ln());
            assert!((growth - f1.divergence).max_abs() < 1e-3 * a.max_abs(), "{growth:?} {:?}", f1.divergence);
        }
    }

    #[test]
    fn samples_csv_has_header_and_rows() {
        let w = CircularWorldline::new(0.1, 1.0, 0.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_tail_samples_csv(&w, 1.0, 1.0, &[0.0, 0.5, 0.9], &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("s,raw0"));
    }
}
