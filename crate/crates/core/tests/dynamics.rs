use ed3::dynamics::{fit_effective_acceleration, simulate, simulate_partial, ExternalField, SimConfig, SimulationTrace};
use ed3::selfforce::{self_force_with, PrehistoryPolicy, SelfForceOptions};
use ed3::{mdot, Error, FieldStrength, MVec3};

fn scenario(h: f64, tau_end: f64, tau_off: f64) -> SimConfig {
    let field = ExternalField::new(FieldStrength::new(10f64.sqrt(), 0.0, 0.0), 0.0, tau_off).unwrap();
    SimConfig::new(0.1f64.sqrt(), 1.0, Some(field), h, tau_end)
}

fn node_at(t: &SimulationTrace, tau: f64) -> usize {
    (tau / t.config.h).round() as usize
}

#[test]
fn trace_invariants() {
    let t = simulate(&scenario(4e-3, 2.0, 2.0)).unwrap();
    assert_eq!(t.len(), 501);
    for (k, s) in t.states.iter().enumerate() {
        assert!((mdot(s.u, s.u) + 1.0).abs() < 1e-7, "u.u at node {k}");
        assert!((s.tau - k as f64 * 4e-3).abs() < 1e-12);
        assert!(s.m > 0.0);
    }
}

#[test]
fn halving_the_step_converges_at_second_order() {
    let traces: Vec<_> = [4e-3, 2e-3, 1e-3].iter().map(|&h| simulate(&scenario(h, 2.0, 2.0)).unwrap()).collect();
    let reference = &traces[2];
    let deviation = |t: &SimulationTrace| {
        t.states
            .iter()
            .map(|s| {
                let r = &reference.states[node_at(reference, s.tau)];
                (s.z - r.z).max_abs().max((s.u - r.u).max_abs())
            })
            .fold(0.0, f64::max)
    };
    let ratio = deviation(&traces[0]) / deviation(&traces[1]);
    assert!(ratio >= 3.5, "deviation ratio {ratio}");
}

fn reevaluation_mismatch(h: f64, taus: &[f64]) -> Vec<f64> {
    let cfg = scenario(h, 3.0, 3.0);
    let t = simulate(&cfg).unwrap();
    let w = t.worldline().unwrap();
    // The interpolant is only consistent to O(h^4) between nodes, so the
    // coincidence window starts at node scale and the tolerance is loose.
    let opts = SelfForceOptions { quad_tol: 1e-6, initial_cut: Some(2.0 * h), max_shrinks: 8 };
    taus.iter()
        .map(|&tau| {
            let i = node_at(&t, tau);
            let r = self_force_with(&w, t.states[i].tau, cfg.charge, cfg.prehistory, &opts).unwrap();
            let diff = (r.force - t.diagnostics[i].self_force).max_abs();
            let step_tol = 100.0 * h * h * t.states[i].u.max_abs().max(1.0);
            assert!(diff <= 10.0 * step_tol, "tau {tau}: {diff:e}");
            diff
        })
        .collect()
}

#[test]
fn stored_self_force_matches_reevaluation_on_the_trace() {
    let taus = [0.5, 1.0, 2.0, 2.9];
    let coarse = reevaluation_mismatch(4e-3, &taus);
    let fine = reevaluation_mismatch(2e-3, &taus);
    for (k, tau) in taus.iter().enumerate() {
        assert!(coarse[k] / fine[k] > 2.8, "tau {tau}: {:e} -> {:e}", coarse[k], fine[k]);
    }
}

#[test]
fn work_energy_identity_without_self_force() {
    let (e, m) = (0.8, 1.3);
    let f = FieldStrength::new(0.7, 0.4, 0.0);
    let mut cfg = SimConfig::new(e, m, Some(ExternalField::new(f, f64::NEG_INFINITY, f64::INFINITY).unwrap()), 1e-3, 2.0);
    cfg.self_force = false;
    cfg.u0 = MVec3::velocity_from_spatial(0.2, -0.3);
    let t = simulate(&cfg).unwrap();
    let first = t.states[0];
    for s in &t.states {
        let work = e * (f.e1 * (s.z.x - first.z.x) + f.e2 * (s.z.y - first.z.y));
        let energy = m * (s.u.t - first.u.t);
        assert!((work - energy).abs() < 1e-6, "tau {}: {work} vs {energy}", s.tau);
    }
}

#[test]
fn free_hyperbola_has_constant_fitted_acceleration() {
    let mut cfg = SimConfig::new(1.0, 1.0, Some(ExternalField::electric_x(1.0)), 1e-3, 2.0);
    cfg.self_force = false;
    let t = simulate(&cfg).unwrap();
    let fit = fit_effective_acceleration(&t, (0.0, 2.0)).unwrap();
    assert!((fit.mean - 1.0).abs() < 1e-8);
    assert!(fit.max_deviation < 1e-8);
    assert!(fit.slope.abs() < 1e-8);
}

#[test]
fn fit_needs_ten_nodes() {
    let mut cfg = SimConfig::new(1.0, 1.0, Some(ExternalField::electric_x(1.0)), 0.1, 2.0);
    cfg.self_force = false;
    let t = simulate(&cfg).unwrap();
    assert!(matches!(fit_effective_acceleration(&t, (0.0, 0.5)), Err(Error::TraceTooShort(_))));
}

#[test]
fn acceleration_decays_after_the_field_switches_off() {
    let t = simulate(&scenario(4e-3, 6.0, 3.0)).unwrap();
    let during = fit_effective_acceleration(&t, (2.0, 2.96)).unwrap().mean;
    let early = fit_effective_acceleration(&t, (3.5, 4.5)).unwrap().mean;
    let late = fit_effective_acceleration(&t, (5.0, 6.0)).unwrap().mean;
    assert!(early < 0.2 * during, "{early} vs {during}");
    assert!(late < early, "{late} vs {early}");
}

#[test]
fn charge_at_rest_with_static_prehistory_stays_at_rest() {
    let mut cfg = SimConfig::new(1.0, 1.0, None, 1e-2, 2.0);
    cfg.prehistory = PrehistoryPolicy::IncludeAsymptote;
    let t = simulate(&cfg).unwrap();
    for (s, d) in t.states.iter().zip(&t.diagnostics) {
        assert!((s.u - MVec3::REST).max_abs() < 1e-12);
        assert!(d.self_force.max_abs() < 1e-12);
    }
}

#[test]
fn strong_coupling_fails_with_a_partial_trace() {
    let field = ExternalField::new(FieldStrength::new(1.0, 0.0, 0.0), 0.0, 2.0).unwrap();
    let cfg = SimConfig::new(1.0, 1.0, Some(field), 1e-2, 2.0);
    let (trace, err) = simulate_partial(&cfg);
    let err = err.expect("strong coupling should not integrate cleanly");
    assert!(matches!(err, Error::StepRejected { .. } | Error::MassNonPositive { .. }), "{err}");
    assert!(!trace.is_empty());
    assert!(trace.last().unwrap().tau < 2.0);
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = scenario(1e-2, 1.0, 1.0);
    cfg.mass0 = 0.0;
    assert!(simulate(&cfg).is_err());
    let cfg = scenario(2.0, 1.0, 1.0);
    assert!(simulate(&cfg).is_err());
}
