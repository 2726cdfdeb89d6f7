use krflow::flow::{
    accumulate_energy_identity, central_residual, normalize_by_automorphism, run_flow, CNormalization, FlowConfig, InitFamily,
    Monitors,
};
use krflow::geometry::{LogisticPolynomial, Manifold, ReducedGrid, ReducedMetricState};
use krflow::{State, Trace};

fn config(m: Manifold, amplitude: f64, t_end: f64, monitors: &str) -> FlowConfig {
    FlowConfig {
        manifold: m,
        init_amplitude: amplitude,
        init_family: if amplitude == 0.0 { InitFamily::Zero } else { InitFamily::Legendre },
        t_end,
        monitors: Monitors::parse(monitors).unwrap(),
        ..FlowConfig::default()
    }
}

#[test]
fn einstein_metric_is_a_fixed_point() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let cfg = FlowConfig { record_dt: 0.5, normalize_c: CNormalization::Raw, ..config(m, 0.0, 10.0, "none") };
        let trace: Trace = run_flow(&cfg).unwrap();
        let worst = trace.records.iter().fold(0.0f64, |w, r| w.max(r.phi_sup));
        assert!(worst < 1e-8, "{m}: {worst:e}");
    }
}

#[test]
fn cp1_perturbation_converges_monotonically() {
    let trace: Trace = run_flow(&config(Manifold::CP1, 0.2, 10.0, "functionals")).unwrap();
    assert!(trace.final_curvature_deviation() < 1e-3);
    assert_eq!(trace.monotonicity_violations(1e-8), 0);
    assert!(trace.records.iter().all(|r| r.c > -1e-10));
    for k in 0..=1 {
        let e = accumulate_energy_identity(&trace, k).unwrap();
        assert!(e.holds(1e-6), "k = {k}: {} vs {}", e.lhs, e.rhs);
    }
}

/// Centered time differences of stored states against `log(ω_φⁿ/ωⁿ) + φ`, built from
/// `u′, u″` and the closed-form reference, up to the spatially constant `c(t)`.
#[test]
fn states_solve_the_potential_equation() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let cfg = FlowConfig { record_dt: 2e-3, dt: 1e-3, normalize_c: CNormalization::Raw, ..config(m, 0.05, 0.02, "none") };
        let trace: Trace = run_flow(&cfg).unwrap();
        let n = m.dim() as i32;
        let np1 = (n + 1) as f64;
        let states: Vec<State> = trace.states.iter().map(|s| s.metric(&trace.grid).unwrap()).collect();
        for j in 1..states.len() - 1 {
            let delta = (trace.states[j + 1].t - trace.states[j - 1].t) / 2.0;
            let mut diffs = Vec::new();
            for (i, p) in states[j].samples.iter().enumerate() {
                if p.s.abs() > 6.0 {
                    continue;
                }
                let sig = 1.0 / (1.0 + (-p.s).exp());
                let (x0, psi0) = (np1 * sig, np1 * sig * (1.0 - sig));
                let rhs = (p.psi * p.x.powi(n - 1) / (psi0 * x0.powi(n - 1))).ln() + p.phi;
                let lhs = (states[j + 1].phi[i] - states[j - 1].phi[i]) / (2.0 * delta);
                diffs.push(lhs - rhs);
            }
            let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
            let worst = diffs.iter().fold(0.0f64, |w, d| w.max((d - mean).abs()));
            assert!(worst < 1e-5, "{m} t = {}: {worst:e}", trace.states[j].t);
        }
    }
}

#[test]
fn injected_dilations_are_recovered() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let r = ReducedMetricState::<f64>::build_reference(m, 512, 12.0).unwrap();
        for a in [0.7, -0.4] {
            let fit = normalize_by_automorphism(&r.dilated(a).unwrap(), &r).unwrap();
            assert!((fit.a - a).abs() < 1e-6, "{m}: {} vs {a}", fit.a);
            assert!(fit.central_residual.abs() < 1e-8);
            assert!((fit.lambda - (a / 2.0).exp()).abs() < 1e-6);
        }
    }
}

/// A perturbed, dilated state is centrally positioned after normalization.
#[test]
fn normalization_reaches_central_position() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let r = ReducedMetricState::<f64>::build_reference(m, 512, 12.0).unwrap();
        let grid = ReducedGrid::new(m, 512, 12.0).unwrap();
        let p = LogisticPolynomial::new(vec![0.0, 0.3, 0.05]);
        let s = ReducedMetricState::from_potential_fn(grid, p.closure()).unwrap();
        let fit = normalize_by_automorphism(&s, &r).unwrap();
        assert!(fit.central_residual.abs() < 1e-8, "{m}: {:e}", fit.central_residual);
        assert!(central_residual(&s, &r, fit.a + 0.05).unwrap().abs() > 1e-4);
    }
}
