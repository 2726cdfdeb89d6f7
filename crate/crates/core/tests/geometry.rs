use krflow::geometry::{laplacian_spectrum, LogisticPolynomial, Manifold, ReducedGrid, ReducedMetricState};
use krflow::State;
use proptest::prelude::*;

fn softplus(s: f64) -> f64 {
    if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

/// Potential `u = (n+1)·log(1 + eˢ) + a·tanh(s)` and its first two derivatives.
fn tanh_potential(n: usize, a: f64) -> impl Fn(f64) -> [f64; 3] {
    move |s: f64| {
        let m = (n + 1) as f64;
        let sig = 1.0 / (1.0 + (-s).exp());
        let t = s.tanh();
        let sech2 = 1.0 - t * t;
        [m * softplus(s) + a * t, m * sig + a * sech2, m * sig * (1.0 - sig) - 2.0 * a * t * sech2]
    }
}

/// Fourth-order centered first and second derivatives.
fn d1(f: &dyn Fn(f64) -> f64, s: f64, h: f64) -> f64 {
    (f(s - 2.0 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h)
}

fn d2(f: &dyn Fn(f64) -> f64, s: f64, h: f64) -> f64 {
    (-f(s - 2.0 * h) + 16.0 * f(s - h) - 30.0 * f(s) + 16.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h * h)
}

fn tanh_state(m: Manifold, a: f64) -> State {
    let grid = ReducedGrid::new(m, 512, 12.0).unwrap();
    ReducedMetricState::from_potential_fn(grid, |s: f64| {
        let t = s.tanh();
        (a * t, a * (1.0 - t * t), -2.0 * a * t * (1.0 - t * t))
    })
    .unwrap()
}

#[test]
fn volumes_match_chern_numbers() {
    for (m, v) in [(Manifold::CP1, 2.0), (Manifold::CP2, 9.0)] {
        let start = std::time::Instant::now();
        let r = ReducedMetricState::<f64>::build_reference(m, 512, 12.0).unwrap();
        assert!((r.volume() - v).abs() < 1e-8, "{m}: {}", r.volume());
        assert!(start.elapsed().as_secs_f64() < 1.0);
        assert!((tanh_state(m, 0.1).volume() - v).abs() < 1e-8);
    }
}

/// Ricci eigenvalues from the potential `P = −log(u″u′ⁿ⁻¹) + n·s`: radial `P″/u″`, tangential `P′/u′`.
#[test]
fn curvature_matches_ricci_potential_oracle() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let n = m.dim();
        let a = 0.1;
        let u = tanh_potential(n, a);
        let p = |s: f64| {
            let [_, u1, u2] = u(s);
            -(u2 * u1.powi(n as i32 - 1)).ln() + n as f64 * s
        };
        let state = tanh_state(m, a);
        let curv = state.curvature();
        let mut worst = 0.0f64;
        for (i, &s) in state.grid.s.iter().enumerate() {
            // The difference oracle loses digits where u″ ~ e^{−|s|} is small.
            if s.abs() > 5.0 {
                continue;
            }
            let [_, u1, u2] = u(s);
            let radial = d2(&p, s, 1e-2) / u2;
            let tangential = d1(&p, s, 1e-2) / u1;
            let scalar = radial + (n - 1) as f64 * tangential;
            worst = worst.max((curv.scalar[i] - scalar).abs()).max((curv.r1[i] - radial).abs());
            if n == 2 {
                worst = worst.max((curv.r2[i] - tangential).abs());
            }
        }
        assert!(worst < 1e-6, "{m}: {worst:e}");
    }
}

#[test]
fn reference_is_einstein() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let r = ReducedMetricState::<f64>::build_reference(m, 512, 12.0).unwrap();
        let c = r.curvature();
        assert!(c.scalar.iter().all(|v| (v - m.dim() as f64).abs() < 1e-8));
        assert!(r.h_potential().iter().all(|h| h.abs() < 1e-10));
        assert!((r.average_scalar_curvature() - m.dim() as f64).abs() < 1e-10);
    }
}

/// Invariant eigenvalues of the Fubini–Study Laplacian with `Ric = ω`: `k(k+n)/(n+1)`.
#[test]
fn reference_spectrum() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let n = m.dim() as f64;
        let r = ReducedMetricState::<f64>::build_reference(m, 1024, 12.0).unwrap();
        let sp = laplacian_spectrum(&r, 4).unwrap();
        for (k, ev) in sp.eigenvalues.iter().enumerate() {
            let k = (k + 1) as f64;
            assert!((ev - k * (k + n) / (n + 1.0)).abs() < 1e-3, "{m} λ_{k} = {ev}");
        }
        assert!(sp.eigenvalues[0] >= 1.0 - 1e-6);
    }
}

#[test]
fn positivity_violation_names_index() {
    let grid = ReducedGrid::new(Manifold::CP1, 256, 12.0).unwrap();
    let err = ReducedMetricState::from_potential_fn(grid, LogisticPolynomial::legendre(5.0, 2).closure()).unwrap_err();
    assert!(err.to_string().contains("grid index"), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The class is fixed, so volume and average scalar curvature do not depend on `φ`.
    #[test]
    fn volume_and_average_curvature_are_class_invariants(cp2 in any::<bool>(), coeffs in prop::collection::vec(-0.1..0.1f64, 1..5)) {
        let m = if cp2 { Manifold::CP2 } else { Manifold::CP1 };
        let grid = ReducedGrid::new(m, 512, 12.0).unwrap();
        let state = match ReducedMetricState::from_potential_fn(grid, LogisticPolynomial::new(coeffs).closure()) {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        let n = m.dim() as f64;
        prop_assert!((state.volume() - m.volume()).abs() < 1e-8);
        let r = state.curvature().scalar;
        prop_assert!((state.integrate(&r).unwrap() / state.volume() - n).abs() < 1e-6);
    }

    #[test]
    fn constant_shift_leaves_metric_unchanged(cp2 in any::<bool>(), c in -3.0..3.0f64) {
        let m = if cp2 { Manifold::CP2 } else { Manifold::CP1 };
        let s = tanh_state(m, 0.1);
        let t = s.shifted(c).unwrap();
        let (a, b) = (s.curvature().scalar, t.curvature().scalar);
        prop_assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));
    }
}
