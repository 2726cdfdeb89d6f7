use krflow::geometry::{LogisticPolynomial, Manifold, ReducedGrid, ReducedMetricState};
use krflow::invariants::{decomposition_check, futaki, holomorphic_potential, i_pq, im_k};
use krflow::State;
use proptest::prelude::*;

fn reference(m: Manifold) -> State {
    ReducedMetricState::build_reference(m, 1024, 12.0).unwrap()
}

fn state(m: Manifold, coeffs: &[f64]) -> Option<State> {
    let grid = ReducedGrid::new(m, 1024, 12.0).unwrap();
    ReducedMetricState::from_potential_fn(grid, LogisticPolynomial::new(coeffs.to_vec()).closure()).ok()
}

#[test]
fn vanish_on_reference() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let r = reference(m);
        assert!(futaki(&r).abs() < 1e-8);
        for k in 0..=m.dim() {
            for shift in [0.0, 0.5] {
                assert!(im_k(&r, k, shift).abs() < 1e-8, "{m} k={k}");
            }
        }
    }
}

/// On the reference `Ric = ω` and `Δθ = −θ + c` for `θ = u′ − n + c`, so `I_pq = −p(p+q)ⁿ c V`.
#[test]
fn i_pq_closed_form_on_reference() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let r = reference(m);
        let n = m.dim() as i32;
        for (p, q, c) in [(1.0f64, 1.0f64, 0.3f64), (1.0, 3.0, -0.7), (2.0, 0.5, 1.1)] {
            let want = -p * (p + q).powi(n) * c * m.volume();
            let got = i_pq(&r, p, q, c);
            assert!((got - want).abs() < 1e-8 * (1.0 + want.abs()), "{m} ({p},{q},{c}): {got} vs {want}");
        }
    }
}

#[test]
fn values_do_not_depend_on_the_metric() {
    let draws: [&[f64]; 5] = [&[0.0, 0.1], &[0.05, -0.1, 0.04], &[0.0, 0.0, 0.12], &[-0.1, 0.03, 0.0, 0.08], &[0.02, 0.02, -0.09]];
    for m in [Manifold::CP1, Manifold::CP2] {
        let states: Vec<State> = draws.iter().map(|c| state(m, c).unwrap()).collect();
        let mut series = vec![states.iter().map(futaki).collect::<Vec<_>>()];
        for k in 0..=m.dim() {
            series.push(states.iter().map(|s| im_k(s, k, 0.0)).collect());
        }
        for v in series {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
            assert!(sd < 1e-5, "{m}: {v:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn structure_on_random_states(cp2 in any::<bool>(), coeffs in prop::collection::vec(-0.12..0.12f64, 1..5), shift in -1.0..1.0f64) {
        let m = if cp2 { Manifold::CP2 } else { Manifold::CP1 };
        let Some(s) = state(m, &coeffs) else { return Ok(()) };
        let n = m.dim() as f64;
        prop_assert!((im_k(&s, 0, 0.0) - n * futaki(&s)).abs() < 1e-8);
        for k in 0..=m.dim() {
            prop_assert!((im_k(&s, k, 0.0) - im_k(&s, k, shift)).abs() < 1e-10);
        }
        prop_assert!(decomposition_check(&s, shift).unwrap() < 1e-6);
        let d = holomorphic_potential(&s);
        prop_assert!(d.potential_residual(&s) < 1e-6 && d.ricci_residual(&s) < 1e-6);
    }
}
