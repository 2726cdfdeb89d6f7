use krflow::functionals::{
    e_k, euler_lagrange_residual, f_energy, i_functional, j_energy, j_k_energy, j_k_path_oracle, k_energy, FunctionalLedger,
};
use krflow::geometry::{LogisticPolynomial, Manifold, ReducedGrid, ReducedMetricState};
use krflow::State;
use proptest::prelude::*;

fn reference(m: Manifold) -> State {
    ReducedMetricState::build_reference(m, 512, 12.0).unwrap()
}

fn state(m: Manifold, coeffs: &[f64]) -> Option<State> {
    let grid = ReducedGrid::new(m, 512, 12.0).unwrap();
    ReducedMetricState::from_potential_fn(grid, LogisticPolynomial::new(coeffs.to_vec()).closure()).ok()
}

/// Whole-line quadrature in `s`, where `∫f ωⁿ = ∫f(s)·n u′ⁿ⁻¹u″ ds` and `V = (n+1)ⁿ`.
struct LineOracle {
    n: usize,
    s: Vec<f64>,
    h: f64,
    /// Reference `(u′, u″)`.
    u0: Vec<(f64, f64)>,
    /// `(φ, φ′, φ″)`.
    phi: Vec<(f64, f64, f64)>,
}

impl LineOracle {
    fn new(n: usize, p: &LogisticPolynomial<f64>) -> Self {
        let h = 2e-3;
        let s: Vec<f64> = (0..=40_000).map(|i| -40.0 + h * i as f64).collect();
        let m = (n + 1) as f64;
        let u0 = s
            .iter()
            .map(|&x| {
                let sig = 1.0 / (1.0 + (-x).exp());
                (m * sig, m * sig * (1.0 - sig))
            })
            .collect();
        let phi = s.iter().map(|&x| p.eval(x)).collect();
        Self { n, s, h, u0, phi }
    }

    fn volume(&self) -> f64 {
        ((self.n + 1) as f64).powi(self.n as i32)
    }

    /// `ωⁿ` density of `u₀ + tφ`.
    fn density(&self, i: usize, t: f64) -> f64 {
        let (a, b) = self.u0[i];
        let (_, p1, p2) = self.phi[i];
        let n = self.n as i32;
        n as f64 * (a + t * p1).powi(n - 1) * (b + t * p2)
    }

    fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        (0..self.s.len()).map(|i| f(i) * if i == 0 || i == self.s.len() - 1 { 0.5 } else { 1.0 }).sum::<f64>() * self.h
    }

    fn i(&self) -> f64 {
        self.integrate(|i| self.phi[i].0 * (self.density(i, 0.0) - self.density(i, 1.0))) / self.volume()
    }

    /// `J = (1/V)∫₀¹∫φ(ωⁿ − ω_{tφ}ⁿ)dt`; the inner integral is a degree-n polynomial in `t`.
    fn j(&self) -> f64 {
        let nodes = [(0.5 - 0.5 / 3f64.sqrt(), 0.5), (0.5 + 0.5 / 3f64.sqrt(), 0.5)];
        nodes.iter().map(|(t, w)| w * self.integrate(|i| self.phi[i].0 * (self.density(i, 0.0) - self.density(i, *t)))).sum::<f64>()
            / self.volume()
    }

    /// `F` relative to the Kähler–Einstein reference, where `h_ω = 0`.
    fn f(&self) -> f64 {
        let v = self.volume();
        let mean = self.integrate(|i| self.phi[i].0 * self.density(i, 0.0)) / v;
        let z = self.integrate(|i| (-self.phi[i].0).exp() * self.density(i, 0.0)) / v;
        self.j() - mean - z.ln()
    }

    /// K-energy relative to the Kähler–Einstein reference.
    fn nu(&self) -> f64 {
        let ent = self.integrate(|i| {
            let d1 = self.density(i, 1.0);
            let d0 = self.density(i, 0.0);
            if d1 > 0.0 && d0 > 0.0 {
                (d1 / d0).ln() * d1
            } else {
                0.0
            }
        });
        ent / self.volume() - (self.i() - self.j())
    }
}

#[test]
fn ledger_matches_line_quadrature() {
    let cases: [&[f64]; 3] = [&[0.0, 0.1], &[0.05, -0.08, 0.06], &[0.0, 0.0, 0.1, -0.05]];
    for m in [Manifold::CP1, Manifold::CP2] {
        let r = reference(m);
        for c in cases {
            let s = state(m, c).unwrap();
            let oracle = LineOracle::new(m.dim(), &LogisticPolynomial::new(c.to_vec()));
            let l = FunctionalLedger::compute(&r, &s).unwrap();
            for (name, ours, want) in [("J", l.j, oracle.j()), ("I", l.i, oracle.i()), ("F", l.f, oracle.f()), ("ν", l.nu, oracle.nu())] {
                assert!((ours - want).abs() < 1e-8, "{m} {c:?} {name}: {ours} vs {want}");
            }
        }
    }
}

#[test]
fn j_is_half_dirichlet_energy_on_cp1() {
    let p = LogisticPolynomial::new(vec![0.02, 0.1, -0.07]);
    let r = reference(Manifold::CP1);
    let s = state(Manifold::CP1, &p.coeffs).unwrap();
    let oracle = LineOracle::new(1, &p);
    let dirichlet = oracle.integrate(|i| oracle.phi[i].1.powi(2)) / (2.0 * oracle.volume());
    assert!((j_energy(&r, &s).unwrap() - dirichlet).abs() < 1e-9);
    let (i, imj) = i_functional(&r, &s).unwrap();
    assert!((i - 2.0 * dirichlet).abs() < 1e-9 && (imj - dirichlet).abs() < 1e-9);
}

#[test]
fn j_k_closed_form_matches_path() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let r = reference(m);
        for c in [&[0.0, 0.1][..], &[0.03, -0.1, 0.05]] {
            let s = state(m, c).unwrap();
            for k in 0..m.dim() {
                let closed = j_k_energy(&r, &s, k).unwrap();
                let path = j_k_path_oracle(&r, &s, k, 64).unwrap();
                assert!((closed - path).abs() < 1e-6, "{m} k={k}: {closed} vs {path}");
            }
            assert!((j_k_energy(&r, &s, m.dim() - 1).unwrap() - j_energy(&r, &s).unwrap()).abs() < 1e-10);
        }
    }
}

#[test]
fn everything_vanishes_at_the_base() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let r = reference(m);
        let l = FunctionalLedger::compute(&r, &r).unwrap();
        let all: Vec<f64> = [l.j, l.f, l.nu, l.i, l.i_minus_j].into_iter().chain(l.j_k).chain(l.e0_k).chain(l.e_k).collect();
        assert!(all.iter().all(|v| v.abs() < 1e-10), "{m}: {all:?}");
    }
}

/// On a Kähler–Einstein metric `σ_k` is constant, so the Euler–Lagrange residual is zero.
#[test]
fn euler_lagrange_vanishes_on_reference() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let r = reference(m);
        for k in 0..m.dim() {
            let el = euler_lagrange_residual(&r, k).unwrap();
            let worst = el.residual.iter().fold(0.0f64, |w, v| w.max(v.abs()));
            assert!(worst < 1e-8, "{m} k={k}: {worst:e}");
        }
    }
}

#[test]
fn e0_equals_k_energy() {
    for m in [Manifold::CP1, Manifold::CP2] {
        let r = reference(m);
        for c in [&[0.0, 0.1][..], &[0.03, -0.1, 0.05], &[0.0, 0.0, 0.12]] {
            let s = state(m, c).unwrap();
            let (nu, e0) = (k_energy(&r, &s).unwrap(), e_k(&r, &s, 0).unwrap());
            assert!((nu - e0).abs() < 1e-8 * (1.0 + nu.abs()), "{m}: ν = {nu}, E_0 = {e0}");
        }
    }
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.1..0.1f64, 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn cocycle(cp2 in any::<bool>(), a in coeffs(), b in coeffs()) {
        let m = if cp2 { Manifold::CP2 } else { Manifold::CP1 };
        let r = reference(m);
        let (Some(x), Some(y)) = (state(m, &a), state(m, &b)) else { return Ok(()) };
        for k in 0..=m.dim() {
            let res = e_k(&r, &x, k).unwrap() + e_k(&x, &y, k).unwrap() - e_k(&r, &y, k).unwrap();
            prop_assert!(res.abs() < 1e-7, "k = {}: {}", k, res);
        }
        let res = f_energy(&r, &x).unwrap() + f_energy(&x, &y).unwrap() - f_energy(&r, &y).unwrap();
        prop_assert!(res.abs() < 1e-7);
    }

    #[test]
    fn i_minus_j_sandwich(cp2 in any::<bool>(), a in coeffs()) {
        let m = if cp2 { Manifold::CP2 } else { Manifold::CP1 };
        let Some(s) = state(m, &a) else { return Ok(()) };
        let l = FunctionalLedger::compute(&reference(m), &s).unwrap();
        prop_assert!(l.j >= -1e-12 && l.i >= -1e-12);
        prop_assert!(l.sandwich_holds(m.dim(), 1e-10));
    }

    #[test]
    fn invariant_under_constant_shift(cp2 in any::<bool>(), a in coeffs(), c in -2.0..2.0f64) {
        let m = if cp2 { Manifold::CP2 } else { Manifold::CP1 };
        let r = reference(m);
        let Some(s) = state(m, &a) else { return Ok(()) };
        let t = s.shifted(c).unwrap();
        prop_assert!((f_energy(&r, &s).unwrap() - f_energy(&r, &t).unwrap()).abs() < 1e-10);
        prop_assert!((j_energy(&r, &s).unwrap() - j_energy(&r, &t).unwrap()).abs() < 1e-10);
        prop_assert!((k_energy(&r, &s).unwrap() - k_energy(&r, &t).unwrap()).abs() < 1e-10);
    }
}
