//! Property suites behind `krflow verify`, with a mutation hook for falsifiability checks.

use krflow::algebra::{
    constant_curvature_model, expansion_product, expansion_sum, lagrange_value, poly_identity_lhs, real_curvature,
    sectional_from_bisectional, sigma_k, vandermonde_inverse, vandermonde_matrix, PointCurvatureTensor, RicciSpectrum,
};
use krflow::flow::{run_flow, CNormalization, FlowConfig, InitFamily, Monitors};
use krflow::functionals::{
    e_k, e_k_flow_derivative, f_energy, i_functional, j_energy, j_k_energy, j_k_path_oracle, k_energy, k_energy_derivative,
    FunctionalLedger,
};
use krflow::geometry::{
    laplacian_spectrum, pair_points, integrate_pairs, LogisticPolynomial, Manifold, ReducedGrid, ReducedMetricState,
};
use krflow::invariants::{decomposition_check, futaki, holomorphic_potential, im_k};
use krflow::{Error, Result, State};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

pub const SUITES: [&str; 5] = ["algebra", "geometry", "functionals", "invariants", "flow"];

/// Names accepted by the mutation hook; each perturbs one coefficient inside a check.
pub const MUTATIONS: [&str; 6] = ["sigma", "poly_identity", "vandermonde", "sectional", "jk", "futaki"];

/// A deliberately broken coefficient, used to confirm that the suites can fail.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Mutation(Option<String>);

impl Mutation {
    pub fn none() -> Self {
        Self(None)
    }

    pub fn named(name: &str) -> Result<Self> {
        if MUTATIONS.contains(&name) {
            Ok(Self(Some(name.to_string())))
        } else {
            Err(Error::config("mutate", format!("unknown mutation `{name}` (one of {})", MUTATIONS.join(", "))))
        }
    }

    /// `value·(1 + 10⁻³)` when the named coefficient is mutated, `value` otherwise.
    fn apply(&self, name: &str, value: f64) -> f64 {
        match &self.0 {
            Some(m) if m == name => value * (1.0 + 1e-3) + 1e-3,
            _ => value,
        }
    }
}

/// Outcome of one property.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed error (or the checked quantity).
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

impl PropertyResult {
    pub fn row(&self) -> String {
        format!(
            "{:<5} {:<12} {:<34} value {:>11.3e}  tol {:>9.1e}  {:>6.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.value,
            self.tolerance,
            self.seconds,
            self.detail
        )
    }
}

struct Recorder<'a> {
    suite: &'static str,
    out: &'a mut Vec<PropertyResult>,
}

impl Recorder<'_> {
    /// Runs `f`, which returns `(worst error, detail)`, and records `worst ≤ tol`.
    fn check(&mut self, name: &'static str, tol: f64, f: impl FnOnce() -> Result<(f64, String)>) {
        let start = Instant::now();
        let (value, detail, passed) = match f() {
            Ok((v, d)) => (v, d, v <= tol),
            Err(e) => (f64::NAN, format!("error: {e}"), false),
        };
        self.out.push(PropertyResult { suite: self.suite, name, passed, value, tolerance: tol, detail, seconds: start.elapsed().as_secs_f64() });
    }
}

/// Expands `all` and validates suite names.
pub fn select_suites(selector: &str) -> Result<Vec<&'static str>> {
    let mut out = Vec::new();
    for item in selector.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item == "all" {
            return Ok(SUITES.to_vec());
        }
        match SUITES.iter().find(|s| **s == item) {
            Some(s) => out.push(*s),
            None => return Err(Error::config("suite", format!("unknown suite `{item}` (one of all, {})", SUITES.join(", ")))),
        }
    }
    if out.is_empty() {
        return Err(Error::config("suite", "no suite selected"));
    }
    Ok(out)
}

/// Runs the selected suites with `trials` randomized cases per algebraic property.
pub fn run_suites(selector: &str, trials: usize, seed: u64, mutation: &Mutation) -> Result<Vec<PropertyResult>> {
    let mut out = Vec::new();
    for suite in select_suites(selector)? {
        let mut rec = Recorder { suite, out: &mut out };
        match suite {
            "algebra" => algebra_suite(&mut rec, trials, seed, mutation),
            "geometry" => geometry_suite(&mut rec),
            "functionals" => functionals_suite(&mut rec, seed, mutation),
            "invariants" => invariants_suite(&mut rec, seed, mutation),
            "flow" => flow_suite(&mut rec),
            _ => unreachable!(),
        }
    }
    Ok(out)
}

fn cplx(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex<f64>> {
    let v: Vec<Complex<f64>> = (0..n).map(|_| cplx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / norm).collect()
}

fn herm(a: &[Complex<f64>], b: &[Complex<f64>]) -> Complex<f64> {
    a.iter().zip(b).map(|(x, y)| *x * y.conj()).sum()
}

/// Random tensor with all Kähler symmetries and entries of size about one.
pub fn random_tensor(rng: &mut ChaCha8Rng, n: usize) -> PointCurvatureTensor<f64> {
    let raw: Vec<Complex<f64>> = (0..n.pow(4)).map(|_| cplx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    PointCurvatureTensor::from_fn(n, |i, j, k, l| raw[((i * n + j) * n + k) * n + l])
}

/// Random tensor whose bisectional curvature `R(u,ū,v,v̄)/(1 + |⟨u,v⟩|²)` lies in `[0, 1]`:
/// a constant-curvature part plus nonnegative rank-one terms, weights summing to at most one.
pub fn random_bounded_tensor(rng: &mut ChaCha8Rng, n: usize) -> PointCurvatureTensor<f64> {
    let m = rng.gen_range(1..=4);
    let mut w: Vec<f64> = (0..=m).map(|_| rng.gen_range(0.0..1.0)).collect();
    let total: f64 = w.iter().sum::<f64>() / rng.gen_range(0.5..1.0);
    w.iter_mut().for_each(|x| *x /= total);
    let terms: Vec<(f64, Vec<Complex<f64>>)> = w[1..].iter().map(|c| (*c, random_unit(rng, n))).collect();
    let rank_one = PointCurvatureTensor::from_rank_one_terms(n, &terms);
    let model = constant_curvature_model(n, 2.0 * w[0]);
    PointCurvatureTensor::from_fn(n, |i, j, k, l| rank_one.component(i, j, k, l) + model.component(i, j, k, l))
}

/// Random unit pair `(w₁, w₂)` whose complex lines are perpendicular or identical.
fn admissible_pair(rng: &mut ChaCha8Rng, n: usize, identical: bool) -> (Vec<Complex<f64>>, Vec<Complex<f64>>) {
    let w1 = random_unit(rng, n);
    if identical || n == 1 {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        return (w1.clone(), w1.iter().map(|c| *c * cplx(0.0, sign)).collect());
    }
    let v = random_unit(rng, n);
    let p = herm(&v, &w1);
    let w2: Vec<Complex<f64>> = v.iter().zip(&w1).map(|(a, b)| *a - *b * p).collect();
    let norm = herm(&w2, &w2).re.sqrt();
    (w1, w2.into_iter().map(|c| c / norm).collect())
}

fn algebra_suite(rec: &mut Recorder, trials: usize, seed: u64, mutation: &Mutation) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rec.check("sigma_examples", 0.0, || {
        let e = sigma_k(&RicciSpectrum(vec![1.0, 1.0]));
        let ab = sigma_k(&RicciSpectrum(vec![0.3, -1.7]));
        let want = [(e[1], 2.0), (e[2], 1.0), (ab[1], 0.3 - 1.7), (ab[2], 0.3 * -1.7), (e[0], 1.0)];
        let worst = want.iter().map(|(a, b)| (mutation.apply("sigma", *a) - b).abs()).fold(0.0, f64::max);
        Ok((worst, "σ(1,1) = (1,2,1), σ(a,b) = (1,a+b,ab)".into()))
    });
    rec.check("sigma_expansion", 1e-12, || {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let n = rng.gen_range(1..=6);
            let spec = RicciSpectrum((0..n).map(|_| rng.gen_range(-3.0..3.0)).collect());
            let mut sig = sigma_k(&spec);
            sig[n] = mutation.apply("sigma", sig[n]);
            for _ in 0..5 {
                let t: f64 = rng.gen_range(-2.0..2.0);
                let prod = expansion_product(&spec, t);
                let scale = spec.0.iter().fold(1.0, |a, r| a * (1.0 + (t * r).abs()));
                worst = worst.max((expansion_sum(&sig, t) - prod).abs() / scale);
            }
        }
        Ok((worst, format!("{trials} spectra × 5 t, relative to Π(1 + |t rᵢ|)")))
    });
    rec.check("poly_identity_examples", 0.0, || {
        let a: f64 = poly_identity_lhs(3.0, 3.0, 2) - 27.0;
        let b: f64 = poly_identity_lhs(2.0, 1.0, 2) - 12.0;
        Ok((a.abs().max(b.abs()), "(3,3,2) → 27, (2,1,2) → 12".into()))
    });
    rec.check("poly_identity", 1e-10, || {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let (x, y): (f64, f64) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let k = rng.gen_range(1..=10u32);
            let rhs = mutation.apply("poly_identity", (k + 1) as f64) * x.powi(k as i32);
            let scale = (k as f64 + 1.0).powi(2) * x.abs().max(y.abs()).max(1.0).powi(k as i32);
            worst = worst.max((poly_identity_lhs(x, y, k) - rhs).abs() / scale);
        }
        Ok((worst, format!("{trials} random (x, y, k ≤ 10), relative")))
    });
    rec.check("vandermonde_delta", 1e-10, || {
        let mut worst = 0.0f64;
        for n in 1..=6 {
            let mut inv = vandermonde_inverse::<f64>(n)?;
            inv.c[0][0] = mutation.apply("vandermonde", inv.c[0][0]);
            for i in 1..=n + 1 {
                for k in 1..=n + 1 {
                    let want = if i == k { 1.0 } else { 0.0 };
                    worst = worst.max((lagrange_value(&inv, i, k as f64) - want).abs());
                }
            }
        }
        Ok((worst, "f_i(k) = δ_ik, n ≤ 6".into()))
    });
    rec.check("vandermonde_identity", 1e-9, || {
        let mut worst = 0.0f64;
        for n in 1..=6 {
            let mut inv = vandermonde_inverse::<f64>(n)?;
            inv.c[0][0] = mutation.apply("vandermonde", inv.c[0][0]);
            let v = vandermonde_matrix::<f64>(n);
            for i in 0..=n {
                for k in 0..=n {
                    let p: f64 = (0..=n).map(|j| inv.c[i][j] * v[j][k]).sum();
                    worst = worst.max((p - if i == k { 1.0 } else { 0.0 }).abs());
                }
            }
        }
        Ok((worst, "c·V = I, n ≤ 6".into()))
    });
    rec.check("constant_curvature_planes", 1e-12, || {
        let m = constant_curvature_model(2, 2.0);
        let w1 = [cplx(1.0, 0.0), cplx(0.0, 0.0)];
        let perp = [cplx(0.0, 0.0), cplx(1.0, 0.0)];
        let same = [cplx(0.0, 1.0), cplx(0.0, 0.0)];
        let kp = mutation.apply("sectional", sectional_from_bisectional(&m, &w1, &perp)?);
        let ks = mutation.apply("sectional", sectional_from_bisectional(&m, &w1, &same)?);
        let proj = m.sub(&m.constant_curvature_projection()).max_abs();
        let worst = (kp - 0.5).abs().max((ks - 2.0).abs()).max(proj);
        Ok((worst, format!("K⊥ = {kp:.15}, K= = {ks:.15}")))
    });
    rec.check("sectional_vs_real_side", 1e-10, || {
        let mut worst = 0.0f64;
        for trial in 0..trials.min(100).max(1) {
            let n = 2 + trial % 2;
            let r = random_tensor(&mut rng, n);
            for identical in [false, true] {
                let (w1, w2) = admissible_pair(&mut rng, n, identical);
                let k = mutation.apply("sectional", sectional_from_bisectional(&r, &w1, &w2)?);
                worst = worst.max((k - real_curvature(&r, &w1, &w2, &w2, &w1)).abs());
            }
        }
        Ok((worst, "random tensors, both plane configurations".into()))
    });
    rec.check("polarization", 1e-10, || {
        let mut worst = 0.0f64;
        for trial in 0..trials {
            let n = 1 + trial % 3;
            let r = random_tensor(&mut rng, n);
            let (x, y) = admissible_pair(&mut rng, n, n == 1);
            let complex_side = mutation.apply("sectional", r.bisectional(&x, &y));
            let jy: Vec<Complex<f64>> = y.iter().map(|c| *c * cplx(0.0, 1.0)).collect();
            let real_side = if n == 1 {
                real_curvature(&r, &x, &y, &y, &x)
            } else {
                real_curvature(&r, &x, &y, &y, &x) + real_curvature(&r, &x, &jy, &jy, &x)
            };
            worst = worst.max((complex_side - real_side).abs());
        }
        Ok((worst, format!("{trials} random tensors, y ⊥ x, Jx (y = Jx when n = 1)")))
    });
    rec.check("bisectional_bound", 1e-12, || {
        let mut worst = f64::NEG_INFINITY;
        for trial in 0..trials {
            let n = 2 + trial % 2;
            let r = random_bounded_tensor(&mut rng, n);
            for identical in [false, true] {
                let (w1, w2) = admissible_pair(&mut rng, n, identical);
                worst = worst.max(mutation.apply("sectional", sectional_from_bisectional(&r, &w1, &w2)?) - 2.0);
            }
        }
        Ok((worst.max(0.0), format!("{trials} tensors with bisectional curvature in [0, 1]; largest K − 2 = {worst:.3e}")))
    });
}

/// Random analytic perturbation with positivity checked; retries with smaller amplitude.
pub fn random_state(manifold: Manifold, n_points: usize, rng: &mut ChaCha8Rng, amplitude: f64) -> Result<(State, LogisticPolynomial<f64>)> {
    let mut amp = amplitude;
    for _ in 0..20 {
        let coeffs: Vec<f64> = (0..5).map(|_| amp * rng.gen_range(-1.0..1.0)).collect();
        let p = LogisticPolynomial::new(coeffs);
        let grid = ReducedGrid::new(manifold, n_points, 12.0)?;
        match ReducedMetricState::from_potential_fn(grid, p.closure()) {
            Ok(s) => return Ok((s, p)),
            Err(Error::Positivity { .. }) => amp *= 0.7,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Numerical("could not draw a positive random state".into()))
}

fn geometry_suite(rec: &mut Recorder) {
    rec.check("volume_chern_number", 1e-8, || {
        let mut worst = 0.0f64;
        let mut detail = String::new();
        for m in [Manifold::CP1, Manifold::CP2] {
            let r = ReducedMetricState::<f64>::build_reference(m, 512, 12.0)?;
            worst = worst.max((r.volume() - m.volume()).abs());
            detail.push_str(&format!("{m}: V = {:.12} ", r.volume()));
        }
        let grid = ReducedGrid::new(Manifold::CP1, 512, 12.0)?;
        let tanh = ReducedMetricState::from_potential_fn(grid, |s: f64| {
            let t = s.tanh();
            (0.1 * t, 0.1 * (1.0 - t * t), -0.2 * t * (1.0 - t * t))
        })?;
        worst = worst.max((tanh.volume() - 2.0).abs());
        detail.push_str(&format!("CP1 + 0.1 tanh: V = {:.12}", tanh.volume()));
        Ok((worst, detail))
    });
    rec.check("reference_curvature", 1e-8, || {
        let mut worst = 0.0f64;
        for m in [Manifold::CP1, Manifold::CP2] {
            let r = ReducedMetricState::<f64>::build_reference(m, 512, 12.0)?;
            let c = r.curvature();
            let n = m.dim() as f64;
            worst = c.scalar.iter().fold(worst, |w, v| w.max((v - n).abs()));
            worst = c.r1.iter().chain(&c.r2).fold(worst, |w, v| w.max((v - 1.0).abs()));
            for i in 0..c.bisec_rt.len() {
                worst = worst.max((c.bisec_rr[i] - 2.0 * c.bisec_rt[i]).abs()).max((c.bisec_tt[i] - 2.0 * c.bisec_rt[i]).abs());
            }
            let (lo, hi) = c.bisec_rr.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
            worst = worst.max(hi - lo);
        }
        Ok((worst, "rᵢ ≡ 1, R ≡ n, A = 2B = C".into()))
    });
    rec.check("h_potential", 1e-6, || {
        let r = ReducedMetricState::<f64>::build_reference(Manifold::CP2, 512, 12.0)?;
        let h_ref = r.h_potential().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (s, _) = random_state(Manifold::CP2, 1024, &mut rng, 0.1)?;
        let h = s.h_potential();
        let e: Vec<f64> = h.iter().map(|v| v.exp() - 1.0).collect();
        let norm = s.integrate(&e)?.abs();
        let res = s.h_equation_residual();
        let worst = (h_ref / 1e-10).max(norm / 1e-8).max(res / 1e-6) * 1e-6;
        Ok((worst, format!("reference |h| {h_ref:.1e}, ∫(e^h − 1) {norm:.1e}, ∂∂̄ residual {res:.1e}")))
    });
    rec.check("average_scalar_curvature", 1e-6, || {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut worst = 0.0f64;
        for m in [Manifold::CP1, Manifold::CP2] {
            for _ in 0..3 {
                let (s, _) = random_state(m, 512, &mut rng, 0.15)?;
                let r = s.curvature().scalar;
                worst = worst.max((s.integrate(&r)? / s.volume() - m.dim() as f64).abs());
            }
        }
        Ok((worst, "(1/V)∫R = n on random states".into()))
    });
    rec.check("spectrum_reference", 1e-3, || {
        let r = ReducedMetricState::<f64>::build_reference(Manifold::CP1, 1024, 12.0)?;
        let sp = laplacian_spectrum(&r, 3)?;
        let ev = &sp.eigenvalues;
        let worst = [1.0, 3.0, 6.0].iter().zip(ev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let floor = (1.0 - 1e-6 - ev[0]).max(0.0);
        Ok((worst.max(floor * 1e3), format!("eigenvalues {:.9} {:.9} {:.9}", ev[0], ev[1], ev[2])))
    });
}

fn functionals_suite(rec: &mut Recorder, seed: u64, mutation: &Mutation) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf00d);
    let mut states = Vec::new();
    for m in [Manifold::CP1, Manifold::CP2] {
        let reference = ReducedMetricState::<f64>::build_reference(m, 512, 12.0).expect("valid reference");
        let randoms: Vec<(State, LogisticPolynomial<f64>)> = (0..4).filter_map(|_| random_state(m, 512, &mut rng, 0.12).ok()).collect();
        states.push((m, reference, randoms));
    }
    rec.check("vanish_at_zero", 1e-10, || {
        let mut worst = 0.0f64;
        for (_, r, _) in &states {
            let l = FunctionalLedger::compute(r, r)?;
            let all = [l.j, l.f, l.nu, l.i, l.i_minus_j].into_iter().chain(l.j_k.clone()).chain(l.e0_k.clone()).chain(l.e_k.clone());
            worst = all.fold(worst, |w, v| w.max(v.abs()));
        }
        Ok((worst, "all ledger entries at φ = 0".into()))
    });
    rec.check("jk_closed_vs_path", 1e-6, || {
        let mut worst = 0.0f64;
        for (m, r, randoms) in &states {
            for (s, _) in randoms.iter().take(2) {
                for k in 0..m.dim() {
                    let closed = mutation.apply("jk", j_k_energy(r, s, k)?);
                    worst = worst.max((closed - j_k_path_oracle(r, s, k, 64)?).abs());
                }
            }
        }
        Ok((worst, "64 Richardson-refined path steps".into()))
    });
    rec.check("jn1_equals_j", 1e-10, || {
        let mut worst = 0.0f64;
        for (m, r, randoms) in &states {
            for (s, _) in randoms {
                worst = worst.max((mutation.apply("jk", j_k_energy(r, s, m.dim() - 1)?) - j_energy(r, s)?).abs());
            }
        }
        Ok((worst, "J_{n−1} = J".into()))
    });
    rec.check("cocycle", 1e-7, || {
        let mut worst = 0.0f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0c0);
        for m in [Manifold::CP1, Manifold::CP2] {
            let r = ReducedMetricState::<f64>::build_reference(m, 512, 12.0)?;
            for _ in 0..20 {
                let (a, _) = random_state(m, 512, &mut rng, 0.12)?;
                let (b, _) = random_state(m, 512, &mut rng, 0.12)?;
                for k in 0..=m.dim() {
                    worst = worst.max((e_k(&r, &a, k)? + e_k(&a, &b, k)? - e_k(&r, &b, k)?).abs());
                }
                worst = worst.max((f_energy(&r, &a)? + f_energy(&a, &b)? - f_energy(&r, &b)?).abs());
            }
        }
        Ok((worst, "E_k and F on 20 random pairs per manifold".into()))
    });
    rec.check("i_minus_j_sandwich", 1e-10, || {
        let mut worst = 0.0f64;
        for (m, r, randoms) in &states {
            let np1 = (m.dim() + 1) as f64;
            for (s, _) in randoms {
                let (i, imj) = i_functional(r, s)?;
                let j = j_energy(r, s)?;
                worst = worst.max(imj - i).max(i - np1 * imj).max(-i).max(-j);
            }
        }
        Ok((worst.max(0.0), "J ≥ 0, I ≥ 0, I − J ≤ I ≤ (n+1)(I − J)".into()))
    });
    rec.check("constant_shift", 1e-10, || {
        let mut worst = 0.0f64;
        for (_, r, randoms) in &states {
            let (s, _) = &randoms[0];
            let t = s.shifted(0.37)?;
            worst = worst.max((f_energy(r, s)? - f_energy(r, &t)?).abs()).max((j_energy(r, s)? - j_energy(r, &t)?).abs());
        }
        Ok((worst, "F, J invariant under φ → φ + c".into()))
    });
    rec.check("k_energy_rate", 1e-4, || {
        let mut worst = 0.0f64;
        let delta = 1e-3;
        for (_, r, randoms) in &states {
            let (_, p) = &randoms[1];
            let grid = r.grid.clone();
            let at = |t: f64| ReducedMetricState::from_potential_fn(grid.clone(), p.scaled(t).closure());
            for t in [0.4, 0.8] {
                let fd = (k_energy(r, &at(t + delta)?)? - k_energy(r, &at(t - delta)?)?) / (2.0 * delta);
                let formula = k_energy_derivative(&at(t)?, p);
                worst = worst.max(((fd - formula) / formula).abs());
            }
        }
        Ok((worst, "dν/dt along tφ vs −(1/V)∫φ̇(R − r)ω_φⁿ, relative".into()))
    });
    rec.check("e_k_rate", 1e-4, || {
        let mut worst = 0.0f64;
        let delta = 1e-3;
        for (m, r, randoms) in &states {
            let (_, p) = &randoms[2];
            let grid = r.grid.clone();
            let at = |t: f64| ReducedMetricState::from_potential_fn(grid.clone(), p.scaled(t).closure());
            let t = 0.7;
            let (plus, minus, mid) = (at(t + delta)?, at(t - delta)?, at(t)?);
            for k in 0..=m.dim() {
                let fd = (e_k(r, &plus, k)? - e_k(r, &minus, k)?) / (2.0 * delta);
                let formula = e_k_flow_derivative(&mid, p, k);
                worst = worst.max(((fd - formula) / formula).abs());
            }
        }
        Ok((worst, "velocity formula vs centered difference along tφ, relative".into()))
    });
    rec.check("k_energy_lower_bound", 1e-10, || {
        let mut worst = f64::NEG_INFINITY;
        for (_, _, randoms) in &states {
            let base = &randoms[0].0;
            let v = base.nominal_volume();
            let h_mean = base.integrate_fn(|p| base.h_at(p)) / v;
            for (s, _) in &randoms[1..] {
                worst = worst.max(f_energy(base, s)? + h_mean - k_energy(base, s)?);
            }
        }
        Ok((worst.max(0.0), format!("ν ≥ F + (1/V)∫h_ω ωⁿ on a non-Einstein base; largest F + ⟨h⟩ − ν = {worst:.3e}")))
    });
    rec.check("e0_proportional_to_nu", 1e-6, || {
        let mut worst = 0.0f64;
        let mut detail = String::new();
        for (m, r, randoms) in &states {
            let pts: Vec<(f64, f64)> = randoms.iter().map(|(s, _)| Ok((k_energy(r, s)?, e_k(r, s, 0)?))).collect::<Result<_>>()?;
            let ratio = pts.iter().map(|(a, b)| a * b).sum::<f64>() / pts.iter().map(|(a, _)| a * a).sum::<f64>();
            worst = pts.iter().fold(worst, |w, (a, b)| w.max((b - ratio * a).abs()));
            detail.push_str(&format!("{m}: E_0 = {ratio:.9}·ν  "));
        }
        Ok((worst, detail))
    });
    rec.check("dirichlet_energy_cp1", 1e-8, || {
        let (_, r, randoms) = &states[0];
        let mut worst = 0.0f64;
        let mut smallest = f64::INFINITY;
        for (s, _) in randoms {
            let pairs = pair_points(r, s)?;
            let dirichlet = integrate_pairs(&pairs, |pp| pp.potential().grad_norm2(&pp.base) * pp.base.volume_density()) / (2.0 * r.nominal_volume());
            worst = worst.max((j_energy(r, s)? - dirichlet).abs());
            smallest = smallest.min(dirichlet);
        }
        Ok((worst, format!("J = (1/2V)∫|∂φ|²ω on CP1, smallest J = {smallest:.3e}")))
    });
}

fn invariants_suite(rec: &mut Recorder, seed: u64, mutation: &Mutation) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1a7);
    let mut states = Vec::new();
    for m in [Manifold::CP1, Manifold::CP2] {
        let reference = ReducedMetricState::<f64>::build_reference(m, 1024, 12.0).expect("valid reference");
        let randoms: Vec<State> = (0..5).filter_map(|_| random_state(m, 1024, &mut rng, 0.12).ok().map(|s| s.0)).collect();
        states.push((m, reference, randoms));
    }
    rec.check("vanish_on_einstein", 1e-8, || {
        let mut worst = 0.0f64;
        for (m, r, _) in &states {
            worst = worst.max(mutation.apply("futaki", futaki(r)).abs());
            for k in 0..=m.dim() {
                worst = worst.max(im_k(r, k, 0.0).abs());
            }
        }
        Ok((worst, "|Futaki|, |ℑ_k| on the reference".into()))
    });
    rec.check("metric_independence", 1e-5, || {
        let mut worst = 0.0f64;
        for (m, _, randoms) in &states {
            let mut series: Vec<Vec<f64>> = vec![randoms.iter().map(|s| mutation.apply("futaki", futaki(s))).collect()];
            for k in 0..=m.dim() {
                series.push(randoms.iter().map(|s| im_k(s, k, 0.0)).collect());
            }
            for v in series {
                let mean = v.iter().sum::<f64>() / v.len() as f64;
                let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
                worst = worst.max(sd / (1.0 + mean.abs()));
            }
        }
        Ok((worst, "standard deviation over 5 random states".into()))
    });
    rec.check("i0_is_n_futaki", 1e-8, || {
        let mut worst = 0.0f64;
        for (m, r, randoms) in &states {
            for s in std::iter::once(r).chain(randoms) {
                worst = worst.max((im_k(s, 0, 0.0) - m.dim() as f64 * mutation.apply("futaki", futaki(s))).abs());
            }
        }
        Ok((worst, "ℑ_0 = n·Futaki".into()))
    });
    rec.check("theta_shift_invariance", 1e-10, || {
        let mut worst = 0.0f64;
        for (m, _, randoms) in &states {
            for k in 0..=m.dim() {
                worst = worst.max((im_k(&randoms[0], k, 0.0) - im_k(&randoms[0], k, 0.73)).abs());
            }
        }
        Ok((worst, "ℑ_k under θ → θ + c".into()))
    });
    rec.check("vandermonde_reconstruction", 1e-6, || {
        let mut worst = 0.0f64;
        for (_, r, randoms) in &states {
            for s in std::iter::once(r).chain(randoms.iter().take(2)) {
                worst = worst.max(decomposition_check(s, 0.0)?).max(decomposition_check(s, 0.4)?);
            }
        }
        Ok((worst, "ℑ_{k−1} from I_{1,i} and υ_k".into()))
    });
    rec.check("holomorphic_potential", 1e-6, || {
        let mut worst = 0.0f64;
        for (_, r, randoms) in &states {
            for s in std::iter::once(r).chain(randoms.iter().take(2)) {
                let d = holomorphic_potential(s);
                worst = worst.max(d.potential_residual(s)).max(d.ricci_residual(s));
            }
        }
        Ok((worst, "∂̄θ and ∂̄Δθ residuals".into()))
    });
}

fn flow_suite(rec: &mut Recorder) {
    rec.check("fixed_point", 1e-8, || {
        let mut worst = 0.0f64;
        for m in [Manifold::CP1, Manifold::CP2] {
            let cfg = FlowConfig {
                manifold: m,
                init_family: InitFamily::Zero,
                t_end: 10.0,
                record_dt: 0.5,
                monitors: Monitors::parse("none")?,
                normalize_c: CNormalization::Raw,
                ..FlowConfig::default()
            };
            let tr = run_flow::<f64>(&cfg)?;
            worst = tr.records.iter().fold(worst, |w, r| w.max(r.phi_sup));
        }
        Ok((worst, "sup|φ| from φ = 0 up to t = 10".into()))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_selection() {
        assert_eq!(select_suites("all").unwrap().len(), SUITES.len());
        assert_eq!(select_suites("algebra, flow").unwrap(), vec!["algebra", "flow"]);
        assert!(select_suites("bogus").is_err());
        assert!(Mutation::named("bogus").is_err());
    }

    #[test]
    fn bounded_tensors_have_bounded_bisectional_curvature() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let r = random_bounded_tensor(&mut rng, 3);
            for _ in 0..20 {
                let u = random_unit(&mut rng, 3);
                let v = random_unit(&mut rng, 3);
                let b = r.bisectional(&u, &v) / (1.0 + herm(&u, &v).norm_sqr());
                assert!((-1e-14..=1.0 + 1e-14).contains(&b));
            }
        }
    }
}
