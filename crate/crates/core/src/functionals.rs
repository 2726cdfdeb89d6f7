//! Energy functionals on the space of Kähler potentials.
//!
//! Every functional compares a target metric `ω_φ` with a base metric `ω` of
//! the same class; `φ = u_tgt − u_base` at equal radial coordinate. Integrals
//! are evaluated at the Gauss nodes of the target's moment coordinate, where
//! all integrands are smooth.

use crate::error::Result;
use crate::geometry::forms::{wedge_powers, Form};
use crate::geometry::{integrate_pairs, pair_points, MomentSeriesField, PairPoint, PointData, ReducedMetricState, ScalarField};
use crate::algebra::{sigma_k, RicciSpectrum};
use crate::chebyshev::{self, ChebSeries};
use crate::scalar::{binomial, Real};
use serde::Serialize;

type State<T> = ReducedMetricState<T>;

struct Pair<T> {
    n: usize,
    v: T,
    pts: Vec<PairPoint<T>>,
}

impl<T: Real> Pair<T> {
    fn new(base: &State<T>, tgt: &State<T>) -> Result<Self> {
        Ok(Self { n: tgt.dim(), v: base.nominal_volume(), pts: pair_points(base, tgt)? })
    }

    fn integrate(&self, f: impl Fn(&PairPoint<T>) -> T) -> T {
        integrate_pairs(&self.pts, f)
    }

    /// `G_s = ∫ √−1∂φ∧∂̄φ ∧ ω_φ^s ∧ ω^{n−1−s}` for `s = 0, …, n−1`.
    fn gradient_moments(&self) -> Vec<T> {
        let n = self.n;
        (0..n)
            .map(|s| {
                self.integrate(|pp| {
                    let grad = Form::gradient(&pp.potential());
                    wedge_powers(&[(grad, 1), (Form::metric(&pp.tgt), s), (Form::metric(&pp.base), n - 1 - s)])
                })
            })
            .collect()
    }
}

/// `J = (1/V) Σ_i (i+1)/(n+1) ∫ √−1∂φ∧∂̄φ ∧ ωⁱ ∧ ω_φ^{n−1−i}`.
pub fn j_energy<T: Real>(base: &State<T>, tgt: &State<T>) -> Result<T> {
    let pair = Pair::new(base, tgt)?;
    Ok(j_from_moments(&pair.gradient_moments(), pair.n, pair.v))
}

fn j_from_moments<T: Real>(g: &[T], n: usize, v: T) -> T {
    let np1 = T::from_usize_lossy(n + 1);
    (0..n).map(|i| T::from_usize_lossy(i + 1) / np1 * g[n - 1 - i]).sum::<T>() / v
}

fn i_minus_j_from_moments<T: Real>(g: &[T], n: usize, v: T) -> T {
    let np1 = T::from_usize_lossy(n + 1);
    (0..n).map(|i| T::from_usize_lossy(n - i) / np1 * g[n - 1 - i]).sum::<T>() / v
}

fn coefficient<T: Real>(n: usize, k: usize, s: usize, i: usize, j: usize) -> T {
    let e = n - i - j - s - 1;
    let sign = if e % 2 == 0 { T::one() } else { -T::one() };
    sign / T::from_usize_lossy(n - i - j + 1)
        * binomial::<T>(k as i64 + 1, i as i64)
        * binomial::<T>((n - k - 1) as i64, j as i64)
        * binomial::<T>((n - i - j - 1) as i64, s as i64)
}

/// Closed-form `J_k` as a combination of the gradient moments, `0 ≤ k ≤ n−1`.
pub fn j_k_energy<T: Real>(base: &State<T>, tgt: &State<T>, k: usize) -> Result<T> {
    let pair = Pair::new(base, tgt)?;
    Ok(j_k_from_moments(&pair.gradient_moments(), pair.n, k, pair.v))
}

fn j_k_from_moments<T: Real>(g: &[T], n: usize, k: usize, v: T) -> T {
    if k >= n {
        return T::zero();
    }
    let mut acc = T::zero();
    for j in 0..n - k {
        for i in 0..=k {
            for s in 0..n - i - j {
                acc += coefficient::<T>(n, k, s, i, j) * g[s];
            }
        }
    }
    T::from_usize_lossy(n - k) * acc / v
}

/// `J_k` from its path definition along `tφ`, by composite trapezoid rules
/// with `n_steps` and `n_steps/2` panels combined by Richardson extrapolation.
pub fn j_k_path_oracle<T: Real>(base: &State<T>, tgt: &State<T>, k: usize, n_steps: usize) -> Result<T> {
    let pair = Pair::new(base, tgt)?;
    let n = pair.n;
    if k >= n {
        return Ok(T::zero());
    }
    let integrand = |t: T| {
        pair.integrate(|pp| {
            let w = Form::metric(&pp.base);
            let wt = w + (Form::metric(&pp.tgt) - w) * t;
            let phi = pp.potential().v;
            let top = wedge_powers(&[(wt, k + 1), (wt, n - k - 1)]) - wedge_powers(&[(w, k + 1), (wt, n - k - 1)]);
            phi * top
        })
    };
    let trap = |m: usize| {
        let h = T::one() / T::from_usize_lossy(m);
        let mut acc = (integrand(T::zero()) + integrand(T::one())) * T::lit(0.5);
        for i in 1..m {
            acc += integrand(h * T::from_usize_lossy(i));
        }
        acc * h
    };
    let fine = trap(n_steps.max(2));
    let coarse = trap((n_steps / 2).max(1));
    let rich = (T::lit(4.0) * fine - coarse) / T::lit(3.0);
    Ok(-T::from_usize_lossy(n - k) / pair.v * rich)
}

/// `(I, I − J)` with `I = (1/V)∫φ(ωⁿ − ω_φⁿ)`.
pub fn i_functional<T: Real>(base: &State<T>, tgt: &State<T>) -> Result<(T, T)> {
    let pair = Pair::new(base, tgt)?;
    let n = pair.n;
    // Centering φ leaves I unchanged and avoids cancellation.
    let vol_t = pair.integrate(|pp| wedge_powers(&[(Form::metric(&pp.tgt), n)]));
    let mean = pair.integrate(|pp| pp.potential().v * wedge_powers(&[(Form::metric(&pp.tgt), n)])) / vol_t;
    let i = pair.integrate(|pp| {
        (pp.potential().v - mean) * (wedge_powers(&[(Form::metric(&pp.base), n)]) - wedge_powers(&[(Form::metric(&pp.tgt), n)]))
    }) / pair.v;
    Ok((i, i_minus_j_from_moments(&pair.gradient_moments(), n, pair.v)))
}

fn log_mean_exp<T: Real>(pair: &Pair<T>, f: impl Fn(&PairPoint<T>) -> T, vol: impl Fn(&PairPoint<T>) -> T) -> T {
    let shift = pair.pts.iter().fold(T::neg_infinity(), |m, pp| m.max(f(pp)));
    let s = pair.integrate(|pp| (f(pp) - shift).exp() * vol(pp));
    (s / pair.v).ln() + shift
}

/// `F = J − (1/V)∫φωⁿ − log((1/V)∫e^{h_ω − φ}ωⁿ)`.
pub fn f_energy<T: Real>(base: &State<T>, tgt: &State<T>) -> Result<T> {
    let pair = Pair::new(base, tgt)?;
    let n = pair.n;
    let j = j_from_moments(&pair.gradient_moments(), n, pair.v);
    let vol = |pp: &PairPoint<T>| wedge_powers(&[(Form::metric(&pp.base), n)]);
    let mean = pair.integrate(|pp| pp.potential().v * vol(pp)) / pair.v;
    let lme = log_mean_exp(&pair, |pp| base.h_at(&pp.base) - pp.potential().v, vol);
    Ok(j - mean - lme)
}

/// K-energy `ν = (1/V)∫log(ω_φⁿ/ωⁿ)ω_φⁿ + (1/V)∫h_ω(ωⁿ − ω_φⁿ) − (I − J)`.
pub fn k_energy<T: Real>(base: &State<T>, tgt: &State<T>) -> Result<T> {
    let pair = Pair::new(base, tgt)?;
    let n = pair.n;
    let entropy = pair.integrate(|pp| pp.log_volume_ratio() * wedge_powers(&[(Form::metric(&pp.tgt), n)]));
    let hterm = pair.integrate(|pp| {
        base.h_at(&pp.base) * (wedge_powers(&[(Form::metric(&pp.base), n)]) - wedge_powers(&[(Form::metric(&pp.tgt), n)]))
    });
    let imj = i_minus_j_from_moments(&pair.gradient_moments(), n, pair.v);
    Ok((entropy + hterm) / pair.v - imj)
}

/// `dν/dt = −(1/V)∫φ̇(R − r)ω_φⁿ` along a path through `state` with velocity `phidot`.
pub fn k_energy_derivative<T: Real>(state: &State<T>, phidot: &dyn ScalarField<T>) -> T {
    let r = state.average_scalar_curvature();
    -state.integrate_fn(|p| phidot.jet(p).v * (p.scalar_curvature() - r)) / state.nominal_volume()
}

/// `E_k⁰ = (1/V)∫(log(ω_φⁿ/ωⁿ) − h_ω)(Σ_{i≤k} Ric(ω_φ)ⁱ∧ω^{k−i})∧ω_φ^{n−k}`,
/// with `h_ω` shifted by [`h_weighted_mean`] (no shift when the base is Kähler–Einstein).
pub fn e_k0<T: Real>(base: &State<T>, tgt: &State<T>, k: usize) -> Result<T> {
    let pair = Pair::new(base, tgt)?;
    Ok(e_k0_pairs(base, &pair, k))
}

/// Weighted mean `(1/((k+1)V))∫h_ω Σ_{i≤k} Ric(ω)ⁱ∧ω^{n−i}` of the base's `h_ω`.
///
/// Subtracting it from `h_ω` inside `E_k⁰` makes `E_{k,ω}(0) = 0`, the
/// normalization under which the cocycle identity holds exactly.
pub fn h_weighted_mean<T: Real>(base: &State<T>, k: usize) -> T {
    let n = base.dim();
    let total = base.quad.integrate_density(|p| {
        let ric = Form::ricci(p);
        let w = Form::metric(p);
        base.h_at(p) * (0..=k).map(|i| wedge_powers(&[(ric, i), (w, n - i)])).sum::<T>()
    });
    total / (T::from_usize_lossy(k + 1) * base.nominal_volume())
}

fn e_k0_pairs<T: Real>(base: &State<T>, pair: &Pair<T>, k: usize) -> T {
    let n = pair.n;
    let h_shift = h_weighted_mean(base, k);
    pair.integrate(|pp| {
        let ric = Form::ricci(&pp.tgt);
        let w = Form::metric(&pp.base);
        let wt = Form::metric(&pp.tgt);
        let forms: T = (0..=k).map(|i| wedge_powers(&[(ric, i), (w, k - i), (wt, n - k)])).sum();
        (pp.log_volume_ratio() - base.h_at(&pp.base) + h_shift) * forms
    }) / pair.v
}

/// `E_k = E_k⁰ − J_k` with `J_n = 0`.
pub fn e_k<T: Real>(base: &State<T>, tgt: &State<T>, k: usize) -> Result<T> {
    let pair = Pair::new(base, tgt)?;
    let jk = j_k_from_moments(&pair.gradient_moments(), pair.n, k, pair.v);
    Ok(e_k0_pairs(base, &pair, k) - jk)
}

/// Velocity of `E_k` along a path through `state` with velocity `phidot`:
/// `((k+1)/V)∫Δφ̇ Ric^k∧ω_φ^{n−k} − ((n−k)/V)∫φ̇(Ric^{k+1} − ω_φ^{k+1})∧ω_φ^{n−k−1}`.
pub fn e_k_flow_derivative<T: Real>(state: &State<T>, phidot: &dyn ScalarField<T>, k: usize) -> T {
    let n = state.dim();
    let kp1 = T::from_usize_lossy(k + 1);
    let nmk = T::from_usize_lossy(n - k);
    state.quad.integrate_density(|p| {
        let jet = phidot.jet(p);
        let ric = Form::ricci(p);
        let w = Form::metric(p);
        let first = kp1 * jet.laplacian(p) * wedge_powers(&[(ric, k), (w, n - k)]);
        let second = if k < n {
            nmk * jet.v * (wedge_powers(&[(ric, k + 1), (w, n - k - 1)]) - wedge_powers(&[(w, n)]))
        } else {
            T::zero()
        };
        first - second
    }) / state.nominal_volume()
}

/// `σ_k(Ric(ω_φ))` at a point, normalized by `C(n,k) Ric^k∧ω^{n−k} = σ_k ωⁿ`.
pub fn sigma_at<T: Real>(p: &PointData<T>, k: usize) -> T {
    if k > p.n {
        return T::zero();
    }
    sigma_k(&RicciSpectrum(p.ricci_eigenvalues()))[k]
}

/// `σ_k` as a Chebyshev series in the moment coordinate of `state`.
pub fn sigma_series<T: Real>(state: &State<T>, k: usize) -> Result<MomentSeriesField<T>> {
    let m = state.profile.degree() + 16;
    let len = T::from_usize_lossy(state.dim() + 1);
    let xs = chebyshev::roots(m, T::zero(), len);
    let vals = xs.iter().map(|x| Ok(sigma_at(&state.profile.point_at_x(*x)?, k))).collect::<Result<Vec<_>>>()?;
    Ok(MomentSeriesField::new(ChebSeries::from_root_values(&vals, T::zero(), len), T::zero()))
}

/// Euler–Lagrange residual of `E_k` and the constant `c_k` used.
#[derive(Clone, Debug)]
pub struct EulerLagrange<T> {
    pub c_k: T,
    /// Residual `(k+1)Δσ_k − (n−k)σ_{k+1} − c_k` at the grid points.
    pub residual: Vec<T>,
    /// `∫ residual ω_φⁿ` by Gauss quadrature.
    pub integral: T,
}

/// Pointwise residual of `(k+1)Δ_φσ_k − (n−k)σ_{k+1} = c_k`, with
/// `c_k = −((n−k)/V)∫σ_{k+1}ω_φⁿ` forced by `∫Δ_φσ_k ω_φⁿ = 0`.
pub fn euler_lagrange_residual<T: Real>(state: &State<T>, k: usize) -> Result<EulerLagrange<T>> {
    let n = state.dim();
    let sk = sigma_series(state, k)?;
    let nmk = T::from_usize_lossy(n - k.min(n));
    let kp1 = T::from_usize_lossy(k + 1);
    let c_k = -nmk / state.nominal_volume() * state.integrate_fn(|p| sigma_at(p, k + 1));
    let res = |p: &PointData<T>| kp1 * sk.jet(p).laplacian(p) - nmk * sigma_at(p, k + 1) - c_k;
    let residual = state.samples.iter().map(res).collect();
    let integral = state.integrate_fn(res);
    Ok(EulerLagrange { c_k, residual, integral })
}

/// Values of all functionals of one metric relative to a base metric.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FunctionalLedger<T> {
    pub j: T,
    /// `J_k` for `k = 0, …, n−1`.
    pub j_k: Vec<T>,
    pub f: T,
    pub nu: T,
    /// `E_k⁰` for `k = 0, …, n`.
    pub e0_k: Vec<T>,
    /// `E_k` for `k = 0, …, n`.
    pub e_k: Vec<T>,
    pub i: T,
    pub i_minus_j: T,
    /// Volume average of `φ` against `ω_φⁿ`, recorded since most entries depend on the additive constant.
    pub phi_mean: T,
}

impl<T: Real> FunctionalLedger<T> {
    pub fn compute(base: &State<T>, tgt: &State<T>) -> Result<Self> {
        let pair = Pair::new(base, tgt)?;
        let n = pair.n;
        let g = pair.gradient_moments();
        let j = j_from_moments(&g, n, pair.v);
        let j_k: Vec<T> = (0..n).map(|k| j_k_from_moments(&g, n, k, pair.v)).collect();
        let e0_k: Vec<T> = (0..=n).map(|k| e_k0_pairs(base, &pair, k)).collect();
        let e_k = (0..=n).map(|k| e0_k[k] - if k < n { j_k[k] } else { T::zero() }).collect();
        let (i, i_minus_j) = i_functional(base, tgt)?;
        let vol_t = |pp: &PairPoint<T>| wedge_powers(&[(Form::metric(&pp.tgt), n)]);
        let phi_mean = pair.integrate(|pp| pp.potential().v * vol_t(pp)) / pair.integrate(vol_t);
        Ok(Self { j, j_k, f: f_energy(base, tgt)?, nu: k_energy(base, tgt)?, e0_k, e_k, i, i_minus_j, phi_mean })
    }

    /// `J ≥ 0`, `I ≥ 0` and `I − J ≤ I ≤ (n+1)(I − J)`, each with slack `tol`.
    pub fn sandwich_holds(&self, n: usize, tol: T) -> bool {
        let np1 = T::from_usize_lossy(n + 1);
        self.j >= -tol && self.i >= -tol && self.i_minus_j <= self.i + tol && self.i <= np1 * self.i_minus_j + tol
    }
}
