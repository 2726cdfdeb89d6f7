//! Holomorphic invariants of the dilation field `X = Σ zᵢ∂/∂zᵢ`.
//!
//! For an invariant metric the potential of `X` is the moment map:
//! `θ_X = u′(s) + const` and `X(f) = f′(s)`.

use crate::algebra::{vandermonde_inverse, VandermondeInverse};
use crate::error::Result;
use crate::fd;
use crate::geometry::forms::{wedge_powers, Form};
use crate::geometry::{Manifold, PointData, ReducedMetricState};
use crate::scalar::{binomial, Real};

type State<T> = ReducedMetricState<T>;

/// Potential of the dilation field on one metric.
#[derive(Clone, Debug, PartialEq)]
pub struct HolomorphicFieldDesc<T> {
    pub manifold: Manifold,
    /// `θ_X` at the grid points, mean zero against `ω_φⁿ`.
    pub theta: Vec<T>,
    /// `Δθ_X` at the grid points.
    pub laplacian: Vec<T>,
    /// Constant subtracted from `u′` to make `θ_X` mean zero.
    pub mean: T,
}

/// `Δ_φ θ_X` at a point.
pub fn theta_laplacian<T: Real>(p: &PointData<T>) -> T {
    p.psi_x + (p.nf() - T::one()) * p.q
}

/// Volume mean of `u′`, which is `n` for every metric in the class.
pub fn theta_mean<T: Real>(state: &State<T>) -> T {
    state.mean_fn(|p| p.x)
}

pub fn holomorphic_potential<T: Real>(state: &State<T>) -> HolomorphicFieldDesc<T> {
    let mean = theta_mean(state);
    HolomorphicFieldDesc {
        manifold: state.manifold(),
        theta: state.samples.iter().map(|p| p.x - mean).collect(),
        laplacian: state.samples.iter().map(theta_laplacian).collect(),
        mean,
    }
}

impl<T: Real> HolomorphicFieldDesc<T> {
    /// Largest interior deviation of `i_Xω = √−1∂̄θ_X`, i.e. `θ′ − u″`, with `θ′` by finite differences.
    pub fn potential_residual(&self, state: &State<T>) -> T {
        let d = fd::derivative(&self.theta, state.grid.h, 1, crate::geometry::FD_ORDER);
        d.iter().zip(&state.samples).fold(T::zero(), |m, (a, p)| m.max((*a - p.psi).abs()))
    }

    /// Largest deviation of `√−1∂̄Δθ_X = −i_X Ric`, i.e. `(Δθ)′ + Ric_rad`.
    pub fn ricci_residual(&self, state: &State<T>) -> T {
        let d = fd::derivative(&self.laplacian, state.grid.h, 1, crate::geometry::FD_ORDER);
        d.iter().zip(&state.samples).fold(T::zero(), |m, (a, p)| m.max((*a + Form::ricci(p).r).abs()))
    }
}

/// Futaki invariant `∫ X(h_ω) ωⁿ`.
pub fn futaki<T: Real>(state: &State<T>) -> T {
    state.integrate_fn(|p| state.h_ds_at(p))
}

/// `ℑ_k(X, ω)` with `θ_X = u′ − mean + shift`.
pub fn im_k<T: Real>(state: &State<T>, k: usize, shift: T) -> T {
    let n = state.dim();
    let mean = theta_mean(state);
    let nmk = T::from_usize_lossy(n - k.min(n));
    let kp1 = T::from_usize_lossy(k + 1);
    state.quad.integrate_density(|p| {
        let theta = p.x - mean + shift;
        let ric = Form::ricci(p);
        let w = Form::metric(p);
        let mut d = nmk * theta * wedge_powers(&[(w, n)]) + kp1 * theta_laplacian(p) * wedge_powers(&[(ric, k), (w, n - k)]);
        if k < n {
            d -= nmk * theta * wedge_powers(&[(ric, k + 1), (w, n - k - 1)]);
        }
        d
    })
}

/// `I_pq = ∫(−pθ_X + qΔθ_X)(q Ric + p ω)ⁿ`.
pub fn i_pq<T: Real>(state: &State<T>, p: T, q: T, shift: T) -> T {
    let n = state.dim();
    let mean = theta_mean(state);
    state.quad.integrate_density(|pt| {
        let theta = pt.x - mean + shift;
        let form = Form::ricci(pt) * q + Form::metric(pt) * p;
        (-p * theta + q * theta_laplacian(pt)) * wedge_powers(&[(form, n)])
    })
}

/// `ℑ_{k−1}` rebuilt from `I_{1,i}`, `i = 1, …, n+1`:
/// `(n−k+1+υ_k)∫θωⁿ + ((n+1)/C(n+1,k)) Σᵢ c_{ik} I_{1,i}`.
pub fn im_from_ipq<T: Real>(state: &State<T>, inv: &VandermondeInverse<T>, k: usize, shift: T) -> T {
    let n = state.dim();
    let mean = theta_mean(state);
    let theta_int = state.integrate_fn(|p| p.x - mean + shift);
    let np1 = T::from_usize_lossy(n + 1);
    let mut acc = T::zero();
    for i in 1..=n + 1 {
        acc += inv.c[i - 1][k - 1] * i_pq(state, T::one(), T::from_usize_lossy(i), shift);
    }
    (T::from_usize_lossy(n + 1 - k) + inv.upsilon[k - 1]) * theta_int + np1 / binomial::<T>(n as i64 + 1, k as i64) * acc
}

/// Largest difference between `ℑ_{k−1}` and its reconstruction, over `k = 1, …, n+1`.
pub fn decomposition_check<T: Real>(state: &State<T>, shift: T) -> Result<T> {
    let n = state.dim();
    let inv = vandermonde_inverse::<T>(n)?;
    Ok((1..=n + 1).fold(T::zero(), |m, k| m.max((im_k(state, k - 1, shift) - im_from_ipq(state, &inv, k, shift)).abs())))
}
