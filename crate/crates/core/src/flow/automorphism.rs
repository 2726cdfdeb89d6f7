use crate::error::{Error, Result};
use crate::functionals::i_functional;
use crate::geometry::forms::{wedge_powers, Form};
use crate::geometry::{integrate_pairs, pair_points, ReducedMetricState};
use crate::scalar::Real;
use serde::Serialize;

type State<T> = ReducedMetricState<T>;

/// Dilation `z ↦ λz` minimizing `Ψ(λ) = (I − J)` of `σ_λ*ω_KE` relative to the base `ω_φ`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct AutomorphismFit<T> {
    pub lambda: T,
    /// `a = 2 log λ`, the shift of the radial coordinate.
    pub a: T,
    pub psi: T,
    /// `∫(φ − ρ)θ ω_ρⁿ` with `θ` the invariant first eigenfunction of `ω_ρ = σ_λ*ω_KE`.
    pub central_residual: T,
    /// Centered difference `dΨ/da` at the minimizer.
    pub slope: T,
}

/// `Ψ` with `ω_φ` as base and the dilated Kähler–Einstein metric as target, the
/// order under which `dΨ` along the dilation is `(1/V)∫(ρ − φ)θ_ρ ω_ρⁿ`.
pub fn psi_at<T: Real>(state: &State<T>, reference: &State<T>, a: T) -> Result<T> {
    Ok(i_functional(state, &reference.dilated(a)?)?.1)
}

/// `∫(φ − ρ)θ_ρ ω_ρⁿ` for the dilated reference `ω_ρ`.
pub fn central_residual<T: Real>(state: &State<T>, reference: &State<T>, a: T) -> Result<T> {
    let rho = reference.dilated(a)?;
    let n = state.dim();
    let nf = T::from_usize_lossy(n);
    let pts = pair_points(state, &rho)?;
    Ok(-integrate_pairs(&pts, |pp| pp.potential().v * (pp.tgt.x - nf) * wedge_powers(&[(Form::metric(&pp.tgt), n)])))
}

/// Golden-section search for `Ψ` on `log λ ∈ [−3, 3]`, then a secant solve of
/// the orthogonality condition `∫(φ − ρ)θ_ρ ω_ρⁿ = 0` started at the minimizer.
pub fn normalize_by_automorphism<T: Real>(state: &State<T>, reference: &State<T>) -> Result<AutomorphismFit<T>> {
    let (mut lo, mut hi) = (T::lit(-6.0), T::lit(6.0));
    let ratio = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = psi_at(state, reference, x1)?;
    let mut f2 = psi_at(state, reference, x2)?;
    while hi - lo > T::lit(1e-5) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = psi_at(state, reference, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = psi_at(state, reference, x2)?;
        }
    }
    let edge = T::lit(5.99);
    let mut a = (lo + hi) * T::lit(0.5);
    if a.abs() > edge {
        return Err(Error::Numerical(format!("Ψ minimum at the bracket edge (a = {a})")));
    }
    let mut a_prev = a - T::lit(1e-3);
    let mut r_prev = central_residual(state, reference, a_prev)?;
    let mut r = central_residual(state, reference, a)?;
    for _ in 0..30 {
        if r == T::zero() || r == r_prev {
            break;
        }
        let next = a - r * (a - a_prev) / (r - r_prev);
        a_prev = a;
        r_prev = r;
        a = next;
        r = central_residual(state, reference, a)?;
        if (a - a_prev).abs() < T::lit(1e-14) {
            break;
        }
    }
    let h = T::lit(1e-4);
    let slope = (psi_at(state, reference, a + h)? - psi_at(state, reference, a - h)?) / (h + h);
    Ok(AutomorphismFit { lambda: (a * T::lit(0.5)).exp(), a, psi: psi_at(state, reference, a)?, central_residual: r, slope })
}
