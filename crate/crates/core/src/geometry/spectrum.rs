//! Spectrum of the complex Laplacian on invariant functions.
//!
//! In the moment coordinate the eigenproblem is the weighted Sturm–Liouville
//! problem `−(x^{n−1}ψ f′)′ = λ x^{n−1} f` on `[0, n+1]`, degenerate at both
//! ends. It is discretized by a Galerkin method in Legendre polynomials with
//! Gauss–Legendre quadrature, giving symmetric stiffness and mass matrices.

use crate::error::{Error, Result};
use crate::geometry::ReducedMetricState;
use crate::linalg::{cholesky, symmetric_eigen, Mat};
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;

/// Legendre values and derivatives `P_k(y), P_k′(y)` for `k < m`.
fn legendre_table<T: Real>(m: usize, y: T) -> (Vec<T>, Vec<T>) {
    let mut p = vec![T::zero(); m];
    let mut dp = vec![T::zero(); m];
    p[0] = T::one();
    if m > 1 {
        p[1] = y;
        dp[1] = T::one();
    }
    for k in 1..m.saturating_sub(1) {
        let kf = T::from_usize_lossy(k);
        p[k + 1] = ((kf + kf + T::one()) * y * p[k] - kf * p[k - 1]) / (kf + T::one());
        dp[k + 1] = dp[k - 1] + (kf + kf + T::one()) * p[k];
    }
    (p, dp)
}

/// Invariant eigenfunctions, as Legendre expansions in `y = 2x/(n+1) − 1`.
#[derive(Clone, Debug)]
pub struct InvariantSpectrum<T> {
    pub n: usize,
    /// Nonzero eigenvalues, ascending.
    pub eigenvalues: Vec<T>,
    /// Coefficients of each eigenfunction, normalized by `∫ f² ωⁿ = 1`.
    pub coefficients: Vec<Vec<T>>,
}

impl<T: Real> InvariantSpectrum<T> {
    /// Value and `x`-derivative of eigenfunction `k` at moment coordinate `x`.
    pub fn eval(&self, k: usize, x: T) -> (T, T) {
        let c = &self.coefficients[k];
        let len = T::from_usize_lossy(self.n + 1);
        let y = (x + x) / len - T::one();
        let (p, dp) = legendre_table(c.len(), y);
        let mut v = T::zero();
        let mut d = T::zero();
        for i in 0..c.len() {
            v += c[i] * p[i];
            d += c[i] * dp[i];
        }
        (v, d * T::lit(2.0) / len)
    }
}

/// Lowest `count` nonzero eigenvalues of `−Δ` on invariant functions.
pub fn laplacian_spectrum<T: Real>(state: &ReducedMetricState<T>, count: usize) -> Result<InvariantSpectrum<T>> {
    if count == 0 || count > state.n_points() / 4 {
        return Err(Error::config("count", format!("need 1 ≤ count ≤ {}, got {count}", state.n_points() / 4)));
    }
    let n = state.dim();
    let basis = (3 * count + 16).min(48).max(count + 8);
    let len = T::from_usize_lossy(n + 1);
    let (xs, ws) = gauss_legendre(2 * basis + state.profile.degree() + 16, T::zero(), len);
    let mut k = Mat::zeros(basis, basis);
    let mut m = Mat::zeros(basis, basis);
    let jac = T::lit(2.0) / len;
    let nf = T::from_usize_lossy(n);
    for (x, w) in xs.iter().zip(&ws) {
        let p = state.profile.point_at_x(*x)?;
        let weight = *w * nf * x.powi(n as i32 - 1);
        let (pv, dpv) = legendre_table(basis, (*x + *x) / len - T::one());
        for a in 0..basis {
            for b in 0..=a {
                k[(a, b)] += weight * p.psi * dpv[a] * dpv[b] * jac * jac;
                m[(a, b)] += weight * pv[a] * pv[b];
            }
        }
    }
    for a in 0..basis {
        for b in 0..a {
            k[(b, a)] = k[(a, b)];
            m[(b, a)] = m[(a, b)];
        }
    }
    let l = cholesky(&m)?;
    let linv = crate::linalg::inverse(l)?;
    let c = linv.matmul(&k).matmul(&linv.transpose());
    let csym = Mat::from_fn(basis, basis, |i, j| (c[(i, j)] + c[(j, i)]) * T::lit(0.5));
    let (vals, vecs) = symmetric_eigen(&csym)?;
    // The first eigenvalue belongs to the constants.
    let mut eigenvalues = Vec::with_capacity(count);
    let mut coefficients = Vec::with_capacity(count);
    for idx in 1..=count {
        eigenvalues.push(vals[idx]);
        let y: Vec<T> = (0..basis).map(|i| vecs[(i, idx)]).collect();
        coefficients.push(linv.transpose().matvec(&y));
    }
    Ok(InvariantSpectrum { n, eigenvalues, coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Manifold;

    #[test]
    fn round_sphere_zonal_spectrum() {
        let st = ReducedMetricState::<f64>::build_reference(Manifold::CP1, 256, 12.0).unwrap();
        let sp = laplacian_spectrum(&st, 3).unwrap();
        for (l, e) in sp.eigenvalues.iter().zip([1.0, 3.0, 6.0]) {
            assert!((l - e).abs() < 1e-10, "{l}");
        }
        let norm = st.integrate_fn(|p| sp.eval(0, p.x).0.powi(2));
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn projective_plane_first_eigenvalue_is_one() {
        let st = ReducedMetricState::<f64>::build_reference(Manifold::CP2, 256, 12.0).unwrap();
        let sp = laplacian_spectrum(&st, 2).unwrap();
        assert!((sp.eigenvalues[0] - 1.0).abs() < 1e-10);
        // The eigenfunction is affine in the moment coordinate.
        let (v0, d0) = sp.eval(0, 0.3);
        let (v1, d1) = sp.eval(0, 2.1);
        assert!((d0 - d1).abs() < 1e-9 && ((v1 - v0) / 1.8 - d0).abs() < 1e-9);
    }
}
