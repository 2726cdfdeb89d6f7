//! Moment-coordinate representation of U(n)-invariant Kähler potentials.
//!
//! A metric `√−1∂∂̄u(log|z|²)` is encoded by the Legendre dual `G(x)` of `u`
//! on the moment interval `x = u′ ∈ [0, n+1]`. The dual of the reference
//! potential `(n+1)log(1+eˢ)` is `x log x + (n+1−x)log(n+1−x) − (n+1)log(n+1)`;
//! the profile stores the smooth difference `g = G − G_ref` as a Chebyshev
//! series together with a separate additive constant. With `a = x(n+1−x)/(n+1)`
//! the radial metric coefficient is `u″ = ψ(x) = a/(1 + a g″)`.

use crate::chebyshev::{self, ChebSeries};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, Mat};
use crate::scalar::{logistic, softplus, Real};

/// Potential data and derivatives at one point of the radial coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointData<T> {
    pub n: usize,
    /// Radial coordinate `s = log|z|²`.
    pub s: T,
    /// Reference coordinate `τ = log(x/(n+1−x))` of the same moment value.
    pub tau: T,
    /// Moment coordinate `x = u′(s)`.
    pub x: T,
    /// Complementary moment `n+1−x`, carried separately for accuracy near `x = n+1`.
    pub xb: T,
    pub g: T,
    pub g1: T,
    pub g2: T,
    pub g3: T,
    pub g4: T,
    /// `1 + a g″`; positive for a Kähler metric.
    pub den: T,
    /// `ψ = u″` as a function of `x`.
    pub psi: T,
    pub psi_x: T,
    pub psi_xx: T,
    /// `q = ψ/x`.
    pub q: T,
    pub q_x: T,
    /// `(1 − q)/x`.
    pub omq_x: T,
    /// Full potential `u(s)`.
    pub u: T,
    /// Perturbation `φ = u − u_ref` relative to the reference potential.
    pub phi: T,
    /// `log(ω_φⁿ/ω_refⁿ)`.
    pub rho: T,
}

impl<T: Real> PointData<T> {
    pub fn nf(&self) -> T {
        T::from_usize_lossy(self.n)
    }

    pub fn u1(&self) -> T {
        self.x
    }

    pub fn u2(&self) -> T {
        self.psi
    }

    pub fn u3(&self) -> T {
        self.psi * self.psi_x
    }

    pub fn u4(&self) -> T {
        self.psi * (self.psi_x * self.psi_x + self.psi * self.psi_xx)
    }

    /// Radial Ricci eigenvalue.
    pub fn r1(&self) -> T {
        -(self.psi_xx + (self.nf() - T::one()) * self.q_x)
    }

    /// Tangential Ricci eigenvalue (meaningful for `n ≥ 2`).
    pub fn r2(&self) -> T {
        self.nf() * self.omq_x - self.q_x
    }

    /// Ricci eigenvalues `r₁, r₂, …, r₂` (tangential value repeated `n−1` times).
    pub fn ricci_eigenvalues(&self) -> Vec<T> {
        let mut v = vec![self.r1()];
        for _ in 1..self.n {
            v.push(self.r2());
        }
        v
    }

    pub fn scalar_curvature(&self) -> T {
        self.r1() + (self.nf() - T::one()) * self.r2()
    }

    /// `|Ric|²` with respect to the metric.
    pub fn ricci_norm2(&self) -> T {
        let r1 = self.r1();
        let r2 = self.r2();
        r1 * r1 + (self.nf() - T::one()) * r2 * r2
    }

    /// Holomorphic bisectional components in the unitary eigenframe:
    /// radial-radial, radial-tangential, tangential-tangential.
    pub fn bisectional(&self) -> (T, T, T) {
        (-self.psi_xx, -self.q_x, T::lit(2.0) * self.omq_x)
    }

    /// Smallest bisectional component.
    pub fn min_bisectional(&self) -> T {
        let (a, b, c) = self.bisectional();
        if self.n == 1 {
            a
        } else {
            a.min(b).min(c)
        }
    }

    /// Radial and tangential components of the Ricci form.
    pub fn ricci_form(&self) -> (T, T) {
        (self.r1() * self.psi, self.nf() - self.psi_x - (self.nf() - T::one()) * self.q)
    }

    /// Volume density `v(s)` with `ω_φⁿ = v ds` after integrating out the angles.
    pub fn volume_density(&self) -> T {
        self.nf() * self.psi * self.x.powi(self.n as i32 - 1)
    }
}

/// Legendre-dual representation of a U(n)-invariant potential.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentProfile<T> {
    pub n: usize,
    series: [ChebSeries<T>; 5],
    /// Additive constant of `g`; the potential `φ` carries `−offset`.
    pub offset: T,
}

impl<T: Real> MomentProfile<T> {
    pub fn length(n: usize) -> T {
        T::from_usize_lossy(n + 1)
    }

    /// Chebyshev roots on the moment interval.
    pub fn nodes(n: usize, degree: usize) -> Vec<T> {
        chebyshev::roots(degree, T::zero(), Self::length(n))
    }

    pub fn from_series(n: usize, g: ChebSeries<T>, offset: T) -> Self {
        let d1 = g.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        let d4 = d3.derivative();
        Self { n, series: [g, d1, d2, d3, d4], offset }
    }

    /// Profile of the reference metric.
    pub fn reference(n: usize, degree: usize) -> Self {
        Self::from_series(n, ChebSeries::zero(degree, T::zero(), Self::length(n)), T::zero())
    }

    /// Profile through values of `g` at [`Self::nodes`].
    pub fn from_node_values(n: usize, values: &[T], offset: T) -> Self {
        Self::from_series(n, ChebSeries::from_root_values(values, T::zero(), Self::length(n)), offset)
    }

    pub fn degree(&self) -> usize {
        self.series[0].coeffs.len()
    }

    pub fn series(&self) -> &ChebSeries<T> {
        &self.series[0]
    }

    /// Values of `g` (without the offset) at the nodes.
    pub fn node_values(&self) -> Vec<T> {
        self.series[0].root_values()
    }

    /// Pull-back by the dilation `s ↦ s + a`: `u(s) ↦ u(s + a)`, i.e. `g ↦ g − a x`.
    pub fn dilated(&self, a: T) -> Self {
        let mut c = self.series[0].coeffs.clone();
        let half = Self::length(self.n) * T::lit(0.5);
        // x = half·(1 + ξ) = half·T₀ + half·T₁
        c[0] -= a * half;
        if c.len() > 1 {
            c[1] -= a * half;
        }
        Self::from_series(self.n, ChebSeries { a: T::zero(), b: Self::length(self.n), coeffs: c }, self.offset)
    }

    /// Adds a constant to the potential `φ`.
    pub fn shifted(&self, c: T) -> Self {
        let mut p = self.clone();
        p.offset -= c;
        p
    }

    fn derivs(&self, x: T) -> [T; 5] {
        [
            self.series[0].eval(x) + self.offset,
            self.series[1].eval(x),
            self.series[2].eval(x),
            self.series[3].eval(x),
            self.series[4].eval(x),
        ]
    }

    /// Point data at reference coordinate `τ`, with `s` supplied or derived.
    fn point_from_tau(&self, tau: T, s: Option<T>) -> Result<PointData<T>> {
        let x = Self::length(self.n) * logistic(tau);
        Self::point_from_derivs(self.n, tau, s, self.derivs(x))
    }

    /// Point data from `g` and its first four derivatives (offset included in `g`)
    /// at the moment value with reference coordinate `τ`.
    pub fn point_from_derivs(n: usize, tau: T, s: Option<T>, derivs: [T; 5]) -> Result<PointData<T>> {
        let nf = T::from_usize_lossy(n);
        let np1 = nf + T::one();
        let x = np1 * logistic(tau);
        let xb = np1 * logistic(-tau);
        let a = x * xb / np1;
        let [g, g1, g2, g3, g4] = derivs;
        let den = T::one() + a * g2;
        if !(den > T::zero()) {
            return Err(Error::Numerical(format!("profile not convex at x = {x}")));
        }
        let s = s.unwrap_or(tau + g1);
        let two = T::lit(2.0);
        let a_x = (xb - x) / np1;
        let a_xx = -two / np1;
        let b = xb / np1;
        let b_x = -T::one() / np1;
        let den_x = a_x * g2 + a * g3;
        let den_xx = a_xx * g2 + two * a_x * g3 + a * g4;
        let psi = a / den;
        let q = b / den;
        let q_x = b_x / den - b * den_x / (den * den);
        let q_xx = -two * b_x * den_x / (den * den) - b * den_xx / (den * den) + two * b * den_x * den_x / (den * den * den);
        let psi_x = q + x * q_x;
        let psi_xx = two * q_x + x * q_xx;
        let omq_x = (T::one() + xb * g2) / (np1 * den);
        let sp_tau = softplus(tau);
        let sp_s = softplus(s);
        let u = x * g1 - g + np1 * sp_tau;
        let phi = x * g1 - g + np1 * (sp_tau - sp_s);
        let rho = -den.ln() + nf * (softplus(-s) - softplus(-tau)) + (sp_s - sp_tau);
        Ok(PointData { n, s, tau, x, xb, g, g1, g2, g3, g4, den, psi, psi_x, psi_xx, q, q_x, omq_x, u, phi, rho })
    }

    /// Point data at moment coordinate `x ∈ (0, n+1)`.
    pub fn point_at_x(&self, x: T) -> Result<PointData<T>> {
        let np1 = Self::length(self.n);
        let tau = (x / (np1 - x)).ln();
        self.point_from_tau(tau, None)
    }

    /// Point data at radial coordinate `s`: solves `G′(x) = s` by Newton's method in `τ`.
    pub fn point_at_s(&self, s: T) -> Result<PointData<T>> {
        let np1 = Self::length(self.n);
        let mut tau = s;
        // Initial guess from the slope at the reference moment value.
        let x0 = np1 * logistic(s);
        tau -= self.series[1].eval(x0);
        let tol = T::epsilon() * T::lit(4.0);
        for _ in 0..80 {
            let sig = logistic(tau);
            let x = np1 * sig;
            let a = x * np1 * logistic(-tau) / np1;
            let g1 = self.series[1].eval(x);
            let g2 = self.series[2].eval(x);
            let f = tau + g1 - s;
            let df = T::one() + a * g2;
            if !(df > T::zero()) {
                return Err(Error::Numerical(format!("profile not convex near s = {s}")));
            }
            let step = f / df;
            tau -= step;
            if step.abs() <= tol * (T::one() + tau.abs()) {
                return self.point_from_tau(tau, Some(s));
            }
        }
        Err(Error::Numerical(format!("Legendre inversion did not converge at s = {s}")))
    }

    /// Checks `1 + a g″ > 0` at the nodes and on a fine sample of the interval.
    pub fn check_convex(&self) -> Result<()> {
        let np1 = Self::length(self.n);
        let m = 4 * self.degree() + 1;
        for i in 0..=m {
            let x = np1 * T::from_usize_lossy(i) / T::from_usize_lossy(m);
            let a = x * (np1 - x) / np1;
            if !(T::one() + a * self.series[2].eval(x) > T::zero()) {
                return Err(Error::Numerical(format!("profile not convex at x = {x}")));
            }
        }
        Ok(())
    }

    /// Builds the profile of `u_ref + φ` for a perturbation with closed-form
    /// derivatives `f(s) = (φ, φ′, φ″)`.
    pub fn from_potential_fn(n: usize, degree: usize, f: impl Fn(T) -> (T, T, T)) -> Result<Self> {
        let nf = T::from_usize_lossy(n);
        let np1 = nf + T::one();
        let nodes = Self::nodes(n, degree);
        let mut values = Vec::with_capacity(degree);
        for x in nodes {
            let xb = np1 - x;
            let tau = (x / xb).ln();
            let mut s = tau;
            let mut ok = false;
            for _ in 0..100 {
                let (_, p1, p2) = f(s);
                let sig = logistic(s);
                let sigc = logistic(-s);
                // Residual of u′(s) = x, written on the side where it keeps relative accuracy.
                let fx = if x + x < np1 { np1 * sig + p1 - x } else { xb - np1 * sigc + p1 };
                let dfx = np1 * sig * sigc + p2;
                if !(dfx > T::zero()) {
                    return Err(Error::Numerical(format!("potential not convex near s = {s}")));
                }
                let step = fx / dfx;
                s -= step;
                if step.abs() <= T::epsilon() * T::lit(64.0) * (T::one() + s.abs()) {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(Error::Numerical(format!("moment inversion did not converge at x = {x}")));
            }
            let (p, _, _) = f(s);
            values.push(x * (s - tau) - p - np1 * (softplus(s) - softplus(tau)));
        }
        let profile = Self::from_node_values(n, &values, T::zero());
        profile.check_convex()?;
        Ok(profile)
    }

    /// Least-squares profile through potential samples: moment values `x_i`
    /// (with complements `xb_i`) and Legendre-dual values at grid points `s_i`.
    pub fn fit(n: usize, degree: usize, s: &[T], phi: &[T], x: &[T], xb: &[T]) -> Result<(Self, T)> {
        let np1 = Self::length(n);
        let m = s.len();
        let mut gvals = Vec::with_capacity(m);
        for i in 0..m {
            let tau = (x[i] / xb[i]).ln();
            gvals.push(x[i] * (s[i] - tau) - phi[i] - np1 * (softplus(s[i]) - softplus(tau)));
        }
        let two = T::lit(2.0);
        let a = Mat::from_fn(m, degree, |i, k| {
            let xi = two * x[i] / np1 - T::one();
            // T_k(ξ) via the cosine form is inaccurate at |ξ| ≈ 1; use the recurrence.
            let mut t0 = T::one();
            let mut t1 = xi;
            if k == 0 {
                return t0;
            }
            for _ in 1..k {
                let t2 = two * xi * t1 - t0;
                t0 = t1;
                t1 = t2;
            }
            t1
        });
        let coeffs = least_squares(&a, &gvals)?;
        let series = ChebSeries { a: T::zero(), b: np1, coeffs };
        let residual = (0..m).fold(T::zero(), |r, i| r.max((series.eval(x[i]) - gvals[i]).abs()));
        let profile = Self::from_series(n, series, T::zero());
        profile.check_convex()?;
        Ok((profile, residual))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_point_data() {
        for n in 1..=2 {
            let p = MomentProfile::<f64>::reference(n, 16);
            for &s in &[-11.0, -3.0, 0.0, 0.7, 11.5] {
                let d = p.point_at_s(s).unwrap();
                let np1 = (n + 1) as f64;
                let sg = 1.0 / (1.0 + (-s).exp());
                let sgc = 1.0 / (1.0 + s.exp());
                assert!((d.x - np1 * sg).abs() < 1e-14 * np1);
                assert!((d.psi / (np1 * sg * sgc) - 1.0).abs() < 1e-13);
                assert!(d.phi.abs() < 1e-13 && d.rho.abs() < 1e-13);
                assert!((d.r1() - 1.0).abs() < 1e-12, "n={n} s={s} r1={}", d.r1());
                if n == 2 {
                    assert!((d.r2() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dilation_shifts_the_potential() {
        let p = MomentProfile::<f64>::reference(2, 16).dilated(0.8);
        for &s in &[-5.0, 0.0, 4.0] {
            let d = p.point_at_s(s).unwrap();
            let expect = 3.0 * (softplus(s + 0.8) - softplus(s));
            assert!((d.phi - expect).abs() < 1e-13);
        }
    }
}
