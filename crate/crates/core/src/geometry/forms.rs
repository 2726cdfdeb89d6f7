//! Invariant (1,1)-forms and their wedge products in the radial reduction.
//!
//! An invariant real (1,1)-form is diagonal in the radial/tangential splitting
//! and is recorded by two coefficients: `√−1∂∂̄a` has radial part `a″(s)` and
//! tangential part `a′(s)`. After integrating out the angular directions the
//! top-degree wedge `α₁∧…∧αₙ` becomes the density `Σ_j r_j Π_{i≠j} t_i` in `ds`,
//! normalized so that `∫ωⁿ = (n+1)ⁿ` for the reference metric.

use crate::geometry::field::Jet;
use crate::geometry::PointData;
use crate::scalar::Real;
use std::ops::{Add, Mul, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Form<T> {
    /// Radial coefficient.
    pub r: T,
    /// Tangential coefficient (absent in complex dimension one).
    pub t: T,
}

impl<T: Real> Form<T> {
    pub fn new(r: T, t: T) -> Self {
        Self { r, t }
    }

    pub fn zero() -> Self {
        Self { r: T::zero(), t: T::zero() }
    }

    /// Kähler form of the metric at `p`.
    pub fn metric(p: &PointData<T>) -> Self {
        Self { r: p.psi, t: p.x }
    }

    /// Ricci form of the metric at `p`.
    pub fn ricci(p: &PointData<T>) -> Self {
        let (r, t) = p.ricci_form();
        Self { r, t }
    }

    /// `√−1∂∂̄f`.
    pub fn ddbar(j: &Jet<T>) -> Self {
        Self { r: j.dss, t: j.ds }
    }

    /// `√−1∂f∧∂̄f`.
    pub fn gradient(j: &Jet<T>) -> Self {
        Self { r: j.ds * j.ds, t: T::zero() }
    }
}

impl<T: Real> Add for Form<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { r: self.r + o.r, t: self.t + o.t }
    }
}

impl<T: Real> Sub for Form<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { r: self.r - o.r, t: self.t - o.t }
    }
}

impl<T: Real> Mul<T> for Form<T> {
    type Output = Self;
    fn mul(self, c: T) -> Self {
        Self { r: self.r * c, t: self.t * c }
    }
}

/// Density in `ds` of the wedge product of exactly `n` forms.
pub fn wedge<T: Real>(forms: &[Form<T>]) -> T {
    let mut acc = T::zero();
    for j in 0..forms.len() {
        let mut term = forms[j].r;
        for (i, f) in forms.iter().enumerate() {
            if i != j {
                term *= f.t;
            }
        }
        acc += term;
    }
    acc
}

/// Builds the list `a^{i}, b^{j}, …` for [`wedge`] from `(form, power)` pairs.
pub fn powers<T: Real>(parts: &[(Form<T>, usize)]) -> Vec<Form<T>> {
    let mut v = Vec::new();
    for (f, k) in parts {
        for _ in 0..*k {
            v.push(*f);
        }
    }
    v
}

/// Density of `α^{i}∧β^{j}∧…` with the powers summing to `n`.
pub fn wedge_powers<T: Real>(parts: &[(Form<T>, usize)]) -> T {
    wedge(&powers(parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_power_of_metric_is_volume_density() {
        let f = Form::new(0.3f64, 1.7);
        assert!((wedge_powers(&[(f, 2)]) - 2.0 * 0.3 * 1.7).abs() < 1e-15);
        assert!((wedge_powers(&[(f, 1)]) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn wedge_is_multilinear_and_symmetric() {
        let a = Form::new(0.4f64, -1.2);
        let b = Form::new(2.0f64, 0.5);
        let c = Form::new(-0.7f64, 3.0);
        let lhs = wedge(&[a + c * 2.0, b]);
        let rhs = wedge(&[a, b]) + 2.0 * wedge(&[c, b]);
        assert!((lhs - rhs).abs() < 1e-14);
        assert_eq!(wedge(&[a, b]), wedge(&[b, a]));
    }
}
