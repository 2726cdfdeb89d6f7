//! Closed-form invariant perturbations used as initial data and test states.
//!
//! Perturbations are polynomials in `y = 2σ(s) − 1`, with `σ` the logistic
//! function. They are real-analytic functions of the reference moment
//! coordinate, hence smooth on the whole manifold.

use crate::geometry::ScalarField;
use crate::geometry::{Jet, PointData};
use crate::scalar::{logistic, Real};

/// `φ(s) = p(2σ(s) − 1)` for a polynomial `p` given by monomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticPolynomial<T> {
    pub coeffs: Vec<T>,
}

impl<T: Real> LogisticPolynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    /// `amplitude · P_l(2σ − 1)`, a Legendre polynomial in the reference moment coordinate.
    pub fn legendre(amplitude: T, l: usize) -> Self {
        // Monomial coefficients of P_l by the three-term recurrence.
        let mut p0 = vec![T::one()];
        let mut p1 = vec![T::zero(), T::one()];
        if l == 0 {
            return Self::new(vec![amplitude]);
        }
        for k in 1..l {
            let kf = T::from_usize_lossy(k);
            let mut next = vec![T::zero(); k + 2];
            for (d, c) in p1.iter().enumerate() {
                next[d + 1] += (kf + kf + T::one()) * *c / (kf + T::one());
            }
            for (d, c) in p0.iter().enumerate() {
                next[d] -= kf * *c / (kf + T::one());
            }
            p0 = p1;
            p1 = next;
        }
        Self::new(p1.into_iter().map(|c| c * amplitude).collect())
    }

    fn poly(&self, y: T) -> (T, T, T) {
        let mut v = T::zero();
        let mut d1 = T::zero();
        let mut d2 = T::zero();
        for c in self.coeffs.iter().rev() {
            d2 = d2 * y + d1 + d1;
            d1 = d1 * y + v;
            v = v * y + *c;
        }
        (v, d1, d2)
    }

    /// `(φ, φ′, φ″)` at radial coordinate `s`.
    pub fn eval(&self, s: T) -> (T, T, T) {
        let sg = logistic(s);
        let sc = logistic(-s);
        let y = sg - sc;
        let y1 = T::lit(2.0) * sg * sc;
        let y2 = y1 * (sc - sg);
        let (p, p1, p2) = self.poly(y);
        (p, p1 * y1, p2 * y1 * y1 + p1 * y2)
    }

    pub fn closure(&self) -> impl Fn(T) -> (T, T, T) + '_ {
        move |s| self.eval(s)
    }

    pub fn scaled(&self, c: T) -> Self {
        Self::new(self.coeffs.iter().map(|a| *a * c).collect())
    }

    pub fn plus(&self, other: &Self) -> Self {
        let m = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &Vec<T>, i: usize| v.get(i).copied().unwrap_or_else(T::zero);
        Self::new((0..m).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }
}

impl<T: Real> ScalarField<T> for LogisticPolynomial<T> {
    fn jet(&self, p: &PointData<T>) -> Jet<T> {
        let (v, ds, dss) = self.eval(p.s);
        Jet::new(v, ds, dss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_coefficients() {
        let p = LogisticPolynomial::<f64>::legendre(1.0, 3);
        let expect = [0.0, -1.5, 0.0, 2.5];
        for (a, b) in p.coeffs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = LogisticPolynomial::new(vec![0.1, -0.3, 0.2, 0.05]);
        let h = 1e-5;
        for s in [-3.0f64, 0.2, 1.7] {
            let (_, d1, d2) = p.eval(s);
            let fd1 = (p.eval(s + h).0 - p.eval(s - h).0) / (2.0 * h);
            let fd2 = (p.eval(s + h).1 - p.eval(s - h).1) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-9 && (d2 - fd2).abs() < 1e-9);
        }
    }
}
