//! Chebyshev interpolation on an interval: node sets, coefficient transforms,
//! differentiation and evaluation.

use crate::linalg::Mat;
use crate::scalar::Real;

/// First-kind Chebyshev nodes (roots of `T_{m}`) mapped to `[a, b]`, ascending.
pub fn roots<T: Real>(m: usize, a: T, b: T) -> Vec<T> {
    let half = T::lit(0.5);
    (0..m)
        .map(|j| {
            let k = m - 1 - j;
            let theta = T::PI() * (T::from_usize_lossy(k) + half) / T::from_usize_lossy(m);
            a + (b - a) * half * (T::one() + theta.cos())
        })
        .collect()
}

/// Chebyshev series `Σ c_k T_k(ξ)` with `ξ = (2x − a − b)/(b − a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebSeries<T> {
    pub a: T,
    pub b: T,
    pub coeffs: Vec<T>,
}

impl<T: Real> ChebSeries<T> {
    /// Interpolant through values at [`roots`] (same ordering).
    pub fn from_root_values(values: &[T], a: T, b: T) -> Self {
        let m = values.len();
        let mf = T::from_usize_lossy(m);
        let half = T::lit(0.5);
        let mut coeffs = vec![T::zero(); m];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (j, v) in values.iter().enumerate() {
                let idx = m - 1 - j;
                let theta = T::PI() * (T::from_usize_lossy(idx) + half) / mf;
                acc += *v * (T::from_usize_lossy(k) * theta).cos();
            }
            *c = acc * T::lit(2.0) / mf;
        }
        coeffs[0] = coeffs[0] * half;
        Self { a, b, coeffs }
    }

    pub fn zero(m: usize, a: T, b: T) -> Self {
        Self { a, b, coeffs: vec![T::zero(); m] }
    }

    fn xi(&self, x: T) -> T {
        (T::lit(2.0) * x - self.a - self.b) / (self.b - self.a)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: T) -> T {
        let xi = self.xi(x);
        let two_xi = xi + xi;
        let mut b1 = T::zero();
        let mut b2 = T::zero();
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = *c + two_xi * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs.first().copied().unwrap_or_else(T::zero) + xi * b1 - b2
    }

    /// Series of the x-derivative.
    pub fn derivative(&self) -> Self {
        let m = self.coeffs.len();
        let mut d = vec![T::zero(); m.max(1)];
        if m >= 2 {
            let scale = T::lit(2.0) / (self.b - self.a);
            let mut next = T::zero();
            let mut next2 = T::zero();
            for k in (1..m).rev() {
                let val = next2 + T::lit(2.0) * T::from_usize_lossy(k) * self.coeffs[k];
                d[k - 1] = val;
                next2 = next;
                next = val;
            }
            d[0] = d[0] * T::lit(0.5);
            for v in d.iter_mut() {
                *v *= scale;
            }
        }
        Self { a: self.a, b: self.b, coeffs: d }
    }

    /// Integral over `[a, b]` of the series.
    pub fn integral(&self) -> T {
        let half_len = (self.b - self.a) * T::lit(0.5);
        let mut acc = T::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k % 2 == 0 {
                let kf = T::from_usize_lossy(k);
                acc += *c * T::lit(2.0) / (T::one() - kf * kf);
            }
        }
        acc * half_len
    }

    /// Values at the interpolation roots.
    pub fn root_values(&self) -> Vec<T> {
        roots(self.coeffs.len(), self.a, self.b).into_iter().map(|x| self.eval(x)).collect()
    }
}

/// Differentiation matrix acting on values at [`roots`]: `(D v)_i ≈ v'(x_i)`.
pub fn diff_matrix<T: Real>(m: usize, a: T, b: T) -> Mat<T> {
    let nodes = roots(m, a, b);
    let mut d = Mat::zeros(m, m);
    let mut e = vec![T::zero(); m];
    for j in 0..m {
        e.iter_mut().for_each(|v| *v = T::zero());
        e[j] = T::one();
        let s = ChebSeries::from_root_values(&e, a, b).derivative();
        for (i, x) in nodes.iter().enumerate() {
            d[(i, j)] = s.eval(*x);
        }
    }
    d
}
