//! Quadrature rules: Gauss–Legendre and the whole-line trapezoid rule with
//! exponential tail extrapolation used for integrals over the radial coordinate.

use crate::scalar::Real;

/// Gauss–Legendre nodes and weights on `[a, b]`, ascending.
pub fn gauss_legendre<T: Real>(m: usize, a: T, b: T) -> (Vec<T>, Vec<T>) {
    let mut xs = vec![T::zero(); m];
    let mut ws = vec![T::zero(); m];
    let mf = T::from_usize_lossy(m);
    let half = T::lit(0.5);
    for i in 0..m.div_ceil(2) {
        let mut z = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (mf + half)).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let mut p0 = T::one();
            let mut p1 = z;
            for k in 2..=m {
                let kf = T::from_usize_lossy(k);
                let p2 = ((T::lit(2.0) * kf - T::one()) * z * p1 - (kf - T::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { z } else { p1 };
            let pm1 = if m == 1 { T::one() } else { p0 };
            dp = mf * (z * pm - pm1) / (z * z - T::one());
            let dz = pm / dp;
            z -= dz;
            if dz.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - z * z) * dp * dp);
        xs[i] = -z;
        xs[m - 1 - i] = z;
        ws[i] = w;
        ws[m - 1 - i] = w;
    }
    let mid = (a + b) * half;
    let hl = (b - a) * half;
    (xs.into_iter().map(|x| mid + hl * x).collect(), ws.into_iter().map(|w| w * hl).collect())
}

/// Tail contribution beyond the last sample of a sequence decaying geometrically
/// away from the grid: estimates the decay from the last two samples and sums
/// the continued geometric series on the grid spacing `h`.
fn geometric_tail<T: Real>(last: T, prev: T, h: T) -> T {
    if last == T::zero() {
        return T::zero();
    }
    let ratio = last / prev;
    if prev == T::zero() || !(ratio > T::zero() && ratio < T::one()) {
        // No geometric decay detected; fall back to the trapezoid end correction.
        return T::zero();
    }
    h * last * ratio / (T::one() - ratio)
}

/// Integral over the whole real line of a function sampled on a uniform grid
/// whose values decay exponentially beyond both ends.
///
/// The sum uses unit weights at every sample (the infinite trapezoid rule) and
/// continues the samples geometrically past both ends.
pub fn whole_line<T: Real>(samples: &[T], h: T) -> T {
    let n = samples.len();
    assert!(n >= 3);
    let interior: T = samples.iter().copied().sum::<T>() * h;
    let left = geometric_tail(samples[0], samples[1], h);
    let right = geometric_tail(samples[n - 1], samples[n - 2], h);
    interior + left + right
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6, 0.0f64, 2.0);
        let integ: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(11)).sum();
        assert!((integ - 2f64.powi(12) / 12.0).abs() < 1e-11);
        let sum: f64 = w.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn whole_line_logistic_density() {
        let l = 12.0f64;
        let n = 512;
        let h = 2.0 * l / (n as f64 - 1.0);
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let s = -l + h * i as f64;
                let sg = 1.0 / (1.0 + (-s).exp());
                2.0 * sg * (1.0 - sg)
            })
            .collect();
        assert!((whole_line(&samples, h) - 2.0).abs() < 1e-9);
    }
}
