//! Finite-difference weights on uniform grids (Fornberg's algorithm) and
//! sampled derivatives with centered interior and one-sided boundary stencils.

use crate::scalar::Real;

/// Weights for the `m`-th derivative at `x0` from the given stencil points.
pub fn fornberg_weights<T: Real>(x0: T, xs: &[T], m: usize) -> Vec<T> {
    let n = xs.len();
    let mut c = vec![vec![T::zero(); m + 1]; n];
    let mut c1 = T::one();
    let mut c4 = xs[0] - x0;
    c[0][0] = T::one();
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = T::one();
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    let kf = T::from_usize_lossy(k);
                    c[i][k] = c1 * (kf * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                let kf = T::from_usize_lossy(k);
                c[j][k] = (c4 * c[j][k] - kf * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// `m`-th derivative of uniformly spaced samples with an `order`-accurate
/// centered stencil in the interior and one-sided stencils near the ends.
pub fn derivative<T: Real>(values: &[T], h: T, m: usize, order: usize) -> Vec<T> {
    let n = values.len();
    let half = (m + order - 1) / 2;
    let width = 2 * half + 1;
    let one_sided = m + order;
    assert!(n >= one_sided.max(width));
    let mut out = vec![T::zero(); n];
    let interior = {
        let pts: Vec<T> = (0..width).map(|k| T::from_i64(k as i64 - half as i64).unwrap()).collect();
        fornberg_weights(T::zero(), &pts, m)
    };
    let hm = h.powi(m as i32);
    for i in 0..n {
        let (start, len, w) = if i >= half && i + half < n {
            (i - half, width, None)
        } else {
            let start = if i < half { 0 } else { n - one_sided };
            let pts: Vec<T> = (0..one_sided).map(|k| T::from_usize_lossy(start + k)).collect();
            (start, one_sided, Some(fornberg_weights(T::from_usize_lossy(i), &pts, m)))
        };
        let weights = w.as_deref().unwrap_or(&interior);
        let mut acc = T::zero();
        for k in 0..len {
            acc += weights[k] * values[start + k];
        }
        out[i] = acc / hm;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_stencils() {
        let w = fornberg_weights(0.0f64, &[-1.0, 0.0, 1.0], 2);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] + 2.0).abs() < 1e-15 && (w[2] - 1.0).abs() < 1e-15);
        let w = fornberg_weights(0.0f64, &[-2.0, -1.0, 0.0, 1.0, 2.0], 1);
        let expect = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_of_sine() {
        let n = 200;
        let h = 0.05f64;
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        let d = derivative(&v, h, 2, 6);
        for (i, dv) in d.iter().enumerate() {
            assert!((dv + (i as f64 * h).sin()).abs() < 1e-7, "i={i}");
        }
    }
}
