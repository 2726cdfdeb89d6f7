use crate::error::{Error, Result};
use num_traits::{One, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Largest dimension accepted by [`vandermonde_inverse`].
pub const MAX_VANDERMONDE_DIM: usize = 12;

/// Coefficients `c_{ij}` with `Σ_j c_{ij} k^j = δ_{ik}` for `i, j, k ∈ {1, …, n+1}`,
/// and the weighted column sums `υ_k = (n+1)/C(n+1,k) Σ_i c_{ik}`.
#[derive(Clone, Debug, PartialEq)]
pub struct VandermondeInverse<T> {
    pub n: usize,
    /// `c[i−1][j−1] = c_{ij}`.
    pub c: Vec<Vec<T>>,
    /// `upsilon[k−1] = υ_k`.
    pub upsilon: Vec<T>,
}

fn int<T: Zero + One + Add<Output = T> + Neg<Output = T>>(v: i64) -> T {
    let mut acc = T::zero();
    for _ in 0..v.unsigned_abs() {
        acc = acc + T::one();
    }
    if v < 0 {
        -acc
    } else {
        acc
    }
}

/// The matrix `W_{jk} = k^j`, `j, k ∈ {1, …, n+1}`.
pub fn vandermonde_matrix<T>(n: usize) -> Vec<Vec<T>>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T> + Neg<Output = T>,
{
    (1..=n + 1)
        .map(|j| (1..=n + 1).map(|k| (0..j).fold(T::one(), |acc, _| acc * int::<T>(k as i64))).collect())
        .collect()
}

/// Coefficients of the Lagrange-type polynomials
/// `f_i(x) = x Π_{k≠i}(x − k) / (i Π_{k≠i}(i − k))`, which vanish at 0 and
/// interpolate `δ_{ik}` at `k = 1, …, n+1`.
pub fn vandermonde_inverse<T>(n: usize) -> Result<VandermondeInverse<T>>
where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T> + Neg<Output = T>,
{
    if n > MAX_VANDERMONDE_DIM {
        return Err(Error::Numerical(format!("Vandermonde system of size {} is too ill-conditioned (limit {})", n + 1, MAX_VANDERMONDE_DIM + 1)));
    }
    let m = n + 1;
    let mut c = Vec::with_capacity(m);
    for i in 1..=m as i64 {
        // poly[d] is the coefficient of x^d.
        let mut poly: Vec<T> = vec![T::zero(), T::one()];
        let mut denom: T = int(i);
        for k in 1..=m as i64 {
            if k == i {
                continue;
            }
            let mut next = vec![T::zero(); poly.len() + 1];
            for (d, a) in poly.iter().enumerate() {
                next[d + 1] = next[d + 1].clone() + a.clone();
                next[d] = next[d].clone() - a.clone() * int::<T>(k);
            }
            poly = next;
            denom = denom * int::<T>(i - k);
        }
        c.push(poly[1..=m].iter().map(|a| a.clone() / denom.clone()).collect::<Vec<T>>());
    }
    let mut upsilon = Vec::with_capacity(m);
    for k in 1..=m {
        let col = c.iter().fold(T::zero(), |acc, row| acc + row[k - 1].clone());
        let binom = crate::scalar::binomial_u(m as i64, k as i64);
        upsilon.push(int::<T>(m as i64) * col / int::<T>(binom));
    }
    Ok(VandermondeInverse { n, c, upsilon })
}

/// `f_i(x) = Σ_j c_{ij} x^j`.
pub fn lagrange_value<T>(inv: &VandermondeInverse<T>, i: usize, x: T) -> T
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    let mut acc = T::zero();
    let mut pow = x.clone();
    for cij in &inv.c[i - 1] {
        acc = acc + cij.clone() * pow.clone();
        pow = pow * x.clone();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::{BigRational, Ratio};

    #[test]
    fn two_by_two_inverse() {
        let inv = vandermonde_inverse::<Ratio<i64>>(1).unwrap();
        assert_eq!(inv.c, vec![vec![Ratio::from_integer(2), Ratio::from_integer(-1)], vec![Ratio::new(-1, 2), Ratio::new(1, 2)]]);
    }

    #[test]
    fn exact_interpolation_property() {
        for n in 0..=MAX_VANDERMONDE_DIM {
            let inv = vandermonde_inverse::<BigRational>(n).unwrap();
            for i in 1..=n + 1 {
                for k in 1..=n + 1 {
                    let v = lagrange_value(&inv, i, BigRational::from_integer(BigInt::from(k)));
                    let expect = if i == k { BigRational::from_integer(BigInt::from(1)) } else { BigRational::from_integer(BigInt::from(0)) };
                    assert_eq!(v, expect);
                }
            }
        }
    }

    #[test]
    fn rejects_large_dimension() {
        assert!(vandermonde_inverse::<f64>(13).is_err());
    }
}
