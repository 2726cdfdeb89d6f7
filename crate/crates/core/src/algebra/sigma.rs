use num_traits::{One, Zero};
use std::ops::{Add, Mul, Sub};

/// Eigenvalues `r₁, …, rₙ` of the Ricci endomorphism.
#[derive(Clone, Debug, PartialEq)]
pub struct RicciSpectrum<T>(pub Vec<T>);

/// Elementary symmetric polynomials `(σ₀, …, σₙ)` of the spectrum.
///
/// Generic over any commutative ring, so exact rational arithmetic can be used.
pub fn sigma_k<T>(spectrum: &RicciSpectrum<T>) -> Vec<T>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    let n = spectrum.0.len();
    let mut e = vec![T::zero(); n + 1];
    e[0] = T::one();
    for (m, r) in spectrum.0.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] = e[k].clone() + e[k - 1].clone() * r.clone();
        }
    }
    e
}

/// `Σ_k σ_k t^k`.
pub fn expansion_sum<T>(sigma: &[T], t: T) -> T
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    sigma.iter().rev().fold(T::zero(), |acc, s| acc * t.clone() + s.clone())
}

/// `Π_i (1 + t rᵢ)`, the determinant of `I + t·diag(r)`.
pub fn expansion_product<T>(spectrum: &RicciSpectrum<T>, t: T) -> T
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    spectrum.0.iter().fold(T::one(), |acc, r| acc * (T::one() + t.clone() * r.clone()))
}

/// `Σ_{i=0}^k x^i y^{k−i} + (x − y) Σ_{i=0}^k i x^{i−1} y^{k−i}`, which equals `(k+1)xᵏ`.
pub fn poly_identity_lhs<T>(x: T, y: T, k: u32) -> T
where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let pow = |b: &T, e: u32| (0..e).fold(T::one(), |acc, _| acc * b.clone());
    let mut first = T::zero();
    let mut second = T::zero();
    let mut i_t = T::zero();
    for i in 0..=k {
        let yk = pow(&y, k - i);
        first = first + pow(&x, i) * yk.clone();
        if i > 0 {
            second = second + i_t.clone() * pow(&x, i - 1) * yk;
        }
        i_t = i_t + T::one();
    }
    first + (x - y) * second
}
