use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// Curvature tensor of a Kähler metric at one point, as the components
/// `R(uᵢ, ū_j, u_k, ū_l)` in a unitary frame.
///
/// Complex storage is used because the components are complex in a general
/// frame; the Kähler symmetries `R_{ij̄kl̄} = R_{kj̄il̄} = R_{il̄kj̄}` and
/// `conj(R_{ij̄kl̄}) = R_{jīlk̄}` are imposed on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCurvatureTensor<T> {
    pub n: usize,
    data: Vec<Complex<T>>,
}

/// Relative position of the complex lines through two real vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaneRelation {
    Perpendicular,
    Identical,
}

const PLANE_TOL: f64 = 1e-10;

impl<T: Real> PointCurvatureTensor<T> {
    fn idx(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * n + j) * n + k) * n + l
    }

    /// Tensor obtained by averaging `f` over the Kähler symmetry group.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> Complex<T>) -> Self {
        let mut raw = vec![Complex::new(T::zero(), T::zero()); n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        raw[Self::idx(n, i, j, k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        let mut data = raw.clone();
        let eighth = T::lit(0.125);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let g = |a, b, c, d| raw[Self::idx(n, a, b, c, d)];
                        let s = g(i, j, k, l) + g(k, j, i, l) + g(i, l, k, j) + g(k, l, i, j);
                        let t = g(j, i, l, k) + g(l, i, j, k) + g(j, k, l, i) + g(l, k, j, i);
                        data[Self::idx(n, i, j, k, l)] = (s + t.conj()) * eighth;
                    }
                }
            }
        }
        Self { n, data }
    }

    /// Sum of rank-one terms `c_m a_m ⊗ ā_m ⊗ a_m ⊗ ā_m`.
    pub fn from_rank_one_terms(n: usize, terms: &[(T, Vec<Complex<T>>)]) -> Self {
        Self::from_fn(n, |i, j, k, l| {
            terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (c, a)| acc + a[i] * a[j].conj() * a[k] * a[l].conj() * *c)
        })
    }

    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> Complex<T> {
        self.data[Self::idx(self.n, i, j, k, l)]
    }

    /// `R(a, b̄, c, d̄)` for (1,0)-vectors given by their frame components.
    pub fn eval(&self, a: &[Complex<T>], b: &[Complex<T>], c: &[Complex<T>], d: &[Complex<T>]) -> Complex<T> {
        let n = self.n;
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for j in 0..n {
                let ab = a[i] * b[j].conj();
                for k in 0..n {
                    for l in 0..n {
                        acc = acc + self.data[Self::idx(n, i, j, k, l)] * ab * c[k] * d[l].conj();
                    }
                }
            }
        }
        acc
    }

    /// Bisectional curvature `R(a, ā, b, b̄)`.
    pub fn bisectional(&self, a: &[Complex<T>], b: &[Complex<T>]) -> T {
        self.eval(a, a, b, b).re
    }

    /// Largest deviation from the Kähler symmetries.
    pub fn symmetry_defect(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.component(i, j, k, l);
                        worst = worst.max((r - self.component(k, j, i, l)).norm());
                        worst = worst.max((r - self.component(i, l, k, j)).norm());
                        worst = worst.max((r.conj() - self.component(j, i, l, k)).norm());
                    }
                }
            }
        }
        worst
    }

    /// Scalar `Σ_{i,k} R_{iīkk̄}`.
    pub fn scalar(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            for k in 0..self.n {
                acc += self.component(i, i, k, k).re;
            }
        }
        acc
    }

    /// Constant holomorphic sectional curvature part `S/(n(n+1)) (δδ + δδ)`.
    pub fn constant_curvature_projection(&self) -> Self {
        let nf = T::from_usize_lossy(self.n);
        let c = self.scalar() / (nf * (nf + T::one()));
        constant_tensor(self.n, c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect() }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Largest bisectional value over pairs of frame vectors, used to gauge bounds.
    pub fn max_frame_bisectional(&self) -> T {
        let mut worst = T::neg_infinity();
        for i in 0..self.n {
            for k in 0..self.n {
                worst = worst.max(self.component(i, i, k, k).re);
            }
        }
        worst
    }
}

fn constant_tensor<T: Real>(n: usize, c: T) -> PointCurvatureTensor<T> {
    PointCurvatureTensor::from_fn(n, |i, j, k, l| {
        let d = |a: usize, b: usize| if a == b { T::one() } else { T::zero() };
        Complex::new(c * (d(i, j) * d(k, l) + d(i, l) * d(k, j)), T::zero())
    })
}

/// Tensor with `R_{ij̄kl̄} = c(δ_{ij}δ_{kl} + δ_{il}δ_{kj})`, where the holomorphic
/// sectional value `R(u,ū,u,ū)` of a unit vector equals `2c`.
pub fn constant_curvature_model<T: Real>(n: usize, holomorphic_sectional_value: T) -> PointCurvatureTensor<T> {
    constant_tensor(n, holomorphic_sectional_value * T::lit(0.5))
}

fn real_inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + *x * y.conj())
}

/// Riemannian curvature `R(X, Y, Z, W)` of real tangent vectors, written as
/// complex coordinate vectors (`J` acts by multiplication by `i`), computed by
/// expanding each vector into its (1,0) and (0,1) parts.
pub fn real_curvature<T: Real>(r: &PointCurvatureTensor<T>, x: &[Complex<T>], y: &[Complex<T>], z: &[Complex<T>], w: &[Complex<T>]) -> T {
    let s = T::one() / T::lit(2.0).sqrt();
    let p = |v: &[Complex<T>]| v.iter().map(|c| *c * s).collect::<Vec<_>>();
    let (x, y, z, w) = (p(x), p(y), p(z), p(w));
    let v = r.eval(&x, &y, &z, &w) - r.eval(&x, &y, &w, &z) - r.eval(&y, &x, &z, &w) + r.eval(&y, &x, &w, &z);
    v.re
}

/// Classifies two orthonormal real vectors by the position of their complex lines.
pub fn plane_relation<T: Real>(w1: &[Complex<T>], w2: &[Complex<T>]) -> Result<PlaneRelation> {
    let tol = T::lit(PLANE_TOL);
    let ip = real_inner(w1, w2);
    let n1 = real_inner(w1, w1).re;
    let n2 = real_inner(w2, w2).re;
    if (n1 - T::one()).abs() > tol || (n2 - T::one()).abs() > tol {
        return Err(Error::Geometric(format!("vectors must be unit length, got |w₁|² = {n1}, |w₂|² = {n2}")));
    }
    if ip.re.abs() > tol {
        return Err(Error::Geometric(format!("vectors are not perpendicular: ⟨w₁, w₂⟩ = {}", ip.re)));
    }
    // ⟨w₂, Jw₁⟩ equals the imaginary part of the Hermitian product.
    let c = ip.im.abs();
    if c < tol {
        Ok(PlaneRelation::Perpendicular)
    } else if (c - T::one()).abs() < tol {
        Ok(PlaneRelation::Identical)
    } else {
        Err(Error::Geometric(format!("complex lines are neither perpendicular nor identical: |⟨w₂, Jw₁⟩| = {c}")))
    }
}

/// Sectional curvature of the real plane spanned by `w₁, w₂` from bisectional
/// values: `K = ¼(R(A,Ā,A,Ā) − 2R(B,B̄,A,Ā) + R(B,B̄,B,B̄))` with
/// `A, B = (u₁ ± u₂)/√2`, `u₁ = √2·w₁^{1,0}` and `u₂ = √2·(−Jw₂)^{1,0}`.
pub fn sectional_from_bisectional<T: Real>(r: &PointCurvatureTensor<T>, w1: &[Complex<T>], w2: &[Complex<T>]) -> Result<T> {
    if w1.len() != r.n || w2.len() != r.n {
        return Err(Error::Geometric(format!("vectors must have {} complex components", r.n)));
    }
    plane_relation(w1, w2)?;
    let s = T::one() / T::lit(2.0).sqrt();
    let minus_i = Complex::new(T::zero(), -T::one());
    let u1: Vec<Complex<T>> = w1.to_vec();
    let u2: Vec<Complex<T>> = w2.iter().map(|v| *v * minus_i).collect();
    let a: Vec<Complex<T>> = u1.iter().zip(&u2).map(|(p, q)| (*p + *q) * s).collect();
    let b: Vec<Complex<T>> = u1.iter().zip(&u2).map(|(p, q)| (*p - *q) * s).collect();
    let quarter = T::lit(0.25);
    Ok(quarter * (r.bisectional(&a, &a) - T::lit(2.0) * r.bisectional(&b, &a) + r.bisectional(&b, &b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn model_values() {
        let m = constant_curvature_model(2, 2.0f64);
        assert!((m.component(0, 0, 0, 0).re - 2.0).abs() < 1e-15);
        assert!((m.component(0, 0, 1, 1).re - 1.0).abs() < 1e-15);
        assert!(m.sub(&m.constant_curvature_projection()).max_abs() < 1e-15);
    }

    #[test]
    fn model_sectional_values() {
        let m = constant_curvature_model(2, 2.0f64);
        let w1 = [c(1.0, 0.0), c(0.0, 0.0)];
        let perp = [c(0.0, 0.0), c(1.0, 0.0)];
        let same = [c(0.0, 1.0), c(0.0, 0.0)];
        assert!((sectional_from_bisectional(&m, &w1, &perp).unwrap() - 0.5).abs() < 1e-12);
        assert!((sectional_from_bisectional(&m, &w1, &same).unwrap() - 2.0).abs() < 1e-12);
        assert!((real_curvature(&m, &w1, &perp, &perp, &w1) - 0.5).abs() < 1e-12);
        assert!((real_curvature(&m, &w1, &same, &same, &w1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_intermediate_planes() {
        let m = constant_curvature_model(2, 2.0f64);
        let w1 = [c(1.0, 0.0), c(0.0, 0.0)];
        let t = 0.3f64;
        let w2 = [c(0.0, t.cos()), c(t.sin(), 0.0)];
        assert!(matches!(sectional_from_bisectional(&m, &w1, &w2), Err(Error::Geometric(_))));
    }
}
