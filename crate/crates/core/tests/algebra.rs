use krflow::algebra::{
    constant_curvature_model, expansion_product, expansion_sum, lagrange_value, poly_identity_lhs, real_curvature,
    sectional_from_bisectional, sigma_k, vandermonde_inverse, vandermonde_matrix, PointCurvatureTensor, RicciSpectrum,
};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

type C = Complex<f64>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `σ_k` as the sum over all k-subsets of the product of their entries.
fn sigma_by_subsets(r: &[BigRational]) -> Vec<BigRational> {
    let n = r.len();
    let mut out = vec![BigRational::zero(); n + 1];
    for mask in 0u32..(1 << n) {
        let prod = (0..n).filter(|i| mask >> i & 1 == 1).fold(BigRational::one(), |a, i| a * &r[i]);
        out[mask.count_ones() as usize] += prod;
    }
    out
}

/// Exact inverse by Gauss–Jordan elimination.
fn rational_inverse(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().cloned().chain((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() })).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero()).expect("invertible");
        a.swap(col, p);
        let piv = a[col][col].clone();
        a[col].iter_mut().for_each(|v| *v = &*v / &piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                a[r].iter_mut().zip(&pivot_row).for_each(|(v, w)| *v = &*v - &f * w);
            }
        }
    }
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}

fn normalize(v: Vec<C>) -> Vec<C> {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / norm).collect()
}

/// Real inner product of vectors in `Cⁿ = R²ⁿ`.
fn real_dot(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum()
}

/// Orthonormal real pair from two raw vectors by Gram–Schmidt in `R²ⁿ`.
fn real_orthonormal(x: Vec<C>, y: Vec<C>) -> Option<(Vec<C>, Vec<C>)> {
    let x = normalize(x);
    let p = real_dot(&y, &x);
    let y: Vec<C> = y.iter().zip(&x).map(|(b, a)| b - a * p).collect();
    let ny = real_dot(&y, &y).sqrt();
    (ny > 1e-3).then(|| (x, y.into_iter().map(|c| c / ny).collect()))
}

fn cvec(n: usize) -> impl Strategy<Value = Vec<C>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C::new(a, b)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sigma_matches_subset_sums(nums in prop::collection::vec(-40i64..40, 1..=7), den in 1i64..9) {
        let r: Vec<BigRational> = nums.iter().map(|&v| rat(v, den)).collect();
        prop_assert_eq!(sigma_k(&RicciSpectrum(r.clone())), sigma_by_subsets(&r));
    }

    #[test]
    fn sigma_expansion_is_determinant(r in prop::collection::vec(-3.0..3.0f64, 1..=6), t in -2.0..2.0f64) {
        let spec = RicciSpectrum(r.clone());
        let scale = r.iter().fold(1.0, |a, v| a * (1.0 + (t * v).abs()));
        prop_assert!((expansion_sum(&sigma_k(&spec), t) - expansion_product(&spec, t)).abs() <= 1e-12 * scale);
    }

    #[test]
    fn polynomial_identity_exact(xn in -60i64..60, yn in -60i64..60, den in 1i64..7, k in 0u32..=10) {
        let (x, y) = (rat(xn, den), rat(yn, den));
        let want = rat(k as i64 + 1, 1) * (0..k).fold(BigRational::one(), |a, _| a * &x);
        prop_assert_eq!(poly_identity_lhs(x, y, k), want);
    }

    #[test]
    fn polynomial_identity_float(x in -10.0..10.0f64, y in -10.0..10.0f64, k in 1u32..=10) {
        let scale = (k as f64 + 1.0).powi(2) * x.abs().max(y.abs()).max(1.0).powi(k as i32);
        prop_assert!((poly_identity_lhs(x, y, k) - (k + 1) as f64 * x.powi(k as i32)).abs() <= 1e-10 * scale);
    }

    #[test]
    fn polarization(n in 1usize..=3, raw in cvec(81), x in cvec(3), v in cvec(3)) {
        let r = PointCurvatureTensor::from_fn(n, |i, j, k, l| raw[((i * n + j) * n + k) * n + l]);
        let x = normalize(x[..n].to_vec());
        // y = Jx when n = 1, otherwise y is Hermitian-orthogonal to x.
        let y: Vec<C> = if n == 1 {
            x.iter().map(|c| c * C::i()).collect()
        } else {
            let p: C = v[..n].iter().zip(&x).map(|(a, b)| a * b.conj()).sum();
            let w: Vec<C> = v[..n].iter().zip(&x).map(|(a, b)| a - b * p).collect();
            prop_assume!(w.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-4);
            normalize(w)
        };
        let jy: Vec<C> = y.iter().map(|c| c * C::i()).collect();
        let real_side = if n == 1 {
            real_curvature(&r, &x, &y, &y, &x)
        } else {
            real_curvature(&r, &x, &y, &y, &x) + real_curvature(&r, &x, &jy, &jy, &x)
        };
        prop_assert!((r.bisectional(&x, &y) - real_side).abs() < 1e-10);
    }

    #[test]
    fn model_sectional_curvature_closed_form(n in 1usize..=3, h in 0.1..4.0f64, x in cvec(3), y in cvec(3)) {
        let Some((x, y)) = real_orthonormal(x[..n].to_vec(), y[..n].to_vec()) else { return Ok(()) };
        let m = constant_curvature_model(n, h);
        let jy: Vec<C> = y.iter().map(|c| c * C::i()).collect();
        let cos = real_dot(&x, &jy);
        prop_assert!((real_curvature(&m, &x, &y, &y, &x) - h / 4.0 * (1.0 + 3.0 * cos * cos)).abs() < 1e-12);
    }
}

#[test]
fn sigma_closed_examples() {
    let e = sigma_k(&RicciSpectrum(vec![1.0, 1.0]));
    assert_eq!(e, vec![1.0, 2.0, 1.0]);
    let e3 = sigma_k(&RicciSpectrum(vec![rat(1, 2), rat(-2, 3), rat(3, 1)]));
    assert_eq!(e3, vec![rat(1, 1), rat(17, 6), rat(-5, 6), rat(-1, 1)]);
}

#[test]
fn polynomial_identity_examples() {
    assert_eq!(poly_identity_lhs(3.0, 3.0, 2), 27.0);
    assert_eq!(poly_identity_lhs(2.0, 1.0, 2), 12.0);
}

#[test]
fn vandermonde_inverse_matches_exact_elimination() {
    for n in 1..=6 {
        let exact = rational_inverse(&vandermonde_matrix::<BigRational>(n));
        let ours = vandermonde_inverse::<BigRational>(n).unwrap();
        assert_eq!(ours.c, exact, "n = {n}");
        let float = vandermonde_inverse::<f64>(n).unwrap();
        for i in 1..=n + 1 {
            for k in 1..=n + 1 {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((lagrange_value(&float, i, k as f64) - want).abs() < 1e-10);
            }
            assert!(lagrange_value(&float, i, 0.0).abs() < 1e-14);
        }
    }
    assert!(vandermonde_inverse::<f64>(13).is_err());
}

#[test]
fn constant_curvature_planes_planes() {
    let m = constant_curvature_model(2, 2.0);
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let perp = sectional_from_bisectional(&m, &[one, zero], &[zero, one]).unwrap();
    let same = sectional_from_bisectional(&m, &[one, zero], &[C::i(), zero]).unwrap();
    assert!((perp - 0.5).abs() < 1e-12, "{perp}");
    assert!((same - 2.0).abs() < 1e-12, "{same}");
}
