//! Sampled symmetric Kähler metrics.

use crate::error::{Error, Result};
use crate::fd;
use crate::geometry::field::{Jet, ScalarField};
use crate::geometry::forms::{wedge_powers, Form};
use crate::geometry::{Manifold, MomentProfile, PointData, ReducedGrid};
use crate::quadrature::{gauss_legendre, whole_line};
use crate::scalar::{logistic, softplus, Real};

/// Order of the finite-difference stencils applied to sampled fields.
pub const FD_ORDER: usize = 8;

/// Chebyshev degree used for a grid of the given size.
pub fn default_degree(n_points: usize) -> usize {
    (n_points / 8).clamp(32, 96)
}

/// Gauss–Legendre rule in the moment coordinate evaluated on one metric.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentQuadrature<T> {
    pub points: Vec<PointData<T>>,
    /// Weights in `dx`.
    pub wx: Vec<T>,
}

impl<T: Real> MomentQuadrature<T> {
    pub fn new(profile: &MomentProfile<T>, m: usize) -> Result<Self> {
        let (xs, wx) = gauss_legendre(m, T::zero(), MomentProfile::<T>::length(profile.n));
        let points = xs.into_iter().map(|x| profile.point_at_x(x)).collect::<Result<Vec<_>>>()?;
        Ok(Self { points, wx })
    }

    /// Weight in `ds` of node `j`.
    pub fn wds(&self, j: usize) -> T {
        self.wx[j] / self.points[j].psi
    }

    /// `∫ f ωⁿ`.
    pub fn integrate(&self, f: impl Fn(&PointData<T>) -> T) -> T {
        let mut acc = T::zero();
        for (p, w) in self.points.iter().zip(&self.wx) {
            acc += *w * f(p) * p.nf() * p.x.powi(p.n as i32 - 1);
        }
        acc
    }

    /// `∫ D ds` for an `s`-density `D`.
    pub fn integrate_density(&self, f: impl Fn(&PointData<T>) -> T) -> T {
        let mut acc = T::zero();
        for (j, p) in self.points.iter().enumerate() {
            acc += self.wds(j) * f(p);
        }
        acc
    }
}

/// Symmetric Kähler metric `ω_φ = ω + √−1∂∂̄φ` sampled on a radial grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedMetricState<T> {
    pub grid: ReducedGrid<T>,
    /// Full potential `u = u_ref + φ` at the grid points.
    pub u: Vec<T>,
    /// Perturbation `φ` at the grid points.
    pub phi: Vec<T>,
    pub profile: MomentProfile<T>,
    /// Point data at the grid points.
    pub samples: Vec<PointData<T>>,
    pub quad: MomentQuadrature<T>,
    /// Additive constant in `h_{ω_φ} = −log(ω_φⁿ/ωⁿ) − φ + const`.
    pub h_constant: T,
}

/// Curvature quantities at every grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureField<T> {
    pub r1: Vec<T>,
    /// Tangential Ricci eigenvalue; empty in complex dimension one.
    pub r2: Vec<T>,
    pub scalar: Vec<T>,
    /// Radial-radial bisectional component (the Gauss curvature term on CP¹).
    pub bisec_rr: Vec<T>,
    /// Radial-tangential bisectional component; empty on CP¹.
    pub bisec_rt: Vec<T>,
    /// Tangential-tangential bisectional component; empty on CP¹.
    pub bisec_tt: Vec<T>,
    pub ricci_norm2: Vec<T>,
}

impl<T: Real> CurvatureField<T> {
    pub fn min_bisectional(&self) -> T {
        self.bisec_rr.iter().chain(&self.bisec_rt).chain(&self.bisec_tt).fold(T::infinity(), |m, v| m.min(*v))
    }

    pub fn scalar_range(&self) -> (T, T) {
        self.scalar.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
    }
}

fn reference_potential<T: Real>(n: usize, s: T) -> T {
    T::from_usize_lossy(n + 1) * softplus(s)
}

impl<T: Real> ReducedMetricState<T> {
    /// Number of moment-coordinate quadrature nodes for a profile degree.
    pub fn quadrature_size(degree: usize) -> usize {
        2 * degree + 32
    }

    /// The Kähler–Einstein reference `u_ref = (n+1) log(1 + eˢ)`.
    pub fn build_reference(manifold: Manifold, n_points: usize, half_width: T) -> Result<Self> {
        let grid = ReducedGrid::new(manifold, n_points, half_width)?;
        let profile = MomentProfile::reference(manifold.dim(), default_degree(n_points));
        Self::from_profile(grid, profile)
    }

    /// State of a moment profile, sampled on the grid.
    pub fn from_profile(grid: ReducedGrid<T>, profile: MomentProfile<T>) -> Result<Self> {
        if profile.n != grid.dim() {
            return Err(Error::GridMismatch(format!("profile of dimension {} on {}", profile.n, grid.manifold)));
        }
        profile.check_convex()?;
        let samples = grid.s.iter().map(|&s| profile.point_at_s(s)).collect::<Result<Vec<_>>>()?;
        let u = samples.iter().map(|p| p.u).collect();
        let phi = samples.iter().map(|p| p.phi).collect();
        Self::assemble(grid, u, phi, profile, samples)
    }

    fn assemble(grid: ReducedGrid<T>, u: Vec<T>, phi: Vec<T>, profile: MomentProfile<T>, samples: Vec<PointData<T>>) -> Result<Self> {
        let quad = MomentQuadrature::new(&profile, Self::quadrature_size(profile.degree()))?;
        let mut st = Self { grid, u, phi, profile, samples, quad, h_constant: T::zero() };
        st.h_constant = st.compute_h_constant();
        Ok(st)
    }

    /// State whose perturbation is given in closed form as `s ↦ (φ, φ′, φ″)`.
    pub fn from_potential_fn(grid: ReducedGrid<T>, f: impl Fn(T) -> (T, T, T)) -> Result<Self> {
        let n = grid.dim();
        let deg = default_degree(grid.n_points());
        for (i, &s) in grid.s.iter().enumerate() {
            let (_, p1, p2) = f(s);
            let np1 = T::from_usize_lossy(n + 1);
            let x = np1 * logistic(s) + p1;
            let psi = np1 * logistic(s) * logistic(-s) + p2;
            if !(psi > T::zero()) || !(x > T::zero()) {
                return Err(Error::Positivity { index: i, detail: format!("u″ = {psi}, u′ = {x} at s = {s}") });
            }
        }
        let profile = MomentProfile::from_potential_fn(n, deg, f)?;
        Self::from_profile(grid, profile)
    }

    /// State `u_ref + φ` from samples of `φ` on the reference grid.
    pub fn metric_from_potential(reference: &Self, phi: &[T]) -> Result<Self> {
        let grid = reference.grid.clone();
        if phi.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!("{} samples for a grid of {} points", phi.len(), grid.n_points())));
        }
        let n = grid.dim();
        let np1 = T::from_usize_lossy(n + 1);
        let d1 = fd::derivative(phi, grid.h, 1, FD_ORDER);
        let d2 = fd::derivative(phi, grid.h, 2, FD_ORDER);
        let mut x = Vec::with_capacity(phi.len());
        let mut xb = Vec::with_capacity(phi.len());
        for (i, &s) in grid.s.iter().enumerate() {
            let xi = np1 * logistic(s) + d1[i];
            let xbi = np1 * logistic(-s) - d1[i];
            let psi = np1 * logistic(s) * logistic(-s) + d2[i];
            if !(psi > T::zero()) {
                return Err(Error::Positivity { index: i, detail: format!("u″ = {psi} at s = {s}") });
            }
            if !(xi > T::zero()) || !(xbi > T::zero()) {
                return Err(Error::Positivity { index: i, detail: format!("u′ = {xi} outside (0, {np1}) at s = {s}") });
            }
            x.push(xi);
            xb.push(xbi);
        }
        let (profile, _) = MomentProfile::fit(n, default_degree(grid.n_points()), &grid.s, phi, &x, &xb)?;
        let samples = grid.s.iter().map(|&s| profile.point_at_s(s)).collect::<Result<Vec<_>>>()?;
        let u = grid.s.iter().zip(phi).map(|(&s, &p)| reference_potential(n, s) + p).collect();
        Self::assemble(grid, u, phi.to_vec(), profile, samples)
    }

    /// The same metric with `φ` shifted by a constant.
    pub fn shifted(&self, c: T) -> Result<Self> {
        Self::from_profile(self.grid.clone(), self.profile.shifted(c))
    }

    /// Pull-back by the dilation `z ↦ λz` with `a = 2 log λ`.
    pub fn dilated(&self, a: T) -> Result<Self> {
        Self::from_profile(self.grid.clone(), self.profile.dilated(a))
    }

    pub fn manifold(&self) -> Manifold {
        self.grid.manifold
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn n_points(&self) -> usize {
        self.grid.n_points()
    }

    /// Cohomological volume `(n+1)ⁿ`.
    pub fn nominal_volume(&self) -> T {
        T::lit(self.manifold().volume())
    }

    /// `u′` at the grid points.
    pub fn u1(&self) -> Vec<T> {
        self.samples.iter().map(|p| p.x).collect()
    }

    /// `u″` at the grid points.
    pub fn u2(&self) -> Vec<T> {
        self.samples.iter().map(|p| p.psi).collect()
    }

    /// Radial metric eigenvalue `u″`.
    pub fn lambda_rad(&self) -> Vec<T> {
        self.u2()
    }

    /// Tangential metric eigenvalue `u′`; empty on CP¹.
    pub fn lambda_tan(&self) -> Vec<T> {
        if self.dim() == 1 {
            Vec::new()
        } else {
            self.u1()
        }
    }

    /// Volume density `v` with `ω_φⁿ = v ds`.
    pub fn volume_density(&self) -> Vec<T> {
        self.samples.iter().map(|p| p.volume_density()).collect()
    }

    /// `∫ f ω_φⁿ` for a field sampled on the grid, with exponential tail continuation.
    pub fn integrate(&self, field: &[T]) -> Result<T> {
        if field.len() != self.n_points() {
            return Err(Error::GridMismatch(format!("field of {} samples on a grid of {} points", field.len(), self.n_points())));
        }
        let dens: Vec<T> = field.iter().zip(&self.samples).map(|(f, p)| *f * p.volume_density()).collect();
        Ok(whole_line(&dens, self.grid.h))
    }

    /// Sampled volume `∫ ω_φⁿ`.
    pub fn volume(&self) -> T {
        let ones = vec![T::one(); self.n_points()];
        self.integrate(&ones).expect("matching grid")
    }

    /// `∫ f ω_φⁿ` for a function of the point data, by Gauss quadrature in `x`.
    pub fn integrate_fn(&self, f: impl Fn(&PointData<T>) -> T) -> T {
        self.quad.integrate(f)
    }

    /// Volume average of a function of the point data.
    pub fn mean_fn(&self, f: impl Fn(&PointData<T>) -> T) -> T {
        self.integrate_fn(f) / self.integrate_fn(|_| T::one())
    }

    /// `∫ f ω_φⁿ` for an invariant field.
    pub fn integrate_field(&self, f: &dyn ScalarField<T>) -> T {
        self.integrate_fn(|p| f.jet(p).v)
    }

    /// Volume-averaged scalar curvature.
    pub fn average_scalar_curvature(&self) -> T {
        self.mean_fn(|p| p.scalar_curvature())
    }

    pub fn curvature(&self) -> CurvatureField<T> {
        let two_d = self.dim() == 2;
        let mut c = CurvatureField {
            r1: Vec::new(),
            r2: Vec::new(),
            scalar: Vec::new(),
            bisec_rr: Vec::new(),
            bisec_rt: Vec::new(),
            bisec_tt: Vec::new(),
            ricci_norm2: Vec::new(),
        };
        for p in &self.samples {
            c.r1.push(p.r1());
            c.scalar.push(p.scalar_curvature());
            c.ricci_norm2.push(p.ricci_norm2());
            let (a, b, cc) = p.bisectional();
            c.bisec_rr.push(a);
            if two_d {
                c.r2.push(p.r2());
                c.bisec_rt.push(b);
                c.bisec_tt.push(cc);
            }
        }
        c
    }

    fn compute_h_constant(&self) -> T {
        // c = −log((1/V)∫e^{−ρ−φ}ω_φⁿ), evaluated with a shifted exponent.
        let shift = self.quad.points.iter().fold(T::neg_infinity(), |m, p| m.max(-p.rho - p.phi));
        let v = self.integrate_fn(|_| T::one());
        let s = self.integrate_fn(|p| (-p.rho - p.phi - shift).exp());
        -((s / v).ln() + shift)
    }

    /// `h_{ω_φ}` at a point.
    pub fn h_at(&self, p: &PointData<T>) -> T {
        -p.rho - p.phi + self.h_constant
    }

    /// `s`-derivative of `h_{ω_φ}` at a point: `−ρ′ − φ′`.
    pub fn h_ds_at(&self, p: &PointData<T>) -> T {
        let n = p.n;
        let np1 = T::from_usize_lossy(n + 1);
        let nm1 = p.nf() - T::one();
        let xr = np1 * logistic(p.s);
        let xbr = np1 * logistic(-p.s);
        // Δ_ω of the moment map, i.e. d/ds log(ψ x^{n−1}), for the metric and the reference.
        let lap = p.psi_x + nm1 * p.q;
        let lap_ref = (xbr - xr) / np1 + nm1 * xbr / np1;
        -(lap - lap_ref) - (p.x - xr)
    }

    /// `h_{ω_φ}` at the grid points, normalized by `∫(e^h − 1)ω_φⁿ = 0`.
    pub fn h_potential(&self) -> Vec<T> {
        self.samples.iter().map(|p| self.h_at(p)).collect()
    }

    /// Complex Laplacian of a sampled field by finite differences in `s`.
    pub fn laplacian(&self, f: &[T]) -> Result<Vec<T>> {
        if f.len() != self.n_points() {
            return Err(Error::GridMismatch(format!("field of {} samples on a grid of {} points", f.len(), self.n_points())));
        }
        let d1 = fd::derivative(f, self.grid.h, 1, FD_ORDER);
        let d2 = fd::derivative(f, self.grid.h, 2, FD_ORDER);
        Ok(self.samples.iter().enumerate().map(|(i, p)| Jet::new(f[i], d1[i], d2[i]).laplacian(p)).collect())
    }

    /// Maximum of `|√−1∂∂̄h − Ric + ω_φ|` over the interior grid, using finite differences of `h`.
    pub fn h_equation_residual(&self) -> T {
        let h = self.h_potential();
        let d1 = fd::derivative(&h, self.grid.h, 1, FD_ORDER);
        let d2 = fd::derivative(&h, self.grid.h, 2, FD_ORDER);
        let mut worst = T::zero();
        for (i, p) in self.samples.iter().enumerate() {
            let ric = Form::ricci(p);
            let om = Form::metric(p);
            worst = worst.max((d2[i] - (ric.r - om.r)).abs());
            if p.n > 1 {
                worst = worst.max((d1[i] - (ric.t - om.t)).abs());
            }
        }
        worst
    }

    /// `∫ ω_φⁿ` through the wedge-product reduction; equals the quadrature volume.
    pub fn wedge_volume(&self) -> T {
        let n = self.dim();
        self.quad.integrate_density(|p| wedge_powers(&[(Form::metric(p), n)]))
    }
}

/// Point data of two metrics at a common radial coordinate.
#[derive(Clone, Copy, Debug)]
pub struct PairPoint<T> {
    pub base: PointData<T>,
    pub tgt: PointData<T>,
    /// Quadrature weight in `ds`.
    pub wds: T,
}

impl<T: Real> PairPoint<T> {
    /// Jet of `φ = u_tgt − u_base`.
    pub fn potential(&self) -> Jet<T> {
        Jet::new(self.tgt.u - self.base.u, self.tgt.x - self.base.x, self.tgt.psi - self.base.psi)
    }

    /// `log(ω_tgtⁿ/ω_baseⁿ)`.
    pub fn log_volume_ratio(&self) -> T {
        self.tgt.rho - self.base.rho
    }
}

/// Paired points at the quadrature nodes of `tgt`.
pub fn pair_points<T: Real>(base: &ReducedMetricState<T>, tgt: &ReducedMetricState<T>) -> Result<Vec<PairPoint<T>>> {
    base.grid.check_same(&tgt.grid)?;
    tgt.quad
        .points
        .iter()
        .enumerate()
        .map(|(j, p)| Ok(PairPoint { base: base.profile.point_at_s(p.s)?, tgt: *p, wds: tgt.quad.wds(j) }))
        .collect()
}

/// `∫ D ds` over paired points.
pub fn integrate_pairs<T: Real>(pairs: &[PairPoint<T>], f: impl Fn(&PairPoint<T>) -> T) -> T {
    pairs.iter().map(|pp| pp.wds * f(pp)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_volume_and_curvature() {
        for (m, v) in [(Manifold::CP1, 2.0), (Manifold::CP2, 9.0)] {
            let st = ReducedMetricState::<f64>::build_reference(m, 512, 12.0).unwrap();
            assert!((st.volume() - v).abs() < 1e-8, "{}", st.volume());
            assert!((st.integrate_fn(|_| 1.0) - v).abs() < 1e-12);
            assert!((st.wedge_volume() - v).abs() < 1e-12);
            let c = st.curvature();
            for r in c.scalar {
                assert!((r - m.dim() as f64).abs() < 1e-8);
            }
            assert!(st.h_constant.abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_potential_reproduces_closed_form() {
        let grid = ReducedGrid::new(Manifold::CP1, 512, 12.0f64).unwrap();
        let reference = ReducedMetricState::from_profile(grid.clone(), MomentProfile::reference(1, 64)).unwrap();
        let phi: Vec<f64> = grid.s.iter().map(|s| 0.1 * s.tanh()).collect();
        let a = ReducedMetricState::metric_from_potential(&reference, &phi).unwrap();
        let b = ReducedMetricState::from_potential_fn(grid, |s: f64| {
            let t = s.tanh();
            (0.1 * t, 0.1 * (1.0 - t * t), -0.2 * t * (1.0 - t * t))
        })
        .unwrap();
        for (p, q) in a.samples.iter().zip(&b.samples) {
            assert!((p.psi - q.psi).abs() < 1e-8);
            assert!((p.scalar_curvature() - q.scalar_curvature()).abs() < 1e-6);
        }
        assert!((a.volume() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn positivity_violation_reports_index() {
        let grid = ReducedGrid::new(Manifold::CP1, 128, 12.0f64).unwrap();
        let reference = ReducedMetricState::from_profile(grid.clone(), MomentProfile::reference(1, 24)).unwrap();
        let phi: Vec<f64> = grid.s.iter().map(|s| -2.0 * (-s * s).exp()).collect();
        match ReducedMetricState::metric_from_potential(&reference, &phi) {
            Err(Error::Positivity { index, .. }) => assert!(index > 50 && index < 64, "{index}"),
            other => panic!("{other:?}"),
        }
    }
}
