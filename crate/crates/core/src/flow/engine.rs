//! Time stepping of the flow on the Legendre-dual profile.
//!
//! At fixed moment coordinate the potential flow `φ̇ = log(ω_φⁿ/ωⁿ) + φ`
//! becomes `G_t = log(1 + a g″) − (x − n) g′ + g` for the dual `G = G_ref + g`,
//! and `φ̇ = −G_t`. Node values `v` of `g` and its additive constant `K` are
//! advanced separately: `v_t = F(v) − F(v)₀` and `K_t = K + F(v)₀`, where
//! `F(v) = log(1 + a D₂v) − (x − n) D₁v + v`. The geometry depends on `v` only.

use crate::chebyshev::{self, ChebSeries};
use crate::error::{Error, Result};
use crate::geometry::forms::{wedge_powers, Form};
use crate::geometry::{MomentProfile, PointData, ReducedGrid, ReducedMetricState};
use crate::linalg::{spectral_radius_estimate, Lu, Mat};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Time integrator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrator {
    /// Classical fourth-order Runge–Kutta with a stability-limited step.
    Rk4,
    /// Linearly implicit two-stage Rosenbrock scheme (L-stable, second order).
    SemiImplicit,
}

/// Node operators of the profile flow at a fixed Chebyshev degree.
#[derive(Clone, Debug)]
pub struct Dynamics<T> {
    pub n: usize,
    pub nodes: Vec<T>,
    /// Reference coordinates `τ = log(x/(n+1−x))` of the nodes.
    pub tau: Vec<T>,
    /// `a = x(n+1−x)/(n+1)` at the nodes.
    pub a: Vec<T>,
    /// Differentiation matrices of orders 1 to 4.
    pub d: [Mat<T>; 4],
    /// Interpolatory quadrature weights in `dx` for values at the nodes.
    pub weights: Vec<T>,
}

/// Curvature integrals of one profile used by the step-level accumulators.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepSample<T> {
    pub t: T,
    /// `F(v)₀`, the rate fed into the additive constant.
    pub p: T,
    /// `ε = (1/V)∫|∂φ̇|²ω_φⁿ`.
    pub eps: T,
    /// `(1/V)∫(R − r)²ω_φⁿ`.
    pub rr2: T,
    /// `((k+1)/V)∫(R − r)Ric^k∧ω_φ^{n−k}` for `k = 0, …, n`.
    pub energy_rate: Vec<T>,
    /// Largest scalar curvature over the nodes.
    pub r_max: T,
}

impl<T: Real> Dynamics<T> {
    pub fn new(n: usize, degree: usize) -> Self {
        let len = MomentProfile::<T>::length(n);
        let nodes = chebyshev::roots(degree, T::zero(), len);
        let tau = nodes.iter().map(|&x| (x / (len - x)).ln()).collect();
        let a = nodes.iter().map(|&x| x * (len - x) / len).collect();
        let d1 = chebyshev::diff_matrix(degree, T::zero(), len);
        let d2 = d1.matmul(&d1);
        let d3 = d2.matmul(&d1);
        let d4 = d3.matmul(&d1);
        let mut weights = vec![T::zero(); degree];
        let mut e = vec![T::zero(); degree];
        for j in 0..degree {
            e[j] = T::one();
            weights[j] = ChebSeries::from_root_values(&e, T::zero(), len).integral();
            e[j] = T::zero();
        }
        Self { n, nodes, tau, a, d: [d1, d2, d3, d4], weights }
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    fn nf(&self) -> T {
        T::from_usize_lossy(self.n)
    }

    /// `F(v)`; fails when `1 + a g″ ≤ 0` at some node.
    pub fn rhs(&self, v: &[T]) -> Result<Vec<T>> {
        let g1 = self.d[0].matvec(v);
        let g2 = self.d[1].matvec(v);
        let n = self.nf();
        (0..v.len())
            .map(|i| {
                let den = T::one() + self.a[i] * g2[i];
                if !(den > T::zero()) {
                    return Err(Error::Positivity { index: i, detail: format!("1 + a g″ = {den} at moment node x = {}", self.nodes[i]) });
                }
                Ok(den.ln() - (self.nodes[i] - n) * g1[i] + v[i])
            })
            .collect()
    }

    /// Jacobian of `F` at `v`.
    pub fn jacobian(&self, v: &[T]) -> Mat<T> {
        let g2 = self.d[1].matvec(v);
        let n = self.nf();
        let m = v.len();
        Mat::from_fn(m, m, |i, j| {
            let den = T::one() + self.a[i] * g2[i];
            let mut val = self.a[i] / den * self.d[1][(i, j)] - (self.nodes[i] - n) * self.d[0][(i, j)];
            if i == j {
                val += T::one();
            }
            val
        })
    }

    /// Largest step inside the RK4 stability interval, from a power-iteration
    /// estimate of the Jacobian's spectral radius.
    pub fn stable_dt(&self, v: &[T]) -> T {
        let rho = spectral_radius_estimate(&self.jacobian(v), 60);
        // RK4 is stable on the negative real axis down to −2.785.
        T::lit(0.8 * 2.785) / rho.max(T::one())
    }

    /// Point data at the nodes for node values `v` and additive constant `offset`.
    pub fn node_points(&self, v: &[T], offset: T) -> Result<Vec<PointData<T>>> {
        let ds: Vec<Vec<T>> = self.d.iter().map(|d| d.matvec(v)).collect();
        (0..v.len())
            .map(|i| {
                let derivs = [v[i] + offset, ds[0][i], ds[1][i], ds[2][i], ds[3][i]];
                MomentProfile::point_from_derivs(self.n, self.tau[i], None, derivs)
            })
            .collect()
    }

    /// `∫ f dx` over the moment interval from values at the nodes.
    pub fn integrate_dx(&self, f: &[T]) -> T {
        f.iter().zip(&self.weights).map(|(a, b)| *a * *b).sum()
    }

    /// Step-level monitor values at node values `v`.
    pub fn sample(&self, t: T, v: &[T]) -> Result<StepSample<T>> {
        let n = self.n;
        let f = self.rhs(v)?;
        let fx = self.d[0].matvec(&f);
        let pts = self.node_points(v, T::zero())?;
        let vol = MomentProfile::<T>::length(n).powi(n as i32);
        let dens = |p: &PointData<T>| p.nf() * p.x.powi(n as i32 - 1);
        let total = |vals: Vec<T>| self.integrate_dx(&vals);
        let r = total(pts.iter().map(|p| p.scalar_curvature() * dens(p)).collect()) / vol;
        let eps = total(pts.iter().zip(&fx).map(|(p, d)| p.psi * *d * *d * dens(p)).collect()) / vol;
        let rr2 = total(pts.iter().map(|p| (p.scalar_curvature() - r).powi(2) * dens(p)).collect()) / vol;
        let energy_rate = (0..=n)
            .map(|k| {
                let vals = pts
                    .iter()
                    .map(|p| (p.scalar_curvature() - r) * wedge_powers(&[(Form::ricci(p), k), (Form::metric(p), n - k)]) / p.psi)
                    .collect();
                T::from_usize_lossy(k + 1) * total(vals) / vol
            })
            .collect();
        let r_max = pts.iter().map(|p| p.scalar_curvature()).fold(T::neg_infinity(), T::max);
        Ok(StepSample { t, p: f[0], eps, rr2, energy_rate, r_max })
    }

    /// `φ̇ = −(F(v) + K)` as a Chebyshev series in the moment coordinate.
    pub fn phidot_series(&self, v: &[T], offset: T) -> Result<(ChebSeries<T>, T)> {
        let f = self.rhs(v)?;
        let neg: Vec<T> = f.iter().map(|x| -*x).collect();
        Ok((ChebSeries::from_root_values(&neg, T::zero(), MomentProfile::<T>::length(self.n)), -offset))
    }
}

/// Flow state: node values of `g`, the additive constant, and the time.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState<T> {
    pub t: T,
    pub v: Vec<T>,
    pub offset: T,
}

impl<T: Real> FlowState<T> {
    pub fn from_profile(t: T, profile: &MomentProfile<T>) -> Self {
        Self { t, v: profile.node_values(), offset: profile.offset }
    }

    pub fn profile(&self, n: usize) -> MomentProfile<T> {
        MomentProfile::from_node_values(n, &self.v, self.offset)
    }

    pub fn metric(&self, grid: &ReducedGrid<T>) -> Result<ReducedMetricState<T>> {
        ReducedMetricState::from_profile(grid.clone(), self.profile(grid.dim()))
    }

    /// `‖φ‖_∞` over the grid, evaluated from the profile.
    pub fn phi_sup(&self, grid: &ReducedGrid<T>) -> Result<T> {
        let prof = self.profile(grid.dim());
        grid.s.iter().try_fold(T::zero(), |m, &s| Ok(m.max(prof.point_at_s(s)?.phi.abs())))
    }
}

fn split_rhs<T: Real>(dynamics: &Dynamics<T>, v: &[T], offset: T) -> Result<(Vec<T>, T)> {
    let f = dynamics.rhs(v)?;
    let p = f[0];
    Ok((f.into_iter().map(|x| x - p).collect(), offset + p))
}

fn axpy<T: Real>(y: &[T], a: T, x: &[T]) -> Vec<T> {
    y.iter().zip(x).map(|(u, w)| *u + a * *w).collect()
}

/// One step of size `dt`. Fails without side effects if an intermediate
/// profile loses convexity.
pub fn flow_step<T: Real>(dynamics: &Dynamics<T>, state: &FlowState<T>, dt: T, integrator: Integrator) -> Result<FlowState<T>> {
    let (v, k) = match integrator {
        Integrator::Rk4 => rk4(dynamics, state, dt)?,
        Integrator::SemiImplicit => rosenbrock(dynamics, state, dt)?,
    };
    let next = FlowState { t: state.t + dt, v, offset: k };
    dynamics.rhs(&next.v)?;
    next.profile(dynamics.n).check_convex().map_err(|e| Error::Positivity { index: 0, detail: e.to_string() })?;
    Ok(next)
}

fn rk4<T: Real>(dy: &Dynamics<T>, s: &FlowState<T>, dt: T) -> Result<(Vec<T>, T)> {
    let half = dt * T::lit(0.5);
    let (k1, c1) = split_rhs(dy, &s.v, s.offset)?;
    let (k2, c2) = split_rhs(dy, &axpy(&s.v, half, &k1), s.offset + half * c1)?;
    let (k3, c3) = split_rhs(dy, &axpy(&s.v, half, &k2), s.offset + half * c2)?;
    let (k4, c4) = split_rhs(dy, &axpy(&s.v, dt, &k3), s.offset + dt * c3)?;
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);
    let v = (0..s.v.len()).map(|i| s.v[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i])).collect();
    Ok((v, s.offset + sixth * (c1 + two * c2 + two * c3 + c4)))
}

/// ROS2: `(I − γhJ)k₁ = f(y)`, `(I − γhJ)k₂ = f(y + hk₁) − 2k₁`, `y⁺ = y + h(3k₁ + k₂)/2`,
/// with `γ = 1 + 1/√2`, on the augmented vector `(v, K)`.
fn rosenbrock<T: Real>(dy: &Dynamics<T>, s: &FlowState<T>, dt: T) -> Result<(Vec<T>, T)> {
    let m = s.v.len();
    let gamma = T::one() + T::one() / T::lit(2.0).sqrt();
    let jf = dy.jacobian(&s.v);
    let mut aug = Mat::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..m {
            let jij = jf[(i, j)] - jf[(0, j)];
            aug[(i, j)] = -gamma * dt * jij + if i == j { T::one() } else { T::zero() };
        }
        aug[(m, i)] = -gamma * dt * jf[(0, i)];
    }
    aug[(m, m)] = T::one() - gamma * dt;
    let lu = Lu::new(aug)?;
    let f = |v: &[T], k: T| -> Result<Vec<T>> {
        let (dv, dk) = split_rhs(dy, v, k)?;
        let mut out = dv;
        out.push(dk);
        Ok(out)
    };
    let y0: Vec<T> = s.v.iter().copied().chain(std::iter::once(s.offset)).collect();
    let k1 = lu.solve(&f(&s.v, s.offset)?);
    let y1 = axpy(&y0, dt, &k1);
    let f1 = f(&y1[..m], y1[m])?;
    let two = T::lit(2.0);
    let k2 = lu.solve(&f1.iter().zip(&k1).map(|(a, b)| *a - two * *b).collect::<Vec<_>>());
    let half = dt * T::lit(0.5);
    let y: Vec<T> = (0..=m).map(|i| y0[i] + half * (T::lit(3.0) * k1[i] + k2[i])).collect();
    Ok((y[..m].to_vec(), y[m]))
}

/// Step-size control around [`flow_step`].
#[derive(Clone, Debug)]
pub struct Stepper<T> {
    pub dynamics: Dynamics<T>,
    pub integrator: Integrator,
    pub dt_max: T,
    pub dt_min: T,
    /// Steps between refreshes of the stability estimate.
    pub refresh: usize,
    stable: Option<T>,
    since: usize,
    pub accepted: usize,
    pub rejected: usize,
}

impl<T: Real> Stepper<T> {
    pub fn new(dynamics: Dynamics<T>, integrator: Integrator, dt_max: T) -> Self {
        Self { dynamics, integrator, dt_max, dt_min: T::lit(1e-12), refresh: 50, stable: None, since: 0, accepted: 0, rejected: 0 }
    }

    fn step_limit(&mut self, v: &[T]) -> T {
        match self.integrator {
            Integrator::SemiImplicit => self.dt_max,
            Integrator::Rk4 => {
                if self.stable.is_none() || self.since >= self.refresh {
                    self.stable = Some(self.dynamics.stable_dt(v));
                    self.since = 0;
                }
                self.dt_max.min(self.stable.unwrap_or(self.dt_max))
            }
        }
    }

    /// Advances to exactly `t_target`, calling `on_step` after every accepted step.
    pub fn advance_to(&mut self, state: &FlowState<T>, t_target: T, mut on_step: impl FnMut(&FlowState<T>) -> Result<()>) -> Result<FlowState<T>> {
        let mut cur = state.clone();
        let tol = T::lit(1e-12) * (T::one() + t_target.abs());
        while t_target - cur.t > tol {
            let mut dt = self.step_limit(&cur.v).min(t_target - cur.t);
            let remaining = t_target - cur.t - dt;
            if remaining > T::zero() && remaining < T::lit(0.25) * dt {
                // Avoid a sliver step at the end of the interval.
                dt = (t_target - cur.t) * T::lit(0.5);
            }
            loop {
                match flow_step(&self.dynamics, &cur, dt, self.integrator) {
                    Ok(mut next) => {
                        if (t_target - next.t).abs() <= tol {
                            next.t = t_target;
                        }
                        cur = next;
                        self.accepted += 1;
                        self.since += 1;
                        break;
                    }
                    Err(Error::Positivity { .. }) if dt * T::lit(0.5) >= self.dt_min => {
                        dt = dt * T::lit(0.5);
                        self.rejected += 1;
                    }
                    Err(Error::Positivity { detail, .. }) => {
                        return Err(Error::FlowBlowup(format!("step size underflow at t = {}: {detail}", cur.t)));
                    }
                    Err(e) => return Err(e),
                }
            }
            on_step(&cur)?;
        }
        Ok(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_is_a_fixed_point() {
        for n in 1..=2 {
            let dy = Dynamics::<f64>::new(n, 32);
            let f = dy.rhs(&vec![0.0; 32]).unwrap();
            assert!(f.iter().all(|x| *x == 0.0));
        }
    }

    #[test]
    fn dilated_reference_has_constant_rate() {
        // g = −a x + b is a Kähler–Einstein profile: F is the constant b − a n.
        let dy = Dynamics::<f64>::new(2, 24);
        let v: Vec<f64> = dy.nodes.iter().map(|x| -0.3 * x + 0.1).collect();
        for f in dy.rhs(&v).unwrap() {
            assert!((f - (0.1 - 0.3 * 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_weights_integrate_polynomials() {
        let dy = Dynamics::<f64>::new(2, 20);
        let vals: Vec<f64> = dy.nodes.iter().map(|x| x * x).collect();
        assert!((dy.integrate_dx(&vals) - 9.0).abs() < 1e-12);
    }
}
