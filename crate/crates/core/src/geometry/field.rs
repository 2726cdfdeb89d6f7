//! U(n)-invariant scalar fields and their derivatives in the radial coordinate.

use crate::chebyshev::ChebSeries;
use crate::geometry::PointData;
use crate::scalar::Real;

/// Value of an invariant function with its first two `s`-derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub ds: T,
    pub dss: T,
}

impl<T: Real> Jet<T> {
    pub fn new(v: T, ds: T, dss: T) -> Self {
        Self { v, ds, dss }
    }

    /// Jet of `f(x)` from its moment-coordinate derivatives.
    pub fn from_x(p: &PointData<T>, f: T, fx: T, fxx: T) -> Self {
        Self { v: f, ds: p.psi * fx, dss: p.psi * (p.psi_x * fx + p.psi * fxx) }
    }

    /// Complex Laplacian `g^{ij̄}∂_i∂_j̄ f` with respect to the metric at `p`.
    pub fn laplacian(&self, p: &PointData<T>) -> T {
        let nm1 = p.nf() - T::one();
        if p.n == 1 {
            self.dss / p.psi
        } else {
            self.dss / p.psi + nm1 * self.ds / p.x
        }
    }

    /// `|∂f|²` with respect to the metric at `p`.
    pub fn grad_norm2(&self, p: &PointData<T>) -> T {
        self.ds * self.ds / p.psi
    }

    /// Derivative in the moment coordinate of the metric at `p`.
    pub fn dx(&self, p: &PointData<T>) -> T {
        self.ds / p.psi
    }
}

/// An invariant function that can be evaluated at points of a metric.
pub trait ScalarField<T: Real> {
    fn jet(&self, p: &PointData<T>) -> Jet<T>;
}

/// Field given in closed form as `s ↦ (f, f′, f″)`.
pub struct RadialFn<F>(pub F);

impl<T: Real, F: Fn(T) -> (T, T, T)> ScalarField<T> for RadialFn<F> {
    fn jet(&self, p: &PointData<T>) -> Jet<T> {
        let (v, ds, dss) = (self.0)(p.s);
        Jet { v, ds, dss }
    }
}

/// Field given as a Chebyshev series in the moment coordinate of one metric.
#[derive(Clone, Debug)]
pub struct MomentSeriesField<T> {
    f: ChebSeries<T>,
    fx: ChebSeries<T>,
    fxx: ChebSeries<T>,
    pub constant: T,
}

impl<T: Real> MomentSeriesField<T> {
    pub fn new(f: ChebSeries<T>, constant: T) -> Self {
        let fx = f.derivative();
        let fxx = fx.derivative();
        Self { f, fx, fxx, constant }
    }

    pub fn series(&self) -> &ChebSeries<T> {
        &self.f
    }

    pub fn eval_x(&self, x: T) -> (T, T, T) {
        (self.f.eval(x) + self.constant, self.fx.eval(x), self.fxx.eval(x))
    }
}

impl<T: Real> ScalarField<T> for MomentSeriesField<T> {
    /// The point must belong to the metric whose moment coordinate the series uses.
    fn jet(&self, p: &PointData<T>) -> Jet<T> {
        let (f, fx, fxx) = self.eval_x(p.x);
        Jet::from_x(p, f, fx, fxx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MomentProfile;

    #[test]
    fn laplacian_of_moment_map_on_reference() {
        // On the round CP¹ metric ψ = x(2 − x)/2, so Δx = ψ_x = 1 − x.
        let p = MomentProfile::<f64>::reference(1, 12).point_at_s(0.4).unwrap();
        let j = Jet::from_x(&p, p.x, 1.0, 0.0);
        assert!((j.laplacian(&p) - (1.0 - p.x)).abs() < 1e-13);
    }
}
