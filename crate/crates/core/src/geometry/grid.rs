use crate::error::{Error, Result};
use crate::geometry::Manifold;
use crate::scalar::Real;

/// Uniform grid in the log-radial coordinate `s = log|z|²` on `[−L, L]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedGrid<T> {
    pub manifold: Manifold,
    pub half_width: T,
    pub h: T,
    pub s: Vec<T>,
}

impl<T: Real> ReducedGrid<T> {
    pub fn new(manifold: Manifold, n_points: usize, half_width: T) -> Result<Self> {
        if n_points < 64 {
            return Err(Error::config("n_points", format!("need at least 64 points, got {n_points}")));
        }
        if !(half_width >= T::lit(10.0)) {
            return Err(Error::config("L", format!("truncation half-width must be ≥ 10, got {half_width}")));
        }
        let h = (half_width + half_width) / T::from_usize_lossy(n_points - 1);
        let s = (0..n_points).map(|i| -half_width + h * T::from_usize_lossy(i)).collect();
        Ok(Self { manifold, half_width, h, s })
    }

    pub fn n_points(&self) -> usize {
        self.s.len()
    }

    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.manifold == other.manifold && self.h == other.h && self.s.len() == other.s.len() && self.half_width == other.half_width
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{} with {} points on ±{} vs {} with {} points on ±{}",
                self.manifold,
                self.n_points(),
                self.half_width,
                other.manifold,
                other.n_points(),
                other.half_width
            )))
        }
    }
}
