use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Supported manifolds: the projective line and plane with U(n)-invariant metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Manifold {
    CP1,
    CP2,
}

impl Manifold {
    /// Complex dimension `n`.
    pub fn dim(self) -> usize {
        match self {
            Manifold::CP1 => 1,
            Manifold::CP2 => 2,
        }
    }

    /// Total volume `c₁ⁿ[M] = (n+1)ⁿ` in the class `[ω] = c₁`.
    pub fn volume(self) -> f64 {
        let n = self.dim() as i32;
        f64::from(n + 1).powi(n)
    }

    /// Length `n+1` of the moment interval `[0, n+1]`.
    pub fn moment_length(self) -> f64 {
        (self.dim() + 1) as f64
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Manifold::CP1 => "CP1",
            Manifold::CP2 => "CP2",
        })
    }
}

impl FromStr for Manifold {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_uppercase().as_str() {
            "CP1" => Ok(Manifold::CP1),
            "CP2" => Ok(Manifold::CP2),
            other => Err(Error::config("manifold", format!("unknown manifold `{other}` (expected CP1 or CP2)"))),
        }
    }
}
