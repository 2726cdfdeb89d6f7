use crate::error::{Error, Result};
use crate::geometry::{LogisticPolynomial, Manifold};
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Shape of the initial perturbation `φ(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitFamily {
    /// `φ = 0`.
    Zero,
    /// `A·P_l(2σ(s) − 1)` with `P_l` the Legendre polynomial and `σ` the logistic function.
    Legendre,
    /// Random polynomial in `2σ(s) − 1` of degree `l` with coefficients in `[−A, A]`.
    Random,
}

/// How the additive constant of `φ(0)` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CNormalization {
    /// Keep `φ(0)` as given.
    Raw,
    /// Shift `φ(0)` so that `c(t) = ∫_t^∞ ε(τ)e^{t−τ}dτ`.
    TailIntegral,
}

/// Which monitors a run records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monitors {
    pub functionals: bool,
    pub harnack: bool,
    pub snapshots: bool,
}

impl Monitors {
    pub fn all() -> Self {
        Self { functionals: true, harnack: true, snapshots: true }
    }

    /// Parses a comma-separated list of `functionals`, `harnack`, `snapshots`, `all`, `none`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Self { functionals: false, harnack: false, snapshots: false };
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "all" => m = Self::all(),
                "none" => {}
                "functionals" => m.functionals = true,
                "harnack" => {
                    m.harnack = true;
                    m.snapshots = true;
                }
                "snapshots" => m.snapshots = true,
                other => return Err(Error::config("monitors", format!("unknown monitor `{other}`"))),
            }
        }
        Ok(m)
    }
}

/// Parameters of one flow run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub manifold: Manifold,
    pub n_points: usize,
    /// Half-width `L` of the radial grid `[−L, L]`.
    pub half_width: f64,
    /// Largest time step.
    pub dt: f64,
    pub t_end: f64,
    /// Spacing of the recorded times.
    pub record_dt: f64,
    pub integrator: super::Integrator,
    pub init_family: InitFamily,
    pub init_amplitude: f64,
    pub init_mode: usize,
    pub monitors: Monitors,
    pub normalize_c: CNormalization,
    pub seed: u64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            manifold: Manifold::CP1,
            n_points: 512,
            half_width: 12.0,
            dt: 0.01,
            t_end: 10.0,
            record_dt: 0.05,
            integrator: super::Integrator::Rk4,
            init_family: InitFamily::Legendre,
            init_amplitude: 0.2,
            init_mode: 2,
            monitors: Monitors::all(),
            normalize_c: CNormalization::TailIntegral,
            seed: 0,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::config("dt", format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::config("t_end", format!("end time must be positive, got {}", self.t_end)));
        }
        if !(self.record_dt > 0.0) {
            return Err(Error::config("record_dt", format!("record spacing must be positive, got {}", self.record_dt)));
        }
        if self.n_points < 64 {
            return Err(Error::config("n_points", format!("need at least 64 points, got {}", self.n_points)));
        }
        if !(self.half_width >= 10.0) {
            return Err(Error::config("L", format!("truncation half-width must be ≥ 10, got {}", self.half_width)));
        }
        if self.normalize_c == CNormalization::TailIntegral && self.t_end < 1.0 {
            return Err(Error::config("normalize_c", format!("tail normalization extrapolates ε past the end and needs t_end ≥ 1, got {}", self.t_end)));
        }
        if !self.init_amplitude.is_finite() {
            return Err(Error::config("init.amplitude", "amplitude must be finite"));
        }
        Ok(())
    }

    /// The initial perturbation as a closed-form family.
    pub fn initial_potential<T: Real>(&self) -> LogisticPolynomial<T> {
        let amp = T::lit(self.init_amplitude);
        match self.init_family {
            InitFamily::Zero => LogisticPolynomial::new(vec![T::zero()]),
            InitFamily::Legendre => LogisticPolynomial::legendre(amp, self.init_mode),
            InitFamily::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let coeffs = (0..=self.init_mode).map(|_| amp * T::lit(rng.gen_range(-1.0..1.0))).collect();
                LogisticPolynomial::new(coeffs)
            }
        }
    }
}
