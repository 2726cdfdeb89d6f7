//! Versioned text format for sampled metric states.

use krflow::geometry::{Manifold, ReducedGrid, ReducedMetricState};
use krflow::{Error, Result, State};

pub const STATE_VERSION: u32 = 1;
const MAGIC: &str = "krflow-state";

/// Formats a value with 17 significant digits, enough to round-trip every `f64`.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Grid samples `(s, u, φ)` of a state together with the grid description.
#[derive(Clone, Debug, PartialEq)]
pub struct StateFile {
    pub manifold: Manifold,
    pub half_width: f64,
    pub s: Vec<f64>,
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
}

impl StateFile {
    pub fn from_state(state: &State) -> Self {
        Self {
            manifold: state.manifold(),
            half_width: state.grid.half_width,
            s: state.grid.s.clone(),
            u: state.u.clone(),
            phi: state.phi.clone(),
        }
    }

    pub fn n_points(&self) -> usize {
        self.s.len()
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "# {MAGIC} v{STATE_VERSION} manifold={} n_points={} L={}\ns,u,phi\n",
            self.manifold,
            self.n_points(),
            fmt17(self.half_width)
        );
        for i in 0..self.n_points() {
            out.push_str(&format!("{},{},{}\n", fmt17(self.s[i]), fmt17(self.u[i]), fmt17(self.phi[i])));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty state file".into()))?;
        let mut words = header.trim_start_matches('#').split_whitespace();
        if words.next() != Some(MAGIC) {
            return Err(Error::Parse(format!("missing `{MAGIC}` header")));
        }
        let version = words.next().and_then(|v| v.strip_prefix('v')).and_then(|v| v.parse::<u32>().ok());
        if version != Some(STATE_VERSION) {
            return Err(Error::Parse(format!("unsupported state file version in `{header}`")));
        }
        let (mut manifold, mut n_points, mut half_width) = (None, None, None);
        for w in words {
            match w.split_once('=') {
                Some(("manifold", v)) => manifold = Some(v.parse::<Manifold>().map_err(|e| Error::Parse(e.to_string()))?),
                Some(("n_points", v)) => n_points = v.parse::<usize>().ok(),
                Some(("L", v)) => half_width = v.parse::<f64>().ok(),
                _ => return Err(Error::Parse(format!("unexpected header field `{w}`"))),
            }
        }
        let (Some(manifold), Some(n_points), Some(half_width)) = (manifold, n_points, half_width) else {
            return Err(Error::Parse("header must give manifold, n_points and L".into()));
        };
        if lines.next().map(str::trim) != Some("s,u,phi") {
            return Err(Error::Parse("missing `s,u,phi` column header".into()));
        }
        let (mut s, mut u, mut phi) = (Vec::new(), Vec::new(), Vec::new());
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("row {}: cannot parse `{line}`", i + 1)))?;
            if vals.len() != 3 || vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse(format!("row {}: expected three finite numbers", i + 1)));
            }
            s.push(vals[0]);
            u.push(vals[1]);
            phi.push(vals[2]);
        }
        if s.len() != n_points {
            return Err(Error::Parse(format!("header announces {n_points} rows, found {}", s.len())));
        }
        Ok(Self { manifold, half_width, s, u, phi })
    }

    /// Rebuilds the metric from `φ`; the stored `s` and `u` must match the grid and reference.
    pub fn to_state(&self) -> Result<State> {
        let grid = ReducedGrid::new(self.manifold, self.n_points(), self.half_width)?;
        let tol = 1e-12 * grid.h;
        if let Some(i) = grid.s.iter().zip(&self.s).position(|(a, b)| (a - b).abs() > tol) {
            return Err(Error::Parse(format!("row {}: s = {} is off the uniform grid", i + 1, self.s[i])));
        }
        let reference = ReducedMetricState::build_reference(self.manifold, self.n_points(), self.half_width)?;
        let mut state = ReducedMetricState::metric_from_potential(&reference, &self.phi)?;
        for (i, (a, b)) in state.u.iter().zip(&self.u).enumerate() {
            if (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
                return Err(Error::Parse(format!("row {}: u = {b} disagrees with u_ref + φ = {a}", i + 1)));
            }
        }
        state.grid.s = self.s.clone();
        state.u = self.u.clone();
        Ok(state)
    }
}
