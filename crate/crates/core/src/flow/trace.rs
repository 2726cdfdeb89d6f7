use super::config::{CNormalization, FlowConfig};
use super::engine::{Dynamics, FlowState, StepSample, Stepper};
use super::monitors::{normalize_initial_c, NormalizedC};
use crate::error::Result;
use crate::functionals::{e_k_flow_derivative, sigma_series, FunctionalLedger};
use crate::geometry::{default_degree, MomentSeriesField, ReducedGrid, ReducedMetricState, ScalarField};
use crate::scalar::Real;
use serde::Serialize;

/// Monitor values at one recorded time.
#[derive(Clone, Debug, Serialize)]
pub struct FlowRecord<T> {
    pub t: T,
    /// `c(t) = (1/V)∫φ̇ω_φⁿ`, after the configured normalization.
    pub c: T,
    /// `c(t)` of the run as integrated, with `φ(0)` as given.
    pub c_raw: T,
    /// `c_raw` without the contribution of the additive constant of the profile.
    pub c_shape: T,
    pub eps: T,
    /// `μ = ∫(φ̇ − c)²ω_φⁿ`.
    pub mu: T,
    /// `μ₁ = ∫|∇φ̇|²ω_φⁿ`.
    pub mu_1: T,
    /// `μ₂ = ∫|∇∇φ̇|²ω_φⁿ` (both Hessian types).
    pub mu_2: T,
    pub r_max: T,
    pub r_min: T,
    /// Average scalar curvature `r`.
    pub r_avg: T,
    pub min_bisec: T,
    pub bisec_positive: bool,
    pub ledger: Option<FunctionalLedger<T>>,
    /// `dE_k/dt` from the velocity formula, `k = 0, …, n`.
    pub de_dt: Vec<T>,
    /// Smallest value over the grid of `∂R/∂t − |∂R|²/R + R/(1 − e^{−t})` (NaN at `t = 0`).
    pub harnack_trace: T,
    /// `(1/V)∫(R − r)²ω_φⁿ`.
    pub rr2: T,
    /// Time integral of `rr2` from 0 (piecewise-cubic quadrature of step-level samples).
    pub rr2_accum: T,
    /// Time integrals of `((k+1)/V)∫(R − r)Ric^k∧ω_φ^{n−k}` from 0.
    pub energy_accum: Vec<T>,
    pub phi_sup: T,
    /// Additive constant of the profile.
    pub offset: T,
}

/// Grid fields kept for space-time checks.
#[derive(Clone, Debug, Serialize)]
pub struct Snapshot<T> {
    pub t: T,
    pub scalar: Vec<T>,
    /// `u″ = ψ` at the grid points.
    pub psi: Vec<T>,
}

/// Result of [`run_flow`].
#[derive(Clone, Debug)]
pub struct FlowTrace<T> {
    pub config: FlowConfig,
    pub grid: ReducedGrid<T>,
    pub records: Vec<FlowRecord<T>>,
    /// Samples after every accepted step (and at `t = 0`).
    pub steps: Vec<StepSample<T>>,
    pub snapshots: Vec<Snapshot<T>>,
    pub normalization: Option<NormalizedC<T>>,
    pub initial: FlowState<T>,
    pub last: FlowState<T>,
    /// Flow state at each record.
    pub states: Vec<FlowState<T>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl<T: Real> FlowTrace<T> {
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Indices `j` with `t_j − t_{j−1} ≤ 0` (empty for a valid trace).
    pub fn time_order_violations(&self) -> Vec<usize> {
        (1..self.records.len()).filter(|&j| !(self.records[j].t > self.records[j - 1].t)).collect()
    }

    /// Count of record steps where a monotone functional increased by more than `slack`.
    pub fn monotonicity_violations(&self, slack: T) -> usize {
        let mut count = 0;
        for w in self.records.windows(2) {
            if let (Some(a), Some(b)) = (&w[0].ledger, &w[1].ledger) {
                let pairs = [(a.f, b.f), (a.nu, b.nu), (a.e_k[0], b.e_k[0]), (a.e_k[1], b.e_k[1])];
                count += pairs.iter().filter(|(x, y)| *y > *x + slack).count();
            }
        }
        count
    }

    /// `sup|R − r|` at the last record.
    pub fn final_curvature_deviation(&self) -> T {
        let last = self.records.last().expect("trace has a record at t = 0");
        (last.r_max - last.r_avg).abs().max((last.r_min - last.r_avg).abs())
    }
}

/// Monitors of one metric along the flow.
pub(crate) struct Observation<T> {
    pub record: FlowRecord<T>,
    pub snapshot: Snapshot<T>,
}

pub(crate) fn observe<T: Real>(
    dynamics: &Dynamics<T>,
    fs: &FlowState<T>,
    grid: &ReducedGrid<T>,
    reference: &ReducedMetricState<T>,
    functionals: bool,
) -> Result<Observation<T>> {
    let n = grid.dim();
    let state = fs.metric(grid)?;
    let vol = state.nominal_volume();
    let (series, constant) = dynamics.phidot_series(&fs.v, fs.offset)?;
    let phidot = MomentSeriesField::new(series, constant);
    let shape = MomentSeriesField::new(phidot.series().clone(), T::zero());
    let c_raw = state.integrate_fn(|p| phidot.jet(p).v) / vol;
    let c_shape = state.integrate_fn(|p| shape.jet(p).v) / vol;
    let nm1 = T::from_usize_lossy(n - 1);
    let mut mu = T::zero();
    let mut mu_1 = T::zero();
    let mut mu_2 = T::zero();
    for (j, p) in state.quad.points.iter().enumerate() {
        let (f, fx, fxx) = phidot.eval_x(p.x);
        let w = state.quad.wx[j] * p.nf() * p.x.powi(n as i32 - 1);
        mu += w * (f - c_raw).powi(2);
        mu_1 += w * p.psi * fx * fx;
        let mixed_rad = p.psi * fxx + p.psi_x * fx;
        mu_2 += w * (p.psi * p.psi * fxx * fxx + mixed_rad * mixed_rad + nm1 * (p.q * fx).powi(2));
    }
    let eps = mu_1 / vol;
    let curv = state.curvature();
    let (r_min, r_max) = curv.scalar_range();
    let min_bisec = curv.min_bisectional();
    let r_avg = state.average_scalar_curvature();
    let (ledger, de_dt) = if functionals {
        let l = FunctionalLedger::compute(reference, &state)?;
        (Some(l), (0..=n).map(|k| e_k_flow_derivative(&state, &phidot, k)).collect())
    } else {
        (None, Vec::new())
    };
    let harnack_trace = if fs.t > T::zero() {
        let rs = sigma_series(&state, 1)?;
        let decay = T::one() - (-fs.t).exp();
        state.samples.iter().fold(T::infinity(), |m, p| {
            let jet = rs.jet(p);
            let r = p.scalar_curvature();
            let r_t = jet.laplacian(p) + p.ricci_norm2() - r;
            m.min(r_t - jet.grad_norm2(p) / r + r / decay)
        })
    } else {
        T::nan()
    };
    let phi_sup = state.phi.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let record = FlowRecord {
        t: fs.t,
        c: c_raw,
        c_raw,
        c_shape,
        eps,
        mu,
        mu_1,
        mu_2,
        r_max,
        r_min,
        r_avg,
        min_bisec,
        bisec_positive: min_bisec > T::zero(),
        ledger,
        de_dt,
        harnack_trace,
        rr2: T::zero(),
        rr2_accum: T::zero(),
        energy_accum: vec![T::zero(); n + 1],
        phi_sup,
        offset: fs.offset,
    };
    let snapshot = Snapshot { t: fs.t, scalar: curv.scalar.clone(), psi: state.samples.iter().map(|p| p.psi).collect() };
    Ok(Observation { record, snapshot })
}

/// `∫_{t_j}^{t_{j+1}} f` for the cubic through the four samples nearest to the interval.
pub(crate) fn interval_integral<T: Real>(ts: &[T], fs: &[T], j: usize) -> T {
    let m = ts.len();
    let (a, b) = (ts[j], ts[j + 1]);
    if m < 4 {
        return (b - a) * (fs[j] + fs[j + 1]) * T::lit(0.5);
    }
    let start = j.saturating_sub(1).min(m - 4);
    let idx = [start, start + 1, start + 2, start + 3];
    let lagrange = |x: T| {
        idx.iter().fold(T::zero(), |acc, &i| {
            let w = idx.iter().filter(|&&k| k != i).fold(T::one(), |w, &k| w * (x - ts[k]) / (ts[i] - ts[k]));
            acc + w * fs[i]
        })
    };
    // Two-point Gauss rule, exact for cubics.
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let off = half / T::lit(3.0).sqrt();
    half * (lagrange(mid - off) + lagrange(mid + off))
}

/// Cumulative integrals of the step-level integrands, piecewise cubic in time.
pub(crate) fn accumulate<T: Real>(steps: &[StepSample<T>], n: usize) -> Vec<(T, Vec<T>)> {
    let ts: Vec<T> = steps.iter().map(|s| s.t).collect();
    let rr2: Vec<T> = steps.iter().map(|s| s.rr2).collect();
    let energy: Vec<Vec<T>> = (0..=n).map(|k| steps.iter().map(|s| s.energy_rate[k]).collect()).collect();
    let mut out = Vec::with_capacity(steps.len());
    let mut acc_rr2 = T::zero();
    let mut acc_e = vec![T::zero(); n + 1];
    out.push((acc_rr2, acc_e.clone()));
    for j in 0..steps.len().saturating_sub(1) {
        acc_rr2 += interval_integral(&ts, &rr2, j);
        for k in 0..=n {
            acc_e[k] += interval_integral(&ts, &energy[k], j);
        }
        out.push((acc_rr2, acc_e.clone()));
    }
    out
}

/// Integrates the flow from the configured initial potential and records all monitors.
pub fn run_flow<T: Real>(config: &FlowConfig) -> Result<FlowTrace<T>> {
    config.validate()?;
    let grid = ReducedGrid::new(config.manifold, config.n_points, T::lit(config.half_width))?;
    let n = grid.dim();
    let reference = ReducedMetricState::build_reference(config.manifold, config.n_points, T::lit(config.half_width))?;
    let init = config.initial_potential::<T>();
    let start = ReducedMetricState::from_potential_fn(grid.clone(), init.closure())?;
    let dynamics = Dynamics::new(n, default_degree(config.n_points));
    let initial = FlowState::from_profile(T::zero(), &start.profile);
    let mut stepper = Stepper::new(dynamics, config.integrator, T::lit(config.dt));
    let mut steps = vec![stepper.dynamics.sample(T::zero(), &initial.v)?];
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut record_steps = vec![0usize];
    let mut states = vec![initial.clone()];
    let obs = observe(&stepper.dynamics, &initial, &grid, &reference, config.monitors.functionals)?;
    records.push(obs.record);
    if config.monitors.snapshots {
        snapshots.push(obs.snapshot);
    }
    let count = (config.t_end / config.record_dt).round().max(1.0) as usize;
    let mut cur = initial.clone();
    for j in 1..=count {
        let target = if j == count { T::lit(config.t_end) } else { T::lit(config.record_dt) * T::from_usize_lossy(j) };
        let dynamics = stepper.dynamics.clone();
        cur = stepper.advance_to(&cur, target, |s| {
            steps.push(dynamics.sample(s.t, &s.v)?);
            Ok(())
        })?;
        record_steps.push(steps.len() - 1);
        states.push(cur.clone());
        let obs = observe(&stepper.dynamics, &cur, &grid, &reference, config.monitors.functionals)?;
        records.push(obs.record);
        if config.monitors.snapshots {
            snapshots.push(obs.snapshot);
        }
    }
    let acc = accumulate(&steps, n);
    for (rec, &si) in records.iter_mut().zip(&record_steps) {
        rec.rr2 = steps[si].rr2;
        rec.rr2_accum = acc[si].0;
        rec.energy_accum = acc[si].1.clone();
    }
    let mut trace = FlowTrace {
        config: config.clone(),
        grid,
        records,
        steps,
        snapshots,
        normalization: None,
        initial,
        last: cur,
        states,
        accepted_steps: stepper.accepted,
        rejected_steps: stepper.rejected,
    };
    if config.normalize_c == CNormalization::TailIntegral {
        let norm = normalize_initial_c(&trace)?;
        for (rec, c) in trace.records.iter_mut().zip(&norm.c) {
            rec.c = *c;
        }
        trace.normalization = Some(norm);
    }
    Ok(trace)
}
