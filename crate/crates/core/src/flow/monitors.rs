use super::engine::{Dynamics, FlowState, Integrator, Stepper};
use super::trace::{interval_integral, FlowTrace};
use crate::error::{Error, Result};
use crate::functionals::{e_k, sigma_series};
use crate::geometry::{default_degree, ReducedGrid, ReducedMetricState, ScalarField};
use crate::linalg::least_squares;
use crate::linalg::Mat;
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Both sides of `((k+1)/V)∫₀ᵀ∫(R − r)Ric^k∧ω_φ^{n−k}dt ≤ E_k(0) − E_k(T)`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct EnergyIdentity<T> {
    pub k: usize,
    pub lhs: T,
    pub rhs: T,
}

impl<T: Real> EnergyIdentity<T> {
    pub fn holds(&self, slack: T) -> bool {
        self.lhs <= self.rhs + slack
    }
}

pub fn accumulate_energy_identity<T: Real>(trace: &FlowTrace<T>, k: usize) -> Result<EnergyIdentity<T>> {
    let first = trace.records.first().and_then(|r| r.ledger.as_ref());
    let last_rec = trace.records.last().ok_or_else(|| Error::Numerical("empty trace".into()))?;
    let last = last_rec.ledger.as_ref();
    match (first, last) {
        (Some(a), Some(b)) if k < a.e_k.len() => Ok(EnergyIdentity { k, lhs: last_rec.energy_accum[k], rhs: a.e_k[k] - b.e_k[k] }),
        _ => Err(Error::Numerical("trace was recorded without functional monitors".into())),
    }
}

/// Integrals `(2/V)∫_T^{T+1}∫(R − r)²ω_φⁿdt` at integer `T`, each summed
/// directly over the step-level samples inside the slice.
pub fn tail_slices<T: Real>(trace: &FlowTrace<T>) -> Vec<(T, T)> {
    let ts: Vec<T> = trace.steps.iter().map(|s| s.t).collect();
    let fs: Vec<T> = trace.steps.iter().map(|s| T::lit(2.0) * s.rr2).collect();
    let t_end = ts.last().copied().unwrap_or_else(T::zero);
    let tol = T::lit(1e-9);
    let mut out = Vec::new();
    let mut t = T::zero();
    while t + T::one() <= t_end + tol {
        let sum = (0..ts.len().saturating_sub(1))
            .filter(|&j| ts[j] >= t - tol && ts[j + 1] <= t + T::one() + tol)
            .map(|j| interval_integral(&ts, &fs, j))
            .sum();
        out.push((t, sum));
        t += T::one();
    }
    out
}

/// The run with `φ(0)` shifted so that `c(t) = ∫_t^∞ ε(τ)e^{t−τ}dτ`.
#[derive(Clone, Debug, Serialize)]
pub struct NormalizedC<T> {
    /// Constant added to `φ(0)`.
    pub a: T,
    /// Normalized `c(t)` at the recorded times.
    pub c: Vec<T>,
    /// `∫_t^∞ ε(τ)e^{t−τ}dτ` at the recorded times, from the step-level `ε`.
    pub discounted_tail: Vec<T>,
    /// `∫_t^∞ ε(τ)dτ` at the recorded times.
    pub plain_tail: Vec<T>,
    /// Exponential rate used to extrapolate `ε` beyond the end of the run.
    pub tail_rate: T,
}

impl<T: Real> NormalizedC<T> {
    /// Largest `|c(t) − ∫_t^∞ ε e^{t−τ}dτ|` over the records.
    pub fn identity_error(&self) -> T {
        self.c.iter().zip(&self.discounted_tail).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    /// Number of records with `c(t) > ∫_t^∞ε dτ + slack`.
    pub fn bound_violations(&self, slack: T) -> usize {
        self.c.iter().zip(&self.plain_tail).filter(|(a, b)| **a > **b + slack).count()
    }
}

/// Least-squares slope of `log y` against `t`.
fn log_slope<T: Real>(pts: &[(T, T)]) -> Result<T> {
    if pts.len() < 3 {
        return Err(Error::Numerical(format!("need at least 3 points for a rate fit, got {}", pts.len())));
    }
    if let Some((t, y)) = pts.iter().find(|(_, y)| !(*y > T::zero())) {
        return Err(Error::Numerical(format!("non-positive value {y} at t = {t} in rate fit")));
    }
    let a = Mat::from_fn(pts.len(), 2, |i, j| if j == 0 { T::one() } else { pts[i].0 });
    let b: Vec<T> = pts.iter().map(|(_, y)| y.ln()).collect();
    Ok(least_squares(&a, &b)?[1])
}

/// `∫_{t_j}^{t_{j+1}} f(τ)e^{t_j−τ}dτ` for `f` linear between the end values.
fn discounted_increment<T: Real>(h: T, f0: T, f1: T) -> T {
    let e = (-h).exp();
    f0 * (T::one() - e) + (f1 - f0) / h * (T::one() - e - h * e)
}

/// Tail-integral normalization of `c(t)` as a post-processing step.
///
/// The additive constant `K` of the profile obeys `K′ = K + p`; the shape
/// part of `c` does not depend on it. The constant is recomputed backwards
/// from the end of the run, where `c(T) = ∫_T^∞ ε e^{T−τ}dτ` is extrapolated
/// from the decay of `ε`; backward integration of `K′ = K + p` is stable.
pub fn normalize_initial_c<T: Real>(trace: &FlowTrace<T>) -> Result<NormalizedC<T>> {
    let steps = &trace.steps;
    let t_end = steps.last().map(|s| s.t).unwrap_or_else(T::zero);
    if steps.len() < 8 || t_end < T::one() {
        return Err(Error::Numerical(format!("run too short for tail extrapolation (t_end = {t_end}, {} steps)", steps.len())));
    }
    let window: Vec<(T, T)> = steps.iter().filter(|s| s.t >= t_end - T::one()).map(|s| (s.t, s.eps)).collect();
    let tiny = T::lit(1e-300);
    let tail_rate = if window.iter().all(|(_, e)| *e > tiny) { (-log_slope(&window)?).max(T::zero()) } else { T::zero() };
    let eps_end = steps.last().map(|s| s.eps).unwrap_or_else(T::zero);
    let disc_end = eps_end / (T::one() + tail_rate);
    let plain_end = if eps_end > tiny { if tail_rate > T::zero() { eps_end / tail_rate } else { T::infinity() } } else { T::zero() };
    let last_rec = trace.records.last().ok_or_else(|| Error::Numerical("empty trace".into()))?;
    let m = steps.len();
    let mut k_adj = vec![T::zero(); m];
    let mut disc = vec![T::zero(); m];
    let mut plain = vec![T::zero(); m];
    k_adj[m - 1] = last_rec.c_shape - disc_end;
    disc[m - 1] = disc_end;
    plain[m - 1] = plain_end;
    let half = T::lit(0.5);
    for j in (0..m - 1).rev() {
        let h = steps[j + 1].t - steps[j].t;
        let e = (-h).exp();
        k_adj[j] = e * k_adj[j + 1] - discounted_increment(h, steps[j].p, steps[j + 1].p);
        disc[j] = e * disc[j + 1] + discounted_increment(h, steps[j].eps, steps[j + 1].eps);
        plain[j] = plain[j + 1] + half * h * (steps[j].eps + steps[j + 1].eps);
    }
    let mut c = Vec::with_capacity(trace.records.len());
    let mut dt = Vec::with_capacity(trace.records.len());
    let mut pt = Vec::with_capacity(trace.records.len());
    let mut si = 0;
    for rec in &trace.records {
        while si + 1 < m && steps[si].t < rec.t - T::lit(1e-12) {
            si += 1;
        }
        c.push(rec.c_shape - k_adj[si]);
        dt.push(disc[si]);
        pt.push(plain[si]);
    }
    Ok(NormalizedC { a: trace.initial.offset - k_adj[0], c, discounted_tail: dt, plain_tail: pt, tail_rate })
}

/// Fitted exponential decay rates `α` (with `y ≈ Ce^{−αt}`) over a time window.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct DecayRates<T> {
    pub alpha_mu: T,
    pub alpha_c: T,
    pub alpha_mu_1: T,
    pub alpha_mu_2: T,
    pub points: usize,
}

pub fn fit_decay_rate<T: Real>(trace: &FlowTrace<T>, window: (T, T)) -> Result<DecayRates<T>> {
    let recs: Vec<_> = trace.records.iter().filter(|r| r.t >= window.0 && r.t <= window.1).collect();
    let series = |f: &dyn Fn(&super::FlowRecord<T>) -> T| recs.iter().map(|r| (r.t, f(r))).collect::<Vec<_>>();
    Ok(DecayRates {
        alpha_mu: -log_slope(&series(&|r| r.mu))?,
        alpha_c: -log_slope(&series(&|r| r.c))?,
        alpha_mu_1: -log_slope(&series(&|r| r.mu_1))?,
        alpha_mu_2: -log_slope(&series(&|r| r.mu_2))?,
        points: recs.len(),
    })
}

/// Outcome of the space-time scalar-curvature comparison.
#[derive(Clone, Debug, Serialize)]
pub struct HarnackReport<T> {
    pub pairs: usize,
    /// Smallest `rhs − lhs` over the sampled pairs.
    pub worst_margin: T,
    pub violations: usize,
    /// Smallest recorded trace quantity over records with `t > 0.05`.
    pub trace_min: T,
    pub trace_violations: usize,
}

/// Upper bound for `inf_γ ∫_{t₁}^{t₂}|γ′|² dt` between grid points `i1` at record `j1`
/// and `i2` at record `j2`, over radial paths that are piecewise linear in
/// `(t, s)` on refining space-time lattices; `|∂_s|² = u″`.
pub fn harnack_distance<T: Real>(trace: &FlowTrace<T>, i1: usize, j1: usize, i2: usize, j2: usize) -> T {
    let s = &trace.grid.s;
    let (lo, hi) = if s[i1] <= s[i2] { (s[i1], s[i2]) } else { (s[i2], s[i1]) };
    if hi == lo {
        return T::zero();
    }
    if j2 <= j1 {
        return T::infinity();
    }
    let h = trace.grid.h;
    let mut best = T::infinity();
    for level in 1..=8usize {
        let m = 8 * level + 1;
        let nodes: Vec<T> = (0..m).map(|k| lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(m - 1)).collect();
        let steps = (j2 - j1).min(4 * level);
        let times: Vec<usize> = (0..=steps).map(|k| j1 + ((j2 - j1) * k + steps / 2) / steps).collect();
        // Largest ψ over the grid points bracketing each lattice cell, per lattice time.
        let cell_max = |snap: usize| -> Vec<T> {
            let psi = &trace.snapshots[snap].psi;
            (0..m - 1)
                .map(|c| {
                    let a = ((nodes[c] - s[0]) / h).floor().to_usize().unwrap_or(0);
                    let b = (((nodes[c + 1] - s[0]) / h).ceil().to_usize().unwrap_or(0)).min(psi.len() - 1);
                    psi[a.min(b)..=b].iter().fold(T::zero(), |x, y| x.max(*y))
                })
                .collect()
        };
        let start = if s[i1] <= s[i2] { 0 } else { m - 1 };
        let end = m - 1 - start;
        let mut cost = vec![T::infinity(); m];
        cost[start] = T::zero();
        let mut prev_cells = cell_max(times[0]);
        for w in times.windows(2) {
            if w[1] == w[0] {
                continue;
            }
            let cells = cell_max(w[1]);
            let dt = trace.records[w[1]].t - trace.records[w[0]].t;
            let mut next = vec![T::infinity(); m];
            for a in 0..m {
                if !cost[a].is_finite() {
                    continue;
                }
                next[a] = next[a].min(cost[a]);
                let mut gmax = T::zero();
                for b in a + 1..m {
                    gmax = gmax.max(cells[b - 1]).max(prev_cells[b - 1]);
                    let ds = nodes[b] - nodes[a];
                    let c = cost[a] + ds * ds * gmax / dt;
                    next[b] = next[b].min(c);
                }
                let mut gmax = T::zero();
                for b in (0..a).rev() {
                    gmax = gmax.max(cells[b]).max(prev_cells[b]);
                    let ds = nodes[a] - nodes[b];
                    let c = cost[a] + ds * ds * gmax / dt;
                    next[b] = next[b].min(c);
                }
            }
            cost = next;
            prev_cells = cells;
        }
        best = best.min(cost[end]);
    }
    best
}

/// `((e^{t₂} − 1)/(e^{t₁} − 1))e^{Δ/4}R(y, t₂) − R(x, t₁)`.
pub fn harnack_margin<T: Real>(trace: &FlowTrace<T>, i1: usize, j1: usize, i2: usize, j2: usize) -> T {
    let t1 = trace.records[j1].t;
    let t2 = trace.records[j2].t;
    let r1 = trace.snapshots[j1].scalar[i1];
    let r2 = trace.snapshots[j2].scalar[i2];
    if j1 == j2 && i1 == i2 {
        return r2 - r1;
    }
    let delta = harnack_distance(trace, i1, j1, i2, j2);
    t2.exp_m1() / t1.exp_m1() * (delta / T::lit(4.0)).exp() * r2 - r1
}

/// Samples `pairs` space-time pairs with `0.05 < t₁ < t₂` and reports the worst margin.
pub fn harnack_check<T: Real>(trace: &FlowTrace<T>, pairs: usize, seed: u64) -> Result<HarnackReport<T>> {
    if trace.snapshots.len() != trace.records.len() {
        return Err(Error::Numerical("trace was recorded without snapshots".into()));
    }
    let t_min = T::lit(0.05);
    let eligible: Vec<usize> = (0..trace.records.len()).filter(|&j| trace.records[j].t > t_min).collect();
    if eligible.len() < 2 {
        return Err(Error::Numerical("need at least two records after t = 0.05".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let np = trace.grid.n_points();
    let mut worst = T::infinity();
    let mut violations = 0;
    for _ in 0..pairs {
        let a = rng.gen_range(0..eligible.len() - 1);
        let b = rng.gen_range(a + 1..eligible.len());
        let (i1, i2) = (rng.gen_range(0..np), rng.gen_range(0..np));
        let m = harnack_margin(trace, i1, eligible[a], i2, eligible[b]);
        if m < T::lit(-1e-8) {
            violations += 1;
        }
        worst = worst.min(m);
    }
    let traces: Vec<T> = trace.records.iter().filter(|r| r.t > t_min).map(|r| r.harnack_trace).collect();
    Ok(HarnackReport {
        pairs,
        worst_margin: worst,
        violations,
        trace_min: traces.iter().fold(T::infinity(), |m, v| m.min(*v)),
        trace_violations: traces.iter().filter(|v| !(**v > T::zero())).count(),
    })
}

/// Records `t` in `[t₀, t₀ + 1/(2R_max(t₀))]` with `R_max(t) > 2R_max(t₀)`, over all `t₀`.
pub fn rmax_doubling_violations<T: Real>(trace: &FlowTrace<T>) -> usize {
    let recs = &trace.records;
    let mut count = 0;
    for (j0, r0) in recs.iter().enumerate() {
        if !(r0.r_max > T::zero()) {
            continue;
        }
        let window = r0.t + T::one() / (T::lit(2.0) * r0.r_max);
        count += recs[j0..].iter().take_while(|r| r.t <= window).filter(|r| r.r_max > T::lit(2.0) * r0.r_max).count();
    }
    count
}

/// Largest grid value of `∂R/∂t − (ΔR + |Ric|² − R)` at `state`, with `∂R/∂t`
/// from a second-order one-sided difference over two RK4 steps of size `delta`.
pub fn evolution_residual<T: Real>(stepper: &Stepper<T>, state: &FlowState<T>, grid: &ReducedGrid<T>, delta: T) -> Result<T> {
    let mut st = Stepper::new(stepper.dynamics.clone(), Integrator::Rk4, delta);
    let s1 = st.advance_to(state, state.t + delta, |_| Ok(()))?;
    let s2 = st.advance_to(&s1, state.t + delta + delta, |_| Ok(()))?;
    let m0 = state.metric(grid)?;
    let r1 = s1.metric(grid)?.curvature().scalar;
    let r2 = s2.metric(grid)?.curvature().scalar;
    let rs = sigma_series(&m0, 1)?;
    let mut worst = T::zero();
    for (i, p) in m0.samples.iter().enumerate() {
        let r0 = p.scalar_curvature();
        let r_t = (T::lit(-3.0) * r0 + T::lit(4.0) * r1[i] - r2[i]) / (delta + delta);
        let rhs = rs.jet(p).laplacian(p) + p.ricci_norm2() - r0;
        worst = worst.max((r_t - rhs).abs());
    }
    Ok(worst)
}

/// One comparison of `dE_k/dt` from the velocity formula with a centered difference.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct RateCheck<T> {
    pub t: T,
    pub k: usize,
    pub formula: T,
    pub finite_difference: T,
}

impl<T: Real> RateCheck<T> {
    pub fn relative_error(&self) -> T {
        ((self.finite_difference - self.formula) / self.formula).abs()
    }
}

/// Centered differences `(E_k(t+δ) − E_k(t−δ))/(2δ)` at every interior record,
/// re-integrating from the neighbouring recorded states.
pub fn energy_rate_check<T: Real>(trace: &FlowTrace<T>, delta: T) -> Result<Vec<RateCheck<T>>> {
    let cfg = &trace.config;
    let n = trace.dim();
    let reference = ReducedMetricState::build_reference(cfg.manifold, cfg.n_points, T::lit(cfg.half_width))?;
    let dynamics = Dynamics::new(n, default_degree(cfg.n_points));
    let mut stepper = Stepper::new(dynamics, cfg.integrator, T::lit(cfg.dt));
    let mut out = Vec::new();
    for j in 1..trace.states.len() {
        let rec = &trace.records[j];
        if rec.de_dt.is_empty() {
            return Err(Error::Numerical("trace was recorded without functional monitors".into()));
        }
        let t = rec.t;
        let minus = stepper.advance_to(&trace.states[j - 1], t - delta, |_| Ok(()))?.metric(&trace.grid)?;
        let plus = stepper.advance_to(&trace.states[j], t + delta, |_| Ok(()))?.metric(&trace.grid)?;
        for k in 0..=n {
            let fd = (e_k(&reference, &plus, k)? - e_k(&reference, &minus, k)?) / (delta + delta);
            out.push(RateCheck { t, k, formula: rec.de_dt[k], finite_difference: fd });
        }
    }
    Ok(out)
}
