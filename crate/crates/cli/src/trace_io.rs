//! Trace CSV, run summary and manifest.

use crate::state_file::fmt17;
use krflow::flow::{
    accumulate_energy_identity, fit_decay_rate, harnack_check, rmax_doubling_violations, tail_slices, DecayRates, EnergyIdentity,
    HarnackReport,
};
use krflow::{Error, Result, Trace};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Column names of the trace CSV for complex dimension `n`.
pub fn trace_columns(n: usize) -> Vec<String> {
    let mut cols: Vec<String> =
        ["t", "c", "eps", "mu", "mu_1", "mu_2", "R_max", "R_min", "min_bisec", "J", "F", "nu"].iter().map(|s| s.to_string()).collect();
    cols.extend((0..=n).map(|k| format!("E_{k}")));
    cols.extend(["I", "ImJ", "harnack_margin", "rr2_accum"].iter().map(|s| s.to_string()));
    cols
}

/// One row per record; functionals not recorded are written as `NaN`.
/// `harnack_margin` is the smallest differential Harnack quantity over the grid at that time.
pub fn render_trace_csv(trace: &Trace) -> String {
    let n = trace.dim();
    let mut out = trace_columns(n).join(",");
    out.push('\n');
    for r in &trace.records {
        let mut row = vec![r.t, r.c, r.eps, r.mu, r.mu_1, r.mu_2, r.r_max, r.r_min, r.min_bisec];
        match &r.ledger {
            Some(l) => {
                row.extend([l.j, l.f, l.nu]);
                row.extend(&l.e_k);
                row.extend([l.i, l.i_minus_j]);
            }
            None => row.extend(std::iter::repeat(f64::NAN).take(n + 6)),
        }
        row.extend([r.harnack_trace, r.rr2_accum]);
        out.push_str(&row.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Parsed trace CSV: header and numeric rows.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TraceTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let columns: Vec<String> =
            lines.next().ok_or_else(|| Error::Parse("empty trace file".into()))?.split(',').map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let row: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("trace row {}: cannot parse", i + 1)))?;
            if row.len() != columns.len() {
                return Err(Error::Parse(format!("trace row {} has {} fields, expected {}", i + 1, row.len(), columns.len())));
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Headline numbers of a run.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub manifold: String,
    pub t_end: f64,
    pub records: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub final_sup_r_deviation: f64,
    pub final_phi_sup: f64,
    pub monotonicity_violations: usize,
    pub bisectional_positive_throughout: bool,
    pub rmax_doubling_violations: usize,
    pub decay: Option<DecayRates<f64>>,
    pub decay_window: (f64, f64),
    pub energy_identity: Vec<EnergyIdentity<f64>>,
    /// `(T, (2/V)∫_T^{T+1}∫(R − r)²)` for `T ≥ 5`.
    pub tail_slices: Vec<(f64, f64)>,
    pub c_normalization_a: Option<f64>,
    pub c_min: f64,
    pub harnack: Option<HarnackReport<f64>>,
}

/// Window used for rate fits: past the initial transient and before `c` reaches its
/// roundoff floor (about 1e-13 on the reference runs).
pub fn decay_window(t_end: f64) -> (f64, f64) {
    (0.1 * t_end, 0.4 * t_end)
}

pub fn summarize(trace: &Trace, pairs: usize, seed: u64) -> Result<RunSummary> {
    let cfg = &trace.config;
    let last = trace.records.last().expect("trace has a record at t = 0");
    let window = decay_window(cfg.t_end);
    let energy_identity = if cfg.monitors.functionals {
        (0..=trace.dim()).map(|k| accumulate_energy_identity(trace, k)).collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let harnack = if cfg.monitors.harnack && trace.records.iter().filter(|r| r.t > 0.05).count() >= 2 {
        Some(harnack_check(trace, pairs, seed)?)
    } else {
        None
    };
    Ok(RunSummary {
        manifold: cfg.manifold.to_string(),
        t_end: cfg.t_end,
        records: trace.records.len(),
        accepted_steps: trace.accepted_steps,
        rejected_steps: trace.rejected_steps,
        final_sup_r_deviation: trace.final_curvature_deviation(),
        final_phi_sup: last.phi_sup,
        monotonicity_violations: trace.monotonicity_violations(1e-8),
        bisectional_positive_throughout: trace.records.iter().all(|r| r.bisec_positive),
        rmax_doubling_violations: rmax_doubling_violations(trace),
        decay: fit_decay_rate(trace, window).ok().filter(|d| d.alpha_mu.is_finite()),
        decay_window: window,
        energy_identity,
        tail_slices: tail_slices(trace).into_iter().filter(|(t, _)| *t >= 5.0).collect(),
        c_normalization_a: trace.normalization.as_ref().map(|n| n.a),
        c_min: trace.records.iter().map(|r| r.c).fold(f64::INFINITY, f64::min),
        harnack,
    })
}

/// Record of one CLI run and the files it wrote.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: String,
    pub code_version: String,
    pub start_unix_s: f64,
    pub end_unix_s: f64,
    pub outputs: Vec<String>,
    pub final_sup_r_deviation: f64,
    pub alpha_mu: Option<f64>,
    pub monotonicity_violations: usize,
}

impl RunManifest {
    /// Output paths (relative to `dir`) that do not exist.
    pub fn missing_outputs(&self, dir: &Path) -> Vec<String> {
        self.outputs.iter().filter(|p| !dir.join(p).exists()).cloned().collect()
    }
}

pub fn unix_now() -> f64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}
