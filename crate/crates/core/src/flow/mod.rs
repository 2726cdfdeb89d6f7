//! Kähler–Ricci flow on symmetric metrics with its monitors.

mod automorphism;
mod config;
mod engine;
mod monitors;
mod trace;

pub use automorphism::{central_residual, normalize_by_automorphism, psi_at, AutomorphismFit};
pub use config::{CNormalization, FlowConfig, InitFamily, Monitors};
pub use engine::{flow_step, Dynamics, FlowState, Integrator, StepSample, Stepper};
pub use monitors::{
    accumulate_energy_identity, energy_rate_check, evolution_residual, fit_decay_rate, harnack_check, normalize_initial_c, rmax_doubling_violations, tail_slices,
    harnack_distance, harnack_margin, DecayRates, EnergyIdentity, HarnackReport, NormalizedC, RateCheck,
};
pub use trace::{run_flow, FlowRecord, FlowTrace, Snapshot};
