//! Sweeps over viscosity, truncation level and perturbation size, rate fits
//! and report emission.

pub mod config;
pub mod data;
pub mod experiments;
pub mod fit;
pub mod report;

pub use data::{job_rng, resolved_top, synthesize, synthesize_besov_data, DataSpec, FieldKind, SpectralProfile};
pub use fit::{fit_rate, fit_rate_above, RateFit};
pub use config::{ExperimentConfig, SolverTemplate, Tolerances};
pub use experiments::{
    continuous_dependence_with, inviscid_limit_with, run_continuous_dependence, run_experiment, run_inviscid_limit,
    run_uniform_bounds, uniform_bounds_with,
};
pub use report::{rerender, Check, CheckStatus, Experiment, ExperimentReport, NamedFit, Row, REPORT_SCHEMA};
