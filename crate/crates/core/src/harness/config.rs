//! Sweep configuration, read from and echoed as TOML.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::data::DataSpec;
use crate::error::{Error, Result};
use crate::littlewood_paley::BesovIndex;
use crate::solver::SolverConfig;
use crate::spectral::Grid;

/// Solver settings shared by every run of a sweep. A missing `horizon` or
/// `dt` is chosen by the harness and written back into the effective config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverTemplate {
    pub grid: Grid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Upper bound for a harness-chosen horizon.
    #[serde(default = "default_max_horizon")]
    pub max_horizon: f64,
    /// A harness-chosen horizon keeps `‖u(t)‖_{B^s}` below this multiple of `‖u₀‖_{B^s}`.
    #[serde(default = "default_horizon_growth")]
    pub horizon_growth: f64,
    /// A harness-chosen step never exceeds `max_horizon / min_steps`.
    #[serde(default = "default_min_steps")]
    pub min_steps: usize,
    #[serde(default = "default_true")]
    pub dealias: bool,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default = "default_cfl_safety")]
    pub cfl_safety: f64,
    #[serde(default = "default_cfl_limit")]
    pub cfl_limit: f64,
    #[serde(default = "default_blowup")]
    pub blowup_factor: f64,
}

fn default_max_horizon() -> f64 {
    1.0
}
fn default_horizon_growth() -> f64 {
    1.25
}
fn default_min_steps() -> usize {
    100
}
fn default_true() -> bool {
    true
}
fn default_stride() -> usize {
    1
}
fn default_cfl_safety() -> f64 {
    0.5
}
fn default_cfl_limit() -> f64 {
    1.0
}
fn default_blowup() -> f64 {
    1e3
}

impl SolverTemplate {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            horizon: None,
            dt: None,
            max_horizon: default_max_horizon(),
            horizon_growth: default_horizon_growth(),
            min_steps: default_min_steps(),
            dealias: true,
            snapshot_stride: default_stride(),
            cfl_safety: default_cfl_safety(),
            cfl_limit: default_cfl_limit(),
            blowup_factor: default_blowup(),
        }
    }

    /// Solver configuration at viscosity `epsilon` over `[0, horizon]`.
    pub fn config(&self, epsilon: f64, horizon: f64, dt: f64, idx: &BesovIndex) -> SolverConfig {
        let mut cfg = SolverConfig::new(self.grid, epsilon, horizon).with_dt(dt).with_stride(self.snapshot_stride);
        cfg.dealias = self.dealias;
        cfg.cfl_safety = self.cfl_safety;
        cfg.cfl_limit = self.cfl_limit;
        cfg.blowup_factor = self.blowup_factor;
        cfg.with_diagnostics_index(*idx)
    }
}

/// Verdict thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Accepted range of fitted viscosity slopes.
    pub slope_window: [f64; 2],
    pub max_residual: f64,
    /// Points below `floor_factor ×` the solver noise floor are not fitted.
    pub floor_factor: f64,
    /// Accepted consecutive-level ratio of the weak-norm difference.
    pub weak_ratio_window: [f64; 2],
    /// Accepted consecutive-level ratio of the strong-norm difference.
    pub strong_ratio_window: [f64; 2],
    /// Allowed spread across viscosities, relative to the inviscid value.
    pub uniformity: f64,
    /// Largest `sup_ε sup_t ‖u_ε‖ / sup_t ‖u_0‖`.
    pub bound_spread: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            slope_window: [0.9, 1.1],
            max_residual: 0.1,
            floor_factor: 10.0,
            weak_ratio_window: [1.5, 2.5],
            strong_ratio_window: [3.0, 5.0],
            uniformity: 0.25,
            bound_spread: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Radius of the ball the data must lie in.
    pub radius: f64,
    pub epsilon_grid: Vec<f64>,
    /// Low-pass levels `N` of the mollified data.
    #[serde(default)]
    pub truncation_levels: Vec<i32>,
    /// Perturbation sizes.
    #[serde(default)]
    pub delta_grid: Vec<f64>,
    pub index: BesovIndex,
    pub data: DataSpec,
    pub solver: SolverTemplate,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        if !self.epsilon_grid.contains(&0.0) {
            return bad("epsilon_grid must contain 0".into());
        }
        if let Some(e) = self.epsilon_grid.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return bad(format!("epsilon {e} outside [0, 1]"));
        }
        if let Some(d) = self.delta_grid.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
            return bad(format!("perturbation size {d} must be >= 0"));
        }
        if let Some(n) = self.truncation_levels.iter().find(|n| **n < 0) {
            return bad(format!("truncation level {n} must be >= 0"));
        }
        self.index.require_admissible()?;
        let s = &self.solver;
        if let Some(h) = s.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return bad(format!("horizon must be positive, got {h}"));
            }
        }
        if let Some(dt) = s.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        if !(s.max_horizon > 0.0 && s.horizon_growth > 1.0 && s.min_steps > 0 && s.snapshot_stride > 0) {
            return bad("need max_horizon > 0, horizon_growth > 1, min_steps >= 1, snapshot_stride >= 1".into());
        }
        if !(s.cfl_safety > 0.0 && s.cfl_limit >= s.cfl_safety && s.blowup_factor > 1.0) {
            return bad("need 0 < cfl_safety <= cfl_limit and blowup_factor > 1".into());
        }
        let t = &self.tolerances;
        if t.slope_window[0] > t.slope_window[1]
            || t.weak_ratio_window[0] > t.weak_ratio_window[1]
            || t.strong_ratio_window[0] > t.strong_ratio_window[1]
        {
            return bad("tolerance windows must be [low, high]".into());
        }
        Ok(())
    }

    /// First 12 hex digits of the SHA-256 of the TOML rendering.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().take(6).map(|b| format!("{b:02x}")).collect())
    }

    /// Viscosities in increasing order, without duplicates.
    pub fn sorted_epsilons(&self) -> Vec<f64> {
        let mut e = self.epsilon_grid.clone();
        e.sort_by(f64::total_cmp);
        e.dedup();
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::data::SpectralProfile;

    const SAMPLE: &str = r#"
radius = 4.0
epsilon_grid = [0.0, 0.1, 0.01]
truncation_levels = [2, 3]

[index]
s = 2.0
p = 2.0
r = 1.0

[data]
seed = 7
profile = { single_block = 2 }
amplitude = 0.5

[solver]
grid = 32
"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(cfg.data.profile, SpectralProfile::SingleBlock(2));
        assert_eq!(cfg.solver.grid.n(), 32);
        assert_eq!(cfg.solver.horizon, None);
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.sorted_epsilons(), vec![0.0, 0.01, 0.1]);
        assert!(cfg.delta_grid.is_empty());
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        cfg.solver.horizon = Some(0.75);
        cfg.solver.dt = Some(0.01);
        let text = cfg.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash().unwrap(), cfg.hash().unwrap());
        assert_eq!(cfg.hash().unwrap().len(), 12);
        cfg.data.seed = 8;
        assert_ne!(back.hash().unwrap(), cfg.hash().unwrap());
    }

    #[test]
    fn rejects_bad_configs() {
        let no_zero = SAMPLE.replace("[0.0, 0.1, 0.01]", "[0.1]");
        assert!(matches!(ExperimentConfig::from_toml(&no_zero), Err(Error::Config(_))));
        let unknown = SAMPLE.replace("radius = 4.0", "radius = 4.0\nbogus = 1");
        assert!(ExperimentConfig::from_toml(&unknown).is_err());
        let inadmissible = SAMPLE.replace("r = 1.0", "r = 2.0");
        assert!(ExperimentConfig::from_toml(&inadmissible).is_err());
        let bad_grid = SAMPLE.replace("grid = 32", "grid = 48");
        assert!(ExperimentConfig::from_toml(&bad_grid).is_err());
    }
}
