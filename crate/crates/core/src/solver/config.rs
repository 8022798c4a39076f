use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::BesovIndex;
use crate::spectral::{Grid, LpExponent};

/// Time-integration settings shared by the Navier-Stokes and transport solvers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Viscosity `ε ∈ [0, 1]`.
    pub epsilon: f64,
    /// Final time `T`.
    pub horizon: f64,
    /// Fixed step; derived from the initial CFL estimate when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub grid: Grid,
    #[serde(default = "default_true")]
    pub dealias: bool,
    /// Steps between stored snapshots (the final state is always stored).
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    /// Courant number used to derive `dt` from the initial velocity.
    #[serde(default = "default_cfl_safety")]
    pub cfl_safety: f64,
    /// Courant number above which a run aborts.
    #[serde(default = "default_cfl_limit")]
    pub cfl_limit: f64,
    /// Index used for the Besov diagnostics (`s` and `s - 1`).
    #[serde(default = "default_diag_index")]
    pub diagnostics_index: BesovIndex,
    /// Abort once the Besov diagnostic exceeds this multiple of its initial value.
    #[serde(default = "default_blowup")]
    pub blowup_factor: f64,
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

pub fn default_diag_index() -> BesovIndex {
    BesovIndex::new(2.0, LpExponent::Finite(2.0), LpExponent::Finite(1.0))
}

impl SolverConfig {
    pub fn new(grid: Grid, epsilon: f64, horizon: f64) -> Self {
        Self {
            epsilon,
            horizon,
            dt: None,
            grid,
            dealias: true,
            snapshot_stride: 1,
            cfl_safety: default_cfl_safety(),
            cfl_limit: default_cfl_limit(),
            diagnostics_index: default_diag_index(),
            blowup_factor: default_blowup(),
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_diagnostics_index(mut self, idx: BesovIndex) -> Self {
        self.diagnostics_index = idx;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!("epsilon must lie in [0, 1], got {}", self.epsilon)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot_stride must be >= 1".into()));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_limit >= self.cfl_safety) {
            return Err(Error::Config("need 0 < cfl_safety <= cfl_limit".into()));
        }
        Ok(())
    }

    /// Step count and step size covering `[0, T]` exactly. Without an explicit
    /// `dt` the step is `cfl_safety · dx / max_speed`.
    pub fn time_grid(&self, max_speed: f64) -> (usize, f64) {
        let target = match self.dt {
            Some(dt) => dt,
            None if max_speed > 0.0 => self.cfl_safety * self.grid.spacing() / max_speed,
            None => self.grid.spacing(),
        };
        let steps = ((self.horizon / target) - 1e-9).ceil().max(1.0) as usize;
        (steps, self.horizon / steps as f64)
    }
}
