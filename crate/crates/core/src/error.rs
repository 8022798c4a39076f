use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("grid mismatch: expected n={expected}, found n={found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("component mismatch: expected {expected}, found {found}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("CFL violation at t={time}: Courant number {courant:.3} exceeds {limit}")]
    Cfl { time: f64, courant: f64, limit: f64 },

    #[error("non-finite value detected at t={time}")]
    NonFinite { time: f64 },

    #[error("left ball B_R at t={time}: Besov norm {norm:.4e} exceeds {limit:.4e}")]
    LeftBall { time: f64, norm: f64, limit: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("rate fit needs at least 3 points in window, got {0}")]
    InsufficientPoints(usize),

    #[error("snapshot format error in {path}: {reason}")]
    Snapshot { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}
