use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{solve_ns, taylor_green, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::harness::{synthesize_besov_data, DataSpec};
use crate::spectral::{snapshot, SpectralField};

/// A solver run described in TOML: a `[solver]` table plus an `initial` entry.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveJob {
    pub solver: SolverConfig,
    pub initial: InitialData,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    TaylorGreen,
    /// BNSL file; relative paths resolve against the job file's directory.
    Snapshot(PathBuf),
    Data(DataSpec),
}

impl SolveJob {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn initial_field(&self, base: &Path) -> Result<SpectralField> {
        let cfg = &self.solver;
        match &self.initial {
            InitialData::TaylorGreen => Ok(taylor_green(cfg.grid, 0.0, 0.0)),
            InitialData::Snapshot(path) => {
                let path = if path.is_relative() { base.join(path) } else { path.clone() };
                read_field(&path)
            }
            InitialData::Data(spec) => synthesize_besov_data(cfg.grid, &cfg.diagnostics_index, spec),
        }
    }

    pub fn run(&self, base: &Path) -> Result<Trajectory> {
        solve_ns(&self.initial_field(base)?, &self.solver)
    }
}

/// Read a BNSL snapshot, naming the path when the file cannot be opened.
pub fn read_field(path: &Path) -> Result<SpectralField> {
    match snapshot::read(path) {
        Ok(s) => Ok(s.field),
        Err(Error::Io(e)) => Err(Error::Config(format!("cannot read {}: {e}", path.display()))),
        Err(e) => Err(e),
    }
}
