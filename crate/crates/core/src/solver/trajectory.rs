use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use crate::error::{Error, Result};
use crate::littlewood_paley::{lipschitz_norm, BesovIndex, DyadicFilterBank};
use crate::spectral::{jacobian, lp_norm, snapshot, Grid, LpExponent, SpectralField};

/// Per-snapshot norms of a solution and the accumulated velocity integrals
/// `V_p(t) = ∫₀ᵗ ‖∇v‖ dτ` (trapezoid rule over snapshots) of the advecting
/// velocity, which is the solution itself for Navier-Stokes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDiagnostics {
    pub times: Vec<f64>,
    pub besov_s_norm: Vec<f64>,
    pub besov_s_minus_one_norm: Vec<f64>,
    pub l2_norm: Vec<f64>,
    pub lipschitz_norm: Vec<f64>,
    /// `‖∇f‖₂²` of the solution, for the energy law.
    pub gradient_l2_squared: Vec<f64>,
    /// `‖∇v‖_{L^∞}` of the advecting velocity.
    pub velocity_gradient_linf: Vec<f64>,
    /// `‖∇v‖_{B^{d/p}_{p,∞}}` of the advecting velocity.
    pub velocity_gradient_besov: Vec<f64>,
    /// `∫‖∇v‖_{L^∞}`.
    pub vp_lipschitz: Vec<f64>,
    /// `∫ max(‖∇v‖_{B^{d/p}_{p,∞}}, ‖∇v‖_{L^∞})`.
    pub vp_besov: Vec<f64>,
    /// Largest relative divergence defect over snapshots (vector solutions only).
    pub max_divergence_defect: f64,
    /// Largest Courant number seen during the run.
    pub max_courant: f64,
}

/// Velocity-gradient norms at one instant.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct GradientNorms {
    pub linf: f64,
    pub besov_critical: f64,
}

pub(crate) fn gradient_norms(velocity: &SpectralField, p: LpExponent) -> Result<GradientNorms> {
    let grad = jacobian(velocity)?;
    let bank = DyadicFilterBank::for_grid(velocity.grid());
    let crit = Grid::DIMENSION as f64 * p.reciprocal();
    Ok(GradientNorms {
        linf: lp_norm(&grad, LpExponent::Infinity),
        besov_critical: bank.besov_norm(&grad, &BesovIndex::new(crit, p, LpExponent::Infinity))?,
    })
}

impl TrajectoryDiagnostics {
    pub(crate) fn record(&mut self, t: f64, field: &SpectralField, velocity: &GradientNorms, idx: &BesovIndex) -> Result<()> {
        let bank = DyadicFilterBank::for_grid(field.grid());
        let norms = bank.besov_norms(field, idx.p, idx.r, &[idx.s, idx.s - 1.0])?;
        let grad_sq: f64 = {
            let g = field.grid();
            let len = g.len();
            let mut sum = 0.0;
            for c in 0..field.components() {
                for (i, z) in field.coeffs()[c * len..(c + 1) * len].iter().enumerate() {
                    let (k1, k2) = g.frequency(i);
                    let k1 = if k1 == (g.n() / 2) as i64 { 0 } else { k1 };
                    let k2 = if k2 == (g.n() / 2) as i64 { 0 } else { k2 };
                    sum += ((k1 * k1 + k2 * k2) as f64) * z.norm_sqr();
                }
            }
            sum
        };
        let vp_integrand_besov = velocity.besov_critical.max(velocity.linf);
        let (vp_lip, vp_bes) = match self.times.last() {
            None => (0.0, 0.0),
            Some(&t_prev) => {
                let dt = t - t_prev;
                let prev_linf = *self.velocity_gradient_linf.last().unwrap();
                let prev_besov = *self.velocity_gradient_besov.last().unwrap();
                (
                    self.vp_lipschitz.last().unwrap() + 0.5 * dt * (prev_linf + velocity.linf),
                    self.vp_besov.last().unwrap() + 0.5 * dt * (prev_besov.max(prev_linf) + vp_integrand_besov),
                )
            }
        };
        self.velocity_gradient_linf.push(velocity.linf);
        self.velocity_gradient_besov.push(velocity.besov_critical);
        self.times.push(t);
        self.besov_s_norm.push(norms[0]);
        self.besov_s_minus_one_norm.push(norms[1]);
        self.l2_norm.push(lp_norm(field, LpExponent::Finite(2.0)));
        self.lipschitz_norm.push(lipschitz_norm(field)?);
        self.gradient_l2_squared.push(grad_sq);
        self.vp_lipschitz.push(vp_lip);
        self.vp_besov.push(vp_bes);
        Ok(())
    }
}

/// Time-ordered snapshots of one solution on `[0, T]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub dt: f64,
    pub steps: usize,
    pub snapshots: Vec<SpectralField>,
    pub diagnostics: TrajectoryDiagnostics,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    schema: u32,
    config: SolverConfig,
    dt: f64,
    steps: usize,
    files: Vec<String>,
    diagnostics: TrajectoryDiagnostics,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.diagnostics.times
    }

    pub fn initial(&self) -> &SpectralField {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &SpectralField {
        self.snapshots.last().expect("trajectory has at least one snapshot")
    }

    /// Write `snapshot_XXXXX.bnsl` files and `manifest.json` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut files = Vec::with_capacity(self.snapshots.len());
        for (i, snap) in self.snapshots.iter().enumerate() {
            let name = format!("snapshot_{i:05}.bnsl");
            snapshot::write(&dir.join(&name), snap, self.config.epsilon)?;
            files.push(name);
        }
        let manifest = Manifest {
            schema: 1,
            config: self.config.clone(),
            dt: self.dt,
            steps: self.steps,
            files,
            diagnostics: self.diagnostics.clone(),
        };
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
        if manifest.schema != 1 {
            return Err(Error::Config(format!("unsupported trajectory schema {}", manifest.schema)));
        }
        let snapshots = manifest
            .files
            .iter()
            .map(|f| snapshot::read(&PathBuf::from(dir).join(f)).map(|s| s.field))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config: manifest.config,
            dt: manifest.dt,
            steps: manifest.steps,
            snapshots,
            diagnostics: manifest.diagnostics,
        })
    }

    /// Sup over snapshots of `‖self(t) − other(t)‖` under `norm`; both
    /// trajectories must share their time grid.
    pub fn sup_distance<F>(&self, other: &Trajectory, mut norm: F) -> Result<f64>
    where
        F: FnMut(&SpectralField) -> Result<f64>,
    {
        if self.snapshots.len() != other.snapshots.len()
            || self.times().iter().zip(other.times()).any(|(a, b)| (a - b).abs() > 1e-12)
        {
            return Err(Error::ContractViolation("trajectories do not share a time grid".into()));
        }
        let mut sup = 0.0_f64;
        for (a, b) in self.snapshots.iter().zip(&other.snapshots) {
            sup = sup.max(norm(&(a - b))?);
        }
        Ok(sup)
    }

    /// Sup over snapshots of a norm of the solution itself.
    pub fn sup_norm<F>(&self, mut norm: F) -> Result<f64>
    where
        F: FnMut(&SpectralField) -> Result<f64>,
    {
        let mut sup = 0.0_f64;
        for s in &self.snapshots {
            sup = sup.max(norm(s)?);
        }
        Ok(sup)
    }
}
