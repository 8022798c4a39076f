use num_complex::Complex64;

use super::config::SolverConfig;
use super::integrator::{lawson_rk4, IntegratingFactor};
use super::trajectory::{gradient_norms, Trajectory, TrajectoryDiagnostics};
use crate::error::{Error, Result};
use crate::littlewood_paley::DyadicFilterBank;
use crate::spectral::{advect, dealias, dealias_in_place, SpectralField};

/// Snapshot spacing of a sampled velocity may not exceed this many transport steps.
pub const MAX_SAMPLE_SPACING_IN_STEPS: f64 = 4.0;

pub type TimeField<'a> = Box<dyn Fn(f64) -> SpectralField + Send + Sync + 'a>;

/// Advecting velocity `v(t, x)`.
pub enum Velocity<'a> {
    Zero,
    /// Spatially constant `(c₁, c₂)`; advected exactly in frequency space.
    Constant([f64; 2]),
    Steady(SpectralField),
    Function(TimeField<'a>),
    /// Snapshot-based, cubically interpolated in time.
    Sampled(&'a Trajectory),
}

/// Source term `g(t, x)`.
pub enum Forcing<'a> {
    None,
    Steady(SpectralField),
    Function(TimeField<'a>),
}

impl Forcing<'_> {
    fn at(&self, t: f64) -> Option<SpectralField> {
        match self {
            Forcing::None => None,
            Forcing::Steady(g) => Some(g.clone()),
            Forcing::Function(g) => Some(g(t)),
        }
    }
}

impl Velocity<'_> {
    fn check(&self, cfg: &SolverConfig, dt: f64) -> Result<()> {
        match self {
            Velocity::Steady(v) => {
                v.expect_grid(cfg.grid)?;
                v.expect_components(2)
            }
            Velocity::Sampled(traj) => {
                let times = traj.times();
                if times.len() < 4 {
                    return Err(Error::Config("sampled velocity needs at least 4 snapshots".into()));
                }
                if times[0] > 1e-12 || *times.last().unwrap() < cfg.horizon - 1e-9 {
                    return Err(Error::Config("sampled velocity does not cover [0, T]".into()));
                }
                let spacing = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
                if spacing > MAX_SAMPLE_SPACING_IN_STEPS * dt * (1.0 + 1e-9) {
                    return Err(Error::Config(format!(
                        "velocity snapshot spacing {spacing:.3e} is too coarse for dt {dt:.3e}"
                    )));
                }
                traj.snapshots[0].expect_grid(cfg.grid)
            }
            _ => Ok(()),
        }
    }

    /// Velocity field at time `t` (`None` for zero/constant velocities).
    fn at(&self, t: f64) -> Option<SpectralField> {
        match self {
            Velocity::Zero | Velocity::Constant(_) => None,
            Velocity::Steady(v) => Some(v.clone()),
            Velocity::Function(f) => Some(f(t)),
            Velocity::Sampled(traj) => Some(interpolate(traj, t)),
        }
    }

    fn max_speed(&self, t: f64) -> f64 {
        match self {
            Velocity::Zero => 0.0,
            Velocity::Constant(c) => c[0].hypot(c[1]),
            _ => self
                .at(t)
                .map(|v| v.to_physical().magnitudes().into_iter().fold(0.0, f64::max))
                .unwrap_or(0.0),
        }
    }

    /// `v·∇f` dealiased (exact for constant velocities).
    fn advection(&self, f: &SpectralField, t: f64) -> Result<Option<(SpectralField, f64)>> {
        match self {
            Velocity::Zero => Ok(None),
            Velocity::Constant(c) => {
                let grid = f.grid();
                let n = grid.n();
                let len = grid.len();
                let mut out = f.clone();
                for comp in 0..f.components() {
                    let coeffs = &mut out.coeffs_mut()[comp * len..(comp + 1) * len];
                    for i1 in 0..n {
                        let k1 = grid.derivative_wavenumber(i1);
                        for i2 in 0..n {
                            let k2 = grid.derivative_wavenumber(i2);
                            coeffs[i1 * n + i2] *= Complex64::new(0.0, c[0] * k1 + c[1] * k2);
                        }
                    }
                }
                Ok(Some((out, c[0].hypot(c[1]))))
            }
            _ => {
                let v = self.at(t).expect("field velocity");
                let speed = v.to_physical().magnitudes().into_iter().fold(0.0, f64::max);
                Ok(Some((advect(&v, f)?, speed)))
            }
        }
    }
}

/// Four-point Lagrange interpolation between the snapshots bracketing `t`.
fn interpolate(traj: &Trajectory, t: f64) -> SpectralField {
    let times = traj.times();
    let m = times.len();
    let pos = times.partition_point(|&s| s <= t).clamp(1, m - 1) - 1;
    let start = pos.saturating_sub(1).min(m - 4);
    let nodes = &times[start..start + 4];
    let mut out = SpectralField::zeros(traj.snapshots[0].grid(), traj.snapshots[0].components());
    for (i, &ti) in nodes.iter().enumerate() {
        let w: f64 = nodes
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, &tj)| (t - tj) / (ti - tj))
            .product();
        out.axpy(w, &traj.snapshots[start + i]);
    }
    out
}

/// Integrate `∂_t f + v·∇f − εΔf = g` with the same integrating-factor RK4
/// scheme as the Navier-Stokes solver, without projection. `f` may carry any
/// number of components. Diagnostics record the norms of `f` and the
/// `V_p` integrals of `v`.
pub fn solve_transport_diffusion(
    f0: &SpectralField,
    velocity: &Velocity<'_>,
    forcing: &Forcing<'_>,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    f0.expect_grid(cfg.grid)?;
    let mut f = if cfg.dealias { dealias(f0) } else { f0.clone() };
    f.set_time(Some(0.0));

    let (steps, dt) = cfg.time_grid(velocity.max_speed(0.0));
    velocity.check(cfg, dt)?;
    let ifac = IntegratingFactor::new(cfg.grid, cfg.epsilon, dt);
    let idx = cfg.diagnostics_index;
    let bank = DyadicFilterBank::for_grid(cfg.grid);
    let limit = cfg.blowup_factor * bank.besov_norm(&f, &idx)?.max(f64::MIN_POSITIVE);
    let velocity_norms = |t: f64| -> Result<_> {
        match velocity.at(t) {
            Some(v) => gradient_norms(&v, idx.p),
            None => Ok(Default::default()),
        }
    };

    let mut diagnostics = TrajectoryDiagnostics::default();
    diagnostics.record(0.0, &f, &velocity_norms(0.0)?, &idx)?;
    let mut snapshots = vec![f.clone()];
    let dx = cfg.grid.spacing();

    let rhs = |state: &SpectralField, t: f64| -> Result<(SpectralField, f64)> {
        let mut out = SpectralField::zeros(state.grid(), state.components());
        let mut speed = 0.0;
        if let Some((adv, s)) = velocity.advection(state, t)? {
            out.axpy(-1.0, &adv);
            speed = s;
        }
        if let Some(g) = forcing.at(t) {
            g.expect_compatible(state)?;
            out.axpy(1.0, &g);
        }
        if cfg.dealias {
            dealias_in_place(&mut out);
        }
        Ok((out, speed))
    };

    for step in 0..steps {
        let t = step as f64 * dt;
        let (next, speed) = lawson_rk4(&f, t, dt, &ifac, rhs)?;
        let courant = speed * dt / dx;
        diagnostics.max_courant = diagnostics.max_courant.max(courant);
        if courant > cfg.cfl_limit {
            return Err(Error::Cfl { time: t, courant, limit: cfg.cfl_limit });
        }
        let t_next = (step + 1) as f64 * dt;
        if !next.is_finite() {
            return Err(Error::NonFinite { time: t_next });
        }
        f = next.with_time(t_next);
        if (step + 1) % cfg.snapshot_stride == 0 || step + 1 == steps {
            diagnostics.record(t_next, &f, &velocity_norms(t_next)?, &idx)?;
            let norm = *diagnostics.besov_s_norm.last().unwrap();
            if norm > limit {
                return Err(Error::LeftBall { time: t_next, norm, limit });
            }
            snapshots.push(f.clone());
        }
    }
    Ok(Trajectory { config: cfg.clone(), dt, steps, snapshots, diagnostics })
}
