use num_complex::Complex64;

use super::config::SolverConfig;
use super::integrator::{lawson_rk4, IntegratingFactor};
use super::trajectory::{gradient_norms, Trajectory, TrajectoryDiagnostics};
use crate::error::{Error, Result};
use crate::littlewood_paley::DyadicFilterBank;
use crate::spectral::{
    advect, dealias, dealias_in_place, divergence, divergence_defect, gradient, inverse_neg_laplacian,
    leray_project_in_place, transform_forward, SpectralField,
};

/// Relative divergence tolerated in solver inputs and snapshots.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

fn require_solenoidal(u: &SpectralField, what: &str) -> Result<()> {
    u.expect_components(2)?;
    let defect = divergence_defect(u)?;
    if defect > DIVERGENCE_TOLERANCE {
        return Err(Error::ContractViolation(format!(
            "{what} is not divergence-free (relative defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// `∇P(u)` with `P = (-Δ)^{-1} div(u·∇u)`; the nonlinearity is dealiased.
pub fn pressure_gradient(u: &SpectralField) -> Result<SpectralField> {
    pressure_gradient_pair(u, u)
}

/// `∇(-Δ)^{-1} div(u·∇v)` for divergence-free `u`, `v`.
pub fn pressure_gradient_pair(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    require_solenoidal(u, "pressure input")?;
    require_solenoidal(v, "pressure input")?;
    let convection = advect(u, v)?;
    let pressure = inverse_neg_laplacian(&divergence(&convection)?);
    gradient(&pressure)
}

/// `-𝓛[div(u ⊗ u)]` and the maximum speed of `u`.
pub(crate) fn projected_nonlinearity(u: &SpectralField, dealias: bool) -> Result<(SpectralField, f64)> {
    let grid = u.grid();
    let n = grid.n();
    let len = grid.len();
    let phys = u.to_physical();
    let (a, b) = (phys.component(0), phys.component(1));
    let mut speed = 0.0_f64;
    let mut products = vec![0.0; 3 * len];
    for i in 0..len {
        let (x, y) = (a[i], b[i]);
        speed = speed.max((x * x + y * y).sqrt());
        products[i] = x * x;
        products[len + i] = x * y;
        products[2 * len + i] = y * y;
    }
    let t = transform_forward(grid, 3, &products)?;
    let (uu, uv, vv) = (t.component(0), t.component(1), t.component(2));
    let mut out = vec![Complex64::default(); 2 * len];
    for i1 in 0..n {
        let k1 = grid.derivative_wavenumber(i1);
        for i2 in 0..n {
            let k2 = grid.derivative_wavenumber(i2);
            let idx = i1 * n + i2;
            // -(i k_j T_{j1}, i k_j T_{j2})
            let s1 = k1 * uu[idx] + k2 * uv[idx];
            let s2 = k1 * uv[idx] + k2 * vv[idx];
            out[idx] = Complex64::new(s1.im, -s1.re);
            out[len + idx] = Complex64::new(s2.im, -s2.re);
        }
    }
    let mut rhs = SpectralField::from_coeffs(grid, 2, out)?;
    if dealias {
        dealias_in_place(&mut rhs);
    }
    leray_project_in_place(&mut rhs)?;
    Ok((rhs, speed))
}

fn max_speed(u: &SpectralField) -> f64 {
    u.to_physical().magnitudes().into_iter().fold(0.0, f64::max)
}

/// Fixed-step Navier-Stokes integration one step at a time, so several runs
/// sharing a time grid can be advanced in lockstep.
pub struct NsStepper {
    epsilon: f64,
    dealias: bool,
    stride: usize,
    cfl_limit: f64,
    ifac: IntegratingFactor,
    dt: f64,
    steps: usize,
    step: usize,
    state: SpectralField,
    limit: f64,
    max_courant: f64,
}

impl NsStepper {
    pub fn new(u0: &SpectralField, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        u0.expect_grid(cfg.grid)?;
        require_solenoidal(u0, "initial datum")?;
        let mut state = if cfg.dealias { dealias(u0) } else { u0.clone() };
        state.set_time(Some(0.0));
        let (steps, dt) = cfg.time_grid(max_speed(&state));
        let initial_norm = DyadicFilterBank::for_grid(cfg.grid).besov_norm(&state, &cfg.diagnostics_index)?;
        Ok(Self {
            epsilon: cfg.epsilon,
            dealias: cfg.dealias,
            stride: cfg.snapshot_stride,
            cfl_limit: cfg.cfl_limit,
            ifac: IntegratingFactor::new(cfg.grid, cfg.epsilon, dt),
            dt,
            steps,
            step: 0,
            state,
            limit: cfg.blowup_factor * initial_norm,
            max_courant: 0.0,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn state(&self) -> &SpectralField {
        &self.state
    }

    pub fn max_courant(&self) -> f64 {
        self.max_courant
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.steps
    }

    /// Advance one step; returns whether the new time is a snapshot time.
    pub fn advance(&mut self) -> Result<bool> {
        let t = self.time();
        let dealias = self.dealias;
        let (next, speed) = lawson_rk4(&self.state, t, self.dt, &self.ifac, |v, _| projected_nonlinearity(v, dealias))?;
        let courant = speed * self.dt / self.state.grid().spacing();
        self.max_courant = self.max_courant.max(courant);
        if courant > self.cfl_limit {
            return Err(Error::Cfl { time: t, courant, limit: self.cfl_limit });
        }
        self.step += 1;
        let t_next = self.time();
        if !next.is_finite() {
            return Err(Error::NonFinite { time: t_next });
        }
        self.state = next.with_time(t_next);
        Ok(self.step % self.stride == 0 || self.step == self.steps)
    }

    /// Abort if the diagnostic norm left the ball `blowup_factor · ‖u₀‖`.
    pub fn check_ball(&self, norm: f64) -> Result<()> {
        if norm > self.limit {
            return Err(Error::LeftBall { time: self.time(), norm, limit: self.limit });
        }
        Ok(())
    }
}

/// Integrate `∂_t u + u·∇u − εΔu = −∇P`, `div u = 0` on `[0, T]` with
/// integrating-factor RK4: the viscous term is propagated exactly and the
/// Leray-projected nonlinearity is advanced by classical RK4.
pub fn solve_ns(u0: &SpectralField, cfg: &SolverConfig) -> Result<Trajectory> {
    let mut stepper = NsStepper::new(u0, cfg)?;
    let idx = cfg.diagnostics_index;
    let mut diagnostics = TrajectoryDiagnostics::default();
    let u = stepper.state();
    diagnostics.record(0.0, u, &gradient_norms(u, idx.p)?, &idx)?;
    let mut snapshots = vec![u.clone()];

    while !stepper.is_done() {
        let snapshot = stepper.advance()?;
        diagnostics.max_courant = stepper.max_courant();
        if snapshot {
            let u = stepper.state();
            diagnostics.record(stepper.time(), u, &gradient_norms(u, idx.p)?, &idx)?;
            stepper.check_ball(*diagnostics.besov_s_norm.last().unwrap())?;
            let defect = divergence_defect(u)?;
            diagnostics.max_divergence_defect = diagnostics.max_divergence_defect.max(defect);
            snapshots.push(u.clone());
        }
    }
    Ok(Trajectory { config: cfg.clone(), dt: stepper.dt(), steps: stepper.steps(), snapshots, diagnostics })
}
