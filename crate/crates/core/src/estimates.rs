//! Sampled checks of inequalities whose constants are not explicit. Each check
//! draws seeded random fields, evaluates both sides and reports the worst ratio
//! per grid together with its growth under grid doubling.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::data::{job_rng, resolved_top, synthesize, DataSpec, FieldKind, SpectralProfile};
use crate::littlewood_paley::{lipschitz_norm, BesovIndex, DyadicFilterBank};
use crate::solver::{
    pressure_gradient, pressure_gradient_pair, shear, solve_ns, solve_transport_diffusion, taylor_green, Forcing,
    SolverConfig, Velocity,
};
use crate::spectral::{advect, jacobian, lp_norm, Grid, LpExponent, SpectralField};

/// Allowed growth of the worst ratio from grid `n` to `2n`.
pub const REFINEMENT_TOLERANCE: f64 = 1.25;
/// Slack on the exact interpolation inequality.
pub const INTERPOLATION_SLACK: f64 = 1e-10;
/// Allowed relative spread of a transport ratio across the viscosity grid.
pub const EPSILON_SPREAD_TOLERANCE: f64 = 0.10;
/// Allowed relative change of the weak pressure ratio under `(u, v) → (v, u)`.
pub const SWAP_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridWorst {
    pub n: usize,
    pub worst_ratio: f64,
    pub worst_sample: usize,
}

/// One transport run: scenario, viscosity, measured ratio and `V_p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub scenario: String,
    pub epsilon: f64,
    pub ratio: f64,
    pub vp: f64,
    pub sup_norm: f64,
    pub data_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub estimate_id: String,
    pub index: Option<BesovIndex>,
    pub samples: usize,
    pub worst_ratio: f64,
    pub per_grid: Vec<GridWorst>,
    /// Largest `worst(2n) / worst(n)` over consecutive grids.
    pub refinement_growth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry_defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_spread: Option<f64>,
    /// Smallest `C` with `ratio ≤ C e^{C V_p}` over all transport records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted_constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scenarios: Vec<ScenarioRecord>,
    pub verdict: Verdict,
}

impl ConstantReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One-line summary for terminal output.
    pub fn summary(&self) -> String {
        let mut line = format!("{}: {} worst_ratio={:.6e}", self.estimate_id, self.verdict, self.worst_ratio);
        if let Some(idx) = &self.index {
            line.push_str(&format!(" idx={idx}"));
        }
        if let Some(g) = self.refinement_growth {
            line.push_str(&format!(" growth={g:.4}"));
        }
        if let Some(d) = self.symmetry_defect {
            line.push_str(&format!(" swap_defect={d:.2e}"));
        }
        if let Some(s) = self.epsilon_spread {
            line.push_str(&format!(" eps_spread={s:.4}"));
        }
        if let Some(c) = self.fitted_constant {
            line.push_str(&format!(" C={c:.4}"));
        }
        line
    }
}

/// Seed, sample count and the grids on which every sample is drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePlan {
    pub seed: u64,
    pub samples: usize,
    pub grids: Vec<Grid>,
}

impl Default for SamplePlan {
    fn default() -> Self {
        Self { seed: 1, samples: 200, grids: vec![Grid::new(64).unwrap(), Grid::new(128).unwrap()] }
    }
}

impl SamplePlan {
    pub fn new(seed: u64, samples: usize, grids: &[usize]) -> Result<Self> {
        let grids = grids.iter().map(|&n| Grid::new(n)).collect::<Result<Vec<_>>>()?;
        let plan = Self { seed, samples, grids };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grids.is_empty() {
            return Err(Error::Config("sample plan needs at least one grid".into()));
        }
        if self.grids.windows(2).any(|w| w[1].n() <= w[0].n()) {
            return Err(Error::Config("sample plan grids must be increasing".into()));
        }
        Ok(())
    }

    /// Profiles shared by every grid of the plan.
    fn profiles(&self) -> Vec<SpectralProfile> {
        let top = resolved_top(self.grids[0]);
        let mut out = vec![SpectralProfile::Smooth, SpectralProfile::Borderline];
        out.extend((-1..=top).map(SpectralProfile::SingleBlock));
        out
    }

    /// Sample `i` on `grid`: a divergence-free field and a partner of `kind`,
    /// with profiles cycling over all ordered pairs.
    fn draw(&self, grid: Grid, idx: &BesovIndex, i: usize, kind: FieldKind) -> Result<(SpectralField, SpectralField)> {
        let profiles = self.profiles();
        let m = profiles.len();
        let mut rng = job_rng(self.seed, i as u64);
        let u = synthesize(grid, idx, &DataSpec::new(self.seed, profiles[i % m]), FieldKind::Solenoidal, &mut rng)?;
        let f = synthesize(grid, idx, &DataSpec::new(self.seed, profiles[(i / m) % m]), kind, &mut rng)?;
        Ok((u, f))
    }

    fn evaluate<T, F>(&self, eval: F) -> Result<Vec<Vec<T>>>
    where
        T: Send,
        F: Fn(Grid, usize) -> Result<T> + Sync,
    {
        self.validate()?;
        self.grids
            .iter()
            .map(|&g| (0..self.samples).into_par_iter().map(|i| eval(g, i)).collect::<Result<Vec<T>>>())
            .collect()
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

fn worst_of(values: &[f64]) -> (f64, usize) {
    let mut worst = (0.0, 0);
    for (i, &v) in values.iter().enumerate() {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v > worst.0 {
            worst = (v, i);
        }
    }
    worst
}

fn growth(per_grid: &[GridWorst]) -> Option<f64> {
    per_grid
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].worst_ratio, w[1].worst_ratio);
            if b == 0.0 {
                0.0
            } else if a == 0.0 {
                f64::INFINITY
            } else {
                b / a
            }
        })
        .reduce(f64::max)
}

fn summarize(estimate_id: &str, index: Option<BesovIndex>, plan: &SamplePlan, ratios: &[Vec<f64>]) -> ConstantReport {
    let per_grid: Vec<GridWorst> = plan
        .grids
        .iter()
        .zip(ratios)
        .map(|(g, r)| {
            let (worst_ratio, worst_sample) = worst_of(r);
            GridWorst { n: g.n(), worst_ratio, worst_sample }
        })
        .collect();
    let worst_ratio = per_grid.iter().map(|g| g.worst_ratio).fold(0.0, f64::max);
    let refinement_growth = growth(&per_grid);
    let ok = worst_ratio.is_finite() && refinement_growth.is_none_or(|g| g <= REFINEMENT_TOLERANCE);
    ConstantReport {
        estimate_id: estimate_id.to_string(),
        index,
        samples: plan.samples,
        worst_ratio,
        per_grid,
        refinement_growth,
        symmetry_defect: None,
        epsilon_spread: None,
        fitted_constant: None,
        scenarios: Vec::new(),
        verdict: Verdict::from_bool(ok),
    }
}

/// `‖u·∇f‖_{B^{s-1}} ≤ C ‖u‖_{B^{s-1}} ‖f‖_{B^s}` for divergence-free `u`, scalar `f`.
pub fn check_product_estimate(idx: &BesovIndex, plan: &SamplePlan) -> Result<ConstantReport> {
    idx.require_admissible()?;
    let weak = idx.with_s(idx.s - 1.0);
    let ratios = plan.evaluate(|g, i| {
        let (u, f) = plan.draw(g, idx, i, FieldKind::Scalar)?;
        product_ratio(&u, &f, idx, &weak)
    })?;
    Ok(summarize("product", Some(*idx), plan, &ratios))
}

fn product_ratio(u: &SpectralField, f: &SpectralField, idx: &BesovIndex, weak: &BesovIndex) -> Result<f64> {
    let bank = DyadicFilterBank::for_grid(u.grid());
    let lhs = bank.besov_norm(&advect(u, f)?, weak)?;
    Ok(ratio(lhs, bank.besov_norm(u, weak)? * bank.besov_norm(f, idx)?))
}

/// Ratios of both pressure bounds for one pair: the `B^s` bound with Lipschitz
/// norms, the `B^{s-1}` bound with the `min`, and the latter with `u`, `v` swapped.
pub fn pressure_ratios(u: &SpectralField, v: &SpectralField, idx: &BesovIndex) -> Result<[f64; 3]> {
    let bank = DyadicFilterBank::for_grid(u.grid());
    let weak = idx.with_s(idx.s - 1.0);
    let (lip_u, lip_v) = (lipschitz_norm(u)?, lipschitz_norm(v)?);
    let [us, uw] = norms_pair(&bank, u, idx)?;
    let [vs, vw] = norms_pair(&bank, v, idx)?;
    let p_uv = pressure_gradient_pair(u, v)?;
    let p_vu = pressure_gradient_pair(v, u)?;
    let [ls, lw] = norms_pair(&bank, &p_uv, idx)?;
    let lw_swapped = bank.besov_norm(&p_vu, &weak)?;
    let strong = ratio(ls, lip_u * vs + lip_v * us);
    let rhs_weak = (uw * vs).min(vw * us);
    Ok([strong, ratio(lw, rhs_weak), ratio(lw_swapped, (vw * us).min(uw * vs))])
}

fn norms_pair(bank: &DyadicFilterBank, u: &SpectralField, idx: &BesovIndex) -> Result<[f64; 2]> {
    let v = bank.besov_norms(u, idx.p, idx.r, &[idx.s, idx.s - 1.0])?;
    Ok([v[0], v[1]])
}

/// Both pressure bounds: `[strong (B^s), weak (B^{s-1}, min form)]`. The weak
/// report also carries the largest relative change under `(u, v) → (v, u)`.
pub fn check_pressure_estimate(idx: &BesovIndex, plan: &SamplePlan) -> Result<[ConstantReport; 2]> {
    idx.require_admissible()?;
    let triples = plan.evaluate(|g, i| {
        let (u, v) = plan.draw(g, idx, i, FieldKind::Solenoidal)?;
        pressure_ratios(&u, &v, idx)
    })?;
    let pick = |k: usize| triples.iter().map(|t| t.iter().map(|r| r[k]).collect()).collect::<Vec<Vec<f64>>>();
    let strong = summarize("pressure", Some(*idx), plan, &pick(0));
    let mut weak = summarize("pressure_weak", Some(*idx), plan, &pick(1));
    let defect = triples
        .iter()
        .flatten()
        .map(|r| if r[1] == r[2] { 0.0 } else { (r[1] - r[2]).abs() / r[1].abs().max(r[2].abs()) })
        .fold(0.0, f64::max);
    weak.symmetry_defect = Some(defect);
    if defect > SWAP_TOLERANCE {
        weak.verdict = Verdict::Fail;
    }
    Ok([strong, weak])
}

/// `‖u‖_{B^s} ≤ ‖u‖_{B^{s-1}}^{1/2} ‖u‖_{B^{s+1}}^{1/2}`; exact, so the worst
/// ratio must not exceed `1 + 1e-10`.
pub fn check_interpolation(idx: &BesovIndex, plan: &SamplePlan) -> Result<ConstantReport> {
    let ratios = plan.evaluate(|g, i| {
        let (u, _) = plan.draw(g, idx, i, FieldKind::Scalar)?;
        interpolation_ratio(&u, idx)
    })?;
    let mut report = summarize("interpolation", Some(*idx), plan, &ratios);
    report.verdict = Verdict::from_bool(report.worst_ratio <= 1.0 + INTERPOLATION_SLACK);
    Ok(report)
}

pub fn interpolation_ratio(u: &SpectralField, idx: &BesovIndex) -> Result<f64> {
    let b = DyadicFilterBank::for_grid(u.grid()).besov_norms(u, idx.p, idx.r, &[idx.s, idx.s - 1.0, idx.s + 1.0])?;
    Ok(ratio(b[0], (b[1] * b[2]).sqrt()))
}

/// Which velocity integral controls the transport bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VpVariant {
    /// `∫ ‖∇v‖_{B^{d/p}_{p,∞} ∩ L^∞}`, for `σ < 1 + d/p`.
    Critical,
    /// `∫ ‖∇v‖_{B^{σ-1}_{p,r}}`, for `σ > 1 + d/p` or `σ = 1 + d/p, r = 1`.
    Regular,
    /// `∫ ‖∇v‖_{L^∞}`, for self-transport.
    Lipschitz,
}

/// Case split for divergence-free transport at regularity `sigma`.
pub fn select_vp_variant(sigma: &BesovIndex) -> Result<VpVariant> {
    let d = Grid::DIMENSION as f64;
    let inv_p = sigma.p.reciprocal();
    let lower = -1.0 - d * inv_p.min(1.0 - inv_p);
    if sigma.s <= lower {
        return Err(Error::Config(format!("regularity {} must exceed {lower}", sigma.s)));
    }
    let crit = sigma.critical_s();
    if (sigma.s - crit).abs() <= 1e-12 {
        if sigma.r.value() == 1.0 {
            Ok(VpVariant::Regular)
        } else {
            Err(Error::Config(format!("regularity {} = 1 + d/p requires r = 1", sigma.s)))
        }
    } else if sigma.s < crit {
        Ok(VpVariant::Critical)
    } else {
        Ok(VpVariant::Regular)
    }
}

/// Advecting velocity of a transport scenario.
#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioVelocity {
    Zero,
    Constant([f64; 2]),
    Steady(SpectralField),
    /// `f = v`: the datum is a velocity evolved by Navier-Stokes, with
    /// forcing `-∇P`.
    SelfTransport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportScenario {
    pub name: String,
    pub f0: SpectralField,
    pub velocity: ScenarioVelocity,
    pub forcing: Option<SpectralField>,
    pub horizon: f64,
    pub dt: f64,
}

fn velocity_integrand(v: &SpectralField, variant: VpVariant, sigma: &BesovIndex) -> Result<f64> {
    let grad = jacobian(v)?;
    let bank = DyadicFilterBank::for_grid(v.grid());
    let linf = lp_norm(&grad, LpExponent::Infinity);
    Ok(match variant {
        VpVariant::Lipschitz => linf,
        VpVariant::Critical => {
            let crit = Grid::DIMENSION as f64 * sigma.p.reciprocal();
            bank.besov_norm(&grad, &BesovIndex::new(crit, sigma.p, LpExponent::Infinity))?.max(linf)
        }
        VpVariant::Regular => bank.besov_norm(&grad, &sigma.with_s(sigma.s - 1.0))?,
    })
}

fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times.windows(2).zip(values.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum()
}

/// Run one scenario at one viscosity.
pub fn run_scenario(scenario: &TransportScenario, sigma: &BesovIndex, epsilon: f64) -> Result<ScenarioRecord> {
    let grid = scenario.f0.grid();
    let cfg = SolverConfig::new(grid, epsilon, scenario.horizon).with_dt(scenario.dt).with_diagnostics_index(*sigma);
    let bank = DyadicFilterBank::for_grid(grid);
    let (traj, forcing_integral, vp) = match &scenario.velocity {
        ScenarioVelocity::SelfTransport => {
            let traj = solve_ns(&scenario.f0, &cfg)?;
            let g: Vec<f64> = traj
                .snapshots
                .iter()
                .map(|u| bank.besov_norm(&pressure_gradient(u)?, sigma))
                .collect::<Result<_>>()?;
            let integral = trapezoid(traj.times(), &g);
            let vp = *traj.diagnostics.vp_lipschitz.last().unwrap();
            (traj, integral, vp)
        }
        other => {
            let variant = select_vp_variant(sigma)?;
            let (velocity, rate) = match other {
                ScenarioVelocity::Zero => (Velocity::Zero, 0.0),
                ScenarioVelocity::Constant(c) => (Velocity::Constant(*c), 0.0),
                ScenarioVelocity::Steady(v) => (Velocity::Steady(v.clone()), velocity_integrand(v, variant, sigma)?),
                ScenarioVelocity::SelfTransport => unreachable!(),
            };
            let forcing = match &scenario.forcing {
                Some(g) => Forcing::Steady(g.clone()),
                None => Forcing::None,
            };
            let g_norm = match &scenario.forcing {
                Some(g) => bank.besov_norm(g, sigma)?,
                None => 0.0,
            };
            let traj = solve_transport_diffusion(&scenario.f0, &velocity, &forcing, &cfg)?;
            (traj, g_norm * scenario.horizon, rate * scenario.horizon)
        }
    };
    let norms = &traj.diagnostics.besov_s_norm;
    let sup_norm = norms.iter().cloned().fold(0.0, f64::max);
    let data_norm = norms[0] + forcing_integral;
    Ok(ScenarioRecord {
        scenario: scenario.name.clone(),
        epsilon,
        ratio: ratio(sup_norm, data_norm),
        vp,
        sup_norm,
        data_norm,
    })
}

/// Smallest `C ≥ 0` with `ratio ≤ C e^{C V_p}` for every record.
pub fn fit_growth_constant(records: &[ScenarioRecord]) -> f64 {
    let ok = |c: f64| records.iter().all(|r| r.ratio <= c * (c * r.vp).exp());
    let mut hi = records.iter().map(|r| r.ratio).fold(0.0, f64::max);
    if !hi.is_finite() {
        return f64::INFINITY;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Relative spread `(max - min) / min` of each scenario's ratios over the
/// viscosity grid; the largest over scenarios.
fn epsilon_spread(records: &[ScenarioRecord]) -> f64 {
    let mut names: Vec<&str> = records.iter().map(|r| r.scenario.as_str()).collect();
    names.dedup();
    names
        .iter()
        .map(|name| {
            let vals: Vec<f64> = records.iter().filter(|r| r.scenario == *name).map(|r| r.ratio).collect();
            let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            if max == min {
                0.0
            } else {
                (max - min) / min
            }
        })
        .fold(0.0, f64::max)
}

/// Transport-diffusion bound checked over `scenarios × epsilons`. Passes when
/// every ratio is finite and each scenario's ratios agree within 10% across
/// the viscosity grid; one growth constant is fitted for all records.
pub fn check_transport_estimate(sigma: &BesovIndex, scenarios: &[TransportScenario], epsilons: &[f64]) -> Result<ConstantReport> {
    if !epsilons.contains(&0.0) {
        return Err(Error::Config("viscosity grid must contain 0".into()));
    }
    if scenarios.iter().any(|s| s.velocity != ScenarioVelocity::SelfTransport) {
        select_vp_variant(sigma)?;
    }
    let jobs: Vec<(usize, f64)> = (0..scenarios.len()).flat_map(|i| epsilons.iter().map(move |&e| (i, e))).collect();
    let records = jobs
        .par_iter()
        .map(|&(i, e)| run_scenario(&scenarios[i], sigma, e))
        .collect::<Result<Vec<_>>>()?;
    let mut grids: Vec<usize> = scenarios.iter().map(|s| s.f0.grid().n()).collect();
    grids.sort_unstable();
    grids.dedup();
    let per_grid = grids
        .iter()
        .map(|&n| {
            let vals: Vec<f64> = jobs
                .iter()
                .zip(&records)
                .map(|(&(i, _), r)| if scenarios[i].f0.grid().n() == n { r.ratio } else { 0.0 })
                .collect();
            let (worst_ratio, worst_sample) = worst_of(&vals);
            GridWorst { n, worst_ratio, worst_sample }
        })
        .collect::<Vec<_>>();
    let worst_ratio = per_grid.iter().map(|g| g.worst_ratio).fold(0.0, f64::max);
    let spread = epsilon_spread(&records);
    let constant = fit_growth_constant(&records);
    let ok = worst_ratio.is_finite() && spread <= EPSILON_SPREAD_TOLERANCE;
    Ok(ConstantReport {
        estimate_id: "transport".into(),
        index: Some(*sigma),
        samples: records.len(),
        worst_ratio,
        per_grid,
        refinement_growth: None,
        symmetry_defect: None,
        epsilon_spread: Some(spread),
        fitted_constant: Some(constant),
        scenarios: records,
        verdict: Verdict::from_bool(ok),
    })
}

/// Five fixed scenarios on `grid`: pure diffusion, constant translation, a
/// shear, a forced cellular flow and self-transport by Navier-Stokes.
pub fn standard_transport_scenarios(grid: Grid, sigma: &BesovIndex, seed: u64) -> Result<Vec<TransportScenario>> {
    let mut rng = job_rng(seed, 0);
    let mut scalar = |profile| synthesize(grid, sigma, &DataSpec::new(seed, profile), FieldKind::Scalar, &mut rng);
    let (horizon, dt) = (0.25, 2.5e-3);
    let heat = scalar(SpectralProfile::Borderline)?;
    let translated = scalar(SpectralProfile::Smooth)?;
    let sheared = scalar(SpectralProfile::Borderline)?;
    let cellular = scalar(SpectralProfile::Smooth)?;
    let mut rng = job_rng(seed, 1);
    let velocity0 = synthesize(
        grid,
        sigma,
        &DataSpec::new(seed, SpectralProfile::Smooth).with_amplitude(0.1),
        FieldKind::Solenoidal,
        &mut rng,
    )?;
    let scenario = |name: &str, f0, velocity, forcing| TransportScenario {
        name: name.into(),
        f0,
        velocity,
        forcing,
        horizon,
        dt,
    };
    Ok(vec![
        scenario("diffusion", heat, ScenarioVelocity::Zero, None),
        scenario("translation", translated, ScenarioVelocity::Constant([0.7, -0.4]), None),
        scenario("shear", sheared, ScenarioVelocity::Steady(shear(grid, 0.1)), None),
        scenario(
            "cellular_forced",
            cellular,
            ScenarioVelocity::Steady(&taylor_green(grid, 0.0, 0.0) * 0.1),
            Some(SpectralField::cosine_mode(grid, 1, 0, (1, 0), 0.5)),
        ),
        scenario("self_transport", velocity0, ScenarioVelocity::SelfTransport, None),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx() -> BesovIndex {
        BesovIndex::finite(2.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn trivial_ratios() {
        let g = Grid::new(32).unwrap();
        let f = SpectralField::cosine_mode(g, 1, 0, (1, 2), 1.0);
        let zero = SpectralField::zeros(g, 2);
        assert_eq!(product_ratio(&zero, &f, &idx(), &idx().with_s(1.0)).unwrap(), 0.0);
        assert_eq!(interpolation_ratio(&SpectralField::zeros(g, 1), &idx()).unwrap(), 0.0);
        let s = shear(g, 1.0);
        for r in pressure_ratios(&s, &s, &idx()).unwrap() {
            assert!(r < 1e-14, "{r}");
        }
    }

    #[test]
    fn single_block_interpolation_is_equality() {
        let g = Grid::new(64).unwrap();
        for j in -1..=3 {
            let u = synthesize(g, &idx(), &DataSpec::new(4, SpectralProfile::SingleBlock(j)), FieldKind::Scalar, &mut job_rng(4, 0)).unwrap();
            assert!((interpolation_ratio(&u, &idx()).unwrap() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn verdict_rules() {
        let plan = SamplePlan::new(0, 1, &[16, 32]).unwrap();
        let r = summarize("x", None, &plan, &[vec![1.0], vec![1.25]]);
        assert!(r.verdict.passed());
        let r = summarize("x", None, &plan, &[vec![1.0], vec![1.2501]]);
        assert!(!r.verdict.passed());
        let r = summarize("x", None, &plan, &[vec![f64::NAN], vec![1.0]]);
        assert!(!r.verdict.passed());
        assert!(SamplePlan::new(0, 1, &[32, 16]).is_err());
    }

    #[test]
    fn inadmissible_index_rejected() {
        let plan = SamplePlan::new(0, 2, &[16]).unwrap();
        let bad = BesovIndex::finite(1.5, 2.0, 2.0).unwrap();
        assert!(check_product_estimate(&bad, &plan).is_err());
        assert!(check_pressure_estimate(&bad, &plan).is_err());
    }

    #[test]
    fn vp_case_split() {
        let f = |s, p, r| select_vp_variant(&BesovIndex::finite(s, p, r).unwrap());
        assert_eq!(f(1.5, 2.0, 2.0).unwrap(), VpVariant::Critical);
        assert_eq!(f(2.0, 2.0, 1.0).unwrap(), VpVariant::Regular);
        assert_eq!(f(2.5, 2.0, 2.0).unwrap(), VpVariant::Regular);
        assert!(f(2.0, 2.0, 2.0).is_err());
        assert!(f(-2.5, 2.0, 2.0).is_err());
        assert_eq!(f(-1.5, 2.0, 2.0).unwrap(), VpVariant::Critical);
    }

    #[test]
    fn fitted_constant_is_tight() {
        let rec = |ratio, vp| ScenarioRecord { scenario: "a".into(), epsilon: 0.0, ratio, vp, sup_norm: 0.0, data_norm: 0.0 };
        let c = fit_growth_constant(&[rec(1.0, 0.0), rec(2.0f64.exp() * 2.0, 1.0)]);
        assert!((c - 2.0).abs() < 1e-9);
        assert_eq!(fit_growth_constant(&[rec(0.0, 1.0)]), 0.0);
    }

    #[test]
    fn transport_requires_inviscid_member() {
        let g = Grid::new(16).unwrap();
        let scenarios = standard_transport_scenarios(g, &idx(), 0).unwrap();
        assert!(check_transport_estimate(&idx(), &scenarios, &[0.1]).is_err());
    }
}
