use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nslab::bony::{dealiased_product, decompose};
use nslab::estimates::{
    check_interpolation, check_pressure_estimate, check_product_estimate, check_transport_estimate,
    standard_transport_scenarios, ConstantReport, SamplePlan,
};
use nslab::harness::{rerender, run_experiment, Experiment, ExperimentConfig};
use nslab::littlewood_paley::{BesovIndex, DyadicFilterBank};
use nslab::solver::{read_field, SolveJob};
use nslab::spectral::{LpExponent, SpectralField};
use nslab::{Error, Result};

/// Littlewood-Paley analysis and viscosity sweeps for 2D Navier-Stokes/Euler on the torus.
///
/// Exit status: 0 when every verdict passes, 1 when any verdict fails, 2 on
/// usage, configuration or input errors.
#[derive(Parser)]
#[command(name = "nslab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate Navier-Stokes/Euler and store BNSL snapshots with a manifest.
    ///
    /// The config has a `[solver]` table (epsilon, horizon, grid; optional dt,
    /// dealias = true, snapshot_stride = 1, cfl_safety = 0.5, cfl_limit = 1.0,
    /// blowup_factor = 1e3, diagnostics_index = {s = 2, p = 2, r = 1}) and an
    /// `initial` entry: "taylor_green", { snapshot = "<file>" } or
    /// { data = { seed, profile, amplitude = 1, max_block } }.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the dyadic block table and the Besov norm of a stored field.
    Besov {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        /// Integrability exponent, a number >= 1 or `inf`.
        #[arg(long)]
        p: LpExponent,
        /// Summation exponent, a number >= 1 or `inf`.
        #[arg(long)]
        r: LpExponent,
    },
    /// Bony decomposition of a product and its reconstruction residual.
    Decompose {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
    },
    /// Run a viscosity sweep and write JSON, CSV, SVG and a manifest.
    ///
    /// Re-running with `--config <out>/<stem>.manifest.toml` reproduces the
    /// outputs bit for bit. Defaults: horizon_growth = 1.25, max_horizon = 1,
    /// min_steps = 100, slope window [0.9, 1.1], residual <= 0.1, floor
    /// factor 10, weak ratio window [1.5, 2.5], strong ratio window [3, 5],
    /// uniformity 0.25, bound spread 2.
    Sweep {
        experiment: SweepKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sampled checks of the product, pressure, transport and interpolation estimates.
    Verify {
        which: VerifyKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Samples per grid [default: 200, and 500 for the interpolation check].
        #[arg(long)]
        samples: Option<usize>,
        /// Grids for the refinement test, coarsest first.
        #[arg(long, value_delimiter = ',', default_value = "64,128")]
        grids: Vec<usize>,
        /// Write one JSON report per check into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-render CSV and SVG from every report JSON in a directory.
    Report {
        #[arg(long = "in")]
        dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Inviscid,
    Contdep,
    Bounds,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum VerifyKind {
    All,
    Product,
    Pressure,
    Transport,
    Interp,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<bool> {
    let mut out = io::stdout().lock();
    match command {
        Command::Solve { config, out: dir } => solve(&config, &dir, &mut out),
        Command::Besov { field, s, p, r } => besov(&field, BesovIndex::new(s, p, r), &mut out),
        Command::Decompose { u, v } => bony(&u, &v, &mut out),
        Command::Sweep { experiment, config, out: dir } => sweep(experiment, &config, &dir, &mut out),
        Command::Verify { which, seed, samples, grids, out: dir } => {
            verify(which, seed, samples, &grids, dir.as_deref(), &mut out)
        }
        Command::Report { dir } => {
            for path in rerender(&dir)? {
                writeln!(out, "{}", path.display())?;
            }
            Ok(true)
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn solve(config: &Path, dir: &Path, out: &mut impl Write) -> Result<bool> {
    let job = SolveJob::from_toml(&read_text(config)?)?;
    let traj = job.run(config.parent().unwrap_or(Path::new(".")))?;
    traj.save(dir)?;
    let d = &traj.diagnostics;
    writeln!(out, "steps {}  dt {:e}  snapshots {}", traj.steps, traj.dt, traj.snapshots.len())?;
    writeln!(out, "max Courant {:.4}  max divergence defect {:.3e}", d.max_courant, d.max_divergence_defect)?;
    writeln!(
        out,
        "B^s norm  initial {:.6e}  final {:.6e}",
        d.besov_s_norm.first().copied().unwrap_or(0.0),
        d.besov_s_norm.last().copied().unwrap_or(0.0)
    )?;
    writeln!(out, "wrote {}", dir.display())?;
    Ok(true)
}

fn besov(path: &Path, idx: BesovIndex, out: &mut impl Write) -> Result<bool> {
    let field = read_field(path)?;
    let bank = DyadicFilterBank::for_grid(field.grid());
    let raw = bank.block_norms(&field, idx.p)?;
    let weighted = bank.weighted_blocks(&field, idx.s, idx.p)?;
    writeln!(out, "{:>4}  {:>16}  {:>16}", "j", "block L^p", "weighted")?;
    for ((j, w), b) in weighted.iter().zip(&raw) {
        writeln!(out, "{j:>4}  {b:>16.9e}  {w:>16.9e}")?;
    }
    writeln!(out, "norm B^{}_{{{},{}}} = {:.12e}", idx.s, idx.p, idx.r, bank.besov_norm(&field, &idx)?)?;
    Ok(true)
}

fn bony(u: &Path, v: &Path, out: &mut impl Write) -> Result<bool> {
    let u = read_field(u)?;
    let v = read_field(v)?;
    if u.components() != 1 || v.components() != 1 {
        return Err(Error::Config("decompose expects scalar fields (one component each)".into()));
    }
    let terms = decompose(&u, &v)?;
    let product = dealiased_product(&u, &v)?;
    let l2 = |f: &SpectralField| f.energy().sqrt();
    writeln!(out, "||T_u v||_2 = {:.9e}", l2(&terms.t_uv))?;
    writeln!(out, "||T_v u||_2 = {:.9e}", l2(&terms.t_vu))?;
    writeln!(out, "||R(u,v)||_2 = {:.9e}", l2(&terms.remainder))?;
    let scale = l2(&product);
    let residual = if scale > 0.0 { l2(&(&product - &terms.sum())) / scale } else { 0.0 };
    writeln!(out, "relative reconstruction residual = {residual:.3e}")?;
    Ok(true)
}

fn sweep(kind: SweepKind, config: &Path, dir: &Path, out: &mut impl Write) -> Result<bool> {
    let cfg = ExperimentConfig::from_toml(&read_text(config)?)?;
    let experiment = match kind {
        SweepKind::Inviscid => Experiment::InviscidLimit,
        SweepKind::Contdep => Experiment::ContinuousDependence,
        SweepKind::Bounds => Experiment::UniformBounds,
    };
    let report = run_experiment(experiment, &cfg)?;
    writeln!(out, "{}  T = {:e}  dt = {:e}  steps = {}", report.stem(), report.horizon, report.dt, report.steps)?;
    for c in &report.checks {
        writeln!(out, "{:<8} {:<28} {}", c.status, c.name, c.detail)?;
    }
    for path in report.write(dir)? {
        writeln!(out, "wrote {}", path.display())?;
    }
    writeln!(out, "verdict {}", report.verdict)?;
    Ok(report.verdict.passed())
}

fn verify(which: VerifyKind, seed: u64, samples: Option<usize>, grids: &[usize], dir: Option<&Path>, out: &mut impl Write) -> Result<bool> {
    let plan = &SamplePlan::new(seed, samples.unwrap_or(200), grids)?;
    let wants = |k: VerifyKind| which == VerifyKind::All || which == k;
    let indices = [BesovIndex::finite(2.0, 2.0, 1.0)?, BesovIndex::finite(2.5, 2.0, 2.0)?];
    let mut reports: Vec<ConstantReport> = Vec::new();
    for idx in &indices {
        if wants(VerifyKind::Product) {
            reports.push(check_product_estimate(idx, plan)?);
        }
        if wants(VerifyKind::Pressure) {
            reports.extend(check_pressure_estimate(idx, plan)?);
        }
    }
    if wants(VerifyKind::Transport) {
        let sigma = indices[0];
        let grid = plan.grids[0];
        let scenarios = standard_transport_scenarios(grid, &sigma, plan.seed)?;
        reports.push(check_transport_estimate(&sigma, &scenarios, &[0.0, 1e-3, 1e-2, 1e-1])?);
    }
    if wants(VerifyKind::Interp) {
        let interp = SamplePlan::new(seed, samples.unwrap_or(500), grids)?;
        for idx in &indices {
            reports.push(check_interpolation(idx, &interp)?);
        }
    }
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let mut all = true;
    for (k, r) in reports.iter().enumerate() {
        writeln!(out, "{}", r.summary())?;
        all &= r.verdict.passed();
        if let Some(dir) = dir {
            let name = match r.index {
                Some(idx) => format!("{k:02}_{}_s{}_r{}.json", r.estimate_id, idx.s, idx.r),
                None => format!("{k:02}_{}.json", r.estimate_id),
            };
            fs::write(dir.join(name), r.to_json()?)?;
        }
    }
    writeln!(out, "verdict {}", if all { "pass" } else { "fail" })?;
    Ok(all)
}
