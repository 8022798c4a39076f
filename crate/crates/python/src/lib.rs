//! Python bindings: Besov norms of stored or sampled fields, solver runs,
//! viscosity sweeps and the sampled estimate checks.

use std::path::{Path, PathBuf};

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use nslab::estimates::{
    check_interpolation, check_pressure_estimate, check_product_estimate, check_transport_estimate,
    standard_transport_scenarios, ConstantReport, SamplePlan,
};
use nslab::harness::{run_experiment, Experiment, ExperimentConfig};
use nslab::littlewood_paley::{BesovIndex, DyadicFilterBank};
use nslab::solver::{read_field, taylor_green, SolveJob};
use nslab::spectral::{snapshot, transform_forward, Grid, LpExponent, SpectralField};

create_exception!(nslab, NslabError, PyException);

fn py_err(e: nslab::Error) -> PyErr {
    NslabError::new_err(e.to_string())
}

fn exponent(x: f64) -> PyResult<LpExponent> {
    if x.is_infinite() && x > 0.0 {
        Ok(LpExponent::Infinity)
    } else {
        LpExponent::new(x).map_err(py_err)
    }
}

fn index(s: f64, p: f64, r: f64) -> PyResult<BesovIndex> {
    Ok(BesovIndex::new(s, exponent(p)?, exponent(r)?))
}

fn norm_of(field: &SpectralField, s: f64, p: f64, r: f64) -> PyResult<f64> {
    DyadicFilterBank::for_grid(field.grid()).besov_norm(field, &index(s, p, r)?).map_err(py_err)
}

/// Besov norm of a BNSL snapshot. Pass `float("inf")` for an infinite exponent.
#[pyfunction]
fn besov_norm(path: PathBuf, s: f64, p: f64, r: f64) -> PyResult<f64> {
    norm_of(&read_field(&path).map_err(py_err)?, s, p, r)
}

/// Besov norm of grid values laid out component-major, then row-major over an `n x n` grid.
#[pyfunction]
#[pyo3(signature = (values, n, s, p, r, components = 1))]
fn besov_norm_of_values(values: Vec<f64>, n: usize, s: f64, p: f64, r: f64, components: usize) -> PyResult<f64> {
    let grid = Grid::new(n).map_err(py_err)?;
    let field = transform_forward(grid, components, &values).map_err(py_err)?;
    norm_of(&field, s, p, r)
}

/// Rows `(j, ‖Δ_j u‖_p, 2^{js}‖Δ_j u‖_p)` of a BNSL snapshot.
#[pyfunction]
fn block_table(path: PathBuf, s: f64, p: f64) -> PyResult<Vec<(i32, f64, f64)>> {
    let field = read_field(&path).map_err(py_err)?;
    let bank = DyadicFilterBank::for_grid(field.grid());
    let p = exponent(p)?;
    let raw = bank.block_norms(&field, p).map_err(py_err)?;
    let weighted = bank.weighted_blocks(&field, s, p).map_err(py_err)?;
    Ok(weighted.into_iter().zip(raw).map(|((j, w), b)| (j, b, w)).collect())
}

/// Store the Taylor-Green vortex at time `t` and viscosity `epsilon`.
#[pyfunction]
#[pyo3(signature = (path, n, t = 0.0, epsilon = 0.0))]
fn write_taylor_green(path: PathBuf, n: usize, t: f64, epsilon: f64) -> PyResult<()> {
    let grid = Grid::new(n).map_err(py_err)?;
    snapshot::write(&path, &taylor_green(grid, t, epsilon).with_time(t), epsilon).map_err(py_err)
}

/// Run a solver job file and store its trajectory; returns `(steps, dt, snapshots)`.
#[pyfunction]
fn solve(config: PathBuf, out: PathBuf) -> PyResult<(usize, f64, usize)> {
    let text = std::fs::read_to_string(&config)?;
    let job = SolveJob::from_toml(&text).map_err(py_err)?;
    let traj = job.run(config.parent().unwrap_or(Path::new("."))).map_err(py_err)?;
    traj.save(&out).map_err(py_err)?;
    Ok((traj.steps, traj.dt, traj.snapshots.len()))
}

/// Run `"inviscid"`, `"contdep"` or `"bounds"` from a config file; returns
/// `(passed, report_json)` and writes the outputs when `out` is given.
#[pyfunction]
#[pyo3(signature = (kind, config, out = None))]
fn sweep(kind: &str, config: PathBuf, out: Option<PathBuf>) -> PyResult<(bool, String)> {
    let experiment = match kind {
        "inviscid" => Experiment::InviscidLimit,
        "contdep" => Experiment::ContinuousDependence,
        "bounds" => Experiment::UniformBounds,
        other => return Err(NslabError::new_err(format!("unknown sweep {other:?}"))),
    };
    let cfg = ExperimentConfig::from_toml(&std::fs::read_to_string(&config)?).map_err(py_err)?;
    let report = run_experiment(experiment, &cfg).map_err(py_err)?;
    if let Some(dir) = out {
        report.write(&dir).map_err(py_err)?;
    }
    Ok((report.verdict.passed(), report.to_json().map_err(py_err)?))
}

/// Sampled check of `"product"`, `"pressure"`, `"transport"` or `"interp"` at
/// index `(s, p, r)`; returns one `(passed, report_json)` per report.
#[pyfunction]
#[pyo3(signature = (estimate, s, p, r, seed = 1, samples = 200, grids = vec![64, 128]))]
fn verify(estimate: &str, s: f64, p: f64, r: f64, seed: u64, samples: usize, grids: Vec<usize>) -> PyResult<Vec<(bool, String)>> {
    let idx = index(s, p, r)?;
    let plan = SamplePlan::new(seed, samples, &grids).map_err(py_err)?;
    let reports: Vec<ConstantReport> = match estimate {
        "product" => vec![check_product_estimate(&idx, &plan).map_err(py_err)?],
        "pressure" => check_pressure_estimate(&idx, &plan).map_err(py_err)?.into(),
        "transport" => {
            let scenarios = standard_transport_scenarios(plan.grids[0], &idx, seed).map_err(py_err)?;
            vec![check_transport_estimate(&idx, &scenarios, &[0.0, 1e-3, 1e-2, 1e-1]).map_err(py_err)?]
        }
        "interp" => vec![check_interpolation(&idx, &plan).map_err(py_err)?],
        other => return Err(NslabError::new_err(format!("unknown estimate {other:?}"))),
    };
    reports.iter().map(|r| Ok((r.verdict.passed(), r.to_json().map_err(py_err)?))).collect()
}

#[pymodule(name = "nslab")]
fn nslab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NslabError", m.py().get_type::<NslabError>())?;
    m.add_function(wrap_pyfunction!(besov_norm, m)?)?;
    m.add_function(wrap_pyfunction!(besov_norm_of_values, m)?)?;
    m.add_function(wrap_pyfunction!(block_table, m)?)?;
    m.add_function(wrap_pyfunction!(write_taylor_green, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
