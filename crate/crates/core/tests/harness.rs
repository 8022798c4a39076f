use std::fs;

use nslab::harness::{
    continuous_dependence_with, inviscid_limit_with, rerender, run_continuous_dependence, run_experiment,
    run_inviscid_limit, uniform_bounds_with, CheckStatus, Experiment, ExperimentConfig, ExperimentReport,
};
use nslab::solver::taylor_green;
use nslab::spectral::Grid;
use nslab::Error;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn config(extra_top: &str, data: &str, solver: &str) -> ExperimentConfig {
    let text = format!(
        "radius = 4.0\nepsilon_grid = [0.0, 0.1, 0.01, 0.001]\n{extra_top}\n\
         [index]\ns = 2.0\np = 2.0\nr = 1.0\n\n[data]\nseed = 11\n{data}\n\n[solver]\ngrid = 32\n{solver}\n"
    );
    ExperimentConfig::from_toml(&text).unwrap()
}

fn status(report: &ExperimentReport, name: &str) -> CheckStatus {
    report.check(name).unwrap_or_else(|| panic!("missing check {name}")).status
}

#[test]
fn taylor_green_inviscid_gap_is_exact() {
    // S^ε u₀ = e^{-2εt} u₀ and S^0 u₀ = u₀, so A(ε) = ‖u₀‖_{B^s}(1 - e^{-2εT}) with ‖u₀‖_{B^s} = 1/√2.
    let cfg = config("", "profile = \"smooth\"", "horizon = 0.5\ndt = 0.01");
    let u0 = taylor_green(Grid::new(32).unwrap(), 0.0, 0.0);
    let report = inviscid_limit_with(&cfg, &u0).unwrap();
    assert_eq!(report.steps, 50);
    for row in report.rows("A") {
        let eps = row.epsilon.unwrap();
        let oracle = (1.0 - (-2.0 * eps * 0.5f64).exp()) / SQRT2;
        assert!((row.value - oracle).abs() < 1e-12, "eps {eps}: {} vs {oracle}", row.value);
    }
    assert_eq!(status(&report, "A_vanishes_inviscid"), CheckStatus::Pass);
    assert_eq!(status(&report, "A_decreasing"), CheckStatus::Pass);
    let fit = report.fit("A", None).unwrap();
    assert!((fit.slope - 1.0).abs() < 0.05, "{}", fit.slope);
}

#[test]
fn taylor_green_bounds_are_attained_at_start() {
    let cfg = config("", "profile = { single_block = 0 }\namplitude = 0.25", "horizon = 0.2\ndt = 0.01");
    let u0 = taylor_green(Grid::new(32).unwrap(), 0.0, 0.0);
    let report = uniform_bounds_with(&cfg, &u0).unwrap();
    for row in report.rows("sup_norm") {
        assert!((row.value - 1.0 / SQRT2).abs() < 1e-12);
        assert!((row.ratio.unwrap() - 1.0).abs() < 1e-12);
    }
    assert!(report.verdict.passed(), "{:?}", report.checks);
}

#[test]
fn triangle_and_tail_hold_on_truncated_data() {
    let cfg = config("truncation_levels = [1, 2]", "profile = \"borderline\"", "");
    let report = run_inviscid_limit(&cfg).unwrap();
    assert_eq!(status(&report, "triangle_consistency"), CheckStatus::Pass);
    assert_eq!(status(&report, "tail_monotone"), CheckStatus::Pass);
    let legs: Vec<_> = report.rows("triangle_legs").collect();
    for a in report.rows("A").filter(|r| r.epsilon != Some(0.0)) {
        for l in legs.iter().filter(|l| l.epsilon == a.epsilon) {
            assert!(a.value <= l.value + 1e-10);
        }
    }
    assert_eq!(report.rows("triangle").count(), 3);
    assert!(report.horizon > 0.0 && report.horizon <= 1.0);
    assert_eq!(report.config.solver.horizon, Some(report.horizon));
}

#[test]
fn zero_perturbation_gives_zero_difference() {
    let cfg = config("delta_grid = [0.0, 0.1, 0.01]\ntruncation_levels = [1]", "profile = \"smooth\"\namplitude = 0.5", "horizon = 0.1\ndt = 0.01");
    let report = run_continuous_dependence(&cfg).unwrap();
    let zero: Vec<_> = report.rows("modulus").filter(|r| r.delta == Some(0.0)).collect();
    assert_eq!(zero.len(), 4);
    assert!(zero.iter().all(|r| r.value == 0.0));
    assert!(report.rows("weak_lipschitz").all(|r| r.delta != Some(0.0)));
    assert_eq!(status(&report, "modulus_monotone"), CheckStatus::Pass);
}

#[test]
fn band_limited_approximation_is_skipped() {
    let cfg = config(
        "delta_grid = [0.1, 0.01]\ntruncation_levels = [3]",
        "profile = \"smooth\"\nmax_block = 0\namplitude = 0.5",
        "horizon = 0.1\ndt = 0.01",
    );
    let report = run_continuous_dependence(&cfg).unwrap();
    assert_eq!(status(&report, "approximation[N=3]"), CheckStatus::Flagged);
    assert_eq!(report.rows("approximation").count(), 0);
}

#[test]
fn perturbations_scale_linearly_in_the_weak_norm() {
    let cfg = config("delta_grid = [1e-2, 1e-3, 1e-4]", "profile = \"smooth\"\namplitude = 0.5", "horizon = 0.1\ndt = 0.01");
    let phi = taylor_green(Grid::new(32).unwrap(), 0.0, 0.0);
    let report = continuous_dependence_with(&cfg, &phi).unwrap();
    for eps in [0.0, 0.001, 0.01, 0.1] {
        let r: Vec<f64> = report.rows("weak_lipschitz").filter(|r| r.epsilon == Some(eps)).map(|r| r.ratio.unwrap()).collect();
        assert_eq!(r.len(), 3);
        assert!((r[0] / r[2] - 1.0).abs() < 0.05, "{r:?}");
    }
}

#[test]
fn bad_horizon_is_reported_as_too_large() {
    let cfg = config("", "profile = \"borderline\"\namplitude = 1.5", "horizon = 40.0\ndt = 0.1");
    match run_inviscid_limit(&cfg) {
        Err(Error::Infeasible(msg)) => assert!(msg.contains("T too large for R"), "{msg}"),
        other => panic!("expected a horizon diagnostic, got {:?}", other.map(|r| r.verdict)),
    }
}

#[test]
fn data_outside_the_ball_are_rejected() {
    let cfg = config("", "profile = \"smooth\"\namplitude = 5.0", "");
    assert!(matches!(run_inviscid_limit(&cfg), Err(Error::Config(_))));
}

#[test]
fn manifest_reruns_are_bit_identical() {
    let cfg = config("truncation_levels = [1, 2]", "profile = \"borderline\"", "");
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let report = run_inviscid_limit(&cfg).unwrap();
    let written = report.write(first.path()).unwrap();
    let manifest = written.iter().find(|p| p.to_string_lossy().ends_with(".manifest.toml")).unwrap();
    let rerun_cfg = ExperimentConfig::from_toml(&fs::read_to_string(manifest).unwrap()).unwrap();
    let rerun = run_experiment(Experiment::InviscidLimit, &rerun_cfg).unwrap();
    assert_eq!(rerun.stem(), report.stem());
    rerun.write(second.path()).unwrap();
    for path in &written {
        let twin = second.path().join(path.file_name().unwrap());
        assert_eq!(fs::read(path).unwrap(), fs::read(twin).unwrap(), "{}", path.display());
    }
    let csv = fs::read(first.path().join(format!("{}.csv", report.stem()))).unwrap();
    fs::remove_file(first.path().join(format!("{}.csv", report.stem()))).unwrap();
    rerender(first.path()).unwrap();
    assert_eq!(fs::read(first.path().join(format!("{}.csv", report.stem()))).unwrap(), csv);
    let back = ExperimentReport::from_json(&report.to_json().unwrap()).unwrap();
    assert_eq!(back.to_json().unwrap(), report.to_json().unwrap());
}
