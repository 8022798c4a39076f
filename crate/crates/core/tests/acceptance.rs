//! End-to-end acceptance suite. Prints one line per criterion and exits
//! nonzero if any criterion fails unexpectedly.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use nslab::bony::{bony_reconstruct, dealiased_product};
use nslab::estimates::{
    check_interpolation, check_pressure_estimate, check_product_estimate, check_transport_estimate,
    standard_transport_scenarios, SamplePlan, INTERPOLATION_SLACK,
};
use nslab::harness::{
    run_experiment, synthesize_besov_data, CheckStatus, DataSpec, Experiment, ExperimentConfig, ExperimentReport,
    SpectralProfile,
};
use nslab::littlewood_paley::{BesovIndex, DyadicFilterBank};
use nslab::solver::{solve_ns, taylor_green, SolverConfig};
use nslab::spectral::{dealias, lp_norm, Grid, LpExponent, PhysicalField, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
    /// Known to be unattainable at this scale; a pass is reported as unexpected.
    expected_failure: bool,
    run: fn() -> Outcome,
}

fn fixture(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    ExperimentConfig::from_toml(&fs::read_to_string(path).unwrap()).unwrap()
}

fn idx(s: f64, r: f64) -> BesovIndex {
    BesovIndex::finite(s, 2.0, r).unwrap()
}

fn rel_l2(a: &SpectralField, b: &SpectralField) -> f64 {
    lp_norm(&(a - b), LpExponent::Finite(2.0)) / lp_norm(b, LpExponent::Finite(2.0))
}

/// All named checks must pass; returns the failures.
fn failing(report: &ExperimentReport, names: &[String]) -> Vec<String> {
    names
        .iter()
        .filter(|n| report.check(n).map(|c| c.status) != Some(CheckStatus::Pass))
        .map(|n| match report.check(n) {
            Some(c) => format!("{n}: {}", c.detail),
            None => format!("{n}: missing"),
        })
        .collect()
}

fn partition_of_unity() -> Outcome {
    let mut worst = 0.0_f64;
    for n in [64, 128] {
        let bank = DyadicFilterBank::for_grid(Grid::new(n).unwrap());
        let mut total = vec![0.0; n * n];
        for j in bank.block_indices() {
            for (t, p) in total.iter_mut().zip(bank.profile(j).unwrap()) {
                *t += p;
            }
        }
        worst = total.iter().fold(worst, |w, t| w.max((t - 1.0).abs()));
    }
    Outcome::new(worst <= 1e-12, format!("max defect {worst:.2e}"))
}

fn bony_reconstruction() -> Outcome {
    let g = Grid::new(128).unwrap();
    let field = |rng: &mut ChaCha8Rng| {
        let values = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        dealias(&PhysicalField { grid: g, components: 1, values }.to_spectral())
    };
    let mut worst = 0.0_f64;
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (u, v) = (field(&mut rng), field(&mut rng));
        let product = dealiased_product(&u, &v).unwrap();
        worst = worst.max(rel_l2(&bony_reconstruct(&u, &v).unwrap(), &product));
    }
    Outcome::new(worst <= 1e-10, format!("worst residual {worst:.2e} over 50 pairs"))
}

fn solver_anchor() -> Outcome {
    let g = Grid::new(64).unwrap();
    let cfg = SolverConfig::new(g, 0.1, 1.0).with_dt(1e-3).with_stride(10);
    let traj = solve_ns(&taylor_green(g, 0.0, 0.1), &cfg).unwrap();
    let err = traj
        .snapshots
        .iter()
        .zip(traj.times())
        .map(|(u, &t)| rel_l2(u, &taylor_green(g, t, 0.1)))
        .fold(0.0, f64::max);
    let u0 = synthesize_besov_data(g, &idx(2.0, 1.0), &DataSpec::new(1, SpectralProfile::Smooth).with_amplitude(0.5)).unwrap();
    let euler = solve_ns(&u0, &SolverConfig::new(g, 0.0, 1.0).with_dt(1e-3).with_stride(10)).unwrap();
    let e0 = u0.energy();
    let drift = euler.snapshots.iter().map(|u| (u.energy() - e0).abs() / e0).fold(0.0, f64::max);
    Outcome::new(err <= 1e-6 && drift <= 1e-8, format!("Taylor-Green error {err:.2e}, Euler energy drift {drift:.2e}"))
}

fn product_and_pressure() -> Outcome {
    let plan = SamplePlan::new(1, 200, &[64, 128]).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for index in [idx(2.0, 1.0), idx(2.5, 2.0)] {
        let product = check_product_estimate(&index, &plan).unwrap();
        let [strong, weak] = check_pressure_estimate(&index, &plan).unwrap();
        for r in [&product, &strong, &weak] {
            ok &= r.verdict.passed() && r.worst_ratio.is_finite();
            parts.push(format!("{}(s={}) {:.3}", r.estimate_id, index.s, r.refinement_growth.unwrap_or(f64::NAN)));
        }
    }
    Outcome::new(ok, format!("refinement growth: {}", parts.join(", ")))
}

fn transport_uniformity() -> Outcome {
    let sigma = idx(2.0, 1.0);
    let scenarios = standard_transport_scenarios(Grid::new(64).unwrap(), &sigma, 1).unwrap();
    let r = check_transport_estimate(&sigma, &scenarios, &[0.0, 1e-3, 1e-2, 1e-1]).unwrap();
    let spread = r.epsilon_spread.unwrap_or(f64::NAN);
    Outcome::new(r.verdict.passed() && spread <= 0.10, format!("{} scenarios, spread {spread:.4}", scenarios.len()))
}

fn interpolation() -> Outcome {
    let plan = SamplePlan::new(1, 500, &[64]).unwrap();
    let r = check_interpolation(&idx(2.0, 1.0), &plan).unwrap();
    Outcome::new(r.worst_ratio <= 1.0 + INTERPOLATION_SLACK, format!("worst ratio {:.15}", r.worst_ratio))
}

fn inviscid_limit() -> Outcome {
    let report = run_experiment(Experiment::InviscidLimit, &fixture("bandlimited.toml")).unwrap();
    let bad = failing(&report, &["A_vanishes_inviscid".into(), "A_decreasing".into(), "A_slope".into()]);
    let detail = report.check("A_slope").map(|c| c.detail.clone()).unwrap_or_default();
    Outcome::new(bad.is_empty(), if bad.is_empty() { detail } else { bad.join("; ") })
}

fn truncation_consistency() -> Outcome {
    let report = run_experiment(Experiment::InviscidLimit, &fixture("borderline_inviscid.toml")).unwrap();
    let mut names = Vec::new();
    for n in [2, 3, 4] {
        names.push(format!("B_slope[N={n}]"));
        names.push(format!("C_slope[N={n}]"));
    }
    for (a, b) in [(2, 3), (3, 4)] {
        names.push(format!("B_ratio[N={a}->{b}]"));
        names.push(format!("C_ratio[N={a}->{b}]"));
    }
    names.push("triangle_consistency".into());
    names.push("triangle_bound".into());
    let bad = failing(&report, &names);
    let kappa = report.check("triangle_bound").map(|c| c.detail.clone()).unwrap_or_default();
    Outcome::new(bad.is_empty(), if bad.is_empty() { kappa } else { bad.join("; ") })
}

fn continuous_dependence() -> Outcome {
    let report = run_experiment(Experiment::ContinuousDependence, &fixture("borderline_contdep.toml")).unwrap();
    let names: Vec<String> =
        ["modulus_monotone", "modulus_uniform", "weak_lipschitz_bounded", "weak_lipschitz_uniform"].map(String::from).into();
    let bad = failing(&report, &names);
    let detail = report.check("weak_lipschitz_bounded").map(|c| c.detail.clone()).unwrap_or_default();
    Outcome::new(bad.is_empty(), if bad.is_empty() { detail } else { bad.join("; ") })
}

fn determinism() -> Outcome {
    let runs = [
        (Experiment::InviscidLimit, "bandlimited.toml"),
        (Experiment::InviscidLimit, "borderline_inviscid.toml"),
        (Experiment::ContinuousDependence, "borderline_contdep.toml"),
        (Experiment::UniformBounds, "bounds.toml"),
    ];
    let mut compared = 0;
    for (experiment, name) in runs {
        let first = tempfile::tempdir().unwrap();
        let second = tempfile::tempdir().unwrap();
        let written = run_experiment(experiment, &fixture(name)).unwrap().write(first.path()).unwrap();
        let manifest = written.iter().find(|p| p.to_string_lossy().ends_with(".manifest.toml")).unwrap();
        let cfg = ExperimentConfig::from_toml(&fs::read_to_string(manifest).unwrap()).unwrap();
        run_experiment(experiment, &cfg).unwrap().write(second.path()).unwrap();
        for path in &written {
            let twin = second.path().join(path.file_name().unwrap());
            if fs::read(path).unwrap() != fs::read(&twin).unwrap() {
                return Outcome::new(false, format!("{} differs on rerun", path.file_name().unwrap().to_string_lossy()));
            }
            compared += 1;
        }
    }
    Outcome::new(true, format!("{compared} files identical across reruns"))
}

fn main() {
    let minutes = |m: u64| Duration::from_secs(60 * m);
    let criteria = [
        Criterion { id: 1, title: "partition of unity", budget: Duration::from_secs(1), expected_failure: false, run: partition_of_unity },
        Criterion { id: 2, title: "Bony reconstruction", budget: Duration::from_secs(30), expected_failure: false, run: bony_reconstruction },
        Criterion { id: 3, title: "solver anchor", budget: minutes(1), expected_failure: false, run: solver_anchor },
        Criterion { id: 4, title: "product and pressure estimates", budget: minutes(10), expected_failure: false, run: product_and_pressure },
        Criterion { id: 5, title: "transport estimate uniformity", budget: minutes(10), expected_failure: false, run: transport_uniformity },
        Criterion { id: 6, title: "interpolation inequality", budget: minutes(1), expected_failure: false, run: interpolation },
        Criterion { id: 7, title: "inviscid limit rate", budget: minutes(20), expected_failure: false, run: inviscid_limit },
        Criterion { id: 8, title: "truncated-data differences", budget: minutes(30), expected_failure: true, run: truncation_consistency },
        Criterion { id: 9, title: "uniform continuous dependence", budget: minutes(20), expected_failure: false, run: continuous_dependence },
        Criterion { id: 10, title: "determinism", budget: minutes(20), expected_failure: false, run: determinism },
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = 0;
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let passed = outcome.passed && in_time;
        let label = match (passed, c.expected_failure) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (expected)",
            (true, true) => "PASS (unexpected)",
        };
        if passed == c.expected_failure {
            unexpected += 1;
        }
        let timing = if in_time { String::new() } else { format!(" over budget {:?}", c.budget) };
        println!("criterion {:>2} {:<32} {label:<18} {:>7.2}s{timing}  {}", c.id, c.title, elapsed.as_secs_f64(), outcome.detail);
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria did not behave as expected");
        std::process::exit(1);
    }
}
