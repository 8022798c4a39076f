use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nslab::spectral::{snapshot, Grid, SpectralField};

fn nslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nslab")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn besov_of_a_single_mode() {
    // cos(3x₁ + 4x₂): |k| = 5 sits on the plateau of block 1; its L² norm is a/√2.
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("mode.bnsl");
    let a = 0.8;
    snapshot::write(&file, &SpectralField::cosine_mode(Grid::new(32).unwrap(), 1, 0, (3, 4), a), 0.0).unwrap();
    let o = nslab(&["besov", "--field", path(&file), "--s", "1.5", "--p", "2", "--r", "inf"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let nonzero: Vec<&str> = text
        .lines()
        .skip(1)
        .filter(|l| l.split_whitespace().count() == 3)
        .filter(|l| l.split_whitespace().nth(1).unwrap().parse::<f64>().unwrap() != 0.0)
        .collect();
    assert_eq!(nonzero.len(), 1, "{text}");
    assert!(nonzero[0].trim_start().starts_with("1 "));
    let norm: f64 = text.lines().last().unwrap().rsplit(' ').next().unwrap().parse().unwrap();
    let oracle = 2f64.powf(1.5) * a / std::f64::consts::SQRT_2;
    assert!((norm - oracle).abs() < 1e-12 * oracle, "{norm} vs {oracle}");
}

#[test]
fn decompose_reconstructs_the_product() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(32).unwrap();
    let u = dir.path().join("u.bnsl");
    let v = dir.path().join("v.bnsl");
    let mut a = SpectralField::cosine_mode(g, 1, 0, (1, 2), 1.0);
    a.axpy(0.5, &SpectralField::cosine_mode(g, 1, 0, (6, 1), 1.0));
    snapshot::write(&u, &a, 0.0).unwrap();
    snapshot::write(&v, &SpectralField::cosine_mode(g, 1, 0, (3, 5), 1.0), 0.0).unwrap();
    let o = nslab(&["decompose", "--u", path(&u), "--v", path(&v)]);
    assert_eq!(o.status.code(), Some(0));
    let last = stdout(&o).lines().last().unwrap().to_string();
    let residual: f64 = last.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(residual <= 1e-10, "{last}");
}

#[test]
fn verify_interpolation_passes() {
    let o = nslab(&["verify", "interp", "--samples", "40", "--grids", "32,64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("verdict pass\n"));
}

#[test]
fn solve_writes_a_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let o = nslab(&["solve", "--config", path(&fixture("taylor_green.toml")), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let traj = nslab::solver::Trajectory::load(dir.path()).unwrap();
    assert_eq!(traj.snapshots.len(), 11);
    let exact = nslab::solver::taylor_green(traj.config.grid, 1.0, 0.1);
    assert!(traj.last().relative_distance(&exact) < 1e-6);
}

#[test]
fn bandlimited_sweep_reruns_from_its_manifest() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let o = nslab(&["sweep", "inviscid", "--config", path(&fixture("bandlimited.toml")), "--out", path(first.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let csv_path = fs::read_dir(first.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|x| x == "csv"))
        .unwrap();
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let fit = reader
        .records()
        .map(|r| r.unwrap())
        .find(|r| &r[col("kind")] == "fit" && &r[col("table")] == "A")
        .unwrap();
    let slope: f64 = fit[col("slope")].parse().unwrap();
    assert!((0.9..=1.1).contains(&slope), "{slope}");

    let manifest = csv_path.with_extension("manifest.toml");
    let o = nslab(&["sweep", "inviscid", "--config", path(&manifest), "--out", path(second.path())]);
    assert_eq!(o.status.code(), Some(0));
    for entry in fs::read_dir(first.path()).unwrap() {
        let p = entry.unwrap().path();
        let twin = second.path().join(p.file_name().unwrap());
        assert_eq!(fs::read(&p).unwrap(), fs::read(&twin).unwrap(), "{}", p.display());
    }

    fs::remove_file(&csv_path).unwrap();
    let o = nslab(&["report", "--in", path(first.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&csv_path).unwrap(), fs::read(second.path().join(csv_path.file_name().unwrap())).unwrap());
}

#[test]
fn failing_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.toml");
    let text = fs::read_to_string(fixture("bandlimited.toml")).unwrap().replace("grid = 128", "grid = 32")
        + "\n[tolerances]\nslope_window = [1.5, 2.0]\n";
    fs::write(&cfg, text).unwrap();
    let o = nslab(&["sweep", "inviscid", "--config", path(&cfg), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn usage_and_input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = nslab(&["besov", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "radius = \"wide\"\n").unwrap();
    let o = nslab(&["sweep", "bounds", "--config", path(&bad), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let junk = dir.path().join("junk.bnsl");
    fs::write(&junk, b"not a snapshot").unwrap();
    let o = nslab(&["besov", "--field", path(&junk), "--s", "1", "--p", "2", "--r", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("junk.bnsl"));
}
