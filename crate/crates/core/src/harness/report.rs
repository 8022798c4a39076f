//! Sweep reports: JSON (complete), CSV (flat tables), SVG (log-log fits) and
//! the manifest that reproduces them.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::fit::RateFit;
use crate::error::{Error, Result};
use crate::estimates::Verdict;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    #[serde(rename = "inviscid")]
    InviscidLimit,
    #[serde(rename = "contdep")]
    ContinuousDependence,
    #[serde(rename = "bounds")]
    UniformBounds,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::InviscidLimit => "inviscid",
            Experiment::ContinuousDependence => "contdep",
            Experiment::UniformBounds => "bounds",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inviscid" => Ok(Experiment::InviscidLimit),
            "contdep" => Ok(Experiment::ContinuousDependence),
            "bounds" => Ok(Experiment::UniformBounds),
            other => Err(Error::Config(format!("unknown experiment '{other}'"))),
        }
    }
}

/// One measured value, keyed by the sweep coordinates that apply.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub table: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

impl Row {
    pub fn new(table: &str, value: f64) -> Self {
        Self { table: table.into(), epsilon: None, level: None, delta: None, value, ratio: None }
    }

    pub fn epsilon(mut self, e: f64) -> Self {
        self.epsilon = Some(e);
        self
    }

    pub fn level(mut self, n: i32) -> Self {
        self.level = Some(n);
        self
    }

    pub fn delta(mut self, d: f64) -> Self {
        self.delta = Some(d);
        self
    }

    pub fn ratio(mut self, r: f64) -> Self {
        self.ratio = Some(r);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<i32>,
    /// `None` when too few points cleared the noise floor.
    pub fit: Option<RateFit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Not decidable from the data (e.g. a degenerate fit); does not fail the report.
    Flagged,
}

impl std::fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Flagged => "flagged",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { name: name.into(), status, detail: detail.into() }
    }

    pub fn flagged(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { name: name.into(), status: CheckStatus::Flagged, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub experiment: Experiment,
    pub config_hash: String,
    /// Effective configuration, including the resolved horizon and step.
    pub config: ExperimentConfig,
    pub horizon: f64,
    pub dt: f64,
    pub steps: usize,
    /// Solver self-error scaled to the datum norm.
    pub noise_floor: f64,
    pub datum_norm: f64,
    pub rows: Vec<Row>,
    pub fits: Vec<NamedFit>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

impl ExperimentReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn fit(&self, name: &str, level: Option<i32>) -> Option<&RateFit> {
        self.fits.iter().find(|f| f.name == name && f.level == level).and_then(|f| f.fit.as_ref())
    }

    pub fn rows<'a>(&'a self, table: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.table == table)
    }

    /// `<experiment>__<hash>`.
    pub fn stem(&self) -> String {
        format!("{}__{}", self.experiment.name(), self.config_hash)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text)?;
        if report.schema != REPORT_SCHEMA {
            return Err(Error::Config(format!("unsupported report schema {}", report.schema)));
        }
        Ok(report)
    }

    /// Flat table: one line per measured row and one per fit.
    pub fn to_csv(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Line<'a> {
            kind: &'a str,
            table: &'a str,
            epsilon: Option<f64>,
            level: Option<i32>,
            delta: Option<f64>,
            value: Option<f64>,
            ratio: Option<f64>,
            slope: Option<f64>,
            intercept: Option<f64>,
            residual: Option<f64>,
            points: Option<usize>,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(Line {
                kind: "row",
                table: &r.table,
                epsilon: r.epsilon,
                level: r.level,
                delta: r.delta,
                value: Some(r.value),
                ratio: r.ratio,
                slope: None,
                intercept: None,
                residual: None,
                points: None,
            })?;
        }
        for f in &self.fits {
            w.serialize(Line {
                kind: "fit",
                table: &f.name,
                epsilon: None,
                level: f.level,
                delta: None,
                value: None,
                ratio: None,
                slope: f.fit.as_ref().map(|x| x.slope),
                intercept: f.fit.as_ref().map(|x| x.intercept),
                residual: f.fit.as_ref().map(|x| x.residual),
                points: Some(f.fit.as_ref().map_or(0, |x| x.points())),
            })?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Log-log plot of every successful fit: points and fitted line.
    pub fn to_svg(&self) -> Option<String> {
        let fits: Vec<(&NamedFit, &RateFit)> = self.fits.iter().filter_map(|f| f.fit.as_ref().map(|x| (f, x))).collect();
        if fits.is_empty() {
            return None;
        }
        let (w, h, m) = (640.0, 420.0, 60.0);
        let xs = fits.iter().flat_map(|(_, f)| f.abscissae.iter().copied());
        let ys = fits.iter().flat_map(|(_, f)| f.ordinates.iter().copied());
        let (x0, x1) = bounds(xs);
        let (y0, y1) = bounds(ys);
        let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
        let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
        let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#);
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            w - 2.0 * m,
            h - 2.0 * m
        );
        for d in (x0.ceil() as i32)..=(x1.floor() as i32) {
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">1e{d}</text>"#, px(d as f64), h - m + 16.0);
        }
        for d in (y0.ceil() as i32)..=(y1.floor() as i32) {
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"#, m - 6.0, py(d as f64) + 4.0);
        }
        for (k, (named, fit)) in fits.iter().enumerate() {
            let c = colors[k % colors.len()];
            for (x, y) in fit.abscissae.iter().zip(&fit.ordinates) {
                let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{c}"/>"#, px(*x), py(*y));
            }
            let (a, b) = bounds(fit.abscissae.iter().copied());
            let line = |x: f64| fit.intercept + fit.slope * x;
            let _ = writeln!(
                s,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{c}"/>"#,
                px(a),
                py(line(a)),
                px(b),
                py(line(b))
            );
            let label = match named.level {
                Some(n) => format!("{} N={n}: slope {:.3}", named.name, fit.slope),
                None => format!("{}: slope {:.3}", named.name, fit.slope),
            };
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" fill="{c}">{label}</text>"#, m + 8.0, m + 14.0 + 13.0 * k as f64);
        }
        s.push_str("</svg>\n");
        Some(s)
    }

    /// Write JSON, CSV, SVG (when there is a fit) and the manifest into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = self.write_derived(dir)?;
        let json = dir.join(format!("{}.json", self.stem()));
        fs::write(&json, self.to_json()?)?;
        let manifest = dir.join(format!("{}.manifest.toml", self.stem()));
        fs::write(&manifest, self.config.to_toml()?)?;
        written.insert(0, json);
        written.push(manifest);
        Ok(written)
    }

    /// Write the CSV and SVG renderings only.
    pub fn write_derived(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let csv = dir.join(format!("{}.csv", self.stem()));
        fs::write(&csv, self.to_csv()?)?;
        let mut out = vec![csv];
        if let Some(svg) = self.to_svg() {
            let path = dir.join(format!("{}.svg", self.stem()));
            fs::write(&path, svg)?;
            out.push(path);
        }
        Ok(out)
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let pad = ((hi - lo) * 0.05).max(0.05);
    (lo - pad, hi + pad)
}

/// Re-render CSV and SVG for every report JSON in `dir`.
pub fn rerender(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    entries.sort();
    let mut out = Vec::new();
    for path in entries {
        let report = ExperimentReport::from_json(&fs::read_to_string(&path)?)?;
        out.extend(report.write_derived(dir)?);
    }
    Ok(out)
}
