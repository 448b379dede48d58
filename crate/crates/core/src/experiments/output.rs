use crate::container::write_atomic;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// One output value. `params` holds the experiment's parameter columns in
/// declared order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub params: Vec<(String, String)>,
    pub metric: String,
    pub value: f64,
    /// Standard error of the mean, Monte Carlo rows only.
    pub stderr: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl ResultRow {
    pub fn param(&self, name: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub points: usize,
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("a fit needs at least two points".into()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::InvalidArgument("log-log fit needs positive data".into()));
    }
    let m = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all x values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(SlopeFit { slope, intercept, residual_rms: (ss / m).sqrt(), points: points.len() })
}

/// A named fit reported in the summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub label: String,
    pub metric: String,
    pub fit: SlopeFit,
}

/// One bound check of the verification suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Which result the check exercises, e.g. `u1-choi-leading-order`.
    pub tag: String,
    pub computed: f64,
    pub bound: f64,
    /// Positive when the check passes.
    pub slack: f64,
    pub pass: bool,
}

impl Check {
    /// `computed <= bound`.
    pub fn at_most(name: impl Into<String>, tag: &str, computed: f64, bound: f64) -> Self {
        let slack = bound - computed;
        Self { name: name.into(), tag: tag.into(), computed, bound, slack, pass: slack >= 0.0 }
    }

    /// `computed >= bound`.
    pub fn at_least(name: impl Into<String>, tag: &str, computed: f64, bound: f64) -> Self {
        let slack = computed - bound;
        Self { name: name.into(), tag: tag.into(), computed, bound, slack, pass: slack >= 0.0 }
    }

    /// `|computed - target| <= tol`; `bound` records the target.
    pub fn within(name: impl Into<String>, tag: &str, computed: f64, target: f64, tol: f64) -> Self {
        let slack = tol - (computed - target).abs();
        Self { name: name.into(), tag: tag.into(), computed, bound: target, slack, pass: slack >= 0.0 }
    }
}

/// Everything an experiment produces.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub fits: Vec<NamedFit>,
    pub checks: Vec<Check>,
}

impl ExperimentOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Rows matching `metric` and every `(param, value)` filter.
    pub fn select<'a>(&'a self, metric: &'a str, filters: &'a [(&'a str, &'a str)]) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.metric == metric && filters.iter().all(|(k, v)| r.param(k) == Some(*v)))
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'a str,
    version: &'a str,
    config_sha256: String,
    seed: u64,
    rows: usize,
    passed: bool,
    fits: &'a [NamedFit],
    checks: &'a [Check],
}

pub fn config_hash(config_bytes: &[u8]) -> String {
    Sha256::digest(config_bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}

/// CSV bytes: `experiment`, the parameter columns, then `metric, value,
/// stderr, samples, seed`.
pub fn csv_bytes(rows: &[ResultRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let names: Vec<String> = rows.first().map(|r| r.params.iter().map(|(k, _)| k.clone()).collect()).unwrap_or_default();
    let mut header = vec!["experiment".to_string()];
    header.extend(names.iter().cloned());
    header.extend(["metric", "value", "stderr", "samples", "seed"].map(String::from));
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        if r.params.len() != names.len() || r.params.iter().zip(&names).any(|((k, _), n)| k != n) {
            return Err(Error::Shape(format!("row for {} has a different parameter schema", r.metric)));
        }
        let mut rec = vec![r.experiment.clone()];
        rec.extend(r.params.iter().map(|(_, v)| v.clone()));
        rec.push(r.metric.clone());
        rec.push(fmt_f64(r.value));
        rec.push(r.stderr.map(fmt_f64).unwrap_or_default());
        rec.push(r.samples.to_string());
        rec.push(r.seed.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes `<out>/<experiment>.csv` and `<out>/<experiment>.summary.json`
/// atomically and returns both paths.
pub fn write_outputs(out_dir: &Path, experiment: &str, config_bytes: &[u8], seed: u64, output: &ExperimentOutput) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("{experiment}.csv"));
    let json_path = out_dir.join(format!("{experiment}.summary.json"));
    write_atomic(&csv_path, &csv_bytes(&output.rows)?)?;
    let summary = Summary {
        experiment,
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: config_hash(config_bytes),
        seed,
        rows: output.rows.len(),
        passed: output.passed(),
        fits: &output.fits,
        checks: &output.checks,
    };
    let mut json = serde_json::to_vec_pretty(&summary).map_err(|e| Error::Io(e.into()))?;
    json.push(b'\n');
    write_atomic(&json_path, &json)?;
    Ok((csv_path, json_path))
}
