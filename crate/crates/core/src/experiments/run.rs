use super::config::*;
use super::oracle::minentropy_oracle_suite;
use super::output::{fit_loglog, Check, ExperimentOutput, NamedFit, ResultRow};
use crate::codes::{SudCode, SudCodeSpec, U1Code, U1CodeSpec};
use crate::erasure::{
    sampled_code_errors, sud_average_env, sud_average_env_closed_form, sud_leading_order, sud_lower_bounds,
    sud_worst_input_search, u1_choi_leading_order, u1_choi_symmetry_term, u1_lower_bounds, u1_worst_leading_order,
    u1_worst_symmetry_term, CodeRef, ErasurePattern, ErrorReport, Metric,
};
use crate::error::{Error, Result};
use crate::minentropy::{
    decoupling_rhs, haar_decoupling_control, u1_decoupling_experiment, u1_hmin_lower_bound_explicit, u1_kappa_bounds,
    u1_lambda_choi, DecouplingStats, SDP_MAX_DIM,
};
use crate::symmetry::schur_decomposition;
use crate::tensor::linalg::max_abs_diff;
use crate::tensor::{derive_seed, purified_distance, DensityMatrix, HilbertFactorization, SeededRng};
use rayon::prelude::*;
use std::sync::Arc;

type Params = Vec<(String, String)>;

fn params(pairs: &[(&str, String)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

struct RowSink<'a> {
    experiment: &'a str,
    params: Params,
    seed: u64,
    rows: Vec<ResultRow>,
}

impl<'a> RowSink<'a> {
    fn new(experiment: &'a str, params: Params, seed: u64) -> Self {
        Self { experiment, params, seed, rows: Vec::new() }
    }

    fn exact(&mut self, metric: &str, value: f64) {
        self.push(metric, value, None, 1);
    }

    fn sampled(&mut self, metric: &str, values: &[f64]) {
        let (mean, se) = mean_stderr(values);
        self.push(metric, mean, Some(se), values.len());
    }

    fn push(&mut self, metric: &str, value: f64, stderr: Option<f64>, samples: usize) {
        self.rows.push(ResultRow {
            experiment: self.experiment.to_string(),
            params: self.params.clone(),
            metric: metric.to_string(),
            value,
            stderr,
            samples,
            seed: self.seed,
        });
    }
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Grid points in declared order: every `α` rule for every `n`.
fn alpha_grid(n: &NGrid, alpha: &[AlphaRule]) -> Result<Vec<(usize, AlphaRule)>> {
    let ns = n.values()?;
    Ok(alpha.iter().flat_map(|&a| ns.iter().map(move |&n| (n, a))).collect())
}

/// Runs one experiment. Grid points run in parallel; rows come out in grid
/// order regardless of completion order.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    match config {
        ExperimentConfig::Scaling(c) => run_scaling(c),
        ExperimentConfig::McU1(c) => run_mc_u1(c),
        ExperimentConfig::McSud(c) => run_mc_sud(c),
        ExperimentConfig::MinentropyVerify(c) => run_minentropy(c),
        ExperimentConfig::Decoupling(c) => run_decoupling(c),
        ExperimentConfig::SudAverage(c) => run_sud_average(c),
        ExperimentConfig::WorstInput(c) => run_worst_input(c),
        ExperimentConfig::Verify(c) => verify_bounds(c),
    }
}

fn metric_name(m: Metric) -> &'static str {
    match m {
        Metric::Purified => "choi-purified",
        Metric::Trace => "choi-trace",
    }
}

fn u1_params(n: usize, k: usize, t: usize, rule: &AlphaRule, alpha: usize) -> Params {
    params(&[("n", n.to_string()), ("k", k.to_string()), ("t", t.to_string()), ("alpha_rule", rule.label()), ("alpha", alpha.to_string())])
}

pub fn run_scaling(c: &ScalingConfig) -> Result<ExperimentOutput> {
    let grid = alpha_grid(&c.n, &c.alpha)?;
    let chunks = grid
        .par_iter()
        .map(|&(n, rule)| {
            let alpha = rule.alpha(n);
            let mut sink = RowSink::new("scaling", u1_params(n, c.k, c.t, &rule, alpha), c.seed);
            let sym = u1_choi_symmetry_term(n, c.k, c.t, alpha)?;
            for &m in &c.metrics {
                sink.exact(metric_name(m), sym.value(m));
            }
            sink.exact("choi-leading-order", u1_choi_leading_order(n, c.k, c.t, alpha));
            if c.worst {
                sink.exact("worst-purified", u1_worst_symmetry_term(n, c.k, c.t, alpha)?);
                sink.exact("worst-leading-order", u1_worst_leading_order(n, c.k, c.t, alpha));
            }
            Ok(sink.rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = ExperimentOutput { rows: chunks.into_iter().flatten().collect(), ..Default::default() };
    let mut metrics: Vec<&str> = c.metrics.iter().map(|&m| metric_name(m)).collect();
    if c.worst {
        metrics.push("worst-purified");
    }
    for rule in &c.alpha {
        let label = rule.label();
        for metric in &metrics {
            let pts: Vec<(f64, f64)> = out
                .select(metric, &[("alpha_rule", &label)])
                .map(|r| (r.param("n").and_then(|v| v.parse().ok()).unwrap_or(f64::NAN), r.value))
                .collect();
            if pts.len() >= 2 {
                let fit = fit_loglog(&pts)?;
                out.fits.push(NamedFit { label: label.clone(), metric: metric.to_string(), fit });
            }
        }
    }
    Ok(out)
}

fn report_rows(sink: &mut RowSink<'_>, reports: &[ErrorReport]) {
    let col = |f: fn(&ErrorReport) -> f64| reports.iter().map(f).collect::<Vec<f64>>();
    sink.sampled("eps-choi-upper", &col(|r| r.eps_choi_upper));
    sink.sampled("decoupling-term", &col(|r| r.decoupling_term));
    sink.sampled("decoupling-trace-norm", &col(|r| r.decoupling_trace_norm));
    sink.sampled("symmetry-term", &col(|r| r.symmetry_term));
    sink.sampled("eps-worst-upper", &col(|r| r.eps_worst_upper));
    let slack = reports.iter().map(|r| r.triangle_slack()).fold(f64::INFINITY, f64::min);
    sink.exact("min-triangle-slack", slack);
    if let Some(r) = reports.first() {
        sink.exact("choi-lower-bound", r.choi_lower_bound);
        sink.exact("worst-lower-bound", r.worst_lower_bound);
    }
}

fn triangle_checks(label: &str, reports: &[ErrorReport]) -> Vec<Check> {
    let slack = reports.iter().map(|r| r.triangle_slack()).fold(f64::INFINITY, f64::min);
    vec![Check::at_least(format!("{label}-triangle"), "triangle-inequality", slack, -1e-10)]
}

pub fn run_mc_u1(c: &McU1Config) -> Result<ExperimentOutput> {
    let grid = alpha_grid(&c.n, &c.alpha)?;
    let mut out = ExperimentOutput::default();
    for (n, rule) in grid {
        let alpha = rule.alpha(n);
        let tag = format!("mc-u1/n{n}/k{}/t{}/a{alpha}", c.k, c.t);
        let reports = (0..c.samples)
            .into_par_iter()
            .map(|s| {
                let code_seed = derive_seed(c.seed, &tag, s as u64);
                let code = U1Code::sample(U1CodeSpec::new(n, c.k, alpha, code_seed)?)?;
                let pattern = if c.random_pattern {
                    ErasurePattern::random(n, c.t, &mut SeededRng::new(derive_seed(code_seed, "pattern", 0)))?
                } else {
                    ErasurePattern::first(n, c.t)?
                };
                sampled_code_errors(CodeRef::U1(&code), &pattern, c.zeta)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut p = u1_params(n, c.k, c.t, &rule, alpha);
        p.push(("zeta".into(), format!("{:?}", c.zeta).to_lowercase()));
        let mut sink = RowSink::new("mc-u1", p, c.seed);
        report_rows(&mut sink, &reports);
        sink.exact("symmetry-closed-form", u1_choi_symmetry_term(n, c.k, c.t, alpha)?.purified);
        out.checks.extend(triangle_checks(&tag, &reports));
        out.rows.extend(sink.rows);
    }
    Ok(out)
}

pub fn run_mc_sud(c: &McSudConfig) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::default();
    for n in c.n.values()? {
        let lambda = c.lambda.partition(n, c.d)?;
        let full = Arc::new(schur_decomposition(n, c.d)?);
        let anc = schur_decomposition(n - 1, c.d)?;
        let tag = format!("mc-sud/n{n}/d{}/t{}/{lambda}", c.d, c.t);
        let pattern = ErasurePattern::first(n, c.t)?;
        let reports = (0..c.samples)
            .into_par_iter()
            .map(|s| {
                let spec = SudCodeSpec::new(n, c.d, lambda.clone(), derive_seed(c.seed, &tag, s as u64))?;
                let code = SudCode::sample_with(spec, &full, &anc)?;
                sampled_code_errors(CodeRef::SuD(&code), &pattern, c.zeta)
            })
            .collect::<Result<Vec<_>>>()?;
        let p = params(&[
            ("n", n.to_string()),
            ("d", c.d.to_string()),
            ("t", c.t.to_string()),
            ("lambda", lambda.to_string()),
            ("zeta", format!("{:?}", c.zeta).to_lowercase()),
        ]);
        let mut sink = RowSink::new("mc-sud", p, c.seed);
        report_rows(&mut sink, &reports);
        sink.exact("leading-order", sud_leading_order(n, c.d));
        out.checks.extend(triangle_checks(&tag, &reports));
        out.rows.extend(sink.rows);
    }
    Ok(out)
}

pub fn run_minentropy(c: &MinEntropyConfig) -> Result<ExperimentOutput> {
    let grid = alpha_grid(&c.n, &c.alpha)?;
    let chunks = grid
        .par_iter()
        .map(|&(n, rule)| {
            let alpha = rule.alpha(n);
            let mut sink = RowSink::new("minentropy", u1_params(n, c.k, c.t, &rule, alpha), c.seed);
            let (lo, hi) = u1_kappa_bounds(n, c.k, c.t, alpha)?;
            sink.exact("hmin-lower", lo);
            sink.exact("hmin-upper", hi);
            sink.exact("hmin-explicit-lower", u1_hmin_lower_bound_explicit(n, c.k, c.t, alpha));
            sink.exact("decoupling-rhs", decoupling_rhs(lo));
            let side = 1usize << (c.t + c.k);
            let mut checks = Vec::new();
            if c.sdp && (n - c.t + 1) * side <= SDP_MAX_DIM && side <= SDP_MAX_DIM {
                let h = u1_lambda_choi(n, c.k, c.t, alpha)?.sdp()?.hmin();
                sink.exact("hmin-sdp", h);
                let name = format!("kappa-({n},{},{},{alpha})", c.k, c.t);
                checks.push(Check::at_least(format!("{name}-lower"), "kappa-sandwich", h + 1e-6, lo));
                checks.push(Check::at_most(format!("{name}-upper"), "kappa-sandwich", h - 1e-6, hi));
            }
            Ok((sink.rows, checks))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = ExperimentOutput::default();
    for (rows, checks) in chunks {
        out.rows.extend(rows);
        out.checks.extend(checks);
    }
    if c.oracle_states > 0 {
        let m = c.oracle_states;
        out.checks.extend(minentropy_oracle_suite(m, m, m, c.seed)?);
    }
    Ok(out)
}

fn decoupling_rows(sink: &mut RowSink<'_>, s: &DecouplingStats) {
    sink.push("trace-norm", s.mean, Some(s.std_error), s.samples);
    sink.exact("rhs", s.rhs);
    sink.exact("hmin-lower", s.hmin_lower);
    sink.push("fraction-below-rhs", s.fraction_below, None, s.samples);
}

pub fn run_decoupling(c: &DecouplingConfig) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::default();
    for (n, rule) in alpha_grid(&c.n, &c.alpha)? {
        let alpha = rule.alpha(n);
        let point_seed = derive_seed(c.seed, &format!("decoupling/n{n}/k{}/t{}/a{alpha}", c.k, c.t), 0);
        let stats = u1_decoupling_experiment(n, c.k, c.t, alpha, c.samples, point_seed)?;
        let mut p = u1_params(n, c.k, c.t, &rule, alpha);
        p.push(("ensemble".into(), "u1".into()));
        let mut sink = RowSink::new("decoupling", p.clone(), point_seed);
        decoupling_rows(&mut sink, &stats);
        out.checks.push(Check::at_most(
            format!("decoupling-n{n}-a{alpha}"),
            "partial-decoupling",
            stats.mean,
            stats.rhs + 3.0 * stats.std_error,
        ));
        out.rows.extend(sink.rows);
        if c.control {
            let ctrl = haar_decoupling_control(n, c.k, c.t, alpha, c.samples, point_seed)?;
            p.last_mut().expect("ensemble column").1 = "haar".into();
            let mut sink = RowSink::new("decoupling", p, point_seed);
            decoupling_rows(&mut sink, &ctrl);
            out.rows.extend(sink.rows);
        }
    }
    Ok(out)
}

pub fn run_sud_average(c: &SudAverageConfig) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::default();
    for n in c.n.values()? {
        let lambda = c.lambda.partition(n, c.d)?;
        let anc = schur_decomposition(n - 1, c.d)?;
        let spec = SudCodeSpec::new(n, c.d, lambda.clone(), c.seed)?;
        let exact = sud_average_env(&spec, &anc, &ErasurePattern::first(n, 1)?)?;
        let closed = sud_average_env_closed_form(n, c.d)?;
        let deviation = max_abs_diff(exact.matrix(), closed.matrix());
        let mixed = DensityMatrix::maximally_mixed(HilbertFactorization::qudits(2, c.d)?);
        let pd = purified_distance(&exact, &mixed)?;
        let lead = sud_leading_order(n, c.d);
        let p = params(&[("n", n.to_string()), ("d", c.d.to_string()), ("lambda", lambda.to_string())]);
        let mut sink = RowSink::new("sud-average", p, c.seed);
        sink.exact("closed-form-deviation", deviation);
        sink.exact("purified-to-mixed", pd);
        sink.exact("leading-order", lead);
        out.checks.push(Check::at_most(format!("closed-form-n{n}"), "sud-average-closed-form", deviation, 1e-10));
        out.checks.push(Check::within(format!("purified-n{n}"), "sud-choi-leading-order", pd, lead, 2.0 / (n * n) as f64));
        out.rows.extend(sink.rows);
    }
    Ok(out)
}

pub fn run_worst_input(c: &WorstInputConfig) -> Result<ExperimentOutput> {
    let ns = c.n.values()?;
    let grid: Vec<(usize, usize)> = c.d.iter().flat_map(|&d| ns.iter().map(move |&n| (d, n))).collect();
    let chunks = grid
        .par_iter()
        .map(|&(d, n)| {
            let mut rng = SeededRng::new(derive_seed(c.seed, &format!("worst-input/d{d}/n{n}"), 0));
            let w = sud_worst_input_search(d, n, c.starts, &mut rng)?;
            let uniform = 1.0 / d as f64;
            let dev = w.p.iter().fold(0.0f64, |a, &x| a.max((x - uniform).abs()));
            let lead = sud_leading_order(n, d);
            let mut sink = RowSink::new("worst-input", params(&[("n", n.to_string()), ("d", d.to_string())]), c.seed);
            sink.exact("epsilon", w.epsilon);
            sink.exact("leading-order", lead);
            sink.exact("uniform-deviation", dev);
            sink.exact("iterations", w.iterations as f64);
            let checks = vec![
                Check::at_most(format!("uniform-d{d}-n{n}"), "sud-worst-input", dev, 1e-6),
                Check::within(format!("epsilon-d{d}-n{n}"), "sud-worst-input", w.epsilon, lead, 1e-4),
            ];
            Ok((sink.rows, checks))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = ExperimentOutput::default();
    for (rows, checks) in chunks {
        out.rows.extend(rows);
        out.checks.extend(checks);
    }
    Ok(out)
}

fn relative_error(x: f64, target: f64) -> f64 {
    (x - target).abs() / target.abs()
}

/// Leading-order agreement and lower-bound consistency of the closed-form
/// symmetry terms, plus an optional Monte Carlo decoupling check.
pub fn verify_bounds(c: &VerifyConfig) -> Result<ExperimentOutput> {
    let mut checks = Vec::new();
    let mut prev_rel: Option<f64> = None;
    for &n in &c.choi_n {
        if n < 2 {
            return Err(Error::Config("verification sizes must be at least 2".into()));
        }
        let alpha = n / 2;
        let sym = u1_choi_symmetry_term(n, 1, 1, alpha)?.purified;
        let lead = u1_choi_leading_order(n, 1, 1, alpha);
        let rel = relative_error(sym, lead);
        checks.push(Check::at_most(format!("u1-choi-n{n}"), "u1-choi-leading-order", rel, c.rel_tol));
        let (choi_lb, _) = u1_lower_bounds(n, 1);
        checks.push(Check::at_least(format!("u1-choi-lower-n{n}"), "u1-lower-bound", sym, choi_lb - 1e-12));
        checks.push(Check::at_most(format!("u1-choi-k1-matches-lower-n{n}"), "u1-lower-bound", relative_error(sym, choi_lb), c.rel_tol));
        if let Some(p) = prev_rel {
            checks.push(Check::at_most(format!("u1-choi-improves-n{n}"), "u1-choi-leading-order", rel, p));
        }
        prev_rel = Some(rel);
    }
    let n = c.worst_n;
    for &k in &c.worst_k {
        let alpha = n / 2;
        let worst = u1_worst_symmetry_term(n, k, 1, alpha)?;
        let lead = u1_worst_leading_order(n, k, 1, alpha);
        checks.push(Check::at_most(format!("u1-worst-n{n}-k{k}"), "u1-worst-leading-order", relative_error(worst, lead), c.rel_tol));
        let (choi_lb, worst_lb) = u1_lower_bounds(n, k);
        checks.push(Check::at_least(format!("u1-worst-lower-n{n}-k{k}"), "u1-lower-bound", worst, worst_lb - 1e-12));
        let choi = u1_choi_symmetry_term(n, k, 1, alpha)?.purified;
        checks.push(Check::at_least(format!("u1-choi-lower-n{n}-k{k}"), "u1-lower-bound", choi, choi_lb - 1e-12));
    }
    for &d in &c.sud_d {
        for &n in &c.sud_n {
            let avg = sud_average_env_closed_form(n, d)?;
            let pd = purified_distance(&avg, &DensityMatrix::maximally_mixed(HilbertFactorization::qudits(2, d)?))?;
            let lead = sud_leading_order(n, d);
            checks.push(Check::at_most(format!("sud-choi-n{n}-d{d}"), "sud-choi-leading-order", relative_error(pd, lead), c.rel_tol));
            checks.push(Check::at_least(format!("sud-choi-lower-n{n}-d{d}"), "sud-lower-bound", pd, sud_lower_bounds(n, d).0 - 1e-12));
        }
    }
    if c.decoupling_samples > 0 {
        let n = c.decoupling_n;
        let s = u1_decoupling_experiment(n, 1, 1, n / 2, c.decoupling_samples, c.seed)?;
        checks.push(Check::at_most(format!("decoupling-n{n}"), "partial-decoupling", s.mean, s.rhs + 3.0 * s.std_error));
    }
    let mut out = ExperimentOutput::default();
    for chk in &checks {
        let p = params(&[("check", chk.name.clone()), ("tag", chk.tag.clone())]);
        let mut sink = RowSink::new("verify", p, c.seed);
        sink.exact("computed", chk.computed);
        sink.exact("bound", chk.bound);
        sink.exact("slack", chk.slack);
        sink.exact("pass", if chk.pass { 1.0 } else { 0.0 });
        out.rows.extend(sink.rows);
    }
    out.checks = checks;
    Ok(out)
}
