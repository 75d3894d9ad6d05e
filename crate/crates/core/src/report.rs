//! Serialization of fit and prediction results: a flat `key=value` report per
//! fit, a model-comparison table (CSV and aligned text), and predictive
//! summaries. Every file starts with the resolved run configuration as
//! `# key=value` comment lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::diagnostics::{FitMethod, FitReport, ParameterSummary};
use crate::error::{Error, Result};
use crate::linkfun::LinkFamily;
use crate::predict::{CumulativeCurves, PointAggregate, PredictiveSummary};

/// Ordered `key=value` pairs describing one invocation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub entries: Vec<(String, String)>,
}

impl RunConfig {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn comment_block(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "# {k}={v}");
        }
        s
    }
}

fn method_from(name: &str) -> Result<FitMethod> {
    match name {
        "bayesian" => Ok(FitMethod::Bayesian),
        "mle" => Ok(FitMethod::MaximumLikelihood),
        other => Err(Error::Invalid(format!("unknown fit method `{other}`"))),
    }
}

fn join_floats(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Flat `key=value` body of a fit report.
pub fn report_to_kv(r: &FitReport) -> String {
    let mut s = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(s, "{k}={v}");
    };
    put("family", r.family.name().into());
    put("method", r.method.name().into());
    put("n", r.n.to_string());
    put("positives", r.positives.to_string());
    put("interval_prob", r.interval_prob.to_string());
    put(
        "parameters",
        r.parameters.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join(","),
    );
    for p in &r.parameters {
        put(&format!("param.{}.estimate", p.name), p.estimate.to_string());
        put(&format!("param.{}.estimator_variance", p.name), p.estimator_variance.to_string());
        if let Some(v) = p.sample_variance {
            put(&format!("param.{}.sample_variance", p.name), v.to_string());
        }
        put(&format!("param.{}.lower", p.name), p.lower.to_string());
        put(&format!("param.{}.upper", p.name), p.upper.to_string());
    }
    if let Some(v) = r.dic {
        put("dic", v.to_string());
    }
    if let Some(v) = r.p_d {
        put("p_d", v.to_string());
    }
    if let Some(v) = r.bic {
        put("bic", v.to_string());
    }
    put("neg_log_lik", r.neg_log_lik.to_string());
    put("ks", r.ks.to_string());
    put("max_abs_error", r.ks.to_string());
    put("mae", r.mae.to_string());
    if !r.acceptance_rate.is_empty() {
        put("acceptance_rate", join_floats(&r.acceptance_rate));
    }
    if let Some(c) = r.converged {
        put("converged", c.to_string());
    }
    for (i, note) in r.notes.iter().enumerate() {
        put(&format!("note.{i}"), note.replace('\n', " "));
    }
    s
}

/// Inverse of [`report_to_kv`]; comment lines are ignored.
pub fn report_from_kv(text: &str) -> Result<FitReport> {
    let mut map = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("report line `{line}` is not key=value")))?;
        map.insert(k.to_string(), v.to_string());
    }
    let get = |k: &str| -> Result<&str> {
        map.get(k)
            .map(String::as_str)
            .ok_or_else(|| Error::Invalid(format!("report is missing `{k}`")))
    };
    let num = |k: &str| -> Result<f64> {
        get(k)?
            .parse()
            .map_err(|_| Error::Invalid(format!("report value `{k}` is not a number")))
    };
    let opt = |k: &str| -> Result<Option<f64>> {
        if map.contains_key(k) {
            num(k).map(Some)
        } else {
            Ok(None)
        }
    };
    let parameters = get("parameters")?
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|name| {
            Ok(ParameterSummary {
                name: name.to_string(),
                estimate: num(&format!("param.{name}.estimate"))?,
                estimator_variance: num(&format!("param.{name}.estimator_variance"))?,
                sample_variance: opt(&format!("param.{name}.sample_variance"))?,
                lower: num(&format!("param.{name}.lower"))?,
                upper: num(&format!("param.{name}.upper"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let acceptance_rate = match map.get("acceptance_rate") {
        Some(v) => v
            .split(',')
            .map(|x| x.parse().map_err(|_| Error::Invalid("bad acceptance rate".into())))
            .collect::<Result<Vec<f64>>>()?,
        None => Vec::new(),
    };
    let mut notes = Vec::new();
    while let Some(n) = map.get(&format!("note.{}", notes.len())) {
        notes.push(n.clone());
    }
    Ok(FitReport {
        family: get("family")?.parse()?,
        method: method_from(get("method")?)?,
        n: num("n")? as usize,
        positives: num("positives")? as usize,
        interval_prob: num("interval_prob")?,
        parameters,
        dic: opt("dic")?,
        p_d: opt("p_d")?,
        bic: opt("bic")?,
        neg_log_lik: num("neg_log_lik")?,
        ks: num("ks")?,
        mae: num("mae")?,
        acceptance_rate,
        converged: map.get("converged").map(|v| v == "true"),
        notes,
    })
}

/// Row label in the comparison table; every shape parameter shares one row.
fn row_label(family: LinkFamily, name: &str) -> String {
    if family.shape_name() == Some(name) {
        "shape".to_string()
    } else {
        name.to_string()
    }
}

/// One cell per (row, model). Models are ordered by family.
struct Comparison {
    models: Vec<String>,
    parameters: Vec<String>,
    cells: BTreeMap<(String, usize), ParameterSummary>,
    reports: Vec<FitReport>,
}

fn comparison(reports: &[FitReport]) -> Comparison {
    let mut reports = reports.to_vec();
    reports.sort_by_key(|r| LinkFamily::ALL.iter().position(|f| *f == r.family));
    let mut parameters: Vec<String> = Vec::new();
    let mut cells = BTreeMap::new();
    for (m, r) in reports.iter().enumerate() {
        for p in &r.parameters {
            let label = row_label(r.family, &p.name);
            if !parameters.contains(&label) && label != "shape" {
                parameters.push(label.clone());
            }
            cells.insert((label, m), p.clone());
        }
    }
    if cells.keys().any(|(l, _)| l == "shape") {
        parameters.push("shape".into());
    }
    Comparison {
        models: reports.iter().map(|r| r.family.name().to_string()).collect(),
        parameters,
        cells,
        reports,
    }
}

type Metric = (&'static str, fn(&FitReport) -> Option<f64>);

const METRICS: [Metric; 5] = [
    ("DIC", |r| r.dic),
    ("-logLik", |r| Some(r.neg_log_lik)),
    ("BIC", |r| r.bic),
    ("KS", |r| Some(r.ks)),
    ("MAE", |r| Some(r.mae)),
];

/// Long-form CSV: `parameter,statistic,<model…>`. A metric no model has
/// (DIC for MLE-only tables, BIC for MCMC-only ones) gets no row.
pub fn comparison_csv(reports: &[FitReport]) -> String {
    let c = comparison(reports);
    let mut s = format!("parameter,statistic,{}\n", c.models.join(","));
    for label in &c.parameters {
        for (stat, pick) in [
            ("estimate", (|p: &ParameterSummary| p.estimate) as fn(&ParameterSummary) -> f64),
            ("lower", |p| p.lower),
            ("upper", |p| p.upper),
        ] {
            let cells: Vec<String> = (0..c.models.len())
                .map(|m| c.cells.get(&(label.clone(), m)).map(|p| pick(p).to_string()).unwrap_or_default())
                .collect();
            let _ = writeln!(s, "{label},{stat},{}", cells.join(","));
        }
    }
    for (name, pick) in METRICS {
        if c.reports.iter().all(|r| pick(r).is_none()) {
            continue;
        }
        let cells: Vec<String> = c.reports.iter().map(|r| pick(r).map(|v| v.to_string()).unwrap_or_default()).collect();
        let _ = writeln!(s, "{name},value,{}", cells.join(","));
    }
    s
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|j| rows.iter().filter_map(|r| r.get(j)).map(|c| c.chars().count()).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j == 0 {
                    format!("{c:<w$}", w = widths[j])
                } else {
                    format!("{c:>w$}", w = widths[j])
                }
            })
            .collect();
        let _ = writeln!(s, "{}", line.join("  ").trim_end());
    }
    s
}

/// Aligned text table: estimates with their interval underneath, then the
/// fit statistics.
pub fn comparison_text(reports: &[FitReport]) -> String {
    let c = comparison(reports);
    let mut rows = vec![std::iter::once("parameter".to_string()).chain(c.models.iter().cloned()).collect::<Vec<_>>()];
    for label in &c.parameters {
        let mut est = vec![label.clone()];
        let mut int = vec![String::new()];
        for m in 0..c.models.len() {
            match c.cells.get(&(label.clone(), m)) {
                Some(p) => {
                    est.push(format!("{:.4}", p.estimate));
                    int.push(format!("({:.4}, {:.4})", p.lower, p.upper));
                }
                None => {
                    est.push(String::new());
                    int.push(String::new());
                }
            }
        }
        rows.push(est);
        rows.push(int);
    }
    for (name, pick) in METRICS {
        if c.reports.iter().any(|r| pick(r).is_some()) {
            rows.push(
                std::iter::once(name.to_string())
                    .chain(c.reports.iter().map(|r| pick(r).map(|v| format!("{v:.4}")).unwrap_or_default()))
                    .collect(),
            );
        }
    }
    let mut s = aligned(&rows);
    let _ = writeln!(s, "intervals: HPD for MCMC fits, Wald for MLE fits");
    for r in &c.reports {
        if r.family.is_skewed() {
            let _ = writeln!(
                s,
                "{}: shape is {}",
                r.family.name(),
                r.family.shape_name().unwrap_or("-")
            );
        }
    }
    s
}

/// A row of the prediction summary file.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub source: String,
    pub mode: String,
    pub count: f64,
    pub count_interval: Option<(f64, f64)>,
    pub benefit: Option<f64>,
    pub benefit_interval: Option<(f64, f64)>,
}

impl PredictionRow {
    pub fn from_summary(source: &str, s: &PredictiveSummary) -> Self {
        PredictionRow {
            source: source.into(),
            mode: "simulated".into(),
            count: s.mean_count,
            count_interval: Some(s.count_interval),
            benefit: s.mean_benefit,
            benefit_interval: s.benefit_interval,
        }
    }

    pub fn from_point(source: &str, p: &PointAggregate) -> Self {
        PredictionRow {
            source: source.into(),
            mode: p.mode.name().into(),
            count: p.count,
            count_interval: None,
            benefit: p.benefit,
            benefit_interval: None,
        }
    }
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn predictions_csv(rows: &[PredictionRow]) -> String {
    let mut s = String::from("source,mode,count,count_lower,count_upper,benefit,benefit_lower,benefit_upper\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.source,
            r.mode,
            r.count,
            opt_cell(r.count_interval.map(|i| i.0)),
            opt_cell(r.count_interval.map(|i| i.1)),
            opt_cell(r.benefit),
            opt_cell(r.benefit_interval.map(|i| i.0)),
            opt_cell(r.benefit_interval.map(|i| i.1)),
        );
    }
    s
}

pub fn predictions_text(rows: &[PredictionRow]) -> String {
    let mut table = vec![vec![
        "source".to_string(),
        "mode".into(),
        "count".into(),
        "count interval".into(),
        "benefit".into(),
        "benefit interval".into(),
    ]];
    for r in rows {
        table.push(vec![
            r.source.clone(),
            r.mode.clone(),
            format!("{:.2}", r.count),
            r.count_interval.map(|(a, b)| format!("({a:.0}, {b:.0})")).unwrap_or_default(),
            r.benefit.map(|b| format!("{b:.2}")).unwrap_or_default(),
            r.benefit_interval.map(|(a, b)| format!("({a:.2}, {b:.2})")).unwrap_or_default(),
        ]);
    }
    aligned(&table)
}

/// Plot-ready cumulative curve data, one row per position in the ordering.
pub fn curves_csv(curves: &CumulativeCurves) -> String {
    let mut s = String::from(
        "position,observation,mean_count,count_lower,count_upper,mean_benefit,benefit_lower,benefit_upper\n",
    );
    let has_benefit = !curves.mean_benefit.is_empty();
    for (k, &obs) in curves.order.iter().enumerate() {
        let b = |v: &Vec<f64>| if has_benefit { v[k].to_string() } else { String::new() };
        let _ = writeln!(
            s,
            "{},{obs},{},{},{},{},{},{}",
            k + 1,
            curves.mean_count[k],
            curves.count_lower[k],
            curves.count_upper[k],
            b(&curves.mean_benefit),
            b(&curves.benefit_lower),
            b(&curves.benefit_upper),
        );
    }
    s
}

/// MLE coefficient file: `parameter,estimate,std_error`.
pub fn mle_csv(names: &[String], estimates: &[f64], standard_errors: &[f64]) -> String {
    let mut s = String::from("parameter,estimate,std_error\n");
    for ((n, e), se) in names.iter().zip(estimates).zip(standard_errors) {
        let _ = writeln!(s, "{n},{e},{se}");
    }
    s
}

pub fn read_mle_csv(text: &str) -> Result<(Vec<String>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut names = Vec::new();
    let mut estimates = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        names.push(rec.get(0).unwrap_or("").to_string());
        let raw = rec.get(1).unwrap_or("");
        estimates.push(raw.parse().map_err(|_| Error::Record {
            row: i + 1,
            field: "estimate".into(),
            message: format!("not a number: `{raw}`"),
        })?);
    }
    if names.is_empty() {
        return Err(Error::Invalid("coefficient file has no rows".into()));
    }
    Ok((names, estimates))
}
