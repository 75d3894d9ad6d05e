//! Command-line front end: `simulate`, `fit`, `predict` and `compare`.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use crate::data::{self, EncodingOptions, EncodingPlan};
use crate::diagnostics::{self, FitReport};
use crate::error::{Error, Result};
use crate::frequentist;
use crate::linkfun::{LinkFamily, LinkSpec};
use crate::mcmc::{run_mh, MHConfig, PosteriorSamples};
use crate::model::{self, Dataset, Posterior, PriorRegime, PriorSpec};
use crate::parallel::Execution;
use crate::predict;
use crate::report::{self, PredictionRow, RunConfig};
use crate::simgen;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "skewlink", version, about = "Binary regression with symmetric and skewed links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset.
    Simulate(SimulateArgs),
    /// Fit one or all links and write reports.
    Fit(FitArgs),
    /// Predict counts and benefits for a new portfolio from saved fits.
    Predict(PredictArgs),
    /// Merge the per-link reports of a fit directory into one table.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Tabular,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Tabular => "tabular",
        }
    }
}

/// `all` or a single link name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkSelection {
    All,
    One(LinkFamily),
}

impl LinkSelection {
    pub fn families(self) -> Vec<LinkFamily> {
        match self {
            LinkSelection::All => LinkFamily::ALL.to_vec(),
            LinkSelection::One(f) => vec![f],
        }
    }

    fn name(self) -> String {
        match self {
            LinkSelection::All => "all".into(),
            LinkSelection::One(f) => f.name().into(),
        }
    }
}

fn parse_selection(s: &str) -> std::result::Result<LinkSelection, String> {
    if s == "all" {
        Ok(LinkSelection::All)
    } else {
        s.parse().map(LinkSelection::One).map_err(|e: Error| e.to_string())
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Experiment id: 1 (probit truth by default) or 2 (GEV truth).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub experiment: u8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = simgen::DEFAULT_N)]
    pub n: usize,
    /// True link for experiment 1 (ignored for experiment 2).
    #[arg(long, default_value = "probit")]
    pub true_link: LinkFamily,
    /// Shape of the true link when it is skewed.
    #[arg(long)]
    pub true_shape: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SamplerArgs {
    #[arg(long, default_value_t = 20_000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 1_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 50)]
    pub thin: usize,
    #[arg(long, default_value_t = 3)]
    pub chains: usize,
    /// Skip the pilot step-size tuning.
    #[arg(long)]
    pub no_tune: bool,
    /// Tune a single common scale only, without per-parameter step shapes.
    #[arg(long)]
    pub no_shape: bool,
    /// Run chains one after another instead of in parallel.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PriorArgs {
    #[arg(long, default_value_t = 100.0)]
    pub prior_beta_var: f64,
    #[arg(long, default_value_t = 1.0)]
    pub prior_xi_var: f64,
    #[arg(long, default_value_t = 3.0)]
    pub gamma_shape: f64,
    #[arg(long, default_value_t = 4.0)]
    pub gamma_rate: f64,
    /// Use flat priors on the coefficients and `shape^(-c)` on the link shape.
    #[arg(long, value_name = "C")]
    pub noninformative: Option<f64>,
}

impl PriorArgs {
    fn spec(&self) -> Result<PriorSpec> {
        let spec = PriorSpec {
            beta_variance: self.prior_beta_var,
            gev_shape_variance: self.prior_xi_var,
            gamma_shape: self.gamma_shape,
            gamma_rate: self.gamma_rate,
            regime: match self.noninformative {
                Some(c) => PriorRegime::Noninformative { c },
                None => PriorRegime::Informative,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Portfolio CSV or numeric CSV with a `y` column.
    #[arg(long)]
    pub data: PathBuf,
    /// A link name or `all`.
    #[arg(long, default_value = "all", value_parser = parse_selection)]
    pub link: LinkSelection,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    /// Probability mass of the reported intervals.
    #[arg(long, default_value_t = 0.95)]
    pub prob: f64,
    /// Backward Wald elimination for the maximum-likelihood fits.
    #[arg(long)]
    pub reduce: bool,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Added to face amounts before the logarithm.
    #[arg(long, default_value_t = 1.0)]
    pub face_shift: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Output directory of a previous `fit`.
    #[arg(long)]
    pub fit_dir: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "all", value_parser = parse_selection)]
    pub link: LinkSelection,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0.95)]
    pub prob: f64,
    #[arg(long)]
    pub sequential: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub fit_dir: PathBuf,
    /// Where to write the merged table; defaults to the fit directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Exit code for an error raised while running a subcommand.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_data_error() {
        EXIT_DATA
    } else if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Fit(a) => cmd_fit(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Compare(a) => cmd_compare(&a),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn write_with_config(path: &Path, config: &RunConfig, body: &str) -> Result<()> {
    fs::write(path, format!("{}{body}", config.comment_block()))?;
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let mut sim = match a.experiment {
        1 => {
            let mut c = simgen::experiment1_config(a.seed);
            c.true_link = LinkSpec::new(a.true_link, a.true_shape)?;
            c
        }
        _ => simgen::experiment2_config(a.seed),
    };
    sim.n = a.n;
    let data = simgen::gen_binary(&sim)?;
    let mut config = RunConfig::default();
    config.push("command", "simulate");
    config.push("version", env!("CARGO_PKG_VERSION"));
    config.push("experiment", a.experiment);
    config.push("seed", a.seed);
    config.push("n", a.n);
    config.push("true_link", sim.true_link);
    config.push("true_beta", format!("{},{},{}", sim.true_beta[0], sim.true_beta[1], sim.true_beta[2]));
    config.push("x1_level_probs", format!("{},{}", sim.x1_level_probs.0, sim.x1_level_probs.1));
    config.push("x1_codes", format!("{},{}", sim.x1_codes.0, sim.x1_codes.1));
    config.push("out", path_str(&a.out));
    let mut body = Vec::new();
    data::write_numeric_csv(&data, &mut body)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write_with_config(&a.out, &config, &String::from_utf8_lossy(&body))?;
    eprintln!("wrote {} rows ({} positives) to {}", data.n(), data.positives(), a.out.display());
    Ok(())
}

/// A loaded input table: design, outcomes and optional face amounts.
struct Loaded {
    y: Vec<u8>,
    x: DMatrix<f64>,
    column_names: Vec<String>,
    face: Option<Vec<f64>>,
}

fn read_header(path: &Path) -> Result<Vec<String>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Schema {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    Ok(reader.headers()?.iter().map(String::from).collect())
}

fn schema_error(path: &Path, e: Error) -> Error {
    match e {
        Error::Invalid(message) => Error::Schema {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    }
}

fn load_numeric(path: &Path) -> Result<Loaded> {
    let file = fs::File::open(path)?;
    let (data, face) = data::read_numeric_csv(file).map_err(|e| schema_error(path, e))?;
    Ok(Loaded {
        y: data.y().to_vec(),
        x: data.x().clone(),
        column_names: data.column_names().to_vec(),
        face,
    })
}

fn cmd_fit(a: &FitArgs) -> Result<()> {
    let prior = a.prior.spec()?;
    if !(a.prob > 0.0 && a.prob < 1.0) {
        return Err(Error::Invalid(format!("--prob must lie in (0, 1), got {}", a.prob)));
    }
    let execution = if a.sampler.sequential { Execution::Sequential } else { Execution::default() };
    let mut mh = MHConfig {
        iterations: a.sampler.iterations,
        burn_in: a.sampler.burn_in,
        thin: a.sampler.thin,
        chains: a.sampler.chains,
        tune: !a.sampler.no_tune,
        seed: a.seed,
        execution,
        ..MHConfig::default()
    };
    mh.tuning.shape = !a.sampler.no_shape;

    let mut config = RunConfig::default();
    config.push("command", "fit");
    config.push("version", env!("CARGO_PKG_VERSION"));
    config.push("data", path_str(&a.data));
    config.push("link", a.link.name());
    config.push("seed", a.seed);
    config.push("iterations", mh.iterations);
    config.push("burn_in", mh.burn_in);
    config.push("thin", mh.thin);
    config.push("chains", mh.chains);
    config.push("tune", mh.tune);
    config.push("tune_shape", mh.tune && mh.tuning.shape);
    config.push("prior_regime", if a.prior.noninformative.is_some() { "noninformative" } else { "informative" });
    config.push("prior_beta_var", prior.beta_variance);
    config.push("prior_xi_var", prior.gev_shape_variance);
    config.push("gamma_shape", prior.gamma_shape);
    config.push("gamma_rate", prior.gamma_rate);
    if let Some(c) = a.prior.noninformative {
        config.push("noninformative_power", c);
    }
    config.push("prob", a.prob);
    config.push("reduce", a.reduce);
    config.push("alpha", a.alpha);
    config.push("face_shift", a.face_shift);
    config.push("format", a.format.name());
    config.push("out", path_str(&a.out));

    ensure_dir(&a.out)?;
    let header = read_header(&a.data)?;
    let (dataset, groups) = if data::is_policy_header(&header) {
        let records = data::load_csv(&a.data)?;
        let options = EncodingOptions {
            face_shift: a.face_shift,
            ..EncodingOptions::default()
        };
        let plan = EncodingPlan::fit(&records, &options)?;
        write_with_config(&a.out.join("plan.txt"), &config, &plan.to_sidecar())?;
        let encoded = plan.encode(&records)?;
        let groups = encoded.groups.clone();
        (encoded.into_dataset()?, groups)
    } else {
        let loaded = load_numeric(&a.data)?;
        let data = Dataset::new(loaded.y, loaded.x, loaded.column_names)?;
        let groups = frequentist::singleton_groups(&data);
        (data, groups)
    };
    eprintln!("{} rows, {} positives, {} design columns", dataset.n(), dataset.positives(), dataset.x().ncols());

    let families = a.link.families();
    let reports = Execution::default().map_indexed(families.len(), |i| {
        fit_one(families[i], &dataset, &groups, a, &prior, &mh, &config)
    });
    let reports = reports.into_iter().collect::<Result<Vec<_>>>()?;
    for r in &reports {
        for note in &r.notes {
            if note.starts_with("chain") || note.starts_with("IRLS") || note.starts_with("negative") {
                eprintln!("warning: {}: {note}", r.family);
            }
        }
    }
    let csv = report::comparison_csv(&reports);
    let text = report::comparison_text(&reports);
    write_with_config(&a.out.join("report.csv"), &config, &csv)?;
    write_with_config(&a.out.join("report.txt"), &config, &text)?;
    print!("{}", if a.format == Format::Text { &text } else { &csv });
    Ok(())
}

fn fit_one(
    family: LinkFamily,
    data: &Dataset,
    groups: &[frequentist::PredictorGroup],
    a: &FitArgs,
    prior: &PriorSpec,
    mh: &MHConfig,
    config: &RunConfig,
) -> Result<FitReport> {
    let report = if family.is_skewed() {
        let posterior = Posterior::new(family, data, *prior);
        let init = posterior.initial_point().to_theta();
        let samples = run_mh(&posterior, &init, model::parameter_names(data, family), mh)?;
        let mut body = Vec::new();
        samples.write_csv(&mut body)?;
        write_with_config(
            &a.out.join(format!("samples_{}.csv", family.name())),
            config,
            &String::from_utf8_lossy(&body),
        )?;
        diagnostics::bayesian_report(&samples, family, data, a.prob, mh.execution)?
    } else {
        let (fit, fitted_data) = if a.reduce {
            let reduced = frequentist::reduce_model(family, data, groups, a.alpha)?;
            (reduced.fit, reduced.data)
        } else {
            (frequentist::fit_glm_mle(family, data)?, data.clone())
        };
        write_with_config(
            &a.out.join(format!("mle_{}.csv", family.name())),
            config,
            &report::mle_csv(&fit.column_names, &fit.estimates, &fit.standard_errors),
        )?;
        diagnostics::mle_report(&fit, &fitted_data, a.prob)?
    };
    write_with_config(
        &a.out.join(format!("report_{}.txt", family.name())),
        config,
        &report::report_to_kv(&report),
    )?;
    Ok(report)
}

/// Columns of `x` named by `wanted`, in that order.
fn select_by_name(x: &DMatrix<f64>, names: &[String], wanted: &[String]) -> Result<DMatrix<f64>> {
    let idx = wanted
        .iter()
        .map(|w| {
            names
                .iter()
                .position(|n| n == w)
                .ok_or_else(|| Error::Dimension(format!("prediction data has no column `{w}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(x.select_columns(&idx))
}

fn cmd_predict(a: &PredictArgs) -> Result<()> {
    if !(a.prob > 0.0 && a.prob < 1.0) {
        return Err(Error::Invalid(format!("--prob must lie in (0, 1), got {}", a.prob)));
    }
    let execution = if a.sequential { Execution::Sequential } else { Execution::default() };
    let mut config = RunConfig::default();
    config.push("command", "predict");
    config.push("version", env!("CARGO_PKG_VERSION"));
    config.push("fit_dir", path_str(&a.fit_dir));
    config.push("data", path_str(&a.data));
    config.push("link", a.link.name());
    config.push("seed", a.seed);
    config.push("threshold", a.threshold);
    config.push("prob", a.prob);
    config.push("format", a.format.name());
    config.push("out", path_str(&a.out));
    ensure_dir(&a.out)?;

    let header = read_header(&a.data)?;
    let loaded = if data::is_policy_header(&header) {
        let plan_path = a.fit_dir.join("plan.txt");
        let plan = EncodingPlan::from_sidecar(&fs::read_to_string(&plan_path)?).map_err(|e| schema_error(&plan_path, e))?;
        let records = data::load_csv(&a.data)?;
        let encoded = plan.encode(&records)?;
        if encoded.clamped > 0 {
            eprintln!("warning: {} face amounts outside the training range were clamped", encoded.clamped);
        }
        Loaded {
            y: encoded.y,
            x: encoded.x,
            column_names: encoded.column_names,
            face: Some(encoded.face),
        }
    } else {
        load_numeric(&a.data)?
    };
    let face = loaded.face.as_deref();
    let actual_count = loaded.y.iter().map(|&v| f64::from(v)).sum::<f64>();
    let actual_benefit = face.map(|f| f.iter().zip(&loaded.y).filter(|(_, &y)| y == 1).map(|(f, _)| f).sum::<f64>());

    let mut families = Vec::new();
    for family in a.link.families() {
        let has_fit = a.fit_dir.join(format!("samples_{}.csv", family.name())).exists()
            || a.fit_dir.join(format!("mle_{}.csv", family.name())).exists();
        if has_fit {
            families.push(family);
        } else if a.link != LinkSelection::All {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("no saved {family} fit in {}", a.fit_dir.display()),
            )));
        }
    }
    let mut combined = Vec::new();
    for family in families {
        let mut rows = Vec::new();
        let q_hat = if family.is_skewed() {
            let path = a.fit_dir.join(format!("samples_{}.csv", family.name()));
            let samples = PosteriorSamples::read_csv(std::io::BufReader::new(fs::File::open(&path)?))?;
            let beta_names = &samples.parameter_names[..samples.dim() - 1];
            let x = select_by_name(&loaded.x, &loaded.column_names, beta_names)?;
            let draws = predict::posterior_predictive(&samples, family, &x, face, a.seed, execution)?;
            let summary = predict::summarize_predictive(&draws, a.prob)?;
            rows.push(PredictionRow::from_summary("posterior_predictive", &summary));
            let order: Vec<usize> = (0..x.nrows()).collect();
            let curves = predict::cumulative_curves(&draws, &order, a.prob)?;
            write_with_config(
                &a.out.join(format!("curves_{}.csv", family.name())),
                &config,
                &report::curves_csv(&curves),
            )?;
            diagnostics::posterior_mean_probs(&samples, family, &x, execution)?
        } else {
            let path = a.fit_dir.join(format!("mle_{}.csv", family.name()));
            let (names, estimates) = report::read_mle_csv(&fs::read_to_string(&path)?)?;
            let x = select_by_name(&loaded.x, &loaded.column_names, &names)?;
            model::predict_probs(&LinkSpec::new(family, None)?, &estimates, &x)?
        };
        for p in predict::point_aggregates(&q_hat, face, a.threshold)? {
            rows.push(PredictionRow::from_point("plug_in", &p));
        }
        rows.push(PredictionRow {
            source: "actual".into(),
            mode: "observed".into(),
            count: actual_count,
            count_interval: None,
            benefit: actual_benefit,
            benefit_interval: None,
        });
        write_with_config(
            &a.out.join(format!("predict_{}.csv", family.name())),
            &config,
            &report::predictions_csv(&rows),
        )?;
        combined.push((family, rows));
    }
    let mut text = String::new();
    let mut csv = String::new();
    for (family, rows) in &combined {
        text.push_str(&format!("[{}]\n{}\n", family.name(), report::predictions_text(rows)));
        let body = report::predictions_csv(rows);
        for (i, line) in body.lines().enumerate() {
            if i == 0 && csv.is_empty() {
                csv.push_str(&format!("link,{line}\n"));
            } else if i > 0 {
                csv.push_str(&format!("{},{line}\n", family.name()));
            }
        }
    }
    write_with_config(&a.out.join("predict.txt"), &config, &text)?;
    write_with_config(&a.out.join("predict.csv"), &config, &csv)?;
    print!("{}", if a.format == Format::Text { &text } else { &csv });
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> Result<()> {
    let mut reports = Vec::new();
    for family in LinkFamily::ALL {
        let path = a.fit_dir.join(format!("report_{}.txt", family.name()));
        if path.exists() {
            reports.push(report::report_from_kv(&fs::read_to_string(&path)?).map_err(|e| schema_error(&path, e))?);
        }
    }
    if reports.is_empty() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("no per-link reports in {}", a.fit_dir.display()),
        )));
    }
    let out = a.out.clone().unwrap_or_else(|| a.fit_dir.clone());
    let mut config = RunConfig::default();
    config.push("command", "compare");
    config.push("version", env!("CARGO_PKG_VERSION"));
    config.push("fit_dir", path_str(&a.fit_dir));
    config.push("format", a.format.name());
    config.push("out", path_str(&out));
    config.push("links", reports.iter().map(|r| r.family.name()).collect::<Vec<_>>().join(","));
    ensure_dir(&out)?;
    let csv = report::comparison_csv(&reports);
    let text = report::comparison_text(&reports);
    write_with_config(&out.join("comparison.csv"), &config, &csv)?;
    write_with_config(&out.join("comparison.txt"), &config, &text)?;
    print!("{}", if a.format == Format::Text { &text } else { &csv });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parsing() {
        assert_eq!(parse_selection("all").unwrap(), LinkSelection::All);
        assert_eq!(parse_selection("gev").unwrap(), LinkSelection::One(LinkFamily::StandardGev));
        assert!(parse_selection("tobit").is_err());
        assert_eq!(LinkSelection::All.families().len(), 6);
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(main_with_args(["skewlink", "simulate", "--experiment", "3", "--out", "x.csv"]), EXIT_USAGE);
        assert_eq!(main_with_args(["skewlink", "fit", "--link", "nope", "--data", "d", "--out", "o"]), EXIT_USAGE);
        assert_eq!(main_with_args(["skewlink", "bogus"]), EXIT_USAGE);
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Record { row: 1, field: "y".into(), message: "bad".into() }), EXIT_DATA);
        assert_eq!(exit_code(&Error::Numerical("x".into())), EXIT_NUMERICAL);
        assert_eq!(exit_code(&Error::Invalid("x".into())), EXIT_USAGE);
    }

    #[test]
    fn column_selection_by_name() {
        let x = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 1.0, 5.0, 6.0]);
        let names = vec!["intercept".to_string(), "a".into(), "b".into()];
        let s = select_by_name(&x, &names, &["intercept".into(), "b".into()]).unwrap();
        assert_eq!(s, DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 1.0, 6.0]));
        assert!(select_by_name(&x, &names, &["c".into()]).is_err());
    }
}
