//! Model assessment: deviance, DIC, empirical HPD intervals, the max/mean
//! absolute error scores, and the per-fit summary report.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::frequentist::{self, MLEFit};
use crate::linkfun::LinkFamily;
use crate::mcmc::PosteriorSamples;
use crate::model::{self, Coefficients, Dataset};
use crate::parallel::Execution;

/// Smallest number of draws accepted by [`hpd_interval`].
pub const MIN_HPD_DRAWS: usize = 20;

/// Draws summed per work unit in [`posterior_mean_probs`]; fixed so that the
/// floating-point reduction order does not depend on the thread count.
const DRAW_BLOCK: usize = 64;

/// `-2 ln L`, with an impossible dataset mapping to `+inf`.
pub fn deviance(family: LinkFamily, coef: &Coefficients, data: &Dataset) -> Result<f64> {
    Ok(-2.0 * model::log_likelihood(family, coef, data)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dic {
    pub dic: f64,
    pub p_d: f64,
    pub mean_deviance: f64,
    /// Deviance at the plug-in point (posterior mean, or the fallback draw).
    pub plug_in_deviance: f64,
    pub plug_in: Vec<f64>,
    /// Set when the posterior mean was infeasible and the highest-density
    /// retained draw was used instead.
    pub fallback: Option<String>,
}

/// `(2·mean - plug_in, mean - plug_in)` from per-draw deviances.
pub fn dic_from_deviances(deviances: &[f64], plug_in_deviance: f64) -> (f64, f64) {
    let mean = deviances.iter().sum::<f64>() / deviances.len() as f64;
    (2.0 * mean - plug_in_deviance, mean - plug_in_deviance)
}

/// Per-draw deviances, in draw order.
pub fn draw_deviances(
    samples: &PosteriorSamples,
    family: LinkFamily,
    data: &Dataset,
    exec: Execution,
) -> Result<Vec<f64>> {
    exec.map_indexed(samples.len(), |s| {
        deviance(family, &Coefficients::from_theta(&samples.draws[s], family), data)
    })
    .into_iter()
    .collect()
}

fn infeasibility(family: LinkFamily, theta: &[f64], data: &Dataset) -> String {
    let coef = Coefficients::from_theta(theta, family);
    match (coef.shape, coef.link(family)) {
        (Some(shape), None) => format!(
            "{} = {shape} lies outside the {family} shape domain",
            family.shape_name().unwrap_or("shape")
        ),
        (_, Some(link)) => {
            let support = link.support();
            let eta = model::predict_probs(&link, &coef.beta, data.x())
                .map(|q| q.iter().zip(data.y()).filter(|(&q, &y)| (y == 1 && q == 0.0) || (y == 0 && q == 1.0)).count())
                .unwrap_or(0);
            format!(
                "{eta} observations fall outside the support [{}, {}] of the {link} link at the posterior mean",
                support.lower, support.upper
            )
        }
        (None, None) => format!("posterior mean is infeasible for {family}"),
    }
}

pub fn dic(samples: &PosteriorSamples, family: LinkFamily, data: &Dataset, exec: Execution) -> Result<Dic> {
    if samples.is_empty() {
        return Err(Error::Invalid("DIC needs at least one draw".into()));
    }
    let deviances = draw_deviances(samples, family, data, exec)?;
    if let Some(s) = deviances.iter().position(|d| !d.is_finite()) {
        return Err(Error::Numerical(format!("retained draw {s} has non-finite deviance")));
    }
    let mean = samples.posterior_mean();
    let at_mean = deviance(family, &Coefficients::from_theta(&mean, family), data)?;
    let (plug_in, plug_in_deviance, fallback) = if at_mean.is_finite() {
        (mean, at_mean, None)
    } else {
        let best = samples.map_draw();
        let reason = infeasibility(family, &mean, data);
        (samples.draws[best].clone(), deviances[best], Some(reason))
    };
    let (dic, p_d) = dic_from_deviances(&deviances, plug_in_deviance);
    Ok(Dic {
        dic,
        p_d,
        mean_deviance: deviances.iter().sum::<f64>() / deviances.len() as f64,
        plug_in_deviance,
        plug_in,
        fallback,
    })
}

/// Shortest window over already sorted draws covering `floor(prob·S) + 1`
/// order statistics; ties go to the lowest start.
fn shortest_window(sorted: &[f64], prob: f64) -> (f64, f64) {
    let s = sorted.len();
    let m = ((prob * s as f64).floor() as usize).min(s - 1);
    let mut best = 0;
    let mut width = f64::INFINITY;
    for j in 0..s - m {
        let w = sorted[j + m] - sorted[j];
        if w < width {
            width = w;
            best = j;
        }
    }
    (sorted[best], sorted[best + m])
}

/// Empirical highest-density interval from the sorted draws.
pub fn hpd_interval(draws: &[f64], prob: f64) -> Result<(f64, f64)> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::Domain(format!("interval probability must lie in (0, 1), got {prob}")));
    }
    if draws.len() < MIN_HPD_DRAWS {
        return Err(Error::Invalid(format!(
            "HPD interval needs at least {MIN_HPD_DRAWS} draws, got {}",
            draws.len()
        )));
    }
    if draws.iter().any(|d| d.is_nan()) {
        return Err(Error::Numerical("draws contain NaN".into()));
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(shortest_window(&sorted, prob))
}

fn check_lengths(y: &[u8], q_hat: &[f64]) -> Result<()> {
    if y.len() != q_hat.len() {
        return Err(Error::Dimension(format!(
            "{} outcomes but {} probabilities",
            y.len(),
            q_hat.len()
        )));
    }
    Ok(())
}

/// `max |y - q̂|`. Not the classical Kolmogorov–Smirnov distance.
pub fn max_abs_error(y: &[u8], q_hat: &[f64]) -> Result<f64> {
    check_lengths(y, q_hat)?;
    Ok(y.iter()
        .zip(q_hat)
        .map(|(&y, &q)| (f64::from(y) - q).abs())
        .fold(0.0, f64::max))
}

/// Alias for [`max_abs_error`], the name used in the report tables.
pub fn ks_stat(y: &[u8], q_hat: &[f64]) -> Result<f64> {
    max_abs_error(y, q_hat)
}

pub fn mae(y: &[u8], q_hat: &[f64]) -> Result<f64> {
    check_lengths(y, q_hat)?;
    if y.is_empty() {
        return Ok(0.0);
    }
    Ok(y.iter().zip(q_hat).map(|(&y, &q)| (f64::from(y) - q).abs()).sum::<f64>() / y.len() as f64)
}

/// Mean over retained draws of each row's success probability.
pub fn posterior_mean_probs(
    samples: &PosteriorSamples,
    family: LinkFamily,
    x: &DMatrix<f64>,
    exec: Execution,
) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Invalid("no posterior draws".into()));
    }
    let blocks = samples.len().div_ceil(DRAW_BLOCK);
    let partial = exec.map_indexed(blocks, |b| -> Result<Vec<f64>> {
        let mut acc = vec![0.0; x.nrows()];
        for theta in &samples.draws[b * DRAW_BLOCK..((b + 1) * DRAW_BLOCK).min(samples.len())] {
            let coef = Coefficients::from_theta(theta, family);
            let link = coef
                .link(family)
                .ok_or_else(|| Error::Domain(format!("draw has an invalid {family} shape")))?;
            for (a, q) in acc.iter_mut().zip(model::predict_probs(&link, &coef.beta, x)?) {
                *a += q;
            }
        }
        Ok(acc)
    });
    let mut total = vec![0.0; x.nrows()];
    for block in partial {
        for (t, v) in total.iter_mut().zip(block?) {
            *t += v;
        }
    }
    let s = samples.len() as f64;
    Ok(total.into_iter().map(|t| t / s).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    Bayesian,
    MaximumLikelihood,
}

impl FitMethod {
    pub fn name(self) -> &'static str {
        match self {
            FitMethod::Bayesian => "bayesian",
            FitMethod::MaximumLikelihood => "mle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSummary {
    pub name: String,
    /// Posterior mean, or the MLE.
    pub estimate: f64,
    /// `Σ(θ - θ̄)²/N²` for posterior draws; squared standard error for the MLE.
    pub estimator_variance: f64,
    /// `Σ(θ - θ̄)²/(N-1)`; absent for the MLE.
    pub sample_variance: Option<f64>,
    /// HPD interval for posterior draws, Wald interval for the MLE.
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub family: LinkFamily,
    pub method: FitMethod,
    pub n: usize,
    pub positives: usize,
    pub interval_prob: f64,
    pub parameters: Vec<ParameterSummary>,
    pub dic: Option<f64>,
    pub p_d: Option<f64>,
    pub bic: Option<f64>,
    pub neg_log_lik: f64,
    pub ks: f64,
    pub mae: f64,
    /// Multi-chain sampler acceptance rates (Bayesian fits).
    pub acceptance_rate: Vec<f64>,
    pub converged: Option<bool>,
    pub notes: Vec<String>,
}

/// Summary of a posterior sample. `neg_log_lik` is taken at the DIC plug-in
/// point; KS and MAE use the posterior mean of each row's probability.
pub fn bayesian_report(
    samples: &PosteriorSamples,
    family: LinkFamily,
    data: &Dataset,
    prob: f64,
    exec: Execution,
) -> Result<FitReport> {
    let means = samples.posterior_mean();
    let post_var = samples.posterior_variance();
    let samp_var = samples.sample_variance();
    let parameters = (0..samples.dim())
        .map(|j| {
            let (lower, upper) = hpd_interval(&samples.column(j), prob)?;
            Ok(ParameterSummary {
                name: samples.parameter_names[j].clone(),
                estimate: means[j],
                estimator_variance: post_var[j],
                sample_variance: Some(samp_var[j]),
                lower,
                upper,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let d = dic(samples, family, data, exec)?;
    let q_hat = posterior_mean_probs(samples, family, data.x(), exec)?;
    let mut notes = vec!["q_hat=posterior predictive mean of row probabilities".to_string()];
    if let Some(reason) = &d.fallback {
        notes.push(format!("dic_plug_in=max log-posterior draw ({reason})"));
    }
    if d.p_d < 0.0 {
        notes.push(format!("negative p_D ({:.4}); check mixing", d.p_d));
    }
    notes.extend(samples.warnings.iter().cloned());
    Ok(FitReport {
        family,
        method: FitMethod::Bayesian,
        n: data.n(),
        positives: data.positives(),
        interval_prob: prob,
        parameters,
        dic: Some(d.dic),
        p_d: Some(d.p_d),
        bic: None,
        neg_log_lik: d.plug_in_deviance / 2.0,
        ks: ks_stat(data.y(), &q_hat)?,
        mae: mae(data.y(), &q_hat)?,
        acceptance_rate: samples.acceptance_rate.clone(),
        converged: None,
        notes,
    })
}

/// Summary of a maximum-likelihood fit on the data it was fit to.
pub fn mle_report(fit: &MLEFit, data: &Dataset, prob: f64) -> Result<FitReport> {
    let q_hat = model::predict_probs(&fit.link(), &fit.estimates, data.x())?;
    let parameters = fit
        .wald_interval(prob)
        .into_iter()
        .enumerate()
        .map(|(j, (lower, upper))| ParameterSummary {
            name: fit.column_names[j].clone(),
            estimate: fit.estimates[j],
            estimator_variance: fit.standard_errors[j].powi(2),
            sample_variance: None,
            lower,
            upper,
        })
        .collect();
    let mut notes = vec!["q_hat=success probability at the MLE".to_string()];
    if !fit.converged {
        notes.push(format!("IRLS did not converge in {} iterations", fit.iterations_used));
    }
    Ok(FitReport {
        family: fit.family,
        method: FitMethod::MaximumLikelihood,
        n: data.n(),
        positives: data.positives(),
        interval_prob: prob,
        parameters,
        dic: None,
        p_d: None,
        bic: Some(frequentist::bic(fit, data)),
        neg_log_lik: -fit.log_likelihood_at_mle,
        ks: ks_stat(data.y(), &q_hat)?,
        mae: mae(data.y(), &q_hat)?,
        acceptance_rate: Vec::new(),
        converged: Some(fit.converged),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tiny_data() -> Dataset {
        let rows: Vec<Vec<f64>> = (0..12).map(|i| vec![(i % 4) as f64 - 1.5]).collect();
        let y = (0..12).map(|i| u8::from(i % 3 == 0)).collect();
        Dataset::from_predictors(y, &rows, &["x"]).unwrap()
    }

    #[test]
    fn deviance_examples() {
        let d = Dataset::new(vec![1, 0], DMatrix::from_element(2, 1, 1.0), vec!["intercept".into()]).unwrap();
        // logit at 0: ln L = 2 ln 0.5
        let dev = deviance(LinkFamily::Logit, &Coefficients::new(vec![0.0], None), &d).unwrap();
        assert_relative_eq!(dev, 2.772588722239781, epsilon = 1e-12);
        // GEV with xi=0.5 at eta=3: -eta = -3 is below the support lower bound -2, so q = 1
        let impossible = Dataset::new(vec![0], DMatrix::from_element(1, 1, 1.0), vec!["intercept".into()]).unwrap();
        let dev = deviance(LinkFamily::StandardGev, &Coefficients::new(vec![3.0], Some(0.5)), &impossible).unwrap();
        assert_eq!(dev, f64::INFINITY);
    }

    #[test]
    fn dic_formula_examples() {
        let (dic, p_d) = dic_from_deviances(&[10.0, 14.0], 9.0);
        assert_eq!((dic, p_d), (15.0, 3.0));
    }

    #[test]
    fn degenerate_chain_has_zero_effective_parameters() {
        let data = tiny_data();
        let theta = vec![-0.7, 0.3];
        let samples = PosteriorSamples::from_draws(
            vec!["beta_0".into(), "beta_1".into()],
            vec![theta.clone(); 30],
            vec![0; 30],
            vec![0.0; 30],
        )
        .unwrap();
        let d = dic(&samples, LinkFamily::Probit, &data, Execution::default()).unwrap();
        let direct = deviance(LinkFamily::Probit, &Coefficients::new(theta, None), &data).unwrap();
        assert_relative_eq!(d.dic, direct, epsilon = 1e-10);
        assert!(d.p_d.abs() < 1e-10);
        assert!(d.fallback.is_none());
    }

    #[test]
    fn infeasible_mean_falls_back_to_best_draw() {
        // Each draw keeps -eta inside its own GEV support; the averaged shape
        // tightens the lower bound past the averaged -eta.
        let data = Dataset::new(vec![1, 0], DMatrix::from_element(2, 1, 1.0), vec!["intercept".into()]).unwrap();
        let names = vec!["beta_0".into(), "xi".into()];
        let draws = vec![vec![0.9, 1.0], vec![4.9, 0.2]];
        let gev = LinkFamily::StandardGev;
        for t in &draws {
            assert!(deviance(gev, &Coefficients::from_theta(t, gev), &data).unwrap().is_finite());
        }
        let mean = [2.9, 0.6];
        assert!(!deviance(gev, &Coefficients::from_theta(&mean, gev), &data).unwrap().is_finite());
        let samples = PosteriorSamples::from_draws(names, draws.clone(), vec![0, 0], vec![-3.0, -1.0]).unwrap();
        let d = dic(&samples, gev, &data, Execution::Sequential).unwrap();
        assert!(d.fallback.as_deref().unwrap().contains("support"), "{:?}", d.fallback);
        assert_eq!(d.plug_in, draws[1]);
        assert!(d.dic.is_finite());
    }

    #[test]
    fn non_finite_draw_deviance_is_an_error() {
        let data = tiny_data();
        let samples = PosteriorSamples::from_draws(
            vec!["beta_0".into(), "beta_1".into(), "alpha".into()],
            vec![vec![0.0, 0.0, -1.0]],
            vec![0],
            vec![0.0],
        )
        .unwrap();
        assert!(dic(&samples, LinkFamily::Frechet, &data, Execution::Sequential).is_err());
    }

    fn exhaustive(draws: &[f64], prob: f64) -> (f64, f64) {
        let mut s = draws.to_vec();
        s.sort_by(f64::total_cmp);
        let m = (prob * s.len() as f64).floor() as usize;
        let mut all: Vec<(f64, usize)> = (0..s.len() - m).map(|j| (s[j + m] - s[j], j)).collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        (s[all[0].1], s[all[0].1 + m])
    }

    #[test]
    fn hpd_examples() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let (lo, hi) = hpd_interval(&grid, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        assert_relative_eq!(hi - lo, 0.95, epsilon = 1e-12);
        assert_eq!(shortest_window(&[0.0, 0.0, 0.0, 1.0, 10.0], 0.6), (0.0, 1.0));
        assert!(hpd_interval(&grid[..19], 0.95).is_err());
        assert!(hpd_interval(&grid, 1.0).is_err());
    }

    #[test]
    fn hpd_matches_exhaustive_search_and_covers() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..50 {
            let len = rng.random_range(20..2000);
            let draws: Vec<f64> = (0..len)
                .map(|_| {
                    let u: f64 = rng.random();
                    if trial % 2 == 0 { (-u.ln()).powf(1.5) } else { (u * 8.0).round() }
                })
                .collect();
            let prob = [0.5, 0.9, 0.95][trial % 3];
            let interval = hpd_interval(&draws, prob).unwrap();
            assert_eq!(interval, exhaustive(&draws, prob));
            let inside = draws.iter().filter(|&&d| d >= interval.0 && d <= interval.1).count();
            assert!(inside as f64 >= (prob * len as f64).floor());
        }
    }

    #[test]
    fn error_score_examples() {
        assert_relative_eq!(ks_stat(&[1, 0], &[0.2, 0.1]).unwrap(), 0.8);
        assert_relative_eq!(mae(&[1, 0], &[0.2, 0.1]).unwrap(), 0.45);
        assert_eq!(max_abs_error(&[1, 0, 1], &[1.0, 0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(mae(&[1, 0, 1], &[1.0, 0.0, 1.0]).unwrap(), 0.0);
        let q = vec![0.005; 100];
        let mut y = vec![0u8; 100];
        y[7] = 1;
        assert!(ks_stat(&y, &q).unwrap() > 0.99);
        assert!(mae(&[1], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn predictive_mean_is_policy_independent() {
        let data = tiny_data();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws: Vec<Vec<f64>> = (0..300).map(|_| vec![rng.random::<f64>() - 1.0, rng.random::<f64>()]).collect();
        let samples = PosteriorSamples::from_draws(
            vec!["beta_0".into(), "beta_1".into()],
            draws.clone(),
            vec![0; 300],
            vec![0.0; 300],
        )
        .unwrap();
        let a = posterior_mean_probs(&samples, LinkFamily::Logit, data.x(), Execution::Sequential).unwrap();
        let b = posterior_mean_probs(&samples, LinkFamily::Logit, data.x(), Execution::Parallel).unwrap();
        assert_eq!(a, b);
        // direct average for the first row
        let x0 = data.x().row(0);
        let direct = draws
            .iter()
            .map(|t| 1.0 / (1.0 + (-(t[0] * x0[0] + t[1] * x0[1])).exp()))
            .sum::<f64>()
            / 300.0;
        assert_relative_eq!(a[0], direct, epsilon = 1e-12);
    }

    #[test]
    fn reports_have_consistent_fields() {
        let data = tiny_data();
        let fit = frequentist::fit_glm_mle(LinkFamily::Logit, &data).unwrap();
        let r = mle_report(&fit, &data, 0.95).unwrap();
        assert_eq!(r.parameters.len(), 2);
        assert!(r.bic.unwrap() > 2.0 * r.neg_log_lik);
        assert!(r.parameters.iter().all(|p| p.lower < p.upper));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws: Vec<Vec<f64>> = (0..100)
            .map(|_| fit.estimates.iter().map(|b| b + 0.1 * (rng.random::<f64>() - 0.5)).collect())
            .collect();
        let samples =
            PosteriorSamples::from_draws(fit.column_names.clone(), draws, vec![0; 100], vec![0.0; 100]).unwrap();
        let r = bayesian_report(&samples, LinkFamily::Logit, &data, 0.95, Execution::default()).unwrap();
        let d = dic(&samples, LinkFamily::Logit, &data, Execution::default()).unwrap();
        assert_relative_eq!(r.p_d.unwrap(), d.mean_deviance - d.plug_in_deviance, epsilon = 1e-12);
        assert!(r.p_d.unwrap() >= 0.0);
        assert!(r.parameters.iter().all(|p| p.lower < p.upper && p.sample_variance.unwrap() > p.estimator_variance));
    }
}
