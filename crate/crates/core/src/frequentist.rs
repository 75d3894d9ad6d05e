//! Maximum-likelihood fitting of the logit, probit and cloglog models.
//!
//! Fisher scoring (IRLS) with step halving; standard errors come from the
//! observed information at the optimum. Model reduction is backward
//! elimination over predictor groups using Wald tests.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::linkfun::{LinkFamily, LinkSpec};
use crate::model::{self, Dataset};
use crate::special::norm_ln_pdf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrlsOptions {
    pub max_iterations: usize,
    /// Relative score-norm tolerance.
    pub tolerance: f64,
}

impl Default for IrlsOptions {
    fn default() -> Self {
        IrlsOptions {
            max_iterations: 100,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MLEFit {
    pub family: LinkFamily,
    pub column_names: Vec<String>,
    pub estimates: Vec<f64>,
    pub standard_errors: Vec<f64>,
    /// Inverse observed information at the estimate.
    pub covariance: DMatrix<f64>,
    pub log_likelihood_at_mle: f64,
    pub converged: bool,
    pub iterations_used: usize,
}

impl MLEFit {
    pub fn dim(&self) -> usize {
        self.estimates.len()
    }

    /// Wald interval `estimate ± z·se` at two-sided level `level`.
    pub fn wald_interval(&self, level: f64) -> Vec<(f64, f64)> {
        let z = LinkSpec::probit().quantile_open(0.5 + level / 2.0);
        self.estimates
            .iter()
            .zip(&self.standard_errors)
            .map(|(&b, &se)| (b - z * se, b + z * se))
            .collect()
    }

    pub fn link(&self) -> LinkSpec {
        LinkSpec::new(self.family, None).expect("symmetric family")
    }
}

/// Per-observation log-likelihood and its first two derivatives in `η`,
/// plus the Fisher weight `q'² / (q(1-q))`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ObsTerms {
    pub ll: f64,
    pub d1: f64,
    pub d2: f64,
    pub weight: f64,
}

pub(crate) fn obs_terms(link: &LinkSpec, eta: f64, y: u8) -> ObsTerms {
    let (ln_q, ln_1mq) = model::log_success_failure(link, eta);
    // ln q'(η) and q''/q'
    let (ln_dq, curvature) = match link.family() {
        LinkFamily::Logit => {
            let q = ln_q.exp();
            (ln_q + ln_1mq, 1.0 - 2.0 * q)
        }
        LinkFamily::Probit => (norm_ln_pdf(eta), -eta),
        LinkFamily::Cloglog => {
            let e = eta.exp();
            (eta - e, 1.0 - e)
        }
        other => unreachable!("{other} is fit by MCMC"),
    };
    let a = (ln_dq - ln_q).exp();
    let b = (ln_dq - ln_1mq).exp();
    let (ll, d1, d2) = if y == 1 {
        (ln_q, a, curvature * a - a * a)
    } else {
        (ln_1mq, -b, -(curvature * b + b * b))
    };
    ObsTerms {
        ll,
        d1,
        d2,
        weight: a * b,
    }
}

struct Evaluation {
    ll: f64,
    score: DVector<f64>,
    fisher: DMatrix<f64>,
    observed: DMatrix<f64>,
}

fn evaluate(link: &LinkSpec, data: &Dataset, beta: &DVector<f64>) -> Evaluation {
    let x = data.x();
    let eta = x * beta;
    let k = x.ncols();
    let mut ll = 0.0;
    let mut d1 = DVector::zeros(data.n());
    let mut w = DVector::zeros(data.n());
    let mut h = DVector::zeros(data.n());
    for (i, (&e, &y)) in eta.iter().zip(data.y()).enumerate() {
        let t = obs_terms(link, e, y);
        ll += t.ll;
        d1[i] = t.d1;
        w[i] = t.weight;
        h[i] = -t.d2;
    }
    let score = x.transpose() * d1;
    let weighted = |v: &DVector<f64>| {
        let mut xw = x.clone();
        for (mut col, _) in xw.column_iter_mut().zip(0..k) {
            col.component_mul_assign(v);
        }
        x.transpose() * xw
    };
    Evaluation {
        ll,
        score,
        fisher: weighted(&w),
        observed: weighted(&h),
    }
}

fn log_lik(link: &LinkSpec, data: &Dataset, beta: &DVector<f64>) -> f64 {
    let eta = data.x() * beta;
    eta.iter()
        .zip(data.y())
        .map(|(&e, &y)| {
            let (ls, lf) = model::log_success_failure(link, e);
            if y == 1 {
                ls
            } else {
                lf
            }
        })
        .sum()
}

pub fn fit_glm_mle(family: LinkFamily, data: &Dataset) -> Result<MLEFit> {
    fit_glm_mle_with(family, data, IrlsOptions::default())
}

pub fn fit_glm_mle_with(family: LinkFamily, data: &Dataset, opts: IrlsOptions) -> Result<MLEFit> {
    if family.is_skewed() {
        return Err(Error::InvalidLink(format!(
            "{family} has a shape parameter; fit it with the sampler"
        )));
    }
    if data.n() == 0 {
        return Err(Error::Invalid("cannot fit an empty dataset".into()));
    }
    let link = LinkSpec::new(family, None)?;
    let k = data.x().ncols();
    let mut beta = DVector::zeros(k);
    let rate = ((data.positives() as f64 + 0.5) / (data.n() as f64 + 1.0)).clamp(1e-6, 1.0 - 1e-6);
    beta[0] = match family {
        LinkFamily::Cloglog => link.quantile_open(rate),
        _ => -link.quantile_open(1.0 - rate),
    };

    let mut eval = evaluate(&link, data, &beta);
    let mut converged = false;
    let mut last_step = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        let score_small = eval.score.norm() <= opts.tolerance * (1.0 + eval.ll.abs());
        let beta_scale = 1.0 + beta.amax();
        if score_small && last_step <= 1e-6 * beta_scale {
            converged = true;
            break;
        }
        iterations += 1;
        let Some(chol) = eval.fisher.clone().cholesky() else {
            break;
        };
        let direction = chol.solve(&eval.score);
        let mut scale = 1.0;
        let mut next = &beta + &direction;
        let mut next_ll = log_lik(&link, data, &next);
        let mut halvings = 0;
        while (next_ll.is_nan() || next_ll < eval.ll - 1e-12 * eval.ll.abs()) && halvings < 40 {
            scale *= 0.5;
            next = &beta + &direction * scale;
            next_ll = log_lik(&link, data, &next);
            halvings += 1;
        }
        if !next_ll.is_finite() {
            break;
        }
        last_step = (&next - &beta).amax();
        beta = next;
        eval = evaluate(&link, data, &beta);
    }
    if !converged {
        let score_small = eval.score.norm() <= opts.tolerance * (1.0 + eval.ll.abs());
        converged = score_small && last_step <= 1e-6 * (1.0 + beta.amax());
    }

    let covariance = eval
        .observed
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .unwrap_or_else(|| DMatrix::from_element(k, k, f64::NAN));
    let standard_errors = (0..k).map(|j| covariance[(j, j)].sqrt()).collect();
    Ok(MLEFit {
        family,
        column_names: data.column_names().to_vec(),
        estimates: beta.iter().copied().collect(),
        standard_errors,
        covariance,
        log_likelihood_at_mle: eval.ll,
        converged,
        iterations_used: iterations,
    })
}

/// Analytic score vector of the symmetric-link log-likelihood at `beta`.
pub fn score(family: LinkFamily, data: &Dataset, beta: &[f64]) -> Result<Vec<f64>> {
    let link = LinkSpec::new(family, None)?;
    if beta.len() != data.x().ncols() {
        return Err(Error::Dimension("coefficient length".into()));
    }
    let eval = evaluate(&link, data, &DVector::from_column_slice(beta));
    Ok(eval.score.iter().copied().collect())
}

/// `-2 ln L + d ln n` with `d` counting every coefficient.
pub fn bic_value(log_likelihood: f64, d: usize, n: usize) -> f64 {
    if d == 0 {
        return -2.0 * log_likelihood;
    }
    -2.0 * log_likelihood + d as f64 * (n as f64).ln()
}

pub fn bic(fit: &MLEFit, data: &Dataset) -> f64 {
    bic_value(fit.log_likelihood_at_mle, fit.dim(), data.n())
}

/// Design columns that enter or leave the model together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictorGroup {
    pub name: String,
    pub columns: Vec<usize>,
}

/// One group per non-intercept column.
pub fn singleton_groups(data: &Dataset) -> Vec<PredictorGroup> {
    data.column_names()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, name)| PredictorGroup {
            name: name.clone(),
            columns: vec![j],
        })
        .collect()
}

/// Joint Wald test p-value for the listed coefficients being zero.
pub fn wald_p_value(fit: &MLEFit, columns: &[usize]) -> f64 {
    let b = DVector::from_iterator(columns.len(), columns.iter().map(|&c| fit.estimates[c]));
    let v = fit.covariance.select_rows(columns).select_columns(columns);
    let Some(chol) = v.cholesky() else {
        return f64::NAN;
    };
    let stat = b.dot(&chol.solve(&b));
    let chi = ChiSquared::new(columns.len() as f64).expect("positive degrees of freedom");
    1.0 - chi.cdf(stat)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedModel {
    pub fit: MLEFit,
    /// Retained columns of the original design, intercept first.
    pub columns: Vec<usize>,
    pub retained: Vec<String>,
    pub dropped: Vec<String>,
    pub data: Dataset,
}

/// Backward elimination: drop the least significant group while its Wald
/// p-value exceeds `alpha`, refitting after every drop.
pub fn reduce_model(
    family: LinkFamily,
    data: &Dataset,
    groups: &[PredictorGroup],
    alpha: f64,
) -> Result<ReducedModel> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("significance level must lie in (0, 1), got {alpha}")));
    }
    if groups.iter().any(|g| g.columns.contains(&0) || g.columns.is_empty()) {
        return Err(Error::Invalid("groups must be nonempty and exclude the intercept".into()));
    }
    let mut active: Vec<&PredictorGroup> = groups.iter().collect();
    let mut dropped = Vec::new();
    loop {
        let mut columns: Vec<usize> = std::iter::once(0)
            .chain(active.iter().flat_map(|g| g.columns.iter().copied()))
            .collect();
        columns[1..].sort_unstable();
        let sub = data.select_columns(&columns)?;
        let fit = fit_glm_mle(family, &sub)?;
        if !fit.converged {
            return Err(Error::Numerical(format!(
                "{family} fit did not converge with {} columns",
                columns.len()
            )));
        }
        let position = |c: usize| columns.iter().position(|&k| k == c).expect("active column");
        let worst = active
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let local: Vec<usize> = g.columns.iter().map(|&c| position(c)).collect();
                (i, wald_p_value(&fit, &local))
            })
            .filter(|(_, p)| *p > alpha)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match worst {
            Some((i, _)) => {
                dropped.push(active.remove(i).name.clone());
            }
            None => {
                return Ok(ReducedModel {
                    retained: active.iter().map(|g| g.name.clone()).collect(),
                    fit,
                    columns,
                    dropped,
                    data: sub,
                })
            }
        }
    }
}
