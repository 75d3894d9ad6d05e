//! Posterior predictive simulation for a new portfolio and its aggregation
//! into death counts and benefits.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{hpd_interval, MIN_HPD_DRAWS};
use crate::error::{Error, Result};
use crate::linkfun::LinkFamily;
use crate::mcmc::PosteriorSamples;
use crate::model::{self, Coefficients};
use crate::parallel::Execution;

/// One replicate portfolio per retained parameter draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveDraws {
    /// `S x m` simulated outcomes.
    pub outcomes: Vec<Vec<u8>>,
    pub counts: Vec<u64>,
    /// Empty when no face amounts were supplied.
    pub benefits: Vec<f64>,
    /// Face amounts used for the benefits, in observation order.
    pub face: Option<Vec<f64>>,
}

impl PredictiveDraws {
    /// Builds counts and benefits from simulated outcomes.
    pub fn from_outcomes(outcomes: Vec<Vec<u8>>, face: Option<&[f64]>) -> Result<Self> {
        let m = outcomes.first().map_or(0, Vec::len);
        if outcomes.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("outcome rows differ in length".into()));
        }
        if let Some(f) = face {
            check_face(f, m)?;
        }
        let counts = outcomes.iter().map(|r| r.iter().map(|&v| u64::from(v)).sum()).collect();
        let benefits = match face {
            Some(f) => outcomes.iter().map(|r| benefit(r, f)).collect(),
            None => Vec::new(),
        };
        Ok(PredictiveDraws {
            outcomes,
            counts,
            benefits,
            face: face.map(<[f64]>::to_vec),
        })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Number of observations in each replicate.
    pub fn width(&self) -> usize {
        self.outcomes.first().map_or(0, Vec::len)
    }
}

fn check_face(face: &[f64], m: usize) -> Result<()> {
    if face.len() != m {
        return Err(Error::Dimension(format!("{} face amounts for {m} observations", face.len())));
    }
    if face.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
        return Err(Error::Domain("face amounts must be finite and nonnegative".into()));
    }
    Ok(())
}

fn benefit(outcomes: &[u8], face: &[f64]) -> f64 {
    outcomes.iter().zip(face).filter(|(&y, _)| y == 1).map(|(_, &f)| f).sum()
}

/// For each retained draw `s`, simulates `y_i ~ Bernoulli(q_i(θ_s))` for every
/// row of `x`. Draw `s` uses stream `s` of a ChaCha generator keyed by `seed`,
/// so the result does not depend on the execution policy.
pub fn posterior_predictive(
    samples: &PosteriorSamples,
    family: LinkFamily,
    x: &DMatrix<f64>,
    face: Option<&[f64]>,
    seed: u64,
    exec: Execution,
) -> Result<PredictiveDraws> {
    if samples.is_empty() {
        return Err(Error::Invalid("no posterior draws".into()));
    }
    let expected = samples.dim() - usize::from(family.is_skewed());
    if x.ncols() != expected {
        return Err(Error::Dimension(format!(
            "new design has {} columns but the fit has {expected} coefficients",
            x.ncols()
        )));
    }
    if let Some(f) = face {
        check_face(f, x.nrows())?;
    }
    let outcomes = exec
        .map_indexed(samples.len(), |s| -> Result<Vec<u8>> {
            let coef = Coefficients::from_theta(&samples.draws[s], family);
            let link = coef
                .link(family)
                .ok_or_else(|| Error::Domain(format!("draw {s} has an invalid {family} shape")))?;
            let q = model::predict_probs(&link, &coef.beta, x)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            Ok(q.iter().map(|&q| u8::from(rng.random::<f64>() < q)).collect())
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    PredictiveDraws::from_outcomes(outcomes, face)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveSummary {
    pub mean_count: f64,
    pub count_interval: (f64, f64),
    pub mean_benefit: Option<f64>,
    pub benefit_interval: Option<(f64, f64)>,
}

pub fn summarize_predictive(draws: &PredictiveDraws, prob: f64) -> Result<PredictiveSummary> {
    let counts: Vec<f64> = draws.counts.iter().map(|&c| c as f64).collect();
    let count_interval = hpd_interval(&counts, prob)?;
    let s = counts.len() as f64;
    let (mean_benefit, benefit_interval) = if draws.benefits.is_empty() {
        (None, None)
    } else {
        (
            Some(draws.benefits.iter().sum::<f64>() / s),
            Some(hpd_interval(&draws.benefits, prob)?),
        )
    };
    Ok(PredictiveSummary {
        mean_count: counts.iter().sum::<f64>() / s,
        count_interval,
        mean_benefit,
        benefit_interval,
    })
}

/// `ŷ_i = 1` iff `q̂_i > threshold`; returns the labels and their count.
pub fn frequentist_classify(q_hat: &[f64], threshold: f64) -> Result<(Vec<u8>, usize)> {
    if !(0.0..1.0).contains(&threshold) {
        return Err(Error::Domain(format!("threshold must lie in [0, 1), got {threshold}")));
    }
    let labels: Vec<u8> = q_hat.iter().map(|&q| u8::from(q > threshold)).collect();
    let count = labels.iter().filter(|&&v| v == 1).count();
    Ok((labels, count))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateMode {
    /// Count of rows whose probability exceeds the threshold.
    Thresholded,
    /// Sum of the probabilities.
    Expected,
}

impl AggregateMode {
    pub fn name(self) -> &'static str {
        match self {
            AggregateMode::Thresholded => "thresholded",
            AggregateMode::Expected => "expected",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointAggregate {
    pub mode: AggregateMode,
    pub count: f64,
    pub benefit: Option<f64>,
}

/// Point aggregates of plug-in probabilities under both labelled modes.
pub fn point_aggregates(q_hat: &[f64], face: Option<&[f64]>, threshold: f64) -> Result<[PointAggregate; 2]> {
    if let Some(f) = face {
        check_face(f, q_hat.len())?;
    }
    let (labels, count) = frequentist_classify(q_hat, threshold)?;
    let thresholded = PointAggregate {
        mode: AggregateMode::Thresholded,
        count: count as f64,
        benefit: face.map(|f| benefit(&labels, f)),
    };
    let expected = PointAggregate {
        mode: AggregateMode::Expected,
        count: q_hat.iter().sum(),
        benefit: face.map(|f| q_hat.iter().zip(f).map(|(q, f)| q * f).sum()),
    };
    Ok([thresholded, expected])
}

/// Pointwise summaries of cumulative count and benefit along an ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeCurves {
    pub order: Vec<usize>,
    pub mean_count: Vec<f64>,
    pub count_lower: Vec<f64>,
    pub count_upper: Vec<f64>,
    /// Empty when the draws carry no face amounts.
    pub mean_benefit: Vec<f64>,
    pub benefit_lower: Vec<f64>,
    pub benefit_upper: Vec<f64>,
}

fn check_permutation(order: &[usize], m: usize) -> Result<()> {
    if order.len() != m {
        return Err(Error::Invalid(format!("ordering has {} entries for {m} observations", order.len())));
    }
    let mut seen = vec![false; m];
    for &i in order {
        if i >= m || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Invalid(format!("ordering is not a permutation (entry {i})")));
        }
    }
    Ok(())
}

/// Cumulative count and benefit of replicate `s` along `order`.
pub fn cumulative_path(draws: &PredictiveDraws, order: &[usize], s: usize) -> Result<(Vec<u64>, Vec<f64>)> {
    check_permutation(order, draws.width())?;
    let row = draws
        .outcomes
        .get(s)
        .ok_or_else(|| Error::Invalid(format!("replicate {s} out of range")))?;
    let mut count = 0;
    let mut total = 0.0;
    let mut counts = Vec::with_capacity(order.len());
    let mut benefits = Vec::new();
    for &i in order {
        count += u64::from(row[i]);
        counts.push(count);
        if let Some(face) = &draws.face {
            if row[i] == 1 {
                total += face[i];
            }
            benefits.push(total);
        }
    }
    Ok((counts, benefits))
}

pub fn cumulative_curves(draws: &PredictiveDraws, order: &[usize], prob: f64) -> Result<CumulativeCurves> {
    check_permutation(order, draws.width())?;
    if draws.len() < MIN_HPD_DRAWS {
        return Err(Error::Invalid(format!(
            "curve bands need at least {MIN_HPD_DRAWS} replicates, got {}",
            draws.len()
        )));
    }
    let s = draws.len() as f64;
    let mut counts = vec![0.0; draws.len()];
    let mut benefits = vec![0.0; draws.len()];
    let mut curves = CumulativeCurves {
        order: order.to_vec(),
        mean_count: Vec::with_capacity(order.len()),
        count_lower: Vec::with_capacity(order.len()),
        count_upper: Vec::with_capacity(order.len()),
        mean_benefit: Vec::new(),
        benefit_lower: Vec::new(),
        benefit_upper: Vec::new(),
    };
    for &i in order {
        for (c, row) in counts.iter_mut().zip(&draws.outcomes) {
            *c += f64::from(row[i]);
        }
        let (lo, hi) = hpd_interval(&counts, prob)?;
        curves.mean_count.push(counts.iter().sum::<f64>() / s);
        curves.count_lower.push(lo);
        curves.count_upper.push(hi);
        if let Some(face) = &draws.face {
            for (b, row) in benefits.iter_mut().zip(&draws.outcomes) {
                if row[i] == 1 {
                    *b += face[i];
                }
            }
            let (lo, hi) = hpd_interval(&benefits, prob)?;
            curves.mean_benefit.push(benefits.iter().sum::<f64>() / s);
            curves.benefit_lower.push(lo);
            curves.benefit_upper.push(hi);
        }
    }
    Ok(curves)
}
