//! Likelihood, prior and posterior evaluators for binary regression.
//!
//! An observation with linear predictor `η = x'β` succeeds with probability
//! `q(η) = 1 - F(-η)` (latent `x'β + u > 0`). Cloglog is the one exception:
//! its CDF is the minimum-Gumbel `1 - exp(-e^u)` and the GLM convention
//! `q(η) = F(η)` applies, giving the usual `1 - exp(-e^η)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linkfun::{LinkFamily, LinkSpec};

/// Relative eigenvalue floor below which the scaled Gram matrix is treated as singular.
const RANK_TOLERANCE: f64 = 1e-10;

/// Binary responses with a design matrix whose first column is the intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    y: Vec<u8>,
    x: DMatrix<f64>,
    column_names: Vec<String>,
}

impl Dataset {
    /// Validates shape, responses, the intercept column and column rank.
    pub fn new(y: Vec<u8>, x: DMatrix<f64>, column_names: Vec<String>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::Dimension(format!(
                "design has {} rows but {} responses",
                x.nrows(),
                y.len()
            )));
        }
        if x.ncols() == 0 || column_names.len() != x.ncols() {
            return Err(Error::Dimension(format!(
                "design has {} columns but {} names",
                x.ncols(),
                column_names.len()
            )));
        }
        if let Some(i) = y.iter().position(|&v| v > 1) {
            return Err(Error::Record {
                row: i + 1,
                field: "y".into(),
                message: format!("response must be 0 or 1, got {}", y[i]),
            });
        }
        if let Some(i) = x.column(0).iter().position(|&v| v != 1.0) {
            return Err(Error::Dimension(format!(
                "first design column must be the intercept (row {} is not 1)",
                i + 1
            )));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite design entry at row {}",
                i % x.nrows() + 1
            )));
        }
        let data = Dataset {
            y,
            x,
            column_names,
        };
        if !data.y.is_empty() {
            data.check_rank()?;
        }
        Ok(data)
    }

    /// Builds a dataset from raw predictors, prepending the intercept column.
    pub fn from_predictors(y: Vec<u8>, predictors: &[Vec<f64>], names: &[&str]) -> Result<Self> {
        let n = y.len();
        let p = names.len();
        if predictors.iter().any(|row| row.len() != p) {
            return Err(Error::Dimension(format!("every row needs {p} predictors")));
        }
        if predictors.len() != n {
            return Err(Error::Dimension(format!(
                "{} predictor rows for {n} responses",
                predictors.len()
            )));
        }
        let x = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { predictors[i][j - 1] });
        let mut column_names = vec!["intercept".to_string()];
        column_names.extend(names.iter().map(|s| s.to_string()));
        Dataset::new(y, x, column_names)
    }

    fn check_rank(&self) -> Result<()> {
        let gram = self.x.transpose() * &self.x;
        let k = gram.nrows();
        let zero: Vec<usize> = (0..k).filter(|&j| gram[(j, j)] == 0.0).collect();
        if !zero.is_empty() {
            return Err(Error::RankDeficient {
                columns: zero.iter().map(|&j| self.column_names[j].clone()).collect(),
            });
        }
        let scale = DVector::from_fn(k, |j, _| 1.0 / gram[(j, j)].sqrt());
        let scaled = DMatrix::from_fn(k, k, |i, j| gram[(i, j)] * scale[i] * scale[j]);
        let eig = scaled.symmetric_eigen();
        let max = eig.eigenvalues.max();
        let (imin, min) = eig.eigenvalues.argmin();
        if min <= RANK_TOLERANCE * max {
            let v = eig.eigenvectors.column(imin);
            let columns = (0..k)
                .filter(|&j| v[j].abs() > 1e-6)
                .map(|j| self.column_names[j].clone())
                .collect();
            return Err(Error::RankDeficient { columns });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Number of predictors, excluding the intercept.
    pub fn p(&self) -> usize {
        self.x.ncols() - 1
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&v| v == 1).count()
    }

    /// Sub-design keeping the listed columns (the intercept must be among them).
    pub fn select_columns(&self, columns: &[usize]) -> Result<Dataset> {
        if columns.first() != Some(&0) {
            return Err(Error::Dimension("column selection must start with the intercept".into()));
        }
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.x.ncols()) {
            return Err(Error::Dimension(format!("column {bad} out of range")));
        }
        let x = self.x.select_columns(columns);
        let names = columns.iter().map(|&c| self.column_names[c].clone()).collect();
        Dataset::new(self.y.clone(), x, names)
    }
}

/// Regression coefficients plus the optional link shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub beta: Vec<f64>,
    pub shape: Option<f64>,
}

impl Coefficients {
    pub fn new(beta: Vec<f64>, shape: Option<f64>) -> Self {
        Coefficients { beta, shape }
    }

    /// Flat parameter vector `(β₀, …, β_p[, shape])` as sampled by MCMC.
    pub fn to_theta(&self) -> Vec<f64> {
        let mut theta = self.beta.clone();
        theta.extend(self.shape);
        theta
    }

    pub fn from_theta(theta: &[f64], family: LinkFamily) -> Self {
        if family.is_skewed() {
            let (beta, shape) = theta.split_at(theta.len() - 1);
            Coefficients::new(beta.to_vec(), Some(shape[0]))
        } else {
            Coefficients::new(theta.to_vec(), None)
        }
    }

    /// The link at this shape, or `None` if the shape is outside its domain.
    pub fn link(&self, family: LinkFamily) -> Option<LinkSpec> {
        LinkSpec::new(family, self.shape).ok()
    }
}

/// Parameter labels in `to_theta` order: the design column names, then the
/// shape name for skewed families.
pub fn parameter_names(data: &Dataset, family: LinkFamily) -> Vec<String> {
    let mut names = data.column_names().to_vec();
    if let Some(s) = family.shape_name() {
        names.push(s.to_string());
    }
    names
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorRegime {
    /// N(0, σ²_β I) on β, N(0, σ²_ξ) on the GEV shape, Gamma(shape, rate) on γ or α.
    Informative,
    /// Flat on β and ξ; `π(ζ) ∝ ζ^(-c)` on γ > 1 or α > 0.
    Noninformative { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    pub beta_variance: f64,
    pub gev_shape_variance: f64,
    pub gamma_shape: f64,
    pub gamma_rate: f64,
    pub regime: PriorRegime,
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec {
            beta_variance: 100.0,
            gev_shape_variance: 1.0,
            gamma_shape: 3.0,
            gamma_rate: 4.0,
            regime: PriorRegime::Informative,
        }
    }
}

impl PriorSpec {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("beta_variance", self.beta_variance),
            ("gev_shape_variance", self.gev_shape_variance),
            ("gamma_shape", self.gamma_shape),
            ("gamma_rate", self.gamma_rate),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("prior {name} must be positive, got {v}")));
            }
        }
        if let PriorRegime::Noninformative { c } = self.regime {
            if c.is_nan() || c <= 1.0 {
                return Err(Error::Invalid(format!("power-law prior exponent must exceed 1, got {c}")));
            }
        }
        Ok(())
    }
}

/// `q(η)`, the success probability at linear predictor `eta`.
pub fn success_prob(link: &LinkSpec, eta: f64) -> f64 {
    match link.family() {
        LinkFamily::Cloglog => link.cdf(eta),
        _ => 1.0 - link.cdf(-eta),
    }
}

/// `(ln q, ln(1 - q))` at `eta`, both evaluated in log space.
pub fn log_success_failure(link: &LinkSpec, eta: f64) -> (f64, f64) {
    match link.family() {
        LinkFamily::Cloglog => (link.log_cdf(eta), link.log_sf(eta)),
        _ => (link.log_sf(-eta), link.log_cdf(-eta)),
    }
}

fn linear_predictor(x: &DMatrix<f64>, beta: &[f64]) -> Result<DVector<f64>> {
    if beta.len() != x.ncols() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} design columns",
            beta.len(),
            x.ncols()
        )));
    }
    Ok(x * DVector::from_column_slice(beta))
}

/// Success probabilities for every row of `x`.
pub fn predict_probs(link: &LinkSpec, beta: &[f64], x: &DMatrix<f64>) -> Result<Vec<f64>> {
    let eta = linear_predictor(x, beta)?;
    Ok(eta.iter().map(|&e| success_prob(link, e)).collect())
}

/// Bernoulli log-likelihood; `-inf` when any observation is impossible.
///
/// Returns `-inf` as well when the shape lies outside the family's domain.
pub fn log_likelihood(family: LinkFamily, coef: &Coefficients, data: &Dataset) -> Result<f64> {
    let eta = linear_predictor(data.x(), &coef.beta)?;
    let Some(link) = coef.link(family) else {
        return Ok(f64::NEG_INFINITY);
    };
    let mut total = 0.0;
    for (&e, &y) in eta.iter().zip(data.y()) {
        let (ls, lf) = log_success_failure(&link, e);
        total += if y == 1 { ls } else { lf };
        if total == f64::NEG_INFINITY {
            break;
        }
    }
    Ok(total)
}

/// Log prior density up to an additive constant.
pub fn log_prior(family: LinkFamily, coef: &Coefficients, prior: &PriorSpec) -> f64 {
    let beta_term = match prior.regime {
        PriorRegime::Informative => {
            -coef.beta.iter().map(|b| b * b).sum::<f64>() / (2.0 * prior.beta_variance)
        }
        PriorRegime::Noninformative { .. } => 0.0,
    };
    let shape_term = match (family, coef.shape) {
        (LinkFamily::StandardGev, Some(xi)) => match prior.regime {
            PriorRegime::Informative => -xi * xi / (2.0 * prior.gev_shape_variance),
            PriorRegime::Noninformative { .. } => 0.0,
        },
        (LinkFamily::SkewedWeibull | LinkFamily::Frechet, Some(z)) => {
            if z <= 0.0 {
                f64::NEG_INFINITY
            } else {
                match prior.regime {
                    PriorRegime::Informative => {
                        (prior.gamma_shape - 1.0) * z.ln() - prior.gamma_rate * z
                    }
                    PriorRegime::Noninformative { c } => {
                        if family == LinkFamily::SkewedWeibull && z <= 1.0 {
                            f64::NEG_INFINITY
                        } else {
                            -c * z.ln()
                        }
                    }
                }
            }
        }
        _ => 0.0,
    };
    beta_term + shape_term
}

pub fn log_posterior(
    family: LinkFamily,
    coef: &Coefficients,
    data: &Dataset,
    prior: &PriorSpec,
) -> Result<f64> {
    let lp = log_prior(family, coef, prior);
    if lp == f64::NEG_INFINITY {
        return Ok(lp);
    }
    Ok(log_likelihood(family, coef, data)? + lp)
}

/// The posterior of one link family on one dataset, over flat `θ` vectors.
#[derive(Debug, Clone, Copy)]
pub struct Posterior<'a> {
    pub family: LinkFamily,
    pub data: &'a Dataset,
    pub prior: PriorSpec,
}

impl<'a> Posterior<'a> {
    pub fn new(family: LinkFamily, data: &'a Dataset, prior: PriorSpec) -> Self {
        Posterior {
            family,
            data,
            prior,
        }
    }

    pub fn dim(&self) -> usize {
        self.data.x().ncols() + usize::from(self.family.is_skewed())
    }

    pub fn log_density(&self, theta: &[f64]) -> f64 {
        let coef = Coefficients::from_theta(theta, self.family);
        log_posterior(self.family, &coef, self.data, &self.prior).unwrap_or(f64::NEG_INFINITY)
    }

    /// A feasible starting point: intercept matching the observed positive
    /// rate, zero slopes, and a default shape.
    pub fn initial_point(&self) -> Coefficients {
        let shape = match self.family {
            LinkFamily::StandardGev => Some(0.0),
            LinkFamily::SkewedWeibull => Some(1.0),
            LinkFamily::Frechet => Some(2.0),
            _ => None,
        };
        let n = self.data.n().max(1) as f64;
        let rate = ((self.data.positives() as f64 + 0.5) / (n + 1.0)).clamp(1e-6, 1.0 - 1e-6);
        let link = LinkSpec::new(self.family, shape).expect("default shapes are valid");
        let intercept = match self.family {
            LinkFamily::Cloglog => link.quantile_open(rate),
            _ => -link.quantile_open(1.0 - rate),
        };
        let mut beta = vec![0.0; self.data.x().ncols()];
        beta[0] = intercept;
        Coefficients::new(beta, shape)
    }
}
