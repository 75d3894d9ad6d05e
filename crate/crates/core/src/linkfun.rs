//! The six latent-error distributions behind the binary regression links.
//!
//! Each family is exposed through its CDF `F`, which the models consume via
//! the latent representation `y = 1{x'β + u > 0}`, `u ~ F`. The three skewed
//! families are standardized (location 0, scale 1):
//!
//! ```text
//! StandardGEV(ξ)     F(u) = exp(-(1 + ξu)^(-1/ξ))   on 1 + ξu > 0, Gumbel at ξ = 0
//! SkewedWeibull(γ)   F(u) = 1 - exp(-u^γ)           on u > 0
//! Frechet(α)         F(u) = exp(-u^(-α))            on u > 0
//! ```
//!
//! The cloglog family uses the minimum-Gumbel CDF `F(u) = 1 - exp(-e^u)`.
//! Outside its support a CDF evaluates to the nearest endpoint value, so
//! infeasible linear predictors surface as zero probabilities rather than
//! errors.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Open01;

use crate::error::{Error, Result};
use crate::special::{log1mexp, norm_cdf, norm_ln_cdf, norm_ln_pdf, norm_quantile, softplus};

/// Shapes with |ξ| below this are evaluated with the Gumbel form.
pub const GUMBEL_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkFamily {
    Logit,
    Probit,
    Cloglog,
    StandardGev,
    SkewedWeibull,
    Frechet,
}

impl LinkFamily {
    pub const ALL: [LinkFamily; 6] = [
        LinkFamily::Logit,
        LinkFamily::Probit,
        LinkFamily::Cloglog,
        LinkFamily::StandardGev,
        LinkFamily::SkewedWeibull,
        LinkFamily::Frechet,
    ];

    pub const SYMMETRIC: [LinkFamily; 3] =
        [LinkFamily::Logit, LinkFamily::Probit, LinkFamily::Cloglog];

    pub const SKEWED: [LinkFamily; 3] = [
        LinkFamily::StandardGev,
        LinkFamily::SkewedWeibull,
        LinkFamily::Frechet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LinkFamily::Logit => "logit",
            LinkFamily::Probit => "probit",
            LinkFamily::Cloglog => "cloglog",
            LinkFamily::StandardGev => "gev",
            LinkFamily::SkewedWeibull => "weibull",
            LinkFamily::Frechet => "frechet",
        }
    }

    /// Skewed families carry a shape parameter and are fit by MCMC.
    pub fn is_skewed(self) -> bool {
        matches!(
            self,
            LinkFamily::StandardGev | LinkFamily::SkewedWeibull | LinkFamily::Frechet
        )
    }

    pub fn shape_name(self) -> Option<&'static str> {
        match self {
            LinkFamily::StandardGev => Some("xi"),
            LinkFamily::SkewedWeibull => Some("gamma"),
            LinkFamily::Frechet => Some("alpha"),
            _ => None,
        }
    }
}

impl fmt::Display for LinkFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LinkFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', ' '], "-").as_str() {
            "logit" | "logistic" => Ok(LinkFamily::Logit),
            "probit" => Ok(LinkFamily::Probit),
            "cloglog" => Ok(LinkFamily::Cloglog),
            "gev" | "sgev" | "standard-gev" => Ok(LinkFamily::StandardGev),
            "weibull" | "skewed-weibull" | "sw" => Ok(LinkFamily::SkewedWeibull),
            "frechet" | "fréchet" | "fr" => Ok(LinkFamily::Frechet),
            other => Err(Error::InvalidLink(format!("unknown link `{other}`"))),
        }
    }
}

/// Interval `(lower, upper)` outside which the CDF is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
}

impl Support {
    pub fn contains(&self, u: f64) -> bool {
        u > self.lower && u < self.upper
    }
}

/// A link family together with its shape parameter, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec {
    family: LinkFamily,
    shape: f64,
}

impl LinkSpec {
    pub fn new(family: LinkFamily, shape: Option<f64>) -> Result<Self> {
        let shape = match (family.is_skewed(), shape) {
            (false, None) => 0.0,
            (false, Some(_)) => {
                return Err(Error::InvalidLink(format!(
                    "{family} link takes no shape parameter"
                )))
            }
            (true, None) => {
                return Err(Error::InvalidLink(format!(
                    "{family} link requires a shape parameter"
                )))
            }
            (true, Some(s)) if !s.is_finite() => {
                return Err(Error::InvalidLink(format!("{family} shape must be finite")))
            }
            (true, Some(s)) if family != LinkFamily::StandardGev && s <= 0.0 => {
                return Err(Error::InvalidLink(format!(
                    "{family} shape must be positive, got {s}"
                )))
            }
            (true, Some(s)) => s,
        };
        Ok(LinkSpec { family, shape })
    }

    pub fn logit() -> Self {
        LinkSpec {
            family: LinkFamily::Logit,
            shape: 0.0,
        }
    }

    pub fn probit() -> Self {
        LinkSpec {
            family: LinkFamily::Probit,
            shape: 0.0,
        }
    }

    pub fn cloglog() -> Self {
        LinkSpec {
            family: LinkFamily::Cloglog,
            shape: 0.0,
        }
    }

    pub fn gev(xi: f64) -> Result<Self> {
        Self::new(LinkFamily::StandardGev, Some(xi))
    }

    pub fn weibull(gamma: f64) -> Result<Self> {
        Self::new(LinkFamily::SkewedWeibull, Some(gamma))
    }

    pub fn frechet(alpha: f64) -> Result<Self> {
        Self::new(LinkFamily::Frechet, Some(alpha))
    }

    pub fn family(&self) -> LinkFamily {
        self.family
    }

    pub fn shape(&self) -> Option<f64> {
        self.family.is_skewed().then_some(self.shape)
    }

    fn is_gumbel(&self) -> bool {
        self.shape.abs() < GUMBEL_THRESHOLD
    }

    pub fn support(&self) -> Support {
        let (lower, upper) = match self.family {
            LinkFamily::StandardGev if self.is_gumbel() => (f64::NEG_INFINITY, f64::INFINITY),
            LinkFamily::StandardGev if self.shape > 0.0 => (-1.0 / self.shape, f64::INFINITY),
            LinkFamily::StandardGev => (f64::NEG_INFINITY, -1.0 / self.shape),
            LinkFamily::SkewedWeibull | LinkFamily::Frechet => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        };
        Support { lower, upper }
    }

    /// For the extreme-value families, the exponent `s` with `F = exp(-s)`
    /// (GEV, Fréchet) or `1 - F = exp(-s)` (Weibull, cloglog). `None` when
    /// `u` lies outside the support.
    fn exponent(&self, u: f64) -> Option<f64> {
        match self.family {
            LinkFamily::Cloglog => Some(u.exp()),
            LinkFamily::StandardGev if self.is_gumbel() => Some((-u).exp()),
            LinkFamily::StandardGev => {
                let t = 1.0 + self.shape * u;
                (t > 0.0).then(|| t.powf(-1.0 / self.shape))
            }
            LinkFamily::SkewedWeibull => (u > 0.0).then(|| u.powf(self.shape)),
            LinkFamily::Frechet => (u > 0.0).then(|| u.powf(-self.shape)),
            LinkFamily::Logit | LinkFamily::Probit => None,
        }
    }

    /// Value of `F` below (`false`) or above (`true`) the support.
    fn outside_is_upper(&self, u: f64) -> bool {
        u >= self.support().upper
    }

    pub fn cdf(&self, u: f64) -> f64 {
        match self.family {
            LinkFamily::Logit => 1.0 / (1.0 + (-u).exp()),
            LinkFamily::Probit => norm_cdf(u),
            LinkFamily::Cloglog | LinkFamily::SkewedWeibull => match self.exponent(u) {
                Some(s) => -(-s).exp_m1(),
                None => 0.0,
            },
            LinkFamily::StandardGev | LinkFamily::Frechet => match self.exponent(u) {
                Some(s) => (-s).exp(),
                None if self.outside_is_upper(u) => 1.0,
                None => 0.0,
            },
        }
    }

    /// `ln F(u)`; `-inf` at or below the lower support endpoint.
    pub fn log_cdf(&self, u: f64) -> f64 {
        match self.family {
            LinkFamily::Logit => -softplus(-u),
            LinkFamily::Probit => norm_ln_cdf(u),
            LinkFamily::Cloglog | LinkFamily::SkewedWeibull => match self.exponent(u) {
                Some(s) => log1mexp(-s),
                None => f64::NEG_INFINITY,
            },
            LinkFamily::StandardGev | LinkFamily::Frechet => match self.exponent(u) {
                Some(s) => -s,
                None if self.outside_is_upper(u) => 0.0,
                None => f64::NEG_INFINITY,
            },
        }
    }

    /// `ln(1 - F(u))`; `-inf` at or above the upper support endpoint.
    pub fn log_sf(&self, u: f64) -> f64 {
        match self.family {
            LinkFamily::Logit => -softplus(u),
            LinkFamily::Probit => norm_ln_cdf(-u),
            LinkFamily::Cloglog | LinkFamily::SkewedWeibull => match self.exponent(u) {
                Some(s) => -s,
                None => 0.0,
            },
            LinkFamily::StandardGev | LinkFamily::Frechet => match self.exponent(u) {
                Some(s) => log1mexp(-s),
                None if self.outside_is_upper(u) => f64::NEG_INFINITY,
                None => 0.0,
            },
        }
    }

    pub fn pdf(&self, u: f64) -> f64 {
        self.log_pdf(u).exp()
    }

    pub fn log_pdf(&self, u: f64) -> f64 {
        let k = self.shape;
        match self.family {
            LinkFamily::Logit => -u.abs() - 2.0 * (-u.abs()).exp().ln_1p(),
            LinkFamily::Probit => norm_ln_pdf(u),
            LinkFamily::Cloglog => u - u.exp(),
            LinkFamily::StandardGev if self.is_gumbel() => -u - (-u).exp(),
            LinkFamily::StandardGev => {
                let t = 1.0 + k * u;
                if t <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                (-1.0 / k - 1.0) * t.ln() - t.powf(-1.0 / k)
            }
            LinkFamily::SkewedWeibull => {
                if u <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                k.ln() + (k - 1.0) * u.ln() - u.powf(k)
            }
            LinkFamily::Frechet => {
                if u <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                k.ln() - (1.0 + k) * u.ln() - u.powf(-k)
            }
        }
    }

    /// `F^{-1}(p)` for `p` in (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!(
                "quantile probability must lie in (0, 1), got {p}"
            )));
        }
        let k = self.shape;
        let q = match self.family {
            LinkFamily::Logit => (p / (1.0 - p)).ln(),
            LinkFamily::Probit => norm_quantile(p),
            LinkFamily::Cloglog => (-(-p).ln_1p()).ln(),
            LinkFamily::StandardGev if self.is_gumbel() => -(-p.ln()).ln(),
            LinkFamily::StandardGev => (-k * (-p.ln()).ln()).exp_m1() / k,
            LinkFamily::SkewedWeibull => (-(-p).ln_1p()).powf(1.0 / k),
            LinkFamily::Frechet => (-p.ln()).powf(-1.0 / k),
        };
        Ok(q)
    }

    /// Maximizer of the density; boundary value when the density is monotone.
    pub fn mode(&self) -> f64 {
        let k = self.shape;
        match self.family {
            LinkFamily::Logit | LinkFamily::Probit | LinkFamily::Cloglog => 0.0,
            LinkFamily::StandardGev if self.is_gumbel() => 0.0,
            // density increases up to the upper endpoint
            LinkFamily::StandardGev if k <= -1.0 => -1.0 / k,
            LinkFamily::StandardGev => ((1.0 + k).powf(-k) - 1.0) / k,
            LinkFamily::SkewedWeibull if k <= 1.0 => 0.0,
            LinkFamily::SkewedWeibull => ((k - 1.0) / k).powf(1.0 / k),
            LinkFamily::Frechet => (k / (1.0 + k)).powf(1.0 / k),
        }
    }

    /// Arnold–Groeneveld skewness `1 - 2F(mode)`.
    pub fn ag_skewness(&self) -> f64 {
        1.0 - 2.0 * self.cdf(self.mode())
    }

    /// Inverse-transform draw from `F`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p: f64 = rng.sample(Open01);
        self.quantile_open(p)
    }

    pub(crate) fn quantile_open(&self, p: f64) -> f64 {
        self.quantile(p).expect("probability drawn from the open unit interval")
    }
}

impl fmt::Display for LinkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.family.shape_name(), self.shape()) {
            (Some(name), Some(s)) => write!(f, "{}({name}={s})", self.family),
            _ => write!(f, "{}", self.family),
        }
    }
}
