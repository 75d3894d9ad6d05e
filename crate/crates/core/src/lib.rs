//! Binary regression with symmetric and skewed link functions for
//! highly imbalanced outcomes.

pub mod cli;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod frequentist;
pub mod linkfun;
pub mod mcmc;
pub mod model;
pub mod parallel;
pub mod predict;
pub mod report;
pub mod simgen;
pub mod special;

pub use error::{Error, Result};
pub use linkfun::{LinkFamily, LinkSpec, Support};
pub use model::{Coefficients, Dataset, Posterior, PriorRegime, PriorSpec};
pub use parallel::Execution;
