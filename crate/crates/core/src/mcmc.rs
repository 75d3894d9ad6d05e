//! Random-walk Metropolis–Hastings over flat parameter vectors.
//!
//! Each iteration proposes every coordinate jointly from a normal kernel
//! centred on the current state and accepts with probability
//! `min{1, exp(log p(candidate) - log p(current))}` (the kernel is symmetric,
//! so the proposal ratio cancels). Chains use seeds `seed, seed + 1, …`,
//! optionally run a pilot phase that rescales the step sizes, discard
//! `burn_in` iterations and keep every `thin`-th state afterwards.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};

use crate::error::{Error, Result};
use crate::model::Posterior;
use crate::parallel::Execution;

/// Unnormalized log density over `R^dim`; `-inf` marks infeasible points.
pub trait LogDensity: Sync {
    fn dim(&self) -> usize;
    fn log_density(&self, theta: &[f64]) -> f64;
}

impl LogDensity for Posterior<'_> {
    fn dim(&self) -> usize {
        Posterior::dim(self)
    }

    fn log_density(&self, theta: &[f64]) -> f64 {
        Posterior::log_density(self, theta)
    }
}

/// Adapts a closure to [`LogDensity`].
pub struct FnDensity<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnDensity<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnDensity { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> LogDensity for FnDensity<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&self, theta: &[f64]) -> f64 {
        (self.f)(theta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuningConfig {
    pub rounds: usize,
    pub round_length: usize,
    pub target_low: f64,
    pub target_high: f64,
    pub factor: f64,
    /// Also set the relative step sizes from each coordinate's spread over a
    /// pilot round, keeping their geometric mean. Off means every step is
    /// only ever scaled by the same factor.
    pub shape: bool,
}

impl Default for TuningConfig {
    fn default() -> Self {
        TuningConfig {
            rounds: 10,
            round_length: 500,
            target_low: 0.2,
            target_high: 0.5,
            factor: 1.5,
            shape: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MHConfig {
    /// Post-burn-in iterations per chain.
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Kernel standard deviations, one per coordinate. Empty means
    /// [`MHConfig::DEFAULT_STEP`] for every coordinate.
    pub step_sizes: Vec<f64>,
    pub seed: u64,
    pub chains: usize,
    pub tune: bool,
    pub tuning: TuningConfig,
    pub execution: Execution,
}

impl Default for MHConfig {
    fn default() -> Self {
        MHConfig {
            iterations: 20_000,
            burn_in: 1_000,
            thin: 50,
            step_sizes: Vec::new(),
            seed: 0,
            chains: 3,
            tune: true,
            tuning: TuningConfig::default(),
            execution: Execution::default(),
        }
    }
}

impl MHConfig {
    pub const DEFAULT_STEP: f64 = 0.1;

    pub fn validate(&self, dim: usize) -> Result<()> {
        for (name, v) in [
            ("iterations", self.iterations),
            ("burn_in", self.burn_in),
            ("thin", self.thin),
            ("chains", self.chains),
        ] {
            if v == 0 {
                return Err(Error::Invalid(format!("{name} must be at least 1")));
            }
        }
        if self.thin > self.iterations {
            return Err(Error::Invalid(format!(
                "thin ({}) exceeds iterations ({}); no draws would be retained",
                self.thin, self.iterations
            )));
        }
        if !self.step_sizes.is_empty() && self.step_sizes.len() != dim {
            return Err(Error::Dimension(format!(
                "{} step sizes for {dim} parameters",
                self.step_sizes.len()
            )));
        }
        if let Some(s) = self.step_sizes.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::Invalid(format!("step sizes must be positive, got {s}")));
        }
        let t = &self.tuning;
        if self.tune && (t.rounds == 0 || t.round_length == 0 || t.factor.is_nan() || t.factor <= 1.0) {
            return Err(Error::Invalid("tuning needs rounds, round_length >= 1 and factor > 1".into()));
        }
        Ok(())
    }

    fn resolved_steps(&self, dim: usize) -> Vec<f64> {
        if self.step_sizes.is_empty() {
            vec![Self::DEFAULT_STEP; dim]
        } else {
            self.step_sizes.clone()
        }
    }

    pub fn retained_per_chain(&self) -> usize {
        self.iterations / self.thin
    }
}

/// One Metropolis–Hastings decision, recorded for auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub candidate: Vec<f64>,
    pub candidate_log_density: f64,
    pub current_log_density: f64,
    pub uniform: f64,
    pub accepted: bool,
}

impl Transition {
    /// `min{1, exp(Δ log p)}`.
    pub fn acceptance_probability(&self) -> f64 {
        (self.candidate_log_density - self.current_log_density)
            .exp()
            .min(1.0)
    }
}

/// A single sequential chain.
pub struct Chain<'t, T: ?Sized> {
    target: &'t T,
    state: Vec<f64>,
    log_density: f64,
    steps: Vec<f64>,
    rng: ChaCha8Rng,
}

impl<'t, T: LogDensity + ?Sized> Chain<'t, T> {
    pub fn new(target: &'t T, init: &[f64], steps: Vec<f64>, seed: u64) -> Result<Self> {
        if init.len() != target.dim() || steps.len() != target.dim() {
            return Err(Error::Dimension(format!(
                "target has {} parameters; init has {}, steps {}",
                target.dim(),
                init.len(),
                steps.len()
            )));
        }
        let log_density = target.log_density(init);
        if !log_density.is_finite() {
            return Err(Error::Init(format!(
                "log density at the starting point is {log_density}"
            )));
        }
        Ok(Chain {
            target,
            state: init.to_vec(),
            log_density,
            steps,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn log_density(&self) -> f64 {
        self.log_density
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn step(&mut self) -> Transition {
        let candidate: Vec<f64> = self
            .state
            .iter()
            .zip(&self.steps)
            .map(|(&x, &s)| {
                let z: f64 = self.rng.sample(StandardNormal);
                x + s * z
            })
            .collect();
        let uniform: f64 = self.rng.sample(Open01);
        let candidate_log_density = self.target.log_density(&candidate);
        let mut t = Transition {
            candidate,
            candidate_log_density,
            current_log_density: self.log_density,
            uniform,
            accepted: false,
        };
        t.accepted = uniform <= t.acceptance_probability();
        if t.accepted {
            self.state.clone_from(&t.candidate);
            self.log_density = candidate_log_density;
        }
        t
    }

    /// Runs `n` steps and returns the fraction accepted.
    fn advance(&mut self, n: usize) -> f64 {
        let accepted = (0..n).filter(|_| self.step().accepted).count();
        accepted as f64 / n as f64
    }

    /// Runs `n` steps; returns the fraction accepted and the standard
    /// deviation of each coordinate over the visited states.
    fn advance_with_spread(&mut self, n: usize) -> (f64, Vec<f64>) {
        let d = self.state.len();
        let mut mean = vec![0.0; d];
        let mut m2 = vec![0.0; d];
        let mut accepted = 0;
        for k in 1..=n {
            accepted += usize::from(self.step().accepted);
            for j in 0..d {
                let delta = self.state[j] - mean[j];
                mean[j] += delta / k as f64;
                m2[j] += delta * (self.state[j] - mean[j]);
            }
        }
        let spread = m2.iter().map(|v| (v / n as f64).sqrt()).collect();
        (accepted as f64 / n as f64, spread)
    }

    /// Sets step proportions from `spread` without changing their geometric
    /// mean. Returns false (steps untouched) if some coordinate never moved.
    fn reshape(&mut self, spread: &[f64]) -> bool {
        if spread.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return false;
        }
        let d = spread.len() as f64;
        let log_steps = self.steps.iter().map(|s| s.ln()).sum::<f64>() / d;
        let log_spread = spread.iter().map(|s| s.ln()).sum::<f64>() / d;
        for (s, w) in self.steps.iter_mut().zip(spread) {
            *s = (log_steps + w.ln() - log_spread).exp();
        }
        true
    }

    /// Pilot phase: rescale all steps by `factor` until a round's acceptance
    /// lands in the target band. With shaping on, each round also resets the
    /// step proportions from the coordinates' spread, and the phase only
    /// ends in band once the proportions have been set at least once.
    /// The chain keeps its final pilot state.
    fn pilot(&mut self, cfg: &TuningConfig) -> TuneResult {
        let mut acceptance = f64::NAN;
        let mut shaped = !cfg.shape || self.steps.len() == 1;
        for _ in 0..cfg.rounds {
            let spread;
            (acceptance, spread) = if cfg.shape {
                self.advance_with_spread(cfg.round_length)
            } else {
                (self.advance(cfg.round_length), Vec::new())
            };
            let in_band = (cfg.target_low..=cfg.target_high).contains(&acceptance);
            if in_band && shaped {
                return TuneResult {
                    step_sizes: self.steps.clone(),
                    final_acceptance: acceptance,
                    in_band: true,
                };
            }
            if cfg.shape && self.steps.len() > 1 && acceptance >= cfg.target_low / 2.0 {
                shaped |= self.reshape(&spread);
            }
            if acceptance < cfg.target_low {
                self.steps.iter_mut().for_each(|s| *s /= cfg.factor);
            } else if acceptance > cfg.target_high {
                self.steps.iter_mut().for_each(|s| *s *= cfg.factor);
            }
        }
        TuneResult {
            step_sizes: self.steps.clone(),
            final_acceptance: acceptance,
            in_band: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub step_sizes: Vec<f64>,
    /// Acceptance rate of the last pilot round.
    pub final_acceptance: f64,
    pub in_band: bool,
}

/// Pilot-tunes step sizes from `init` using the first chain's seed.
pub fn tune_steps<T: LogDensity + ?Sized>(
    target: &T,
    init: &[f64],
    config: &MHConfig,
) -> Result<TuneResult> {
    config.validate(target.dim())?;
    let mut chain = Chain::new(target, init, config.resolved_steps(target.dim()), config.seed)?;
    Ok(chain.pilot(&config.tuning))
}

/// Retained draws from one or more chains, stacked chain by chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples {
    pub parameter_names: Vec<String>,
    /// `S x d`, row-major by draw.
    pub draws: Vec<Vec<f64>>,
    pub chain: Vec<usize>,
    pub log_posterior: Vec<f64>,
    pub acceptance_rate: Vec<f64>,
    pub step_sizes: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
    pub config: MHConfig,
}

struct ChainOutput {
    draws: Vec<Vec<f64>>,
    log_posterior: Vec<f64>,
    acceptance: f64,
    steps: Vec<f64>,
    warning: Option<String>,
}

fn run_chain<T: LogDensity + ?Sized>(
    target: &T,
    init: &[f64],
    config: &MHConfig,
    index: usize,
) -> Result<ChainOutput> {
    let seed = config.seed.wrapping_add(index as u64);
    let mut chain = Chain::new(target, init, config.resolved_steps(target.dim()), seed)?;
    let mut warning = None;
    if config.tune {
        let tuned = chain.pilot(&config.tuning);
        if !tuned.in_band {
            warning = Some(format!(
                "chain {index}: pilot tuning ended with acceptance {:.3} outside [{}, {}]",
                tuned.final_acceptance, config.tuning.target_low, config.tuning.target_high
            ));
        }
    }
    let total = config.burn_in + config.iterations;
    let mut draws = Vec::with_capacity(config.retained_per_chain());
    let mut log_posterior = Vec::with_capacity(config.retained_per_chain());
    let mut accepted = 0usize;
    for t in 1..=total {
        if chain.step().accepted {
            accepted += 1;
        }
        if t > config.burn_in && (t - config.burn_in).is_multiple_of(config.thin) {
            draws.push(chain.state().to_vec());
            log_posterior.push(chain.log_density());
        }
    }
    Ok(ChainOutput {
        draws,
        log_posterior,
        acceptance: accepted as f64 / total as f64,
        steps: chain.steps().to_vec(),
        warning,
    })
}

/// Runs `config.chains` independent chains from `init`.
pub fn run_mh<T: LogDensity + ?Sized>(
    target: &T,
    init: &[f64],
    parameter_names: Vec<String>,
    config: &MHConfig,
) -> Result<PosteriorSamples> {
    let dim = target.dim();
    config.validate(dim)?;
    if parameter_names.len() != dim {
        return Err(Error::Dimension(format!(
            "{} parameter names for {dim} parameters",
            parameter_names.len()
        )));
    }
    let outputs = config
        .execution
        .map_indexed(config.chains, |c| run_chain(target, init, config, c));
    let mut samples = PosteriorSamples {
        parameter_names,
        draws: Vec::new(),
        chain: Vec::new(),
        log_posterior: Vec::new(),
        acceptance_rate: Vec::new(),
        step_sizes: Vec::new(),
        warnings: Vec::new(),
        config: config.clone(),
    };
    for (c, out) in outputs.into_iter().enumerate() {
        let out = out?;
        samples.chain.extend(std::iter::repeat_n(c, out.draws.len()));
        samples.draws.extend(out.draws);
        samples.log_posterior.extend(out.log_posterior);
        samples.acceptance_rate.push(out.acceptance);
        samples.step_sizes.push(out.steps);
        samples.warnings.extend(out.warning);
    }
    Ok(samples)
}

impl PosteriorSamples {
    /// Samples assembled from externally produced draws (one chain, no sampler metadata).
    pub fn from_draws(
        parameter_names: Vec<String>,
        draws: Vec<Vec<f64>>,
        chain: Vec<usize>,
        log_posterior: Vec<f64>,
    ) -> Result<Self> {
        let d = parameter_names.len();
        if draws.is_empty() {
            return Err(Error::Invalid("posterior samples are empty".into()));
        }
        if draws.iter().any(|r| r.len() != d) || chain.len() != draws.len() || log_posterior.len() != draws.len() {
            return Err(Error::Dimension("draw rows, chain ids and log densities disagree".into()));
        }
        let chains = chain.iter().max().map_or(0, |&c| c + 1);
        Ok(PosteriorSamples {
            parameter_names,
            draws,
            chain,
            log_posterior,
            acceptance_rate: Vec::new(),
            step_sizes: Vec::new(),
            warnings: Vec::new(),
            config: MHConfig {
                chains: chains.max(1),
                ..MHConfig::default()
            },
        })
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.parameter_names.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.draws.iter().map(|r| r[j]).collect()
    }

    /// Coordinate-wise mean over all retained draws.
    pub fn posterior_mean(&self) -> Vec<f64> {
        let n = self.len() as f64;
        (0..self.dim())
            .map(|j| self.draws.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect()
    }

    /// `Σ(θ - θ̄)² / N²`: the variance of the posterior-mean estimator
    /// under independent draws.
    pub fn posterior_variance(&self) -> Vec<f64> {
        let n = self.len() as f64;
        self.sum_sq_dev().into_iter().map(|s| s / (n * n)).collect()
    }

    /// Conventional unbiased sample variance `Σ(θ - θ̄)² / (N - 1)`.
    pub fn sample_variance(&self) -> Vec<f64> {
        let n = self.len() as f64;
        self.sum_sq_dev().into_iter().map(|s| s / (n - 1.0)).collect()
    }

    fn sum_sq_dev(&self) -> Vec<f64> {
        let mean = self.posterior_mean();
        (0..self.dim())
            .map(|j| self.draws.iter().map(|r| (r[j] - mean[j]).powi(2)).sum())
            .collect()
    }

    /// Per-chain coordinate means, for multi-chain agreement checks.
    pub fn chain_means(&self) -> Vec<Vec<f64>> {
        let chains = self.chain.iter().max().map_or(0, |&c| c + 1);
        (0..chains)
            .map(|c| {
                let rows: Vec<&Vec<f64>> = self
                    .draws
                    .iter()
                    .zip(&self.chain)
                    .filter(|(_, &k)| k == c)
                    .map(|(r, _)| r)
                    .collect();
                let n = rows.len() as f64;
                (0..self.dim())
                    .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
                    .collect()
            })
            .collect()
    }

    /// Index of the retained draw with the largest log posterior (first on ties).
    pub fn map_draw(&self) -> usize {
        let mut best = 0;
        for (i, &lp) in self.log_posterior.iter().enumerate() {
            if lp > self.log_posterior[best] {
                best = i;
            }
        }
        best
    }

    /// Columnar CSV: `chain,<parameters…>,log_posterior`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "chain,{},log_posterior", self.parameter_names.join(","))?;
        for ((row, c), lp) in self.draws.iter().zip(&self.chain).zip(&self.log_posterior) {
            let vals: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{c},{},{lp}", vals.join(","))?;
        }
        Ok(())
    }

    /// Parses the format written by [`PosteriorSamples::write_csv`]; lines
    /// starting with `#` are skipped.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(r);
        let headers: Vec<String> = reader.headers()?.iter().map(String::from).collect();
        let d = headers.len();
        if d < 3 || headers[0] != "chain" || headers[d - 1] != "log_posterior" {
            return Err(Error::Invalid(
                "samples header must be `chain,<parameters>,log_posterior`".into(),
            ));
        }
        let names = headers[1..d - 1].to_vec();
        let (mut draws, mut chain, mut lps) = (Vec::new(), Vec::new(), Vec::new());
        for (i, rec) in reader.records().enumerate() {
            let rec = rec?;
            let field = |j: usize| -> Result<f64> {
                rec.get(j).unwrap_or("").parse::<f64>().map_err(|_| Error::Record {
                    row: i + 1,
                    field: headers[j].clone(),
                    message: format!("not a number: `{}`", rec.get(j).unwrap_or("")),
                })
            };
            let c = field(0)?;
            if c < 0.0 || c.fract() != 0.0 {
                return Err(Error::Record {
                    row: i + 1,
                    field: "chain".into(),
                    message: "chain id must be a nonnegative integer".into(),
                });
            }
            chain.push(c as usize);
            draws.push((1..d - 1).map(field).collect::<Result<Vec<_>>>()?);
            lps.push(field(d - 1)?);
        }
        PosteriorSamples::from_draws(names, draws, chain, lps)
    }
}
