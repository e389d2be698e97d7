//! Experiment configuration: one JSON document per run.

use crate::error::{cfg_err, Result};
use crate::prior::{CppPrior, HistPrior, SubordinatorPrior};
use crate::truth::Truth;
use serde::{Deserialize, Serialize};

/// Which experiment a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Coverage,
    NegativeLinear,
    CppLimit,
    NegativeKink,
    Contract,
}

/// Prior selection with a `kind` discriminator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorSpec {
    Hist(HistPrior),
    Cpp(CppPrior),
    Subordinator(SubordinatorPrior),
}

/// Sampler knobs forwarded to the reversible-jump chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub iters: usize,
    #[serde(default)]
    pub burnin: Option<usize>,
    #[serde(default)]
    pub thin: Option<usize>,
    /// Move weights `h:t:b:d`.
    #[serde(default = "default_moves")]
    pub moves: [f64; 4],
    #[serde(default = "default_height_scale")]
    pub height_scale: f64,
    #[serde(default)]
    pub time_window: Option<f64>,
    #[serde(default = "default_chains")]
    pub chains: usize,
}

fn default_moves() -> [f64; 4] {
    [0.4, 0.3, 0.15, 0.15]
}

fn default_height_scale() -> f64 {
    0.5
}

fn default_chains() -> usize {
    1
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            iters: 100_000,
            burnin: None,
            thin: None,
            moves: default_moves(),
            height_scale: default_height_scale(),
            time_window: None,
            chains: 1,
        }
    }
}

/// Contraction-rate target declared for slope comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateTarget {
    /// `sqrt(log n / n)`.
    SqrtLogNOverN,
    /// `(log n / n)^{beta/(1+beta)}` with the Hölder index read from config.
    Holder,
    /// `K_n log n / n` with `K_n` from the `k_rule`.
    KnLogNOverN,
}

/// How `K` scales with `n` in multi-`n` experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum KRule {
    Fixed { k: usize },
    /// `K = ceil(n^{exponent})`.
    Power { exponent: f64 },
    /// `K = ceil(sqrt(n))`.
    SqrtN,
}

impl KRule {
    pub fn k_for(&self, n: f64) -> usize {
        match self {
            KRule::Fixed { k } => *k,
            KRule::Power { exponent } => n.powf(*exponent).ceil() as usize,
            KRule::SqrtN => n.sqrt().ceil() as usize,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub truth: Option<Truth>,
    pub prior: Option<PriorSpec>,
    /// Intensities to sweep; single-element for fixed-n experiments.
    pub n_grid: Vec<f64>,
    pub k_rule: KRule,
    pub alpha: f64,
    /// Replications per grid point.
    pub replications: usize,
    pub master_seed: u64,
    /// Observation window.
    #[serde(default = "default_window")]
    pub window: f64,
    /// Band-height override; `None` picks the per-experiment default.
    #[serde(default)]
    pub band: Option<f64>,
    #[serde(default)]
    pub sampler: SamplerConfig,
    /// Extra cheap replications for coverage-style tallies that need no
    /// MCMC (0 = use `replications`).
    #[serde(default)]
    pub coverage_replications: usize,
    /// Strong-signal slack used when the experiment constructs its truths.
    #[serde(default = "default_slack")]
    pub ms_slack: f64,
    /// Range bound R for constructed strong-signal truths.
    #[serde(default = "default_ms_r")]
    pub ms_r: f64,
    /// Declared rate target for contraction slope fits.
    #[serde(default)]
    pub rate_target: Option<RateTarget>,
    pub outdir: Option<std::path::PathBuf>,
}

fn default_window() -> f64 {
    1.0
}

fn default_slack() -> f64 {
    8.0
}

fn default_ms_r() -> f64 {
    2.0
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return cfg_err("need at least one replication");
        }
        if self.n_grid.is_empty() {
            return cfg_err("n_grid must be nonempty");
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return cfg_err("n_grid must be increasing");
        }
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return cfg_err("alpha must lie in (0, 1)");
        }
        if let Some(t) = &self.truth {
            t.validate()?;
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}
