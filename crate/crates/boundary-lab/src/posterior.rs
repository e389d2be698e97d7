//! Exact posterior sampling for random histogram priors, and credible
//! intervals.
//!
//! Under a histogram prior the likelihood factorizes over bins as
//! `Π_j e^{r_j a_j} 1(a_j ≤ â_j)` with `r_j = n·(t_j − t_{j-1})` and `â_j`
//! the per-bin data minimum, so the posterior has independent coordinates:
//! the prior density tilted by `e^{r_j a_j}` and truncated at `â_j`. For the
//! uniform prior this is a truncated exponential sampled by inverse CDF; for
//! other priors we rejection-sample from that same tilted-exponential
//! envelope and report acceptance rates.

use crate::error::{cfg_err, data_err, Error, Result};
use crate::mle::{histogram_mle, MleResult};
use crate::numeric::normal_quantile;
use crate::point_set::PointSet;
use crate::prior::{HistDensity, HistPrior};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::cell::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMethod {
    Quantile,
    IalphaPlugin,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CredibleInterval {
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
    pub method: IntervalMethod,
}

impl CredibleInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Empirical equal-tail credible interval from posterior samples (type-7
/// quantiles). Requires at least `100/alpha` samples.
pub fn credible_interval(samples: &[f64], alpha: f64) -> Result<CredibleInterval> {
    if !(0.0 < alpha && alpha < 1.0) {
        return cfg_err("alpha must be in (0, 1)");
    }
    if (samples.len() as f64) < 100.0 / alpha {
        return cfg_err(format!(
            "need at least {} samples for alpha = {alpha}, got {}",
            (100.0 / alpha).ceil(),
            samples.len()
        ));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let lower = crate::stats::quantile_type7(&xs, alpha / 2.0);
    let upper = crate::stats::quantile_type7(&xs, 1.0 - alpha / 2.0);
    Ok(CredibleInterval { lower, upper, alpha, method: IntervalMethod::Quantile })
}

/// The plug-in credible interval
/// `θ̂ − K/n + (√K/n)·[Φ^{-1}(α/2), Φ^{-1}(1−α/2)]`.
pub fn ialpha(theta_mle: f64, k: usize, n: f64, alpha: f64) -> Result<CredibleInterval> {
    if !(0.0 < alpha && alpha < 1.0) {
        return cfg_err("alpha must be in (0, 1)");
    }
    let center = theta_mle - k as f64 / n;
    let scale = (k as f64).sqrt() / n;
    Ok(CredibleInterval {
        lower: center + scale * normal_quantile(alpha / 2.0),
        upper: center + scale * normal_quantile(1.0 - alpha / 2.0),
        alpha,
        method: IntervalMethod::IalphaPlugin,
    })
}

/// Exact per-coordinate sampler for the histogram posterior.
#[derive(Debug)]
pub struct HistPosterior {
    prior: HistPrior,
    /// Per-bin data minima.
    caps: Vec<f64>,
    /// Tilt rates `r_j = n (t_j − t_{j-1})`.
    rates: Vec<f64>,
    widths: Vec<f64>,
    mle: MleResult,
    proposals: Cell<u64>,
    accepts: Cell<u64>,
}

impl HistPosterior {
    /// Builds the sampler, verifying every bin is nonempty and every
    /// coordinate posterior is proper (nonempty truncated support).
    pub fn new(ps: &PointSet, prior: &HistPrior) -> Result<HistPosterior> {
        prior.validate()?;
        let mle = histogram_mle(ps, &prior.grid)?;
        let n = ps.intensity;
        let caps = mle.fit.values_on_grid(&prior.grid);
        let (lo, _hi) = prior.support();
        for (j, cap) in caps.iter().enumerate() {
            if *cap < lo {
                return data_err(format!(
                    "posterior support empty in bin {}: data minimum {cap} lies below the \
                     prior's lower support bound {lo}",
                    j + 1
                ));
            }
        }
        let widths: Vec<f64> = prior.grid.windows(2).map(|w| w[1] - w[0]).collect();
        let rates: Vec<f64> = widths.iter().map(|w| n * w).collect();
        Ok(HistPosterior {
            prior: prior.clone(),
            caps,
            rates,
            widths,
            mle,
            proposals: Cell::new(0),
            accepts: Cell::new(0),
        })
    }

    pub fn k(&self) -> usize {
        self.caps.len()
    }

    pub fn caps(&self) -> &[f64] {
        &self.caps
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn mle(&self) -> &MleResult {
        &self.mle
    }

    /// `∫ f̂` over the grid span.
    pub fn theta_mle(&self) -> f64 {
        self.caps.iter().zip(&self.widths).map(|(a, w)| a * w).sum()
    }

    /// Fraction of rejection proposals accepted so far.
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals.get() == 0 {
            f64::NAN
        } else {
            self.accepts.get() as f64 / self.proposals.get() as f64
        }
    }

    /// Exact inverse-CDF draw of coordinate `j`; only valid for the uniform
    /// prior where the posterior is exactly a truncated tilted uniform.
    pub fn sample_coord_exact<R: Rng>(&self, j: usize, rng: &mut R) -> Result<f64> {
        let HistDensity::Uniform { r } = self.prior.g else {
            return cfg_err("exact coordinate sampling requires the uniform prior");
        };
        let up = self.caps[j].min(r);
        let lo = -r;
        Ok(truncated_tilted_exp(lo, up, self.rates[j], rng))
    }

    /// Rejection draw of coordinate `j` from the envelope
    /// `∝ e^{r_j a} · sup g` on the truncated support.
    pub fn sample_coord_rejection<R: Rng>(&self, j: usize, rng: &mut R) -> Result<f64> {
        let (lo, hi) = self.prior.support();
        let up = self.caps[j].min(hi);
        let lo = lo.max(up - 60.0 / self.rates[j]); // envelope mass below is ~e^{-60}
        let log_sup = self.prior.sup_g().ln();
        for _ in 0..100_000 {
            self.proposals.set(self.proposals.get() + 1);
            let a = truncated_tilted_exp(lo, up, self.rates[j], rng);
            let log_accept = self.prior.log_g(a) - log_sup;
            if rng.random::<f64>().ln() < log_accept {
                self.accepts.set(self.accepts.get() + 1);
                return Ok(a);
            }
        }
        Err(Error::Data(format!(
            "rejection sampler for bin {} exceeded 1e5 attempts",
            j + 1
        )))
    }

    /// One draw of the full level vector (exact path for uniform priors,
    /// rejection otherwise).
    pub fn sample_levels<R: Rng>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let exact = matches!(self.prior.g, HistDensity::Uniform { .. });
        (0..self.k())
            .map(|j| {
                if exact {
                    self.sample_coord_exact(j, rng)
                } else {
                    self.sample_coord_rejection(j, rng)
                }
            })
            .collect()
    }

    /// `ϑ = Σ_j a_j (t_j − t_{j-1})` for a sampled level vector.
    pub fn theta_of(&self, levels: &[f64]) -> f64 {
        levels.iter().zip(&self.widths).map(|(a, w)| a * w).sum()
    }

    /// Draws `m` posterior samples of `ϑ`.
    pub fn sample_theta<R: Rng>(&self, m: usize, rng: &mut R) -> Result<Vec<f64>> {
        (0..m)
            .map(|_| self.sample_levels(rng).map(|l| self.theta_of(&l)))
            .collect()
    }
}

/// Inverse-CDF draw from the density `∝ e^{rate·a}` on `[lo, up]`.
pub fn truncated_tilted_exp<R: Rng>(lo: f64, up: f64, rate: f64, rng: &mut R) -> f64 {
    debug_assert!(lo <= up && rate > 0.0);
    let u: f64 = rng.random();
    let q = (-rate * (up - lo)).exp();
    // CDF^{-1}(u) = up + ln(q + u(1-q)) / rate
    let x = up + (q + u * (1.0 - q)).ln() / rate;
    x.clamp(lo, up)
}
